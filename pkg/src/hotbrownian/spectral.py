"""Power spectral density estimation and Lorentzian fitting.

Welch-averaged one-sided PSDs of detector time traces, and weighted
least-squares fits of the harmonic-oscillator (Lorentzian) line shape

    S(f) = (2/pi) * A * f_q^2 * gamma / ((f^2 - f_q^2)^2 + f^2 gamma^2) + c

parameterized so that A is the band-integrated area (signal variance),
f_q the resonance frequency [Hz] and gamma the linewidth [Hz]
(gamma = Gamma/(2*pi) for a damping rate Gamma in rad/s).  The peak
height is 2A/(pi*gamma) and the integral over 0..inf equals A exactly,
which is what downstream energy calibration relies on.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np
import scipy.signal

from ._leastsq import least_squares_gn
from .errors import DomainError, EstimationError

__all__ = ["Psd", "PsdFit", "welch_psd", "psd_model", "fit_psd"]


# =============================================================================
# Welch estimation
# =============================================================================

@dataclass
class Psd:
    """One-sided Welch PSD estimate."""

    frequencies: np.ndarray              # [Hz], starts at 0
    values: np.ndarray                   # [signal^2/Hz]
    segment_count: int
    window_name: str
    dt: float                            # [s]


def welch_psd(
    trace,
    axis: str = "x",
    segment_length: int = 16384,
    overlap_fraction: float = 0.5,
    window: str = "hann",
) -> Psd:
    """Welch-averaged one-sided PSD of one trace axis.

    Parameters
    ----------
    trace:
        Object with ``dt`` [s] and a ``signals`` mapping of per-axis
        sample arrays (a simulated time trace), or a bare sample array —
        then the sampling step must be supplied via the ``dt`` attribute
        workaround of wrapping it yourself is avoided by passing a trace.
    axis:
        Which axis to take from ``trace.signals``.
    segment_length:
        Samples per Welch segment; clipped to the trace length.
    overlap_fraction:
        Fractional segment overlap in [0, 1).
    window:
        Window name understood by :func:`scipy.signal.get_window`.

    Notes
    -----
    Density scaling without detrending: a bin-centered coherent tone of
    amplitude a integrates to a^2/2, and white noise of variance sigma^2
    sits at the one-sided level 2*sigma^2*dt.
    """
    if hasattr(trace, "signals"):
        signal = np.asarray(trace.signals[axis], dtype=float)
        dt = float(trace.dt)
    else:
        raise TypeError(
            "welch_psd expects a time trace with .signals and .dt; "
            "wrap raw arrays in a trace object first"
        )
    if dt <= 0:
        raise DomainError(f"dt must be > 0, got {dt}")
    if signal.ndim != 1 or signal.size < 2:
        raise DomainError("signal must be a 1-D array with at least 2 samples")
    if not np.isfinite(signal).all():
        raise DomainError("signal contains non-finite samples")
    if not 0.0 <= overlap_fraction < 1.0:
        raise DomainError(f"overlap_fraction must be in [0, 1), got {overlap_fraction}")
    if segment_length < 2:
        raise DomainError(f"segment_length must be >= 2, got {segment_length}")

    nperseg = min(int(segment_length), signal.size)
    noverlap = int(nperseg * overlap_fraction)
    step = nperseg - noverlap
    n_segments = 1 + (signal.size - nperseg) // step

    freqs, values = scipy.signal.welch(
        signal,
        fs=1.0 / dt,
        window=window,
        nperseg=nperseg,
        noverlap=noverlap,
        detrend=False,
        scaling="density",
    )
    if n_segments < 2:
        warnings.warn(
            f"PSD averaged over only {n_segments} segment(s); "
            "estimates carry full chi-squared scatter",
            UserWarning,
            stacklevel=2,
        )
    return Psd(
        frequencies=freqs,
        values=values,
        segment_count=int(n_segments),
        window_name=str(window),
        dt=dt,
    )


# =============================================================================
# Lorentzian model and fit
# =============================================================================

def psd_model(
    f: np.ndarray,
    A: float,
    f_q: float,
    gamma: float,
    floor: float = 0.0,
    sample_rate: float | None = None,
) -> np.ndarray:
    """Area-normalized harmonic-oscillator PSD plus a constant floor.

    When ``sample_rate`` [Hz] is given, the first aliased image of the
    line is folded in: sampling maps spectral weight above the Nyquist
    frequency onto fs - f, which doubles the apparent tail level right
    at Nyquist and decays away from it.
    """
    f = np.asarray(f, dtype=float)
    denom = (f**2 - f_q**2) ** 2 + (f * gamma) ** 2
    out = (2.0 / np.pi) * A * f_q**2 * gamma / denom + floor
    if sample_rate is not None:
        f_m = sample_rate - f
        denom_m = (f_m**2 - f_q**2) ** 2 + (f_m * gamma) ** 2
        out = out + (2.0 / np.pi) * A * f_q**2 * gamma / denom_m
    return out


def _core_terms(f: np.ndarray, a: float, f_q: float, gamma: float):
    """Lorentzian core and derivatives w.r.t. (A, f_q, gamma) on grid f."""
    denom = (f**2 - f_q**2) ** 2 + (f * gamma) ** 2
    core = (2.0 / np.pi) * a * f_q**2 * gamma / denom
    d_a = core / a
    d_gamma = (2.0 / np.pi) * a * f_q**2 * (denom - 2.0 * gamma**2 * f**2) / denom**2
    d_fq = (
        (2.0 / np.pi) * a * gamma
        * (2.0 * f_q * denom + 4.0 * f_q**3 * (f**2 - f_q**2))
        / denom**2
    )
    return core, d_a, d_fq, d_gamma


def _model_and_jacobian(
    f: np.ndarray, p: np.ndarray, with_floor: bool, f_mirror: np.ndarray | None = None
):
    """Model value and analytic Jacobian w.r.t. (A, f_q, gamma[, c]).

    ``f_mirror`` carries the alias-image frequencies fs - f; when given,
    the mirrored Lorentzian is added so the model matches the spectrum
    of a sampled (aliased) process.  The constant floor is not mirrored:
    it parameterizes the flat level as measured.
    """
    a, f_q, gamma = p[0], p[1], p[2]
    core, d_a, d_fq, d_gamma = _core_terms(f, a, f_q, gamma)
    if f_mirror is not None:
        core_m, d_a_m, d_fq_m, d_gamma_m = _core_terms(f_mirror, a, f_q, gamma)
        core = core + core_m
        d_a = d_a + d_a_m
        d_fq = d_fq + d_fq_m
        d_gamma = d_gamma + d_gamma_m
    model = core + (p[3] if with_floor else 0.0)

    cols = [d_a, d_fq, d_gamma]
    if with_floor:
        cols.append(np.ones_like(f))
    return model, np.column_stack(cols)


def _fit_starts(f: np.ndarray, s: np.ndarray, with_floor: bool) -> list[float]:
    """Data-driven starting point: area, peak location, FWHM linewidth."""
    df = f[1] - f[0] if f.size > 1 else 1.0
    a0 = float(np.sum(s) * df)
    i_pk = int(np.argmax(s))
    f0 = float(f[i_pk])
    lo, hi = max(i_pk - 2, 0), min(i_pk + 3, s.size)
    s_pk = float(np.mean(s[lo:hi]))     # 5-bin smoothed peak height

    # FWHM from half-maximum crossings around the peak; fall back to the
    # area/height relation gamma = 2A/(pi*S_peak) when the half level
    # never drops within the band.
    half = 0.5 * s_pk
    i_left, i_right = i_pk, i_pk
    while i_left > 0 and s[i_left] > half:
        i_left -= 1
    while i_right < s.size - 1 and s[i_right] > half:
        i_right += 1
    fwhm = float(f[i_right] - f[i_left])
    touched_edge = i_left == 0 or i_right == s.size - 1
    if touched_edge or fwhm <= 0:
        gamma0 = max(2.0 * a0 / (np.pi * s_pk), df)
    else:
        gamma0 = max(fwhm, df)

    starts = [a0, max(f0, df), gamma0]
    if with_floor:
        starts.append(0.1 * float(np.min(s)))
    return starts


@dataclass
class PsdFit:
    """Lorentzian fit result.

    ``gamma`` is the linewidth in Hz; multiply by 2*pi for the damping
    rate in rad/s.  ``fit_residual`` is the cost per degree of freedom in
    whatever residual space the fit ran in.
    """

    A: float                             # [signal^2]
    f_q: float                           # [Hz]
    gamma: float                         # [Hz]
    floor: float                         # [signal^2/Hz]; 0 when not fitted
    uncertainties: Mapping[str, float] = field(default_factory=dict)
    fit_residual: float = np.nan
    converged: bool = False
    overdamped: bool = False
    n_points: int = 0

    @property
    def normalized_area(self) -> float:
        """A / f_q^2 — proportional to the CoM energy of the mode."""
        return self.A / self.f_q**2

    @property
    def normalized_area_sigma(self) -> float:
        """1-sigma uncertainty on :attr:`normalized_area`."""
        rel_a = self.uncertainties.get("A", 0.0) / self.A if self.A else 0.0
        rel_f = self.uncertainties.get("f_q", 0.0) / self.f_q if self.f_q else 0.0
        return abs(self.normalized_area) * float(np.hypot(rel_a, 2.0 * rel_f))


def fit_psd(
    psd: Psd,
    fit_band: tuple[float, float] | None = None,
    noise_floor: str = "none",
    weighting: str = "proportional",
    log_space: bool = False,
    alias_fold: bool = True,
) -> PsdFit:
    """Fit the Lorentzian line shape to a Welch PSD.

    Parameters
    ----------
    psd:
        Estimate from :func:`welch_psd`.
    fit_band:
        Optional (f_lo, f_hi) window [Hz]; the DC bin is always excluded.
    noise_floor:
        ``"none"`` fixes the additive floor at zero;
        ``"fitted_constant"`` fits it as fourth parameter (clamped >= 0).
    weighting:
        ``"proportional"`` divides residuals by the data (constant
        relative error, correct for chi-squared distributed bins) or
        ``"uniform"`` for unweighted residuals.
    log_space:
        Fit log(model) - log(data) instead; a robust cross-check mode.
    alias_fold:
        Fold the first alias image of the line into the model (requires
        ``psd.dt``).  Sampling reflects the 1/f^4 tail at Nyquist, and
        relative-error weighting over a wide band gives those bins enough
        pull to inflate the fitted linewidth by several percent when the
        model ignores them.

    Returns
    -------
    PsdFit
        With ``converged`` False when the optimizer gave up and
        ``overdamped`` set when gamma > f_q, where the line shape no
        longer constrains frequency and width independently.
    """
    if noise_floor not in ("none", "fitted_constant"):
        raise DomainError(f"unknown noise_floor mode {noise_floor!r}")
    if weighting not in ("proportional", "uniform"):
        raise DomainError(f"unknown weighting {weighting!r}")

    f_all = np.asarray(psd.frequencies, dtype=float)
    s_all = np.asarray(psd.values, dtype=float)
    mask = f_all > 0
    if fit_band is not None:
        lo, hi = fit_band
        if not lo < hi:
            raise DomainError(f"fit_band must satisfy lo < hi, got {fit_band}")
        mask &= (f_all >= lo) & (f_all <= hi)
    f = f_all[mask]
    s = s_all[mask]
    if f.size < 8:
        raise EstimationError(
            f"fit band contains only {f.size} bins; need at least 8"
        )
    if np.any(s <= 0):
        raise EstimationError("PSD values must be positive inside the fit band")

    with_floor = noise_floor == "fitted_constant"
    p0 = np.asarray(_fit_starts(f, s, with_floor), dtype=float)
    f_mirror = None
    if alias_fold and psd.dt and psd.dt > 0:
        f_mirror = 1.0 / psd.dt - f

    if log_space:
        log_s = np.log(s)

        def resid_jac(p):
            model, jac = _model_and_jacobian(f, p, with_floor, f_mirror)
            safe = np.maximum(model, 1e-300)
            return np.log(safe) - log_s, jac / safe[:, None]

    else:
        w = 1.0 / s if weighting == "proportional" else np.ones_like(s)

        def resid_jac(p):
            model, jac = _model_and_jacobian(f, p, with_floor, f_mirror)
            return (model - s) * w, jac * w[:, None]

    result = least_squares_gn(
        resid_jac,
        p0,
        positive=(0, 1, 2),
        clamp_floor=(3,) if with_floor else (),
    )

    sigmas = result.sigma(f.size)
    names = ["A", "f_q", "gamma"] + (["floor"] if with_floor else [])
    uncertainties = {name: float(sig) for name, sig in zip(names, sigmas)}
    a_fit, fq_fit, gamma_fit = result.params[:3]
    dof = max(f.size - result.params.size, 1)
    return PsdFit(
        A=float(a_fit),
        f_q=float(fq_fit),
        gamma=float(gamma_fit),
        floor=float(result.params[3]) if with_floor else 0.0,
        uncertainties=uncertainties,
        fit_residual=result.cost / dof,
        converged=result.converged,
        overdamped=bool(gamma_fit > fq_fit),
        n_points=int(f.size),
    )
