"""Forward simulation: levitated-particle traces and ESR sweeps.

The center-of-mass motion of a trapped sphere is an underdamped harmonic
oscillator driven by gas collisions.  In the two-bath picture the gas
exerts the total friction Gamma and a white force noise whose strength
corresponds to the friction-weighted bath temperature T_com; optional
extra force noise (the "anomaly" channel) raises the effective
temperature of one axis without touching its friction.

Sampling exact in dt: (q, v) is a linear Gauss-Markov process, so the
one-step transition matrix and process-noise covariance follow from a
single matrix exponential (Van Loan block construction).  Positions then
obey a scalar AR(2) recursion, evaluated with a linear filter — no
small-dt error at any sampling rate.  A BAOAB splitting integrator is
kept as an independent cross-check with ordinary O(dt^2) accuracy.

Detection maps position to a detector voltage V = gain * P * q: the
measured signal grows with laser power both through the trap stiffness
and through the scattered light.  That choice makes the normalized PSD
area A/f_q^2 power-independent at fixed temperature, which is exactly
what the zero-power calibration downstream assumes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
import numpy as np
import scipy.linalg
import scipy.signal

from .core import CONSTANTS, GasEnvironment, ParticleModel, Sphere, TrapAxis, w_to_mw
from .errors import ConfigError, DomainError
from .thermometry import EsrSpectrum, ZfsLaw
from .twobath import HeatingLaw, internal_temperature, make_bath_pair, sphere_drag

__all__ = [
    "AnomalyInjection",
    "SimulationConfig",
    "TimeTrace",
    "simulate_trace",
    "simulate_trace_splitting",
    "simulate_esr",
]


# =============================================================================
# Configuration
# =============================================================================

@dataclass(frozen=True)
class AnomalyInjection:
    """Extra white force noise on one axis, scaling with laser power.

    The injected one-sided force PSD is

        S_FF = extra_force_psd_per_mw * P[mW] * (reference_pressure_hpa / p)^pressure_exponent

    in N^2/Hz.  ``pressure_exponent = 0`` reproduces a purely
    power-proportional anomaly; 1 makes the induced excess CoM
    temperature grow as the gas thins, the signature of genuine
    overheating rather than a detection artifact.
    """

    axis: str
    extra_force_psd_per_mw: float        # [N^2/Hz per mW]
    pressure_exponent: float = 0.0
    reference_pressure_hpa: float = 100.0

    def __post_init__(self) -> None:
        if self.extra_force_psd_per_mw < 0:
            raise ConfigError("extra_force_psd_per_mw must be >= 0")
        if self.reference_pressure_hpa <= 0:
            raise ConfigError("reference_pressure_hpa must be > 0")

    def force_psd(self, laser_power_mw: float, pressure_hpa: float) -> float:
        """One-sided extra force PSD [N^2/Hz] at given power and pressure."""
        scale = (self.reference_pressure_hpa / pressure_hpa) ** self.pressure_exponent
        return self.extra_force_psd_per_mw * laser_power_mw * scale


@dataclass(frozen=True)
class SimulationConfig:
    """Everything needed to roll one multi-axis trace."""

    dt: float                            # [s]
    duration: float                      # [s]
    rng_seed: int
    axes: tuple[TrapAxis, ...]
    laser_power: float                   # [W]
    gas: GasEnvironment
    particle: ParticleModel
    heating: HeatingLaw
    alpha_c: float = 1.0
    anomaly_injection: AnomalyInjection | None = None
    measurement_noise_psd: float = 0.0   # one-sided detector noise [V^2/Hz]

    def __post_init__(self) -> None:
        if self.dt <= 0:
            raise ConfigError(f"dt must be > 0, got {self.dt}")
        if self.duration < 1000 * self.dt:
            raise ConfigError(
                f"duration {self.duration} s covers fewer than 1000 steps of {self.dt} s"
            )
        if self.laser_power < 0:
            raise ConfigError(f"laser_power must be >= 0 W, got {self.laser_power}")
        if not self.axes:
            raise ConfigError("at least one trap axis is required")
        labels = [axis.label for axis in self.axes]
        if len(set(labels)) != len(labels):
            raise ConfigError(f"duplicate axis labels: {labels}")
        if self.alpha_c < 0:
            raise ConfigError(f"alpha_c must be >= 0, got {self.alpha_c}")
        if self.measurement_noise_psd < 0:
            raise ConfigError("measurement_noise_psd must be >= 0")
        if self.anomaly_injection is not None:
            if self.anomaly_injection.axis not in labels:
                raise ConfigError(
                    f"anomaly axis {self.anomaly_injection.axis!r} not among {labels}"
                )

    @property
    def n_samples(self) -> int:
        return int(round(self.duration / self.dt))


@dataclass
class TimeTrace:
    """Sampled detector voltages per axis plus ground-truth metadata."""

    dt: float                            # [s]
    signals: dict                        # axis label -> np.ndarray [V]
    metadata: dict = field(default_factory=dict)

    @property
    def n_samples(self) -> int:
        return len(next(iter(self.signals.values())))

    @property
    def duration(self) -> float:
        return self.n_samples * self.dt

    def times(self) -> np.ndarray:
        """Sample times [s] starting at zero."""
        return np.arange(self.n_samples) * self.dt


# =============================================================================
# Exact one-step discretization
# =============================================================================

def _exact_step_matrices(omega0: float, gamma: float, diffusion: float, dt: float):
    """Transition matrix and noise covariance of one exact sampling step.

    For dx = A x dt + dW with A = [[0, 1], [-omega0^2, -gamma]] and
    velocity-noise intensity ``diffusion`` = 2*gamma*k_B*T/m, the Van
    Loan block exponential of [[-A, Q_c], [0, A^T]]*dt yields both
    Phi = exp(A dt) and Sigma = int_0^dt exp(As) Q_c exp(A^T s) ds.
    """
    block = np.zeros((4, 4))
    block[0, 1] = -1.0
    block[1, 0] = omega0**2
    block[1, 1] = gamma
    block[1, 3] = diffusion
    block[2, 3] = -(omega0**2)
    block[3, 2] = 1.0
    block[3, 3] = -gamma
    exp_block = scipy.linalg.expm(block * dt)
    phi = exp_block[2:, 2:].T
    sigma = phi @ exp_block[:2, 2:]
    sigma = 0.5 * (sigma + sigma.T)
    return phi, sigma


def _sample_positions(
    omega0: float,
    gamma: float,
    t_eff: float,
    mass: float,
    dt: float,
    n: int,
    rng: np.random.Generator,
) -> np.ndarray:
    """Stationary position samples of the exact discrete-time oscillator.

    The (q, v) chain is collapsed to a scalar AR(2) recursion
    q_{k+1} = trP q_k - detP q_{k-1} + e_k and run through lfilter, which
    matches the explicit 2x2 matrix iteration to machine precision.
    """
    k_b = CONSTANTS.k_B
    diffusion = 2.0 * gamma * k_b * t_eff / mass
    phi, sigma = _exact_step_matrices(omega0, gamma, diffusion, dt)
    chol = np.linalg.cholesky(sigma)

    q0 = math.sqrt(k_b * t_eff / (mass * omega0**2)) * rng.standard_normal()
    v0 = math.sqrt(k_b * t_eff / mass) * rng.standard_normal()
    w = rng.standard_normal((2, n - 1))
    w1 = chol[0, 0] * w[0]
    w2 = chol[1, 0] * w[0] + chol[1, 1] * w[1]

    tr_p = phi[0, 0] + phi[1, 1]
    det_p = phi[0, 0] * phi[1, 1] - phi[0, 1] * phi[1, 0]
    drive = np.empty(n)
    drive[0] = q0
    drive[1] = phi[0, 0] * q0 + phi[0, 1] * v0 + w1[0] - tr_p * q0
    drive[2:] = w1[1:] - phi[1, 1] * w1[:-1] + phi[0, 1] * w2[:-1]
    return scipy.signal.lfilter([1.0], [1.0, -tr_p, det_p], drive)


def _axis_truth(config: SimulationConfig, axis: TrapAxis) -> dict:
    """Resolve per-axis physics: trap frequency, friction, temperatures."""
    power_mw = w_to_mw(config.laser_power)
    t0 = config.gas.temperature
    t_int = internal_temperature(config.heating, power_mw, config.gas.pressure)
    baths = make_bath_pair(
        t0,
        t_int,
        config.alpha_c,
        sphere_drag(config.particle, config.gas,
                    emerging_temperature=t0 + config.alpha_c * (t_int - t0)),
    )
    t_com = baths.weighted_temperature
    gamma = baths.gamma_total

    t_eff = t_com
    anomaly = config.anomaly_injection
    if anomaly is not None and anomaly.axis == axis.label:
        s_ff = anomaly.force_psd(power_mw, config.gas.pressure)
        # One-sided white force PSD -> stationary variance k_B*T_extra/(m w0^2)
        # with T_extra = S_FF / (4 m Gamma k_B).
        t_eff = t_com + s_ff / (4.0 * config.particle.mass * gamma * CONSTANTS.k_B)

    omega0 = axis.stiffness_coefficient * math.sqrt(config.laser_power)
    if omega0 <= 0:
        raise ConfigError(f"axis {axis.label!r} has no restoring force at this power")
    return {
        "omega0": omega0,
        "f_q_hz": omega0 / (2.0 * math.pi),
        "gamma_rad_s": gamma,
        "gamma_hz": gamma / (2.0 * math.pi),
        "t_int": t_int,
        "t_com": t_com,
        "t_eff": t_eff,
        "mass_kg": config.particle.mass,
    }


def simulate_trace(config: SimulationConfig) -> TimeTrace:
    """Simulate detector voltages for every configured axis.

    Supports spheres only — the anisotropic cylinder couples rotation
    and translation and needs its own treatment.

    Returns
    -------
    TimeTrace
        Signals per axis with ground-truth parameters in ``metadata``.
    """
    if not isinstance(config.particle.shape, Sphere):
        raise ConfigError("simulate_trace supports spherical particles only")

    n = config.n_samples
    seed_seq = np.random.SeedSequence(config.rng_seed)
    children = seed_seq.spawn(len(config.axes))

    signals: dict[str, np.ndarray] = {}
    truth: dict[str, dict] = {}
    for axis, child in zip(config.axes, children):
        rng = np.random.default_rng(child)
        params = _axis_truth(config, axis)
        q = _sample_positions(
            params["omega0"],
            params["gamma_rad_s"],
            params["t_eff"],
            config.particle.mass,
            config.dt,
            n,
            rng,
        )
        gain = axis.detection_gain * config.laser_power   # [V/m]
        volts = gain * q
        if config.measurement_noise_psd > 0:
            # One-sided voltage PSD S over the Nyquist band -> sample
            # variance S * fs / 2.
            sigma_meas = math.sqrt(config.measurement_noise_psd / (2.0 * config.dt))
            volts = volts + sigma_meas * rng.standard_normal(n)
        signals[axis.label] = volts
        params["detection_gain_v_per_m"] = gain
        truth[axis.label] = params

    return TimeTrace(
        dt=config.dt,
        signals=signals,
        metadata={
            "laser_power_mw": w_to_mw(config.laser_power),
            "pressure_hpa": config.gas.pressure,
            "seed": config.rng_seed,
            "true_parameters": truth,
        },
    )


def simulate_trace_splitting(config: SimulationConfig) -> TimeTrace:
    """BAOAB splitting integrator — independent cross-check of
    :func:`simulate_trace`.

    Second-order accurate in dt rather than exact; agreement of its
    spectra with the exact sampler validates both discretizations.
    """
    if not isinstance(config.particle.shape, Sphere):
        raise ConfigError("simulate_trace_splitting supports spherical particles only")

    n = config.n_samples
    dt = config.dt
    k_b = CONSTANTS.k_B
    mass = config.particle.mass
    seed_seq = np.random.SeedSequence(config.rng_seed)
    children = seed_seq.spawn(len(config.axes))

    signals: dict[str, np.ndarray] = {}
    truth: dict[str, dict] = {}
    for axis, child in zip(config.axes, children):
        rng = np.random.default_rng(child)
        params = _axis_truth(config, axis)
        omega_sq = params["omega0"] ** 2
        c1 = math.exp(-params["gamma_rad_s"] * dt)
        c2 = math.sqrt(k_b * params["t_eff"] / mass * (1.0 - c1 * c1))

        q = math.sqrt(k_b * params["t_eff"] / (mass * omega_sq)) * rng.standard_normal()
        v = math.sqrt(k_b * params["t_eff"] / mass) * rng.standard_normal()
        kicks = rng.standard_normal(n - 1)
        out = np.empty(n)
        out[0] = q
        half_dt = 0.5 * dt
        for k in range(1, n):
            v -= half_dt * omega_sq * q
            q += half_dt * v
            v = c1 * v + c2 * kicks[k - 1]
            q += half_dt * v
            v -= half_dt * omega_sq * q
            out[k] = q

        gain = axis.detection_gain * config.laser_power
        volts = gain * out
        if config.measurement_noise_psd > 0:
            sigma_meas = math.sqrt(config.measurement_noise_psd / (2.0 * dt))
            volts = volts + sigma_meas * rng.standard_normal(n)
        signals[axis.label] = volts
        params["detection_gain_v_per_m"] = gain
        truth[axis.label] = params

    return TimeTrace(
        dt=dt,
        signals=signals,
        metadata={
            "laser_power_mw": w_to_mw(config.laser_power),
            "pressure_hpa": config.gas.pressure,
            "seed": config.rng_seed,
            "true_parameters": truth,
            "integrator": "baoab",
        },
    )


# =============================================================================
# ESR sweep generation
# =============================================================================

def simulate_esr(
    heating: HeatingLaw,
    d_law: ZfsLaw,
    laser_power: float,
    pressure: float,
    strain_E: float,
    contrast: float,
    linewidth: float,
    noise_level: float,
    rng_seed: int,
    baseline_counts: float = 1e5,
    center_offset_hz: float = 0.0,
    freqs: np.ndarray | None = None,
) -> EsrSpectrum:
    """Generate a double-dip ESR sweep of an internally heated particle.

    The particle's internal temperature fixes the zero-field splitting
    through ``d_law``; strain splits the two resonances to
    D +- strain_E.  Counts follow

        counts = lam + noise_level * (Poisson(lam) - lam),

    so ``noise_level = 0`` returns the noise-free expectation and 1 full
    shot noise.

    Parameters
    ----------
    laser_power, pressure:
        In mW and hPa, feeding the heating law.
    strain_E:
        Half-splitting [Hz] between the two dips.
    contrast, linewidth:
        Common dip contrast (0..1) and FWHM [Hz].
    baseline_counts:
        Off-resonant photon count level.
    center_offset_hz:
        Systematic shift of the spectrum center — models a microwave
        frequency miscalibration that thermometry must absorb.
    freqs:
        Optional sweep grid [Hz]; defaults to 301 points covering
        D +- (strain_E + 8*linewidth).  A grid that does not enclose
        both dips raises :class:`ConfigError`.
    """
    if not 0.0 <= contrast < 1.0:
        raise DomainError(f"contrast must be in [0, 1), got {contrast}")
    if linewidth <= 0:
        raise DomainError(f"linewidth must be > 0, got {linewidth}")
    if strain_E < 0:
        raise DomainError(f"strain_E must be >= 0, got {strain_E}")
    if noise_level < 0:
        raise DomainError(f"noise_level must be >= 0, got {noise_level}")
    if baseline_counts <= 0:
        raise DomainError("baseline_counts must be > 0")

    t_int = internal_temperature(heating, laser_power, pressure)
    center = d_law.d_of_t(t_int) + center_offset_hz
    f_lo_dip = center - strain_E
    f_hi_dip = center + strain_E

    if freqs is None:
        span = strain_E + 8.0 * linewidth
        freqs = np.linspace(center - span, center + span, 301)
    else:
        freqs = np.asarray(freqs, dtype=float)
        if freqs.min() > f_lo_dip - linewidth or freqs.max() < f_hi_dip + linewidth:
            raise ConfigError(
                "frequency grid does not cover both resonances plus one linewidth"
            )

    half = 0.5 * linewidth
    dip_lo = half**2 / ((freqs - f_lo_dip) ** 2 + half**2)
    dip_hi = half**2 / ((freqs - f_hi_dip) ** 2 + half**2)
    lam = baseline_counts * (1.0 - contrast * dip_lo - contrast * dip_hi)

    counts = lam.copy()
    if noise_level > 0:
        rng = np.random.default_rng(rng_seed)
        counts = lam + noise_level * (rng.poisson(lam) - lam)

    return EsrSpectrum(
        microwave_frequencies=freqs,
        pl_counts=counts,
        metadata={
            "laser_power_mw": laser_power,
            "pressure_hpa": pressure,
            "t_int": t_int,
            "d_true": center,
            "strain_e_hz": strain_E,
            "linewidth_hz": linewidth,
            "contrast": contrast,
            "noise_level": noise_level,
            "baseline_counts": baseline_counts,
            "seed": rng_seed,
        },
    )
