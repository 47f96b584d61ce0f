"""Estimation pipeline: calibration, energy extraction, coupling constants,
overheating classification, and full measurement campaigns.

The chain mirrors an actual levitation experiment:

1.  Power sweeps of PSD fits give the normalized area A/f_q^2 per axis.
    Its zero-power intercept calibrates detector units to energy:
    C = k_B * T_room / (A/f_q^2)|_(P=0), because an unheated particle is
    at room temperature.
2.  Each point's CoM energy is E = C * A/f_q^2; ESR thermometry gives
    the internal temperature of the same points.
3.  The hot-Brownian coupling constant is the slope ratio
    K = dE/dP / (k_B * dT_int/dP), and alpha_c = K * (pi+8)/pi.
4.  K across pressures separates true overheating (grows as the gas
    thins) from detection artifacts (flat), feeding a three-way verdict:
    thermal / overheated / undetermined.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .core import CONSTANTS, GasEnvironment, ParticleModel, hpa_to_pa, mw_to_w
from .errors import CalibrationError, ConfigError, DomainError, EstimationError, HotBrownianError
from .simulate import AnomalyInjection, SimulationConfig, simulate_esr, simulate_trace
from .spectral import PsdFit, fit_psd, welch_psd
from .thermometry import (
    HeatingFit,
    TemperaturePoint,
    ZfsLaw,
    default_zfs_law,
    fit_esr,
    fit_heating_law,
    temperature_from_esr,
)
from .twobath import HeatingLaw

__all__ = [
    "PowerSweepPoint",
    "CalibrationResult",
    "EnergyPoint",
    "KEstimate",
    "KMeasurement",
    "ClassificationThresholds",
    "HbmEstimate",
    "EsrSettings",
    "CampaignConfig",
    "CampaignReport",
    "calibrate",
    "com_energy",
    "extract_k",
    "classify_overheating",
    "hydrodynamic_radius",
    "run_campaign",
]

log = logging.getLogger(__name__)


# =============================================================================
# Sweep points and calibration
# =============================================================================

@dataclass
class PowerSweepPoint:
    """PSD fits of one repetition at one laser power and pressure."""

    laser_power: float                   # [mW]
    repetition_index: int
    pressure_hpa: float
    fits: dict                           # axis label -> PsdFit

    def normalized_area(self, axis: str) -> float:
        """A/f_q^2 of one axis [signal^2/Hz^2] — proportional to energy."""
        return self.fits[axis].normalized_area


@dataclass
class CalibrationResult:
    """Zero-power calibration of detector units to CoM energy, per axis.

    ``c_calib[axis]`` converts a normalized PSD area into joules:
    E = c_calib * (A/f_q^2).  Valid only at its own gas pressure, since
    detection geometry is realigned whenever the chamber is cycled.
    """

    pressure_hpa: float
    room_temperature: float              # [K]
    intercept: dict                      # axis -> zero-power A/f_q^2
    intercept_sigma: dict
    slope: dict                          # axis -> d(A/f_q^2)/dP [per mW]
    slope_sigma: dict
    c_calib: dict                        # axis -> [J per (A/f_q^2 unit)]
    n_points: int


def _line_fit(x: np.ndarray, y: np.ndarray, sigma: np.ndarray | None):
    """Weighted straight-line fit; returns (slope, intercept, 2x2 covariance).

    With per-point sigmas the covariance is the exact inverse Fisher
    matrix; without, it is scaled by the residual variance.
    """
    design = np.column_stack([x, np.ones_like(x)])
    if sigma is not None:
        w = 1.0 / sigma
        coeffs, *_ = np.linalg.lstsq(design * w[:, None], y * w, rcond=None)
        cov = np.linalg.inv((design * (w**2)[:, None]).T @ design)
    else:
        coeffs, *_ = np.linalg.lstsq(design, y, rcond=None)
        resid = y - design @ coeffs
        dof = max(x.size - 2, 1)
        cov = np.linalg.inv(design.T @ design) * float(resid @ resid) / dof
    return float(coeffs[0]), float(coeffs[1]), cov


def calibrate(
    sweep: Sequence[PowerSweepPoint], room_temperature: float = 294.0
) -> CalibrationResult:
    """Regress normalized areas against laser power; calibrate at P -> 0.

    Raises
    ------
    CalibrationError
        With fewer than three distinct powers, mixed pressures, a
        non-positive zero-power intercept, or an intercept uncertainty
        as large as the intercept itself.
    """
    if not sweep:
        raise CalibrationError("empty power sweep")
    pressures = {pt.pressure_hpa for pt in sweep}
    if len(pressures) != 1:
        raise CalibrationError(
            f"calibration sweep mixes pressures {sorted(pressures)}; "
            "detector gain is only stable within one pressure setting"
        )
    powers = np.array([pt.laser_power for pt in sweep], dtype=float)
    if np.unique(powers).size < 3:
        raise CalibrationError(
            f"need >= 3 distinct laser powers, got {np.unique(powers).size}"
        )

    axes = sorted(sweep[0].fits.keys())
    intercept, intercept_sigma, slope, slope_sigma, c_calib = {}, {}, {}, {}, {}
    for axis in axes:
        areas = np.array([pt.normalized_area(axis) for pt in sweep])
        sigmas = np.array([pt.fits[axis].normalized_area_sigma for pt in sweep])
        use_sigma = sigmas if np.all(np.isfinite(sigmas) & (sigmas > 0)) else None
        b, a0, cov = _line_fit(powers, areas, use_sigma)
        sig_a0 = math.sqrt(max(cov[1, 1], 0.0))
        if a0 <= 0:
            raise CalibrationError(
                f"axis {axis!r}: zero-power intercept {a0} is not positive"
            )
        if sig_a0 >= a0:
            raise CalibrationError(
                f"axis {axis!r}: intercept consistent with zero "
                f"({a0} +- {sig_a0}); sweep does not constrain the calibration"
            )
        intercept[axis] = a0
        intercept_sigma[axis] = sig_a0
        slope[axis] = b
        slope_sigma[axis] = math.sqrt(max(cov[0, 0], 0.0))
        c_calib[axis] = CONSTANTS.k_B * room_temperature / a0

    return CalibrationResult(
        pressure_hpa=float(next(iter(pressures))),
        room_temperature=room_temperature,
        intercept=intercept,
        intercept_sigma=intercept_sigma,
        slope=slope,
        slope_sigma=slope_sigma,
        c_calib=c_calib,
        n_points=len(sweep),
    )


def com_energy(point: PowerSweepPoint, calib: CalibrationResult, axis: str) -> float:
    """Center-of-mass energy [J] of one axis: E = c_calib * A/f_q^2.

    Raises
    ------
    DomainError
        If the point was taken at a different pressure than the
        calibration — the conversion constant would not apply.
    """
    if not math.isclose(point.pressure_hpa, calib.pressure_hpa, rel_tol=1e-9):
        raise DomainError(
            f"point at {point.pressure_hpa} hPa cannot use a calibration "
            f"made at {calib.pressure_hpa} hPa"
        )
    return calib.c_calib[axis] * point.normalized_area(axis)


# =============================================================================
# Coupling-constant extraction
# =============================================================================

@dataclass(frozen=True)
class EnergyPoint:
    """CoM energy of one axis at one laser power."""

    laser_power: float                   # [mW]
    energy: float                        # [J]
    sigma: float | None = None           # [J]


@dataclass(frozen=True)
class KEstimate:
    """Coupling constant from the slope ratio dE/dP over k_B dT/dP."""

    K: float
    K_sigma: float
    alpha_c: float
    alpha_c_sigma: float
    slope_energy: float                  # [J/mW]
    slope_energy_sigma: float
    slope_temperature: float             # [K/mW]
    slope_temperature_sigma: float
    n_points: int


def extract_k(
    energy_series: Sequence[EnergyPoint],
    temp_series: Sequence[TemperaturePoint],
) -> KEstimate:
    """Slope-ratio coupling constant from matched power sweeps.

    Both series must sample the same laser powers; each needs at least
    three points.  The ratio is undefined when the internal temperature
    does not actually rise, so a temperature slope consistent with zero
    at two sigma raises :class:`EstimationError`.
    """
    if len(energy_series) < 3:
        raise EstimationError(f"need >= 3 energy points, got {len(energy_series)}")
    if len(temp_series) < 3:
        raise EstimationError(f"need >= 3 temperature points, got {len(temp_series)}")
    e_sorted = sorted(energy_series, key=lambda pt: pt.laser_power)
    t_sorted = sorted(temp_series, key=lambda pt: pt.laser_power)
    p_e = np.array([pt.laser_power for pt in e_sorted])
    p_t = np.array([pt.laser_power for pt in t_sorted])
    if p_e.size != p_t.size or not np.allclose(p_e, p_t, rtol=1e-9, atol=1e-12):
        raise EstimationError("energy and temperature series sample different powers")

    energies = np.array([pt.energy for pt in e_sorted])
    e_sig = [pt.sigma for pt in e_sorted]
    e_sigma = (
        np.array(e_sig, dtype=float)
        if all(s is not None and s > 0 for s in e_sig)
        else None
    )
    temps = np.array([pt.temperature for pt in t_sorted])
    t_sig = [pt.sigma for pt in t_sorted]
    t_sigma = (
        np.array(t_sig, dtype=float)
        if all(s is not None and s > 0 for s in t_sig)
        else None
    )

    slope_e, _, cov_e = _line_fit(p_e, energies, e_sigma)
    slope_t, _, cov_t = _line_fit(p_t, temps, t_sigma)
    sig_e = math.sqrt(max(cov_e[0, 0], 0.0))
    sig_t = math.sqrt(max(cov_t[0, 0], 0.0))
    if abs(slope_t) <= 2.0 * sig_t:
        raise EstimationError(
            f"temperature slope {slope_t} +- {sig_t} K/mW is consistent with "
            "zero; no heating to reference the energy rise against"
        )

    k_value = slope_e / (CONSTANTS.k_B * slope_t)
    rel = math.hypot(sig_e / slope_e if slope_e else 0.0, sig_t / slope_t)
    k_sigma = abs(k_value) * rel
    scale = (math.pi + 8.0) / math.pi
    return KEstimate(
        K=k_value,
        K_sigma=k_sigma,
        alpha_c=k_value * scale,
        alpha_c_sigma=k_sigma * scale,
        slope_energy=slope_e,
        slope_energy_sigma=sig_e,
        slope_temperature=slope_t,
        slope_temperature_sigma=sig_t,
        n_points=int(p_e.size),
    )


# =============================================================================
# Overheating classification
# =============================================================================

@dataclass(frozen=True)
class KMeasurement:
    """Coupling constant of one axis at one pressure."""

    pressure: float                      # [hPa]
    K: float
    sigma: float


@dataclass(frozen=True)
class ClassificationThresholds:
    """Decision levels for the three-way overheating verdict.

    ``overheated_k`` alone suffices for an overheated verdict; above
    ``elevated_k`` the verdict additionally requires a significant rise
    of K toward lower pressures.  ``n_sigma`` sets every significance
    margin.
    """

    overheated_k: float = 1.0
    elevated_k: float = 0.5
    n_sigma: float = 2.0


def _pooled_mean(values: np.ndarray, sigmas: np.ndarray) -> tuple[float, float]:
    weights = 1.0 / np.maximum(sigmas, 1e-12) ** 2
    mean = float(np.sum(weights * values) / np.sum(weights))
    return mean, float(1.0 / math.sqrt(np.sum(weights)))


def classify_overheating(
    measurements: Sequence[KMeasurement],
    thresholds: ClassificationThresholds = ClassificationThresholds(),
) -> str:
    """Classify one axis as ``"thermal"``, ``"overheated"`` or ``"undetermined"``.

    Threshold tests use the inverse-variance pooled K over all supplied
    pressures; the pressure dependence itself (K rising as the gas
    thins, the fingerprint of real excess CoM energy) is tested on the
    per-pressure values against 1/pressure.

    * thermal:     pooled K + n_sigma*sigma <= elevated_k
    * overheated:  pooled K - n_sigma*sigma > overheated_k, or a
      significant falling-pressure rise while pooled K - n_sigma*sigma
      still exceeds elevated_k
    * undetermined otherwise.
    """
    if not measurements:
        raise EstimationError("no coupling measurements to classify")
    k_values = np.array([m.K for m in measurements], dtype=float)
    sigmas = np.array([m.sigma for m in measurements], dtype=float)
    if np.any(sigmas < 0):
        raise DomainError("K uncertainties must be >= 0")
    pressures = np.array([m.pressure for m in measurements], dtype=float)
    if np.any(pressures <= 0):
        raise DomainError("pressures must be > 0")

    k_bar, sigma_bar = _pooled_mean(k_values, sigmas)
    ns = thresholds.n_sigma

    if k_bar + ns * sigma_bar <= thresholds.elevated_k:
        return "thermal"
    if k_bar - ns * sigma_bar > thresholds.overheated_k:
        return "overheated"
    if np.unique(pressures).size >= 2 and k_bar - ns * sigma_bar > thresholds.elevated_k:
        slope, _, cov = _line_fit(
            1.0 / pressures, k_values, np.maximum(sigmas, 1e-12)
        )
        if slope - ns * math.sqrt(max(cov[0, 0], 0.0)) > 0:
            return "overheated"
    return "undetermined"


# =============================================================================
# Hydrodynamic radius
# =============================================================================

def hydrodynamic_radius(
    gamma_hz: float,
    pressure_hpa: float,
    gas: GasEnvironment,
    particle_density: float = 3500.0,
    room_temperature: float = 294.0,
) -> float:
    """Effective (Epstein) particle radius [m] from a fitted linewidth.

    Inverts the free-molecular sphere drag at ambient temperature,

        r = 0.619 * (9 / (sqrt(2*pi) * rho)) * sqrt(M / (N_A k_B T)) * p / Gamma,

    with Gamma = 2*pi*gamma_hz.  The 0.619 factor folds the diffuse
    re-emission enhancement into the classic specular coefficient.
    """
    if gamma_hz <= 0:
        raise DomainError(f"gamma must be > 0 Hz, got {gamma_hz}")
    if pressure_hpa <= 0:
        raise DomainError(f"pressure must be > 0 hPa, got {pressure_hpa}")
    if particle_density <= 0:
        raise DomainError("particle density must be > 0")
    gamma_rad = 2.0 * math.pi * gamma_hz
    thermal_factor = math.sqrt(
        gas.molar_mass / (CONSTANTS.N_A * CONSTANTS.k_B * room_temperature)
    )
    return (
        0.619
        * (9.0 / (math.sqrt(2.0 * math.pi) * particle_density))
        * thermal_factor
        * hpa_to_pa(pressure_hpa)
        / gamma_rad
    )


# =============================================================================
# Campaign orchestration
# =============================================================================

@dataclass(frozen=True)
class EsrSettings:
    """Spin-resonance acquisition settings used by campaigns."""

    strain_e_hz: float = 5.2e6
    linewidth_hz: float = 2.5e6
    contrast: float = 0.22
    noise_level: float = 1.0
    baseline_counts: float = 1e5
    center_offset_hz: float = 0.0


@dataclass(frozen=True)
class CampaignConfig:
    """Full specification of a simulated measurement campaign."""

    pressures_hpa: tuple
    laser_powers_mw: tuple
    repetitions: int
    duration_s: float
    dt_s: float
    axes: tuple
    particle: ParticleModel
    heating: HeatingLaw
    alpha_c: float = 1.0
    anomaly: AnomalyInjection | None = None
    zfs_law: ZfsLaw | None = None        # None -> packaged default
    molar_mass: float = 0.02897          # [kg/mol]
    room_temperature: float = 294.0      # [K]
    rng_seed: int = 0
    esr: EsrSettings = field(default_factory=EsrSettings)
    segment_length: int = 16384
    fit_band: tuple | None = None
    noise_floor: str = "none"
    measurement_noise_psd: float = 0.0
    thresholds: ClassificationThresholds = field(default_factory=ClassificationThresholds)
    thermometry_only: bool = False

    def __post_init__(self) -> None:
        if self.repetitions < 0:
            raise ConfigError("repetitions must be >= 0")
        if any(p <= 0 for p in self.pressures_hpa):
            raise ConfigError("pressures must be > 0 hPa")
        if any(p < 0 for p in self.laser_powers_mw):
            raise ConfigError("laser powers must be >= 0 mW")


@dataclass
class HbmEstimate:
    """Hot-Brownian coupling summary of one campaign."""

    k_per_axis: dict                     # axis -> (K, sigma), pooled over pressures
    alpha_per_axis: dict                 # axis -> (alpha_c, sigma)
    per_pressure: dict                   # axis -> tuple[KMeasurement, ...]
    k_mean: float                        # pooled over axes and pressures
    k_mean_sigma: float
    gamma_ratio_mean: float              # gamma_x / gamma_y across sweep points
    gamma_ratio_spread: float
    classification: dict                 # axis -> verdict string
    flags: tuple                         # human-readable notes


@dataclass
class CampaignReport:
    """Everything a campaign produced, including per-cell failures."""

    pressures_hpa: tuple
    laser_powers_mw: tuple
    points: list                         # PowerSweepPoint
    temperatures: list                   # raw TemperaturePoint per (pressure, power)
    calibrations: dict                   # pressure -> CalibrationResult
    heating_fit: HeatingFit | None
    estimate: HbmEstimate | None
    hydrodynamic_radius_m: dict          # pressure -> radius [m]
    errors: list                         # dicts: stage/pressure/power/repetition/message
    runtime_s: float = 0.0


def _record(errors: list, stage: str, message: str, **where) -> None:
    entry = {"stage": stage, "message": message, **where}
    errors.append(entry)
    log.warning("campaign %s failed (%s): %s", stage, where, message)


def run_campaign(config: CampaignConfig) -> CampaignReport:
    """Run the full simulate-measure-estimate loop over a campaign grid.

    Every (pressure, power, repetition) cell simulates a trace, fits its
    per-axis PSDs, and every (pressure, power) cell acquires one ESR
    spectrum.  Cell failures are recorded in the report and the campaign
    continues; an empty grid yields an empty report.
    """
    t_start = time.perf_counter()
    pressures = tuple(config.pressures_hpa)
    powers = tuple(config.laser_powers_mw)
    reps = config.repetitions
    errors: list[dict] = []
    points: list[PowerSweepPoint] = []
    temperatures: list[TemperaturePoint] = []

    n_trace = len(pressures) * len(powers) * reps
    n_esr = len(pressures) * len(powers)
    seeds = np.random.SeedSequence(config.rng_seed).generate_state(
        max(n_trace + n_esr, 1), dtype=np.uint64
    )

    def trace_seed(ip: int, ipow: int, rep: int) -> int:
        return int(seeds[(ip * len(powers) + ipow) * reps + rep])

    def esr_seed(ip: int, ipow: int) -> int:
        return int(seeds[n_trace + ip * len(powers) + ipow])

    law = config.zfs_law if config.zfs_law is not None else default_zfs_law()

    for ip, pressure in enumerate(pressures):
        gas = GasEnvironment(
            pressure=pressure,
            molar_mass=config.molar_mass,
            temperature=config.room_temperature,
        )
        log.info("campaign: pressure %.6g hPa", pressure)
        for ipow, power_mw in enumerate(powers):
            if not config.thermometry_only:
                for rep in range(reps):
                    try:
                        sim = SimulationConfig(
                            dt=config.dt_s,
                            duration=config.duration_s,
                            rng_seed=trace_seed(ip, ipow, rep),
                            axes=tuple(config.axes),
                            laser_power=mw_to_w(power_mw),
                            gas=gas,
                            particle=config.particle,
                            heating=config.heating,
                            alpha_c=config.alpha_c,
                            anomaly_injection=config.anomaly,
                            measurement_noise_psd=config.measurement_noise_psd,
                        )
                        trace = simulate_trace(sim)
                        fits: dict[str, PsdFit] = {}
                        for axis in trace.signals:
                            psd = welch_psd(
                                trace, axis=axis, segment_length=config.segment_length
                            )
                            fit = fit_psd(
                                psd,
                                fit_band=config.fit_band,
                                noise_floor=config.noise_floor,
                            )
                            if not fit.converged:
                                raise EstimationError(
                                    f"PSD fit did not converge on axis {axis!r}"
                                )
                            fits[axis] = fit
                        points.append(
                            PowerSweepPoint(
                                laser_power=power_mw,
                                repetition_index=rep,
                                pressure_hpa=pressure,
                                fits=fits,
                            )
                        )
                    except (HotBrownianError, np.linalg.LinAlgError) as exc:
                        _record(
                            errors, "trace", str(exc),
                            pressure=pressure, power=power_mw, repetition=rep,
                        )
            try:
                spectrum = simulate_esr(
                    config.heating,
                    law,
                    power_mw,
                    pressure,
                    config.esr.strain_e_hz,
                    config.esr.contrast,
                    config.esr.linewidth_hz,
                    config.esr.noise_level,
                    esr_seed(ip, ipow),
                    baseline_counts=config.esr.baseline_counts,
                    center_offset_hz=config.esr.center_offset_hz,
                )
                esr_fit = fit_esr(spectrum)
                if not esr_fit.converged:
                    raise EstimationError("ESR fit did not converge")
                estimate_t = temperature_from_esr(esr_fit, law)
                temperatures.append(
                    TemperaturePoint(
                        laser_power=power_mw,
                        pressure=pressure,
                        temperature=estimate_t.kelvin,
                        sigma=estimate_t.sigma,
                    )
                )
            except (HotBrownianError, np.linalg.LinAlgError) as exc:
                _record(errors, "esr", str(exc), pressure=pressure, power=power_mw)

    heating_fit: HeatingFit | None = None
    if temperatures:
        try:
            heating_fit = fit_heating_law(temperatures, config.room_temperature)
        except HotBrownianError as exc:
            _record(errors, "heating_fit", str(exc))

    calibrations: dict[float, CalibrationResult] = {}
    radius: dict[float, float] = {}
    estimate: HbmEstimate | None = None

    if points and heating_fit is not None:
        axes_labels = sorted({axis for pt in points for axis in pt.fits})
        per_pressure: dict[str, list[KMeasurement]] = {a: [] for a in axes_labels}

        for pressure in pressures:
            sweep_p = [pt for pt in points if pt.pressure_hpa == pressure]
            if not sweep_p:
                continue
            try:
                calib = calibrate(sweep_p, config.room_temperature)
                calibrations[pressure] = calib
            except CalibrationError as exc:
                _record(errors, "calibrate", str(exc), pressure=pressure)
                continue

            # Epstein radius from the mean x-linewidth at this pressure.
            gas = GasEnvironment(
                pressure=pressure,
                molar_mass=config.molar_mass,
                temperature=config.room_temperature,
            )
            first_axis = axes_labels[0]
            gammas = [pt.fits[first_axis].gamma for pt in sweep_p]
            radius[pressure] = hydrodynamic_radius(
                float(np.mean(gammas)),
                pressure,
                gas,
                particle_density=config.particle.density,
                room_temperature=config.room_temperature,
            )

            temps_p = [t for t in temperatures if t.pressure == pressure]
            corrected = [
                TemperaturePoint(
                    laser_power=t.laser_power,
                    pressure=t.pressure,
                    temperature=t.temperature - heating_fit.strain_offset_K,
                    sigma=t.sigma,
                )
                for t in temps_p
            ]
            for axis in axes_labels:
                energy_series = []
                for power_mw in powers:
                    cell = [pt for pt in sweep_p if pt.laser_power == power_mw]
                    if not cell:
                        continue
                    values = np.array([com_energy(pt, calib, axis) for pt in cell])
                    prop = np.array([
                        calib.c_calib[axis] * pt.fits[axis].normalized_area_sigma
                        for pt in cell
                    ])
                    sigma_pt = float(np.sqrt(np.mean(prop**2) / len(cell)))
                    energy_series.append(
                        EnergyPoint(
                            laser_power=power_mw,
                            energy=float(np.mean(values)),
                            sigma=sigma_pt if sigma_pt > 0 else None,
                        )
                    )
                corrected_axis = [
                    t for t in corrected
                    if any(
                        math.isclose(t.laser_power, ept.laser_power, rel_tol=1e-9)
                        for ept in energy_series
                    )
                ]
                try:
                    k_est = extract_k(energy_series, corrected_axis)
                    per_pressure[axis].append(
                        KMeasurement(pressure=pressure, K=k_est.K, sigma=k_est.K_sigma)
                    )
                except (HotBrownianError, np.linalg.LinAlgError) as exc:
                    _record(errors, "extract_k", str(exc), pressure=pressure, axis=axis)

        k_per_axis: dict[str, tuple[float, float]] = {}
        alpha_per_axis: dict[str, tuple[float, float]] = {}
        classification: dict[str, str] = {}
        flags: list[str] = []
        all_k, all_sigma = [], []
        for axis in axes_labels:
            if not per_pressure[axis]:
                flags.append(f"axis {axis}: no coupling estimate")
                continue
            k_values = np.array([m.K for m in per_pressure[axis]])
            sigmas = np.array([m.sigma for m in per_pressure[axis]])
            k_bar, sigma_bar = _pooled_mean(k_values, sigmas)
            k_per_axis[axis] = (k_bar, sigma_bar)
            scale = (math.pi + 8.0) / math.pi
            alpha_per_axis[axis] = (k_bar * scale, sigma_bar * scale)
            verdict = classify_overheating(per_pressure[axis], config.thresholds)
            classification[axis] = verdict
            flags.append(f"axis {axis}: {verdict}")
            all_k.extend(k_values)
            all_sigma.extend(sigmas)

        ratios = []
        if len(axes_labels) >= 2:
            a_x, a_y = axes_labels[0], axes_labels[1]
            if "x" in axes_labels and "y" in axes_labels:
                a_x, a_y = "x", "y"
            ratios = [
                pt.fits[a_x].gamma / pt.fits[a_y].gamma
                for pt in points
                if a_x in pt.fits and a_y in pt.fits and pt.fits[a_y].gamma > 0
            ]

        if k_per_axis:
            k_mean, k_mean_sigma = _pooled_mean(np.array(all_k), np.array(all_sigma))
            estimate = HbmEstimate(
                k_per_axis=k_per_axis,
                alpha_per_axis=alpha_per_axis,
                per_pressure={a: tuple(v) for a, v in per_pressure.items()},
                k_mean=k_mean,
                k_mean_sigma=k_mean_sigma,
                gamma_ratio_mean=float(np.mean(ratios)) if ratios else float("nan"),
                gamma_ratio_spread=(
                    float(np.std(ratios, ddof=1)) if len(ratios) > 1 else 0.0
                ),
                classification=classification,
                flags=tuple(flags),
            )

    return CampaignReport(
        pressures_hpa=pressures,
        laser_powers_mw=powers,
        points=points,
        temperatures=temperatures,
        calibrations=calibrations,
        heating_fit=heating_fit,
        estimate=estimate,
        hydrodynamic_radius_m=radius,
        errors=errors,
        runtime_s=time.perf_counter() - t_start,
    )
