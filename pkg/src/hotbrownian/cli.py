"""Command-line interface.

Subcommands cover the pipeline end to end: simulate traces, estimate
and fit spectra, calibrate sweeps, extract coupling constants, run whole
campaigns, and tabulate cylinder couplings.  Inputs come from a JSON
config file (--config); results land in --out (default: current
directory) or on stdout as JSON.

Exit codes: 0 success, 2 fit/calibration failure, 3 invalid configuration.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys
from pathlib import Path

import numpy as np

from .core import Cylinder, GasEnvironment, ParticleModel, Sphere, TrapAxis, mw_to_w
from .errors import (
    CalibrationError,
    ConfigError,
    DomainError,
    EstimationError,
)
from .io import (
    load_zfs_law,
    read_esr,
    read_psd,
    read_trace,
    write_cylinder_k_csv,
    write_psd,
    write_report,
    write_trace,
)
from .pipeline import (
    CampaignConfig,
    ClassificationThresholds,
    EnergyPoint,
    EsrSettings,
    PowerSweepPoint,
    calibrate,
    extract_k,
    run_campaign,
)
from .simulate import AnomalyInjection, SimulationConfig, simulate_trace
from .spectral import PsdFit, fit_psd, welch_psd
from .thermometry import (
    TemperaturePoint,
    default_zfs_law,
    fit_esr,
    temperature_from_esr,
)
from .twobath import HeatingLaw, cylinder_drag, cylinder_k, sphere_k

__all__ = ["main"]

# Bundled example particle/trap so every subcommand runs out of the box.
_DEFAULT_AXES = (
    {"label": "x", "stiffness_coefficient": 2 * math.pi * 1.807e5, "detection_gain": 1.0e9},
    {"label": "y", "stiffness_coefficient": 2 * math.pi * 1.549e5, "detection_gain": 0.8e9},
)


def _load_config(args) -> dict:
    if getattr(args, "config", None) is None:
        return {}
    return json.loads(Path(args.config).read_text())


def _out_dir(args) -> Path:
    out = Path(getattr(args, "out", None) or ".")
    out.mkdir(parents=True, exist_ok=True)
    return out


def _out_file(args, default_name: str) -> Path:
    """Resolve --out into a file path.

    A value with a file suffix is taken as the file itself; anything else
    is a directory that receives `default_name`.
    """
    raw = getattr(args, "out", None)
    if raw is None:
        return Path(default_name)
    out = Path(raw)
    if out.suffix:
        out.parent.mkdir(parents=True, exist_ok=True)
        return out
    out.mkdir(parents=True, exist_ok=True)
    return out / default_name


def _input_path(args, cfg: dict, key: str):
    value = getattr(args, "input", None) or cfg.get(key)
    if value is None:
        raise ConfigError(f"missing input: pass a file argument or {key!r} in --config")
    return value


def _print_json(payload) -> None:
    print(json.dumps(payload, indent=2, default=str))


def _build_axes(cfg: dict) -> tuple:
    axes_cfg = cfg.get("axes", list(_DEFAULT_AXES))
    return tuple(
        TrapAxis(
            label=a["label"],
            stiffness_coefficient=float(a["stiffness_coefficient"]),
            detection_gain=float(a["detection_gain"]),
        )
        for a in axes_cfg
    )


def _build_particle(cfg: dict) -> ParticleModel:
    pcfg = cfg.get("particle", {})
    radius = float(pcfg.get("radius_m", 500e-9))
    if "length_m" in pcfg:
        shape = Cylinder(radius=radius, length=float(pcfg["length_m"]))
    else:
        shape = Sphere(radius=radius)
    return ParticleModel(shape=shape, density=float(pcfg.get("density", 3500.0)))


def _build_heating(cfg: dict) -> HeatingLaw:
    hcfg = cfg.get("heating", {})
    return HeatingLaw(
        kappa_heat=float(hcfg.get("kappa_heat", 17.0)),
        T0=float(hcfg.get("T0", cfg.get("room_temperature", 294.0))),
    )


def _build_gas(cfg: dict, pressure: float) -> GasEnvironment:
    return GasEnvironment(
        pressure=pressure,
        molar_mass=float(cfg.get("molar_mass", 0.02897)),
        temperature=float(cfg.get("room_temperature", 294.0)),
    )


def _build_anomaly(acfg) -> AnomalyInjection | None:
    if not acfg:
        return None
    return AnomalyInjection(
        axis=acfg["axis"],
        extra_force_psd_per_mw=float(acfg["extra_force_psd_per_mw"]),
        pressure_exponent=float(acfg.get("pressure_exponent", 0.0)),
        reference_pressure_hpa=float(acfg.get("reference_pressure_hpa", 100.0)),
    )


# =============================================================================
# Subcommands
# =============================================================================

def cmd_simulate(args) -> int:
    cfg = _load_config(args)
    seed = args.seed if args.seed is not None else int(cfg.get("seed", 0))
    sim = SimulationConfig(
        dt=float(cfg.get("dt_s", 5e-7)),
        duration=float(cfg.get("duration_s", 1.0)),
        rng_seed=seed,
        axes=_build_axes(cfg),
        laser_power=mw_to_w(float(cfg.get("laser_power_mw", 100.0))),
        gas=_build_gas(cfg, float(cfg.get("pressure_hpa", 45.0))),
        particle=_build_particle(cfg),
        heating=_build_heating(cfg),
        alpha_c=float(cfg.get("alpha_c", 1.0)),
        anomaly_injection=_build_anomaly(cfg.get("anomaly")),
        measurement_noise_psd=float(cfg.get("measurement_noise_psd", 0.0)),
    )
    trace = simulate_trace(sim)
    path = _out_file(args, "trace.csv")
    write_trace(trace, path)
    print(path)
    return 0


def cmd_psd(args) -> int:
    cfg = _load_config(args)
    trace = read_trace(_input_path(args, cfg, "trace"))
    axis = args.axis or cfg.get("axis", "x")
    psd = welch_psd(
        trace,
        axis=axis,
        segment_length=int(cfg.get("segment_length", 16384)),
        overlap_fraction=float(cfg.get("overlap_fraction", 0.5)),
        window=cfg.get("window", "hann"),
    )
    path = _out_file(args, f"psd_{axis}.csv")
    write_psd(psd, path)
    print(path)
    return 0


def cmd_fit_psd(args) -> int:
    cfg = _load_config(args)
    psd = read_psd(_input_path(args, cfg, "psd"))
    band = cfg.get("fit_band")
    fit = fit_psd(
        psd,
        fit_band=tuple(band) if band else None,
        noise_floor=cfg.get("noise_floor", "none"),
        weighting=cfg.get("weighting", "proportional"),
        log_space=bool(cfg.get("log_space", False)),
        alias_fold=bool(cfg.get("alias_fold", True)),
    )
    _print_json(dataclasses.asdict(fit))
    if not fit.converged:
        print("fit did not converge", file=sys.stderr)
        return 2
    return 0


def cmd_fit_esr(args) -> int:
    cfg = _load_config(args)
    spectrum = read_esr(_input_path(args, cfg, "esr"))
    fit = fit_esr(spectrum)
    law = load_zfs_law(cfg["zfs_law"]) if cfg.get("zfs_law") else default_zfs_law()
    payload = dataclasses.asdict(fit)
    if fit.converged:
        estimate = temperature_from_esr(fit, law)
        payload["temperature_k"] = estimate.kelvin
        payload["temperature_sigma_k"] = estimate.sigma
    _print_json(payload)
    if not fit.converged:
        print("fit did not converge", file=sys.stderr)
        return 2
    return 0


def cmd_calibrate(args) -> int:
    cfg = _load_config(args)
    rows = np.loadtxt(_input_path(args, cfg, "points_csv"), delimiter=",",
                      skiprows=1, ndmin=2, dtype=str)
    pressure_filter = cfg.get("pressure_hpa")
    grouped: dict[tuple, dict] = {}
    for row in rows:
        pressure, axis, power, rep = float(row[0]), row[1], float(row[2]), int(float(row[3]))
        if pressure_filter is not None and not math.isclose(pressure, pressure_filter):
            continue
        area, sigma, f_q, gamma = (float(v) for v in row[4:8])
        fit = PsdFit(
            A=area * f_q**2, f_q=f_q, gamma=gamma, floor=0.0,
            uncertainties={"A": sigma * f_q**2, "f_q": 0.0, "gamma": 0.0},
            converged=True,
        )
        grouped.setdefault((pressure, power, rep), {})[axis] = fit
    sweep = [
        PowerSweepPoint(laser_power=power, repetition_index=rep,
                        pressure_hpa=pressure, fits=fits)
        for (pressure, power, rep), fits in sorted(grouped.items())
    ]
    result = calibrate(sweep, float(cfg.get("room_temperature", 294.0)))
    _print_json(dataclasses.asdict(result))
    return 0


def cmd_extract_k(args) -> int:
    cfg = _load_config(args)
    pressure = float(cfg.get("pressure_hpa", 1.0))
    energy = [
        EnergyPoint(laser_power=float(p), energy=float(e),
                    sigma=float(s) if s is not None else None)
        for p, e, *rest in cfg["energy"]
        for s in [rest[0] if rest else None]
    ]
    temperature = [
        TemperaturePoint(laser_power=float(p), pressure=pressure,
                         temperature=float(t),
                         sigma=float(s) if s is not None else None)
        for p, t, *rest in cfg["temperature"]
        for s in [rest[0] if rest else None]
    ]
    result = extract_k(energy, temperature)
    _print_json(dataclasses.asdict(result))
    return 0


def cmd_campaign(args) -> int:
    cfg = _load_config(args)
    seed = args.seed if args.seed is not None else int(cfg.get("seed", 0))
    band = cfg.get("fit_band")
    config = CampaignConfig(
        pressures_hpa=tuple(cfg.get("pressures_hpa", (45.0, 60.0, 80.0, 100.0))),
        laser_powers_mw=tuple(cfg.get("laser_powers_mw", tuple(range(15, 151, 15)))),
        repetitions=int(cfg.get("repetitions", 3)),
        duration_s=float(cfg.get("duration_s", 1.0)),
        dt_s=float(cfg.get("dt_s", 5e-7)),
        axes=_build_axes(cfg),
        particle=_build_particle(cfg),
        heating=_build_heating(cfg),
        alpha_c=float(cfg.get("alpha_c", 1.0)),
        anomaly=_build_anomaly(cfg.get("anomaly")),
        zfs_law=load_zfs_law(cfg["zfs_law"]) if cfg.get("zfs_law") else None,
        molar_mass=float(cfg.get("molar_mass", 0.02897)),
        room_temperature=float(cfg.get("room_temperature", 294.0)),
        rng_seed=seed,
        esr=EsrSettings(**cfg.get("esr", {})),
        segment_length=int(cfg.get("segment_length", 16384)),
        fit_band=tuple(band) if band else None,
        noise_floor=cfg.get("noise_floor", "none"),
        measurement_noise_psd=float(cfg.get("measurement_noise_psd", 0.0)),
        thresholds=ClassificationThresholds(**cfg.get("thresholds", {})),
        thermometry_only=bool(cfg.get("thermometry_only", False)),
    )
    report = run_campaign(config)
    out = _out_dir(args)
    path = write_report(report, out, format=args.format or "csv")
    summary = {
        "report": str(path),
        "n_points": len(report.points),
        "n_temperatures": len(report.temperatures),
        "n_errors": len(report.errors),
        "kappa_heat": report.heating_fit.kappa_heat if report.heating_fit else None,
        "classification": (
            report.estimate.classification if report.estimate else None
        ),
    }
    _print_json(summary)
    return 0


def cmd_cylinder_k(args) -> int:
    cfg = _load_config(args)
    gas = _build_gas(cfg, float(cfg.get("pressure_hpa", 45.0)))
    radius = float(cfg.get("radius_m", 40e-9))
    density = float(cfg.get("density", 3500.0))
    grid = cfg.get("delta_t_grid")
    grid = np.asarray(grid, float) if grid is not None else None

    if "aspect_ratios" in cfg:
        out = _out_dir(args) / "cylinder_coupling_vs_anisotropy.csv"
        write_cylinder_k_csv(
            out, radius, cfg["aspect_ratios"], gas,
            density=density, delta_t_grid=grid,
        )
        print(out)
        return 0

    length = float(cfg.get("length_m", 2.0 * radius))
    particle = ParticleModel(shape=Cylinder(radius=radius, length=length), density=density)
    drag = cylinder_drag(particle, gas)
    _print_json({
        "length_over_diameter": length / (2.0 * radius),
        "g": drag.anisotropy_g,
        "k_parallel": cylinder_k(particle, gas, "parallel", grid),
        "k_perpendicular": cylinder_k(particle, gas, "perpendicular", grid),
        "k_sphere": sphere_k(t0=gas.temperature, delta_t_grid=grid),
    })
    return 0


# =============================================================================
# Parser and entry point
# =============================================================================

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hotbrownian",
        description="Hot Brownian motion simulator and estimation toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, helptext, takes_input=None):
        p = sub.add_parser(name, help=helptext)
        if takes_input:
            p.add_argument("input", nargs="?", default=None, help=takes_input)
        p.add_argument("--config", help="JSON configuration file")
        p.add_argument("--seed", type=int, default=None, help="override RNG seed")
        p.add_argument("--out", default=None, help="output file or directory")
        p.add_argument("--format", choices=("csv", "json"), default=None,
                       help="report output format")
        p.set_defaults(func=func)
        return p

    add("simulate", cmd_simulate, "simulate a detector time trace")
    p_psd = add("psd", cmd_psd, "Welch PSD of a stored trace", "trace CSV file")
    p_psd.add_argument("--axis", default=None, help="axis label (default x)")
    add("fit-psd", cmd_fit_psd, "Lorentzian fit of a stored PSD", "PSD CSV file")
    add("fit-esr", cmd_fit_esr, "double-dip fit of a stored ESR sweep", "ESR CSV file")
    add("calibrate", cmd_calibrate, "zero-power calibration from a sweep table",
        "normalized-area table CSV")
    add("extract-k", cmd_extract_k, "coupling constant from matched series")
    add("campaign", cmd_campaign, "run a full measurement campaign")
    add("cylinder-k", cmd_cylinder_k, "cylinder coupling constants and anisotropy")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (CalibrationError, EstimationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ConfigError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (OSError, KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
