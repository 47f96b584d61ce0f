"""File formats: traces, spectra, splitting laws, campaign reports.

Arrays go to CSV with 17 significant digits (bit-exact float64 round
trips); scalars and provenance go to JSON sidecars named after the CSV
with a ``.json`` extension.  Campaign reports serialize to one JSON
document plus one CSV per figure-ready table, named by content.
"""

from __future__ import annotations

import csv
import dataclasses
import json
import math
from pathlib import Path

import numpy as np

from .errors import DomainError
from .pipeline import CampaignReport, com_energy
from .simulate import TimeTrace
from .spectral import Psd
from .thermometry import EsrSpectrum, ZfsLaw
from .twobath import cylinder_drag, cylinder_k, sphere_k
from .core import Cylinder, GasEnvironment, ParticleModel

__all__ = [
    "write_trace",
    "read_trace",
    "write_psd",
    "read_psd",
    "write_esr",
    "read_esr",
    "save_zfs_law",
    "load_zfs_law",
    "write_report",
    "write_cylinder_k_csv",
]

_FMT = "%.17g"                           # shortest exact float64 text form


def _sidecar(path: Path) -> Path:
    return path.with_suffix(".json")


def _json_default(obj):
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON-serializable: {type(obj)!r}")


def _dump_json(payload: dict, path: Path) -> None:
    path.write_text(json.dumps(payload, indent=2, default=_json_default) + "\n")


# =============================================================================
# Time traces
# =============================================================================

def write_trace(trace: TimeTrace, path) -> Path:
    """Write a trace as CSV (t_s, V<axis>...) with a JSON sidecar.

    Returns the sidecar path.  Values use 17 significant digits, so
    :func:`read_trace` reproduces the samples bit-exactly.
    """
    path = Path(path)
    labels = sorted(trace.signals.keys())
    columns = [trace.times()] + [np.asarray(trace.signals[k], float) for k in labels]
    header = ",".join(["t_s"] + [f"V{k}" for k in labels])
    np.savetxt(path, np.column_stack(columns), delimiter=",",
               header=header, comments="", fmt=_FMT)

    meta = trace.metadata
    sidecar = {
        "power_mW": meta.get("laser_power_mw"),
        "pressure_hPa": meta.get("pressure_hpa"),
        "dt_s": trace.dt,
        "seed": meta.get("seed"),
        "axes": labels,
        "true_parameters": meta.get("true_parameters", {}),
    }
    _dump_json(sidecar, _sidecar(path))
    return _sidecar(path)


def read_trace(path) -> TimeTrace:
    """Load a trace written by :func:`write_trace`."""
    path = Path(path)
    meta = json.loads(_sidecar(path).read_text())
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    signals = {label: data[:, 1 + i] for i, label in enumerate(meta["axes"])}
    return TimeTrace(
        dt=float(meta["dt_s"]),
        signals=signals,
        metadata={
            "laser_power_mw": meta.get("power_mW"),
            "pressure_hpa": meta.get("pressure_hPa"),
            "seed": meta.get("seed"),
            "true_parameters": meta.get("true_parameters", {}),
        },
    )


# =============================================================================
# Spectra
# =============================================================================

def write_psd(psd: Psd, path) -> Path:
    """Write a PSD as CSV (f_Hz, S) with window/segment sidecar."""
    path = Path(path)
    np.savetxt(path, np.column_stack([psd.frequencies, psd.values]),
               delimiter=",", header="f_Hz,S", comments="", fmt=_FMT)
    _dump_json(
        {
            "window": psd.window_name,
            "segments": psd.segment_count,
            "dt_s": psd.dt,
        },
        _sidecar(path),
    )
    return _sidecar(path)


def read_psd(path) -> Psd:
    path = Path(path)
    meta = json.loads(_sidecar(path).read_text())
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return Psd(
        frequencies=data[:, 0],
        values=data[:, 1],
        segment_count=int(meta["segments"]),
        window_name=meta["window"],
        dt=float(meta["dt_s"]),
    )


def write_esr(spectrum: EsrSpectrum, path) -> Path:
    """Write an ESR sweep as CSV (f_Hz, counts) with metadata sidecar."""
    path = Path(path)
    np.savetxt(
        path,
        np.column_stack([spectrum.microwave_frequencies, spectrum.pl_counts]),
        delimiter=",", header="f_Hz,counts", comments="", fmt=_FMT,
    )
    _dump_json(dict(spectrum.metadata), _sidecar(path))
    return _sidecar(path)


def read_esr(path) -> EsrSpectrum:
    path = Path(path)
    meta = json.loads(_sidecar(path).read_text())
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return EsrSpectrum(
        microwave_frequencies=data[:, 0], pl_counts=data[:, 1], metadata=meta
    )


# =============================================================================
# Splitting laws
# =============================================================================

def save_zfs_law(law: ZfsLaw, path) -> None:
    path = Path(path)
    _dump_json(
        {
            "coefficients": list(law.coefficients),
            "T_min": law.T_min,
            "T_max": law.T_max,
            "source": law.source,
        },
        path,
    )


def load_zfs_law(path) -> ZfsLaw:
    data = json.loads(Path(path).read_text())
    return ZfsLaw(
        coefficients=tuple(data["coefficients"]),
        T_min=data["T_min"],
        T_max=data["T_max"],
        source=data.get("source", ""),
    )


# =============================================================================
# Campaign reports
# =============================================================================

def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    with path.open("w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(header)
        for row in rows:
            writer.writerow([
                f"{v:.17g}" if isinstance(v, float) else v for v in row
            ])


def write_report(report: CampaignReport, outdir, format: str = "csv") -> Path:
    """Write ``report.json`` plus (with format="csv") figure-ready tables.

    Tables, one CSV each, named by content:

    * ``normalized_area_vs_power.csv`` — every PSD fit's A/f_q^2
    * ``com_energy_vs_power.csv`` — calibrated energies, averaged over reps
    * ``internal_temperature_vs_power.csv`` — raw and corrected ESR temps
    * ``coupling_vs_pressure.csv`` — per-axis, per-pressure K

    Returns the path of ``report.json``.
    """
    if format not in ("csv", "json"):
        raise DomainError(f"unknown report format {format!r}")
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)

    report_path = outdir / "report.json"
    _dump_json(dataclasses.asdict(report), report_path)
    if format == "json":
        return report_path

    rows = []
    for pt in report.points:
        for axis in sorted(pt.fits):
            fit = pt.fits[axis]
            rows.append([
                float(pt.pressure_hpa), axis, float(pt.laser_power),
                int(pt.repetition_index),
                float(fit.normalized_area), float(fit.normalized_area_sigma),
                float(fit.f_q), float(fit.gamma),
            ])
    _write_csv(
        outdir / "normalized_area_vs_power.csv",
        ["pressure_hpa", "axis", "laser_power_mw", "repetition",
         "normalized_area", "sigma", "f_q_hz", "gamma_hz"],
        rows,
    )

    rows = []
    for pressure, calib in report.calibrations.items():
        sweep = [pt for pt in report.points if pt.pressure_hpa == pressure]
        for axis in sorted(calib.c_calib):
            for power in sorted({pt.laser_power for pt in sweep}):
                cell = [pt for pt in sweep if pt.laser_power == power]
                energies = [com_energy(pt, calib, axis) for pt in cell]
                n = len(energies)
                spread = float(np.std(energies, ddof=1)) / math.sqrt(n) if n > 1 else 0.0
                rows.append([
                    float(pressure), axis, float(power),
                    float(np.mean(energies)), spread, n,
                ])
    _write_csv(
        outdir / "com_energy_vs_power.csv",
        ["pressure_hpa", "axis", "laser_power_mw", "energy_j", "sigma_j", "n_reps"],
        rows,
    )

    offset = report.heating_fit.strain_offset_K if report.heating_fit else 0.0
    rows = [
        [float(t.pressure), float(t.laser_power), float(t.temperature),
         float(t.sigma) if t.sigma is not None else 0.0,
         float(t.temperature - offset)]
        for t in report.temperatures
    ]
    _write_csv(
        outdir / "internal_temperature_vs_power.csv",
        ["pressure_hpa", "laser_power_mw", "t_raw_k", "sigma_k", "t_corrected_k"],
        rows,
    )

    rows = []
    if report.estimate is not None:
        for axis, measurements in report.estimate.per_pressure.items():
            for m in measurements:
                rows.append([axis, float(m.pressure), float(m.K), float(m.sigma)])
    _write_csv(
        outdir / "coupling_vs_pressure.csv",
        ["axis", "pressure_hpa", "k", "sigma"],
        rows,
    )
    return report_path


def write_cylinder_k_csv(
    path,
    radius: float,
    aspect_ratios,
    gas: GasEnvironment,
    density: float = 3500.0,
    delta_t_grid=None,
) -> Path:
    """Tabulate cylinder coupling constants against shape anisotropy.

    One row per aspect ratio x = length/(2*radius): the drag anisotropy
    factor g and the slope-procedure coupling constants of both axes,
    next to the sphere value from the identical procedure.
    """
    path = Path(path)
    k_sphere = sphere_k(t0=gas.temperature, delta_t_grid=delta_t_grid)
    rows = []
    for x in aspect_ratios:
        particle = ParticleModel(
            shape=Cylinder(radius=radius, length=2.0 * radius * float(x)),
            density=density,
        )
        drag = cylinder_drag(particle, gas)
        rows.append([
            float(x),
            float(drag.anisotropy_g),
            float(cylinder_k(particle, gas, "parallel", delta_t_grid)),
            float(cylinder_k(particle, gas, "perpendicular", delta_t_grid)),
            float(k_sphere),
        ])
    _write_csv(
        path if path.suffix == ".csv" else path / "cylinder_coupling_vs_anisotropy.csv",
        ["length_over_diameter", "g", "k_parallel", "k_perpendicular", "k_sphere"],
        rows,
    )
    return path
