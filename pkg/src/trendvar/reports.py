"""Report emission: machine-readable JSON/CSV plus plot-data files.

Report files contain no timestamps and use sorted keys and repr-exact
floats, so identical runs produce byte-identical files. The run manifest
(which does carry a timestamp) is written separately.
"""

from __future__ import annotations

import csv
import hashlib
import json
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from ._version import __version__
from .crossval import CalibrationResult, CrossValReport, ExperimentConfig
from .diagnostics import EnvelopeReport, IndependenceReport
from .errors import InputError
from .project import ProjectionResult, density_grid

REPORT_VERSION = 1


@dataclass(frozen=True)
class WeightsReport:
    """Trend, variability, and combined weights for one observed record."""

    model_ids: tuple[str, ...]
    trend_weights: np.ndarray
    var_weights: np.ndarray
    combined_weights: np.ndarray
    f: float
    method: str


@dataclass(frozen=True)
class DiagnosticsReport:
    """Independence correlations plus per-model spectral envelope checks."""

    model_ids: tuple[str, ...]
    independence: IndependenceReport
    envelopes: tuple[EnvelopeReport, ...]


def _round_trip_floats(values) -> list[float]:
    return [float(v) for v in values]


def _crossval_json(report: CrossValReport) -> dict:
    return {
        "type": "crossval",
        "version": REPORT_VERSION,
        "software_version": __version__,
        "f": report.f,
        "method": report.method.value,
        "variant": report.variant.value,
        "coverage": report.coverage,
        "mciw": report.mciw,
        "mab": report.mab,
        "model_ids": list(report.model_ids),
        "records": [
            {
                "truth_id": r.truth_id,
                "true_delta": r.true_delta,
                "ci90": [r.ci90[0], r.ci90[1]],
                "mean": r.mean,
                "median": r.median,
                "mode": r.mode,
                "weights": _round_trip_floats(r.weights),
            }
            for r in report.records
        ],
    }


def _projection_json(report: ProjectionResult) -> dict:
    x, dens = density_grid(report.delta_samples)
    return {
        "type": "projection",
        "version": REPORT_VERSION,
        "software_version": __version__,
        "mean": report.mean,
        "median": report.median,
        "mode": report.mode,
        "ci90": [report.ci90[0], report.ci90[1]],
        "n_draws": int(report.delta_samples.size),
        "per_model_draw_counts": [int(c) for c in report.per_model_draw_counts],
        "pdf_grid": {
            "x": _round_trip_floats(x),
            "density": _round_trip_floats(dens),
        },
    }


def _weights_json(report: WeightsReport) -> dict:
    return {
        "type": "weights",
        "version": REPORT_VERSION,
        "software_version": __version__,
        "f": report.f,
        "method": report.method,
        "model_ids": list(report.model_ids),
        "trend_weights": _round_trip_floats(report.trend_weights),
        "var_weights": _round_trip_floats(report.var_weights),
        "combined_weights": _round_trip_floats(report.combined_weights),
    }


def _nan_to_none(values) -> list:
    return [None if np.isnan(v) else float(v) for v in values]


def _diagnostics_json(report: DiagnosticsReport) -> dict:
    return {
        "type": "diagnostics",
        "version": REPORT_VERSION,
        "software_version": __version__,
        "model_ids": list(report.model_ids),
        "independence": {
            "r_sigma": _nan_to_none(report.independence.r_sigma),
            "r_rho": _nan_to_none(report.independence.r_rho),
            "flagged": report.independence.flagged,
        },
        "envelopes": [
            {
                "model_id": mid,
                "fraction_inside": env.fraction_inside,
                "frequencies": _round_trip_floats(env.frequencies),
                "lower": _round_trip_floats(env.lower),
                "upper": _round_trip_floats(env.upper),
                "observed": _round_trip_floats(env.observed),
            }
            for mid, env in zip(report.model_ids, report.envelopes)
        ],
    }


def _calibration_json(report: CalibrationResult) -> dict:
    return {
        "type": "calibration",
        "version": REPORT_VERSION,
        "software_version": __version__,
        "f_star": report.f_star,
        "success": report.success,
        "target_coverage": report.target_coverage,
        "granularity": report.granularity,
        "trace": list(report.trace),
        "report": _crossval_json(report.report) if report.report else None,
    }


def _write_json(path: Path, payload: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow(row)


def _crossval_csv(report: CrossValReport, out: Path, stem: str) -> list[Path]:
    records = out / f"{stem}_records.csv"
    _write_csv(
        records,
        ["truth_id", "true_delta", "ci_lo", "ci_hi", "mean", "median", "mode"],
        [
            [r.truth_id] + [repr(v) for v in (r.true_delta, *r.ci90, r.mean, r.median, r.mode)]
            for r in report.records
        ],
    )
    heatmap = out / f"{stem}_weights_heatmap.csv"
    _write_csv(
        heatmap,
        ["truth_id", *report.model_ids],
        [[r.truth_id] + [repr(float(w)) for w in r.weights] for r in report.records],
    )
    return [records, heatmap]


def _projection_csv(report: ProjectionResult, out: Path, stem: str) -> list[Path]:
    summary = out / f"{stem}_summary.csv"
    _write_csv(
        summary,
        ["mean", "median", "mode", "ci_lo", "ci_hi"],
        [[repr(v) for v in (report.mean, report.median, report.mode, *report.ci90)]],
    )
    x, dens = density_grid(report.delta_samples)
    grid = out / f"{stem}_pdf_grid.csv"
    _write_csv(
        grid,
        ["x", "density"],
        [[repr(float(a)), repr(float(b))] for a, b in zip(x, dens)],
    )
    return [summary, grid]


def _weights_csv(report: WeightsReport, out: Path, stem: str) -> list[Path]:
    path = out / f"{stem}_weights.csv"
    _write_csv(
        path,
        ["model_id", "trend_weight", "var_weight", "combined_weight"],
        [
            [mid, repr(float(t)), repr(float(v)), repr(float(c))]
            for mid, t, v, c in zip(
                report.model_ids,
                report.trend_weights,
                report.var_weights,
                report.combined_weights,
            )
        ],
    )
    return [path]


def _calibration_csv(report: CalibrationResult, out: Path, stem: str) -> list[Path]:
    path = out / f"{stem}_trace.csv"
    _write_csv(
        path,
        ["f", "coverage", "mciw", "mab"],
        [
            [repr(float(t["f"])), repr(float(t["coverage"])), repr(float(t["mciw"])), repr(float(t["mab"]))]
            for t in report.trace
        ],
    )
    return [path]


def _diagnostics_csv(report: DiagnosticsReport, out: Path, stem: str) -> list[Path]:
    indep = out / f"{stem}_independence.csv"
    _write_csv(
        indep,
        ["truth_id", "r_sigma", "r_rho"],
        [
            [mid, "" if np.isnan(rs) else repr(float(rs)), "" if np.isnan(rr) else repr(float(rr))]
            for mid, rs, rr in zip(
                report.model_ids,
                report.independence.r_sigma,
                report.independence.r_rho,
            )
        ],
    )
    spectra = out / f"{stem}_spectra.csv"
    rows = []
    for mid, env in zip(report.model_ids, report.envelopes):
        for fq, lo, hi, ob in zip(env.frequencies, env.lower, env.upper, env.observed):
            rows.append([mid, repr(float(fq)), repr(float(lo)), repr(float(hi)), repr(float(ob))])
    _write_csv(spectra, ["model_id", "frequency", "lower", "upper", "observed"], rows)
    return [indep, spectra]


_JSON_BUILDERS = {
    CrossValReport: ("loocv", _crossval_json, _crossval_csv),
    ProjectionResult: ("projection", _projection_json, _projection_csv),
    WeightsReport: ("weights", _weights_json, _weights_csv),
    CalibrationResult: ("calibration", _calibration_json, _calibration_csv),
    DiagnosticsReport: ("diagnostics", _diagnostics_json, _diagnostics_csv),
}


def emit_report(report, format: str = "json", out_dir=".", stem: str | None = None) -> list[Path]:
    """Write a report in the chosen format; returns the paths written.

    JSON output is one self-contained file; CSV output is one or more
    plot-ready tables (records + weights heatmap for cross-validation,
    summary + pdf grid for projections).
    """
    entry = _JSON_BUILDERS.get(type(report))
    if entry is None:
        raise InputError(f"cannot emit report of type {type(report).__name__}")
    default_stem, to_json, to_csv = entry
    stem = stem or default_stem
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if format == "json":
        path = out / f"{stem}.json"
        _write_json(path, to_json(report))
        return [path]
    if format == "csv":
        return to_csv(report, out, stem)
    raise InputError(f"unknown format {format!r}; use 'json' or 'csv'")


def load_report(path) -> dict:
    """Read back a JSON report."""
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def config_hash(config: ExperimentConfig) -> str:
    blob = json.dumps(config.to_dict(), sort_keys=True).encode("utf-8")
    return hashlib.sha256(blob).hexdigest()


def file_digest(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


@dataclass(frozen=True)
class RunManifest:
    """Reproducibility record for one run: enough to regenerate any output
    bit-exactly (plus a creation timestamp for bookkeeping)."""

    command: str
    config: dict
    config_sha256: str
    rng_seed: int
    software_version: str
    input_digests: dict
    created_utc: str

    @classmethod
    def create(cls, command: str, config: ExperimentConfig, input_paths=()) -> "RunManifest":
        return cls(
            command=command,
            config=config.to_dict(),
            config_sha256=config_hash(config),
            rng_seed=config.rng_seed,
            software_version=__version__,
            input_digests={str(p): file_digest(p) for p in input_paths},
            created_utc=datetime.now(timezone.utc).isoformat(),
        )

    def write(self, out_dir, name: str = "run_manifest.json") -> Path:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        path = out / name
        _write_json(path, self.__dict__ | {"type": "run_manifest"})
        return path
