"""Ensemble dataset files: per-model CSV series plus a JSON manifest.

Each model contributes one calibration-period and one projection-period
CSV with columns ``time,value``. The manifest names the files, the three
analysis periods, and optionally observation files. All parse errors carry
the offending file and line.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import InputError
from .series import TimeSeries

MANIFEST_NAME = "dataset.json"


@dataclass(frozen=True)
class ModelData:
    id: str
    calibration: TimeSeries
    projection: TimeSeries


@dataclass(frozen=True)
class EnsembleDataset:
    name: str
    units: str
    models: tuple[ModelData, ...]
    calibration_period: tuple[int, int]
    projection_reference_period: tuple[int, int]
    projection_period: tuple[int, int]
    observations: TimeSeries | None = None
    observations_projection: TimeSeries | None = None

    def __post_init__(self):
        if len(self.models) < 2:
            raise InputError(f"need at least 2 models, got {len(self.models)}")
        ids = [m.id for m in self.models]
        if len(set(ids)) != len(ids):
            raise InputError("duplicate model ids in dataset")
        first = self.models[0]
        for m in self.models[1:]:
            if not np.array_equal(m.calibration.times, first.calibration.times):
                raise InputError(
                    f"calibration time axis of model {m.id!r} does not match "
                    f"model {first.id!r}"
                )
            if not np.array_equal(m.projection.times, first.projection.times):
                raise InputError(
                    f"projection time axis of model {m.id!r} does not match "
                    f"model {first.id!r}"
                )
        if self.observations is not None and not np.array_equal(
            self.observations.times, first.calibration.times
        ):
            raise InputError(
                "observations time axis does not match the calibration axis"
            )
        if self.observations_projection is not None and not np.array_equal(
            self.observations_projection.times, first.projection.times
        ):
            raise InputError(
                "projection observations time axis does not match the "
                "projection axis"
            )

    @property
    def k(self) -> int:
        return len(self.models)

    @property
    def model_ids(self) -> tuple[str, ...]:
        return tuple(m.id for m in self.models)


def _read_series_csv(path: Path) -> TimeSeries:
    times: list[int] = []
    values: list[float] = []
    try:
        fh = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    with fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["time", "value"]:
            raise InputError(f"{path}:1: expected header 'time,value'")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 2:
                raise InputError(f"{path}:{lineno}: expected 2 columns, got {len(row)}")
            try:
                t = int(row[0])
            except ValueError:
                raise InputError(f"{path}:{lineno}: bad time {row[0]!r}") from None
            try:
                v = float(row[1])
            except ValueError:
                raise InputError(f"{path}:{lineno}: bad value {row[1]!r}") from None
            if not np.isfinite(v):
                raise InputError(f"{path}:{lineno}: missing or non-finite value")
            times.append(t)
            values.append(v)
    try:
        return TimeSeries(np.array(times, dtype=np.int64), np.array(values))
    except InputError as exc:
        raise InputError(f"{path}: {exc}") from exc


def _period(obj, key: str) -> tuple[int, int]:
    try:
        t0, t1 = obj[key]
        return int(t0), int(t1)
    except (KeyError, TypeError, ValueError):
        raise InputError(f"manifest field {key!r} must be a [t0, t1] pair") from None


def load_dataset(path) -> EnsembleDataset:
    """Load and validate a dataset from its manifest JSON."""
    path = Path(path)
    manifest_path = path / MANIFEST_NAME if path.is_dir() else path
    try:
        with open(manifest_path, encoding="utf-8") as fh:
            manifest = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read manifest {manifest_path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{manifest_path}: invalid JSON: {exc}") from exc
    base = manifest_path.parent
    for key in ("name", "models"):
        if key not in manifest:
            raise InputError(f"{manifest_path}: missing manifest field {key!r}")
    models = []
    for entry in manifest["models"]:
        for key in ("id", "calibration_file", "projection_file"):
            if key not in entry:
                raise InputError(
                    f"{manifest_path}: model entry missing field {key!r}"
                )
        models.append(
            ModelData(
                id=str(entry["id"]),
                calibration=_read_series_csv(base / entry["calibration_file"]),
                projection=_read_series_csv(base / entry["projection_file"]),
            )
        )
    obs = None
    obs_proj = None
    if manifest.get("observations_file"):
        obs = _read_series_csv(base / manifest["observations_file"])
    if manifest.get("observations_projection_file"):
        obs_proj = _read_series_csv(base / manifest["observations_projection_file"])
    return EnsembleDataset(
        name=str(manifest["name"]),
        units=str(manifest.get("units", "")),
        models=tuple(models),
        calibration_period=_period(manifest, "calibration"),
        projection_reference_period=_period(manifest, "projection_reference"),
        projection_period=_period(manifest, "projection"),
        observations=obs,
        observations_projection=obs_proj,
    )


def _write_series_csv(path: Path, series: TimeSeries) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["time", "value"])
        for t, v in zip(series.times, series.values):
            writer.writerow([int(t), repr(float(v))])


def write_dataset(dataset: EnsembleDataset, out_dir) -> Path:
    """Write the dataset as CSV files plus a manifest; returns the manifest path."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    entries = []
    for m in dataset.models:
        cal_name = f"{m.id}_calibration.csv"
        proj_name = f"{m.id}_projection.csv"
        _write_series_csv(out / cal_name, m.calibration)
        _write_series_csv(out / proj_name, m.projection)
        entries.append(
            {"id": m.id, "calibration_file": cal_name, "projection_file": proj_name}
        )
    manifest = {
        "name": dataset.name,
        "units": dataset.units,
        "calibration": list(dataset.calibration_period),
        "projection_reference": list(dataset.projection_reference_period),
        "projection": list(dataset.projection_period),
        "models": entries,
    }
    if dataset.observations is not None:
        _write_series_csv(out / "observations_calibration.csv", dataset.observations)
        manifest["observations_file"] = "observations_calibration.csv"
    if dataset.observations_projection is not None:
        _write_series_csv(
            out / "observations_projection.csv", dataset.observations_projection
        )
        manifest["observations_projection_file"] = "observations_projection.csv"
    manifest_path = out / MANIFEST_NAME
    with open(manifest_path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return manifest_path
