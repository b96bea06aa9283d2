"""Command-line surface for the weighting and projection pipeline.

Subcommands: decompose, weigh, project, loocv, calibrate-f, diagnose,
synth. Exit codes: 0 success, 2 input error, 3 numerical degeneracy,
4 calibration failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from ._version import __version__
from .crossval import (
    ExperimentConfig,
    Method,
    calibrate_f,
    generate_synthetic_ensemble,
    run_loocv,
)
from .dataset import load_dataset, write_dataset
from .decompose import SmootherKind, decompose
from .errors import DegeneracyError, InputError
from .pipeline import compute_weights, project_ensemble, run_diagnostics
from .presets import PRESET_NAMES, preset
from .project import Variant
from .reports import RunManifest, emit_report

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_DEGENERATE = 3
EXIT_CALIBRATION = 4


def _add_common(parser: argparse.ArgumentParser, with_data: bool = True) -> None:
    if with_data:
        parser.add_argument("--data", required=True, help="dataset manifest JSON or its directory")
    parser.add_argument("--config", help="experiment config JSON")
    parser.add_argument("--preset", choices=PRESET_NAMES, help="named experiment preset")
    parser.add_argument("--seed", type=int, help="override the RNG seed")
    parser.add_argument("--method", choices=[m.value for m in Method], help="weighting method")
    parser.add_argument("--variant", choices=[v.value for v in Variant], help="projection variant")
    parser.add_argument("--f", type=float, help="error expansion factor")
    parser.add_argument("--out-dir", default="out", help="output directory")
    parser.add_argument("--format", choices=["json", "csv"], default="json", help="report format")


def _build_config(args) -> ExperimentConfig:
    if args.preset:
        config, _ = preset(args.preset)
    else:
        config = ExperimentConfig()
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                data = json.load(fh)
        except OSError as exc:
            raise InputError(f"cannot read config {args.config}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise InputError(f"{args.config}: invalid JSON: {exc}") from exc
        config = ExperimentConfig.from_dict({**config.to_dict(), **data})
    overrides = {}
    if args.seed is not None:
        overrides["rng_seed"] = args.seed
    if args.method is not None:
        overrides["method"] = Method(args.method)
    if args.variant is not None:
        overrides["variant"] = Variant(args.variant)
    if args.f is not None:
        overrides["f"] = args.f
    return replace(config, **overrides) if overrides else config


def _dataset_inputs(data_path) -> list[Path]:
    path = Path(data_path)
    manifest = path / "dataset.json" if path.is_dir() else path
    paths = [manifest]
    try:
        with open(manifest, encoding="utf-8") as fh:
            entries = json.load(fh)
        for m in entries.get("models", []):
            for key in ("calibration_file", "projection_file"):
                if key in m:
                    paths.append(manifest.parent / m[key])
        for key in ("observations_file", "observations_projection_file"):
            if entries.get(key):
                paths.append(manifest.parent / entries[key])
    except (OSError, json.JSONDecodeError):
        pass
    return [p for p in paths if p.exists()]


def _finish(args, config, command, reports) -> None:
    out = Path(args.out_dir)
    written = []
    for report, stem in reports:
        written.extend(emit_report(report, args.format, out, stem))
    manifest = RunManifest.create(
        command, config, _dataset_inputs(args.data) if getattr(args, "data", None) else ()
    )
    written.append(manifest.write(out))
    print(f"seed: {config.rng_seed}")
    for path in written:
        print(f"wrote {path}")


def _cmd_decompose(args) -> int:
    config = _build_config(args)
    dataset = load_dataset(args.data)
    config = config.resolve(dataset)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    step = dataset.models[0].calibration.step
    for model in dataset.models:
        cal = model.calibration.slice_period(config.calibration_period)
        dec = decompose(cal, config.smoother, config.mode)
        path = out / f"{model.id}_decomposition.csv"
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["time", "value", "trend", "anomaly"])
            for t, v, tr, a in zip(cal.times, cal.values, dec.trend, dec.anomalies):
                writer.writerow([int(t), repr(float(v)), repr(float(tr)), repr(float(a))])
        print(f"wrote {path}")
    if config.smoother.kind is SmootherKind.THEIL_SEN:
        from .decompose import theil_sen

        cal0 = dataset.models[0].calibration.slice_period(config.calibration_period)
        slope, _ = theil_sen(cal0)
        print(f"model {dataset.models[0].id}: slope {slope:.6g} per time unit (step {step})")
    return EXIT_OK


def _cmd_weigh(args) -> int:
    config = _build_config(args)
    dataset = load_dataset(args.data)
    report = compute_weights(dataset, config.resolve(dataset))
    _finish(args, config, "weigh", [(report, "weights")])
    return EXIT_OK


def _cmd_project(args) -> int:
    config = _build_config(args)
    dataset = load_dataset(args.data)
    weights, projection = project_ensemble(dataset, config.resolve(dataset))
    _finish(args, config, "project", [(weights, "weights"), (projection, "projection")])
    return EXIT_OK


def _cmd_loocv(args) -> int:
    config = _build_config(args)
    dataset = load_dataset(args.data)
    report = run_loocv(dataset, config.resolve(dataset))
    _finish(args, config, "loocv", [(report, "loocv")])
    print(
        f"coverage {report.coverage:.3f}  mciw {report.mciw:.4g}  mab {report.mab:.4g}"
    )
    return EXIT_OK


def _cmd_calibrate_f(args) -> int:
    config = _build_config(args)
    dataset = load_dataset(args.data)
    grid = None
    if args.f_grid:
        try:
            lo, hi, step = (float(x) for x in args.f_grid.split(":"))
        except ValueError:
            raise InputError(
                f"--f-grid must be lo:hi:step, got {args.f_grid!r}"
            ) from None
        grid = np.arange(lo, hi + 0.5 * step, step)
    result = calibrate_f(
        dataset, config.resolve(dataset), target_coverage=args.target_coverage, f_grid=grid
    )
    _finish(args, config, "calibrate-f", [(result, "calibration")])
    if not result.success:
        print("calibration failed: no grid point reaches the target coverage")
        return EXIT_CALIBRATION
    print(f"f* = {result.f_star}  coverage = {result.report.coverage:.3f}")
    return EXIT_OK


def _cmd_diagnose(args) -> int:
    config = _build_config(args)
    dataset = load_dataset(args.data)
    report = run_diagnostics(dataset, config.resolve(dataset))
    _finish(args, config, "diagnose", [(report, "diagnostics")])
    frac = ", ".join(
        f"{mid}={env.fraction_inside:.2f}"
        for mid, env in zip(report.model_ids, report.envelopes)
    )
    print(f"independence flagged: {report.independence.flagged}")
    print(f"spectrum fraction inside: {frac}")
    return EXIT_OK


def _cmd_synth(args) -> int:
    if args.preset:
        config, spec = preset(args.preset)
    else:
        raise InputError("synth needs --preset (or use the library API for custom specs)")
    if args.seed is not None:
        spec = replace(spec, rng_seed=args.seed)
        config = replace(config, rng_seed=args.seed)
    ensemble = generate_synthetic_ensemble(spec)
    out = Path(args.out_dir)
    manifest_path = write_dataset(ensemble.dataset, out)
    config_path = out / "config.json"
    with open(config_path, "w", encoding="utf-8") as fh:
        json.dump(config.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"seed: {spec.rng_seed}")
    print(f"wrote {manifest_path}")
    print(f"wrote {config_path}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="trendvar",
        description=(
            "Weight an ensemble of model time series by trend and AR(1) "
            "variability skill and make probabilistic projections."
        ),
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("decompose", help="write per-model trend/anomaly tables")
    _add_common(p)
    p.set_defaults(func=_cmd_decompose)

    p = sub.add_parser("weigh", help="trend, variability, and combined weights")
    _add_common(p)
    p.set_defaults(func=_cmd_weigh)

    p = sub.add_parser("project", help="weighted probabilistic projection")
    _add_common(p)
    p.set_defaults(func=_cmd_project)

    p = sub.add_parser("loocv", help="one-at-a-time cross-validation")
    _add_common(p)
    p.set_defaults(func=_cmd_loocv)

    p = sub.add_parser("calibrate-f", help="calibrate the error expansion factor")
    _add_common(p)
    p.add_argument("--target-coverage", type=float, default=0.90)
    p.add_argument("--f-grid", help="grid as lo:hi:step (default 0.25:5.0:0.25)")
    p.set_defaults(func=_cmd_calibrate_f)

    p = sub.add_parser("diagnose", help="independence and spectral adequacy checks")
    _add_common(p)
    p.set_defaults(func=_cmd_diagnose)

    p = sub.add_parser("synth", help="write a synthetic dataset for a preset")
    _add_common(p, with_data=False)
    p.set_defaults(func=_cmd_synth)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except DegeneracyError as exc:
        print(f"numerical degeneracy: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE


if __name__ == "__main__":
    sys.exit(main())
