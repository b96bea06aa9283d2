"""One-at-a-time cross-validation and error-expansion-factor calibration.

Each ensemble member in turn plays the role of the truth: its decomposed
trend and anomalies become the pseudo-observations, all models are
weighted against them, the truth is removed (weights renormalized), and
the weighted projection of the remaining models is scored against the
truth's realized change. The expansion factor f is then chosen on a grid
so that the empirical coverage of the 90% credible intervals is close to
the target.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace

import numpy as np

from .dataset import EnsembleDataset
from .decompose import Mode, SmootherKind, SmootherSpec, fit_trend, split_anomalies
from .errors import DegeneracyError, InputError
from .model_weights import normalize_log_weights
from .project import (
    ProjectionInputs,
    Variant,
    future_bias_scale,
    sample_projection,
)
from .series import TimeSeries
from .trend_weight import (
    DiscrepancyPool,
    EnsembleTrends,
    TrendPrior,
    build_discrepancy_pool,
    trend_log_marginals,
)
from .var_weight import (
    ClippingRule,
    VarErrorPool,
    VariabilitySummaries,
    build_var_error_pool,
    next_closest_var,
    summarize_variability,
    var_log_marginals,
)

DEFAULT_F_GRID = tuple(np.arange(1, 21) * 0.25)  # 0.25 .. 5.0


class Method(str, enum.Enum):
    TREND = "trend"
    TREND_VAR = "trendvar"


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything a cross-validation or projection run needs.

    Periods left as None are taken from the dataset manifest. The
    projection-period decomposition has its own smoother (Theil-Sen by
    default) independent of the calibration smoother.
    """

    calibration_period: tuple[int, int] | None = None
    projection_reference_period: tuple[int, int] | None = None
    projection_period: tuple[int, int] | None = None
    smoother: SmootherSpec = field(default_factory=SmootherSpec)
    projection_smoother: SmootherSpec = field(default_factory=SmootherSpec)
    mode: Mode = Mode.ABSOLUTE
    variant: Variant = Variant.BOOT
    method: Method = Method.TREND_VAR
    f: float = 1.0
    trend_mc: int = 100_000
    var_mc: int = 10_000
    proj_draws: int = 100_000
    rng_seed: int = 0
    obs_truth: bool = False

    def __post_init__(self):
        if self.f < 0.0:
            raise InputError(f"f must be nonnegative, got {self.f}")
        for name in ("trend_mc", "var_mc", "proj_draws"):
            if getattr(self, name) < 1:
                raise InputError(f"{name} must be positive")

    def resolve(self, dataset: EnsembleDataset) -> "ExperimentConfig":
        """Fill missing periods from the dataset manifest."""
        return replace(
            self,
            calibration_period=self.calibration_period or dataset.calibration_period,
            projection_reference_period=self.projection_reference_period
            or dataset.projection_reference_period,
            projection_period=self.projection_period or dataset.projection_period,
        )

    def to_dict(self) -> dict:
        return {
            "calibration_period": list(self.calibration_period)
            if self.calibration_period
            else None,
            "projection_reference_period": list(self.projection_reference_period)
            if self.projection_reference_period
            else None,
            "projection_period": list(self.projection_period)
            if self.projection_period
            else None,
            "smoother": {
                "kind": self.smoother.kind.value,
                "span": self.smoother.span,
                "iterations": self.smoother.iterations,
            },
            "projection_smoother": {
                "kind": self.projection_smoother.kind.value,
                "span": self.projection_smoother.span,
                "iterations": self.projection_smoother.iterations,
            },
            "mode": self.mode.value,
            "variant": self.variant.value,
            "method": self.method.value,
            "f": self.f,
            "trend_mc": self.trend_mc,
            "var_mc": self.var_mc,
            "proj_draws": self.proj_draws,
            "rng_seed": self.rng_seed,
            "obs_truth": self.obs_truth,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        def smoother(entry):
            if entry is None:
                return SmootherSpec()
            return SmootherSpec(
                kind=SmootherKind(entry.get("kind", "theilsen")),
                span=float(entry.get("span", 0.8)),
                iterations=int(entry.get("iterations", 3)),
            )

        def period(entry):
            return None if entry is None else (int(entry[0]), int(entry[1]))

        known = {
            "calibration_period",
            "projection_reference_period",
            "projection_period",
            "smoother",
            "projection_smoother",
            "mode",
            "variant",
            "method",
            "f",
            "trend_mc",
            "var_mc",
            "proj_draws",
            "rng_seed",
            "obs_truth",
        }
        unknown = set(data) - known
        if unknown:
            raise InputError(f"unknown config fields: {sorted(unknown)}")
        return cls(
            calibration_period=period(data.get("calibration_period")),
            projection_reference_period=period(
                data.get("projection_reference_period")
            ),
            projection_period=period(data.get("projection_period")),
            smoother=smoother(data.get("smoother")),
            projection_smoother=smoother(data.get("projection_smoother")),
            mode=Mode(data.get("mode", "absolute")),
            variant=Variant(data.get("variant", "boot")),
            method=Method(data.get("method", "trendvar")),
            f=float(data.get("f", 1.0)),
            trend_mc=int(data.get("trend_mc", 100_000)),
            var_mc=int(data.get("var_mc", 10_000)),
            proj_draws=int(data.get("proj_draws", 100_000)),
            rng_seed=int(data.get("rng_seed", 0)),
            obs_truth=bool(data.get("obs_truth", False)),
        )


@dataclass(frozen=True)
class TruthRecord:
    truth_id: str
    true_delta: float
    ci90: tuple[float, float]
    mean: float
    median: float
    mode: float
    weights: np.ndarray  # full-ensemble weights before excluding the truth


@dataclass(frozen=True)
class CrossValReport:
    model_ids: tuple[str, ...]
    records: tuple[TruthRecord, ...]
    coverage: float
    mciw: float
    mab: float
    f: float
    method: Method
    variant: Variant


@dataclass(frozen=True)
class CalibrationResult:
    f_star: float | None
    success: bool
    target_coverage: float
    granularity: float
    trace: tuple[dict, ...]  # per grid point: f, coverage, mciw, mab
    report: CrossValReport | None


@dataclass
class _EnsembleState:
    """Period-sliced, decomposed, f-independent quantities shared by every
    truth round and every f-grid point."""

    model_ids: tuple[str, ...]
    cal_raw: np.ndarray
    trends: EnsembleTrends
    anomalies: list[np.ndarray]
    summaries: VariabilitySummaries
    trend_pool: DiscrepancyPool
    var_pool: VarErrorPool
    fut_trends: np.ndarray
    fut_anoms: np.ndarray
    ref_means: np.ndarray
    true_deltas: np.ndarray
    bias_scales_wo: np.ndarray  # bias scale with model i excluded
    bias_scale_full: float
    truth_seeds: list[tuple]  # (trend, var, proj) seed sequences per truth
    obs_raw: np.ndarray | None = None
    obs_anoms: np.ndarray | None = None
    obs_true_delta: float | None = None


def _prepare(dataset: EnsembleDataset, config: ExperimentConfig) -> _EnsembleState:
    config = config.resolve(dataset)
    k = dataset.k
    cal_raw = []
    trends = []
    anoms = []
    fut_trends = []
    fut_anoms = []
    ref_means = np.empty(k)
    true_deltas = np.empty(k)
    for i, model in enumerate(dataset.models):
        cal = model.calibration.slice_period(config.calibration_period)
        trend = fit_trend(cal, config.smoother)
        dec = split_anomalies(cal, trend, config.mode)
        cal_raw.append(cal.values)
        trends.append(trend)
        anoms.append(dec.anomalies)
        proj = model.projection.slice_period(config.projection_period)
        ftrend = fit_trend(proj, config.projection_smoother)
        fut_trends.append(ftrend)
        fut_anoms.append(proj.values - ftrend)
        ref = model.calibration.slice_period(config.projection_reference_period)
        ref_means[i] = ref.values.mean()
        true_deltas[i] = proj.values.mean() - ref_means[i]
    ids = dataset.model_ids
    ensemble_trends = EnsembleTrends(model_ids=ids, trends=np.array(trends))
    summaries = summarize_variability(anoms, list(ids))
    trend_pool = build_discrepancy_pool(ensemble_trends)
    var_pool = build_var_error_pool(summaries, next_closest_var(summaries, anoms))
    fut_trends = np.array(fut_trends)
    bias_wo = np.empty(k)
    if k >= 3:
        keep_sets = [np.delete(np.arange(k), i) for i in range(k)]
        for i, keep in enumerate(keep_sets):
            bias_wo[i] = future_bias_scale(fut_trends[keep])
    else:
        bias_wo[:] = 0.0
    root = np.random.SeedSequence(config.rng_seed)
    truth_seeds = [tuple(child.spawn(3)) for child in root.spawn(k + 1)]
    return _EnsembleState(
        model_ids=ids,
        cal_raw=np.array(cal_raw),
        trends=ensemble_trends,
        anomalies=anoms,
        summaries=summaries,
        trend_pool=trend_pool,
        var_pool=var_pool,
        fut_trends=fut_trends,
        fut_anoms=np.array(fut_anoms),
        ref_means=ref_means,
        true_deltas=true_deltas,
        bias_scales_wo=bias_wo,
        bias_scale_full=future_bias_scale(fut_trends),
        truth_seeds=truth_seeds,
    )


def _log_weights(
    state: _EnsembleState,
    config: ExperimentConfig,
    f: float,
    observed_raw: np.ndarray,
    observed_anoms: np.ndarray,
    seeds: tuple,
) -> np.ndarray:
    """Unnormalized combined log weights over the full ensemble."""
    lw = trend_log_marginals(
        state.trends,
        observed_raw,
        state.trend_pool,
        f,
        TrendPrior(),
        config.trend_mc,
        seeds[0],
    )
    if config.method is Method.TREND_VAR:
        lw = lw + var_log_marginals(
            state.summaries,
            state.var_pool,
            observed_anoms,
            f,
            ClippingRule(),
            config.var_mc,
            seeds[1],
        )
    return lw


def _project(
    state: _EnsembleState,
    config: ExperimentConfig,
    f: float,
    keep: np.ndarray,
    log_weights: np.ndarray,
    bias_scale: float,
    proj_seed,
):
    weights = normalize_log_weights(log_weights[keep])
    inputs = ProjectionInputs(
        model_ids=tuple(state.model_ids[i] for i in keep),
        future_trends=state.fut_trends[keep],
        future_anomalies=state.fut_anoms[keep],
        reference_means=state.ref_means[keep],
        weights=weights,
        bias_scale=bias_scale,
        f=f,
        variant=config.variant,
        n_draws=config.proj_draws,
    )
    return sample_projection(inputs, proj_seed)


def _evaluate(
    state: _EnsembleState, config: ExperimentConfig, f: float
) -> CrossValReport:
    k = len(state.model_ids)
    records = []
    if config.obs_truth:
        rounds = [(None, state.obs_raw, state.obs_anoms)]
    else:
        rounds = [(i, state.cal_raw[i], state.anomalies[i]) for i in range(k)]
    for truth, observed_raw, observed_anoms in rounds:
        if truth is None:
            seeds = state.truth_seeds[k]
            keep = np.arange(k)
            true_delta = state.obs_true_delta
            bias_scale = state.bias_scale_full
            truth_id = "observations"
        else:
            seeds = state.truth_seeds[truth]
            keep = np.delete(np.arange(k), truth)
            true_delta = float(state.true_deltas[truth])
            bias_scale = float(state.bias_scales_wo[truth])
            truth_id = state.model_ids[truth]
        try:
            log_w = _log_weights(state, config, f, observed_raw, observed_anoms, seeds)
            full_weights = normalize_log_weights(log_w).weights
            result = _project(state, config, f, keep, log_w, bias_scale, seeds[2])
        except DegeneracyError as exc:
            raise DegeneracyError(
                f"truth round {truth_id!r} at f={f}: {exc}"
            ) from exc
        records.append(
            TruthRecord(
                truth_id=truth_id,
                true_delta=true_delta,
                ci90=result.ci90,
                mean=result.mean,
                median=result.median,
                mode=result.mode,
                weights=full_weights,
            )
        )
    inside = [r.ci90[0] <= r.true_delta <= r.ci90[1] for r in records]
    widths = [r.ci90[1] - r.ci90[0] for r in records]
    biases = [abs(r.mean - r.true_delta) for r in records]
    return CrossValReport(
        model_ids=state.model_ids,
        records=tuple(records),
        coverage=float(np.mean(inside)),
        mciw=float(np.mean(widths)),
        mab=float(np.mean(biases)),
        f=f,
        method=config.method,
        variant=config.variant,
    )


def _prepare_obs(state: _EnsembleState, dataset: EnsembleDataset, config) -> None:
    if dataset.observations is None or dataset.observations_projection is None:
        raise InputError(
            "observational-truth cross-validation needs both observations_file "
            "and observations_projection_file in the dataset"
        )
    config = config.resolve(dataset)
    obs_cal = dataset.observations.slice_period(config.calibration_period)
    obs_trend = fit_trend(obs_cal, config.smoother)
    obs_dec = split_anomalies(obs_cal, obs_trend, config.mode)
    obs_ref = dataset.observations.slice_period(config.projection_reference_period)
    obs_proj = dataset.observations_projection.slice_period(config.projection_period)
    state.obs_raw = obs_cal.values
    state.obs_anoms = obs_dec.anomalies
    state.obs_true_delta = float(obs_proj.values.mean() - obs_ref.values.mean())


def run_loocv(dataset: EnsembleDataset, config: ExperimentConfig) -> CrossValReport:
    """Cross-validate at the configured f.

    With ``obs_truth`` the single round uses real observations as truth and
    no model is excluded; otherwise each model is the truth once and is
    excluded from its own projection mixture.
    """
    if not config.obs_truth and dataset.k < 3:
        raise InputError(f"cross-validation needs at least 3 models, got {dataset.k}")
    state = _prepare(dataset, config)
    if config.obs_truth:
        _prepare_obs(state, dataset, config)
    return _evaluate(state, config, config.f)


def calibrate_f(
    dataset: EnsembleDataset,
    config: ExperimentConfig,
    target_coverage: float = 0.90,
    f_grid=None,
) -> CalibrationResult:
    """Search the f grid for approximately correct credible-interval coverage.

    Eligible grid points reach coverage >= target - 1/k (coverage is
    quantized in steps of 1/k). Among them the rule prefers the largest
    coverage not exceeding target + 1/k and returns the smallest f that
    attains it; if every eligible coverage overshoots, the smallest
    eligible f wins. No eligible point means a failure result, not an
    exception. The trace carries every grid point evaluated.
    """
    grid = np.asarray(DEFAULT_F_GRID if f_grid is None else f_grid, dtype=np.float64)
    if grid.size < 3 or np.any(np.diff(grid) <= 0):
        raise InputError("f_grid must be increasing with at least 3 points")
    if not config.obs_truth and dataset.k < 3:
        raise InputError(f"cross-validation needs at least 3 models, got {dataset.k}")
    state = _prepare(dataset, config)
    if config.obs_truth:
        _prepare_obs(state, dataset, config)
    n_rounds = 1 if config.obs_truth else dataset.k
    granularity = 1.0 / n_rounds
    reports = [_evaluate(state, config, float(f)) for f in grid]
    trace = tuple(
        {"f": r.f, "coverage": r.coverage, "mciw": r.mciw, "mab": r.mab}
        for r in reports
    )
    eligible = [
        (f, r) for f, r in zip(grid, reports)
        if r.coverage >= target_coverage - granularity - 1e-12
    ]
    if not eligible:
        return CalibrationResult(
            f_star=None,
            success=False,
            target_coverage=target_coverage,
            granularity=granularity,
            trace=trace,
            report=None,
        )
    capped = [
        (f, r) for f, r in eligible
        if r.coverage <= target_coverage + granularity + 1e-12
    ]
    if capped:
        best_cov = max(r.coverage for _, r in capped)
        f_star, report = next(
            (f, r) for f, r in eligible if r.coverage >= best_cov - 1e-12
        )
    else:
        f_star, report = eligible[0]
    return CalibrationResult(
        f_star=float(f_star),
        success=True,
        target_coverage=target_coverage,
        granularity=granularity,
        trace=trace,
        report=report,
    )


@dataclass(frozen=True)
class SyntheticEnsembleSpec:
    """Recipe for a desk-scale synthetic ensemble with known ground truth.

    Trends are polynomials (coefficients drawn uniformly per degree from
    ``trend_coeff_ranges``) plus a calibration-zero/projection-one step
    whose amplitude makes each model's trend-based change match a target
    that is correlated with the model's innovation sd by ``coupling``.
    """

    k: int
    n_cal: int = 60
    n_proj: int = 40
    gap: int = 0
    trend_coeff_ranges: tuple[tuple[float, float], ...] = (
        (-1.0, 1.0),
        (-1.5, 1.5),
    )
    sigma_range: tuple[float, float] = (0.3, 2.0)
    rho_range: tuple[float, float] = (0.0, 0.8)
    coupling: float = 0.0
    change_base: float = 2.0
    change_scale: float = 1.5
    start_time: int = 0
    include_observations: bool = False
    rng_seed: int = 0

    def __post_init__(self):
        if self.k < 3:
            raise InputError(f"k must be at least 3, got {self.k}")
        if not (-1.0 <= self.coupling <= 1.0):
            raise InputError(f"coupling must be in [-1, 1], got {self.coupling}")
        if self.n_cal < 8 or self.n_proj < 5:
            raise InputError("need n_cal >= 8 and n_proj >= 5")
        if self.gap < 0:
            raise InputError("gap must be nonnegative")
        lo, hi = self.sigma_range
        if not (hi > lo > 0.0):
            raise InputError(f"bad sigma range {self.sigma_range}")
        lo, hi = self.rho_range
        if not (1.0 > hi > lo > -1.0):
            raise InputError(f"bad rho range {self.rho_range}")


@dataclass(frozen=True)
class SyntheticEnsemble:
    """Generated dataset plus the generating ground truth, for scoring."""

    dataset: EnsembleDataset
    config: ExperimentConfig
    true_trends: np.ndarray
    true_sigmas: np.ndarray
    true_rhos: np.ndarray
    true_changes: np.ndarray


def generate_synthetic_ensemble(spec: SyntheticEnsembleSpec) -> SyntheticEnsemble:
    """Draw a synthetic ensemble; deterministic given the spec's seed."""
    from .ar1 import Ar1Params, ar1_simulate_batch
    from .dataset import ModelData

    rng = np.random.default_rng(spec.rng_seed)
    total = spec.n_cal + spec.gap + spec.n_proj
    times = spec.start_time + np.arange(total, dtype=np.int64)
    cal_sl = slice(0, spec.n_cal)
    proj_sl = slice(spec.n_cal + spec.gap, total)
    cal_period = (int(times[cal_sl][0]), int(times[cal_sl][-1]))
    proj_period = (int(times[proj_sl][0]), int(times[proj_sl][-1]))
    u = np.arange(total) / (spec.n_cal - 1)
    step = np.zeros(total)
    step[proj_sl] = 1.0
    sig_lo, sig_hi = spec.sigma_range
    sig_mu = 0.5 * (sig_lo + sig_hi)
    sig_sd = (sig_hi - sig_lo) / np.sqrt(12.0)
    couple = spec.coupling
    resid_scale = np.sqrt(1.0 - couple * couple)

    def draw_member():
        coeffs = np.array(
            [rng.uniform(lo, hi) for lo, hi in spec.trend_coeff_ranges]
        )
        sigma = rng.uniform(sig_lo, sig_hi)
        rho = rng.uniform(*spec.rho_range)
        w = rng.standard_normal()
        z = (sigma - sig_mu) / sig_sd
        change = spec.change_base + spec.change_scale * (
            couple * z + resid_scale * w
        )
        poly = np.polynomial.polynomial.polyval(u, coeffs)
        drift = poly[proj_sl].mean() - poly[cal_sl].mean()
        trend = poly + (change - drift) * step
        noise = ar1_simulate_batch(Ar1Params(sigma, rho), total, 1, rng)[0]
        return trend, sigma, rho, change, trend + noise

    models = []
    true_trends = np.empty((spec.k, total))
    sigmas = np.empty(spec.k)
    rhos = np.empty(spec.k)
    changes = np.empty(spec.k)
    for j in range(spec.k):
        trend, sigma, rho, change, raw = draw_member()
        true_trends[j] = trend
        sigmas[j], rhos[j], changes[j] = sigma, rho, change
        models.append(
            ModelData(
                id=f"model_{j:02d}",
                calibration=TimeSeries(times[cal_sl], raw[cal_sl]),
                projection=TimeSeries(times[proj_sl], raw[proj_sl]),
            )
        )
    obs = None
    obs_proj = None
    if spec.include_observations:
        _, _, _, _, raw = draw_member()
        obs = TimeSeries(times[cal_sl], raw[cal_sl])
        obs_proj = TimeSeries(times[proj_sl], raw[proj_sl])
    dataset = EnsembleDataset(
        name=f"synthetic_k{spec.k}_seed{spec.rng_seed}",
        units="",
        models=tuple(models),
        calibration_period=cal_period,
        projection_reference_period=cal_period,
        projection_period=proj_period,
        observations=obs,
        observations_projection=obs_proj,
    )
    config = ExperimentConfig(
        calibration_period=cal_period,
        projection_reference_period=cal_period,
        projection_period=proj_period,
        rng_seed=spec.rng_seed,
    )
    return SyntheticEnsemble(
        dataset=dataset,
        config=config,
        true_trends=true_trends,
        true_sigmas=sigmas,
        true_rhos=rhos,
        true_changes=changes,
    )
