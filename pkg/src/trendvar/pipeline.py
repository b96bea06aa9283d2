"""Real-observation workflows tying the modules together.

These drive the same machinery as the cross-validation loop but condition
on actual observations: weight the ensemble, project the weighted change,
and run the adequacy diagnostics.
"""

from __future__ import annotations

import numpy as np

from .crossval import ExperimentConfig, Method, _prepare
from .dataset import EnsembleDataset
from .decompose import fit_trend, split_anomalies
from .diagnostics import independence_diagnostic, spectrum_envelope_check
from .errors import InputError
from .model_weights import WeightVector, normalize_log_weights
from .project import ProjectionInputs, ProjectionResult, sample_projection
from .reports import DiagnosticsReport, WeightsReport
from .trend_weight import TrendPrior, trend_log_marginals
from .var_weight import ClippingRule, var_log_marginals


def _observed_components(dataset: EnsembleDataset, config: ExperimentConfig):
    if dataset.observations is None:
        raise InputError(
            "this command needs an observations_file in the dataset manifest"
        )
    config = config.resolve(dataset)
    obs = dataset.observations.slice_period(config.calibration_period)
    trend = fit_trend(obs, config.smoother)
    dec = split_anomalies(obs, trend, config.mode)
    return obs.values, dec.anomalies


def compute_weights(
    dataset: EnsembleDataset, config: ExperimentConfig
) -> WeightsReport:
    """Weight every model against the dataset's observations."""
    state = _prepare(dataset, config)
    obs_raw, obs_anoms = _observed_components(dataset, config)
    seeds = state.truth_seeds[dataset.k]
    t_marg = trend_log_marginals(
        state.trends,
        obs_raw,
        state.trend_pool,
        config.f,
        TrendPrior(),
        config.trend_mc,
        seeds[0],
    )
    v_marg = var_log_marginals(
        state.summaries,
        state.var_pool,
        obs_anoms,
        config.f,
        ClippingRule(),
        config.var_mc,
        seeds[1],
    )
    trend_w = normalize_log_weights(t_marg).weights
    var_w = normalize_log_weights(v_marg).weights
    if config.method is Method.TREND_VAR:
        combined = normalize_log_weights(t_marg + v_marg).weights
    else:
        combined = trend_w.copy()
    return WeightsReport(
        model_ids=dataset.model_ids,
        trend_weights=trend_w,
        var_weights=var_w,
        combined_weights=combined,
        f=config.f,
        method=config.method.value,
    )


def project_ensemble(
    dataset: EnsembleDataset, config: ExperimentConfig
) -> tuple[WeightsReport, ProjectionResult]:
    """Weighted probabilistic projection conditioned on observations."""
    state = _prepare(dataset, config)
    weights = compute_weights(dataset, config)
    inputs = ProjectionInputs(
        model_ids=dataset.model_ids,
        future_trends=state.fut_trends,
        future_anomalies=state.fut_anoms,
        reference_means=state.ref_means,
        weights=WeightVector(weights.combined_weights),
        bias_scale=state.bias_scale_full,
        f=config.f,
        variant=config.variant,
        n_draws=config.proj_draws,
    )
    result = sample_projection(inputs, state.truth_seeds[dataset.k][2])
    return weights, result


def run_diagnostics(
    dataset: EnsembleDataset, config: ExperimentConfig
) -> DiagnosticsReport:
    """Independence of trend weights from variability summaries (over the
    pseudo-truth rounds) plus per-model spectral adequacy checks."""
    state = _prepare(dataset, config)
    k = dataset.k
    rows = np.empty((k, k))
    for truth in range(k):
        marg = trend_log_marginals(
            state.trends,
            state.cal_raw[truth],
            state.trend_pool,
            config.f,
            TrendPrior(),
            config.trend_mc,
            state.truth_seeds[truth][0],
        )
        rows[truth] = normalize_log_weights(marg).weights
    independence = independence_diagnostic(rows, state.summaries)
    envelopes = tuple(
        spectrum_envelope_check(
            state.anomalies[i], rng_seed=state.truth_seeds[i][2]
        )
        for i in range(k)
    )
    return DiagnosticsReport(
        model_ids=dataset.model_ids,
        independence=independence,
        envelopes=envelopes,
    )
