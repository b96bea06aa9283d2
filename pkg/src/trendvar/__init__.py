"""Weight dynamical-model ensembles by trend and AR(1) variability skill,
combine the weights, and make calibrated probabilistic projections."""

from ._version import __version__
from .ar1 import (
    Ar1Params,
    ar1_conditional_loglik,
    ar1_mle,
    ar1_simulate,
    periodogram,
)
from .crossval import (
    CalibrationResult,
    CrossValReport,
    ExperimentConfig,
    Method,
    SyntheticEnsemble,
    SyntheticEnsembleSpec,
    TruthRecord,
    calibrate_f,
    generate_synthetic_ensemble,
    run_loocv,
)
from .dataset import EnsembleDataset, ModelData, load_dataset, write_dataset
from .decompose import (
    Decomposition,
    Mode,
    SmootherKind,
    SmootherSpec,
    decompose,
    fit_trend,
    lowess,
    split_anomalies,
    theil_sen,
)
from .diagnostics import (
    EnvelopeReport,
    IndependenceReport,
    independence_diagnostic,
    spectrum_envelope_check,
)
from .errors import DegeneracyError, InputError, TrendvarError
from .model_weights import (
    WeightVector,
    combine_weights,
    log_mean_exp,
    normalize_log_weights,
    trend_only_weights,
)
from .pipeline import compute_weights, project_ensemble, run_diagnostics
from .presets import PRESET_NAMES, preset
from .project import (
    ProjectionInputs,
    ProjectionResult,
    Variant,
    density_grid,
    future_bias_scale,
    sample_projection,
    summarize,
)
from .reports import (
    DiagnosticsReport,
    RunManifest,
    WeightsReport,
    emit_report,
    load_report,
)
from .series import TimeSeries
from .trend_weight import (
    DiscrepancyPool,
    EnsembleTrends,
    TrendPrior,
    build_discrepancy_pool,
    trend_log_marginals,
    trend_weights,
)
from .var_weight import (
    ClippingRule,
    VarErrorPool,
    VariabilitySummaries,
    build_var_error_pool,
    next_closest_var,
    summarize_variability,
    var_log_marginals,
    var_weights,
)

__all__ = [
    "__version__",
    "Ar1Params",
    "CalibrationResult",
    "ClippingRule",
    "CrossValReport",
    "Decomposition",
    "DegeneracyError",
    "DiagnosticsReport",
    "DiscrepancyPool",
    "EnsembleDataset",
    "EnsembleTrends",
    "EnvelopeReport",
    "ExperimentConfig",
    "IndependenceReport",
    "InputError",
    "Method",
    "Mode",
    "ModelData",
    "PRESET_NAMES",
    "ProjectionInputs",
    "ProjectionResult",
    "RunManifest",
    "SmootherKind",
    "SmootherSpec",
    "SyntheticEnsemble",
    "SyntheticEnsembleSpec",
    "TimeSeries",
    "TrendPrior",
    "TrendvarError",
    "TruthRecord",
    "VarErrorPool",
    "VariabilitySummaries",
    "Variant",
    "WeightVector",
    "WeightsReport",
    "ar1_conditional_loglik",
    "ar1_mle",
    "ar1_simulate",
    "build_discrepancy_pool",
    "build_var_error_pool",
    "calibrate_f",
    "combine_weights",
    "compute_weights",
    "decompose",
    "density_grid",
    "emit_report",
    "fit_trend",
    "future_bias_scale",
    "generate_synthetic_ensemble",
    "independence_diagnostic",
    "load_dataset",
    "load_report",
    "log_mean_exp",
    "lowess",
    "next_closest_var",
    "normalize_log_weights",
    "periodogram",
    "preset",
    "project_ensemble",
    "run_diagnostics",
    "run_loocv",
    "sample_projection",
    "spectrum_envelope_check",
    "split_anomalies",
    "summarize",
    "summarize_variability",
    "theil_sen",
    "trend_log_marginals",
    "trend_only_weights",
    "trend_weights",
    "var_log_marginals",
    "var_weights",
    "write_dataset",
]
