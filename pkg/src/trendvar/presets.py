"""Bundled experiment presets over synthetic stand-in data.

Each preset mirrors one of six published cross-validation designs (ensemble
size, periods, smoother, anomaly normalization, projection variant, and a
starting expansion factor) so the full pipeline can be exercised
end-to-end without the original climate datasets. The synthetic spec
paired with each preset produces data of roughly matching scale; its
calibrated f is its own, the preset f is only a starting point.
"""

from __future__ import annotations

from dataclasses import replace

from .crossval import ExperimentConfig, Method, SyntheticEnsembleSpec
from .decompose import Mode, SmootherKind, SmootherSpec
from .errors import InputError
from .project import Variant

_THEIL_SEN = SmootherSpec(kind=SmootherKind.THEIL_SEN)
_LOWESS_08 = SmootherSpec(kind=SmootherKind.LOWESS, span=0.8, iterations=3)


def _entry(config: ExperimentConfig, spec: SyntheticEnsembleSpec):
    return config, spec


_PRESETS = {
    # 13-model overturning-circulation-like design: long calibration,
    # lowess calibration trend, mean-normalized variability, boot draws.
    "amoc_like": _entry(
        ExperimentConfig(
            calibration_period=(1880, 2004),
            projection_reference_period=(1960, 1999),
            projection_period=(2060, 2099),
            smoother=_LOWESS_08,
            projection_smoother=_THEIL_SEN,
            mode=Mode.RELATIVE,
            variant=Variant.BOOT,
            method=Method.TREND_VAR,
            f=1.5,
        ),
        SyntheticEnsembleSpec(
            k=13,
            n_cal=125,
            n_proj=40,
            gap=55,
            start_time=1880,
            trend_coeff_ranges=((15.0, 25.0), (-3.0, 0.0)),
            sigma_range=(0.2, 1.0),
            rho_range=(0.0, 0.7),
            coupling=0.5,
            change_base=-4.0,
            change_scale=2.0,
        ),
    ),
    # 29-model summer-maximum-temperature-like design, short calibration.
    "korea_temp_like": _entry(
        ExperimentConfig(
            calibration_period=(1973, 2005),
            projection_reference_period=(1973, 2005),
            projection_period=(2081, 2100),
            smoother=_THEIL_SEN,
            projection_smoother=_THEIL_SEN,
            mode=Mode.ABSOLUTE,
            variant=Variant.BOOT,
            method=Method.TREND_VAR,
            f=0.75,
        ),
        SyntheticEnsembleSpec(
            k=29,
            n_cal=33,
            n_proj=20,
            gap=75,
            start_time=1973,
            trend_coeff_ranges=((25.0, 32.0), (0.0, 2.0)),
            sigma_range=(0.3, 1.5),
            rho_range=(0.0, 0.5),
            coupling=0.6,
            change_base=5.0,
            change_scale=1.5,
        ),
    ),
    # Same design with the longer calibration period.
    "korea_temp_long_like": _entry(
        ExperimentConfig(
            calibration_period=(1950, 2005),
            projection_reference_period=(1950, 2005),
            projection_period=(2081, 2100),
            smoother=_THEIL_SEN,
            projection_smoother=_THEIL_SEN,
            mode=Mode.ABSOLUTE,
            variant=Variant.BOOT,
            method=Method.TREND_VAR,
            f=2.3,
        ),
        SyntheticEnsembleSpec(
            k=29,
            n_cal=56,
            n_proj=20,
            gap=75,
            start_time=1950,
            trend_coeff_ranges=((25.0, 32.0), (0.0, 2.0)),
            sigma_range=(0.3, 1.5),
            rho_range=(0.0, 0.5),
            coupling=0.6,
            change_base=5.0,
            change_scale=1.5,
        ),
    ),
    # 26-model winter-sea-surface-temperature-like design: autocorrelated
    # anomalies, AR(1) projection variant, higher sd tied to less warming.
    "winter_sst_like": _entry(
        ExperimentConfig(
            calibration_period=(1941, 2000),
            projection_reference_period=(1941, 2000),
            projection_period=(2061, 2100),
            smoother=_THEIL_SEN,
            projection_smoother=_THEIL_SEN,
            mode=Mode.ABSOLUTE,
            variant=Variant.AR1,
            method=Method.TREND_VAR,
            f=2.05,
        ),
        SyntheticEnsembleSpec(
            k=26,
            n_cal=60,
            n_proj=40,
            gap=60,
            start_time=1941,
            trend_coeff_ranges=((5.0, 15.0), (0.0, 2.0)),
            sigma_range=(0.3, 1.5),
            rho_range=(0.1, 0.8),
            coupling=-0.6,
            change_base=3.0,
            change_scale=1.0,
        ),
    ),
    # 13-model index-like design entirely inside the historical era.
    "amoc_index_like": _entry(
        ExperimentConfig(
            calibration_period=(1880, 1945),
            projection_reference_period=(1880, 1945),
            projection_period=(1965, 2004),
            smoother=_THEIL_SEN,
            projection_smoother=_THEIL_SEN,
            mode=Mode.ABSOLUTE,
            variant=Variant.AR1,
            method=Method.TREND_VAR,
            f=3.75,
        ),
        SyntheticEnsembleSpec(
            k=13,
            n_cal=66,
            n_proj=40,
            gap=19,
            start_time=1880,
            trend_coeff_ranges=((-0.5, 0.5), (-1.0, 0.0)),
            sigma_range=(0.05, 0.3),
            rho_range=(0.2, 0.8),
            coupling=0.3,
            change_base=-0.5,
            change_scale=0.3,
        ),
    ),
}

# Same design scored against (synthetic) observations instead of held-out
# models; no truth exclusion.
_cfg, _spec = _PRESETS["amoc_index_like"]
_PRESETS["amoc_index_obs_like"] = _entry(
    replace(_cfg, obs_truth=True),
    replace(_spec, include_observations=True),
)
del _cfg, _spec

PRESET_NAMES = tuple(sorted(_PRESETS))


def preset(name: str) -> tuple[ExperimentConfig, SyntheticEnsembleSpec]:
    """Config and synthetic-data spec for a named preset."""
    if name not in _PRESETS:
        raise InputError(
            f"unknown preset {name!r}; choose from {', '.join(PRESET_NAMES)}"
        )
    config, spec = _PRESETS[name]
    return config, spec
