"""Geodesic-flow global optimization on conformally flat metrics."""

from .benchmarks import BenchmarkSpec, evaluate, fd_gradient, get, gradient, make_objective, suite
from .geo import GeoConfig, GeoResult, TraceRow, jump_direction, locality_indicator, resample_out_of_bounds, run_geo
from .geodesic import (
    GeodesicState,
    MetricDegeneracyError,
    NonFiniteStepError,
    advance,
    christoffel_oracle,
    critical_step,
    curvature_term,
    quadratic_step,
)
from .harness import (
    ExperimentConfig,
    TrialRecord,
    emit_results,
    emit_trace,
    load_records,
    run_experiment,
    success,
)
from .objective import ObjectiveHandle
from .quasinewton import QnResult, QnSettings, maximize_local
from .sgeo import (
    SgeoConfig,
    SgeoResult,
    default_config,
    next_start,
    oscillation_check,
    run_sgeo,
    stopping_threshold,
)

__version__ = "0.1.0"

__all__ = [
    "BenchmarkSpec",
    "ExperimentConfig",
    "GeoConfig",
    "GeoResult",
    "GeodesicState",
    "MetricDegeneracyError",
    "NonFiniteStepError",
    "ObjectiveHandle",
    "QnResult",
    "QnSettings",
    "SgeoConfig",
    "SgeoResult",
    "TraceRow",
    "TrialRecord",
    "advance",
    "christoffel_oracle",
    "critical_step",
    "curvature_term",
    "default_config",
    "emit_results",
    "emit_trace",
    "evaluate",
    "fd_gradient",
    "get",
    "gradient",
    "jump_direction",
    "load_records",
    "locality_indicator",
    "make_objective",
    "maximize_local",
    "next_start",
    "oscillation_check",
    "quadratic_step",
    "resample_out_of_bounds",
    "run_experiment",
    "run_geo",
    "run_sgeo",
    "stopping_threshold",
    "success",
    "suite",
]
