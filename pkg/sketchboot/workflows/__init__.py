"""Workflow helpers that orchestrate multi-step sketching tasks."""

from .adaptive import AdaptiveResult, run_adaptive_workflow
from .experiment import (
    CurvePoint,
    ErrorCurves,
    ExperimentConfig,
    build_matrix,
    coverage_rate,
    ground_truth_quantiles,
    run_experiment,
)

__all__ = [
    "AdaptiveResult",
    "CurvePoint",
    "ErrorCurves",
    "ExperimentConfig",
    "build_matrix",
    "coverage_rate",
    "ground_truth_quantiles",
    "run_adaptive_workflow",
    "run_experiment",
]
