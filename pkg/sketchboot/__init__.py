"""Sketch-and-solve SVD with bootstrap estimates of the sketching error."""

from .bootstrap import (
    BootstrapConfig,
    QuantileEstimate,
    bootstrap_errors,
    extrapolate,
    extrapolate_curve,
    required_sketch_size,
)
from .linalg import DenseMatrix, SvdResult, empirical_quantile, normalize_or_zero, partial_svd, sine_distance
from .sketchers import Sketch, SketchKind, SketchSpec, gaussian_sketch, row_sampling_sketch
from .solve import SketchedSvd, sketched_svd, sketched_svd_from_sketch
from .version import __version__

__all__ = [
    'BootstrapConfig',
    'DenseMatrix',
    'QuantileEstimate',
    'Sketch',
    'SketchKind',
    'SketchSpec',
    'SketchedSvd',
    'SvdResult',
    '__version__',
    'bootstrap_errors',
    'empirical_quantile',
    'extrapolate',
    'extrapolate_curve',
    'gaussian_sketch',
    'normalize_or_zero',
    'partial_svd',
    'required_sketch_size',
    'row_sampling_sketch',
    'sine_distance',
    'sketched_svd',
    'sketched_svd_from_sketch',
]
