"""Sketching operators: one sketcher class per kind of sketching matrix S."""

from .base import Sketch, SketchKind, SketchSpec, validate_probabilities
from .gaussian import GaussianSketcher, gaussian_sketch, gaussian_sketching_matrix
from .rowsample import (
    RowSamplingSketcher,
    row_sampling_sketch,
    squared_length_probabilities,
    uniform_probabilities,
)

SKETCHERS = {
    SketchKind.GAUSSIAN: GaussianSketcher,
    SketchKind.ROW_SAMPLING: RowSamplingSketcher,
}


def sketch_matrix(source, spec: SketchSpec, **kwargs) -> Sketch:
    """Build Ã = SA for ``spec`` by dispatching on ``spec.kind``."""
    return SKETCHERS[spec.kind].from_spec(spec, **kwargs).sketch(source)


__all__ = [
    'GaussianSketcher',
    'RowSamplingSketcher',
    'SKETCHERS',
    'Sketch',
    'SketchKind',
    'SketchSpec',
    'gaussian_sketch',
    'gaussian_sketching_matrix',
    'row_sampling_sketch',
    'sketch_matrix',
    'squared_length_probabilities',
    'uniform_probabilities',
    'validate_probabilities',
]
