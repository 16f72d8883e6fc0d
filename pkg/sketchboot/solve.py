"""Sketch-and-solve SVD: the top-k SVD of Ã, lifted back through A."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional

from .exceptions import DimensionError
from .linalg import DenseMatrix, SvdResult, normalize_columns, partial_svd
from .sketchers import Sketch, SketchSpec, sketch_matrix
from .streams import as_row_stream

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class SketchedSvd:
    svd: SvdResult
    t: int
    spec: Optional[SketchSpec] = None

    @property
    def k(self):
        return self.svd.k

    @property
    def singular_values(self):
        return self.svd.singular_values

    @property
    def right_vectors(self):
        return self.svd.right_vectors.values

    @property
    def left_vectors(self):
        if self.svd.left_vectors is None:
            return None
        return self.svd.left_vectors.values


def sketched_svd_from_sketch(sketch: Sketch, k: int, source=None) -> SketchedSvd:
    """Top-k (σ̃, ṽ) of Ã; ũ_j = normalize(A ṽ_j) when A is given.

    σ̃ and ṽ depend on Ã only. Lifting the left vectors costs exactly one
    pass over A.
    """
    if not 1 <= k <= min(sketch.t, sketch.d):
        raise DimensionError(
            f'k={k} out of range for a sketch of shape {sketch.t}x{sketch.d}'
        )

    svd = partial_svd(sketch.a_tilde, k, compute_left=False)

    if source is not None:
        stream = as_row_stream(source)
        if stream.cols != sketch.d:
            raise DimensionError(
                f'A has {stream.cols} columns but the sketch has {sketch.d}'
            )
        u_breve = stream.multiply(svd.right_vectors.values)
        svd = SvdResult(svd.singular_values, svd.right_vectors,
                        DenseMatrix(normalize_columns(u_breve)))

    return SketchedSvd(svd, sketch.t, sketch.spec)


def solve_with_sketch(source, spec: SketchSpec, k: int, **kwargs):
    """Sketch A per ``spec`` and solve. Returns (sketch, sketched svd); the
    bootstrap needs the sketch."""
    stream = as_row_stream(source)
    if not 1 <= k <= min(spec.t, stream.cols):
        raise DimensionError(
            f'k={k} out of range for t={spec.t}, d={stream.cols}'
        )
    sketch = sketch_matrix(stream, spec, **kwargs)
    result = sketched_svd_from_sketch(sketch, k, stream)
    logger.debug('sketched svd t=%d k=%d after %d passes', spec.t, k, stream.passes)
    return sketch, result


def sketched_svd(source, spec: SketchSpec, k: int, **kwargs) -> SketchedSvd:
    """Sketch A per ``spec`` and solve; returns (ũ, σ̃, ṽ) for j = 1..k."""
    return solve_with_sketch(source, spec, k, **kwargs)[1]
