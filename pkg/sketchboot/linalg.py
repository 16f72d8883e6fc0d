"""Dense-matrix primitives: the SVD contract, sine distance, normalisation
and empirical quantiles."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import linalg as sla

from . import settings
from .exceptions import DimensionError, NonFiniteError, NumericalError

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class DenseMatrix:
    """Immutable row-major float64 matrix.

    ``values`` is stored C-contiguous and read-only, so a DenseMatrix can be
    shared between threads without copying.
    """

    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64, order='C', copy=True)
        if values.ndim == 1:
            values = values.reshape(1, -1)
        if values.ndim != 2:
            raise DimensionError(f'expected a 2-D matrix, got {values.ndim} dimensions')
        if not np.all(np.isfinite(values)):
            raise NonFiniteError('matrix contains NaN or Inf entries')
        values.flags.writeable = False
        object.__setattr__(self, 'values', values)

    @classmethod
    def from_flat(cls, rows, cols, data):
        data = np.asarray(data, dtype=np.float64).ravel()
        if data.size != rows * cols:
            raise DimensionError(
                f'data length {data.size} does not match shape {rows}x{cols}'
            )
        return cls(data.reshape(rows, cols))

    @property
    def rows(self):
        return self.values.shape[0]

    @property
    def cols(self):
        return self.values.shape[1]

    @property
    def shape(self):
        return self.values.shape

    @property
    def data(self):
        """Flat row-major view of the entries."""
        return self.values.ravel()

    @property
    def T(self):
        return DenseMatrix(self.values.T)

    def __repr__(self):
        return f'<DenseMatrix({self.rows}x{self.cols})>'


@dataclass(frozen=True, eq=False)
class SvdResult:
    """Top-k singular triplets. Left vectors are optional."""

    singular_values: np.ndarray
    right_vectors: DenseMatrix
    left_vectors: Optional[DenseMatrix] = None

    def __post_init__(self):
        values = np.asarray(self.singular_values, dtype=np.float64)
        if np.any(values < 0) or np.any(np.diff(values) > 0):
            raise NumericalError('singular values must be nonnegative and nonincreasing')
        values = values.copy()
        values.flags.writeable = False
        object.__setattr__(self, 'singular_values', values)

    @property
    def k(self):
        return self.singular_values.shape[0]


def truncated_svd(values, k, compute_left=True):
    """Thin SVD truncated to k with the deterministic sign convention."""
    try:
        u, s, vt = sla.svd(values, full_matrices=False, check_finite=False,
                           lapack_driver='gesdd')
    except (sla.LinAlgError, ValueError):
        logger.debug('gesdd did not converge, retrying with gesvd')
        try:
            u, s, vt = sla.svd(values, full_matrices=False, check_finite=False,
                               lapack_driver='gesvd')
        except (sla.LinAlgError, ValueError) as exc:
            raise NumericalError(f'SVD failed: {exc}') from exc

    s = s[:k].copy()
    v = vt[:k].T.copy()

    # largest-magnitude entry of each right vector is made positive
    pivots = np.argmax(np.abs(v), axis=0)
    signs = np.sign(v[pivots, np.arange(k)])
    signs[signs == 0] = 1.0
    v *= signs

    if not compute_left:
        return None, s, v

    u = u[:, :k] * signs
    u[:, s == 0] = 0.0
    return u, s, v


def partial_svd(matrix: DenseMatrix, k: int, compute_left: bool = True) -> SvdResult:
    """Top-k singular triplets of ``matrix`` to working precision.

    Repeated calls on the same input are bit-identical. Left vectors whose
    singular value is exactly zero are returned as zero columns.
    """
    if not isinstance(matrix, DenseMatrix):
        matrix = DenseMatrix(matrix)
    if not 1 <= k <= min(matrix.rows, matrix.cols):
        raise DimensionError(
            f'k={k} out of range for a {matrix.rows}x{matrix.cols} matrix'
        )

    u, s, v = truncated_svd(matrix.values, k, compute_left=compute_left)
    left = DenseMatrix(u) if u is not None else None
    return SvdResult(s, DenseMatrix(v), left)


def _check_unit_or_zero(vector):
    norm = np.linalg.norm(vector)
    if norm != 0 and abs(norm - 1.0) > settings.UNIT_NORM_TOLERANCE:
        raise ValueError(f'expected a unit or zero vector, got norm {norm!r}')


def sine_distance(w, w_prime, check=True) -> float:
    """sqrt(1 - (w.w')^2); 1 when either argument is the zero vector."""
    w = np.asarray(w, dtype=np.float64)
    w_prime = np.asarray(w_prime, dtype=np.float64)
    if w.shape != w_prime.shape:
        raise DimensionError(f'dimension mismatch: {w.shape} vs {w_prime.shape}')
    if check:
        _check_unit_or_zero(w)
        _check_unit_or_zero(w_prime)

    if not w.any() or not w_prime.any():
        return 1.0

    # 1 - c^2 = (|w - w'|^2 / 2)(|w + w'|^2 / 2) for unit vectors; the
    # factored form has no cancellation near c = +-1 and is exactly 0 there
    diff = math.sqrt(float(np.dot(w - w_prime, w - w_prime)))
    total = math.sqrt(float(np.dot(w + w_prime, w + w_prime)))
    return min(1.0, 0.5 * diff * total)


def column_sine_distances(left, right):
    """Sine distance between matching columns of two d x k arrays."""
    left = np.asarray(left, dtype=np.float64)
    right = np.asarray(right, dtype=np.float64)
    if left.shape != right.shape:
        raise DimensionError(f'dimension mismatch: {left.shape} vs {right.shape}')

    diff = np.linalg.norm(left - right, axis=0)
    total = np.linalg.norm(left + right, axis=0)
    distances = np.minimum(1.0, 0.5 * diff * total)
    zero = ~left.any(axis=0) | ~right.any(axis=0)
    distances[zero] = 1.0
    return distances


def normalize_or_zero(x):
    """x / ||x||_2, or the zero vector when ||x||_2 is exactly zero."""
    x = np.asarray(x, dtype=np.float64)
    # BLAS nrm2 is scaled, so tiny vectors do not underflow to a zero norm
    norm = sla.norm(x)
    if norm > 0:
        return x / norm
    return np.zeros_like(x)


def normalize_columns(x):
    x = np.asarray(x, dtype=np.float64)
    out = np.zeros_like(x)
    scale = np.abs(x).max(axis=0) if x.size else np.zeros(x.shape[1])
    nonzero = scale > 0
    scaled = x[:, nonzero] / scale[nonzero]
    out[:, nonzero] = scaled / np.linalg.norm(scaled, axis=0)
    return out


def empirical_quantile(xs, level: float) -> float:
    """inf{q : F_B(q) >= level} for the empirical distribution of ``xs``.

    Evaluated exactly as the order statistic of smallest rank i with
    i / B >= level, so the result is always one of the observed values.
    """
    xs = np.asarray(xs, dtype=np.float64).ravel()
    if xs.size == 0:
        raise ValueError('empirical_quantile of an empty sample')
    if not np.all(np.isfinite(xs)):
        raise NonFiniteError('empirical_quantile input contains NaN or Inf')
    if not 0.0 < level < 1.0:
        raise ValueError(f'level must lie in (0, 1), got {level}')

    size = xs.size
    rank = max(1, min(size, math.ceil(level * size)))
    # level * size may land one ulp off an integer; settle on the definition
    while rank > 1 and (rank - 1) / size >= level:
        rank -= 1
    while rank < size and rank / size < level:
        rank += 1
    return float(np.sort(xs)[rank - 1])


def numerical_rank(singular_values, tolerance=None):
    tolerance = settings.RANK_TOLERANCE if tolerance is None else tolerance
    singular_values = np.asarray(singular_values, dtype=np.float64)
    if singular_values.size == 0 or singular_values[0] == 0:
        return 0
    return int(np.count_nonzero(singular_values > tolerance * singular_values[0]))


def orient_tall(matrix: DenseMatrix):
    """Return (matrix, False) when rows >= cols, else (transpose, True)."""
    if matrix.rows >= matrix.cols:
        return matrix, False
    return matrix.T, True
