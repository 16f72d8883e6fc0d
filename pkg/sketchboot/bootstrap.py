"""Bootstrap estimation of sketching-error quantiles, and the 1/sqrt(t)
extrapolation rule.

The bootstrap only ever touches the sketch Ã and quantities derived from
it: it makes no pass over the full matrix A.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence, Tuple

import numpy as np
from joblib import Parallel, delayed

from . import rng, settings
from .exceptions import ConfigError, DimensionError, NumericalError, ReplicateFailure
from .linalg import (
    column_sine_distances,
    empirical_quantile,
    normalize_columns,
    numerical_rank,
    truncated_svd,
)
from .sketchers import Sketch
from .solve import SketchedSvd

logger = logging.getLogger(__name__)

FAMILIES = ('u', 'sigma', 'v')


class ErrorMetric(str, enum.Enum):
    SINE_DISTANCE = 'sine'


def normalize_index_set(index_set) -> Tuple[int, ...]:
    try:
        indices = tuple(sorted({int(j) for j in index_set}))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f'invalid index set {index_set!r}') from exc
    if not indices:
        raise ConfigError('index set must not be empty')
    if indices[0] < 1:
        raise ConfigError(f'index set entries are 1-based, got {indices[0]}')
    return indices


@dataclass(frozen=True)
class BootstrapConfig:
    B: int = settings.BOOTSTRAP_SAMPLES
    alpha: float = settings.ALPHA
    index_set: Tuple[int, ...] = settings.INDEX_SET
    metric: ErrorMetric = ErrorMetric.SINE_DISTANCE
    seed: int = 0

    def __post_init__(self):
        if int(self.B) < 1:
            raise ConfigError(f'B must be at least 1, got {self.B}')
        if not 0.0 < float(self.alpha) < 1.0:
            raise ConfigError(f'alpha must lie in (0, 1), got {self.alpha}')
        try:
            metric = ErrorMetric(self.metric)
        except ValueError as exc:
            raise ConfigError(f'unknown error metric {self.metric!r}') from exc
        object.__setattr__(self, 'B', int(self.B))
        object.__setattr__(self, 'alpha', float(self.alpha))
        object.__setattr__(self, 'index_set', normalize_index_set(self.index_set))
        object.__setattr__(self, 'metric', metric)

    @property
    def level(self):
        return 1.0 - self.alpha

    def check_rank(self, k):
        if self.index_set[-1] > k:
            raise ConfigError(
                f'index set {self.index_set} reaches beyond k={k}'
            )


@dataclass(frozen=True, eq=False)
class ReplicateErrors:
    """Bootstrap samples ε*_{U,b}, ε*_{Σ,b}, ε*_{V,b} for b = 1..B."""

    u: np.ndarray
    sigma: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        for family in FAMILIES:
            values = np.array(getattr(self, family), dtype=np.float64).ravel()
            values.flags.writeable = False
            object.__setattr__(self, family, values)
        if not len(self.u) == len(self.sigma) == len(self.v):
            raise DimensionError('replicate arrays must have equal length')

    def __len__(self):
        return len(self.u)

    def family(self, name):
        return getattr(self, name)


class ExtrapolatedPoint(NamedTuple):
    t: int
    q_u: float
    q_sigma: float
    q_v: float


@dataclass(frozen=True, eq=False)
class QuantileEstimate:
    q_u: float
    q_sigma: float
    q_v: float
    t0: int
    alpha: float
    B: int
    replicates: ReplicateErrors
    index_set: Tuple[int, ...] = settings.INDEX_SET
    rank_deficient: bool = False

    @classmethod
    def from_replicates(cls, replicates, t0, alpha, index_set, rank_deficient=False):
        level = 1.0 - alpha
        return cls(
            q_u=empirical_quantile(replicates.u, level),
            q_sigma=empirical_quantile(replicates.sigma, level),
            q_v=empirical_quantile(replicates.v, level),
            t0=t0,
            alpha=alpha,
            B=len(replicates),
            replicates=replicates,
            index_set=tuple(index_set),
            rank_deficient=rank_deficient,
        )

    def quantile(self, family):
        if family not in FAMILIES:
            raise ConfigError(f'unknown error family {family!r}')
        return getattr(self, f'q_{family}')

    def to_dict(self):
        return {
            'q_u': self.q_u,
            'q_sigma': self.q_sigma,
            'q_v': self.q_v,
            'alpha': self.alpha,
            'B': self.B,
            't0': self.t0,
            'index_set': list(self.index_set),
            'rank_deficient': self.rank_deficient,
            'replicates': [
                {'b': b, 'u': float(u), 'sigma': float(sigma), 'v': float(v)}
                for b, (u, sigma, v) in enumerate(
                    zip(self.replicates.u, self.replicates.sigma, self.replicates.v),
                    start=1,
                )
            ],
        }

    @classmethod
    def from_dict(cls, payload):
        """Rebuild an estimate and check its quantiles against its replicates."""
        try:
            rows = sorted(payload['replicates'], key=lambda row: row['b'])
            replicates = ReplicateErrors(
                u=[row['u'] for row in rows],
                sigma=[row['sigma'] for row in rows],
                v=[row['v'] for row in rows],
            )
            estimate = cls.from_replicates(
                replicates,
                t0=int(payload['t0']),
                alpha=float(payload['alpha']),
                index_set=payload.get('index_set', settings.INDEX_SET),
                rank_deficient=bool(payload.get('rank_deficient', False)),
            )
        except (KeyError, TypeError) as exc:
            raise ConfigError(f'malformed estimate record: {exc}') from exc

        for family in FAMILIES:
            stored = float(payload[f'q_{family}'])
            if stored != estimate.quantile(family):
                raise ConfigError(
                    f'q_{family}={stored!r} does not match its replicates '
                    f'({estimate.quantile(family)!r})'
                )
        return estimate


def _replicate(a_tilde, sigma_tilde, v_tilde, u_breve, columns, seed, b):
    t, k = a_tilde.shape[0], v_tilde.shape[1]
    generator = rng.stream(seed, rng.BOOTSTRAP, b)
    a_star = a_tilde[generator.integers(0, t, size=t)]

    try:
        _, sigma_star, v_star = truncated_svd(a_star, k, compute_left=False)
    except NumericalError as exc:
        raise ReplicateFailure(b, exc) from exc

    # all k columns are computed before restricting to the index set, so a
    # larger index set can only add terms to each maximum
    sigma_errors = np.abs(sigma_star - sigma_tilde)
    v_errors = column_sine_distances(v_star, v_tilde)
    # left vectors use the original Ã applied to the resampled right vectors
    u_star = normalize_columns(a_tilde @ v_star)
    u_errors = column_sine_distances(u_star, u_breve)

    return (
        float(u_errors[columns].max()),
        float(sigma_errors[columns].max()),
        float(v_errors[columns].max()),
        numerical_rank(sigma_star) < k,
    )


def bootstrap_errors(
    sketch: Sketch,
    sketched: SketchedSvd,
    config: BootstrapConfig,
    n_jobs: int = None,
) -> QuantileEstimate:
    """Estimate q_U(t), q_Σ(t), q_V(t) by resampling the rows of Ã.

    Replicate b draws its indices from the stream keyed by (seed, b), so the
    replicate arrays do not depend on ``n_jobs``.
    """
    a_tilde = sketch.a_tilde.values
    v_tilde = sketched.right_vectors
    if sketched.t != sketch.t or v_tilde.shape[0] != sketch.d:
        raise DimensionError('sketched svd does not derive from this sketch')
    config.check_rank(sketched.k)

    sigma_tilde = np.asarray(sketched.singular_values)
    u_breve = normalize_columns(a_tilde @ v_tilde)
    columns = np.asarray(config.index_set, dtype=np.intp) - 1

    n_jobs = n_jobs or settings.N_JOBS
    logger.info('bootstrap: B=%d t=%d k=%d jobs=%d', config.B, sketch.t, sketched.k, n_jobs)
    results = Parallel(n_jobs=n_jobs, prefer=settings.JOBLIB_PREFER)(
        delayed(_replicate)(a_tilde, sigma_tilde, v_tilde, u_breve, columns, config.seed, b)
        for b in range(1, config.B + 1)
    )

    u, sigma, v, deficient = zip(*results)
    rank_deficient = any(deficient)
    if rank_deficient:
        logger.warning(
            'bootstrap: %d of %d resampled sketches had numerical rank below k=%d',
            sum(deficient), config.B, sketched.k,
        )

    return QuantileEstimate.from_replicates(
        ReplicateErrors(u=u, sigma=sigma, v=v),
        t0=sketch.t,
        alpha=config.alpha,
        index_set=config.index_set,
        rank_deficient=rank_deficient,
    )


def extrapolate(estimate: QuantileEstimate, t1: int) -> ExtrapolatedPoint:
    """q_ext(t1) = sqrt(t0 / t1) * q(t0) for each family."""
    if int(t1) < 1:
        raise ConfigError(f't1 must be at least 1, got {t1}')
    factor = math.sqrt(estimate.t0 / int(t1))
    return ExtrapolatedPoint(
        int(t1),
        estimate.q_u * factor,
        estimate.q_sigma * factor,
        estimate.q_v * factor,
    )


def extrapolate_curve(estimate: QuantileEstimate, t_grid: Sequence[int]):
    grid = [int(t) for t in t_grid]
    if not grid:
        raise ConfigError('extrapolation grid is empty')
    if any(later <= earlier for earlier, later in zip(grid, grid[1:])):
        raise ConfigError('extrapolation grid must be strictly ascending')
    return [extrapolate(estimate, t) for t in grid]


def required_sketch_size(estimate: QuantileEstimate, tolerance: float, family='u') -> int:
    """Smallest t1 whose extrapolated quantile is within ``tolerance``."""
    if tolerance <= 0:
        raise ConfigError(f'tolerance must be positive, got {tolerance}')
    q = estimate.quantile(family)
    if q <= tolerance:
        return estimate.t0

    t1 = math.ceil(estimate.t0 * (q / tolerance) ** 2)
    while q * math.sqrt(estimate.t0 / t1) > tolerance:
        t1 += 1
    while t1 > estimate.t0 and q * math.sqrt(estimate.t0 / (t1 - 1)) <= tolerance:
        t1 -= 1
    return t1
