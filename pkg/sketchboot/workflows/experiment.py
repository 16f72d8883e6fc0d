"""Monte-Carlo harness: true error quantiles from repeated sketching against
the exact SVD, next to the bootstrap estimates and their extrapolation."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Tuple

import numpy as np
from joblib import Parallel, delayed

from .. import rng, settings
from ..bootstrap import FAMILIES, BootstrapConfig, bootstrap_errors, normalize_index_set
from ..exceptions import ConfigError, DimensionError, ExactSvdTooLarge
from ..linalg import DenseMatrix, column_sine_distances, empirical_quantile, orient_tall, partial_svd
from ..matrixio import read_matrix
from ..sketchers import SketchKind, SketchSpec, squared_length_probabilities, uniform_probabilities
from ..solve import solve_with_sketch
from ..streams import RowStream
from ..synthetic import (
    DecayProfile,
    cyclic_rows_matrix,
    elliptical_rows_matrix,
    haar_factor_matrix,
)

logger = logging.getLogger(__name__)

MATRIX_SOURCES = ('haar', 'cyclic', 'elliptical', 'file')


@dataclass(frozen=True)
class ExperimentConfig:
    matrix: Mapping
    t_grid: Tuple[int, ...]
    k: int = 1
    trials: int = 300
    sketch_kind: SketchKind = SketchKind.ROW_SAMPLING
    probabilities: str = 'sqlen'
    index_set: Tuple[int, ...] = settings.INDEX_SET
    alpha: float = settings.ALPHA
    B: int = settings.BOOTSTRAP_SAMPLES
    t0: Optional[int] = None
    master_seed: int = 0
    n_jobs: int = settings.N_JOBS

    def __post_init__(self):
        grid = tuple(int(t) for t in self.t_grid)
        if not grid or grid[0] < 1:
            raise ConfigError('t_grid must hold positive sketch sizes')
        if any(later <= earlier for earlier, later in zip(grid, grid[1:])):
            raise ConfigError('t_grid must be strictly ascending')
        object.__setattr__(self, 't_grid', grid)

        t0 = grid[0] if self.t0 is None else int(self.t0)
        if t0 not in grid:
            raise ConfigError(f't0={t0} is not on the grid {grid}')
        object.__setattr__(self, 't0', t0)

        if int(self.trials) < 1:
            raise ConfigError(f'trials must be at least 1, got {self.trials}')
        if int(self.k) < 1:
            raise ConfigError(f'k must be at least 1, got {self.k}')
        try:
            kind = SketchKind(self.sketch_kind)
        except ValueError as exc:
            raise ConfigError(f'unknown sketch kind {self.sketch_kind!r}') from exc
        if self.probabilities not in ('sqlen', 'uniform'):
            raise ConfigError(f'unknown probability rule {self.probabilities!r}')
        if self.matrix.get('source') not in MATRIX_SOURCES:
            raise ConfigError(
                f'matrix source must be one of {MATRIX_SOURCES}, got {self.matrix.get("source")!r}'
            )

        object.__setattr__(self, 'trials', int(self.trials))
        object.__setattr__(self, 'k', int(self.k))
        object.__setattr__(self, 'sketch_kind', kind)
        object.__setattr__(self, 'index_set', normalize_index_set(self.index_set))
        object.__setattr__(self, 'n_jobs', int(self.n_jobs))
        # validates B and alpha
        self.bootstrap_config()
        if self.index_set[-1] > self.k:
            raise ConfigError(f'index set {self.index_set} reaches beyond k={self.k}')

    @classmethod
    def from_dict(cls, payload, base_dir=None):
        """Build a config from parsed JSON; missing keys fall back to settings.

        A ``file`` matrix path is resolved against ``base_dir``.
        """
        if not isinstance(payload, Mapping):
            raise ConfigError(f'experiment config must be a JSON object, got {type(payload).__name__}')
        payload = dict(payload)
        try:
            matrix = payload.pop('matrix')
            t_grid = payload.pop('t_grid')
        except KeyError as exc:
            raise ConfigError(f'experiment config is missing {exc}') from exc
        if not isinstance(matrix, Mapping):
            raise ConfigError(f'matrix must be a JSON object, got {type(matrix).__name__}')
        matrix = dict(matrix)
        if matrix.get('source') == 'file' and base_dir is not None and isinstance(matrix.get('path'), str):
            matrix['path'] = str(Path(base_dir) / matrix['path'])

        known = set(cls.__dataclass_fields__) - {'matrix', 't_grid'}
        unknown = set(payload) - known
        if unknown:
            raise ConfigError(f'unknown experiment config keys: {sorted(unknown)}')
        try:
            return cls(matrix=matrix, t_grid=tuple(t_grid), **payload)
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f'invalid experiment config: {exc}') from exc

    def to_dict(self):
        return {
            'matrix': dict(self.matrix),
            't_grid': list(self.t_grid),
            'k': self.k,
            'trials': self.trials,
            'sketch_kind': self.sketch_kind.value,
            'probabilities': self.probabilities,
            'index_set': list(self.index_set),
            'alpha': self.alpha,
            'B': self.B,
            't0': self.t0,
            'master_seed': self.master_seed,
            'n_jobs': self.n_jobs,
        }

    def bootstrap_config(self, seed=0):
        return BootstrapConfig(B=self.B, alpha=self.alpha, index_set=self.index_set, seed=seed)


def build_matrix(matrix_config: Mapping) -> DenseMatrix:
    """Generate or load the test matrix named by an experiment config."""
    # {'source': 'haar', 'n': 4096, 'd': 64, 'profile': {'kind': 'power_law', 'beta': 1}, 'seed': 7}
    source = matrix_config['source']
    try:
        if source == 'haar':
            return haar_factor_matrix(
                int(matrix_config['n']),
                int(matrix_config['d']),
                DecayProfile.from_dict(matrix_config['profile']),
                int(matrix_config.get('seed', 0)),
            )
        if source == 'cyclic':
            return cyclic_rows_matrix(int(matrix_config['n']), matrix_config['g'])
        if source == 'elliptical':
            return elliptical_rows_matrix(
                int(matrix_config['n']),
                matrix_config['g'],
                matrix_config.get('nu', 'constant'),
                int(matrix_config.get('seed', 0)),
                matrix_config.get('dof'),
            )
        path = matrix_config['path']
        if not isinstance(path, str):
            raise TypeError(f'path must be a string, got {type(path).__name__}')
    except KeyError as exc:
        raise ConfigError(f'{source} matrix config is missing {exc}') from exc
    except TypeError as exc:
        raise ConfigError(f'invalid {source} matrix config: {exc}') from exc
    return read_matrix(path, matrix_config.get('format'))


@dataclass(frozen=True)
class ExactSvd:
    singular_values: np.ndarray
    left_vectors: np.ndarray
    right_vectors: np.ndarray


def exact_svd(matrix: DenseMatrix, k) -> ExactSvd:
    """Ground-truth triplets. Not pass-restricted: this is the oracle."""
    entries = matrix.rows * matrix.cols
    if entries > settings.MAX_EXACT_SVD_ENTRIES:
        raise ExactSvdTooLarge(
            f'exact SVD of a {matrix.rows}x{matrix.cols} matrix exceeds '
            f'{settings.MAX_EXACT_SVD_ENTRIES} entries'
        )
    svd = partial_svd(matrix, k)
    return ExactSvd(svd.singular_values, svd.left_vectors.values, svd.right_vectors.values)


@dataclass(frozen=True, eq=False)
class TrialRecord:
    """Per-trial errors ε̃ and, when bootstrapped, the trial's own q̂."""

    t: int
    errors: Dict[str, np.ndarray]
    estimates: Optional[Dict[str, np.ndarray]] = None

    def __len__(self):
        return len(self.errors['u'])

    def true_quantile(self, family, alpha):
        return empirical_quantile(self.errors[family], 1.0 - alpha)

    def coverage(self, family):
        if self.estimates is None:
            raise ConfigError('coverage needs bootstrap estimates')
        return float(np.mean(self.errors[family] <= self.estimates[family]))


@dataclass(frozen=True)
class CurvePoint:
    t: int
    family: str
    true_q: float
    est_mean: float
    est_std: float
    ext_mean: float
    ext_std: float
    coverage: float


@dataclass(frozen=True, eq=False)
class ErrorCurves:
    config: ExperimentConfig
    points: List[CurvePoint]
    trials: Dict[int, TrialRecord] = field(repr=False)

    @property
    def t_grid(self):
        return self.config.t_grid

    def curve(self, family) -> List[CurvePoint]:
        return [point for point in self.points if point.family == family]

    def point(self, t, family) -> CurvePoint:
        for point in self.points:
            if point.t == t and point.family == family:
                return point
        raise KeyError((t, family))


def _sampling_probabilities(stream, cfg):
    if cfg.sketch_kind is not SketchKind.ROW_SAMPLING:
        return None
    if cfg.probabilities == 'uniform':
        return uniform_probabilities(stream.rows)
    return squared_length_probabilities(stream)


def _run_trial(stream, exact, cfg, probabilities, t, trial, bootstrap):
    columns = np.asarray(cfg.index_set, dtype=np.intp) - 1
    spec = SketchSpec(
        cfg.sketch_kind,
        t,
        rng.derive_seed(cfg.master_seed, rng.TRIAL_SKETCH, trial, t),
        probabilities,
    )
    sketch, sketched = solve_with_sketch(stream, spec, cfg.k, n_jobs=1)

    errors = {
        'u': float(column_sine_distances(sketched.left_vectors, exact.left_vectors)[columns].max()),
        'sigma': float(np.abs(sketched.singular_values - exact.singular_values)[columns].max()),
        'v': float(column_sine_distances(sketched.right_vectors, exact.right_vectors)[columns].max()),
    }
    if not bootstrap:
        return errors, None

    config = cfg.bootstrap_config(rng.derive_seed(cfg.master_seed, rng.TRIAL_BOOTSTRAP, trial, t))
    estimate = bootstrap_errors(sketch, sketched, config, n_jobs=1)
    return errors, {family: estimate.quantile(family) for family in FAMILIES}


def simulate_trials(stream: RowStream, exact: ExactSvd, cfg: ExperimentConfig, t,
                    probabilities=None, bootstrap=True) -> TrialRecord:
    """cfg.trials independent sketches of size t; trial i is keyed by (i, t)."""
    if not cfg.k <= min(t, stream.cols):
        raise DimensionError(f'k={cfg.k} out of range for t={t}, d={stream.cols}')
    outcomes = Parallel(n_jobs=cfg.n_jobs, prefer=settings.JOBLIB_PREFER)(
        delayed(_run_trial)(stream, exact, cfg, probabilities, t, trial, bootstrap)
        for trial in range(cfg.trials)
    )

    errors = {family: np.array([e[family] for e, _ in outcomes]) for family in FAMILIES}
    estimates = None
    if bootstrap:
        estimates = {family: np.array([q[family] for _, q in outcomes]) for family in FAMILIES}
    logger.info('t=%d: %d trials done', t, cfg.trials)
    return TrialRecord(t, errors, estimates)


def _prepare(matrix, cfg):
    matrix, transposed = orient_tall(matrix)
    if transposed:
        logger.info('input is wide; working on its %dx%d transpose', matrix.rows, matrix.cols)
    if cfg.k > matrix.cols:
        raise DimensionError(f'k={cfg.k} exceeds d={matrix.cols}')
    stream = RowStream(matrix)
    exact = exact_svd(matrix, cfg.k)
    probabilities = _sampling_probabilities(stream, cfg)
    return stream, exact, probabilities


def ground_truth_quantiles(matrix: DenseMatrix, cfg: ExperimentConfig) -> Dict[int, Dict[str, float]]:
    """Empirical (1 - alpha) quantiles of the true errors, per t and family."""
    stream, exact, probabilities = _prepare(matrix, cfg)
    quantiles = {}
    for t in cfg.t_grid:
        record = simulate_trials(stream, exact, cfg, t, probabilities, bootstrap=False)
        quantiles[t] = {family: record.true_quantile(family, cfg.alpha) for family in FAMILIES}
    return quantiles


def coverage_rate(matrix: DenseMatrix, cfg: ExperimentConfig, t) -> Dict[str, float]:
    """Fraction of trials whose own bootstrap estimate covered their own error."""
    stream, exact, probabilities = _prepare(matrix, cfg)
    record = simulate_trials(stream, exact, cfg, int(t), probabilities)
    return {family: record.coverage(family) for family in FAMILIES}


def run_experiment(cfg: ExperimentConfig, matrix: DenseMatrix = None) -> ErrorCurves:
    if matrix is None:
        matrix = build_matrix(cfg.matrix)
    stream, exact, probabilities = _prepare(matrix, cfg)

    records = {
        t: simulate_trials(stream, exact, cfg, t, probabilities)
        for t in cfg.t_grid
    }
    base = records[cfg.t0]

    points = []
    for t in cfg.t_grid:
        record = records[t]
        factor = math.sqrt(cfg.t0 / t)
        for family in FAMILIES:
            estimates = record.estimates[family]
            extrapolated = base.estimates[family] * factor
            points.append(CurvePoint(
                t=t,
                family=family,
                true_q=record.true_quantile(family, cfg.alpha),
                est_mean=float(np.mean(estimates)),
                est_std=float(np.std(estimates)),
                ext_mean=float(np.mean(extrapolated)),
                ext_std=float(np.std(extrapolated)),
                coverage=record.coverage(family),
            ))

    logger.info('experiment done: %d grid points, %d passes over A', len(cfg.t_grid), stream.passes)
    return ErrorCurves(cfg, points, records)
