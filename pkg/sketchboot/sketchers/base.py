from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .. import settings
from ..exceptions import ConfigError, InvalidProbabilitiesError
from ..linalg import DenseMatrix


class SketchKind(str, enum.Enum):
    GAUSSIAN = 'gaussian'
    ROW_SAMPLING = 'rowsample'


def validate_probabilities(probabilities, n=None):
    """Return ``probabilities`` as a read-only float64 vector or raise."""
    p = np.array(probabilities, dtype=np.float64, copy=True).ravel()
    if n is not None and p.size != n:
        raise InvalidProbabilitiesError(
            f'expected {n} sampling probabilities, got {p.size}'
        )
    if p.size == 0 or not np.all(np.isfinite(p)):
        raise InvalidProbabilitiesError('sampling probabilities must be finite')
    if np.any(p < 0):
        raise InvalidProbabilitiesError('sampling probabilities must be nonnegative')
    total = p.sum()
    # rounding in the sum grows with n, so the tolerance does too
    tolerance = max(settings.PROBABILITY_SUM_TOLERANCE, p.size * np.finfo(np.float64).eps)
    if abs(total - 1.0) > tolerance:
        raise InvalidProbabilitiesError(
            f'sampling probabilities sum to {total!r}, expected 1'
        )
    p.flags.writeable = False
    return p


@dataclass(frozen=True, eq=False)
class SketchSpec:
    kind: SketchKind
    t: int
    seed: int = 0
    probabilities: Optional[np.ndarray] = None

    def __post_init__(self):
        try:
            kind = SketchKind(self.kind)
        except ValueError as exc:
            raise ConfigError(f'unknown sketch kind {self.kind!r}') from exc
        object.__setattr__(self, 'kind', kind)

        if int(self.t) < 1:
            raise ConfigError(f'sketch size t must be at least 1, got {self.t}')
        object.__setattr__(self, 't', int(self.t))

        if kind is SketchKind.ROW_SAMPLING:
            if self.probabilities is None:
                raise ConfigError('row sampling requires a probability vector')
            object.__setattr__(
                self, 'probabilities', validate_probabilities(self.probabilities)
            )
        elif self.probabilities is not None:
            raise ConfigError('Gaussian projection takes no probability vector')

    def with_t(self, t, seed=None):
        return SketchSpec(self.kind, t, self.seed if seed is None else seed,
                          self.probabilities)

    def to_dict(self):
        return {'kind': self.kind.value, 't': self.t, 'seed': self.seed}


@dataclass(frozen=True, eq=False)
class Sketch:
    """The sketch Ã = SA.

    ``spec`` and ``source_rows`` are None for a sketch read back from disk,
    ``indices`` holds the sampled rows of A for row-sampling sketches.
    """

    a_tilde: DenseMatrix
    spec: Optional[SketchSpec] = None
    source_rows: Optional[int] = None
    indices: Optional[np.ndarray] = None

    def __post_init__(self):
        if not isinstance(self.a_tilde, DenseMatrix):
            object.__setattr__(self, 'a_tilde', DenseMatrix(self.a_tilde))
        if self.spec is not None and self.a_tilde.rows != self.spec.t:
            raise ConfigError(
                f'sketch has {self.a_tilde.rows} rows but spec.t is {self.spec.t}'
            )

    @property
    def t(self):
        return self.a_tilde.rows

    @property
    def d(self):
        return self.a_tilde.cols


class BaseSketcher:
    name = None
    kind = None

    def __init__(self, t, seed=0, **kwargs):
        self.t = t
        self.seed = seed

    def __repr__(self):
        return f'<{self.__class__.__name__}(t={self.t}, seed={self.seed})>'

    @classmethod
    def from_spec(cls, spec: SketchSpec, **kwargs):
        raise NotImplementedError

    @property
    def spec(self) -> SketchSpec:
        raise NotImplementedError

    def sketch(self, source) -> Sketch:
        raise NotImplementedError
