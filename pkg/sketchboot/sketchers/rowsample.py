import logging

import numpy as np

from .. import rng
from ..exceptions import InvalidProbabilitiesError
from ..linalg import DenseMatrix
from ..streams import as_row_stream
from .base import BaseSketcher, Sketch, SketchKind, SketchSpec, validate_probabilities

logger = logging.getLogger(__name__)


def squared_length_probabilities(source):
    """p_l = ||a_l||^2 / ||A||_F^2, computed in one pass over A.

    Zero rows get probability 0 and are never sampled.
    """
    stream = as_row_stream(source)
    norms = stream.row_norms_squared()
    total = norms.sum()
    if total == 0:
        raise InvalidProbabilitiesError(
            'squared-length sampling is undefined for an all-zero matrix'
        )
    return norms / total


def uniform_probabilities(n):
    return np.full(n, 1.0 / n)


class RowSamplingSketcher(BaseSketcher):
    name = 'rowsample'
    kind = SketchKind.ROW_SAMPLING

    def __init__(self, t, seed=0, probabilities=None, **kwargs):
        super().__init__(t, seed, **kwargs)
        if probabilities is None:
            raise InvalidProbabilitiesError('row sampling requires a probability vector')
        self.probabilities = validate_probabilities(probabilities)

    @classmethod
    def from_spec(cls, spec, **kwargs):
        return cls(spec.t, spec.seed, spec.probabilities)

    @property
    def spec(self):
        return SketchSpec(self.kind, self.t, self.seed, self.probabilities)

    def sketch(self, source):
        stream = as_row_stream(source)
        p = validate_probabilities(self.probabilities, n=stream.rows)

        generator = rng.stream(self.seed, rng.ROW_SAMPLING)
        indices = generator.choice(stream.rows, size=self.t, replace=True, p=p)

        # single pass over the sampled rows only; S stays implicit
        rows = stream.gather(indices)
        scale = 1.0 / np.sqrt(self.t * p[indices])
        a_tilde = rows * scale[:, np.newaxis]

        indices.flags.writeable = False
        logger.debug('row-sampling sketch t=%d from %d rows', self.t, stream.rows)
        return Sketch(DenseMatrix(a_tilde), self.spec, stream.rows, indices)


def row_sampling_sketch(source, t, probabilities, seed):
    return RowSamplingSketcher(t, seed, probabilities).sketch(source)
