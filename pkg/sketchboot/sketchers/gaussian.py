import logging

import numpy as np
from joblib import Parallel, delayed

from .. import rng, settings
from ..linalg import DenseMatrix
from ..streams import as_row_stream
from .base import BaseSketcher, Sketch, SketchKind, SketchSpec

logger = logging.getLogger(__name__)


def _block_normals(seed, t, block, width):
    # column block `block` of sqrt(t) * S, from its own keyed stream
    return rng.stream(seed, rng.GAUSSIAN_SKETCH, block).standard_normal((t, width))


def gaussian_sketching_matrix(n, t, seed):
    """Materialise S (t x n, entries N(0, 1/t)) from the same streams as
    :func:`gaussian_sketch`. Meant for tests and small n."""
    width = settings.GAUSSIAN_BLOCK_COLUMNS
    blocks = [
        _block_normals(seed, t, block, min(width, n - start))
        for block, start in enumerate(range(0, n, width))
    ]
    return np.hstack(blocks) / np.sqrt(t)


def _block_product(seed, t, block, rows):
    return _block_normals(seed, t, block, rows.shape[0]) @ rows


class GaussianSketcher(BaseSketcher):
    name = 'gaussian'
    kind = SketchKind.GAUSSIAN

    def __init__(self, t, seed=0, n_jobs=None, **kwargs):
        super().__init__(t, seed, **kwargs)
        self.n_jobs = n_jobs or settings.N_JOBS

    @classmethod
    def from_spec(cls, spec, **kwargs):
        return cls(spec.t, spec.seed, **kwargs)

    @property
    def spec(self):
        return SketchSpec(self.kind, self.t, self.seed)

    def sketch(self, source):
        stream = as_row_stream(source)
        width = settings.GAUSSIAN_BLOCK_COLUMNS

        # one pass over A; S is generated block-wise and never stored whole
        blocks = stream.iter_blocks(width)
        parallel = Parallel(
            n_jobs=self.n_jobs,
            prefer=settings.JOBLIB_PREFER,
            return_as='generator',
        )
        products = parallel(
            delayed(_block_product)(self.seed, self.t, start // width, rows)
            for start, rows in blocks
        )

        # products arrive in block order and are folded in one at a time,
        # which fixes the reduction order and holds O(n_jobs) products at once
        a_tilde = np.zeros((self.t, stream.cols), dtype=np.float64)
        for product in products:
            a_tilde += product
        a_tilde /= np.sqrt(self.t)

        logger.debug('gaussian sketch t=%d from %d rows', self.t, stream.rows)
        return Sketch(DenseMatrix(a_tilde), self.spec, stream.rows)


def gaussian_sketch(source, t, seed, n_jobs=None):
    return GaussianSketcher(t, seed, n_jobs=n_jobs).sketch(source)
