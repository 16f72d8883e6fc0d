"""Row-stream access to a large matrix with a pass counter.

Algorithms that touch the full input matrix A do so through a RowStream.
Every sequential read of A (or of a subset of its rows) increments
``passes``, which makes the pass budget of each algorithm testable.
"""

from __future__ import annotations

import logging
import threading
from typing import Iterator, Tuple, Union

import numpy as np

from . import settings
from .exceptions import DimensionError
from .linalg import DenseMatrix

logger = logging.getLogger(__name__)


class RowStream:
    """Counts passes over the rows of a DenseMatrix."""

    def __init__(self, matrix: DenseMatrix, block_rows: int = None):
        if not isinstance(matrix, DenseMatrix):
            matrix = DenseMatrix(matrix)
        self._matrix = matrix
        self.block_rows = block_rows or settings.ROW_BLOCK_SIZE
        self._passes = 0
        self._lock = threading.Lock()

    def __repr__(self):
        return f'<RowStream({self.rows}x{self.cols}), passes={self.passes}>'

    @property
    def rows(self):
        return self._matrix.rows

    @property
    def cols(self):
        return self._matrix.cols

    @property
    def passes(self):
        return self._passes

    @property
    def matrix(self):
        """Direct access to the matrix. Not counted: oracle use only."""
        return self._matrix

    def _count_pass(self, what):
        with self._lock:
            self._passes += 1
            count = self._passes
        logger.debug('pass %d over A (%s)', count, what)

    def iter_blocks(self, block_rows: int = None) -> Iterator[Tuple[int, np.ndarray]]:
        """Yield (first_row, block) pairs covering A once."""
        block_rows = block_rows or self.block_rows
        self._count_pass('stream')
        values = self._matrix.values
        for start in range(0, self.rows, block_rows):
            yield start, values[start:start + block_rows]

    def gather(self, indices) -> np.ndarray:
        """Read the requested rows (with repetition) in a single pass."""
        indices = np.asarray(indices, dtype=np.intp)
        if indices.size and (indices.min() < 0 or indices.max() >= self.rows):
            raise DimensionError('row index out of range')
        self._count_pass('gather')
        return self._matrix.values[indices]

    def multiply(self, right) -> np.ndarray:
        """A @ right, accumulated block by block in one pass."""
        right = np.asarray(right, dtype=np.float64)
        if right.shape[0] != self.cols:
            raise DimensionError(
                f'cannot multiply {self.rows}x{self.cols} by {right.shape}'
            )
        out = np.empty((self.rows,) + right.shape[1:], dtype=np.float64)
        for start, block in self.iter_blocks():
            out[start:start + block.shape[0]] = block @ right
        return out

    def row_norms_squared(self) -> np.ndarray:
        out = np.empty(self.rows, dtype=np.float64)
        for start, block in self.iter_blocks():
            out[start:start + block.shape[0]] = np.einsum('ij,ij->i', block, block)
        return out


MatrixSource = Union[DenseMatrix, RowStream]


def as_row_stream(source: MatrixSource) -> RowStream:
    if isinstance(source, RowStream):
        return source
    return RowStream(source)
