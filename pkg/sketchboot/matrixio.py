"""Matrix files: MatrixMarket dense ("array real general") and RawF64.

RawF64 layout: two little-endian u64 (rows, cols) followed by rows*cols
little-endian f64 values in row-major order.
"""

from __future__ import annotations

import enum
import logging
from pathlib import Path

import numpy as np
from scipy import io as sio

from .exceptions import MatrixFormatError, NonFiniteError, TruncatedMatrixError
from .linalg import DenseMatrix

logger = logging.getLogger(__name__)

RAW_HEADER = np.dtype('<u8')
RAW_VALUE = np.dtype('<f8')
RAW_HEADER_BYTES = 2 * RAW_HEADER.itemsize


class MatrixFormat(str, enum.Enum):
    MATRIX_MARKET_DENSE = 'mtx'
    RAW_F64 = 'raw'


def infer_format(path) -> MatrixFormat:
    # data/a.mtx to MATRIX_MARKET_DENSE, anything else to RAW_F64
    if Path(path).suffix.lower() == '.mtx':
        return MatrixFormat.MATRIX_MARKET_DENSE
    return MatrixFormat.RAW_F64


def _is_truncation(exc):
    # fast_matrix_market: "Truncated file. Expected another ..."
    # older scipy: "Parse error, did not read all lines."
    message = str(exc).lower()
    return 'truncated' in message or 'did not read all' in message


def _read_matrix_market(path):
    try:
        rows, cols, _, layout, field, symmetry = sio.mminfo(str(path))
    except (ValueError, IndexError) as exc:
        raise MatrixFormatError(f'{path}: malformed MatrixMarket header ({exc})') from exc

    if (layout, field, symmetry) != ('array', 'real', 'general'):
        raise MatrixFormatError(
            f'{path}: expected "array real general", got "{layout} {field} {symmetry}"'
        )
    try:
        values = np.asarray(sio.mmread(str(path)), dtype=np.float64)
    except (ValueError, IndexError) as exc:
        if _is_truncation(exc):
            raise TruncatedMatrixError(f'{path}: payload shorter than its header ({exc})') from exc
        raise MatrixFormatError(f'{path}: malformed MatrixMarket payload ({exc})') from exc

    if values.shape != (rows, cols):
        raise TruncatedMatrixError(
            f'{path}: header says {rows}x{cols}, payload has shape {values.shape}'
        )
    return values


def _read_raw(path):
    blob = Path(path).read_bytes()
    if len(blob) < RAW_HEADER_BYTES:
        raise TruncatedMatrixError(f'{path}: {len(blob)} bytes, shorter than the header')

    rows, cols = (int(x) for x in np.frombuffer(blob[:RAW_HEADER_BYTES], dtype=RAW_HEADER))
    expected = rows * cols * RAW_VALUE.itemsize
    payload = blob[RAW_HEADER_BYTES:]
    if len(payload) < expected:
        raise TruncatedMatrixError(
            f'{path}: payload holds {len(payload)} bytes, {rows}x{cols} needs {expected}'
        )
    if len(payload) > expected:
        raise MatrixFormatError(f'{path}: {len(payload) - expected} trailing bytes')

    return np.frombuffer(payload, dtype=RAW_VALUE).reshape(rows, cols)


def read_matrix(path, fmt=None) -> DenseMatrix:
    fmt = MatrixFormat(fmt) if fmt is not None else infer_format(path)
    if fmt is MatrixFormat.MATRIX_MARKET_DENSE:
        values = _read_matrix_market(path)
    else:
        values = _read_raw(path)

    try:
        matrix = DenseMatrix(values)
    except NonFiniteError as exc:
        raise MatrixFormatError(f'{path}: {exc}') from exc
    logger.debug('read %dx%d matrix from %s (%s)', matrix.rows, matrix.cols, path, fmt.value)
    return matrix


def write_matrix(path, matrix, fmt=None):
    if not isinstance(matrix, DenseMatrix):
        matrix = DenseMatrix(matrix)
    fmt = MatrixFormat(fmt) if fmt is not None else infer_format(path)
    path = Path(path)

    if fmt is MatrixFormat.MATRIX_MARKET_DENSE:
        # an open file keeps mmwrite from appending '.mtx' to the name;
        # 17 significant digits round-trip every finite float64
        with path.open('wb') as f:
            sio.mmwrite(f, matrix.values, field='real', precision=17,
                        symmetry='general')
    else:
        header = np.array([matrix.rows, matrix.cols], dtype=RAW_HEADER)
        with path.open('wb') as f:
            f.write(header.tobytes())
            f.write(matrix.values.astype(RAW_VALUE, copy=False).tobytes(order='C'))

    logger.debug('wrote %dx%d matrix to %s (%s)', matrix.rows, matrix.cols, path, fmt.value)
    return path
