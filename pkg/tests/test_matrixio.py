import numpy as np
import pytest

from sketchboot.exceptions import MatrixFormatError, TruncatedMatrixError
from sketchboot.linalg import DenseMatrix
from sketchboot.matrixio import MatrixFormat, infer_format, read_matrix, write_matrix

# Settings
seed = 17

identity_mtx = """%%MatrixMarket matrix array real general
2 2
1
0
0
1
"""


@pytest.fixture
def matrix():
    return DenseMatrix(np.random.default_rng(seed).standard_normal((7, 3)))


@pytest.mark.parametrize('name,fmt', [('a.raw', MatrixFormat.RAW_F64), ('a.mtx', MatrixFormat.MATRIX_MARKET_DENSE)])
def test_write_then_read_is_exact(tmp_path, matrix, name, fmt):
    path = write_matrix(tmp_path / name, matrix)
    assert infer_format(path) is fmt
    assert np.array_equal(read_matrix(path).values, matrix.values)


def test_matrix_market_with_explicit_format_keeps_the_name(tmp_path, matrix):
    path = write_matrix(tmp_path / 'sketch.out', matrix, 'mtx')
    assert path.name == 'sketch.out' and path.exists()
    assert np.array_equal(read_matrix(path, 'mtx').values, matrix.values)


def test_raw_layout(tmp_path):
    path = write_matrix(tmp_path / 'a.bin', DenseMatrix([[1.0, 2.0, 3.0], [4.0, 5.0, 6.0]]))
    blob = path.read_bytes()
    assert len(blob) == 16 + 6 * 8
    assert np.frombuffer(blob[:16], dtype='<u8').tolist() == [2, 3]
    assert np.frombuffer(blob[16:], dtype='<f8').tolist() == [1.0, 2.0, 3.0, 4.0, 5.0, 6.0]


def test_raw_round_trip_is_bit_exact_for_awkward_values(tmp_path):
    values = np.array([[5e-324, -0.0, 1.7976931348623157e308], [np.nextafter(1.0, 2.0), -1e-310, 0.1]])
    path = write_matrix(tmp_path / 'edge.raw', DenseMatrix(values))
    assert read_matrix(path).values.tobytes() == values.tobytes()


def test_read_matrix_market_identity(tmp_path):
    path = tmp_path / 'eye.mtx'
    path.write_text(identity_mtx)
    assert np.array_equal(read_matrix(path).values, [[1.0, 0.0], [0.0, 1.0]])


def test_matrix_market_must_be_dense(tmp_path):
    path = tmp_path / 'sparse.mtx'
    path.write_text('%%MatrixMarket matrix coordinate real general\n2 2 1\n1 1 1.0\n')
    with pytest.raises(MatrixFormatError):
        read_matrix(path)


def test_truncated_raw_payload(tmp_path, matrix):
    path = write_matrix(tmp_path / 'a.raw', matrix)
    path.write_bytes(path.read_bytes()[:-8])
    with pytest.raises(TruncatedMatrixError):
        read_matrix(path)


def test_truncated_matrix_market_payload(tmp_path):
    path = tmp_path / 'short.mtx'
    # header says 3x2, only two of six values follow
    path.write_text('%%MatrixMarket matrix array real general\n3 2\n1.0\n2.0\n')
    with pytest.raises(TruncatedMatrixError):
        read_matrix(path)


def test_truncated_raw_header(tmp_path):
    path = tmp_path / 'short.raw'
    path.write_bytes(b'\x01\x00\x00')
    with pytest.raises(TruncatedMatrixError):
        read_matrix(path)


def test_trailing_raw_bytes(tmp_path, matrix):
    path = write_matrix(tmp_path / 'a.raw', matrix)
    path.write_bytes(path.read_bytes() + b'\x00' * 8)
    with pytest.raises(MatrixFormatError):
        read_matrix(path)


def test_nan_payload_is_rejected(tmp_path):
    path = tmp_path / 'nan.raw'
    path.write_bytes(np.array([1, 2], dtype='<u8').tobytes() + np.array([1.0, np.nan], dtype='<f8').tobytes())
    with pytest.raises(MatrixFormatError):
        read_matrix(path)


def test_missing_file_is_an_os_error(tmp_path):
    with pytest.raises(OSError):
        read_matrix(tmp_path / 'missing.raw')
