import tracemalloc

import numpy as np
import pytest

from sketchboot import settings
from sketchboot.exceptions import ConfigError, InvalidProbabilitiesError
from sketchboot.linalg import DenseMatrix
from sketchboot.sketchers import (
    SketchKind,
    SketchSpec,
    gaussian_sketch,
    gaussian_sketching_matrix,
    row_sampling_sketch,
    sketch_matrix,
    squared_length_probabilities,
    uniform_probabilities,
)
from sketchboot.streams import RowStream

# Settings
seed = 11
nseeds_gaussian = 2000
nseeds_sampling = 5000


@pytest.mark.parametrize(
    'values,expected',
    [
        ([[1.0, 0.0], [0.0, 2.0]], [0.2, 0.8]),
        (np.eye(3), [1 / 3, 1 / 3, 1 / 3]),
        ([[1.0, 0.0], [0.0, 1.0], [0.0, 0.0]], [0.5, 0.5, 0.0]),
    ],
)
def test_squared_length_probabilities(values, expected):
    p = squared_length_probabilities(DenseMatrix(values))
    assert np.allclose(p, expected, rtol=0, atol=1e-15)
    assert abs(p.sum() - 1.0) <= 1e-12


def test_squared_length_probabilities_rejects_zero_matrix():
    with pytest.raises(InvalidProbabilitiesError):
        squared_length_probabilities(DenseMatrix(np.zeros((3, 2))))


def test_gaussian_sketching_matrix_is_isotropic():
    n, t = 4, 8
    mean = sum(
        gaussian_sketching_matrix(n, t, s).T @ gaussian_sketching_matrix(n, t, s)
        for s in range(nseeds_gaussian)
    ) / nseeds_gaussian
    assert np.all(np.abs(mean - np.eye(n)) <= 0.05)


def test_gaussian_sketch_is_s_times_a():
    a = np.random.default_rng(seed).standard_normal((600, 5))
    sketch = gaussian_sketch(DenseMatrix(a), 7, seed=3)
    s = gaussian_sketching_matrix(600, 7, 3)
    assert np.allclose(sketch.a_tilde.values, s @ a, rtol=1e-12, atol=1e-12)
    assert sketch.t == 7 and sketch.d == 5 and sketch.source_rows == 600


def test_gaussian_sketch_of_zero_is_zero():
    sketch = gaussian_sketch(DenseMatrix(np.zeros((9, 4))), 3, seed=1)
    assert not sketch.a_tilde.values.any()


def test_gaussian_sketch_is_deterministic_and_schedule_free():
    a = DenseMatrix(np.random.default_rng(seed).standard_normal((700, 6)))
    serial = gaussian_sketch(a, 12, seed=99, n_jobs=1)
    again = gaussian_sketch(a, 12, seed=99, n_jobs=1)
    threaded = gaussian_sketch(a, 12, seed=99, n_jobs=3)
    assert np.array_equal(serial.a_tilde.values, again.a_tilde.values)
    assert np.array_equal(serial.a_tilde.values, threaded.a_tilde.values)


def test_gaussian_sketch_makes_one_pass():
    stream = RowStream(DenseMatrix(np.ones((50, 3))))
    gaussian_sketch(stream, 4, seed=0)
    assert stream.passes == 1


@pytest.mark.parametrize('n_jobs', [1, 2])
def test_gaussian_sketch_memory_does_not_grow_with_n(n_jobs):
    # 200 column blocks; each block product is t x d = 0.4 MB
    n, d, t = 200 * settings.GAUSSIAN_BLOCK_COLUMNS, 100, 500
    a = DenseMatrix(np.random.default_rng(seed).standard_normal((n, d)))
    tracemalloc.start()
    try:
        gaussian_sketch(a, t, seed=1, n_jobs=n_jobs)
        _, peak = tracemalloc.get_traced_memory()
    finally:
        tracemalloc.stop()
    assert peak < 20 * 2 ** 20


def test_row_sampling_uniform_rows_are_rescaled_rows():
    a = np.random.default_rng(seed).standard_normal((10, 3))
    t = 4
    sketch = row_sampling_sketch(DenseMatrix(a), t, uniform_probabilities(10), seed=5)
    expected = np.sqrt(10 / t) * a[sketch.indices]
    assert np.allclose(sketch.a_tilde.values, expected, rtol=1e-13, atol=0)


def test_row_sampling_single_row():
    a = DenseMatrix([[2.0, -1.0]])
    sketch = row_sampling_sketch(a, 4, [1.0], seed=0)
    assert np.allclose(sketch.a_tilde.values, np.tile([[1.0, -0.5]], (4, 1)))


def test_row_sampling_rows_found_by_lookup():
    a = np.random.default_rng(seed).standard_normal((30, 4))
    p = squared_length_probabilities(DenseMatrix(a))
    sketch = row_sampling_sketch(DenseMatrix(a), 12, p, seed=8)
    for row, index in zip(sketch.a_tilde.values, sketch.indices):
        assert np.allclose(row, a[index] / np.sqrt(12 * p[index]), rtol=1e-13, atol=0)


def test_row_sampling_never_draws_zero_rows():
    a = DenseMatrix([[1.0, 0.0], [0.0, 1.0], [0.0, 0.0]])
    p = squared_length_probabilities(a)
    sketch = row_sampling_sketch(a, 200, p, seed=4)
    assert 2 not in set(sketch.indices.tolist())


def test_row_sampling_is_unbiased():
    a = DenseMatrix(np.diag([1.0, 2.0]))
    p = squared_length_probabilities(a)
    target = a.values.T @ a.values
    mean = sum(
        row_sampling_sketch(a, 5, p, seed=s).a_tilde.values.T
        @ row_sampling_sketch(a, 5, p, seed=s).a_tilde.values
        for s in range(nseeds_sampling)
    ) / nseeds_sampling
    assert np.linalg.norm(mean - target) <= 0.02 * np.linalg.norm(target)


def test_row_sampling_passes():
    stream = RowStream(DenseMatrix(np.arange(12.0).reshape(6, 2)))
    p = squared_length_probabilities(stream)
    row_sampling_sketch(stream, 3, p, seed=0)
    # one pass for the probabilities, one to gather the sampled rows
    assert stream.passes == 2


def test_sketch_spec_validation():
    with pytest.raises(ConfigError):
        SketchSpec(SketchKind.GAUSSIAN, 0)
    with pytest.raises(ConfigError):
        SketchSpec(SketchKind.ROW_SAMPLING, 3)
    with pytest.raises(ConfigError):
        SketchSpec(SketchKind.GAUSSIAN, 3, probabilities=[0.5, 0.5])
    with pytest.raises(ConfigError):
        SketchSpec('countsketch', 3)
    with pytest.raises(InvalidProbabilitiesError):
        SketchSpec(SketchKind.ROW_SAMPLING, 3, probabilities=[0.5, 0.6])
    with pytest.raises(InvalidProbabilitiesError):
        SketchSpec(SketchKind.ROW_SAMPLING, 3, probabilities=[1.5, -0.5])


def test_row_sampling_rejects_wrong_probability_length():
    with pytest.raises(InvalidProbabilitiesError):
        row_sampling_sketch(DenseMatrix(np.eye(3)), 2, [0.5, 0.5], seed=0)


def test_sketch_matrix_dispatches_on_kind():
    a = DenseMatrix(np.random.default_rng(seed).standard_normal((20, 3)))
    spec = SketchSpec(SketchKind.ROW_SAMPLING, 6, seed=2, probabilities=uniform_probabilities(20))
    direct = row_sampling_sketch(a, 6, uniform_probabilities(20), seed=2)
    dispatched = sketch_matrix(a, spec)
    assert np.array_equal(direct.a_tilde.values, dispatched.a_tilde.values)
    assert dispatched.spec.kind is SketchKind.ROW_SAMPLING

    gaussian = sketch_matrix(a, SketchSpec('gaussian', 6, seed=2))
    assert np.array_equal(gaussian.a_tilde.values, gaussian_sketch(a, 6, seed=2).a_tilde.values)
