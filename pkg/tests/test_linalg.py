import math

import numpy as np
import pytest

from sketchboot.exceptions import DimensionError, NonFiniteError
from sketchboot.linalg import (
    DenseMatrix,
    column_sine_distances,
    empirical_quantile,
    normalize_columns,
    normalize_or_zero,
    numerical_rank,
    orient_tall,
    partial_svd,
    sine_distance,
)

# Settings
seed = 20240601
atol = 1e-8
nruns = 25

rng = np.random.default_rng(seed)
random_matrices = [rng.standard_normal((20, 8)) for _ in range(nruns)]


def random_unit(dim, generator):
    w = generator.standard_normal(dim)
    return w / np.linalg.norm(w)


def test_dense_matrix_shape_and_immutability():
    matrix = DenseMatrix.from_flat(2, 3, [1, 2, 3, 4, 5, 6])
    assert matrix.shape == (2, 3)
    assert matrix.rows == 2 and matrix.cols == 3
    assert np.array_equal(matrix.data, [1, 2, 3, 4, 5, 6])
    with pytest.raises(ValueError):
        matrix.values[0, 0] = 9.0


def test_dense_matrix_rejects_bad_input():
    with pytest.raises(DimensionError):
        DenseMatrix.from_flat(2, 2, [1, 2, 3])
    with pytest.raises(NonFiniteError):
        DenseMatrix([[1.0, np.nan]])
    with pytest.raises(NonFiniteError):
        DenseMatrix([[np.inf, 0.0]])


def test_partial_svd_diagonal():
    svd = partial_svd(DenseMatrix(np.diag([3.0, 1.0])), 2)
    assert np.allclose(svd.singular_values, [3.0, 1.0], rtol=0, atol=1e-14)
    assert np.allclose(svd.right_vectors.values, np.eye(2), rtol=0, atol=1e-14)


def test_partial_svd_zero_matrix():
    svd = partial_svd(DenseMatrix(np.zeros((3, 2))), 1)
    assert svd.singular_values[0] == 0.0
    assert np.linalg.norm(svd.right_vectors.values[:, 0]) == pytest.approx(1.0)
    assert not svd.left_vectors.values.any()


def test_partial_svd_matches_numpy_oracle():
    values = np.random.default_rng(5).standard_normal((5, 3))
    svd = partial_svd(DenseMatrix(values), 3)
    oracle = np.linalg.svd(values, compute_uv=False)
    assert np.allclose(svd.singular_values, oracle, rtol=0, atol=1e-8)


@pytest.mark.parametrize('values', random_matrices)
def test_partial_svd_reconstruction_and_orthonormality(values):
    svd = partial_svd(DenseMatrix(values), 8)
    u = svd.left_vectors.values
    v = svd.right_vectors.values
    rebuilt = (u * svd.singular_values) @ v.T
    assert np.linalg.norm(values - rebuilt) <= atol * np.linalg.norm(values)
    assert np.linalg.norm(v.T @ v - np.eye(8)) <= atol
    assert np.all(np.diff(svd.singular_values) <= 0)


@pytest.mark.parametrize('values', random_matrices[:5])
def test_partial_svd_sign_convention(values):
    v = partial_svd(DenseMatrix(values), 4).right_vectors.values
    pivots = np.argmax(np.abs(v), axis=0)
    assert np.all(v[pivots, np.arange(4)] > 0)


def test_partial_svd_is_deterministic():
    matrix = DenseMatrix(random_matrices[0])
    first = partial_svd(matrix, 3)
    second = partial_svd(matrix, 3)
    assert np.array_equal(first.singular_values, second.singular_values)
    assert np.array_equal(first.right_vectors.values, second.right_vectors.values)
    assert np.array_equal(first.left_vectors.values, second.left_vectors.values)


@pytest.mark.parametrize('k', [0, 4])
def test_partial_svd_rejects_k_out_of_range(k):
    with pytest.raises(DimensionError):
        partial_svd(DenseMatrix(np.ones((5, 3))), k)


def test_partial_svd_without_left_vectors():
    svd = partial_svd(DenseMatrix(random_matrices[1]), 2, compute_left=False)
    assert svd.left_vectors is None
    assert svd.k == 2


def test_sine_distance_examples():
    w = random_unit(5, np.random.default_rng(1))
    e1, e2 = np.array([1.0, 0.0]), np.array([0.0, 1.0])
    assert sine_distance(w, w) == 0.0
    assert sine_distance(w, -w) == 0.0
    assert sine_distance(e1, e2) == 1.0
    assert sine_distance(e1, (e1 + e2) / math.sqrt(2)) == pytest.approx(0.7071067811865476, rel=1e-12)


def test_sine_distance_zero_vector_is_maximal():
    assert sine_distance(np.zeros(3), np.array([1.0, 0.0, 0.0])) == 1.0
    assert sine_distance(np.zeros(3), np.zeros(3)) == 1.0


def test_sine_distance_symmetry_and_sign_invariance():
    generator = np.random.default_rng(2)
    for _ in range(200):
        w, w_prime = random_unit(6, generator), random_unit(6, generator)
        assert sine_distance(w, w_prime) == sine_distance(w_prime, w)
        assert sine_distance(w, w_prime) == sine_distance(-w, w_prime)
        assert sine_distance(w, w_prime) == sine_distance(w, -w_prime)
        assert 0.0 <= sine_distance(w, w_prime) <= 1.0
        c = float(w @ w_prime)
        assert sine_distance(w, w_prime) == pytest.approx(math.sqrt(max(0.0, 1 - c * c)), abs=1e-12)


def test_sine_distance_validation():
    with pytest.raises(DimensionError):
        sine_distance(np.ones(2) / math.sqrt(2), np.ones(3) / math.sqrt(3))
    with pytest.raises(ValueError):
        sine_distance(np.array([2.0, 0.0]), np.array([1.0, 0.0]))


def test_column_sine_distances_matches_scalar_version():
    generator = np.random.default_rng(3)
    left = normalize_columns(generator.standard_normal((7, 4)))
    right = normalize_columns(generator.standard_normal((7, 4)))
    right[:, 2] = 0.0
    expected = [sine_distance(left[:, j], right[:, j]) for j in range(4)]
    assert np.allclose(column_sine_distances(left, right), expected, rtol=0, atol=1e-14)
    assert column_sine_distances(left, right)[2] == 1.0


@pytest.mark.parametrize(
    'x,expected',
    [
        ([3.0, 4.0], [0.6, 0.8]),
        ([0.0, 0.0], [0.0, 0.0]),
        ([1e-300, 0.0], [1.0, 0.0]),
    ],
)
def test_normalize_or_zero(x, expected):
    assert np.allclose(normalize_or_zero(x), expected, rtol=0, atol=1e-15)


def test_normalize_columns_keeps_zero_columns():
    x = np.array([[3.0, 0.0], [4.0, 0.0]])
    out = normalize_columns(x)
    assert np.allclose(out[:, 0], [0.6, 0.8])
    assert not out[:, 1].any()


@pytest.mark.parametrize(
    'xs,level,expected',
    [
        (list(range(1, 11)), 0.95, 10.0),
        ([5.0], 0.3, 5.0),
        ([5.0], 0.99, 5.0),
        ([3.0, 1.0, 2.0], 0.5, 2.0),
        ([1.0, 2.0, 3.0, 4.0], 0.5, 2.0),
        ([1.0, 2.0, 3.0, 4.0], 0.75, 3.0),
    ],
)
def test_empirical_quantile_examples(xs, level, expected):
    assert empirical_quantile(xs, level) == expected


def brute_force_quantile(xs, level):
    # inf{q : F_B(q) >= level}, searched over the observed values
    xs = sorted(xs)
    for q in xs:
        if sum(x <= q for x in xs) / len(xs) >= level:
            return q
    return xs[-1]


@pytest.mark.parametrize('size', [1, 2, 3, 7, 20, 30, 40])
@pytest.mark.parametrize('level', [0.05, 0.1, 0.5, 0.9, 0.95, 0.975])
def test_empirical_quantile_matches_definition(size, level):
    xs = np.random.default_rng(size).permutation(size).astype(float)
    assert empirical_quantile(xs, level) == brute_force_quantile(list(xs), level)


def test_empirical_quantile_properties():
    xs = np.random.default_rng(4).exponential(size=30)
    levels = np.linspace(0.01, 0.99, 50)
    values = [empirical_quantile(xs, level) for level in levels]
    assert all(later >= earlier for earlier, later in zip(values, values[1:]))
    assert empirical_quantile(xs, 0.95) in xs
    assert empirical_quantile(xs[::-1], 0.95) == empirical_quantile(xs, 0.95)


def test_empirical_quantile_rejects_empty_input():
    with pytest.raises(ValueError):
        empirical_quantile([], 0.5)


def test_numerical_rank_and_orientation():
    assert numerical_rank([3.0, 1.0, 0.0]) == 2
    assert numerical_rank([0.0, 0.0]) == 0
    wide = DenseMatrix(np.ones((2, 5)))
    tall, transposed = orient_tall(wide)
    assert transposed and tall.shape == (5, 2)
    same, transposed = orient_tall(tall)
    assert not transposed and same is tall
