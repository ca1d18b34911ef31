import numpy as np
import pytest
import scipy.sparse as sp

from oracles import dense_covariance, top_eigvec_dense
from textpart.linalg import (
    DegenerateClusterError,
    centroid,
    principal_direction,
    scatter_value,
    sq_distances,
)


def test_centroid_midpoint():
    assert centroid(np.array([[0.0, 0.0], [2.0, 2.0]])).tolist() == [1.0, 1.0]


def test_centroid_single_row_identity():
    r = np.array([[3.0, -1.0, 2.0]])
    assert centroid(r).tolist() == [3.0, -1.0, 2.0]


def test_centroid_hand_sum():
    rows = np.array([[1.0, 0.0], [0.0, 1.0], [-1.0, -1.0]])
    assert centroid(rows) == pytest.approx([0.0, 0.0])


def test_centroid_sparse_matches_dense():
    rng = np.random.default_rng(0)
    X = rng.random((10, 6)) * (rng.random((10, 6)) > 0.5)
    assert centroid(sp.csr_array(X)) == pytest.approx(centroid(X))


def test_centroid_empty_errors():
    with pytest.raises(ValueError):
        centroid(np.zeros((0, 3)))


def test_scatter_symmetric_pair():
    assert scatter_value(np.array([[0.0], [2.0]]), np.array([1.0])) == 1.0


def test_scatter_single_point_is_zero():
    assert scatter_value(np.array([[4.0, 4.0]]), np.array([4.0, 4.0])) == 0.0


def test_scatter_half_hypotenuse():
    rows = np.array([[0.0, 0.0], [3.0, 4.0]])
    assert scatter_value(rows, np.array([1.5, 2.0])) == pytest.approx(2.5)


def test_scatter_sumsq_mode():
    rows = np.array([[0.0], [2.0]])
    assert scatter_value(rows, np.array([1.0]), mode="sumsq") == pytest.approx(2.0)


def test_scatter_translation_invariance():
    rng = np.random.default_rng(2)
    rows = rng.normal(size=(20, 4))
    c = centroid(rows)
    shift = np.array([10.0, -3.0, 0.5, 100.0])
    before = scatter_value(rows, c)
    after = scatter_value(rows + shift, c + shift)
    assert abs(before - after) < 1e-9


def test_scatter_empty_errors():
    with pytest.raises(ValueError):
        scatter_value(np.zeros((0, 2)), np.zeros(2))


def test_sq_distances_matches_direct():
    rng = np.random.default_rng(4)
    X = rng.normal(size=(15, 5))
    C = rng.normal(size=(3, 5))
    direct = ((X[:, None, :] - C[None, :, :]) ** 2).sum(axis=2)
    assert sq_distances(X, C) == pytest.approx(direct)
    assert sq_distances(sp.csr_array(X), C) == pytest.approx(direct)


def test_principal_direction_dominant_axis():
    rows = np.array([[-1.0, 0.0], [1.0, 0.0], [0.0, 0.1], [0.0, -0.1]])
    u = principal_direction(rows, seed=0)
    assert abs(u @ np.array([1.0, 0.0])) >= 1 - 1e-6
    assert u[0] > 0  # sign convention: first nonzero coordinate positive


def test_principal_direction_closed_form_2x2():
    # points engineered so the covariance is [[2, 1], [1, 2]]
    s = np.sqrt(3.0)
    rows = np.array([[s, s], [-s, -s], [1.0, -1.0], [-1.0, 1.0]])
    assert np.allclose(dense_covariance(rows), [[2.0, 1.0], [1.0, 2.0]])
    u = principal_direction(rows, seed=1)
    expected = np.array([1.0, 1.0]) / np.sqrt(2.0)
    assert abs(u @ expected) >= 1 - 1e-6
    assert u[0] > 0 and u[1] > 0


def test_principal_direction_identical_rows_degenerate():
    with pytest.raises(DegenerateClusterError):
        principal_direction(np.array([[1.0, 2.0], [1.0, 2.0]]), seed=0)


def test_principal_direction_unit_norm_and_residual():
    rng = np.random.default_rng(8)
    for _ in range(10):
        n = int(rng.integers(3, 60))
        d = int(rng.integers(2, 30))
        X = rng.normal(size=(n, d)) * rng.uniform(0.5, 2.0, size=d)
        u = principal_direction(X, seed=int(rng.integers(0, 1 << 30)))
        assert abs(np.linalg.norm(u) - 1.0) < 1e-9
        C = dense_covariance(X)
        lam = u @ C @ u
        assert np.linalg.norm(C @ u - lam * u) <= 1e-6


def test_principal_direction_matches_eigh_oracle():
    rng = np.random.default_rng(99)
    for _ in range(15):
        n = int(rng.integers(4, 80))
        d = int(rng.integers(2, 20))
        X = rng.normal(size=(n, d))
        u = principal_direction(X, seed=int(rng.integers(0, 1 << 30)))
        assert abs(u @ top_eigvec_dense(X)) >= 1 - 1e-6


def test_principal_direction_sparse_rows():
    rng = np.random.default_rng(12)
    X = rng.random((30, 8)) * (rng.random((30, 8)) > 0.6)
    u = principal_direction(sp.csr_array(X), seed=3)
    assert abs(u @ top_eigvec_dense(X)) >= 1 - 1e-6
