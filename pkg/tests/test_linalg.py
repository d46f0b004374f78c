import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from levelcs.levels import SupportSet
from levelcs.linalg import (ConvergenceWarning, apply, least_squares_on_support,
                            normalize_columns, read_csv, spectral_norm, write_csv)

from oracles import jacobi_eigvals, naive_matvec


def test_apply_examples():
    assert apply(np.eye(3), np.array([1.0, 2, 3])).tolist() == [1, 2, 3]
    P = np.array([[0.0, 1], [1, 0]])
    assert apply(P, np.array([2.0, 5])).tolist() == [5, 2]
    assert apply(P, np.array([2.0, 5]), adjoint=True).tolist() == [5, 2]
    with pytest.raises(ValueError):
        apply(P, np.ones(3))


def test_apply_matches_naive_loop():
    rng = np.random.default_rng(0)
    A = rng.standard_normal((7, 5))
    x = rng.standard_normal(5)
    assert np.allclose(apply(A, x), naive_matvec(A.tolist(), x.tolist()), atol=1e-13)
    y = rng.standard_normal(7)
    assert np.allclose(apply(A, y, adjoint=True), naive_matvec(A.T.tolist(), y.tolist()),
                       atol=1e-13)


finite = st.floats(-100, 100, allow_nan=False)


@settings(max_examples=100, deadline=None)
@given(st.data())
def test_adjoint_consistency(data):
    m = data.draw(st.integers(1, 8))
    n = data.draw(st.integers(1, 8))
    A = data.draw(arrays(float, (m, n), elements=finite))
    x = data.draw(arrays(float, n, elements=finite))
    y = data.draw(arrays(float, m, elements=finite))
    lhs = float(apply(A, x) @ y)
    rhs = float(x @ apply(A, y, adjoint=True))
    scale = np.abs(A).sum() * np.abs(x).max(initial=0) * np.abs(y).max(initial=0) + 1
    assert abs(lhs - rhs) <= 1e-12 * scale


def test_least_squares_examples():
    A = np.diag([1.0, 2.0])
    y = np.array([1.0, 2.0])
    assert np.allclose(least_squares_on_support(A, y, SupportSet((2,), 2)), [0, 1])
    z = least_squares_on_support(A, y, SupportSet((), 2))
    assert z.tolist() == [0, 0]
    assert np.array_equal(y - A @ z, y)


def test_least_squares_normal_equations():
    rng = np.random.default_rng(1)
    A = rng.standard_normal((10, 6))
    y = rng.standard_normal(10)
    S = SupportSet((1, 3, 4), 6)
    z = least_squares_on_support(A, y, S)
    cols = S.zero_based
    assert np.all(z[np.setdiff1d(np.arange(6), cols)] == 0)
    assert np.allclose(A[:, cols].T @ (y - A @ z), 0, atol=1e-12)


def test_least_squares_rank_deficient_min_norm():
    A = np.array([[1.0, 1.0], [0.0, 0.0]])
    z = least_squares_on_support(A, np.array([2.0, 0.0]), SupportSet((1, 2), 2))
    assert np.allclose(z, [1, 1])


def test_spectral_norm_examples():
    assert spectral_norm(np.eye(3)) == pytest.approx(1.0, abs=1e-12)
    assert spectral_norm(np.diag([3.0, 1.0])) == pytest.approx(3.0, abs=1e-12)
    assert spectral_norm(np.zeros((2, 2))) == 0.0


def test_spectral_norm_jacobi_oracle():
    rng = np.random.default_rng(2)
    for _ in range(5):
        A = rng.standard_normal((5, 7))
        expected = np.sqrt(jacobi_eigvals(A @ A.T)[-1])
        assert spectral_norm(A) == pytest.approx(expected, abs=1e-8)


def test_spectral_norm_start_in_null_space():
    A = np.array([[1.0, -1.0]])
    assert spectral_norm(A) == pytest.approx(np.sqrt(2), abs=1e-12)


def test_spectral_norm_warns_on_max_iter():
    A = np.diag([1.0, 0.99]) @ np.array([[2.0, 1], [-1, 3]])
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        spectral_norm(A, tol=1e-16, max_iter=2)
    assert any(issubclass(w.category, ConvergenceWarning) for w in caught)


def test_normalize_columns():
    A = np.array([[3.0, 0], [4, 2]])
    B, scales = normalize_columns(A)
    assert np.allclose(B, [[0.6, 0], [0.8, 1]])
    assert scales.tolist() == [5, 2]
    Q = np.eye(3)
    B, scales = normalize_columns(Q)
    assert np.array_equal(B, Q) and scales.tolist() == [1, 1, 1]
    with pytest.raises(ValueError, match="column 2"):
        normalize_columns(np.array([[1.0, 0], [1, 0]]))


def test_csv_roundtrip(tmp_path):
    rng = np.random.default_rng(3)
    A = rng.standard_normal((4, 3))
    write_csv(tmp_path / "a.csv", A)
    assert np.array_equal(read_csv(tmp_path / "a.csv"), A)
    v = rng.standard_normal(5)
    write_csv(tmp_path / "v.csv", v)
    assert np.array_equal(read_csv(tmp_path / "v.csv"), v)
    assert b"\r" not in (tmp_path / "v.csv").read_bytes()
