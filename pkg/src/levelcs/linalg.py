"""Dense real kernels: products, restricted least squares, norms, CSV I/O."""
from __future__ import annotations

import warnings

import numpy as np
import scipy.linalg as sla

from .levels import SupportSet

__all__ = [
    "ConvergenceWarning",
    "apply",
    "least_squares_on_support",
    "spectral_norm",
    "normalize_columns",
    "read_csv",
    "write_csv",
]

RANK_RTOL = 1e-12


class ConvergenceWarning(UserWarning):
    pass


def as_matrix(A) -> np.ndarray:
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] < 1 or A.shape[1] < 1:
        raise ValueError(f"expected a nonempty 2-D matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix has non-finite entries")
    return A


def apply(A, x, adjoint: bool = False) -> np.ndarray:
    """``A @ x``, or ``A.T @ x`` when ``adjoint`` is set."""
    A = np.asarray(A, dtype=float)
    x = np.asarray(x, dtype=float)
    n = A.shape[0] if adjoint else A.shape[1]
    if x.ndim != 1 or x.shape[0] != n:
        raise ValueError(f"vector length {x.shape} does not match {n}")
    return A.T @ x if adjoint else A @ x


def lstsq_columns(A: np.ndarray, y: np.ndarray, cols: np.ndarray) -> np.ndarray:
    """Coefficients minimising ``||y - A[:, cols] z||`` (0-based ``cols``).

    LAPACK ``gelsy``: Householder QR with column pivoting, rank cut at
    ``RANK_RTOL`` relative to the leading diagonal entry, and the
    minimum-norm solution when the submatrix is rank deficient.
    """
    if cols.size == 0:
        return np.zeros(0)
    z, _, _, _ = sla.lstsq(A[:, cols], y, cond=RANK_RTOL,
                           lapack_driver="gelsy", check_finite=False)
    return z


def least_squares_on_support(A, y, support: SupportSet) -> np.ndarray:
    """Vector supported on ``support`` that minimises ``||y - Az||_2``."""
    A = np.asarray(A, dtype=float)
    y = np.asarray(y, dtype=float)
    if y.ndim != 1 or y.shape[0] != A.shape[0]:
        raise ValueError("measurement length does not match matrix rows")
    if support.N != A.shape[1]:
        raise ValueError("support dimension does not match matrix columns")
    cols = support.zero_based
    out = np.zeros(A.shape[1])
    out[cols] = lstsq_columns(A, y, cols)
    return out


def spectral_norm(A, tol: float = 1e-12, max_iter: int = 10_000,
                  restart_seed: int = 0) -> float:
    """Largest singular value by power iteration on ``A^T A``.

    Starts from the normalised all-ones vector. If that start is (numerically)
    in the null space of ``A`` a seeded random start is used instead. Emits
    :class:`ConvergenceWarning` and returns the last estimate when ``max_iter``
    is reached.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    A = as_matrix(A)
    n = A.shape[1]
    v = np.full(n, 1.0 / np.sqrt(n))
    w = A.T @ (A @ v)
    if np.linalg.norm(w) <= 1e-14 * np.abs(A).max() ** 2:
        v = np.random.default_rng(restart_seed).standard_normal(n)
        v /= np.linalg.norm(v)
        w = A.T @ (A @ v)
    lam = float(v @ w)
    for _ in range(max_iter):
        nw = np.linalg.norm(w)
        if nw == 0.0:
            return 0.0
        v = w / nw
        w = A.T @ (A @ v)
        new = float(v @ w)
        if abs(new - lam) <= tol * abs(new):
            return float(np.sqrt(new))
        lam = new
    warnings.warn(f"power iteration did not converge in {max_iter} steps",
                  ConvergenceWarning, stacklevel=2)
    return float(np.sqrt(lam))


def normalize_columns(A) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(A / scales, scales)`` with ``scales`` the column 2-norms.

    A solution ``z`` of the normalised problem maps back as ``z / scales``.
    """
    A = as_matrix(A)
    scales = np.linalg.norm(A, axis=0)
    if np.any(scales == 0):
        bad = int(np.flatnonzero(scales == 0)[0]) + 1
        raise ValueError(f"column {bad} is zero")
    return A / scales, scales


def read_csv(path) -> np.ndarray:
    """Headerless comma-separated doubles; a single column reads as a vector."""
    data = np.loadtxt(path, delimiter=",", ndmin=2)
    if data.shape[1] == 1:
        return data[:, 0]
    return data


def write_csv(path, data) -> None:
    data = np.asarray(data, dtype=float)
    if data.ndim == 1:
        data = data[:, None]
    with open(path, "w", newline="\n") as fh:
        for row in data:
            fh.write(",".join(repr(float(v)) for v in row) + "\n")
