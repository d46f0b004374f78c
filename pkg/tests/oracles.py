"""Independent reference implementations used only by the tests.

Nothing here calls into the package's thresholding or solver code.
"""
import itertools
import math

import numpy as np
import scipy.linalg as sla


def level_ranges(levels):
    lo = 0
    for hi in levels:
        yield lo, hi
        lo = hi


def all_supports(levels, sparsities):
    """Every maximal index set with s_k indices in level k (0-based)."""
    per_level = [list(itertools.combinations(range(lo, hi), s))
                 for (lo, hi), s in zip(level_ranges(levels), sparsities)]
    for combo in itertools.product(*per_level):
        yield tuple(sorted(itertools.chain.from_iterable(combo)))


def brute_best_l2(x, levels, sparsities):
    """(support, approximation) minimising ||x - z||_2 over the model set."""
    best, best_S = math.inf, None
    for S in all_supports(levels, sparsities):
        z = np.zeros_like(x)
        z[list(S)] = x[list(S)]
        d = np.linalg.norm(x - z)
        if d < best:
            best, best_S = d, S
    z = np.zeros_like(x)
    z[list(best_S)] = x[list(best_S)]
    return best_S, z


def brute_best_weighted_l1(x, levels, sparsities, weights):
    w = np.concatenate([np.full(hi - lo, wk) for (lo, hi), wk
                        in zip(level_ranges(levels), weights)])
    best = math.inf
    for S in all_supports(levels, sparsities):
        mask = np.ones(len(x), bool)
        mask[list(S)] = False
        best = min(best, float(np.sum(w[mask] * np.abs(x[mask]))))
    return best


def naive_matvec(A, x):
    m, n = len(A), len(A[0])
    out = [0.0] * m
    for i in range(m):
        acc = 0.0
        for j in range(n):
            acc += A[i][j] * x[j]
        out[i] = acc
    return np.array(out)


def jacobi_eigvals(S, tol=1e-14, sweeps=100):
    """Eigenvalues of a symmetric matrix by cyclic Jacobi rotations."""
    a = np.array(S, dtype=float)
    n = a.shape[0]
    for _ in range(sweeps):
        off = math.sqrt(sum(a[p, q] ** 2 for p in range(n) for q in range(n) if p != q))
        if off < tol * max(1.0, np.abs(a).max()):
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                if a[p, q] == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2 * a[p, q])
                t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1))
                c = 1 / math.sqrt(t * t + 1)
                s = t * c
                J = np.eye(n)
                J[p, p] = J[q, q] = c
                J[p, q], J[q, p] = s, -s
                a = J.T @ a @ J
    return np.sort(np.diag(a))


def _top_s(v, s):
    order = sorted(range(len(v)), key=lambda i: (-abs(v[i]), i))
    return sorted(order[:s])


def _stop(x_new, x_old, tol):
    change = np.linalg.norm(x_new - x_old)
    scale = np.linalg.norm(x_new)
    return (change < tol) if scale == 0.0 else (change / scale < tol)


def textbook_iht(A, y, s, tol=1e-4, max_iter=1000):
    """Classical IHT: x <- H_s(x + A^T (y - A x)). Returns all iterates."""
    x = np.zeros(A.shape[1])
    iterates = [x]
    for _ in range(max_iter):
        v = x + A.T @ (y - A @ x)
        keep = _top_s(v, s)
        x_new = np.zeros_like(v)
        x_new[keep] = v[keep]
        iterates.append(x_new)
        done = _stop(x_new, x, tol)
        x = x_new
        if done:
            break
    return iterates


def textbook_cosamp(A, y, s, tol=1e-4, max_iter=1000):
    """Classical CoSaMP with 2s merge, least squares and prune to s."""
    N = A.shape[1]
    x = np.zeros(N)
    iterates = [x]
    for _ in range(max_iter):
        g = A.T @ (y - A @ x)
        U = sorted(set(np.flatnonzero(x).tolist()) | set(_top_s(g, min(2 * s, N))))
        U = np.array(U, dtype=np.intp)
        u = np.zeros(N)
        u[U] = sla.lstsq(A[:, U], y, cond=1e-12, lapack_driver="gelsy",
                         check_finite=False)[0]
        keep = _top_s(u, s)
        x_new = np.zeros(N)
        x_new[keep] = u[keep]
        iterates.append(x_new)
        done = _stop(x_new, x, tol)
        x = x_new
        if done:
            break
    return iterates


def random_structure(rng, N_max=12, r_max=3, N_min=2):
    N = int(rng.integers(N_min, N_max + 1))
    r = int(rng.integers(1, min(r_max, N) + 1))
    cuts = sorted(rng.choice(np.arange(1, N), size=r - 1, replace=False).tolist()) if r > 1 else []
    levels = cuts + [N]
    widths = np.diff([0] + levels)
    sparsities = [int(rng.integers(0, w + 1)) for w in widths]
    return levels, sparsities
