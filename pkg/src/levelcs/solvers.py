"""IHTL, NIHTL, CoSaMPL and OMPL.

Passing a one-level structure ``LevelStructure((N,), (s,))`` gives the
classical IHT, NIHT, CoSaMP and OMP.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .levels import LevelStructure, scale_sparsities, threshold_with_support, top_indices
from .linalg import lstsq_columns

__all__ = [
    "StopReason",
    "SolveOptions",
    "SolveResult",
    "DivergenceError",
    "ihtl",
    "nihtl",
    "cosampl",
    "ompl",
    "SOLVERS",
]

DIVERGENCE_NORM = 1e12

# step-size backtracking constants for NIHTL
NIHT_C = 0.1
NIHT_KAPPA = 1.1 / (1 - NIHT_C)


class StopReason(enum.Enum):
    CONVERGED = "Converged"
    MAX_ITER = "MaxIter"
    FIXED_ITERATIONS = "FixedIterations"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class SolveOptions:
    max_iter: int = 1000
    rel_change_tol: float = 1e-4
    x0: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if not self.rel_change_tol > 0:
            raise ValueError("rel_change_tol must be positive")


@dataclass
class SolveResult:
    xhat: np.ndarray
    iterations: int
    residual_history: list[float] = field(default_factory=list)
    stop_reason: StopReason = StopReason.MAX_ITER
    selected: list[int] = field(default_factory=list)  # OMPL picks, 1-based, in order


class DivergenceError(RuntimeError):
    """Iterates blew up; ``last_iterate`` is the last finite one."""

    def __init__(self, message, last_iterate, iterations):
        super().__init__(message)
        self.last_iterate = last_iterate
        self.iterations = iterations


Callback = Callable[[int, np.ndarray], None]


def _prepare(A, y, ls: LevelStructure, opts: SolveOptions):
    A = np.asarray(A, dtype=float)
    y = np.asarray(y, dtype=float)
    if A.ndim != 2:
        raise ValueError("A must be a matrix")
    m, N = A.shape
    if y.ndim != 1 or y.shape[0] != m:
        raise ValueError(f"y has shape {y.shape}, expected ({m},)")
    if ls.N != N:
        raise ValueError(f"structure is for N={ls.N} but A has {N} columns")
    if opts.x0 is None:
        x = np.zeros(N)
    else:
        x = np.array(opts.x0, dtype=float)
        if x.shape != (N,):
            raise ValueError("x0 has the wrong length")
    return A, y, x


def _converged(x_new: np.ndarray, x_old: np.ndarray, tol: float) -> bool:
    change = np.linalg.norm(x_new - x_old)
    scale = np.linalg.norm(x_new)
    if scale == 0.0:
        return change < tol
    return change / scale < tol


def _guard(x_new: np.ndarray, x_old: np.ndarray, n: int):
    if not np.all(np.isfinite(x_new)) or np.linalg.norm(x_new) > DIVERGENCE_NORM:
        raise DivergenceError(f"iterates diverged at iteration {n}", x_old, n)


def _iterate(A, y, x, opts, step, callback):
    """Shared loop: ``step(n, x) -> x_new`` until the stopping rule fires."""
    history = [float(np.linalg.norm(y - A @ x))]
    if callback is not None:
        callback(0, x)
    for n in range(opts.max_iter):
        x_new = step(n, x)
        _guard(x_new, x, n + 1)
        history.append(float(np.linalg.norm(y - A @ x_new)))
        if callback is not None:
            callback(n + 1, x_new)
        done = _converged(x_new, x, opts.rel_change_tol)
        x = x_new
        if done:
            return SolveResult(x, n + 1, history, StopReason.CONVERGED)
    return SolveResult(x, opts.max_iter, history, StopReason.MAX_ITER)


def ihtl(A, y, ls: LevelStructure, opts: SolveOptions = SolveOptions(),
         callback: Optional[Callback] = None) -> SolveResult:
    """Iterative hard thresholding in levels with unit step.

    Assumes ``A`` has been scaled to (about) unit spectral norm.
    """
    A, y, x = _prepare(A, y, ls, opts)

    def step(n, x):
        return threshold_with_support(x + A.T @ (y - A @ x), ls)[0]

    return _iterate(A, y, x, opts, step, callback)


def nihtl(A, y, ls: LevelStructure, opts: SolveOptions = SolveOptions(),
          callback: Optional[Callback] = None) -> SolveResult:
    """Normalized IHT in levels.

    Step size ``mu = ||g_S||^2 / ||A g_S||^2`` on the current support ``S``.
    If thresholding changes the support, the step is kept only when
    ``mu <= (1 - c) ||dx||^2 / ||A dx||^2``; otherwise ``mu`` shrinks by
    ``kappa (1 - c)`` and the step is retried.
    """
    A, y, x = _prepare(A, y, ls, opts)
    state = {"support": None}

    def step(n, x):
        g = A.T @ (y - A @ x)
        support = state["support"]
        if support is None:
            support = top_indices(x if np.any(x) else g, ls)
        gs = g[support]
        denom = np.linalg.norm(A[:, support] @ gs) ** 2
        mu = float(gs @ gs) / denom if denom > 0 else 1.0
        while True:
            x_new, new_support = threshold_with_support(x + mu * g, ls)
            if np.array_equal(new_support, support):
                break
            dx = x_new - x
            adx = np.linalg.norm(A @ dx) ** 2
            if adx == 0 or mu <= (1 - NIHT_C) * float(dx @ dx) / adx:
                break
            mu /= NIHT_KAPPA * (1 - NIHT_C)
        state["support"] = new_support
        return x_new

    return _iterate(A, y, x, opts, step, callback)


def cosampl(A, y, ls: LevelStructure, opts: SolveOptions = SolveOptions(),
            callback: Optional[Callback] = None) -> SolveResult:
    """CoSaMP in levels: merge, restricted least squares, prune."""
    A, y, x = _prepare(A, y, ls, opts)
    ls2 = scale_sparsities(ls, 2)

    def step(n, x):
        g = A.T @ (y - A @ x)
        U = np.union1d(np.flatnonzero(x), top_indices(g, ls2))
        u = np.zeros_like(x)
        u[U] = lstsq_columns(A, y, U)
        return threshold_with_support(u, ls)[0]

    return _iterate(A, y, x, opts, step, callback)


def ompl(A, y, ls: LevelStructure, opts: SolveOptions = SolveOptions(),
         callback: Optional[Callback] = None) -> SolveResult:
    """Orthogonal matching pursuit in levels.

    Runs exactly ``ls.total`` greedy steps. A level stops taking picks once
    it holds ``s_k`` of them. When every admissible correlation is zero the
    lowest admissible unselected index is taken. ``opts`` only supplies ``x0``.
    """
    A, y, x = _prepare(A, y, ls, opts)
    N = A.shape[1]
    level_of = ls.level_ids()
    budget = np.array(ls.sparsities)
    counts = np.zeros(ls.r, dtype=int)
    admissible = budget[level_of] > 0
    selected: list[int] = []
    history = [float(np.linalg.norm(y - A @ x))]
    if callback is not None:
        callback(0, x)
    corr_scale = np.max(np.abs(A.T @ y), initial=0.0)
    for k in range(1, ls.total + 1):
        cand = np.flatnonzero(admissible)
        if cand.size == 0:
            raise RuntimeError("all levels saturated before s iterations")
        corr = np.abs(A.T @ (y - A @ x))[cand]
        best = int(np.argmax(corr))
        if corr[best] <= 1e-12 * corr_scale:
            best = 0
        j = int(cand[best])
        selected.append(j)
        admissible[j] = False
        lvl = level_of[j]
        counts[lvl] += 1
        if counts[lvl] == budget[lvl]:
            admissible[level_of == lvl] = False
        S = np.array(selected)
        x = np.zeros(N)
        x[S] = lstsq_columns(A, y, S)
        history.append(float(np.linalg.norm(y - A @ x)))
        if callback is not None:
            callback(k, x)
    return SolveResult(x, ls.total, history, StopReason.FIXED_ITERATIONS,
                       [j + 1 for j in selected])


SOLVERS = {"iht": ihtl, "niht": nihtl, "cosamp": cosampl, "omp": ompl}
