"""Weighted norms, best-approximation error, RICL certification and the
recovery-guarantee constants for IHTL, CoSaMPL and weighted QCBP."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .levels import LevelStructure, SupportSet, hard_threshold
from .linalg import as_matrix

__all__ = [
    "LevelWeights",
    "GuaranteeReport",
    "EnumerationCapError",
    "unit_weights",
    "default_weights",
    "weighted_l1_norm",
    "zeta_xi",
    "best_approx_error",
    "count_supports",
    "enumerate_supports",
    "ricl_bruteforce",
    "ricl_worst_case",
    "iht_guarantee",
    "cosamp_guarantee",
    "qcbp_threshold",
    "gaussian_sample_bound",
    "IHT_THRESHOLD",
    "COSAMP_THRESHOLD",
]

DEFAULT_CAP = 10**6

IHT_THRESHOLD = 1 / math.sqrt(3)
# rho < 1 iff 6 d^4 + 3 d^2 - 1 < 0, i.e. d^2 < (sqrt(11/3) - 1) / 4
COSAMP_THRESHOLD = math.sqrt((math.sqrt(11 / 3) - 1) / 4)


@dataclass(frozen=True)
class LevelWeights:
    per_level: tuple[float, ...]

    def __post_init__(self):
        w = tuple(float(v) for v in self.per_level)
        if not w or any(not v > 0 for v in w):
            raise ValueError("weights must be nonempty and strictly positive")
        object.__setattr__(self, "per_level", w)

    def expand(self, ls: LevelStructure) -> np.ndarray:
        """Per-index weight vector of length N."""
        self._check(ls)
        return np.repeat(np.array(self.per_level), ls.widths)

    def _check(self, ls: LevelStructure):
        if len(self.per_level) != ls.r:
            raise ValueError(
                f"{len(self.per_level)} weights for a {ls.r}-level structure")


@dataclass(frozen=True)
class GuaranteeReport:
    condition_threshold: float
    condition_met: bool
    rho: float
    tau_bound: float
    notes: str = ""


class EnumerationCapError(ValueError):
    def __init__(self, count: int, cap: int):
        super().__init__(f"{count} supports to enumerate exceeds cap {cap}")
        self.count = count
        self.cap = cap


def unit_weights(ls: LevelStructure) -> LevelWeights:
    return LevelWeights((1.0,) * ls.r)


def default_weights(ls: LevelStructure) -> LevelWeights:
    """Weights ``sqrt(s / s_k)``; undefined when some ``s_k`` is zero."""
    if any(s == 0 for s in ls.sparsities):
        raise ValueError("optimal weights undefined for empty level")
    s = ls.total
    return LevelWeights(tuple(math.sqrt(s / sk) for sk in ls.sparsities))


def weighted_l1_norm(x, ls: LevelStructure, w: LevelWeights) -> float:
    x = np.asarray(x, dtype=float)
    if x.shape != (ls.N,):
        raise ValueError(f"expected vector of length {ls.N}")
    w._check(ls)
    return float(sum(wk * np.abs(x[lo:hi]).sum()
                     for wk, (lo, hi) in zip(w.per_level, ls.bounds)))


def zeta_xi(ls: LevelStructure, w: LevelWeights) -> tuple[float, float]:
    """``zeta = sum w_k^2 s_k`` and ``xi = min w_k^2 s_k`` over nonempty levels."""
    w._check(ls)
    terms = [wk * wk * sk for wk, sk in zip(w.per_level, ls.sparsities)]
    active = [t for t, sk in zip(terms, ls.sparsities) if sk > 0]
    if not active:
        raise ValueError("all local sparsities are zero")
    return float(sum(terms)), float(min(active))


def best_approx_error(x, ls: LevelStructure, w: LevelWeights) -> float:
    """Weighted-l1 distance from ``x`` to the (s, M)-sparse model set.

    Weights are constant on levels, so keeping the largest entries per level
    is optimal.
    """
    x = np.asarray(x, dtype=float)
    return weighted_l1_norm(x - hard_threshold(x, ls), ls, w)


def count_supports(ls: LevelStructure) -> int:
    return math.prod(math.comb(w, s) for w, s in zip(ls.widths, ls.sparsities))


def enumerate_supports(ls: LevelStructure):
    """Yield 0-based index tuples of every maximal support in D_{s,M}."""
    per_level = [itertools.combinations(range(lo, hi), s)
                 for (lo, hi), s in zip(ls.bounds, ls.sparsities)]
    for combo in itertools.product(*per_level):
        yield tuple(itertools.chain.from_iterable(combo))


def ricl_worst_case(A, ls: LevelStructure, cap: int = DEFAULT_CAP,
                    chunk: int = 4096) -> tuple[float, SupportSet]:
    """RICL ``delta_{s,M}`` and a support attaining it.

    Maximises ``||A_S^T A_S - I||_2`` over supports with exactly ``s_k``
    indices per level; smaller supports give principal submatrices whose
    eigenvalues interlace, so they can never do worse.
    """
    A = as_matrix(A)
    if A.shape[1] != ls.N:
        raise ValueError(f"structure is for N={ls.N} but A has {A.shape[1]} columns")
    count = count_supports(ls)
    if count > cap:
        raise EnumerationCapError(count, cap)
    k = ls.total
    if k == 0:
        return 0.0, SupportSet((), ls.N)
    G = A.T @ A
    eye = np.eye(k)
    best, best_support = -1.0, None
    it = enumerate_supports(ls)
    while True:
        block = list(itertools.islice(it, chunk))
        if not block:
            break
        idx = np.array(block, dtype=np.intp)
        sub = G[idx[:, :, None], idx[:, None, :]] - eye
        eig = np.linalg.eigvalsh(sub)
        dev = np.abs(eig).max(axis=1)
        j = int(np.argmax(dev))
        if dev[j] > best:
            best, best_support = float(dev[j]), block[j]
    return best, SupportSet.from_zero_based(best_support, ls.N)


def ricl_bruteforce(A, ls: LevelStructure, cap: int = DEFAULT_CAP) -> float:
    return ricl_worst_case(A, ls, cap)[0]


def _check_delta(delta: float):
    if not 0 <= delta < 1:
        raise ValueError(f"delta must lie in [0, 1), got {delta}")


def iht_guarantee(delta_6s: float) -> GuaranteeReport:
    """IHTL: contraction ``rho = sqrt(3) delta`` and noise factor ``tau``."""
    _check_delta(delta_6s)
    rho = math.sqrt(3) * delta_6s
    met = delta_6s < IHT_THRESHOLD
    tau = math.sqrt(3) * math.sqrt(1 + delta_6s) / (1 - rho) if met else math.inf
    notes = "requires delta_{6s,M} < 1/sqrt(3); IHTL run with (2s, M)"
    if met:
        notes += f"; tau <= 2.18/(1-rho) = {2.18 / (1 - rho):.6g}"
    return GuaranteeReport(IHT_THRESHOLD, met, rho, tau, notes)


def cosamp_guarantee(delta_8s: float) -> GuaranteeReport:
    _check_delta(delta_8s)
    d2 = delta_8s * delta_8s
    rho = math.sqrt(2 * d2 * (1 + 3 * d2) / (1 - d2))
    met = delta_8s < COSAMP_THRESHOLD
    if met:
        step = (math.sqrt(2 * (1 + delta_8s) * (1 + 3 * d2) / (1 - d2))
                + 2 * math.sqrt(1 + delta_8s) / (1 - delta_8s))
        tau = step / (1 - rho)
    else:
        tau = math.inf
    notes = "requires delta_{8s,M} < sqrt((sqrt(11/3)-1)/4); CoSaMPL run with (2s, M)"
    return GuaranteeReport(COSAMP_THRESHOLD, met, rho, tau, notes)


def qcbp_threshold(ls: LevelStructure, w: LevelWeights) -> float:
    """Admissible ``delta_{2s,M}`` for weighted QCBP: ``1/(sqrt(2 zeta/xi) + 1)``."""
    zeta, xi = zeta_xi(ls, w)
    return 1.0 / (math.sqrt(2 * zeta / xi) + 1.0)


def gaussian_sample_bound(ls: LevelStructure, delta: float, eps: float,
                          C: float = 1.0) -> float:
    """Measurements sufficient for ``delta_{s,M} <= delta`` w.p. ``1 - eps``
    with an N(0, 1/m) Gaussian matrix, up to the unspecified constant ``C``."""
    if not 0 < delta < 1 or not 0 < eps < 1:
        raise ValueError("delta and eps must lie in (0, 1)")
    if not C > 0:
        raise ValueError("C must be positive")
    total = sum(s * math.log(math.e * w / s)
                for s, w in zip(ls.sparsities, ls.widths) if s > 0)
    return C * (total + math.log(1 / eps)) / delta**2


def weights_from_name(name: str, ls: LevelStructure) -> LevelWeights:
    if name == "unit":
        return unit_weights(ls)
    if name == "optimal":
        return default_weights(ls)
    try:
        vals: Sequence[float] = [float(v) for v in name.split(",")]
    except ValueError:
        raise ValueError(f"unknown weights {name!r}") from None
    return LevelWeights(tuple(vals))
