"""Sparsity-in-levels structures and the thresholding operators built on them.

Indices exposed through :class:`SupportSet` are 1-based. Everything that
operates on numpy arrays internally uses 0-based positions.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "LevelStructure",
    "SupportSet",
    "new_level_structure",
    "parse_structure",
    "scale_sparsities",
    "restrict",
    "level_slice",
    "top_support",
    "hard_threshold",
    "is_levels_sparse",
]


@dataclass(frozen=True)
class LevelStructure:
    """Level boundaries ``M_1 < ... < M_r = N`` and local sparsities ``s_k``."""

    levels: tuple[int, ...]
    sparsities: tuple[int, ...]

    def __post_init__(self):
        levels = tuple(int(v) for v in self.levels)
        sparsities = tuple(int(v) for v in self.sparsities)
        object.__setattr__(self, "levels", levels)
        object.__setattr__(self, "sparsities", sparsities)
        if not levels or not sparsities:
            raise ValueError("levels and sparsities must be nonempty")
        if len(levels) != len(sparsities):
            raise ValueError(
                f"got {len(levels)} levels but {len(sparsities)} sparsities")
        if levels[0] < 1:
            raise ValueError("first level boundary must be >= 1")
        prev = 0
        for k, (hi, s) in enumerate(zip(levels, sparsities), start=1):
            if hi <= prev:
                raise ValueError("levels not increasing")
            if s < 0:
                raise ValueError(f"negative sparsity s_{k} = {s}")
            if s > hi - prev:
                raise ValueError(f"s_{k} = {s} > level width {hi - prev}")
            prev = hi

    @property
    def N(self) -> int:
        return self.levels[-1]

    @property
    def r(self) -> int:
        return len(self.levels)

    @property
    def total(self) -> int:
        return sum(self.sparsities)

    @property
    def bounds(self) -> list[tuple[int, int]]:
        """0-based half-open ``(start, stop)`` ranges of every level."""
        starts = (0,) + self.levels[:-1]
        return list(zip(starts, self.levels))

    @property
    def widths(self) -> tuple[int, ...]:
        return tuple(hi - lo for lo, hi in self.bounds)

    def level_of(self, index: int) -> int:
        """1-based level number containing the 1-based ``index``."""
        if not 1 <= index <= self.N:
            raise IndexError(f"index {index} outside 1..{self.N}")
        for k, hi in enumerate(self.levels, start=1):
            if index <= hi:
                return k
        raise AssertionError("unreachable")

    def level_ids(self) -> np.ndarray:
        """0-based level number of every 0-based position."""
        return np.repeat(np.arange(self.r), self.widths)

    def __str__(self):
        return (",".join(map(str, self.levels)) + "/"
                + ",".join(map(str, self.sparsities)))


def new_level_structure(levels: Sequence[int],
                        sparsities: Sequence[int]) -> LevelStructure:
    return LevelStructure(tuple(levels), tuple(sparsities))


def parse_structure(text: str) -> LevelStructure:
    """Parse ``"M1,...,Mr/s1,...,sr"``, e.g. ``"32,64,96,128/6,2,6,2"``."""
    try:
        lev, spa = text.strip().split("/")
        levels = [int(v) for v in lev.split(",")]
        sparsities = [int(v) for v in spa.split(",")]
    except ValueError:
        raise ValueError(
            f"bad structure {text!r}; expected 'M1,...,Mr/s1,...,sr'") from None
    return LevelStructure(tuple(levels), tuple(sparsities))


def scale_sparsities(ls: LevelStructure, factor: int) -> LevelStructure:
    """Multiply every ``s_k`` by ``factor``, clamping at the level width."""
    if factor < 1:
        raise ValueError("factor must be >= 1")
    scaled = tuple(min(factor * s, w) for s, w in zip(ls.sparsities, ls.widths))
    return LevelStructure(ls.levels, scaled)


@dataclass(frozen=True)
class SupportSet:
    """Sorted, duplicate-free set of 1-based indices into ``{1, ..., N}``."""

    indices: tuple[int, ...]
    N: int

    def __post_init__(self):
        idx = tuple(sorted(set(int(i) for i in self.indices)))
        if len(idx) != len(self.indices):
            raise ValueError("duplicate indices in support")
        if idx and (idx[0] < 1 or idx[-1] > self.N):
            raise ValueError(f"indices must lie in 1..{self.N}")
        object.__setattr__(self, "indices", idx)

    @classmethod
    def from_zero_based(cls, positions: Iterable[int], N: int) -> "SupportSet":
        return cls(tuple(int(p) + 1 for p in positions), N)

    @property
    def zero_based(self) -> np.ndarray:
        return np.asarray(self.indices, dtype=np.intp) - 1

    def __len__(self):
        return len(self.indices)

    def __iter__(self):
        return iter(self.indices)

    def __contains__(self, i):
        return i in self.indices


def _check_dim(x: np.ndarray, N: int):
    if x.ndim != 1 or x.shape[0] != N:
        raise ValueError(f"expected vector of length {N}, got shape {x.shape}")


def restrict(x, support: SupportSet) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    _check_dim(x, support.N)
    out = np.zeros_like(x)
    idx = support.zero_based
    out[idx] = x[idx]
    return out


def level_slice(x, ls: LevelStructure, k: int) -> np.ndarray:
    """Keep level ``k`` (1-based) of ``x`` and zero the rest."""
    x = np.asarray(x, dtype=float)
    _check_dim(x, ls.N)
    if not 1 <= k <= ls.r:
        raise IndexError(f"level {k} outside 1..{ls.r}")
    lo, hi = ls.bounds[k - 1]
    out = np.zeros_like(x)
    out[lo:hi] = x[lo:hi]
    return out


def top_indices(x: np.ndarray, ls: LevelStructure) -> np.ndarray:
    """0-based sorted positions of the ``s_k`` largest |x_i| in each level.

    Exactly ``s_k`` positions come back per level, zero entries included.
    Ties go to the lowest index.
    """
    mag = np.abs(x)
    picks = []
    for (lo, hi), s in zip(ls.bounds, ls.sparsities):
        if s == 0:
            continue
        if s == hi - lo:
            picks.append(np.arange(lo, hi))
            continue
        order = np.argsort(-mag[lo:hi], kind="stable")[:s]
        picks.append(np.sort(order) + lo)
    if not picks:
        return np.zeros(0, dtype=np.intp)
    return np.concatenate(picks).astype(np.intp, copy=False)


def top_support(x, ls: LevelStructure) -> SupportSet:
    x = np.asarray(x, dtype=float)
    _check_dim(x, ls.N)
    return SupportSet.from_zero_based(top_indices(x, ls), ls.N)


def threshold_with_support(x: np.ndarray,
                           ls: LevelStructure) -> tuple[np.ndarray, np.ndarray]:
    idx = top_indices(x, ls)
    out = np.zeros_like(x)
    out[idx] = x[idx]
    return out, idx


def hard_threshold(x, ls: LevelStructure) -> np.ndarray:
    """Best l2 approximation of ``x`` in the (s, M)-sparse model set."""
    x = np.asarray(x, dtype=float)
    _check_dim(x, ls.N)
    return threshold_with_support(x, ls)[0]


def is_levels_sparse(x, ls: LevelStructure) -> bool:
    x = np.asarray(x)
    _check_dim(x, ls.N)
    for (lo, hi), s in zip(ls.bounds, ls.sparsities):
        if np.count_nonzero(x[lo:hi]) > s:
            return False
    return True
