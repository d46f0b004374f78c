"""Seeded generation of Gaussian measurement matrices and sparse-in-levels
signals.

Every draw comes from a Philox counter-based generator keyed by a 64-bit
seed, turned into normals by the Box-Muller transform and consumed in
row-major order. Same seed, same bytes.
"""
from __future__ import annotations

import hashlib

import numpy as np

from .levels import LevelStructure, hard_threshold

__all__ = [
    "MASK64",
    "standard_normal",
    "gaussian_matrix",
    "random_levels_signal",
    "derive_trial_seed",
    "splitmix64",
]

MASK64 = (1 << 64) - 1


def _check_seed(seed: int) -> int:
    seed = int(seed)
    if not 0 <= seed <= MASK64:
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
    return seed


def standard_normal(seed: int, n: int) -> np.ndarray:
    """``n`` i.i.d. N(0, 1) samples via Box-Muller on Philox uniforms."""
    rng = np.random.Generator(np.random.Philox(_check_seed(seed)))
    pairs = (n + 1) // 2
    u = rng.random((pairs, 2))
    radius = np.sqrt(-2.0 * np.log1p(-u[:, 0]))  # 1 - u lies in (0, 1]
    angle = 2.0 * np.pi * u[:, 1]
    z = np.empty((pairs, 2))
    z[:, 0] = radius * np.cos(angle)
    z[:, 1] = radius * np.sin(angle)
    return z.ravel()[:n]


def gaussian_matrix(m: int, N: int, seed: int) -> np.ndarray:
    """``m x N`` matrix with i.i.d. N(0, 1/m) entries."""
    if m < 1 or N < 1:
        raise ValueError("matrix dimensions must be positive")
    return standard_normal(seed, m * N).reshape(m, N) / np.sqrt(m)


def random_levels_signal(ls: LevelStructure, seed: int) -> np.ndarray:
    """Hard-threshold (in levels) a standard Gaussian vector."""
    return hard_threshold(standard_normal(seed, ls.N), ls)


def splitmix64(z: int) -> int:
    z = (z + 0x9E3779B97F4A7C15) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def _tag_hash(tag: str) -> int:
    digest = hashlib.blake2b(tag.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def derive_trial_seed(base: int, trial_index: int, cell_tag: str = "") -> int:
    """Mix ``(base, cell_tag, trial_index)`` into an independent 64-bit seed."""
    if trial_index < 0:
        raise ValueError("trial_index must be non-negative")
    z = splitmix64(_check_seed(base) ^ _tag_hash(cell_tag))
    return splitmix64(z ^ splitmix64(int(trial_index) & MASK64))
