"""Dense joint distributions over (x, z) pairs with exact entropy meters.

Tables are flat float64 arrays indexed by x * 2**m + z (row-major grid of
shape (2**n, 2**m)), small enough that every quantity of interest is an
exact sum, not an estimate. Normalization is checked at construction and
never silently repaired; renormalize explicitly where a contract says so.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

MAX_TABLE_BITS = 24
NORM_TOL = 1e-9


def _as_prob_array(probs, size: int) -> np.ndarray:
    arr = np.asarray(probs, dtype=np.float64).reshape(-1)
    if arr.size != size:
        raise ValueError(f"expected {size} entries, got {arr.size}")
    if np.any(arr < 0.0):
        raise ValueError("negative probability entry")
    return arr


@dataclass(frozen=True)
class JointTable:
    """Explicit joint distribution of X in {0,1}^n and Z in {0,1}^m."""

    n: int
    m: int
    probs: np.ndarray

    def __post_init__(self) -> None:
        if self.n < 0 or self.m < 0 or self.n + self.m > MAX_TABLE_BITS:
            raise ValueError("table dimensions out of range")
        arr = _as_prob_array(self.probs, 1 << (self.n + self.m))
        total = float(arr.sum())
        if abs(total - 1.0) > NORM_TOL:
            raise ValueError(f"probabilities sum to {total}, not 1")
        arr.flags.writeable = False
        object.__setattr__(self, "probs", arr)

    @property
    def grid(self) -> np.ndarray:
        """(2**n, 2**m) view; [x, z] is the joint mass."""
        return self.probs.reshape(1 << self.n, 1 << self.m)

    def z_marginal(self) -> np.ndarray:
        return self.grid.sum(axis=0)

    def conditional(self) -> "ConditionalTable":
        """Explicit renormalization of each z column; zero-mass z stays zero."""
        p_z = self.z_marginal()
        cond = np.zeros_like(self.grid)
        active = p_z > 0.0
        cond[:, active] = self.grid[:, active] / p_z[active]
        return ConditionalTable(self.n, self.m, cond, p_z)

    def sample(self, count: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
        """(xs, zs) drawn jointly, as uint64 arrays."""
        idx = rng.choice(self.probs.size, size=count, p=self.probs)
        return (idx >> self.m).astype(np.uint64), (idx & ((1 << self.m) - 1)).astype(np.uint64)


@dataclass(frozen=True)
class ConditionalTable:
    """Per-z conditional distributions plus the Z marginal."""

    n: int
    m: int
    cond: np.ndarray
    p_z: np.ndarray

    def __post_init__(self) -> None:
        cond = np.asarray(self.cond, dtype=np.float64)
        p_z = np.asarray(self.p_z, dtype=np.float64)
        if cond.shape != (1 << self.n, 1 << self.m) or p_z.shape != (1 << self.m,):
            raise ValueError("shape mismatch")
        if np.any(cond < 0.0) or np.any(p_z < 0.0):
            raise ValueError("negative probability entry")
        if abs(float(p_z.sum()) - 1.0) > NORM_TOL:
            raise ValueError("Z marginal does not sum to 1")
        active = p_z > 0.0
        col_sums = cond[:, active].sum(axis=0)
        if np.any(np.abs(col_sums - 1.0) > NORM_TOL):
            raise ValueError("conditional column does not sum to 1")
        cond = cond.copy()
        p_z = p_z.copy()
        cond.flags.writeable = False
        p_z.flags.writeable = False
        object.__setattr__(self, "cond", cond)
        object.__setattr__(self, "p_z", p_z)

    def joint(self) -> JointTable:
        return JointTable(self.n, self.m, (self.cond * self.p_z[None, :]).reshape(-1))


def min_entropy(probs) -> float:
    """-log2 of the largest atom; ValueError on empty or zero-mass input."""
    arr = np.asarray(probs, dtype=np.float64).reshape(-1)
    if arr.size == 0:
        raise ValueError("empty distribution")
    top = float(arr.max())
    if top <= 0.0:
        raise ValueError("distribution has no mass")
    return -float(np.log2(top))


def unbounded_guess_prob(table: JointTable) -> float:
    """Success of the best z-aware guesser: sum_z max_x P[x, z]."""
    return float(table.grid.max(axis=0).sum())


def avg_min_entropy(table: JointTable) -> float:
    """Average conditional min-entropy -log2 E_z max_x P[X=x | Z=z]."""
    return -float(np.log2(unbounded_guess_prob(table)))


def stat_distance(t1: JointTable, t2: JointTable) -> float:
    """Total variation distance between two tables of identical shape."""
    if (t1.n, t1.m) != (t2.n, t2.m):
        raise ValueError("table shapes differ")
    return 0.5 * float(np.abs(t1.probs - t2.probs).sum())


class SingletonEq:
    """Verification oracle for one hidden n-bit value.

    Counts how many candidate words it has inspected; match_words is the
    vectorized path used on large decode lists and returns the index of
    the first hit.
    """

    def __init__(self, n: int, x_word: int):
        assert 0 < n <= 64 and 0 <= x_word < (1 << n)
        self.n = n
        self._x = x_word
        self.queries = 0

    def __call__(self, candidate) -> bool:
        word = candidate if isinstance(candidate, int) else candidate.word
        self.queries += 1
        return word == self._x

    def match_words(self, words: np.ndarray) -> int | None:
        self.queries += int(words.size)
        hits = np.flatnonzero(words == np.uint64(self._x))
        return int(hits[0]) if hits.size else None


@dataclass(frozen=True)
class PlantedSupport:
    """Hidden structure behind a planted source: per-z support sets.

    supports[z] lists the 2**k_src words carrying mass given z. eq_for
    hands out singleton verification oracles; sample_assignment draws one
    consistent secret x*(z) ~ X|Z=z for every z.
    """

    n: int
    m: int
    k_src: int
    supports: np.ndarray  # (2**m, 2**k_src) uint64

    def support(self, z: int) -> np.ndarray:
        return self.supports[z]

    def eq_for(self, x_word: int) -> SingletonEq:
        return SingletonEq(self.n, x_word)

    def sample_assignment(self, rng: np.random.Generator) -> np.ndarray:
        cols = rng.integers(0, self.supports.shape[1], size=self.supports.shape[0])
        return self.supports[np.arange(self.supports.shape[0]), cols]


def planted_source(n: int, k: int, m: int, rng: np.random.Generator) -> tuple[JointTable, PlantedSupport]:
    """Joint table with X|z uniform on a fresh random 2**k subset per z.

    Z is uniform. Average conditional min-entropy is k exactly.
    """
    if not (0 <= k <= n) or n + m > MAX_TABLE_BITS:
        raise ValueError("dimensions out of range")
    grid = np.zeros((1 << n, 1 << m))
    supports = np.empty((1 << m, 1 << k), dtype=np.uint64)
    mass = 1.0 / ((1 << m) * (1 << k))
    for z in range(1 << m):
        sup = rng.choice(1 << n, size=1 << k, replace=False)
        sup.sort()
        supports[z] = sup.astype(np.uint64)
        grid[sup, z] = mass
    table = JointTable(n, m, grid.reshape(-1))
    return table, PlantedSupport(n, m, k, supports)


def save_table(table: JointTable, path: str | Path) -> None:
    """Plain-text round trip; float repr preserves every bit."""
    doc = {"n": table.n, "m": table.m, "probs": [float(p) for p in table.probs]}
    Path(path).write_text(json.dumps(doc))


def load_table(path: str | Path) -> JointTable:
    doc = json.loads(Path(path).read_text())
    return JointTable(int(doc["n"]), int(doc["m"]), np.array(doc["probs"], dtype=np.float64))
