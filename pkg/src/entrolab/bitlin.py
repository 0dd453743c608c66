"""GF(2) linear algebra on word-packed bit vectors.

Coordinate i of a vector is bit i of its integer encoding (LSB first),
so the integer 0b110 encodes the vector (0, 1, 1). Vectors carry at
most 64 coordinates; desk-scale instances never need more. Matrices
store one packed integer per row.

Randomized helpers take an explicit numpy Generator. Streams are
derived from a master seed through SeedSequence spawning, so any
experiment is reproducible from one integer.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

MAX_BITS = 64


def make_rng(seed: int | np.random.SeedSequence) -> np.random.Generator:
    """Counter-based generator for one reproducible stream."""
    if not isinstance(seed, np.random.SeedSequence):
        seed = np.random.SeedSequence(seed)
    return np.random.Generator(np.random.Philox(seed))


def spawn_rngs(seed: int, count: int) -> list[np.random.Generator]:
    """`count` independent child streams of a master seed."""
    assert count >= 0
    return [make_rng(child) for child in np.random.SeedSequence(seed).spawn(count)]


def parity_words(words: np.ndarray) -> np.ndarray:
    """Per-element parity (popcount mod 2) of a uint64 array."""
    return (np.bitwise_count(words) & np.uint8(1)).astype(np.uint8)


@dataclass(frozen=True)
class BitVec:
    """Bit vector in {0,1}^n packed into one integer word."""

    n: int
    word: int

    def __post_init__(self) -> None:
        assert 0 < self.n <= MAX_BITS, "width out of range"
        assert 0 <= self.word < (1 << self.n), "word has bits beyond width"

    @classmethod
    def from_bits(cls, bits: Iterable[int]) -> "BitVec":
        seq = list(bits)
        word = 0
        for i, b in enumerate(seq):
            assert b in (0, 1)
            word |= b << i
        return cls(len(seq), word)

    @classmethod
    def zero(cls, n: int) -> "BitVec":
        return cls(n, 0)

    def bit(self, i: int) -> int:
        assert 0 <= i < self.n
        return (self.word >> i) & 1

    def bits(self) -> list[int]:
        return [(self.word >> i) & 1 for i in range(self.n)]

    def weight(self) -> int:
        return self.word.bit_count()

    def __xor__(self, other: "BitVec") -> "BitVec":
        assert self.n == other.n, "width mismatch"
        return BitVec(self.n, self.word ^ other.word)


def inner_product(a: BitVec, b: BitVec) -> int:
    """Mod-2 inner product <a, b>."""
    assert a.n == b.n, "width mismatch"
    return (a.word & b.word).bit_count() & 1


@dataclass(frozen=True)
class BitMatrix:
    """k x n matrix over GF(2), one packed integer per row."""

    k: int
    n: int
    rows: tuple[int, ...]

    def __post_init__(self) -> None:
        assert 0 < self.k <= MAX_BITS and 0 < self.n <= MAX_BITS
        assert len(self.rows) == self.k
        for r in self.rows:
            assert 0 <= r < (1 << self.n), "row has bits beyond width"

    @classmethod
    def from_rows(cls, rows: Iterable[BitVec]) -> "BitMatrix":
        seq = list(rows)
        assert seq, "empty matrix"
        n = seq[0].n
        assert all(r.n == n for r in seq)
        return cls(len(seq), n, tuple(r.word for r in seq))

    def row(self, i: int) -> BitVec:
        assert 0 <= i < self.k
        return BitVec(self.n, self.rows[i])


def mat_vec_mul(mat: BitMatrix, x: BitVec) -> BitVec:
    """R x over GF(2); output bit i is <row_i, x>."""
    assert mat.n == x.n, "width mismatch"
    word = 0
    for i, r in enumerate(mat.rows):
        word |= ((r & x.word).bit_count() & 1) << i
    return BitVec(mat.k, word)


def random_bitvec(n: int, rng: np.random.Generator) -> BitVec:
    assert 0 < n <= MAX_BITS
    return BitVec(n, int(random_words(n, 1, rng)[0]))


def random_matrix(k: int, n: int, rng: np.random.Generator) -> BitMatrix:
    """Uniform k x n matrix over GF(2)."""
    assert 0 < k <= MAX_BITS and 0 < n <= MAX_BITS
    return BitMatrix(k, n, tuple(int(w) for w in random_words(n, k, rng)))


def random_words(n: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """`count` uniform n-bit words as a uint64 array."""
    assert 0 < n <= MAX_BITS
    if n == MAX_BITS:
        return rng.integers(0, 1 << 63, size=count, dtype=np.uint64) ^ (
            rng.integers(0, 2, size=count, dtype=np.uint64) << np.uint64(63)
        )
    return rng.integers(0, 1 << n, size=count, dtype=np.uint64)


def leftover_hash_extract(x: BitVec, seed_matrix: BitMatrix, out_len: int) -> BitVec:
    """First `out_len` bits of seed_matrix x.

    With a uniform seed matrix this is a two-universal hash family; for a
    source of min-entropy k the output is within 2**((out_len - k) / 2)
    statistical distance of uniform given the seed.
    """
    assert 0 < out_len <= seed_matrix.k
    y = mat_vec_mul(seed_matrix, x)
    return BitVec(out_len, y.word & ((1 << out_len) - 1))
