"""List decoding of the binary Hadamard code from erasure-prone oracles.

An oracle answers parity queries <r, x> about a hidden n-bit word x,
but may abstain (erasure) or lie (error). The decoder draws l seed
queries, expands them to all 2**l subset combinations (pairwise
independent by linearity), queries each combination shifted by every
unit vector, and majority-votes each bit of x once per guess sigma of
the l seed parities. One candidate per sigma gives a list of 2**l words.

Vote aggregation runs as a Walsh-Hadamard butterfly over the answer
table: the majority tally for every sigma at once is exactly the
transform of the +1/-1/0 answer column, so the vote-op count stays at
n * l * 2**l instead of the n * 4**l of the sigma-by-sigma loop (which
is kept as a cross-check for small l).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bitlin import BitVec, random_words

ANSWER_ZERO = 0
ANSWER_ONE = 1
ANSWER_NONE = 2


@dataclass(frozen=True)
class OracleStats:
    """Declared answer statistics: rate = c + e, margin = c - e.

    c is the correct-answer probability, e the wrong-answer probability;
    the rest are abstentions.
    """

    rate: float
    margin: float

    def __post_init__(self) -> None:
        if not (0.0 < self.margin <= self.rate <= 1.0):
            raise ValueError("need 0 < margin <= rate <= 1")


class ErasureOracle:
    """Parity oracle interface; answers 0/1 or abstains.

    Subclasses implement query_batch on packed uint64 query words and may
    declare their answer statistics for list sizing.
    """

    n: int
    stats: OracleStats | None = None

    def query_batch(self, words: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        raise NotImplementedError

    def query(self, r: BitVec, rng: np.random.Generator) -> int | None:
        ans = int(self.query_batch(np.array([r.word], dtype=np.uint64), rng)[0])
        return None if ans == ANSWER_NONE else ans


class NoisyParityOracle(ErasureOracle):
    """Ground-truth parities of a fixed word, with errors and erasures.

    Each query independently: abstain with probability `erasure`, lie
    with probability `error`, else answer <r, x>.
    """

    def __init__(self, n: int, x_word: int, error: float = 0.0, erasure: float = 0.0):
        assert 0 < n <= 64 and 0 <= x_word < (1 << n)
        assert error >= 0.0 and erasure >= 0.0 and error + erasure <= 1.0
        correct = 1.0 - error - erasure
        assert correct > error, "margin must be positive"
        self.n = n
        self.x_word = np.uint64(x_word)
        self.error = error
        self.erasure = erasure
        self.stats = OracleStats(rate=correct + error, margin=correct - error)

    def query_batch(self, words: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        par = (np.bitwise_count(words & self.x_word) & np.uint8(1)).astype(np.uint8)
        u = rng.random(words.shape)
        out = np.where(u < self.erasure, np.uint8(ANSWER_NONE), par)
        lie = (u >= self.erasure) & (u < self.erasure + self.error)
        out = np.where(lie, par ^ np.uint8(1), out)
        return out.astype(np.uint8)


@dataclass(frozen=True)
class DecodeList:
    """Candidate words plus the decode's audited work counters."""

    n: int
    words: np.ndarray  # uint64, one candidate per seed-parity guess
    queries: int
    vote_ops: int
    seed_words: np.ndarray

    def __contains__(self, item) -> bool:
        word = item if isinstance(item, (int, np.integer)) else item.word
        return bool(np.any(self.words == np.uint64(word)))

    def __len__(self) -> int:
        return int(self.words.size)

    def as_bitvecs(self) -> list[BitVec]:
        assert self.words.size <= 4096, "materialize only small lists"
        return [BitVec(self.n, int(w)) for w in self.words]


def list_size_param(n: int, error: float, correct: float) -> int:
    """Seed count l = ceil(log2(20 n (e + c) / (c - e)**2 + 1)).

    With 2**l candidates the hidden word lands in the list with
    probability at least 0.8 whenever the oracle's (error, correct) rates
    satisfy the declared margin.
    """
    if n < 1:
        raise ValueError("n must be positive")
    if error < 0.0 or correct <= error or correct + error > 1.0:
        raise ValueError("need 0 <= error < correct and error + correct <= 1")
    ratio = (error + correct) / (correct - error) ** 2
    return max(1, math.ceil(math.log2(20.0 * n * ratio + 1.0)))


def list_size_from_ratio(n: int, ratio: float) -> int:
    """Same sizing with the rate/margin**2 ratio supplied directly."""
    if n < 1 or ratio <= 0.0:
        raise ValueError("bad sizing inputs")
    return max(1, math.ceil(math.log2(20.0 * n * ratio + 1.0)))


def subset_xors(seed_words: np.ndarray) -> np.ndarray:
    """R[J] = xor of the seed words selected by the bits of J, all J."""
    l = seed_words.size
    out = np.zeros(1 << l, dtype=np.uint64)
    for j in range(l):
        half = 1 << j
        out[half : 2 * half] = out[:half] ^ seed_words[j]
    return out


def gather_answers(
    oracle: ErasureOracle, n: int, l: int, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray, int]:
    """Draw seeds, query every nonempty combination shifted by each unit.

    Returns (seed_words, answers[bit, J] with J >= 1, query count); the
    query count is exactly n * (2**l - 1) <= n * 2**l distinct points.
    """
    seed_words = random_words(n, l, rng)
    combos = subset_xors(seed_words)[1:]  # J = 0 carries no seed information
    units = (np.uint64(1) << np.arange(n, dtype=np.uint64))[:, None]
    points = combos[None, :] ^ units
    answers = oracle.query_batch(points.reshape(-1), rng).reshape(n, combos.size)
    return seed_words, answers, int(points.size)


def _wht_inplace(rows: np.ndarray) -> int:
    """Unnormalized Walsh-Hadamard transform along axis 1; returns op count."""
    count, size = rows.shape
    h = 1
    ops = 0
    while h < size:
        r = rows.reshape(count, size // (2 * h), 2, h)
        a = r[:, :, 0, :].copy()
        b = r[:, :, 1, :]
        r[:, :, 0, :] = a + b
        r[:, :, 1, :] = a - b
        ops += count * size
        h *= 2
    return ops


def candidates_from_answers(answers: np.ndarray) -> tuple[np.ndarray, int]:
    """Per-sigma majority votes for every bit, via the transform.

    answers[i, J-1] in {0, 1, abstain}; vote table v[i, J] = +1/-1/0 with
    v[i, 0] = 0. The transform row S_i gives, at position sigma, the
    (0-votes minus 1-votes) tally of bit i under seed-parity guess sigma;
    bit i of candidate sigma is 1 exactly when the tally is negative
    (ties resolve to 0).
    """
    n, cols = answers.shape
    size = cols + 1
    votes = np.zeros((n, size), dtype=np.int32)
    votes[:, 1:] = (answers == ANSWER_ZERO).astype(np.int32) - (answers == ANSWER_ONE).astype(np.int32)
    ops = _wht_inplace(votes)
    bits = votes < 0
    words = (bits.astype(np.uint64) << np.arange(n, dtype=np.uint64)[:, None]).sum(
        axis=0, dtype=np.uint64
    )
    return words, ops


def candidates_direct(answers: np.ndarray) -> np.ndarray:
    """Sigma-by-sigma vote summation; small-l cross-check of the transform."""
    n, cols = answers.shape
    size = cols + 1
    assert size <= 1024, "direct vote path is for small l"
    J = np.arange(size, dtype=np.uint64)
    sigma = J[:, None]
    signs = 1 - 2 * (np.bitwise_count(sigma & J[None, :]) & np.uint8(1)).astype(np.int64)
    votes = np.zeros((n, size), dtype=np.int64)
    votes[:, 1:] = (answers == ANSWER_ZERO).astype(np.int64) - (answers == ANSWER_ONE).astype(np.int64)
    tallies = votes @ signs.T  # [i, sigma]
    bits = tallies < 0
    return (bits.astype(np.uint64) << np.arange(n, dtype=np.uint64)[:, None]).sum(
        axis=0, dtype=np.uint64
    )


def ld_decode(oracle: ErasureOracle, n: int, l: int, rng: np.random.Generator) -> DecodeList:
    """One decoding round: 2**l candidates from n * (2**l - 1) queries."""
    assert 1 <= l <= 26, "list exponent out of desk range"
    seed_words, answers, queries = gather_answers(oracle, n, l, rng)
    assert queries <= n * (1 << l), "query budget exceeded"
    words, vote_ops = candidates_from_answers(answers)
    assert vote_ops <= n * l * (1 << l), "vote budget exceeded"
    return DecodeList(n=n, words=words, queries=queries, vote_ops=vote_ops, seed_words=seed_words)


def recover_with_eq(
    oracle: ErasureOracle,
    eq,
    n: int,
    l: int,
    retries: int,
    rng: np.random.Generator,
) -> BitVec | None:
    """Repeat decoding until a candidate passes verification.

    Only eq-approved words are ever returned; with no hit after the given
    retries the result is None.
    """
    for _ in range(retries):
        lst = ld_decode(oracle, n, l, rng)
        if hasattr(eq, "match_words"):
            idx = eq.match_words(lst.words)
        else:
            idx = next((i for i, w in enumerate(lst.words) if eq(int(w))), None)
        if idx is not None:
            return BitVec(n, int(lst.words[idx]))
    return None
