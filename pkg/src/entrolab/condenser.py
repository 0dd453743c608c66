"""Key-recovery reduction for the inner-product condenser.

The condenser hashes an n-bit secret x to the k-bit key R x with a
public random GF(2) matrix R. The reduction turns any adversary that
predicts R x with advantage 2**(-k + gap) into a recovery procedure for
x itself: wrap the adversary with a dummy coin so no outcome is too
rare, pick a random output coordinate i and random prefix rows, guess
the prefix parities, and treat the wrapped adversary as an erasure
oracle for the i-th parity (it abstains whenever its guess disagrees
with the guessed prefix). Hadamard list decoding plus a verification
oracle then recovers x with probability far above the guessing floor.

Work is audited in adversary invocations; every experiment asserts its
count against a configured ceiling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .bitlin import BitMatrix, BitVec, make_rng, mat_vec_mul, random_words
from .distmodel import PlantedSupport, SingletonEq, planted_source
from .hadamard import (
    ANSWER_NONE,
    ErasureOracle,
    OracleStats,
    list_size_from_ratio,
    recover_with_eq,
)


def gl_condense(x: BitVec, seed_matrix: BitMatrix) -> BitVec:
    """The condenser map itself: the k-bit key R x."""
    return mat_vec_mul(seed_matrix, x)


class KeyAdversary:
    """Predictor of R x given (z, R); batches are one z, many R.

    informed_prob, when set, declares the fraction of calls answered
    from the true hidden word; it feeds declared oracle statistics.
    """

    informed_prob: float | None = None

    def guess_batch(
        self, z: int, R_words: np.ndarray, rng: np.random.Generator
    ) -> np.ndarray:
        """R_words is (batch, k) packed rows; returns (batch,) k-bit words."""
        raise NotImplementedError

    def guess(self, z: int, R: BitMatrix, rng: np.random.Generator) -> BitVec:
        words = np.array([R.rows], dtype=np.uint64)
        return BitVec(R.k, int(self.guess_batch(z, words, rng)[0]))


def _pack_parities(R_words: np.ndarray, x_word: np.uint64) -> np.ndarray:
    """Row parities <row, x> packed into one word per batch entry."""
    bits = (np.bitwise_count(R_words & x_word) & np.uint8(1)).astype(np.uint64)
    k = R_words.shape[1]
    return (bits << np.arange(k, dtype=np.uint64)[None, :]).sum(axis=1, dtype=np.uint64)


class PlantedKeyAdversary(KeyAdversary):
    """Knows one hidden word per z; answers from it with probability q.

    Per invocation the guess equals R x*(z) with probability q and is
    uniform otherwise, so against the planted secret the advantage is
    exactly q + (1 - q) * 2**-k.
    """

    def __init__(self, n: int, lookup: np.ndarray, q: float):
        assert 0.0 <= q <= 1.0
        self.n = n
        self.lookup = lookup.astype(np.uint64)
        self.q = q
        self.informed_prob = q

    def guess_batch(self, z: int, R_words: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        batch, k = R_words.shape
        out = random_words(k, batch, rng)
        informed = rng.random(batch) < self.q
        if informed.any():
            out[informed] = _pack_parities(R_words[informed], self.lookup[z])
        return out


class DummyCoinAdversary(KeyAdversary):
    """Tosses a fair coin; heads defers to the inner adversary, tails is uniform.

    Halves any advantage but floors every outcome's probability at
    2**-(k+1), which the prefix-guessing step relies on.
    """

    def __init__(self, inner: KeyAdversary):
        self.inner = inner
        self.informed_prob = None if inner.informed_prob is None else inner.informed_prob / 2.0

    def guess_batch(self, z: int, R_words: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        batch, k = R_words.shape
        out = random_words(k, batch, rng)
        defer = rng.random(batch) < 0.5
        if defer.any():
            out[defer] = self.inner.guess_batch(z, R_words[defer], rng)
        return out


def dummy_coin_wrap(adv: KeyAdversary) -> DummyCoinAdversary:
    return DummyCoinAdversary(adv)


def planted_key_adversary(
    support: PlantedSupport, q: float, rng: np.random.Generator
) -> PlantedKeyAdversary:
    """Adversary planted on one hidden assignment x*(z) ~ X | Z = z."""
    return PlantedKeyAdversary(support.n, support.sample_assignment(rng), q)


def measure_advantage(
    adv: KeyAdversary,
    n: int,
    k: int,
    x_of_z: np.ndarray,
    trials: int,
    rng: np.random.Generator,
) -> float:
    """Empirical P[guess = R x] with z uniform and x the planted x*(z)."""
    m_states = x_of_z.size
    zs = rng.integers(0, m_states, size=trials)
    hits = 0
    for z in range(m_states):
        sel = zs == z
        count = int(sel.sum())
        if count == 0:
            continue
        R_words = random_words(n, count * k, rng).reshape(count, k)
        targets = _pack_parities(R_words, np.uint64(x_of_z[z]))
        guesses = adv.guess_batch(int(z), R_words, rng)
        hits += int(np.count_nonzero(guesses == targets))
    return hits / trials


class PrefixPredictorOracle(ErasureOracle):
    """Wrapped adversary seen as an erasure oracle for output bit i.

    A query r becomes row i of a fresh matrix: guessed prefix rows above,
    uniform suffix rows below. The adversary's guess is used only when
    its first i-1 bits match the guessed prefix value; otherwise the
    oracle abstains. Declared statistics (set when the adversary declares
    informed_prob) describe the correct-prefix case: margin q', rate
    q' + (1 - q') * 2**(1-i).
    """

    def __init__(
        self,
        adv: KeyAdversary,
        z: int,
        i: int,
        prefix_words: np.ndarray,
        prefix_value: int,
        n: int,
        k: int,
    ):
        assert 1 <= i <= k
        assert prefix_words.size == i - 1
        assert 0 <= prefix_value < (1 << (i - 1))
        self.adv = adv
        self.z = z
        self.i = i
        self.prefix_words = prefix_words.astype(np.uint64)
        self.prefix_value = np.uint64(prefix_value)
        self.n = n
        self.k = k
        self.invocations = 0
        qp = adv.informed_prob
        if qp:
            self.stats = OracleStats(rate=qp + (1.0 - qp) * 2.0 ** (1 - i), margin=qp)
        else:
            self.stats = None

    def query_batch(self, words: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        batch = words.size
        R_words = np.empty((batch, self.k), dtype=np.uint64)
        R_words[:, : self.i - 1] = self.prefix_words[None, :]
        R_words[:, self.i - 1] = words
        if self.k > self.i:
            suffix = random_words(self.n, batch * (self.k - self.i), rng)
            R_words[:, self.i :] = suffix.reshape(batch, self.k - self.i)
        guesses = self.adv.guess_batch(self.z, R_words, rng)
        self.invocations += batch
        mask = np.uint64((1 << (self.i - 1)) - 1)
        match = (guesses & mask) == self.prefix_value
        bits = ((guesses >> np.uint64(self.i - 1)) & np.uint64(1)).astype(np.uint8)
        return np.where(match, bits, np.uint8(ANSWER_NONE))


def prefix_predictor(
    adv: KeyAdversary,
    z: int,
    i: int,
    prefix_words: np.ndarray,
    prefix_value: int,
    n: int,
    k: int,
) -> PrefixPredictorOracle:
    return PrefixPredictorOracle(adv, z, i, prefix_words, prefix_value, n, k)


@dataclass
class ReductionParams:
    """Shape and budget of the key-recovery reduction.

    delta defaults to (gap - 2) ln 2 / (2 k), iterations to 2 k / delta.
    list_size_mode picks how decode lists are sized per coordinate i:
    "conservative" uses the worst-case ratio 2**i / delta**2, "declared"
    trusts the oracle's declared statistics when present.
    """

    n: int
    k: int
    gap: int = 3
    delta: float | None = None
    iterations: int | None = None
    list_size_mode: str = "conservative"
    max_invocations: int | None = None
    retries: int = 1
    max_list_exp: int = 26

    def __post_init__(self) -> None:
        if self.gap < 3:
            raise ValueError("advantage exponent gap must be at least 3")
        if not (1 <= self.k <= self.n):
            raise ValueError("need 1 <= k <= n")
        if self.list_size_mode not in ("conservative", "declared"):
            raise ValueError("unknown list size mode")
        if self.delta is None:
            self.delta = (self.gap - 2) * math.log(2.0) / (2.0 * self.k)
        if self.iterations is None:
            self.iterations = math.ceil(2.0 * self.k / self.delta)

    def list_size_for(self, i: int, oracle: ErasureOracle) -> int:
        if self.list_size_mode == "declared" and oracle.stats is not None:
            ratio = oracle.stats.rate / oracle.stats.margin**2
        else:
            ratio = 2.0**i / self.delta**2
        l = list_size_from_ratio(self.n, ratio)
        if l > self.max_list_exp:
            raise ValueError(f"list exponent {l} beyond configured limit")
        return l


@dataclass(frozen=True)
class ReductionResult:
    x: BitVec | None
    invocations: int
    iterations_run: int
    budget_exhausted: bool


def reduction_B(
    adv: KeyAdversary,
    z: int,
    eq,
    params: ReductionParams,
    rng: np.random.Generator,
) -> ReductionResult:
    """Recover the hidden word from a wrapped advantage-2**(-k+gap-1) adversary.

    Per iteration: uniform coordinate i, fresh random prefix rows, then
    every prefix parity guess in lexicographic order, each driving one
    verified list decode. Returns the first eq-approved word. Invocation
    counts are audited against params.max_invocations; hitting the
    ceiling flags the result instead of overrunning.
    """
    n, k = params.n, params.k
    invocations = 0
    for it in range(params.iterations):
        i = int(rng.integers(1, k + 1))
        prefix_words = random_words(n, i - 1, rng) if i > 1 else np.empty(0, dtype=np.uint64)
        for prefix_value in range(1 << (i - 1)):
            oracle = prefix_predictor(adv, z, i, prefix_words, prefix_value, n, k)
            l = params.list_size_for(i, oracle)
            projected = n * ((1 << l) - 1) * params.retries
            if params.max_invocations is not None and invocations + projected > params.max_invocations:
                return ReductionResult(None, invocations, it, True)
            found = recover_with_eq(oracle, eq, n, l, params.retries, rng)
            invocations += oracle.invocations
            if found is not None:
                return ReductionResult(found, invocations, it + 1, False)
    return ReductionResult(None, invocations, params.iterations, False)


def measure_good_fraction(
    adv: KeyAdversary,
    n: int,
    k: int,
    gap: int,
    x_of_z: np.ndarray,
    r_samples: int,
    rng: np.random.Generator,
) -> float:
    """Fraction of planted (x*(z), z) pairs with per-pair advantage
    at least 2**(-k + gap - 2), estimated over r_samples matrices each."""
    good = 0
    for z in range(x_of_z.size):
        R_words = random_words(n, r_samples * k, rng).reshape(r_samples, k)
        targets = _pack_parities(R_words, np.uint64(x_of_z[z]))
        guesses = adv.guess_batch(int(z), R_words, rng)
        rate = float(np.count_nonzero(guesses == targets)) / r_samples
        if rate >= 2.0 ** (-k + gap - 2):
            good += 1
    return good / x_of_z.size


@dataclass(frozen=True)
class CondenserReport:
    """Outcome of a full planted-recovery experiment."""

    n: int
    m: int
    k: int
    gap: int
    q: float
    trials_requested: int
    trials_run: int
    successes: int
    rate: float
    rate_lower_95: float
    target: float
    passed: bool
    invocations: int
    ceiling: int
    budget_exhausted: bool
    iterations: int
    list_size_mode: str
    trial_successes: tuple[int, ...] = field(repr=False, default=())


def _wilson_lower(successes: int, trials: int, z: float = 1.6448536269514722) -> float:
    if trials == 0:
        return 0.0
    p = successes / trials
    denom = 1.0 + z * z / trials
    center = p + z * z / (2 * trials)
    rad = z * math.sqrt(p * (1.0 - p) / trials + z * z / (4.0 * trials * trials))
    return (center - rad) / denom


def default_invocation_ceiling(n: int, k: int, m: int) -> int:
    """Configured work cap: 2048 * 2**(2k) * (n + m)**3 adversary calls."""
    return 2048 * (1 << (2 * k)) * (n + m) ** 3


def condenser_experiment(
    n: int,
    k: int,
    *,
    m: int = 2,
    gap: int = 3,
    trials: int = 2000,
    q: float | None = None,
    iterations: int = 2,
    list_size_mode: str = "declared",
    retries: int = 1,
    seed: int = 0,
    max_invocations: int | None = None,
) -> CondenserReport:
    """Planted end-to-end run: source, adversary at the advantage
    threshold, wrapped reduction, recovery rate vs the 2**(-k+gap-3) floor.

    Every trial draws a fresh planted source and hidden assignment, so
    trials are independent; the pass verdict uses the one-sided 95%
    Wilson lower bound on the recovery rate. If the invocation ceiling
    would be crossed mid-run the experiment stops early and reports the
    partial result with budget_exhausted set.
    """
    if not (1 <= k <= n <= 14) or k > 8:
        raise ValueError("experiment needs k <= min(n, 8) and n <= 14")
    if q is None:
        q = ((1 << gap) - 1) / ((1 << k) - 1)  # plants advantage 2**(-k+gap) exactly
    ceiling = default_invocation_ceiling(n, k, m) if max_invocations is None else max_invocations
    target = 2.0 ** (-k + gap - 3)
    streams = np.random.SeedSequence(seed).spawn(trials)
    successes = 0
    invocations = 0
    run = 0
    exhausted = False
    record: list[int] = []
    for child in streams:
        rng = make_rng(child)
        _, support = planted_source(n, k, m, rng)
        adv = planted_key_adversary(support, q, rng)
        wrapped = dummy_coin_wrap(adv)
        z = int(rng.integers(0, 1 << m))
        x_true = int(adv.lookup[z])
        eq = SingletonEq(n, x_true)
        params = ReductionParams(
            n=n,
            k=k,
            gap=gap,
            iterations=iterations,
            list_size_mode=list_size_mode,
            retries=retries,
            max_invocations=ceiling - invocations,
        )
        res = reduction_B(wrapped, z, eq, params, rng)
        invocations += res.invocations
        if res.budget_exhausted:
            exhausted = True
            break
        run += 1
        won = int(res.x is not None and res.x.word == x_true)
        successes += won
        record.append(won)
    rate = successes / run if run else 0.0
    lower = _wilson_lower(successes, run)
    return CondenserReport(
        n=n,
        m=m,
        k=k,
        gap=gap,
        q=q,
        trials_requested=trials,
        trials_run=run,
        successes=successes,
        rate=rate,
        rate_lower_95=lower,
        target=target,
        passed=(not exhausted) and run == trials and lower > target and invocations <= ceiling,
        invocations=invocations,
        ceiling=ceiling,
        budget_exhausted=exhausted,
        iterations=iterations,
        list_size_mode=list_size_mode,
        trial_successes=tuple(record),
    )
