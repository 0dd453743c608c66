"""Rejection-sampling predictors with an exact success law.

The predictor gets z, draws up to ell uniform candidates, accepts each
with probability D'(candidate, z) / 2 for a [0, 2]-valued distinguisher
D', and outputs the first accepted candidate (or an abort mark after ell
rejections). Its success probability against the true X has the closed
form

    P[out = X | Z = z] = 2**(-n-1) * g(E D'(U, z) / 2) * E[D'(X, z) | z]

with g(d) = (1 - (1 - d)**ell) / d and g(0) = ell, which this module
evaluates exactly alongside the sampler itself.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .distmodel import JointTable
from .metricopt import (
    Distinguisher,
    HypothesisViolated,
    advantage,
    modified_distinguisher,
    optimal_distribution,
)


@dataclass(frozen=True)
class PredictorParams:
    """Rejection-round budget of the predictor."""

    ell: int

    def __post_init__(self) -> None:
        if self.ell < 1:
            raise ValueError("need at least one round")


def g_eval(d: float, ell: int) -> float:
    """(1 - (1 - d)**ell) / d, continued as ell at d = 0.

    Decreasing and convex on [0, 1]; evaluated through expm1/log1p so the
    d -> 0 limit is approached without cancellation.
    """
    if not (0.0 <= d <= 1.0):
        raise ValueError("d out of [0, 1]")
    if ell < 1:
        raise ValueError("ell must be positive")
    if d == 0.0:
        return float(ell)
    if d == 1.0:
        return 1.0
    return -math.expm1(ell * math.log1p(-d)) / d


def predictor_sample(
    z: int, Dp: Distinguisher, params: PredictorParams, rng: np.random.Generator
) -> int | None:
    """One run of the rejection predictor; None marks an abort."""
    vals = Dp.values
    size = 1 << Dp.n
    for _ in range(params.ell):
        x = int(rng.integers(0, size))
        if rng.random() < vals[x, z] / 2.0:
            return x
    return None


def predictor_sample_batch(
    zs: np.ndarray, Dp: Distinguisher, params: PredictorParams, rng: np.random.Generator
) -> np.ndarray:
    """Vectorized runs, one per entry of zs; -1 marks an abort.

    Round-for-round the same law as predictor_sample, drawn in batches.
    """
    size = 1 << Dp.n
    trials = zs.size
    out = np.full(trials, -1, dtype=np.int64)
    alive = np.arange(trials)
    zs = zs.astype(np.int64)
    for _ in range(params.ell):
        if alive.size == 0:
            break
        cand = rng.integers(0, size, size=alive.size)
        accept = rng.random(alive.size) < Dp.values[cand, zs[alive]] / 2.0
        out[alive[accept]] = cand[accept]
        alive = alive[~accept]
    return out


def exact_success_prob(table: JointTable, Dp: Distinguisher, params: PredictorParams) -> float:
    """Exact P[predictor output equals X] under the joint table."""
    if (Dp.n, Dp.m) != (table.n, table.m):
        raise ValueError("shape mismatch")
    size = 1 << Dp.n
    total = 0.0
    for z in range(1 << Dp.m):
        col = Dp.values[:, z]
        d = float(col.mean()) / 2.0
        mass = float(col @ table.grid[:, z])  # E[D'(X, z); Z = z]
        if mass == 0.0:
            continue
        total += g_eval(d, params.ell) * mass
    return total / (2.0 * size)


def exact_abort_prob(table: JointTable, Dp: Distinguisher, params: PredictorParams) -> float:
    """Exact P[predictor aborts], averaged over Z."""
    p_z = table.z_marginal()
    total = 0.0
    for z in np.flatnonzero(p_z > 0.0):
        d = float(Dp.values[:, int(z)].mean()) / 2.0
        total += float(p_z[z]) * (1.0 - d) ** params.ell
    return total


def mc_success_prob(
    table: JointTable,
    Dp: Distinguisher,
    params: PredictorParams,
    trials: int,
    rng: np.random.Generator,
) -> float:
    """Monte Carlo estimate of the success law over fresh (x, z) draws."""
    xs, zs = table.sample(trials, rng)
    outs = predictor_sample_batch(zs.astype(np.int64), Dp, params, rng)
    return float(np.count_nonzero(outs == xs.astype(np.int64))) / trials


def planted_attack_instance(
    n: int,
    m: int,
    k: int,
    rng: np.random.Generator,
    *,
    top_bits: int | None = None,
    spread: float = 1.5,
    low: float = 0.3,
) -> tuple[JointTable, Distinguisher]:
    """Source/distinguisher pair whose level-k advantage is positive by design.

    Per condition z, a planted set of about spread * 2^k points carries a
    descending ramp of distinguisher values from 1 down to `low`, zero
    elsewhere; X sits uniformly on the highest-value points. The best
    entropy-k distribution flattens over the top 2^k ramp points, so X beats
    it by a moderate margin while the mass above the cut stays thick. Both
    matter: a thin excess layer starves the rejection sampler and the
    success floor stops being attainable at the prescribed round budget.
    """
    if not (0 < k < n):
        raise ValueError("need 0 < k < n")
    size, zs = 1 << n, 1 << m
    support = min(size, int(spread * (1 << k)))
    if support <= (1 << k):
        raise ValueError("spread leaves no ramp below the cut")
    if top_bits is None:
        top_bits = max(k - 2, 0)
    top = 1 << top_bits
    if top > support:
        raise ValueError("top_bits exceeds planted support")
    values = np.zeros((size, zs))
    probs = np.zeros((size, zs))
    p_z = rng.dirichlet(np.full(zs, 20.0)) if m else np.array([1.0])
    for z in range(zs):
        picks = rng.choice(size, size=support, replace=False)
        ramp = np.linspace(1.0, low, support)
        ramp[1:-1] += rng.uniform(-0.2, 0.2, support - 2) * (ramp[0] - ramp[1])
        values[picks, z] = np.sort(ramp)[::-1]
        probs[picks[:top], z] = p_z[z] / top
    return JointTable(n, m, probs.reshape(-1)), Distinguisher(n, m, values)


@dataclass(frozen=True)
class AttackReport:
    """Outcome of one threshold-predictor attack at entropy level k."""

    n: int
    m: int
    k: float
    epsilon: float
    ell: int
    success_exact: float
    bound: float
    passed: bool
    lambda_norm: float

    def summary(self) -> str:
        return (
            f"eps={self.epsilon:.15g} ell={self.ell} "
            f"success={self.success_exact:.15g} bound={self.bound:.15g} "
            f"{'PASS' if self.passed else 'FAIL'}"
        )


def predictor_attack(
    D: Distinguisher,
    table: JointTable,
    k: float,
    *,
    epsilon_override: float | None = None,
) -> AttackReport:
    """Full pipeline: optimizer, threshold shift, predictor, exact law.

    epsilon (the advantage of D over the entropy-k maximizer) must come
    out positive, else the attack hypothesis is violated; the round count
    is ell = ceil(2 * 2**(n-k) / epsilon) and the certified success floor
    is 2**-k * (1 + 2**(k-n) * epsilon).
    """
    opt, profile = optimal_distribution(D, table, k)
    eps = D.expect_joint(table) - D.expect_cond(opt)
    eps_used = eps if epsilon_override is None else epsilon_override
    if eps_used <= 0.0:
        raise HypothesisViolated(f"advantage {eps_used} is not positive")
    ell = math.ceil(2.0 * 2.0 ** (D.n - k) / eps_used)
    Dp = modified_distinguisher(D, profile)
    success = exact_success_prob(table, Dp, PredictorParams(ell))
    bound = 2.0**-k * (1.0 + 2.0 ** (k - D.n) * eps_used)
    return AttackReport(
        n=D.n,
        m=D.m,
        k=k,
        epsilon=eps,
        ell=ell,
        success_exact=success,
        bound=bound,
        passed=success >= bound - 1e-12,
        lambda_norm=profile.lambda_norm,
    )


def approx_distinguisher_degradation(
    D1: Distinguisher,
    D2: Distinguisher,
    table: JointTable,
    params: PredictorParams,
) -> tuple[float, float, bool]:
    """Success under a dominating approximation vs the degradation floor.

    For D2 >= D1 with per-z mean gap at most delta, the D2-predictor keeps
    success s2 >= (1 - ell * delta / 2) * s1. Returns (s1, s2, ok).
    """
    if (D1.n, D1.m) != (D2.n, D2.m):
        raise ValueError("shape mismatch")
    if float((D2.values - D1.values).min()) < -1e-12:
        raise ValueError("D2 must dominate D1")
    s1 = exact_success_prob(table, D1, params)
    s2 = exact_success_prob(table, D2, params)
    delta = float((D2.values - D1.values).mean(axis=0).max())
    ok = s2 >= (1.0 - params.ell * delta / 2.0) * s1 - 1e-12
    return s1, s2, ok


__all__ = [
    "PredictorParams",
    "AttackReport",
    "HypothesisViolated",
    "advantage",
    "g_eval",
    "predictor_sample",
    "predictor_sample_batch",
    "exact_success_prob",
    "exact_abort_prob",
    "mc_success_prob",
    "planted_attack_instance",
    "predictor_attack",
    "approx_distinguisher_degradation",
]
