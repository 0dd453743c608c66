r"""Water-filling optimizers for distinguisher-bounded entropy.

Among all Y with average conditional min-entropy at least k, the one
maximizing E D(Y, Z) for a bounded distinguisher D has threshold form:
per z there is a level t(z) with the same normalized excess
lambda' = E_U max(D(U, z) - t(z), 0) across z, Y piles mass on atoms
above t(z), spreads a common cap over them, and leaves atoms below
empty. This module constructs that maximizer exactly on dense tables,
certifies the optimality conditions, and cross-checks the construction
against a deliberately dumb grid/vertex search plus a sampled bisection
for the threshold itself.

Numerics: the entropy-vs-lambda' curve is a right-continuous step
function that only jumps where some threshold t(z) crosses an atom value
v, i.e. at the finitely many levels E_U max(D(., z) - v, 0). The
construction bisects over that exact level set, so thresholds coincide
with atom values to machine precision and the certificate tolerances
hold with orders of magnitude to spare.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .distmodel import ConditionalTable, JointTable

# atoms this close to the threshold count as boundary atoms
BOUNDARY_TOL = 1e-11


class HypothesisViolated(ValueError):
    """Raised when a claimed advantage or domain precondition fails."""


@dataclass(frozen=True)
class Distinguisher:
    """Dense real-valued test of (x, z) pairs, bounded to [0, upper]."""

    n: int
    m: int
    values: np.ndarray
    upper: float = 1.0

    def __post_init__(self) -> None:
        vals = np.asarray(self.values, dtype=np.float64)
        if vals.shape != (1 << self.n, 1 << self.m):
            raise ValueError("value grid has wrong shape")
        if self.upper not in (1.0, 2.0):
            raise ValueError("upper bound must be 1 or 2")
        if float(vals.min()) < 0.0 or float(vals.max()) > self.upper:
            raise ValueError("values out of range")
        vals = vals.copy()
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_callable(cls, n: int, m: int, fn, upper: float = 1.0) -> "Distinguisher":
        vals = np.array([[fn(x, z) for z in range(1 << m)] for x in range(1 << n)])
        return cls(n, m, vals, upper)

    def column(self, z: int) -> np.ndarray:
        return self.values[:, z]

    def expect_joint(self, table: JointTable) -> float:
        """E D(X, Z) under the joint table."""
        if (self.n, self.m) != (table.n, table.m):
            raise ValueError("shape mismatch")
        return float((self.values * table.grid).sum())

    def expect_cond(self, cond: ConditionalTable) -> float:
        """E D(Y, Z) for Y given by a conditional table over the same Z."""
        if (self.n, self.m) != (cond.n, cond.m):
            raise ValueError("shape mismatch")
        return float((self.values * cond.cond * cond.p_z[None, :]).sum())

    def uniform_mean(self, z: int) -> float:
        """E D(U, z) for uniform U."""
        return float(self.values[:, z].mean())


@dataclass(frozen=True)
class ThresholdProfile:
    """Per-z threshold map plus the common normalized excess.

    lambda_norm is 0 only in the degenerate branch where the target
    entropy is already reachable with mass confined to per-z argmax
    atoms; everywhere else it is in (0, 1).
    """

    thresholds: np.ndarray
    lambda_norm: float

    def __post_init__(self) -> None:
        t = np.asarray(self.thresholds, dtype=np.float64)
        if np.any(t < -1.0) or np.any(t > 1.0):
            raise ValueError("thresholds out of [-1, 1]")
        if not (0.0 <= self.lambda_norm < 1.0):
            raise ValueError("lambda_norm out of [0, 1)")
        t = t.copy()
        t.flags.writeable = False
        object.__setattr__(self, "thresholds", t)

    def check_excess(self, D: Distinguisher, p_z: np.ndarray, tol: float = 1e-9) -> float:
        """Max over active z of |E_U max(D - t(z), 0) - lambda_norm|."""
        worst = 0.0
        for z in np.flatnonzero(p_z > 0.0):
            excess = float(np.maximum(D.column(int(z)) - self.thresholds[int(z)], 0.0).mean())
            worst = max(worst, abs(excess - self.lambda_norm))
        if worst > tol:
            raise AssertionError(f"threshold profile excess off by {worst}")
        return worst


def exact_threshold(D: Distinguisher, z: int, lambda_norm: float) -> float:
    """The t with E_U max(D(U, z) - t, 0) = lambda_norm, by sorted inversion.

    Requires 0 < lambda_norm <= E D(U, z) + 1; the excess is continuous and
    strictly decreasing in t on [-1, max D), so t is unique.
    """
    vals = D.column(z)
    mean = float(vals.mean())
    if not (0.0 < lambda_norm <= mean + 1.0 + 1e-12):
        raise ValueError(f"lambda_norm {lambda_norm} outside (0, E D + 1]")
    size = vals.size
    order = np.argsort(-vals, kind="stable")
    v = vals[order]
    cum = np.cumsum(v)
    total = size * lambda_norm
    j = np.arange(1, size + 1, dtype=np.float64)
    cand = (cum - total) / j
    # segment j is valid when t lies between the j-th and (j+1)-th largest
    lower = np.empty(size)
    lower[: size - 1] = v[1:]
    lower[size - 1] = -1.0
    eps = 1e-12
    ok = (cand <= v + eps) & (cand >= lower - eps)
    idx = int(np.flatnonzero(ok)[0])
    return float(min(max(cand[idx], -1.0), 1.0))


def _split_counts(vals: np.ndarray, t: float, tol: float = BOUNDARY_TOL) -> tuple[int, int]:
    """(strictly above, on boundary) atom counts for threshold t."""
    strict = int(np.count_nonzero(vals > t + tol))
    weak = int(np.count_nonzero(vals >= t - tol))
    return strict, weak - strict


def entropy_curve(D: Distinguisher, p_z: np.ndarray, lambda_norm: float, *, strict: bool = False) -> float:
    """Entropy level k(lambda') reachable at a given common excess.

    k = n - log2 E_z[1 / P_U(D >= t(z))]; with strict=True the superlevel
    set is open (D > t(z)), giving the left limit of the step function.
    """
    inv_mass = 0.0
    size = 1 << D.n
    for z in np.flatnonzero(p_z > 0.0):
        t = exact_threshold(D, int(z), lambda_norm)
        n_strict, n_bound = _split_counts(D.column(int(z)), t)
        count = n_strict if strict else n_strict + n_bound
        if count == 0:
            return float("-inf")
        inv_mass += float(p_z[z]) * size / count
    return D.n - math.log2(inv_mass)


def _candidate_levels(D: Distinguisher, p_z: np.ndarray) -> np.ndarray:
    """All positive excess levels at which some t(z) crosses an atom."""
    levels: list[np.ndarray] = []
    for z in np.flatnonzero(p_z > 0.0):
        col = D.column(int(z))
        vals = np.unique(col)
        lam = np.maximum(col[:, None] - vals[None, :], 0.0).mean(axis=0)
        levels.append(lam[lam > 0.0])
    return np.unique(np.concatenate(levels))


def _build_from_masks(
    D: Distinguisher,
    p_z: np.ndarray,
    thresholds: np.ndarray,
    caps: np.ndarray,
) -> np.ndarray:
    """Conditional grid: cap on strict atoms, residue shared on boundary."""
    size = 1 << D.n
    cond = np.zeros((size, p_z.size))
    for z in np.flatnonzero(p_z > 0.0):
        col = D.column(int(z))
        t = thresholds[z]
        cap = caps[z]
        strict = col > t + BOUNDARY_TOL
        bound = np.abs(col - t) <= BOUNDARY_TOL
        n_s = int(strict.sum())
        n_b = int(bound.sum())
        colmass = np.zeros(size)
        colmass[strict] = cap
        if n_b:
            colmass[bound] = (1.0 - n_s * cap) / n_b
        # explicit renormalization; construction is already exact to ~1e-16
        colmass /= colmass.sum()
        cond[:, z] = colmass
    # zero-mass z: uniform placeholder, excluded from every meter
    for z in np.flatnonzero(p_z == 0.0):
        cond[:, z] = 1.0 / size
    return cond


def _degenerate_build(D: Distinguisher, p_z: np.ndarray, k: float) -> tuple[np.ndarray, np.ndarray, float]:
    """Argmax-confined branch for targets reachable at zero excess.

    Mass stays inside per-z argmax sets; a common cap mu (clipped per z to
    [1/|argmax|, 1]) is solved so the average top mass is exactly 2**-k.
    """
    size = 1 << D.n
    active = np.flatnonzero(p_z > 0.0)
    t = np.array([float(D.column(int(z)).max()) if p_z[z] > 0 else 1.0 for z in range(p_z.size)])
    tie_counts = {int(z): int(np.count_nonzero(np.abs(D.column(int(z)) - t[z]) <= 1e-12)) for z in active}
    target = 2.0**-k

    def avg_top(mu: float) -> float:
        return float(sum(p_z[z] * min(max(mu, 1.0 / tie_counts[z]), 1.0) for z in active))

    lo_val = avg_top(0.0)
    if target < lo_val - 1e-12:
        raise AssertionError("degenerate branch entered with unreachable target")
    mu_lo, mu_hi = 0.0, 1.0
    for _ in range(200):
        mid = 0.5 * (mu_lo + mu_hi)
        if avg_top(mid) < target:
            mu_lo = mid
        else:
            mu_hi = mid
    # one linear solve inside the final bracket (avg_top is piecewise linear)
    f_lo, f_hi = avg_top(mu_lo), avg_top(mu_hi)
    mu = mu_hi if f_hi == f_lo else mu_lo + (target - f_lo) * (mu_hi - mu_lo) / (f_hi - f_lo)

    cond = np.zeros((size, p_z.size))
    for z in active:
        cap = min(max(mu, 1.0 / tie_counts[z]), 1.0)
        atoms = np.flatnonzero(np.abs(D.column(int(z)) - t[z]) <= 1e-12)
        full = int(1.0 / cap + 1e-12)
        col = np.zeros(size)
        col[atoms[:full]] = cap
        rem = 1.0 - full * cap
        if rem > 1e-15:
            col[atoms[full]] = rem
        col /= col.sum()
        cond[:, z] = col
    for z in np.flatnonzero(p_z == 0.0):
        cond[:, z] = 1.0 / size
    return cond, t, 0.0


def optimal_distribution(
    D: Distinguisher, table: JointTable, k: float
) -> tuple[ConditionalTable, ThresholdProfile]:
    """The entropy-k maximizer of E D(Y, Z) in threshold form.

    Requires 0 < k < n and a one-sided distinguisher (upper bound 1).
    Returns the conditional table of the maximizer and the certifying
    threshold profile; the maximizer's average conditional min-entropy
    equals k to machine precision.
    """
    if (D.n, D.m) != (table.n, table.m):
        raise ValueError("shape mismatch")
    if D.upper != 1.0:
        raise ValueError("optimizer expects a [0, 1] distinguisher")
    if not (0.0 < k < D.n):
        raise ValueError("entropy target must be strictly inside (0, n)")
    p_z = table.z_marginal()

    levels = _candidate_levels(D, p_z)
    if levels.size == 0:
        # every column constant: only the degenerate branch exists
        cond, t, lam = _degenerate_build(D, p_z, k)
        return (
            ConditionalTable(D.n, D.m, cond, p_z),
            ThresholdProfile(t, lam),
        )
    # k just above excess 0 (mass confined to argmax ties)
    probe = float(levels[0]) / 2.0
    if entropy_curve(D, p_z, probe) >= k:
        cond, t, lam = _degenerate_build(D, p_z, k)
        return (
            ConditionalTable(D.n, D.m, cond, p_z),
            ThresholdProfile(t, lam),
        )

    # smallest jump level with k(level) >= k; curve is right-continuous
    lo, hi = 0, levels.size - 1
    if entropy_curve(D, p_z, float(levels[hi])) < k:
        raise AssertionError("entropy curve never reaches target below max level")
    while lo < hi:
        mid = (lo + hi) // 2
        if entropy_curve(D, p_z, float(levels[mid])) >= k:
            hi = mid
        else:
            lo = mid + 1
    lam = float(levels[lo])

    size = 1 << D.n
    thresholds = np.ones(p_z.size)
    strict_counts = np.zeros(p_z.size, dtype=np.int64)
    weak_counts = np.zeros(p_z.size, dtype=np.int64)
    for z in np.flatnonzero(p_z > 0.0):
        t_z = exact_threshold(D, int(z), lam)
        thresholds[z] = t_z
        n_s, n_b = _split_counts(D.column(int(z)), t_z)
        strict_counts[z] = n_s
        weak_counts[z] = n_s + n_b

    active = p_z > 0.0
    guess_weak = float((p_z[active] / weak_counts[active]).sum())  # 2**-k at theta=1
    guess_strict = float((p_z[active] / strict_counts[active]).sum())  # 2**-k at theta=0
    target = 2.0**-k
    if guess_strict <= guess_weak + 1e-18:
        theta = 0.0
    else:
        theta = (guess_strict - target) / (guess_strict - guess_weak)
    if not (-1e-9 <= theta <= 1.0 + 1e-9):
        raise AssertionError(f"target entropy not bracketed at jump level (theta={theta})")
    theta = float(min(max(theta, 0.0), 1.0))

    caps = np.zeros(p_z.size)
    caps[active] = (1.0 - theta) / strict_counts[active] + theta / weak_counts[active]
    cond = _build_from_masks(D, p_z, thresholds, caps)
    return (
        ConditionalTable(D.n, D.m, cond, p_z),
        ThresholdProfile(thresholds, lam),
    )


def kkt_certificate(
    D: Distinguisher,
    table: JointTable,
    opt: ConditionalTable,
    profile: ThresholdProfile,
    *,
    mass_tol: float = 1e-12,
) -> dict[str, float]:
    """Max violation of each optimality condition for a threshold-form opt.

    Conditions: (excess) equal normalized excess across z; atoms with
    intermediate mass sit exactly at the threshold; zero-mass atoms sit at
    or below; cap-mass atoms at or above.
    """
    p_z = table.z_marginal()
    out = {"excess": 0.0, "intermediate": 0.0, "zero": 0.0, "cap": 0.0}
    for z in np.flatnonzero(p_z > 0.0):
        col = D.column(int(z))
        t = float(profile.thresholds[z])
        excess = float(np.maximum(col - t, 0.0).mean())
        out["excess"] = max(out["excess"], abs(excess - profile.lambda_norm))
        mass = opt.cond[:, z]
        top = float(mass.max())
        is_zero = mass <= mass_tol
        is_cap = mass >= top - mass_tol
        is_mid = ~(is_zero | is_cap)
        if is_mid.any():
            out["intermediate"] = max(out["intermediate"], float(np.abs(col[is_mid] - t).max()))
        if is_zero.any():
            out["zero"] = max(out["zero"], max(0.0, float((col[is_zero] - t).max())))
        if is_cap.any():
            out["cap"] = max(out["cap"], max(0.0, float((t - col[is_cap]).max())))
    return out


def modified_distinguisher(D: Distinguisher, profile: ThresholdProfile) -> Distinguisher:
    """Shift by the per-z threshold and keep the positive part, range [0, 2]."""
    shifted = D.values - profile.thresholds[None, :]
    if float(shifted.max()) > 2.0 + 1e-12:
        raise ValueError("shifted distinguisher exceeds 2 beyond tolerance")
    return Distinguisher(D.n, D.m, np.clip(np.maximum(shifted, 0.0), 0.0, 2.0), upper=2.0)


def advantage(D: Distinguisher, table: JointTable, k: float) -> float:
    """E D(X, Z) - E D(Y*, Z) against the entropy-k maximizer; may be negative."""
    opt, _ = optimal_distribution(D, table, k)
    return D.expect_joint(table) - D.expect_cond(opt)


# ---- dumb cross-check route: grid + in-window vertex refinement ----


def _water_value(col_sorted_desc: np.ndarray, cum: np.ndarray, p_z: float, a: float) -> float:
    """Best E D mass for one z given joint-mass budget a on its column.

    Optimal shape caps every used atom at y = a / p_z (conditional), fills
    the largest D atoms first. Flat for a >= p_z.
    """
    size = col_sorted_desc.size
    y = a / p_z
    if y >= 1.0:
        # cap 1: all conditional mass on the single best atom
        return p_z * float(col_sorted_desc[0])
    full = min(int(1.0 / y + 1e-12), size)
    val = y * float(cum[full - 1]) if full else 0.0
    rem = 1.0 - full * y
    if rem > 1e-15 and full < size:
        val += rem * float(col_sorted_desc[full])
    return p_z * val


@dataclass(frozen=True)
class BruteForceResult:
    value: float
    allocations: np.ndarray  # per-z joint-mass budgets a_z
    cond: ConditionalTable


def brute_force_opt(D: Distinguisher, table: JointTable, k: float) -> BruteForceResult:
    """Grid search over per-z mass budgets, then one exact refinement pass.

    Independent of the threshold construction: allocates total top-mass
    budget 2**-k across z on a 512-step simplex grid (max-plus folds,
    step <= 2**-k / 512), water-fills each column exactly, then refines
    once by enumerating every water-line kink p_z / j with at most one
    free coordinate solved by the budget identity (the per-z values are
    concave piecewise linear, so some optimum sits on that lattice and
    the pass is exact). The coarse stage must come within a grid step's
    worth of the refined value or the result is rejected.
    Only for n <= 3, m <= 2.
    """
    if D.n > 3 or D.m > 2:
        raise ValueError("brute force route is only for n <= 3, m <= 2")
    if (D.n, D.m) != (table.n, table.m):
        raise ValueError("shape mismatch")
    if not (0.0 <= k <= D.n):
        raise ValueError("entropy target out of [0, n]")
    size = 1 << D.n
    p_z_full = table.z_marginal()
    active = np.flatnonzero(p_z_full > 0.0)
    target = 2.0**-k

    sorted_cols = {}
    cums = {}
    for z in active:
        sc = np.sort(D.column(int(z)))[::-1]
        sorted_cols[int(z)] = sc
        cums[int(z)] = np.cumsum(sc)

    def value_z(z: int, a: float) -> float:
        return _water_value(sorted_cols[z], cums[z], float(p_z_full[z]), a)

    lows = {int(z): float(p_z_full[z]) / size for z in active}
    free = target - sum(lows.values())
    if free < -1e-12:
        raise ValueError("entropy target infeasible for this table")
    free = max(free, 0.0)
    steps = 512
    h = free / steps

    # coarse stage: max-plus folds over shared step grid
    tables_v = []
    for z in active:
        a_vals = lows[int(z)] + h * np.arange(steps + 1)
        tables_v.append(np.array([value_z(int(z), float(a)) for a in a_vals]))
    best = tables_v[0].copy()
    choices = []
    for v_next in tables_v[1:]:
        new = np.full(steps + 1, -np.inf)
        arg = np.zeros(steps + 1, dtype=np.int64)
        for s in range(steps + 1):
            cand = best[: s + 1] + v_next[s::-1]
            j = int(np.argmax(cand))
            new[s] = cand[j]
            arg[s] = s - j  # steps given to v_next
        best, choices = new, choices + [arg]
    coarse_alloc = {}
    s = steps
    for z, arg in zip(active[1:][::-1], choices[::-1]):
        i = int(arg[s])
        coarse_alloc[int(z)] = i
        s -= i
    coarse_alloc[int(active[0])] = s
    coarse_val = float(best[steps])

    # refinement: every kink of every column, one free coordinate
    act = [int(z) for z in active]
    kink_sets = {
        z: sorted({lows[z]} | {float(p_z_full[z]) / j for j in range(1, size + 1)})
        for z in act
    }
    best_val = coarse_val
    best_alloc = {z: lows[z] + h * coarse_alloc[z] for z in act}
    for free_z in act:
        others = [z for z in act if z != free_z]
        stack: list[tuple[int, list[float], float]] = [(0, [], 0.0)]
        while stack:
            depth, picked, tot = stack.pop()
            if depth == len(others):
                a_free = target - tot
                if a_free < lows[free_z] - 1e-12:
                    continue
                a_free = max(a_free, lows[free_z])
                val = value_z(free_z, a_free) + sum(value_z(z, a) for z, a in zip(others, picked))
                if val > best_val:
                    best_val = val
                    alloc = dict(zip(others, picked))
                    alloc[free_z] = a_free
                    best_alloc = alloc
                continue
            for b in kink_sets[others[depth]]:
                if tot + b <= target + 1e-12:
                    stack.append((depth + 1, picked + [b], tot + b))

    # water-line slopes are at most 2**n, so the grid can trail the exact
    # optimum by at most one step per fold at that slope
    if best_val < coarse_val - 1e-12 or (h > 0 and best_val - coarse_val > len(act) * size * h + 1e-9):
        raise AssertionError("coarse grid and refinement disagree beyond a grid step")

    cond = np.zeros((size, p_z_full.size))
    allocs = np.zeros(p_z_full.size)
    for z in act:
        a = best_alloc[z]
        allocs[z] = a
        y = min(a / float(p_z_full[z]), 1.0)
        order = np.argsort(-D.column(z), kind="stable")
        full = min(int(1.0 / y + 1e-12), size)
        col = np.zeros(size)
        col[order[:full]] = y
        rem = 1.0 - full * y
        if rem > 1e-15 and full < size:
            col[order[full]] = rem
        col /= col.sum()
        cond[:, z] = col
    for z in np.flatnonzero(p_z_full == 0.0):
        cond[:, z] = 1.0 / size
    ct = ConditionalTable(D.n, D.m, cond, p_z_full)
    return BruteForceResult(float(best_val), allocs, ct)


def vertex_enumeration_opt(D: Distinguisher, table: JointTable, k: float) -> float:
    """Global exact optimum by enumerating kink allocations (test oracle).

    The objective is a sum of concave piecewise-linear per-z values, so
    some optimum has every budget but at most one at a kink p_z / j or at
    its floor; the last budget is fixed by the total. Only n <= 3, m <= 2.
    """
    if D.n > 3 or D.m > 2:
        raise ValueError("vertex enumeration is only for n <= 3, m <= 2")
    size = 1 << D.n
    p_z_full = table.z_marginal()
    active = [int(z) for z in np.flatnonzero(p_z_full > 0.0)]
    target = 2.0**-k

    sorted_cols = {z: np.sort(D.column(z))[::-1] for z in active}
    cums = {z: np.cumsum(sorted_cols[z]) for z in active}

    def value_z(z: int, a: float) -> float:
        return _water_value(sorted_cols[z], cums[z], float(p_z_full[z]), a)

    lows = {z: float(p_z_full[z]) / size for z in active}
    kink_sets = {
        z: sorted({lows[z]} | {float(p_z_full[z]) / j for j in range(1, size + 1)})
        for z in active
    }
    best = -np.inf
    for free_z in active:
        others = [z for z in active if z != free_z]
        # iterative product over kink choices, tracking partial sum and value
        frames: list[tuple[int, float, float]] = [(0, 0.0, 0.0)]
        while frames:
            depth, tot, val = frames.pop()
            if depth == len(others):
                a_free = target - tot
                if a_free < lows[free_z] - 1e-12:
                    continue
                cand = val + value_z(free_z, max(a_free, lows[free_z]))
                best = max(best, cand)
                continue
            z = others[depth]
            for b in kink_sets[z]:
                if tot + b <= target + 1e-12:
                    frames.append((depth + 1, tot + b, val + value_z(z, b)))
    return float(best)


# ---- sampled threshold search ----


def find_threshold_sampled(
    D: Distinguisher,
    lambda_norm: float,
    delta: float,
    n_samples: int,
    rng: np.random.Generator,
    *,
    z: int = 0,
) -> float:
    """Bisection for the threshold from fresh uniform samples per round.

    Accepts t' once the empirical excess lands in the middle window
    [lambda' + delta/3, lambda' + 2 delta/3]; otherwise halves toward the
    side the estimate indicates, stopping when the bracket is delta/12
    wide (then snaps to -1 if t' is within delta/12 of it).
    """
    if not (0.0 < lambda_norm < 1.0):
        raise ValueError("lambda_norm must be in (0, 1)")
    if not (0.0 < delta <= 0.25):
        raise ValueError("delta must be in (0, 1/4]")
    if n_samples < 1:
        raise ValueError("need at least one sample per round")
    vals = D.column(z)
    t_lo, t_hi = -1.0, 1.0
    while True:
        t_mid = 0.5 * (t_lo + t_hi)
        xs = rng.integers(0, vals.size, size=n_samples)
        lam_hat = float(np.maximum(vals[xs] - t_mid, 0.0).mean())
        if lam_hat > lambda_norm + 2.0 * delta / 3.0:
            t_lo = t_mid
        elif lam_hat < lambda_norm + delta / 3.0:
            t_hi = t_mid
        else:
            return t_mid
        if t_hi - t_lo <= delta / 12.0:
            break
    return -1.0 if t_mid < -1.0 + delta / 12.0 else t_mid


# ---- generic feasible distributions (for dominance spot checks) ----


def random_feasible_conditional(
    n: int, p_z: np.ndarray, k: float, rng: np.random.Generator
) -> ConditionalTable:
    """A random Y with average conditional min-entropy >= k.

    Draws random per-z caps averaging to 2**-k, then projects random
    conditionals under the caps by capped redistribution.
    """
    size = 1 << n
    m = int(round(math.log2(p_z.size)))
    target = 2.0**-k
    active = np.flatnonzero(p_z > 0.0)
    surplus = target - 1.0 / size
    if surplus < 0:
        raise ValueError("k exceeds n")
    weights = rng.dirichlet(np.ones(active.size))
    caps = np.full(p_z.size, 1.0 / size)
    for w, z in zip(weights, active):
        caps[z] = min(1.0, 1.0 / size + surplus * w / float(p_z[z]))
    cond = np.zeros((size, p_z.size))
    for z in active:
        q = rng.exponential(size=size)
        q /= q.sum()
        cap = caps[z]
        for _ in range(200):
            over = q > cap
            if not over.any():
                break
            excess = float((q[over] - cap).sum())
            q[over] = cap
            room = ~over
            head = cap - q[room]
            q[room] += excess * head / head.sum()
        cond[:, z] = q / q.sum()
    for z in np.flatnonzero(p_z == 0.0):
        cond[:, z] = 1.0 / size
    return ConditionalTable(n, m, cond, p_z)


# ---- plain-text round trip ----


def save_distinguisher(D: Distinguisher, path: str | Path) -> None:
    doc = {
        "n": D.n,
        "m": D.m,
        "upper": D.upper,
        "values": [float(v) for v in D.values.reshape(-1)],
    }
    Path(path).write_text(json.dumps(doc))


def load_distinguisher(path: str | Path) -> Distinguisher:
    doc = json.loads(Path(path).read_text())
    vals = np.array(doc["values"], dtype=np.float64).reshape(1 << doc["n"], 1 << doc["m"])
    return Distinguisher(int(doc["n"]), int(doc["m"]), vals, float(doc["upper"]))
