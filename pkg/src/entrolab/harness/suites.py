"""Suite runners: one per validation family, emitting ReportRows.

Every suite derives all randomness from SeedSequence(cfg.seed), so a rerun
with the same seed reproduces the rows byte for byte. Bounds are always
recomputed from their defining formulas here, never hard-coded numbers.
"""

from __future__ import annotations

import math

import numpy as np

from .. import bitlin, condenser, hadamard, metricopt, predictor
from ..distmodel import JointTable
from ..metricopt import Distinguisher
from .config import ExperimentConfig
from .report import ReportRow


def _random_joint(n: int, m: int, rng: np.random.Generator) -> JointTable:
    raw = rng.random((1 << n) * (1 << m)) ** 2 + 1e-9
    return JointTable(n, m, raw / raw.sum())


def hill_from_metric(epsilon: float, size: float, delta: float, n: int, m: int) -> tuple[float, float]:
    """Metric-to-HILL parameter arithmetic: (eps, s) becomes
    (eps + delta, s * delta^2 / (m + n)) at the same entropy level."""
    return epsilon + delta, size * delta * delta / (m + n)


# ---------------------------------------------------------------- predictor


def run_predictor(cfg: ExperimentConfig) -> tuple[list[ReportRow], dict]:
    rows: list[ReportRow] = []
    meta: dict = {"suite": "predictor"}
    bound_rows = max(cfg.instances, 20)
    streams = bitlin.spawn_rngs(cfg.seed, cfg.instances + bound_rows)

    # Exact law vs Monte Carlo on random instances.
    for i in range(cfg.instances):
        rng = streams[i]
        n = int(rng.integers(2, 9))
        m = int(rng.integers(0, 5))
        table = _random_joint(n, m, rng)
        Dp = Distinguisher(n, m, 2.0 * rng.random(((1 << n), (1 << m))), upper=2.0)
        params = predictor.PredictorParams(int(rng.integers(1, 9)))
        exact = predictor.exact_success_prob(table, Dp, params)
        mc = predictor.mc_success_prob(table, Dp, params, cfg.mc_trials, rng)
        sigma = math.sqrt(max(exact * (1.0 - exact), 1e-12) / cfg.mc_trials)
        rows.append(
            ReportRow(
                experiment_id=f"predictor-law-{i:02d}",
                seed=cfg.seed,
                n=n,
                m=m,
                ell_or_l=params.ell,
                metric="mc_vs_exact_gap",
                measured=abs(mc - exact),
                bound=3.0 * sigma,
                passed=abs(mc - exact) <= 3.0 * sigma,
            )
        )

    # Success floor on planted instances across the gap range.
    hill_notes = []
    for i in range(bound_rows):
        rng = streams[cfg.instances + i]
        delta_gap = 1 + i % 4
        n = int(rng.integers(6, 9))
        m = int(rng.integers(0, 3))
        k = n - delta_gap
        table, D = predictor.planted_attack_instance(n, m, k, rng)
        rep = predictor.predictor_attack(D, table, float(k))
        rows.append(
            ReportRow(
                experiment_id=f"predictor-floor-{i:02d}",
                seed=cfg.seed,
                n=n,
                m=m,
                k=float(k),
                epsilon=rep.epsilon,
                ell_or_l=rep.ell,
                metric="success_floor",
                measured=rep.success_exact,
                bound=rep.bound,
                passed=rep.passed,
            )
        )
        if i < 4:
            h_eps, h_factor = hill_from_metric(rep.epsilon, 1.0, rep.epsilon / 2.0, n, m)
            hill_notes.append(
                {
                    "instance": f"predictor-floor-{i:02d}",
                    "metric_epsilon": rep.epsilon,
                    "hill_epsilon": h_eps,
                    "hill_size_factor_per_unit": h_factor,
                }
            )
    meta["hill_arithmetic"] = hill_notes
    meta["plot_points"] = _success_vs_rounds_points(cfg)
    return rows, meta


def _success_vs_rounds_points(cfg: ExperimentConfig) -> dict:
    rng = bitlin.make_rng(np.random.SeedSequence(cfg.seed).spawn(1)[0])
    n, m, k = 8, 1, 6
    table, D = predictor.planted_attack_instance(n, m, k, rng)
    rep = predictor.predictor_attack(D, table, float(k))
    opt, profile = metricopt.optimal_distribution(D, table, float(k))
    Dp = metricopt.modified_distinguisher(D, profile)
    ells = sorted({1, 2, 4, rep.ell // 2, rep.ell, 2 * rep.ell} - {0})
    pts = [
        (ell, predictor.exact_success_prob(table, Dp, predictor.PredictorParams(ell)))
        for ell in ells
    ]
    return {"points": pts, "floor": rep.bound}


# ---------------------------------------------------------------- optimizer


def run_optimizer(cfg: ExperimentConfig) -> tuple[list[ReportRow], dict]:
    rows: list[ReportRow] = []
    streams = bitlin.spawn_rngs(cfg.seed, cfg.instances + 3)

    # Exact optimizer against the brute-force oracle at tiny sizes.
    worst_gap = 0.0
    for i in range(cfg.instances):
        rng = streams[i]
        n = int(rng.integers(2, 4))
        m = int(rng.integers(0, 3))
        table = _random_joint(n, m, rng)
        D = Distinguisher(n, m, rng.random(((1 << n), (1 << m))))
        k = float(rng.uniform(0.2, n - 0.2))
        opt, _ = metricopt.optimal_distribution(D, table, k)
        brute = metricopt.brute_force_opt(D, table, k)
        gap = abs(D.expect_cond(opt) - brute.value)
        worst_gap = max(worst_gap, gap)
        rows.append(
            ReportRow(
                experiment_id=f"optimizer-brute-{i:02d}",
                seed=cfg.seed,
                n=n,
                m=m,
                k=k,
                metric="opt_vs_brute_gap",
                measured=gap,
                bound=1e-6,
                passed=gap <= 1e-6,
            )
        )

    # KKT residuals on a size ladder up to n=10, m=4.
    ladder_rng = streams[cfg.instances]
    for j, (n, m) in enumerate(((4, 2), (6, 3), (8, 4), (10, 4))):
        table = _random_joint(n, m, ladder_rng)
        D = Distinguisher(n, m, ladder_rng.random(((1 << n), (1 << m))))
        k = float(ladder_rng.uniform(1.0, n - 0.5))
        opt, profile = metricopt.optimal_distribution(D, table, k)
        cert = metricopt.kkt_certificate(D, table, opt, profile)
        resid = max(cert.values())
        rows.append(
            ReportRow(
                experiment_id=f"optimizer-kkt-{j}",
                seed=cfg.seed,
                n=n,
                m=m,
                k=k,
                metric="kkt_residual",
                measured=resid,
                bound=1e-9,
                passed=resid <= 1e-9,
            )
        )

    # Structural identities of the threshold-shifted distinguisher.
    identity_count = int(cfg.extra.get("identities", cfg.instances))
    identity_rng = streams[cfg.instances + 1]
    worst = {"dominance": 0.0, "uniform_mean": 0.0, "superlevel_identity": 0.0, "excess_budget": 0.0}
    for _ in range(identity_count):
        n = int(identity_rng.integers(2, 7))
        m = int(identity_rng.integers(0, 4))
        table = _random_joint(n, m, identity_rng)
        D = Distinguisher(n, m, identity_rng.random(((1 << n), (1 << m))))
        k = float(identity_rng.uniform(0.3, n - 0.3))
        opt, profile = metricopt.optimal_distribution(D, table, k)
        Dp = metricopt.modified_distinguisher(D, profile)
        adv_raw = D.expect_joint(table) - D.expect_cond(opt)
        adv_mod = Dp.expect_joint(table) - Dp.expect_cond(opt)
        worst["dominance"] = max(worst["dominance"], adv_raw - adv_mod)
        means = Dp.values.mean(axis=0)
        worst["uniform_mean"] = max(worst["uniform_mean"], float(np.abs(means - profile.lambda_norm).max()))
        p_z = table.z_marginal()
        caps = opt.cond.max(axis=0)
        lhs = (Dp.values * opt.cond).sum(axis=0)
        rhs = means * (1 << n) * caps
        live = p_z > 0
        worst["superlevel_identity"] = max(
            worst["superlevel_identity"], float(np.abs(lhs[live] - rhs[live]).max())
        )
        budget = float((lhs * p_z).sum())
        worst["excess_budget"] = max(
            worst["excess_budget"], abs(budget - 2.0 ** (n - k) * profile.lambda_norm)
        )
    for name, value in worst.items():
        rows.append(
            ReportRow(
                experiment_id=f"optimizer-identity-{name}",
                seed=cfg.seed,
                metric=f"{name}_worst_residual",
                measured=value,
                bound=1e-9,
                passed=value <= 1e-9,
            )
        )
    return rows, {"suite": "optimizer", "identity_instances": identity_count, "worst_brute_gap": worst_gap}


# ---------------------------------------------------------------- threshold


def run_threshold(cfg: ExperimentConfig) -> tuple[list[ReportRow], dict]:
    streams = bitlin.spawn_rngs(cfg.seed, cfg.runs)
    n = min(cfg.n, 10)
    hits = 0
    low_side_violations = 0
    for rng in streams:
        vals = rng.random(1 << n)
        D = Distinguisher(n, 0, vals.reshape(-1, 1))
        lam = float(rng.uniform(0.15, 0.85) * vals.mean())
        t_exact = metricopt.exact_threshold(D, 0, lam)
        t_prime = metricopt.find_threshold_sampled(D, lam, cfg.delta, cfg.samples, rng)
        excess = float(np.maximum(vals - t_prime, 0.0).mean())
        if lam - 1e-12 <= excess <= lam + cfg.delta + 1e-12:
            hits += 1
            if t_prime > t_exact + 1e-12:
                low_side_violations += 1
    frac = hits / cfg.runs
    floor = 1.0 - 2.0 * math.log(12.0 / cfg.delta) * math.exp(-cfg.samples * cfg.delta**2 / 3.0)
    rows = [
        ReportRow(
            experiment_id="threshold-window",
            seed=cfg.seed,
            n=n,
            metric="in_window_fraction",
            measured=frac,
            bound=floor,
            passed=frac >= floor,
        ),
        ReportRow(
            experiment_id="threshold-low-side",
            seed=cfg.seed,
            n=n,
            metric="low_side_violations",
            measured=float(low_side_violations),
            bound=0.0,
            passed=low_side_violations == 0,
        ),
    ]
    return rows, {"suite": "threshold", "runs": cfg.runs, "delta": cfg.delta, "samples": cfg.samples}


# ---------------------------------------------------------------- g and h


def run_gprops(cfg: ExperimentConfig) -> tuple[list[ReportRow], dict]:
    tol = 1e-10
    d_grid = np.unique(np.concatenate([np.logspace(-6, 0, 80), np.linspace(1e-6, 1.0, 120)]))
    ells = (2, 4, 8, 16, 32, 64)

    d_uni = np.linspace(1e-6, 1.0, 256)

    viol_dec = 0.0
    viol_convex = 0.0
    viol_lipschitz = 0.0
    for ell in ells:
        g = np.array([predictor.g_eval(float(d), ell) for d in d_grid])
        viol_dec = max(viol_dec, float((g[1:] - g[:-1]).max()))
        # convexity on the mixed grid: interior points at or below the chord
        span = d_grid[2:] - d_grid[:-2]
        chord = (
            (d_grid[2:] - d_grid[1:-1]) * g[:-2] + (d_grid[1:-1] - d_grid[:-2]) * g[2:]
        ) / span
        viol_convex = max(viol_convex, float((g[1:-1] - chord).max()))
        # plain second differences on a uniform grid
        g_u = np.array([predictor.g_eval(float(d), ell) for d in d_uni])
        viol_convex = max(viol_convex, float(-(g_u[2:] - 2 * g_u[1:-1] + g_u[:-2]).min()))
        # pairwise lower bound g(d2) > g(d1) (1 - ell/2 |d2-d1|)
        lower = g[None, :] * (1.0 - 0.5 * ell * np.abs(d_grid[:, None] - d_grid[None, :]))
        gap = g[:, None] - lower  # row index = d2, col = d1; need d2 > d1
        mask = d_grid[:, None] > d_grid[None, :]
        viol_lipschitz = max(viol_lipschitz, float((-gap[mask]).max()))

    a_grid = np.linspace(0.01, 1.0, 34)
    s_grid = np.linspace(1e-6, 1.0, 400)
    viol_h = 0.0
    for a in a_grid:
        for ell in (math.ceil(1.0 + 1.0 / a), math.ceil(1.0 + 1.0 / a) + 7):
            h = (1.0 - (1.0 - s_grid) ** ell) * (1.0 + a / s_grid)
            viol_h = max(viol_h, float(((1.0 + a) - h).max()))

    rows = [
        ReportRow("gprops-decreasing", cfg.seed, "g_monotone_violation", viol_dec, tol, viol_dec <= tol),
        ReportRow("gprops-convex", cfg.seed, "g_convexity_violation", viol_convex, tol, viol_convex <= tol),
        ReportRow(
            "gprops-lipschitz", cfg.seed, "g_ratio_floor_violation", viol_lipschitz, tol, viol_lipschitz <= tol
        ),
        ReportRow("gprops-h-floor", cfg.seed, "h_floor_violation", viol_h, tol, viol_h <= tol),
    ]
    return rows, {"suite": "gprops", "d_grid": len(d_grid), "a_grid": len(a_grid)}


# ---------------------------------------------------------------- decoder


DECODER_REGIMES = (
    ("noiseless", 32, 0.0, 1.0),
    ("errors-only", 16, 0.4, 0.6),
    ("erasure-heavy", 16, 0.0, 0.1),
)


def run_decoder(cfg: ExperimentConfig) -> tuple[list[ReportRow], dict]:
    rows: list[ReportRow] = []
    points = []
    streams = bitlin.spawn_rngs(cfg.seed, len(DECODER_REGIMES))
    for (name, n, err, corr), rng in zip(DECODER_REGIMES, streams):
        l = hadamard.list_size_param(n, err, corr)
        hits = 0
        for _ in range(cfg.trials):
            x = int(bitlin.random_words(n, 1, rng)[0])
            oracle = hadamard.NoisyParityOracle(n, x, error=err, erasure=1.0 - err - corr)
            hits += int(x in hadamard.ld_decode(oracle, n, l, rng))
        rate = hits / cfg.trials
        rows.append(
            ReportRow(
                experiment_id=f"decoder-{name}",
                seed=cfg.seed,
                n=n,
                epsilon=corr - err,
                ell_or_l=l,
                metric="recovery_rate",
                measured=rate,
                bound=0.75,
                passed=rate >= 0.75,
            )
        )
        points.append((corr - err, rate))
    return rows, {"suite": "decoder", "trials": cfg.trials, "plot_points": points}


# ---------------------------------------------------------------- condenser


def run_condenser(cfg: ExperimentConfig) -> tuple[list[ReportRow], dict]:
    k = int(cfg.k) if cfg.k is not None else 5
    rep = condenser.condenser_experiment(
        cfg.n,
        k,
        m=cfg.m,
        gap=cfg.gap,
        trials=cfg.trials,
        iterations=cfg.iterations,
        list_size_mode=cfg.list_size_mode,
        seed=cfg.seed,
    )
    rows = [
        ReportRow(
            experiment_id="condenser-recovery",
            seed=cfg.seed,
            n=rep.n,
            m=rep.m,
            k=float(rep.k),
            epsilon=rep.q,
            metric="recovery_rate_wilson95",
            measured=rep.rate_lower_95,
            bound=rep.target,
            passed=rep.rate_lower_95 > rep.target and rep.trials_run == rep.trials_requested,
        ),
        ReportRow(
            experiment_id="condenser-budget",
            seed=cfg.seed,
            n=rep.n,
            m=rep.m,
            k=float(rep.k),
            metric="adversary_invocations",
            measured=float(rep.invocations),
            bound=float(rep.ceiling),
            passed=rep.invocations <= rep.ceiling and not rep.budget_exhausted,
        ),
    ]
    meta = {
        "suite": "condenser",
        "raw_rate": rep.rate,
        "successes": rep.successes,
        "trials_run": rep.trials_run,
        "planted_q": rep.q,
        "note": (
            "at desk scale the verified list sizes reach or exceed the domain size, "
            "so the Eq-scan floor saturates; the separation against an uninformed "
            "adversary is validated separately at parameters with sub-saturated lists"
        ),
    }
    return rows, meta


SUITES = {
    "predictor": run_predictor,
    "optimizer": run_optimizer,
    "threshold": run_threshold,
    "gprops": run_gprops,
    "decoder": run_decoder,
    "condenser": run_condenser,
}


def run_suite(cfg: ExperimentConfig) -> tuple[list[ReportRow], dict]:
    return SUITES[cfg.kind](cfg)
