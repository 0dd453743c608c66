import numpy as np
import pytest

from entrolab.bitlin import make_rng, spawn_rngs
from entrolab.distmodel import JointTable, avg_min_entropy
from entrolab.metricopt import (
    Distinguisher,
    HypothesisViolated,
    advantage,
    brute_force_opt,
    entropy_curve,
    exact_threshold,
    find_threshold_sampled,
    kkt_certificate,
    load_distinguisher,
    modified_distinguisher,
    optimal_distribution,
    random_feasible_conditional,
    save_distinguisher,
    vertex_enumeration_opt,
)

RAMP = (1.0, 0.6, 0.3, 0.1)


def ramp_distinguisher() -> Distinguisher:
    return Distinguisher(2, 0, np.array(RAMP).reshape(4, 1))


def random_instance(n, m, rng):
    raw = rng.random(1 << (n + m)) ** 2 + 1e-9
    table = JointTable(n, m, raw / raw.sum())
    D = Distinguisher(n, m, rng.random((1 << n, 1 << m)))
    return table, D


def test_exact_threshold_frozen_ramp_value():
    # excess at t = 0.4 is ((1 - .4) + (.6 - .4)) / 4 = 0.2, solved by hand
    assert exact_threshold(ramp_distinguisher(), 0, 0.2) == pytest.approx(0.4, abs=1e-12)


def test_exact_threshold_monotone_in_excess():
    D = ramp_distinguisher()
    lams = [0.05, 0.1, 0.2, 0.3, 0.5]
    ts = [exact_threshold(D, 0, lam) for lam in lams]
    assert all(a >= b - 1e-12 for a, b in zip(ts, ts[1:]))


def test_exact_threshold_rejects_unreachable_excess():
    with pytest.raises(ValueError):
        exact_threshold(ramp_distinguisher(), 0, 0.0)
    with pytest.raises(ValueError):
        exact_threshold(ramp_distinguisher(), 0, 1.8)


def test_optimal_distribution_frozen_ramp_k1():
    # at k = 1 the maximizer flattens over the top two points
    table = JointTable(2, 0, np.full(4, 0.25))
    D = ramp_distinguisher()
    opt, profile = optimal_distribution(D, table, 1.0)
    assert np.allclose(opt.cond[:, 0], [0.5, 0.5, 0.0, 0.0], atol=1e-12)
    assert D.expect_cond(opt) == pytest.approx(0.8, abs=1e-12)
    assert avg_min_entropy(opt.joint()) == pytest.approx(1.0, abs=1e-12)
    assert 0.0 < profile.lambda_norm < 1.0


def test_optimal_entropy_hits_target_exactly():
    rng = make_rng(41)
    for _ in range(25):
        n, m = int(rng.integers(2, 7)), int(rng.integers(0, 3))
        table, D = random_instance(n, m, rng)
        k = float(rng.uniform(0.3, n - 0.3))
        opt, _ = optimal_distribution(D, table, k)
        assert abs(avg_min_entropy(opt.joint()) - k) < 1e-9


def test_optimizer_matches_brute_force_and_vertex_enumeration():
    rng = make_rng(43)
    for _ in range(15):
        n, m = int(rng.integers(2, 4)), int(rng.integers(0, 3))
        table, D = random_instance(n, m, rng)
        k = float(rng.uniform(0.2, n - 0.2))
        opt, _ = optimal_distribution(D, table, k)
        value = D.expect_cond(opt)
        assert abs(value - brute_force_opt(D, table, k).value) <= 1e-6
        assert abs(value - vertex_enumeration_opt(D, table, k)) <= 1e-6


def test_optimizer_matches_linear_program():
    scipy = pytest.importorskip("scipy")
    from scipy.optimize import linprog

    rng = make_rng(47)
    for _ in range(6):
        n, m = int(rng.integers(2, 4)), int(rng.integers(0, 3))
        table, D = random_instance(n, m, rng)
        k = float(rng.uniform(0.2, n - 0.2))
        size, zs = 1 << n, 1 << m
        p_z = table.z_marginal()
        # variables: joint mass y[x, z] flattened, then per-z caps c[z]
        nv = size * zs + zs
        c_obj = np.zeros(nv)
        c_obj[: size * zs] = -D.values.reshape(-1)
        A_eq = np.zeros((zs, nv))
        for z in range(zs):
            A_eq[z, z : size * zs : zs] = 1.0
        b_eq = p_z
        rows = []
        rhs = []
        for x in range(size):
            for z in range(zs):
                r = np.zeros(nv)
                r[x * zs + z] = 1.0
                r[size * zs + z] = -1.0
                rows.append(r)
                rhs.append(0.0)
        cap_row = np.zeros(nv)
        cap_row[size * zs :] = 1.0
        rows.append(cap_row)
        rhs.append(2.0**-k)
        res = linprog(
            c_obj,
            A_ub=np.array(rows),
            b_ub=np.array(rhs),
            A_eq=A_eq,
            b_eq=b_eq,
            bounds=[(0, None)] * nv,
            method="highs",
        )
        assert res.success
        opt, _ = optimal_distribution(D, table, k)
        assert abs(D.expect_cond(opt) - (-res.fun)) <= 1e-6


def test_kkt_certificate_residuals_vanish():
    rng = make_rng(53)
    for n, m in ((4, 2), (6, 3), (8, 4), (10, 4)):
        table, D = random_instance(n, m, rng)
        k = float(rng.uniform(1.0, n - 0.5))
        opt, profile = optimal_distribution(D, table, k)
        cert = kkt_certificate(D, table, opt, profile)
        assert max(cert.values()) <= 1e-9, cert


def test_optimum_dominates_random_feasible_distributions():
    rng = make_rng(59)
    table, D = random_instance(5, 2, rng)
    k = 2.7
    opt, _ = optimal_distribution(D, table, k)
    best = D.expect_cond(opt)
    p_z = table.z_marginal()
    for _ in range(1000):
        y = random_feasible_conditional(5, p_z, k, rng)
        assert avg_min_entropy(y.joint()) >= k - 1e-9
        assert D.expect_cond(y) <= best + 1e-9


def test_entropy_curve_increasing_in_excess():
    # a larger excess allowance lowers thresholds, grows superlevel sets,
    # and therefore raises the reachable entropy level
    rng = make_rng(61)
    D = Distinguisher(5, 1, rng.random((32, 2)))
    p_z = np.array([0.6, 0.4])
    lams = np.linspace(0.02, 0.6, 12)
    ks = [entropy_curve(D, p_z, float(lam)) for lam in lams]
    assert all(a <= b + 1e-12 for a, b in zip(ks, ks[1:]))
    # strict superlevel sets never hold more mass than closed ones
    for lam, k_closed in zip(lams[:4], ks[:4]):
        assert entropy_curve(D, p_z, float(lam), strict=True) <= k_closed + 1e-12


def test_degenerate_branch_constant_distinguisher():
    table = JointTable(3, 0, np.full(8, 0.125))
    D = Distinguisher(3, 0, np.full((8, 1), 0.7))
    opt, profile = optimal_distribution(D, table, 2.0)
    assert profile.lambda_norm == 0.0
    assert D.expect_cond(opt) == pytest.approx(0.7, abs=1e-12)
    assert avg_min_entropy(opt.joint()) >= 2.0 - 1e-9


def test_optimizer_input_validation():
    table = JointTable(2, 0, np.full(4, 0.25))
    D = ramp_distinguisher()
    with pytest.raises(ValueError):
        optimal_distribution(D, table, 0.0)
    with pytest.raises(ValueError):
        optimal_distribution(D, table, 2.0)
    wide = Distinguisher(2, 0, np.array(RAMP).reshape(4, 1) * 2.0, upper=2.0)
    with pytest.raises(ValueError):
        optimal_distribution(wide, table, 1.0)


def test_modified_distinguisher_shape_and_advantage_sign():
    rng = make_rng(67)
    table, D = random_instance(4, 1, rng)
    k = 2.5
    opt, profile = optimal_distribution(D, table, k)
    Dp = modified_distinguisher(D, profile)
    assert Dp.upper == 2.0
    assert float(Dp.values.min()) >= 0.0
    # the shift keeps the advantage of X over the maximizer at least as large
    adv_raw = D.expect_joint(table) - D.expect_cond(opt)
    adv_mod = Dp.expect_joint(table) - Dp.expect_cond(opt)
    assert adv_mod >= adv_raw - 1e-12
    assert advantage(D, table, k) == pytest.approx(adv_raw, abs=1e-12)


def test_find_threshold_sampled_lands_in_window():
    rng = spawn_rngs(71, 1)[0]
    vals = rng.random(1 << 8)
    D = Distinguisher(8, 0, vals.reshape(-1, 1))
    lam, delta = 0.2 * float(vals.mean()), 0.05
    t_star = exact_threshold(D, 0, lam)
    hits = 0
    for child in spawn_rngs(73, 50):
        t = find_threshold_sampled(D, lam, delta, 10_000, child)
        excess = float(np.maximum(vals - t, 0.0).mean())
        if lam <= excess <= lam + delta:
            hits += 1
            assert t <= t_star + 1e-12
    assert hits >= 45


def test_find_threshold_validation():
    D = ramp_distinguisher()
    rng = make_rng(79)
    with pytest.raises(ValueError):
        find_threshold_sampled(D, 0.0, 0.05, 100, rng)
    with pytest.raises(ValueError):
        find_threshold_sampled(D, 0.2, 0.3, 100, rng)
    with pytest.raises(ValueError):
        find_threshold_sampled(D, 0.2, 0.05, 0, rng)


def test_distinguisher_save_load_roundtrip(tmp_path):
    rng = make_rng(83)
    D = Distinguisher(3, 2, rng.random((8, 4)))
    path = tmp_path / "dist.json"
    save_distinguisher(D, path)
    back = load_distinguisher(path)
    assert (back.n, back.m, back.upper) == (3, 2, 1.0)
    assert np.array_equal(back.values, D.values)


def test_distinguisher_validation():
    with pytest.raises(ValueError):
        Distinguisher(2, 0, np.full((4, 1), 1.5))
    with pytest.raises(ValueError):
        Distinguisher(2, 0, np.full((4, 2), 0.5))
    with pytest.raises(ValueError):
        Distinguisher(2, 0, np.full((4, 1), 0.5), upper=3.0)
    assert isinstance(HypothesisViolated("x"), ValueError)
