import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from entrolab.bitlin import BitVec, make_rng
from entrolab.distmodel import (
    JointTable,
    SingletonEq,
    avg_min_entropy,
    load_table,
    min_entropy,
    planted_source,
    save_table,
    stat_distance,
    unbounded_guess_prob,
)


def uniform_table(n: int, m: int) -> JointTable:
    size = 1 << (n + m)
    return JointTable(n, m, np.full(size, 1.0 / size))


def test_normalization_is_enforced():
    with pytest.raises(ValueError):
        JointTable(1, 0, np.array([0.7, 0.7]))
    with pytest.raises(ValueError):
        JointTable(1, 0, np.array([1.5, -0.5]))
    with pytest.raises(ValueError):
        JointTable(1, 0, np.array([1.0]))  # wrong size


def test_probs_are_frozen():
    t = uniform_table(2, 1)
    with pytest.raises(ValueError):
        t.probs[0] = 0.5


def test_grid_marginal_conditional_roundtrip():
    rng = make_rng(3)
    raw = rng.random(1 << 5)
    t = JointTable(3, 2, raw / raw.sum())
    assert t.grid.shape == (8, 4)
    assert abs(t.z_marginal().sum() - 1.0) < 1e-12
    back = t.conditional().joint()
    assert np.allclose(back.probs, t.probs, atol=1e-15)


def test_conditional_zero_mass_z_stays_zero():
    grid = np.zeros((4, 2))
    grid[:, 0] = 0.25
    t = JointTable(2, 1, grid.reshape(-1))
    cond = t.conditional()
    assert np.all(cond.cond[:, 1] == 0.0)
    assert cond.p_z[1] == 0.0


def test_min_entropy_known_values():
    assert min_entropy(np.full(8, 0.125)) == pytest.approx(3.0, abs=1e-12)
    assert min_entropy(np.array([1.0, 0.0])) == 0.0
    with pytest.raises(ValueError):
        min_entropy(np.array([]))
    with pytest.raises(ValueError):
        min_entropy(np.zeros(4))


def test_avg_min_entropy_uniform_and_guess_prob():
    t = uniform_table(4, 2)
    assert avg_min_entropy(t) == pytest.approx(4.0, abs=1e-12)
    assert unbounded_guess_prob(t) == pytest.approx(2.0**-4, abs=1e-15)


def test_planted_source_entropy_exact():
    rng = make_rng(17)
    for n, k, m in ((6, 3, 2), (8, 5, 1), (5, 0, 2), (6, 6, 0)):
        table, support = planted_source(n, k, m, rng)
        assert abs(avg_min_entropy(table) - k) < 1e-12
        assert support.supports.shape == (1 << m, 1 << k)
        # all mass sits exactly on the declared support
        for z in range(1 << m):
            col = table.grid[:, z]
            on = np.zeros(1 << n, dtype=bool)
            on[support.support(z).astype(np.int64)] = True
            assert np.all(col[~on] == 0.0)
            assert np.all(col[on] > 0.0)


def test_planted_source_assignment_is_consistent():
    rng = make_rng(23)
    table, support = planted_source(7, 4, 2, rng)
    x_of_z = support.sample_assignment(rng)
    for z, xw in enumerate(x_of_z):
        assert xw in support.support(z)


def test_stat_distance_known_and_bounds():
    t1 = JointTable(1, 0, np.array([1.0, 0.0]))
    t2 = JointTable(1, 0, np.array([0.0, 1.0]))
    assert stat_distance(t1, t2) == pytest.approx(1.0)
    assert stat_distance(t1, t1) == 0.0
    with pytest.raises(ValueError):
        stat_distance(t1, uniform_table(2, 0))


@settings(max_examples=40)
@given(st.integers(0, 10**6), st.integers(1, 3), st.integers(0, 2))
def test_stat_distance_is_a_metric_sample(seed, n, m):
    rng = make_rng(seed)
    size = 1 << (n + m)
    a = rng.random(size)
    b = rng.random(size)
    t1 = JointTable(n, m, a / a.sum())
    t2 = JointTable(n, m, b / b.sum())
    d = stat_distance(t1, t2)
    assert 0.0 <= d <= 1.0
    assert d == pytest.approx(stat_distance(t2, t1))


def test_sample_frequencies_match_table():
    rng = make_rng(29)
    t = JointTable(2, 1, np.array([0.4, 0.1, 0.2, 0.05, 0.1, 0.05, 0.05, 0.05]))
    xs, zs = t.sample(40_000, rng)
    idx = (xs.astype(np.int64) << 1) | zs.astype(np.int64)
    freq = np.bincount(idx, minlength=8) / 40_000
    sigma = np.sqrt(t.probs * (1 - t.probs) / 40_000)
    assert np.all(np.abs(freq - t.probs) <= 4 * sigma + 1e-9)


def test_save_load_roundtrip_is_exact(tmp_path):
    rng = make_rng(31)
    raw = rng.random(1 << 6)
    t = JointTable(4, 2, raw / raw.sum())
    path = tmp_path / "table.json"
    save_table(t, path)
    back = load_table(path)
    assert (back.n, back.m) == (4, 2)
    assert np.array_equal(back.probs, t.probs)


def test_singleton_eq_counts_and_matches():
    eq = SingletonEq(6, 0b101)
    assert not eq(0)
    assert eq(0b101)
    assert eq(BitVec(6, 0b101))
    assert eq.queries == 3
    words = np.array([7, 9, 5, 5], dtype=np.uint64)
    assert eq.match_words(words) == 2
    assert eq.queries == 7
    assert eq.match_words(np.array([1, 2], dtype=np.uint64)) is None
    assert eq.queries == 9
