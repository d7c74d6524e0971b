"""Parameter derivations and the four matchers on hand-checkable fixtures,
plus pinned Monte-Carlo recovery points (calibrated by pilot runs; the seeds
are fixed, so these are deterministic)."""

import math

import numpy as np
import pytest

import seedmatch as sm
from seedmatch.errors import BudgetError, DerivationError, InputError
from seedmatch.graph import build_graph, relabel
from seedmatch.matchers import (
    FALLBACK,
    HIGH_DEGREE,
    PROPAGATED,
    SEED_COPIED,
    MatchResult,
    match_high_degree_alg3,
)
from seedmatch.model import SeedMap


def seeds_on(n, pairs):
    pi0 = np.full(n, -1, dtype=np.int64)
    for i2, i1 in pairs:
        pi0[i2] = i1
    return SeedMap(pi0)


def star_tree(n=8):
    return build_graph(n, [(1, 2), (1, 3), (1, 4), (2, 5), (3, 6), (4, 7)])


# -- parameter derivations -------------------------------------------------


def test_derive_params_alg1_worked_example():
    n = 10**4
    s = 0.5
    p = 25 / (n * s * s)
    params = sm.derive_params_alg1(n, p, s, 0.1)
    assert params.ell == 1
    assert params.m == 20
    assert params.tau == pytest.approx(25 / math.log(25), rel=1e-9)


def test_derive_params_alg1_errors():
    with pytest.raises(DerivationError):
        sm.derive_params_alg1(100, 0.0001, 0.1, 0.1)
    with pytest.raises(InputError):
        sm.derive_params_alg1(100, 0.5, 0.5, 0.7)


def test_derive_d_exponents():
    # np = sqrt(n) -> 3; np close to n -> 2; exact exponent 1/3 -> 4
    assert sm.derive_d(10**4, 10**2 / 10**4) == 3
    assert sm.derive_d(100, 0.9) == 2
    assert sm.derive_d(10**6, 10**2 / 10**6) == 4
    with pytest.raises(DerivationError):
        sm.derive_d(100, 0.001)
    with pytest.raises(DerivationError):
        sm.derive_d(100, 1.0)


def test_derive_params_alg3_worked_examples():
    params = sm.derive_params_alg3(10**4, 10 / 10**4, 0.01, 0.1)
    assert params.ell == 3
    eta = sm.derive_params_alg3(10**4, 10 / 10**4, 0.01, 0.2).eta
    # eta with the derived ell=4 at eps=0.2; re-derive by hand for ell=2
    assert 4.0**6 * (10**4) ** 0.6 * 0.01 == pytest.approx(10288.6, abs=0.5)
    assert eta > 0
    assert sm.derive_params_alg3(10**4, 10 / 10**4, 0.0, 0.1).eta == 0.0


# -- path-counting matcher -------------------------------------------------


def test_high_degree_assigns_star_center():
    t = star_tree()
    seeds = seeds_on(8, [(5, 5), (6, 6), (7, 7)])
    result = sm.match_high_degree_alg1(t, t, seeds, ell=2, m=3)
    assert result.pi_hat[1] == 1
    assert result.status[1] == HIGH_DEGREE
    assert not result.failed


def test_high_degree_m_above_degree_assigns_nothing():
    t = star_tree()
    seeds = seeds_on(8, [(5, 5), (6, 6), (7, 7)])
    result = sm.match_high_degree_alg1(t, t, seeds, ell=2, m=4)
    assert len(result.assigned()) == 0
    assert not result.failed


def test_high_degree_two_roots_conflict():
    # two centers in g1 reach the same seeded leaves by disjoint 2-paths
    g1 = build_graph(
        12,
        [(1, 2), (1, 3), (1, 4), (2, 5), (3, 6), (4, 7),
         (11, 8), (11, 9), (11, 10), (8, 5), (9, 6), (10, 7)],
    )
    g2 = star_tree(12)
    seeds = seeds_on(12, [(5, 5), (6, 6), (7, 7)])
    result = sm.match_high_degree_alg1(g1, g2, seeds, ell=2, m=3)
    assert result.failed
    assert ("conflict", 1, 1) in result.conflicts
    assert ("conflict", 11, 1) in result.conflicts


def test_propagate_along_path():
    g = build_graph(4, [(0, 1), (1, 2), (2, 3)])
    partial = MatchResult.empty(4)
    partial.pi_hat[1] = 1
    partial.pi_hat[2] = 2
    partial.status[1] = partial.status[2] = HIGH_DEGREE
    result = sm.propagate_low_degree(g, g, partial, SeedMap.empty(4))
    assert result.pi_hat.tolist() == [0, 1, 2, 3]
    assert result.status[0] == PROPAGATED and result.status[3] == PROPAGATED
    assert not result.failed


def test_propagate_total_partial_is_fixpoint():
    g = build_graph(3, [(0, 1), (1, 2)])
    partial = MatchResult.empty(3)
    partial.pi_hat[:] = [0, 1, 2]
    partial.status[:] = HIGH_DEGREE
    result = sm.propagate_low_degree(g, g, partial, SeedMap.empty(3))
    assert result.pi_hat.tolist() == [0, 1, 2]


def test_propagate_star_leaves_conflict():
    g = build_graph(4, [(0, 1), (0, 2), (0, 3)])
    partial = MatchResult.empty(4)
    partial.pi_hat[0] = 0
    partial.status[0] = HIGH_DEGREE
    result = sm.propagate_low_degree(g, g, partial, SeedMap.empty(4))
    assert result.failed
    assert any(c[0] == "conflict" for c in result.conflicts)


def test_propagate_rejects_failed_partial():
    partial = MatchResult.empty(3)
    partial.failed = True
    g = build_graph(3, [])
    with pytest.raises(InputError):
        sm.propagate_low_degree(g, g, partial, SeedMap.empty(3))


def test_alg1_full_seeding_is_exact():
    rng = np.random.default_rng(0)
    inst = sm.sample_instance(80, 0.2, 0.9, rng)
    seeds = sm.sample_seeds(inst, 1.0, rng)
    result = sm.match_alg1(
        inst.g1, inst.g2, seeds, sm.ParamSet(epsilon=0.1, ell=1, m=3), rng
    )
    _, exact = sm.accuracy(result, inst.pi_star)
    assert exact


def test_alg1_empty_graphs_fall_back_to_random():
    rng = np.random.default_rng(1)
    g = build_graph(6, [])
    result = sm.match_alg1(
        g, g, SeedMap.empty(6), sm.ParamSet(epsilon=0.1, ell=1, m=2), rng
    )
    assert result.is_total() and result.is_injective()
    assert np.all(result.status == FALLBACK)


def test_alg1_calibrated_recovery_point():
    # pinned by a pilot run (2026-08): 10/10 exact at this operating point
    n, s, alpha, eps = 600, 0.9, 0.9, 0.08
    p = 60.0 / (n * s * s)
    params = sm.derive_params_alg1(n, p, s, eps)
    assert (params.ell, params.m) == (1, 25)
    exact_count = 0
    for seed in range(100, 110):
        rng = np.random.default_rng(seed)
        inst = sm.sample_instance(n, p, s, rng)
        seeds = sm.sample_seeds(inst, alpha, rng)
        result = sm.match_alg1(inst.g1, inst.g2, seeds, params, rng)
        _, exact = sm.accuracy(result, inst.pi_star)
        exact_count += exact
    assert exact_count == 10


# -- dense witness matcher -------------------------------------------------


def test_witness_star_counts():
    star = build_graph(4, [(0, 1), (0, 2), (0, 3)])
    seeds = seeds_on(4, [(1, 1)])
    assert sm.compute_witness(star, star, seeds, 1, 0, 0) == 1
    assert sm.compute_witness(star, star, seeds, 1, 2, 0) == 0
    assert sm.compute_witness(star, star, SeedMap.empty(4), 1, 0, 0) == 0


def test_witness_saturates_when_everything_is_seeded():
    g = build_graph(5, [(0, 1), (1, 2), (2, 3), (3, 4)])
    seeds = seeds_on(5, [(i, i) for i in range(5)])
    assert sm.compute_witness(g, g, seeds, 4, 2, 2) == 5


def test_alg2_star_center_match():
    star = build_graph(4, [(0, 1), (0, 2), (0, 3)])
    seeds = seeds_on(4, [(1, 1)])
    result = sm.match_alg2(star, star, seeds, d=2)
    assert result.pi_hat[0] == 0
    assert result.status[1] == SEED_COPIED


def test_alg2_full_seeding_identity():
    rng = np.random.default_rng(2)
    inst = sm.sample_instance(60, 0.2, 1.0, rng)
    g = inst.g2
    seeds = seeds_on(60, [(i, i) for i in range(60)])
    result = sm.match_alg2(g, g, seeds, d=2)
    assert result.pi_hat.tolist() == list(range(60))


def test_alg2_calibrated_exact_recovery():
    # pinned by a pilot run (2026-08): 10/10 exact at alpha=0.4
    n, s, alpha = 2000, 0.9, 0.4
    p = n**0.55 / n
    d = sm.derive_d(n, p)
    exact_count = 0
    for t in range(10):
        rng = np.random.default_rng(1500 + t)
        inst = sm.sample_instance(n, p, s, rng)
        seeds = sm.sample_seeds(inst, alpha, rng)
        result = sm.match_alg2(inst.g1, inst.g2, seeds, d)
        _, exact = sm.accuracy(result, inst.pi_star)
        exact_count += exact
    assert exact_count >= 9


def test_alg2_label_equivariance():
    # seed chosen so that neither run has a witness tie (equivariance is
    # only claimed for tie-free instances)
    rng = np.random.default_rng(6)
    inst = sm.sample_instance(60, 0.2, 0.95, rng)
    seeds = sm.sample_seeds(inst, 0.6, rng)
    base = sm.match_alg2(inst.g1, inst.g2, seeds, d=2)
    assert not any(c[0] == "ambiguous" for c in base.conflicts)
    sigma = rng.permutation(60).astype(np.int64)
    g2p = relabel(inst.g2, sigma)
    pi0p = np.full(60, -1, dtype=np.int64)
    for i in range(60):
        if seeds.pi0[i] >= 0:
            pi0p[sigma[i]] = seeds.pi0[i]
    relabeled = sm.match_alg2(inst.g1, g2p, SeedMap(pi0p), d=2)
    assert not any(c[0] == "ambiguous" for c in relabeled.conflicts)
    for i in range(60):
        assert relabeled.pi_hat[sigma[i]] == base.pi_hat[i]


# -- sparse pair-witness matcher -------------------------------------------


def test_pair_witness_path_example():
    g = build_graph(5, [(0, 1), (1, 2), (2, 3), (3, 4)])
    seeds = seeds_on(5, [(0, 0)])
    exact = sm.compute_pair_witness(g, g, seeds, 2, 2, 1, 1, 1, mode="exact")
    fast = sm.compute_pair_witness(g, g, seeds, 2, 2, 1, 1, 1, mode="fast")
    assert exact == 0
    assert fast == 1


def test_pair_witness_no_seeds_and_bad_input():
    g = build_graph(5, [(0, 1), (1, 2), (2, 3), (3, 4)])
    empty = SeedMap.empty(5)
    assert sm.compute_pair_witness(g, g, empty, 2, 2, 1, 1, 1, "fast") == 0
    assert sm.compute_pair_witness(g, g, empty, 2, 2, 1, 1, 1, "exact") == 0
    with pytest.raises(InputError):
        sm.compute_pair_witness(g, g, empty, 0, 0, 3, 1, 1)
    with pytest.raises(InputError):
        sm.compute_pair_witness(g, g, empty, 2, 2, 1, 1, 1, mode="weird")


def test_alg3_no_seeds_falls_back():
    rng = np.random.default_rng(4)
    inst = sm.sample_instance(30, 0.2, 0.9, rng)
    params = sm.ParamSet(epsilon=0.1, ell=1, eta=1.0)
    result = sm.match_alg3(
        inst.g1, inst.g2, SeedMap.empty(30), params, rng=rng
    )
    assert result.is_total() and result.is_injective()


def test_alg3_full_seeding_is_exact():
    rng = np.random.default_rng(5)
    inst = sm.sample_instance(50, 0.2, 0.9, rng)
    seeds = sm.sample_seeds(inst, 1.0, rng)
    params = sm.ParamSet(epsilon=0.1, ell=1, eta=1.0)
    result = sm.match_alg3(inst.g1, inst.g2, seeds, params, rng=rng)
    _, exact = sm.accuracy(result, inst.pi_star)
    assert exact


def test_alg3_calibrated_accuracy_point():
    # pinned by a pilot run (2026-08): 9/10 trials at fraction >= 0.95; the
    # derived witness threshold is asymptotic, so eta is part of the pin
    n, s, alpha = 300, 0.95, 0.9
    p = 8.0 / n
    params = sm.ParamSet(epsilon=0.45, ell=2, eta=36.0)
    good = 0
    for t in range(10):
        rng = np.random.default_rng(8100 + t)
        inst = sm.sample_instance(n, p, s, rng)
        seeds = sm.sample_seeds(inst, alpha, rng)
        result = sm.match_alg3(inst.g1, inst.g2, seeds, params, mode="fast", rng=rng)
        frac, _ = sm.accuracy(result, inst.pi_star)
        good += frac >= 0.95
    assert good >= 8


def test_alg3_exact_mode_agrees_on_tiny_instance():
    rng = np.random.default_rng(6)
    inst = sm.sample_instance(12, 0.4, 0.9, rng)
    seeds = sm.sample_seeds(inst, 0.6, rng)
    fast = match_high_degree_alg3(inst.g1, inst.g2, seeds, 1, 1.0, "fast")
    exact = match_high_degree_alg3(inst.g1, inst.g2, seeds, 1, 1.0, "exact")
    # exact mode is a strictly harder filter, so it assigns a subset
    fast_pairs = {(int(i1), int(i2)) for i2, i1 in enumerate(fast.pi_hat) if i1 >= 0}
    exact_pairs = {(int(i1), int(i2)) for i2, i1 in enumerate(exact.pi_hat) if i1 >= 0}
    assert len(exact_pairs) <= len(fast_pairs) or fast.failed or exact.failed


# -- seedless matching -----------------------------------------------------


def asymmetric_graph():
    # 6-vertex connected graph with no nontrivial automorphism
    return build_graph(
        6,
        [(0, 1), (0, 2), (0, 3), (1, 3), (1, 4), (1, 5), (3, 4), (4, 5)],
    )


def test_seedless_empty_probe_set_runs_once():
    g = asymmetric_graph()

    def inner(h1, h2, sd):
        return sm.match_alg2(h1, h2, sd, 2)

    result = sm.match_seedless(g, g, 0.0, inner, np.random.default_rng(0))
    assert result.is_total() and result.is_injective()


def test_seedless_identity_instance_reaches_zero_objective():
    g = asymmetric_graph()

    def inner(h1, h2, sd):
        return sm.match_alg2(h1, h2, sd, 2)

    result = sm.match_seedless(g, g, 0.2, inner, np.random.default_rng(1))
    assert sm.qap_objective(g, g, result.pi_hat) == 0
    assert result.pi_hat.tolist() == list(range(6))


def test_seedless_budget_guard():
    rng = np.random.default_rng(2)
    inst = sm.sample_instance(30, 0.3, 1.0, rng)

    def inner(h1, h2, sd):
        return sm.match_alg2(h1, h2, sd, 2)

    with pytest.raises(BudgetError):
        sm.match_seedless(inst.g1, inst.g2, 0.9, inner, rng, budget=100)
