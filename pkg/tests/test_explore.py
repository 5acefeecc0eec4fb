import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ldpcstab.channel import Channel
from ldpcstab.degseq import ValidationError, cycle_pair, heavy_tail_poisson, regular_pair
from ldpcstab.explore import (choose_epsilon, count_deg2_negative_cycles, detect_cycle_event, g,
                              g_star, g_star_exp_bound, lp_bound, lp_solve_primal, negative_cycle_through,
                              run_batch, run_exploration, run_seed, s_star, smallest_kappa,
                              subcritical_bound, supercritical_bounds)
from ldpcstab.tanner import deg2_cycles, example_graph, sample_graph

seeds = st.integers(0, 2 ** 32)
channels = st.sampled_from([Channel("BEC", 0.3), Channel("BEC", 0.8), Channel("BSC", 0.1),
                            Channel("BSC", 0.2), Channel("BAWGNC", 1.0)])


def _assert_invariants(tr, total_v, total_c):
    assert tr.check_recursion()
    if tr.K is not None:
        assert tr.a_k[tr.K] == 0 and all(a > 0 for a in tr.a_k[:tr.K])
    for used in tr.frontier_used:
        assert used <= tr.d ** tr.l_steps
    for vc, cc in tr.status_counts:
        assert sum(vc) == total_v and sum(cc) == total_c
    assert np.all(np.diff(tr.explored_checks) >= 0)


@given(seeds, channels, st.integers(1, 3))
def test_trace_invariants_on_the_fly(seed, ch, l):
    tr = run_exploration(cycle_pair(), ch, l, 0.5, seed, n=300)
    _assert_invariants(tr, 600, 600)


@given(seeds, st.integers(1, 2))
def test_trace_invariants_presampled_mixed_degrees(seed, l):
    pair = heavy_tail_poisson(8, 0.5)
    G = sample_graph(pair, 400, np.random.default_rng(seed))
    tr = run_exploration(G, Channel("BSC", 0.15), l, 0.3, seed)
    _assert_invariants(tr, G.num_edges, G.num_edges)


def test_determinism():
    G = sample_graph(cycle_pair(), 600, np.random.default_rng(5))
    a = run_exploration(G, Channel("BEC", 0.8), 2, 0.5, 17)
    b = run_exploration(G, Channel("BEC", 0.8), 2, 0.5, 17)
    assert a.a_k == b.a_k and a.revealed_llrs == b.revealed_llrs
    c = run_exploration(cycle_pair(), Channel("BEC", 0.8), 2, 0.5, 17, n=600)
    d = run_exploration(cycle_pair(), Channel("BEC", 0.8), 2, 0.5, 17, n=600)
    assert c.to_csv() == d.to_csv()


def test_perfect_channel_kills_every_path():
    tr = run_exploration(cycle_pair(), Channel("BEC", 0.0), 2, 0.5, 3, n=300, stop_at_first_zero=True)
    # each stage consumes one of the d = 2 stage-0 half-edges and adds nothing
    assert all(z == 0 for z in tr.z_k[1:])
    assert tr.K == tr.a_k[0] == 2


def test_forced_heads_grow_at_branching_rate():
    # every LLR is 0 on BEC(1); heads keeps every path, so a cycle-free start doubles per step
    tr = run_exploration(cycle_pair(), Channel("BEC", 1.0), 1, 0.05, 4, n=4000, coin=True, max_stages=4)
    assert tr.a_k[:3] == [2, 3, 4]
    tails = run_exploration(cycle_pair(), Channel("BEC", 1.0), 1, 0.05, 4, n=4000, coin=False,
                            stop_at_first_zero=True)
    assert tails.K == 2


def test_trace_csv_header():
    tr = run_exploration(cycle_pair(), Channel("BEC", 0.8), 2, 0.2, 1, n=300)
    lines = tr.to_csv().splitlines()
    assert lines[0] == "k,A_k,Z_k,explored_check_halfedges"
    assert len(lines) == tr.stages + 1


def test_rejects_pair_without_degree_two():
    with pytest.raises(ValidationError):
        run_exploration(regular_pair(3, 6), Channel("BEC", 0.5), 1, 0.5, 0, n=100)


def test_cycle_event_forced_landing():
    hits = 0
    for seed in range(60):
        tr = run_exploration(cycle_pair(), Channel("BSC", 0.3), 2, 0.2, seed, n=600)
        ev = detect_cycle_event(tr, rng=seed, force_active=True)
        if not ev.landed_active:
            continue
        before = tr.a_k[:]
        if ev.occurred:
            hits += 1
            assert ev.llr_sum < 0 or ev.tie
            assert math.fsum(tr.revealed_llrs[x] for x in ev.cycle) == pytest.approx(ev.llr_sum, abs=1e-9)
        assert tr.a_k == before
    assert hits > 0


def test_cycle_event_requires_active():
    tr = run_exploration(cycle_pair(), Channel("BEC", 0.0), 1, 0.5, 2, n=300)
    assert not detect_cycle_event(tr, rng=0).occurred


def test_presampled_cycle_event_is_a_graph_cycle():
    hits = 0
    for seed in range(200):
        G = sample_graph(cycle_pair(), 30, np.random.default_rng(seed))
        tr = run_exploration(G, Channel("BSC", 0.35), 2, 0.2, seed)
        ev = detect_cycle_event(tr, rng=seed)
        if ev.occurred:
            hits += 1
            assert ev.cycle in set(deg2_cycles(G))
            if not ev.tie:
                llrs = [tr.revealed_llrs.get(i, 1.0) for i in range(G.n)]
                assert count_deg2_negative_cycles(G, llrs) > 0
    assert hits > 0


@given(seeds, st.sampled_from([0.5, 1.0, 2.0]))
def test_negative_cycle_routes_agree(seed, shift):
    # Dijkstra route (nonnegative LLRs) against explicit enumeration of cycles through v
    rng = np.random.default_rng(seed)
    G = sample_graph(cycle_pair(), 30, rng)
    llrs = rng.exponential(1.0, G.n)
    llrs[0] = -shift
    ev = negative_cycle_through(G, llrs, 0, coin=False)
    through = [c for c in deg2_cycles(G, through=0) if 0 in c]
    best = min((math.fsum(llrs[list(c)]) for c in through), default=math.inf)
    assert ev.occurred == (best < 0)
    if ev.occurred:
        assert math.fsum(llrs[list(ev.cycle)]) == pytest.approx(best, abs=1e-9)


def test_count_negative_cycles_example():
    G = example_graph(1)
    assert count_deg2_negative_cycles(G, [-1, -1, 1, 1]) == 2
    assert count_deg2_negative_cycles(G, [1, 1, 1, 1]) == 0
    G3 = sample_graph(regular_pair(3, 6), 12, np.random.default_rng(0))
    assert count_deg2_negative_cycles(G3, -np.ones(12)) == 0


def test_subcritical_bound_values():
    assert subcritical_bound(1e4, 0.4, 1, 0.5, 0.0, 2) == 1.0
    # δ²γ^{2l}/d^{2l} = 0.1
    val = subcritical_bound(1e4, 0.4, 1, math.sqrt(0.1), 1.0, 1)
    assert val == pytest.approx(math.exp(-0.1 * 10 ** 1.6), rel=1e-12)
    with pytest.raises(ValidationError):
        subcritical_bound(1e4, 0.6, 1, 0.5, 0.5, 2)


def test_supercritical_bound_values():
    b = supercritical_bounds(1000, 1.0, 1, 2.0, 0.4, 4, 100)
    assert b.bound_Ak == pytest.approx(math.exp(-40), rel=1e-12)
    k = smallest_kappa(1, 2.0, 0.4, 4)
    assert supercritical_bounds(1000, 1.0, 1, 2.0, 0.4, 4, k).c_kappa < 1
    assert k == 0 or supercritical_bounds(1000, 1.0, 1, 2.0, 0.4, 4, k - 1).c_kappa >= 1
    with pytest.raises(ValidationError):
        supercritical_bounds(1000, 1.0, 1, 1.2, 0.4, 4, 10)


@given(st.integers(1, 9), st.integers(1, 16), st.floats(0.1, 5.0))
def test_lp_strong_duality(num, d_l, s):
    gamma_l = 1 + (d_l - 1) * num / 10
    assert lp_solve_primal(gamma_l, d_l, s).value == pytest.approx(lp_bound(gamma_l, d_l, s), abs=1e-9)


def test_lp_examples():
    assert lp_bound(2, 4, 0.5) == pytest.approx(0.5 + 0.5 * math.exp(-2), abs=1e-12)
    sol = lp_solve_primal(2, 4, 0.5)
    assert sol.p.sum() == pytest.approx(1.0) and sol.p @ np.arange(5) == pytest.approx(2.0)
    assert lp_bound(4, 4, 0.3) == pytest.approx(math.exp(-1.2))
    with pytest.raises(ValidationError):
        lp_bound(5, 4, 1.0)


def test_g_star_examples():
    assert g_star(2, 4, 0.5) == pytest.approx(0.5 ** -0.25 * (2 / 3) ** 0.75, rel=1e-12)
    assert g(s_star(2, 4, 0.5), 2, 4, 0.5) == pytest.approx(g_star(2, 4, 0.5), rel=1e-12)
    s = np.linspace(1e-4, 10, 200_001)
    assert g(s, 2, 4, 0.5).min() == pytest.approx(g_star(2, 4, 0.5), abs=1e-6)
    assert g_star_exp_bound(2, 4, 0.5)


@pytest.mark.parametrize("ch", [Channel("BEC", 0.8), Channel("BSC", 0.2)])
def test_choose_epsilon_cycle(ch):
    choice = choose_epsilon(ch, cycle_pair())
    gamma, l, eps = choice
    assert 1 < gamma < 2 and eps > 0 and choice.verified
    assert ch.error_prob_power(l) * choice.residual_mu ** l >= gamma ** l


def test_choose_epsilon_refuses_boundary():
    with pytest.raises(ValidationError):
        choose_epsilon(Channel("BEC", 0.5), cycle_pair())


def test_batch_seeds_and_threads():
    a = run_batch(cycle_pair(), Channel("BEC", 0.8), 120, 2, 0.5, 6, 99)
    b = run_batch(cycle_pair(), Channel("BEC", 0.8), 120, 2, 0.5, 6, 99, threads=2)
    assert a == b
    solo = run_batch(cycle_pair(), Channel("BEC", 0.8), 120, 2, 0.5, 6, 99)[3]
    assert solo == a[3]
    assert run_seed(7, 3).spawn_key == (3,)
