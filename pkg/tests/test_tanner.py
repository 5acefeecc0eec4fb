import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ldpcstab.degseq import ValidationError, cycle_pair, heavy_tail_poisson, regular_pair
from ldpcstab.tanner import (Code, GuardExceeded, TannerGraph, cycle_codeword, deg2_cycles, degree_counts,
                             enumerate_codewords, example_graph, nullspace_gf2, sample_graph)


def _brute_cycles(graph):
    """Connected sets of degree-two variables meeting every check an even number of times, all
    checks at most twice (simple cycles)."""
    adj = graph.var_neighbors()
    d2 = [v for v in range(graph.n) if graph.var_degrees[v] == 2]
    out = set()
    for r in range(1, len(d2) + 1):
        for sub in itertools.combinations(d2, r):
            cnt = {}
            for v in sub:
                for c in adj[v]:
                    cnt[c] = cnt.get(c, 0) + 1
            if any(k != 2 for k in cnt.values()):
                continue
            # connectivity through shared checks
            seen, todo = {sub[0]}, [sub[0]]
            while todo:
                u = todo.pop()
                for w in sub:
                    if w not in seen and set(adj[u]) & set(adj[w]):
                        seen.add(w)
                        todo.append(w)
            if len(seen) == len(sub):
                out.add(frozenset(sub))
    return out


def test_example_graphs():
    g1 = example_graph(1)
    assert g1.n == 4 and g1.m == 3
    assert set(deg2_cycles(g1)) == {frozenset({0, 1}), frozenset({0, 2, 3}), frozenset({1, 2, 3})}
    assert len(enumerate_codewords(g1.to_code())) == 4
    g2 = example_graph(2)
    assert len(deg2_cycles(g2)) == 6
    with pytest.raises(ValidationError):
        example_graph(3)


@given(st.integers(0, 10 ** 6))
def test_deg2_cycles_match_brute_force(seed):
    rng = np.random.default_rng(seed)
    g = sample_graph(cycle_pair(), 9, rng)
    assert set(deg2_cycles(g)) == _brute_cycles(g)


@given(st.integers(0, 10 ** 6))
def test_cycle_codewords_satisfy_checks(seed):
    g = sample_graph(cycle_pair(), 12, np.random.default_rng(seed))
    code = g.to_code()
    for cyc in deg2_cycles(g):
        assert code.is_codeword(cycle_codeword(g.n, cyc))


@given(st.integers(0, 10 ** 6))
def test_sampled_degrees(seed):
    pair = heavy_tail_poisson(2 ** 5, 0.5)
    vc, cc = degree_counts(pair, 200)
    g = sample_graph(pair, 200, np.random.default_rng(seed))
    assert np.array_equal(np.bincount(g.var_degrees, minlength=vc.size), vc)
    assert g.var_degrees.sum() == g.check_degrees.sum() == g.num_edges


def test_remainder_check_node():
    with pytest.raises(ValidationError):
        degree_counts(cycle_pair(), 256)
    vc, cc = degree_counts(cycle_pair(), 256, allow_remainder=True)
    degs = np.repeat(np.arange(cc.size), cc)
    assert degs.sum() == 512 and np.sum(degs != 3) == 1


@given(st.integers(0, 10 ** 6))
def test_codewords_match_brute_force(seed):
    g = sample_graph(regular_pair(2, 4), 8, np.random.default_rng(seed))
    code = g.to_code()
    words = enumerate_codewords(code)
    brute = [x for x in itertools.product([1, -1], repeat=8) if code.is_codeword(np.array(x))]
    assert {tuple(w) for w in words} == set(brute)
    assert tuple(words[0]) == (1,) * 8


def test_nullspace_rank():
    H = np.array([[1, 1, 0, 0], [0, 1, 1, 0], [1, 0, 1, 0]], dtype=np.uint8)
    B = nullspace_gf2(H)
    assert B.shape[0] == 2
    assert not np.any((H @ B.T) % 2)


def test_enumeration_guard():
    with pytest.raises(GuardExceeded):
        enumerate_codewords(Code([], 30))


def test_text_round_trip():
    g = sample_graph(cycle_pair(), 12, np.random.default_rng(1))
    h = TannerGraph.from_text(g.to_text(), g.m)
    assert h.var_neighbors() == g.var_neighbors()
