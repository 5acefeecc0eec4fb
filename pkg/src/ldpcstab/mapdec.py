"""Brute-force MAP oracles, cycle-codeword witnesses and realization/pattern graphs.

Patterns are sign vectors in {-1, 1}^n labelled by integers: bit k of the
label, counted from the most significant end, is 1 exactly when coordinate k
is -1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import NamedTuple

import numpy as np
from scipy.special import logsumexp

from .channel import Channel
from .degseq import ValidationError
from .tanner import (MAX_CYCLE_DIM, Code, GuardExceeded, TannerGraph, cycle_codeword, deg2_cycles,
                     enumerate_codewords)

MAX_PATTERN_N = 16
MAX_VERTICES = 2 ** 16
BRUTE_FORCE_MAX = 20
TIE_TOL = 1e-12


def _as_code(code) -> Code:
    return code.to_code() if isinstance(code, TannerGraph) else code


@lru_cache(maxsize=64)
def _codewords_cached(rows: tuple, n: int) -> np.ndarray:
    return enumerate_codewords(Code(list(rows), n))


def codewords(code) -> np.ndarray:
    c = _as_code(code)
    return _codewords_cached(tuple(frozenset(r) for r in c.parity_rows), c.n)


def _split_scores(words: np.ndarray, llrs: np.ndarray, half: bool = False):
    """(Σ over infinite coordinates of x_i sign(l_i), Σ over finite coordinates of x_i l_i)."""
    inf = np.isinf(llrs)
    fin = np.where(inf, 0.0, llrs)
    s_inf = words[:, inf] @ np.sign(llrs[inf]) if inf.any() else np.zeros(len(words))
    s_fin = words @ fin
    return s_inf, (0.5 * s_fin if half else s_fin)


# blockwise and bitwise MAP ----------------------------------------------------------------

class BlockDecision(NamedTuple):
    codeword: np.ndarray
    ties: int          # number of codewords sharing the top score
    score: float


def blockwise_map(code, llrs, rng=None) -> BlockDecision:
    """argmax_x Σ x_i l_i over the code; a tie is broken uniformly by ``rng``."""
    words = codewords(code)
    llrs = np.asarray(llrs, dtype=float)
    s_inf, s_fin = _split_scores(words, llrs)
    top = s_inf == s_inf.max()
    best = s_fin[top].max()
    scale = max(1.0, float(np.abs(llrs[np.isfinite(llrs)]).sum()))
    cand = np.nonzero(top & (np.abs(s_fin - best) <= TIE_TOL * scale))[0]
    if cand.size > 1:
        rng = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
        pick = int(cand[rng.integers(cand.size)])
    else:
        pick = int(cand[0])
    score = math.inf if s_inf[pick] > 0 else float(s_fin[pick])
    return BlockDecision(words[pick].copy(), int(cand.size), score)


def bitwise_map(code, llrs, v: int) -> float:
    """ln(Σ_{x_v=+1} e^{Σx_i l_i/2} / Σ_{x_v=-1} e^{Σx_i l_i/2}), by log-sum-exp."""
    words = codewords(code)
    llrs = np.asarray(llrs, dtype=float)
    s_inf, s_fin = _split_scores(words, llrs, half=True)
    pos = words[:, v] == 1
    if not pos.any():
        return -math.inf
    if not (~pos).any():
        return math.inf
    ip, im = s_inf[pos].max(), s_inf[~pos].max()
    if ip != im:
        return math.inf if ip > im else -math.inf
    num = logsumexp(s_fin[pos & (s_inf == ip)])
    den = logsumexp(s_fin[~pos & (s_inf == im)])
    return float(num - den)


def _bsc_unit(p: float) -> float:
    return math.inf if p == 0 else math.log((1 - p) / p)


def _patterns(n: int) -> np.ndarray:
    """All patterns in label order; row j is the pattern with label j."""
    if n > MAX_PATTERN_N:
        raise GuardExceeded(f"n={n} exceeds the pattern cap {MAX_PATTERN_N}")
    j = np.arange(2 ** n)
    bits = (j[:, None] >> np.arange(n - 1, -1, -1)[None, :]) & 1
    return (1 - 2 * bits).astype(np.int8)


def pattern_of(label: int, n: int) -> np.ndarray:
    bits = (label >> np.arange(n - 1, -1, -1)) & 1
    return (1 - 2 * bits).astype(np.int8)


def label_of(pattern) -> int:
    out = 0
    for x in pattern:
        out = 2 * out + (1 if x < 0 else 0)
    return out


def pattern_prob(pattern, p: float) -> float:
    """P(received signs = pattern | all-one sent) on BSC(p)."""
    k = int(np.sum(np.asarray(pattern) < 0))
    return p ** k * (1 - p) ** (len(pattern) - k)


def exact_bitwise_error(code, p: float, v: int) -> float:
    """P_b^{MAP}(v) on BSC(p) by enumerating every received pattern (½ credit on ties)."""
    c = _as_code(code)
    pats = _patterns(c.n)
    a = _bsc_unit(p)
    total = 0.0
    for pat in pats:
        x = bitwise_map(c, a * pat.astype(float), v) if a != math.inf else \
            bitwise_map(c, np.where(pat > 0, math.inf, -math.inf), v)
        w = pattern_prob(pat, p)
        if x < 0:
            total += w
        elif x == 0:
            total += 0.5 * w
    return total


# cycle-codeword witness -----------------------------------------------------------------------

class Witness(NamedTuple):
    codeword: np.ndarray
    cycle: frozenset
    cycle_sum: float
    score_gain: float   # Σ x°_i l_i - Σ l_i = -2 Σ_{i ∈ cycle} l_i
    tie: bool


def cycle_block_error_witness(graph: TannerGraph, llrs, max_dim: int = MAX_CYCLE_DIM) -> Witness | None:
    """The all-degree-two cycle of smallest LLR sum, if that sum is <= 0.

    Its indicator codeword x° scores at least as high as the all-one word.
    """
    llrs = np.asarray(llrs, dtype=float)
    best = None
    for cyc in deg2_cycles(graph, max_dim):
        t = math.fsum(llrs[sorted(cyc)])
        if best is None or t < best[0] or (t == best[0] and sorted(cyc) < sorted(best[1])):
            best = (t, cyc)
    if best is None:
        return None
    t, cyc = best
    scale = max(1.0, float(np.abs(llrs[sorted(cyc)]).sum()))
    tie = abs(t) <= TIE_TOL * scale
    if t > 0 and not tie:
        return None
    x = cycle_codeword(graph.n, cyc)
    gain = float(np.dot(x, llrs) - llrs.sum()) if np.all(np.isfinite(llrs)) else -2 * t
    return Witness(x, cyc, 0.0 if tie else t, gain, bool(tie))


# realization and pattern graphs ------------------------------------------------------------------

@dataclass
class RealizationGraph:
    n: int
    v: int
    vertices: list
    edges: set
    cycle_sets: list
    edge_cycle: dict = field(default_factory=dict)   # edge -> index into cycle_sets

    def adjacency(self) -> dict:
        adj = {u: [] for u in self.vertices}
        for a, b in sorted(self.edges):
            adj[a].append(b)
            adj[b].append(a)
        return adj

    def to_edge_list(self) -> str:
        return "".join(f"{a} {b}\n" for a, b in sorted(self.edges))


@dataclass
class PatternGraph:
    matching: list
    vertex_set: set

    @property
    def size(self) -> int:
        return len(self.matching)

    def to_edge_list(self) -> str:
        return "".join(f"{a} {b}\n" for a, b in sorted(self.matching))


def build_realization_graph(graph: TannerGraph, v: int, sum_bound: float = 1.0,
                            length_bound: int | None = None, min_length: int = 1,
                            max_dim: int = MAX_CYCLE_DIM) -> RealizationGraph:
    """Patterns joined by a sign flip along one degree-two cycle I through v with
    |Σ_{k∈I} i_k| <= sum_bound; patterns without neighbours are dropped.

    Only cycles with min_length <= |I| <= length_bound take part.
    """
    if graph.n > MAX_PATTERN_N:
        raise GuardExceeded(f"n={graph.n} exceeds the pattern cap {MAX_PATTERN_N}")
    cycles = [c for c in deg2_cycles(graph, max_dim, through=v) if v in c]
    cycles = [c for c in cycles if len(c) >= min_length
              and (length_bound is None or len(c) <= length_bound)]
    cycles.sort(key=lambda c: (len(c), sorted(c)))
    n = graph.n
    pats = _patterns(n)
    labels = np.arange(2 ** n)
    edges, owner = set(), {}
    for ci, cyc in enumerate(cycles):
        idx = sorted(cyc)
        sums = pats[:, idx].sum(axis=1)
        mask = 0
        for k in idx:
            mask |= 1 << (n - 1 - k)
        for j in labels[np.abs(sums) <= sum_bound + 1e-12].tolist():
            e = (min(j, j ^ mask), max(j, j ^ mask))
            if e not in edges:
                edges.add(e)
                owner[e] = ci
    verts = sorted({u for e in edges for u in e})
    if len(verts) > MAX_VERTICES:
        raise GuardExceeded("realization graph too large")
    return RealizationGraph(n, v, verts, edges, cycles, owner)


# maximum matching ---------------------------------------------------------------------------

def _blossom(nv: int, adj: list) -> list:
    """Edmonds' augmenting paths with blossom contraction; returns mate array."""
    match = [-1] * nv

    def lca(a, b, base, parent):
        seen = [False] * nv
        while True:
            a = base[a]
            seen[a] = True
            if match[a] == -1:
                break
            a = parent[match[a]]
        while True:
            b = base[b]
            if seen[b]:
                return b
            b = parent[match[b]]

    def mark_path(x, b, child, base, parent, blossom):
        while base[x] != b:
            blossom[base[x]] = blossom[base[match[x]]] = True
            parent[x] = child
            child = match[x]
            x = parent[match[x]]

    def find_path(root):
        used = [False] * nv
        parent = [-1] * nv
        base = list(range(nv))
        used[root] = True
        queue = [root]
        qi = 0
        while qi < len(queue):
            x = queue[qi]
            qi += 1
            for y in adj[x]:
                if base[x] == base[y] or match[x] == y:
                    continue
                if y == root or (match[y] != -1 and parent[match[y]] != -1):
                    cur = lca(x, y, base, parent)
                    blossom = [False] * nv
                    mark_path(x, cur, y, base, parent, blossom)
                    mark_path(y, cur, x, base, parent, blossom)
                    for i in range(nv):
                        if blossom[base[i]]:
                            base[i] = cur
                            if not used[i]:
                                used[i] = True
                                queue.append(i)
                elif parent[y] == -1:
                    parent[y] = x
                    if match[y] == -1:
                        return y, parent
                    used[match[y]] = True
                    queue.append(match[y])
        return -1, parent

    for r in range(nv):
        if match[r] != -1:
            continue
        # greedy start is not needed for correctness; plain search from each free vertex
        end, parent = find_path(r)
        while end != -1:
            pv = parent[end]
            nxt = match[pv]
            match[end], match[pv] = pv, end
            end = nxt
    return match


def _index_graph(rg: RealizationGraph):
    idx = {u: i for i, u in enumerate(rg.vertices)}
    adj = [[] for _ in rg.vertices]
    for a, b in sorted(rg.edges):
        adj[idx[a]].append(idx[b])
        adj[idx[b]].append(idx[a])
    return idx, adj


def maximum_matching(rg: RealizationGraph) -> PatternGraph:
    """Maximum-cardinality matching of a general graph."""
    if len(rg.vertices) > MAX_VERTICES:
        raise GuardExceeded("realization graph too large")
    _, adj = _index_graph(rg)
    mate = _blossom(len(rg.vertices), adj)
    pairs = sorted((rg.vertices[i], rg.vertices[j]) for i, j in enumerate(mate) if j > i)
    return PatternGraph(pairs, {u for e in pairs for u in e})


def brute_force_matching_size(rg: RealizationGraph) -> int:
    """Exact maximum matching size by exhaustive branching (at most 20 vertices)."""
    nv = len(rg.vertices)
    if nv > BRUTE_FORCE_MAX:
        raise GuardExceeded(f"brute force limited to {BRUTE_FORCE_MAX} vertices")
    _, adj = _index_graph(rg)
    nbr = [0] * nv
    for i, a in enumerate(adj):
        for j in a:
            nbr[i] |= 1 << j

    @lru_cache(maxsize=None)
    def best(free: int) -> int:
        if free == 0:
            return 0
        i = (free & -free).bit_length() - 1
        rest = free & ~(1 << i)
        out = best(rest)
        cand = nbr[i] & rest
        while cand:
            j = (cand & -cand).bit_length() - 1
            cand &= cand - 1
            out = max(out, 1 + best(rest & ~(1 << j)))
        return out

    return best((1 << nv) - 1)


def is_matching(rg: RealizationGraph, pg: PatternGraph) -> bool:
    seen = set()
    for a, b in pg.matching:
        if (min(a, b), max(a, b)) not in rg.edges or a in seen or b in seen:
            return False
        seen |= {a, b}
    return True


# bit-error lower bound -------------------------------------------------------------------------

@dataclass
class BitErrorBound:
    bound: float
    pattern_mass: float       # P(L ∈ L^{P_v} | all-one sent)
    realization_mass: float   # P(L ∈ L^{R_v} | all-one sent)
    l: int
    matched_fraction: float   # |L^{P_v}| / |L^{R_v}|
    matching_size: int


def bit_error_lower_bound(code, graph: TannerGraph, v: int, channel: Channel, l: int | None = None,
                          sum_bound: float = 1.0, length_bound: int | None = None,
                          min_length: int = 1, samples: int | None = None,
                          rng=None) -> BitErrorBound:
    """P(L ∈ L^{P_v} | X = 1) / (1 + (p̄/p)^l) on the BSC.

    ``l`` must be at least the longest flipping cycle used by the matching
    (it defaults to that length).  The pattern mass is summed exactly, or
    estimated from ``samples`` channel draws when given.
    """
    if not isinstance(channel, Channel) or channel.kind != "BSC":
        raise ValidationError("the bit-error lower bound is stated for the BSC only")
    p = channel.param
    rg = build_realization_graph(graph, v, sum_bound, length_bound, min_length)
    pg = maximum_matching(rg)
    longest = max((len(rg.cycle_sets[rg.edge_cycle[(min(a, b), max(a, b))]]) for a, b in pg.matching),
                  default=0)
    if l is None:
        l = longest
    elif l < longest:
        raise ValidationError(f"l={l} is shorter than a matched flipping cycle ({longest})")
    n = graph.n
    if samples is None:
        pm = sum(pattern_prob(pattern_of(u, n), p) for u in pg.vertex_set)
        rm = sum(pattern_prob(pattern_of(u, n), p) for u in rg.vertices)
    else:
        rng = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
        flips = rng.random((samples, n)) < p
        labs = flips.astype(np.int64) @ (1 << np.arange(n - 1, -1, -1))
        pm = float(np.isin(labs, list(pg.vertex_set)).mean())
        rm = float(np.isin(labs, rg.vertices).mean())
    if p == 0 or not pg.matching:
        bound = 0.0
    else:
        bound = pm / (1 + ((1 - p) / p) ** l)
    frac = len(pg.vertex_set) / len(rg.vertices) if rg.vertices else 0.0
    return BitErrorBound(bound, pm, rm, l, frac, pg.size)
