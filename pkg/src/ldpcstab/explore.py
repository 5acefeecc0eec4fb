"""Staged exploration of a Tanner graph from a degree-two variable node.

The process reveals edges and channel LLRs breadth first, keeps a check
half-edge active only while the LLR sum along its most recent block of ``l``
degree-two variables is negative, and tracks the active count A_k, its
increments Z_k and the first zero K.  Theoretical bound calculators for the
sub- and supercritical regimes and the Chernoff linear program live here too.
"""
from __future__ import annotations

import math
import heapq
from collections import deque
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .channel import Channel
from .degseq import DegreePair, ValidationError, residual
from .tanner import MAX_CYCLE_DIM, TannerGraph, deg2_cycles, degree_counts
from .universal import choose_l, error_prob_power

NEUTRAL, EXPLORED, OPEN, ACTIVE = 0, 1, 2, 3
STATUS_NAMES = ("neutral", "explored", "open", "active")
TIE_RTOL = 1e-12


def _is_zero(total: float, scale: float) -> bool:
    return math.isfinite(total) and abs(total) <= TIE_RTOL * max(scale, 1.0)


@dataclass
class ExplorationTrace:
    """Per-stage record of one exploration run.

    ``a_k[k]`` is the number of active check half-edges after stage k and
    ``z_k[k] = a_k[k] - a_k[k-1] + 1`` (with a_k[-1] = 0).  Stage 0 and every
    restart stage are included.  ``K`` is the first k with A_k = 0;
    ``k_excursions`` holds the same quantity per contiguous excursion, counted
    from that excursion's own stage 0.
    """

    l_steps: int
    eps_frac: float
    n: int
    start_var: int
    a_k: list = field(default_factory=list)
    z_k: list = field(default_factory=list)
    explored_checks: list = field(default_factory=list)   # cumulative, after each stage
    frontier_used: list = field(default_factory=list)     # check half-edges processed by step rule 1
    K: int | None = None
    k_excursions: list = field(default_factory=list)
    restarts: int = 0
    restart_stages: list = field(default_factory=list)
    exhausted: bool = False
    stop_reason: str = ""
    e2_landings: int = 0
    var_status: np.ndarray | None = None
    check_status: np.ndarray | None = None
    status_counts: list = field(default_factory=list)     # (var counts, check counts) per stage
    revealed_llrs: dict = field(default_factory=dict)
    _state: object = field(default=None, repr=False, compare=False)

    @property
    def d(self) -> int:
        return self._state.d

    @property
    def stages(self) -> int:
        return len(self.a_k)

    @property
    def final_active(self) -> int:
        return self.a_k[-1] if self.a_k else 0

    @property
    def statuses(self) -> dict:
        return {"var": self.var_status, "check": self.check_status}

    def status_histogram(self) -> dict:
        out = {}
        for side, arr in self.statuses.items():
            cnt = np.bincount(arr, minlength=4)
            out[side] = {STATUS_NAMES[i]: int(cnt[i]) for i in range(4)}
        return out

    def check_recursion(self) -> bool:
        prev = 0
        for a, z in zip(self.a_k, self.z_k):
            if a != prev + z - 1:
                return False
            prev = a
        return True

    def to_csv(self) -> str:
        rows = ["k,A_k,Z_k,explored_check_halfedges"]
        rows += [f"{k},{a},{z},{e}" for k, (a, z, e) in
                 enumerate(zip(self.a_k, self.z_k, self.explored_checks))]
        return "\n".join(rows) + "\n"


class _Explorer:
    """Mutable state of one run; kept on the trace so e₂ can be connected afterwards."""

    def __init__(self, var_degrees, check_degrees, pairing, channel, l, rng_pair, rng_llr,
                 rng_coin, llrs, coin):
        self.vdeg = [int(x) for x in var_degrees]
        cdeg = [int(x) for x in check_degrees]
        self.voff = [0]
        for x in self.vdeg:
            self.voff.append(self.voff[-1] + x)
        self.coff = [0]
        for x in cdeg:
            self.coff.append(self.coff[-1] + x)
        E = self.voff[-1]
        if self.coff[-1] != E:
            raise ValidationError("variable and check half-edge totals differ")
        self.E = E
        self.n = len(self.vdeg)
        self.d = max(cdeg) - 1
        self.v_of = [v for v, x in enumerate(self.vdeg) for _ in range(x)]
        self.c_of = [c for c, x in enumerate(cdeg) for _ in range(x)]
        self.vstat = [NEUTRAL] * E
        self.cstat = [NEUTRAL] * E
        self.vcount = [E, 0, 0, 0]
        self.ccount = [E, 0, 0, 0]
        if pairing is None:
            self.pi = None
            self.vpool = list(range(E))
            self.vpos = list(range(E))
            self.cpool = list(range(E))
            self.cpos = list(range(E))
        else:
            self.pi = [int(x) for x in pairing]
            self.pinv = [0] * E
            for i, j in enumerate(self.pi):
                self.pinv[j] = i
        self.channel = channel
        self.l = l
        self.rng_pair, self.rng_llr, self.rng_coin = rng_pair, rng_llr, rng_coin
        self.fixed_llrs = None if llrs is None else np.asarray(llrs, dtype=float)
        self.coin = coin
        self.llr: dict = {}
        self.rec_parent: list = []
        self.rec_var: list = []
        self.rec_of: dict = {}
        self.fifo: deque = deque()
        self.deg2_ptr = 0

    # status bookkeeping -------------------------------------------------------------
    def set_v(self, h, s):
        self.vcount[self.vstat[h]] -= 1
        self.vcount[s] += 1
        self.vstat[h] = s

    def set_c(self, h, s):
        self.ccount[self.cstat[h]] -= 1
        self.ccount[s] += 1
        self.cstat[h] = s

    @staticmethod
    def _pool_remove(pool, pos, h):
        i = pos[h]
        last = pool.pop()
        if last != h:
            pool[i] = last
            pos[last] = i

    def match(self, u, h):
        self.set_v(u, EXPLORED)
        self.set_c(h, EXPLORED)
        if self.pi is None:
            self._pool_remove(self.vpool, self.vpos, u)
            self._pool_remove(self.cpool, self.cpos, h)

    def var_partner(self, h):
        if self.pi is None:
            return self.vpool[int(self.rng_pair.integers(len(self.vpool)))]
        return self.pinv[h]

    def check_partner(self, u, rng=None):
        if self.pi is None:
            rng = self.rng_pair if rng is None else rng
            return self.cpool[int(rng.integers(len(self.cpool)))]
        return self.pi[u]

    def reveal(self, v):
        x = self.llr.get(v)
        if x is None:
            if self.fixed_llrs is not None:
                x = float(self.fixed_llrs[v])
            else:
                x = float(self.channel.sample(self.rng_llr, 1)[0])
            self.llr[v] = x
        return x

    def flip(self) -> bool:
        if self.coin is not None:
            return bool(self.coin)
        return bool(self.rng_coin.random() < 0.5)

    def new_record(self, parent, var):
        self.rec_parent.append(parent)
        self.rec_var.append(var)
        return len(self.rec_var) - 1

    def path_vars(self, rec, depth=None):
        out = []
        while rec >= 0 and (depth is None or len(out) < depth):
            if self.rec_var[rec] >= 0:
                out.append(self.rec_var[rec])
            rec = self.rec_parent[rec]
        return out

    # process pieces ---------------------------------------------------------------
    def activate_or_open(self, g, g_status, rec, out):
        """Give the unexplored siblings of check half-edge g their new status."""
        c = self.c_of[g]
        for h in range(self.coff[c], self.coff[c + 1]):
            s = self.cstat[h]
            if h == g or s == EXPLORED:
                continue
            if g_status == NEUTRAL:
                self.set_c(h, ACTIVE)
                self.rec_of[h] = rec
                out.append(h)
            elif s != OPEN:
                self.set_c(h, OPEN)

    def next_restart_node(self):
        while self.deg2_ptr < self.n:
            v = self.deg2_ptr
            if self.vdeg[v] == 2:
                a = self.voff[v]
                if self.vstat[a] == NEUTRAL and self.vstat[a + 1] == NEUTRAL:
                    return v
            self.deg2_ptr += 1
        return None

    def stage0(self, v):
        self.reveal(v)
        e1 = self.voff[v]
        g = self.check_partner(e1)
        gst = self.cstat[g]
        self.match(e1, g)
        root = self.new_record(-1, -1)
        fresh = []
        self.activate_or_open(g, gst, root, fresh)
        self.fifo.extend(fresh)

    def stage(self):
        """One stage; returns the number of check half-edges handled by step rule 1."""
        fifo = self.fifo
        while fifo:
            h0 = fifo.popleft()
            if self.cstat[h0] == ACTIVE:
                break
        else:
            return 0
        frontier = [h0]
        used = 0
        completed = False
        for t in range(1, self.l + 1):
            nxt = []
            for h in frontier:
                if self.cstat[h] != ACTIVE:
                    continue
                used += 1
                u = self.var_partner(h)
                ust = self.vstat[u]
                x = self.v_of[u]
                self.match(u, h)
                a = self.voff[x]
                if self.vdeg[x] == 2:
                    sib = a + 1 if u == a else a
                    if ust == NEUTRAL and self.vstat[sib] == NEUTRAL:
                        self.reveal(x)
                        self.set_v(sib, ACTIVE)
                        g = self.check_partner(sib)
                        gst = self.cstat[g]
                        self.match(sib, g)
                        rec = self.new_record(self.rec_of[h], x)
                        self.activate_or_open(g, gst, rec, nxt)
                        continue
                    if ust == NEUTRAL:
                        self.e2_landings += 1
                for w in range(a, self.voff[x + 1]):
                    if self.vstat[w] in (NEUTRAL, ACTIVE):
                        self.set_v(w, OPEN)
            frontier = nxt
            if not frontier:
                break
            completed = t == self.l
        if completed:
            for h in frontier:
                if self.cstat[h] != ACTIVE:
                    continue
                vals = [self.llr[x] for x in self.path_vars(self.rec_of[h], self.l)]
                total = math.fsum(vals)
                if math.isnan(total):
                    total = math.inf
                if total < 0 and not _is_zero(total, sum(abs(x) for x in vals)):
                    fifo.append(h)
                elif total > 0 and not _is_zero(total, sum(abs(x) for x in vals)):
                    self.set_c(h, OPEN)
                elif self.flip():
                    fifo.append(h)
                else:
                    self.set_c(h, OPEN)
        return used


def _streams(rng):
    if isinstance(rng, np.random.Generator):
        return rng.spawn(3)
    ss = rng if isinstance(rng, np.random.SeedSequence) else np.random.SeedSequence(rng)
    return [np.random.default_rng(s) for s in ss.spawn(3)]


def onthefly_degrees(pair: DegreePair, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Degree lists for on-the-fly runs; one remainder check node absorbs a
    half-edge surplus (e.g. the cycle code when 3 does not divide 2n)."""
    vc, cc = degree_counts(pair, n, allow_remainder=True)
    return np.repeat(np.arange(vc.size), vc), np.repeat(np.arange(cc.size), cc)


def run_exploration(source, channel, l: int, eps_frac: float, rng, n: int | None = None,
                    start: int | None = None, llrs=None, coin: bool | None = None,
                    stop_at_first_zero: bool = False, max_stages: int | None = None
                    ) -> ExplorationTrace:
    """Run the staged exploration.

    ``source`` is either a :class:`TannerGraph` (pre-sampled mode) or a
    :class:`DegreePair` together with ``n`` (edges revealed on the fly).
    ``rng`` (a Generator, SeedSequence or int) is split into independent
    streams for pairing, LLRs and the zero-sum coin; ``coin`` forces the
    coin outcome.  ``llrs`` fixes every channel LLR instead of sampling.
    The run stops once ``eps_frac * n`` check half-edges are explored
    (tested at stage boundaries), at the first zero of A_k when requested,
    after ``max_stages`` stages, or when no restart node is left.
    """
    if l < 1:
        raise ValidationError("need l >= 1")
    if eps_frac <= 0:
        raise ValidationError("eps_frac must be positive")
    if isinstance(source, TannerGraph):
        vd, cd, pairing = source.var_degrees, source.check_degrees, source.pairing
    elif isinstance(source, DegreePair):
        if n is None:
            raise ValidationError("on-the-fly mode needs n")
        if source.lam.size <= 2 or source.lam[2] <= 0:
            raise ValidationError("pair has lambda_2 = 0: no degree-two start node")
        vd, cd = onthefly_degrees(source, n)
        pairing = None
    else:
        raise ValidationError("source must be a TannerGraph or a DegreePair")
    if not 2 in set(int(x) for x in vd):
        raise ValidationError("graph has no degree-two variable node")
    pr, pl, pc = _streams(rng)
    st = _Explorer(vd, cd, pairing, channel, l, pr, pl, pc, llrs, coin)
    st.e2_landings = 0
    if start is None:
        start = st.next_restart_node()
    elif st.vdeg[start] != 2:
        raise ValidationError("start node must have degree two")
    tr = ExplorationTrace(l, eps_frac, st.n, start, _state=st)
    st.start_var = start
    st.e2 = st.voff[start] + 1
    budget = eps_frac * st.n
    dl = st.d ** l

    def record(used):
        a = st.ccount[ACTIVE]
        prev = tr.a_k[-1] if tr.a_k else 0
        k = len(tr.a_k)
        tr.a_k.append(a)
        tr.z_k.append(a - prev + 1)
        tr.explored_checks.append(st.ccount[EXPLORED])
        tr.frontier_used.append(used)
        tr.status_counts.append((tuple(st.vcount), tuple(st.ccount)))
        if used > dl:
            raise AssertionError("stage handled more than d^l check half-edges")
        if a == 0:
            if tr.K is None:
                tr.K = k
            if tr.k_excursions and tr.k_excursions[-1][1] is None:
                tr.k_excursions[-1][1] = k - tr.k_excursions[-1][0]

    st.stage0(start)
    tr.k_excursions.append([0, None])
    record(0)
    while True:
        if st.ccount[EXPLORED] >= budget:
            tr.stop_reason = "budget"
            break
        if max_stages is not None and len(tr.a_k) >= max_stages:
            tr.stop_reason = "max_stages"
            break
        if st.ccount[ACTIVE] == 0:
            if stop_at_first_zero:
                tr.stop_reason = "first_zero"
                break
            v = st.next_restart_node()
            if v is None:
                tr.exhausted = True
                tr.stop_reason = "exhausted"
                break
            tr.restarts += 1
            tr.restart_stages.append(len(tr.a_k))
            tr.k_excursions.append([len(tr.a_k), None])
            st.stage0(v)
            record(0)
            continue
        record(st.stage())
    tr.k_excursions = [tuple(x) for x in tr.k_excursions]
    tr.e2_landings = st.e2_landings
    tr.var_status = np.array(st.vstat, dtype=np.int8)
    tr.check_status = np.array(st.cstat, dtype=np.int8)
    tr.revealed_llrs = dict(st.llr)
    return tr


class CycleEvent(NamedTuple):
    occurred: bool
    cycle: frozenset | None
    landed_active: bool = False
    llr_sum: float = math.nan
    tie: bool = False


def detect_cycle_event(trace: ExplorationTrace, graph: TannerGraph | None = None, rng=None,
                       force_active: bool = False, require_negative_lv: bool = False,
                       coin: bool | None = None) -> CycleEvent:
    """Connect e₂ of the start node and test for a negative all-degree-two cycle.

    The event is only defined for a single excursion (no restarts) that ends
    with active check half-edges and an unconsumed e₂.  In pre-sampled mode
    e₂ follows the graph; otherwise it is joined to a uniform unexplored
    check half-edge drawn from ``rng``.  ``force_active`` instead lands on a
    uniform active half-edge.  A zero LLR sum is settled by a fair coin
    (``coin`` forces it).  The trace is left unchanged.
    """
    st = trace._state
    if trace.restarts or st.ccount[ACTIVE] == 0 or st.vstat[st.e2] != NEUTRAL:
        return CycleEvent(False, None)
    lv = st.llr[st.start_var]
    if require_negative_lv and not lv < 0:
        return CycleEvent(False, None)
    rng = np.random.default_rng(rng) if not isinstance(rng, np.random.Generator) else rng
    if force_active:
        act = [h for h in range(st.E) if st.cstat[h] == ACTIVE]
        g = act[int(rng.integers(len(act)))]
    elif st.pi is not None:
        g = st.pi[st.e2]
    else:
        g = st.check_partner(st.e2, rng)
    if st.cstat[g] != ACTIVE:
        return CycleEvent(False, None)
    path = st.path_vars(st.rec_of[g])
    vals = [lv] + [st.llr[x] for x in path]
    total = math.fsum(vals)
    if math.isnan(total):
        total = math.inf
    cyc = frozenset([st.start_var, *path])
    if _is_zero(total, sum(abs(x) for x in vals if math.isfinite(x))) and math.isfinite(total):
        heads = bool(coin) if coin is not None else bool(rng.random() < 0.5)
        return CycleEvent(heads, cyc if heads else None, True, 0.0, True)
    return CycleEvent(total < 0, cyc if total < 0 else None, True, total)


def count_deg2_negative_cycles(graph: TannerGraph, llrs, max_dim: int = MAX_CYCLE_DIM) -> int:
    """Degree-two variables lying on at least one all-degree-two cycle of negative LLR sum."""
    if graph.n > 10 ** 4:
        raise ValidationError("n must be at most 10^4")
    llrs = np.asarray(llrs, dtype=float)
    hit = set()
    for cyc in deg2_cycles(graph, max_dim):
        if math.fsum(llrs[list(cyc)]) < 0:
            hit |= cyc
    return len(hit)


def negative_cycle_through(graph: TannerGraph, llrs, v: int, rng=None, coin: bool | None = None,
                           max_dim: int = MAX_CYCLE_DIM) -> CycleEvent:
    """Decide directly on the graph whether v lies on an all-degree-two cycle of negative LLR sum.

    A zero minimum is settled by a fair coin, as in :func:`detect_cycle_event`.
    With nonnegative LLRs on the degree-two variables the minimum cycle sum
    through v is L_v plus a Dijkstra distance between its two checks in the
    degree-two multigraph without v; otherwise the cycles through v are
    enumerated under the cycle-space guard.
    """
    llrs = np.asarray(llrs, dtype=float)
    if graph.var_degrees[v] != 2:
        return CycleEvent(False, None)
    deg2 = np.nonzero(graph.var_degrees == 2)[0]
    if np.all(llrs[deg2] >= 0):
        chk = graph.check_of_halfedge[graph.pairing]
        first = graph.var_offsets[:-1]
        a, b = int(chk[first[v]]), int(chk[first[v] + 1])
        keep = deg2[np.isfinite(llrs[deg2]) & (deg2 != v)]
        inc: dict = {}
        for x, c1, c2 in zip(keep.tolist(), chk[first[keep]].tolist(), chk[first[keep] + 1].tolist()):
            inc.setdefault(c1, []).append((c2, x))
            if c1 != c2:
                inc.setdefault(c2, []).append((c1, x))
        dist, via = {a: 0.0}, {}
        heap = [(0.0, a)]
        while heap:
            dc, c = heapq.heappop(heap)
            if c == b:
                break
            if dc > dist[c]:
                continue
            for o, x in inc.get(c, ()):
                nd = dc + llrs[x]
                if nd < dist.get(o, math.inf):
                    dist[o], via[o] = nd, (c, x)
                    heapq.heappush(heap, (nd, o))
        if a == b:
            total, members = float(llrs[v]), [v]
        elif b in dist:
            total, members, c = float(llrs[v]) + dist[b], [v], b
            while c != a:
                c, x = via[c]
                members.append(x)
        else:
            return CycleEvent(False, None)
        cyc = frozenset(members)
    else:
        best = None
        for cyc_ in deg2_cycles(graph, max_dim, through=v):
            if v in cyc_:
                t = math.fsum(llrs[list(cyc_)])
                if best is None or t < best[0]:
                    best = (t, cyc_)
        if best is None:
            return CycleEvent(False, None)
        total, cyc = best
    if _is_zero(total, 0.0):
        if coin is None:
            rng = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
            coin = bool(rng.random() < 0.5)
        return CycleEvent(bool(coin), cyc if coin else None, True, 0.0, True)
    return CycleEvent(total < 0, cyc if total < 0 else None, True, total)


# bounds -------------------------------------------------------------------------------

def subcritical_bound(n: float, a: float, l: int, gamma: float, delta: float, d: int) -> float:
    """exp(-n^a δ² γ^{2l} / d^{2l})."""
    if not 0 < a < 0.5:
        raise ValidationError("need a in (0, 1/2)")
    if not 0 < gamma < 1:
        raise ValidationError("need gamma in (0, 1)")
    return math.exp(-n ** a * delta ** 2 * gamma ** (2 * l) / d ** (2 * l))


class SupercriticalBounds(NamedTuple):
    bound_Ak: float
    bound_K: float
    c_kappa: float


def _rate(l, gamma, delta, d):
    return delta ** 2 * gamma ** l / (2 * d ** l)


def supercritical_bounds(n: float, eps_frac: float, l: int, gamma: float, delta: float, d: int,
                         kappa: int) -> SupercriticalBounds:
    """(e^{-εnq}, c_κ(1 - e^{-(εn-κ)q}), c_κ) with q = δ²γ^l/(2d^l)."""
    if not 0 < delta < 1:
        raise ValidationError("need delta in (0, 1)")
    if (1 - delta) * gamma ** l <= 1:
        raise ValidationError("need (1 - delta) gamma^l > 1")
    q = _rate(l, gamma, delta, d)
    en = eps_frac * n
    c = math.exp(-(kappa + 1) * q) / -math.expm1(-q)
    return SupercriticalBounds(math.exp(-en * q), c * -math.expm1(-(en - kappa) * q), c)


def smallest_kappa(l: int, gamma: float, delta: float, d: int) -> int:
    """Smallest κ with c_κ < 1."""
    q = _rate(l, gamma, delta, d)
    # c_κ < 1  ⇔  (κ+1) q > -ln(1 - e^{-q})
    return max(0, math.floor(-math.log(-math.expm1(-q)) / q))


# Chernoff linear program -----------------------------------------------------------------

def _lp_check(gamma_l, d_l, s):
    if s <= 0:
        raise ValidationError("need s > 0")
    if int(d_l) != d_l or d_l < 1:
        raise ValidationError("d^l must be a positive integer")
    if not 1 <= gamma_l <= d_l:
        raise ValidationError("need 1 <= gamma^l <= d^l (otherwise the program is infeasible)")


def lp_bound(gamma_l: float, d_l: int, s: float) -> float:
    """Dual optimum 1 - γ^l/d^l + e^{-s d^l} γ^l/d^l, a bound on E[e^{-sZ} | F]."""
    _lp_check(gamma_l, d_l, s)
    w = gamma_l / d_l
    return 1.0 - w + w * math.exp(-s * d_l)


class PrimalSolution(NamedTuple):
    p: np.ndarray
    value: float   # max Σ p_j e^{-sj}, the negated primal optimum


def lp_solve_primal(gamma_l: float, d_l: int, s: float) -> PrimalSolution:
    """Maximise Σ p_j e^{-sj} over p >= 0, Σ p_j <= 1, Σ j p_j >= γ^l by vertex enumeration.

    Every vertex has at most two nonzero coordinates: one atom with either
    constraint tight, or two atoms with both tight.
    """
    _lp_check(gamma_l, d_l, s)
    D = int(d_l)
    w = np.exp(-s * np.arange(D + 1))
    best, arg = -math.inf, None
    for j in range(1, D + 1):
        for pj in (1.0, gamma_l / j):
            if pj <= 1.0 + 1e-15 and j * pj >= gamma_l - 1e-12:
                val = pj * w[j]
                if val > best:
                    best, arg = val, ((j, pj),)
    for i in range(D + 1):
        for j in range(i + 1, D + 1):
            if i <= gamma_l <= j:
                pj = (gamma_l - i) / (j - i)
                pi = 1.0 - pj
                val = pi * w[i] + pj * w[j]
                if val > best:
                    best, arg = val, ((i, pi), (j, pj))
    p = np.zeros(D + 1)
    for j, pj in arg:
        p[j] += pj
    return PrimalSolution(p, float(best))


def g(s, gamma_l: float, d_l: float, delta: float):
    """e^{s δ̄ γ^l} (1 - γ^l/d^l + e^{-s d^l} γ^l/d^l)."""
    s = np.asarray(s, dtype=float)
    w = gamma_l / d_l
    out = np.exp(s * (1 - delta) * gamma_l) * (1 - w + w * np.exp(-s * d_l))
    return float(out) if out.ndim == 0 else out


def _g_check(gamma_l, d_l, delta):
    if not 0 < delta < 1:
        raise ValidationError("need delta in (0, 1)")
    if not 0 < gamma_l < d_l:
        raise ValidationError("need 0 < gamma^l < d^l")


def s_star(gamma_l: float, d_l: float, delta: float) -> float:
    _g_check(gamma_l, d_l, delta)
    db = 1 - delta
    return -math.log(db * (d_l - gamma_l) / (d_l - db * gamma_l)) / d_l


def g_star(gamma_l: float, d_l: float, delta: float) -> float:
    """min_s g(s) = δ̄^{-δ̄γ^l/d^l} ((d^l - γ^l)/(d^l - δ̄γ^l))^{1 - δ̄γ^l/d^l}."""
    _g_check(gamma_l, d_l, delta)
    db = 1 - delta
    t = db * gamma_l / d_l
    return db ** -t * ((d_l - gamma_l) / (d_l - db * gamma_l)) ** (1 - t)


def g_star_exp_bound(gamma_l: float, d_l: float, delta: float, s_grid=None) -> bool:
    """g* <= e^{-δ²γ^l/(2d^l)} and g(s) >= g* across ``s_grid``."""
    gs = g_star(gamma_l, d_l, delta)
    if s_grid is None:
        s_grid = np.linspace(1e-4, 10.0, 100_000)
    ok_exp = gs <= math.exp(-delta ** 2 * gamma_l / (2 * d_l)) * (1 + 1e-12)
    ok_min = bool(np.all(g(np.asarray(s_grid), gamma_l, d_l, delta) >= gs * (1 - 1e-12)))
    return bool(ok_exp and ok_min)


# choice of (γ, l, ε) -------------------------------------------------------------------

@dataclass
class EpsilonChoice:
    gamma: float
    l: int
    epsilon: float
    xi: float
    residual_mu: float
    verified: bool

    def __iter__(self):
        return iter((self.gamma, self.l, self.epsilon))


def choose_epsilon(channel: Channel, pair: DegreePair) -> EpsilonChoice:
    """Pick γ ∈ (1, d), l and an edge budget ε so that every residual pair within
    the budget keeps E(c^{⊛l}) (λ̂'(0) ρ̂'(1))^l >= γ^l.

    γ^l is the midpoint between 1 and E(c^{⊛l}) μ^l; ξ is the slack
    μ - (γ^l / E(c^{⊛l}))^{1/l} and ε = min{(ξ/2)/C, L₂} with C the
    residual sensitivity ρ'(1)/L'(1) + 2L₂r²/L'(1)².
    """
    mu = pair.mu
    b = channel.bhattacharyya()
    if not b * mu > 1:
        raise ValidationError(f"B(c) lambda'(0) rho'(1) = {b * mu} is not above 1")
    l = choose_l(channel, mu)
    e_l = error_prob_power(channel, l)
    d = pair.max_check_degree - 1
    gamma_l = 0.5 * (1.0 + e_l * mu ** l)
    gamma = gamma_l ** (1.0 / l)
    if not 1 < gamma < d:
        raise ValidationError(f"gamma = {gamma} outside (1, {d})")
    xi = mu - (gamma_l / e_l) ** (1.0 / l)
    Lp = pair.L_prime1
    C = pair.rho_prime1 / Lp + 2 * pair.L2 * pair.max_check_degree ** 2 / Lp ** 2
    eps = min(0.5 * xi / C, pair.L2)
    lower = pair.mu - C * eps
    # a concrete residual at the budget: all removed variable mass on degree two,
    # all removed check mass on the top degree
    r = pair.design_rate
    top = pair.max_check_degree
    phi = np.zeros(3)
    phi[2] = min(eps, 2 * pair.L[2])
    psi = np.zeros(top + 1)
    psi[top] = min(phi[2], top * pair.R[top] * (1 - r))
    phi[2] = psi[top]
    res = residual(pair, phi, psi, eps)
    worst = min(lower, res.mu)
    verified = e_l * worst ** l >= gamma_l * (1 - 1e-12)
    return EpsilonChoice(gamma, l, eps, xi, res.mu, bool(verified))


# batches ---------------------------------------------------------------------------------

class RunSummary(NamedTuple):
    run: int
    K: int | None
    stages: int
    restarts: int
    a_final: int
    explored: int
    exceeded: bool          # K missing or above n^a (subcritical batches)
    cycle_event: bool       # exploration-based event at e₂
    landed_active: bool
    direct_event: bool      # v on a negative (or coin-won zero) cycle, decided on a sampled graph


def run_seed(master_seed: int, run: int) -> np.random.SeedSequence:
    """Seed of run ``run``: the SeedSequence child with spawn key (run,) of the master seed."""
    return np.random.SeedSequence(master_seed, spawn_key=(run,))


def _one_run(args) -> RunSummary:
    pair, channel, n, l, eps_frac, master, i, a, direct = args
    s_exp, s_e2, s_graph = run_seed(master, i).spawn(3)
    if a is not None:
        tr = run_exploration(pair, channel, l, eps_frac, s_exp, n=n, stop_at_first_zero=True,
                             max_stages=math.floor(n ** a) + 1)
        exceeded = tr.K is None or tr.K > n ** a
        ev = CycleEvent(False, None)
    else:
        tr = run_exploration(pair, channel, l, eps_frac, s_exp, n=n)
        exceeded = False
        ev = detect_cycle_event(tr, rng=np.random.default_rng(s_e2))
    dev = False
    if direct:
        from .tanner import sample_graph
        r_graph, r_llr, r_coin = (np.random.default_rng(x) for x in s_graph.spawn(3))
        G = sample_graph(pair, n, r_graph, allow_remainder=True)
        llrs = channel.sample(r_llr, n)
        v = int(np.nonzero(G.var_degrees == 2)[0][0])
        dev = negative_cycle_through(G, llrs, v, r_coin).occurred
    return RunSummary(i, tr.K, tr.stages, tr.restarts, tr.final_active,
                      tr.explored_checks[-1], bool(exceeded), bool(ev.occurred),
                      bool(ev.landed_active), bool(dev))


def run_batch(pair: DegreePair, channel, n: int, l: int, eps_frac: float, runs: int,
              master_seed: int, a: float | None = None, direct: bool = False,
              threads: int = 1) -> list[RunSummary]:
    """Independent on-the-fly runs, in run-index order.

    With ``a`` set each run stops at the first zero of A_k or after
    floor(n^a) + 1 stages (the subcritical experiment); otherwise runs go to
    the budget and e₂ is connected.  ``direct`` additionally samples a full
    graph per run and decides the cycle event on it.
    """
    jobs = [(pair, channel, n, l, eps_frac, master_seed, i, a, direct) for i in range(runs)]
    if threads > 1 and runs > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(max_workers=threads) as ex:
            return list(ex.map(_one_run, jobs, chunksize=max(1, runs // (4 * threads))))
    return [_one_run(j) for j in jobs]


def binomial_sigma(p: float, runs: int) -> float:
    return math.sqrt(max(p * (1 - p), 0.0) / runs) if runs else math.inf
