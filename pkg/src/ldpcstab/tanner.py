"""Configuration-model Tanner graphs, parity-check codes and codeword enumeration."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .degseq import DegreePair, ValidationError

MAX_ENUM_N = 24
MAX_CYCLE_DIM = 20


class GuardExceeded(RuntimeError):
    """Raised when an exhaustive computation would exceed its size guard."""


@dataclass(frozen=True, eq=False)
class TannerGraph:
    """Bipartite multigraph: variable half-edge i is joined to check half-edge pairing[i].

    Half-edges are numbered node by node, so variable v owns half-edges
    var_offsets[v] .. var_offsets[v+1]-1 (likewise for checks).
    """

    var_degrees: np.ndarray
    check_degrees: np.ndarray
    pairing: np.ndarray

    def __post_init__(self):
        vd = np.asarray(self.var_degrees, dtype=np.int64)
        cd = np.asarray(self.check_degrees, dtype=np.int64)
        pi = np.asarray(self.pairing, dtype=np.int64)
        if vd.sum() != cd.sum():
            raise ValidationError("variable and check half-edge totals differ")
        if pi.size != vd.sum() or not np.array_equal(np.sort(pi), np.arange(pi.size)):
            raise ValidationError("pairing must be a permutation of the half-edges")
        object.__setattr__(self, "var_degrees", vd)
        object.__setattr__(self, "check_degrees", cd)
        object.__setattr__(self, "pairing", pi)

    @property
    def n(self) -> int:
        return int(self.var_degrees.size)

    @property
    def m(self) -> int:
        return int(self.check_degrees.size)

    @property
    def num_edges(self) -> int:
        return int(self.pairing.size)

    @property
    def var_of_halfedge(self) -> np.ndarray:
        return np.repeat(np.arange(self.n), self.var_degrees)

    @property
    def check_of_halfedge(self) -> np.ndarray:
        return np.repeat(np.arange(self.m), self.check_degrees)

    @property
    def var_offsets(self) -> np.ndarray:
        return np.concatenate([[0], np.cumsum(self.var_degrees)])

    @property
    def check_offsets(self) -> np.ndarray:
        return np.concatenate([[0], np.cumsum(self.check_degrees)])

    def edge_list(self) -> np.ndarray:
        """(variable, check) per variable half-edge, in half-edge order."""
        return np.stack([self.var_of_halfedge, self.check_of_halfedge[self.pairing]], axis=1)

    def var_neighbors(self) -> list[list[int]]:
        out = [[] for _ in range(self.n)]
        for v, c in self.edge_list():
            out[v].append(int(c))
        return out

    def check_neighbors(self) -> list[list[int]]:
        out = [[] for _ in range(self.m)]
        for v, c in self.edge_list():
            out[c].append(int(v))
        return out

    def multi_edge_count(self) -> int:
        """Number of surplus parallel edges (k parallel copies count k - 1)."""
        e = self.edge_list()
        _, counts = np.unique(e[:, 0] * self.m + e[:, 1], return_counts=True)
        return int(np.sum(counts - 1))

    def to_code(self) -> "Code":
        rows = []
        for nb in self.check_neighbors():
            vals, cnt = np.unique(nb, return_counts=True)
            rows.append(frozenset(int(v) for v in vals[cnt % 2 == 1]))
        return Code(rows, self.n)

    def to_text(self) -> str:
        return "".join(f"var {v}: {' '.join(map(str, nb))}\n" for v, nb in enumerate(self.var_neighbors()))

    @classmethod
    def from_adjacency(cls, var_adj, m: int | None = None) -> "TannerGraph":
        """Build from per-variable check lists; check half-edges are numbered in edge order."""
        var_adj = [list(map(int, a)) for a in var_adj]
        if m is None:
            m = 1 + max((c for a in var_adj for c in a), default=-1)
        vd = np.array([len(a) for a in var_adj], dtype=np.int64)
        cd = np.zeros(m, dtype=np.int64)
        for a in var_adj:
            for c in a:
                cd[c] += 1
        offs = np.concatenate([[0], np.cumsum(cd)])
        nxt = offs[:-1].copy()
        pairing = []
        for a in var_adj:
            for c in a:
                pairing.append(nxt[c])
                nxt[c] += 1
        return cls(vd, cd, np.array(pairing, dtype=np.int64))

    @classmethod
    def from_text(cls, text: str, m: int | None = None) -> "TannerGraph":
        adj = []
        for line in text.splitlines():
            if not line.strip():
                continue
            head, _, rest = line.partition(":")
            if not head.startswith("var "):
                raise ValidationError(f"bad adjacency line {line!r}")
            if int(head[4:]) != len(adj):
                raise ValidationError("variables must be listed in order")
            adj.append([int(t) for t in rest.split()])
        return cls.from_adjacency(adj, m)


@dataclass(frozen=True)
class Code:
    """Binary linear code given by parity rows; codewords use the ±1 alphabet."""

    parity_rows: list
    n: int

    def parity_matrix(self) -> np.ndarray:
        H = np.zeros((len(self.parity_rows), self.n), dtype=np.uint8)
        for r, row in enumerate(self.parity_rows):
            for v in row:
                H[r, v] = 1
        return H

    def is_codeword(self, x) -> bool:
        x = np.asarray(x)
        return all(np.prod(x[list(row)]) == 1 for row in self.parity_rows)


# sampling ------------------------------------------------------------------------

def _largest_remainder(total: int, fracs: np.ndarray) -> np.ndarray:
    raw = total * fracs
    counts = np.floor(raw).astype(np.int64)
    short = total - counts.sum()
    if short > 0:
        order = np.argsort(-(raw - counts), kind="stable")
        counts[order[:short]] += 1
    return counts


def degree_counts(pair: DegreePair, n: int, allow_remainder: bool = False
                  ) -> tuple[np.ndarray, np.ndarray]:
    """Node counts per degree; see :func:`_degree_counts`.

    With ``allow_remainder`` an otherwise infeasible n gets one extra check
    node whose degree (below the maximum) absorbs the half-edge surplus.
    """
    if n < 1:
        raise ValidationError("n must be positive")
    out = _degree_counts(pair, n, allow_remainder)
    if out is None:
        suggestion = next((k for k in range(n + 1, 4 * n + 8) if _degree_counts(pair, k) is not None), None)
        raise ValidationError(f"degree counts infeasible at n={n}; try n={suggestion}")
    return out


def _degree_counts(pair: DegreePair, n: int, allow_remainder: bool = False):
    """Node counts per degree on both sides with equal half-edge totals.

    Variable counts are the largest-remainder apportionment of n·L_i; check
    counts apportion m·R_i with m = round(n L'(1)/R'(1)), then the highest
    degree bucket (or a single supported degree) absorbs the half-edge surplus.
    """
    L, R = pair.L, pair.R
    var_counts = _largest_remainder(n, L)
    E = int(np.sum(np.arange(L.size) * var_counts))
    m = max(1, int(round(n * pair.L_prime1 / pair.R_prime1)))
    chk = _largest_remainder(m, R)
    degs = np.arange(R.size)
    support = set(np.nonzero(R > 0)[0].tolist())
    dmax = int(max(support))
    diff = E - int(np.sum(degs * chk))
    while diff >= dmax:
        chk[dmax] += 1
        diff -= dmax
    while diff < 0:
        d = int(np.nonzero(chk)[0].max())
        if d <= -diff:
            chk[d] -= 1
            diff += d
        else:
            break
    if diff != 0:
        if diff in support:
            chk[diff] += 1
            diff = 0
        else:
            for d in sorted(support, reverse=True):
                if chk[d] > 0 and (d + diff) in support:
                    chk[d] -= 1
                    chk[d + diff] += 1
                    diff = 0
                    break
    if diff != 0 and allow_remainder:
        while diff < 0:
            d = int(np.nonzero(chk)[0].max())
            chk[d] -= 1
            diff += d
        if diff:
            chk[diff] += 1
        diff = 0
    return (var_counts, chk) if diff == 0 else None


def sample_graph(pair: DegreePair, n: int, rng: np.random.Generator,
                 allow_remainder: bool = False) -> TannerGraph:
    """Configuration-model graph: uniform pairing of the half-edges, multi-edges kept."""
    vc, cc = degree_counts(pair, n, allow_remainder)
    vd = np.repeat(np.arange(vc.size), vc)
    cd = np.repeat(np.arange(cc.size), cc)
    return TannerGraph(vd, cd, rng.permutation(int(vd.sum())))


# codewords -------------------------------------------------------------------------

def nullspace_gf2(H: np.ndarray) -> np.ndarray:
    """Basis (rows) of {x : Hx = 0 over GF(2)} by Gaussian elimination."""
    H = (np.asarray(H, dtype=np.uint8) % 2).copy()
    rows, n = H.shape
    pivots = []
    r = 0
    for c in range(n):
        if r >= rows:
            break
        nz = np.nonzero(H[r:, c])[0]
        if nz.size == 0:
            continue
        p = r + nz[0]
        H[[r, p]] = H[[p, r]]
        others = np.nonzero(H[:, c])[0]
        others = others[others != r]
        H[others] ^= H[r]
        pivots.append(c)
        r += 1
    free = [c for c in range(n) if c not in set(pivots)]
    basis = np.zeros((len(free), n), dtype=np.uint8)
    for k, fcol in enumerate(free):
        basis[k, fcol] = 1
        for i, pc in enumerate(pivots):
            basis[k, pc] = H[i, fcol]
    return basis


def enumerate_codewords(code: Code) -> np.ndarray:
    """All codewords in ±1 form, all-one first, by a Gray-code walk of the GF(2) span."""
    if code.n > MAX_ENUM_N:
        raise GuardExceeded(f"n={code.n} exceeds the enumeration cap {MAX_ENUM_N}")
    basis = nullspace_gf2(code.parity_matrix()) if code.parity_rows else np.eye(code.n, dtype=np.uint8)
    k = basis.shape[0]
    words = np.zeros((2 ** k, code.n), dtype=np.uint8)
    cur = np.zeros(code.n, dtype=np.uint8)
    for t in range(1, 2 ** k):
        bit = (t & -t).bit_length() - 1
        cur = cur ^ basis[bit]
        words[t] = cur
    return 1 - 2 * words.astype(np.int8)


# degree-two structure ----------------------------------------------------------------

@dataclass
class DegreeTwoSubgraph:
    graph: TannerGraph
    var_ids: list            # original index of each retained variable
    check_ids: list          # original index of each retained check
    removed_neighbors: dict  # retained check -> original variables of degree >= 3 (or 1)


def degree_two_subgraph(graph: TannerGraph) -> DegreeTwoSubgraph:
    """Induced subgraph on the degree-two variables and the checks they touch."""
    adj = graph.var_neighbors()
    keep = [v for v in range(graph.n) if graph.var_degrees[v] == 2]
    checks = sorted({c for v in keep for c in adj[v]})
    cidx = {c: i for i, c in enumerate(checks)}
    sub = TannerGraph.from_adjacency([[cidx[c] for c in adj[v]] for v in keep], len(checks))
    cn = graph.check_neighbors()
    kept = set(keep)
    removed = {cidx[c]: sorted(v for v in cn[c] if v not in kept) for c in checks}
    return DegreeTwoSubgraph(sub, keep, checks, removed)


def deg2_edges(graph: TannerGraph) -> dict:
    """Degree-two variables as edges between check nodes: v -> (c1, c2)."""
    adj = graph.var_neighbors()
    return {v: tuple(adj[v]) for v in range(graph.n) if graph.var_degrees[v] == 2}


def deg2_cycles(graph: TannerGraph, max_dim: int = MAX_CYCLE_DIM, through=None) -> list[frozenset]:
    """All simple cycles made of degree-two variables, as sets of variable indices.

    Each connected component of the check multigraph (degree-two variables as
    edges) contributes the simple cycles in its cycle space, found by combining
    fundamental cycles of a spanning forest.  A component whose cycle space has
    dimension above ``max_dim`` raises :class:`GuardExceeded`.  With ``through``
    set, only components containing that variable are searched.
    """
    edges = deg2_edges(graph)
    if not edges:
        return []
    # union-find over checks
    parent = {}

    def find(a):
        parent.setdefault(a, a)
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for c1, c2 in edges.values():
        parent[find(c1)] = find(c2)
    comps: dict = {}
    for v, (c1, c2) in edges.items():
        comps.setdefault(find(c1), []).append(v)
    out = []
    for vs in comps.values():
        if through is not None and through not in vs:
            continue
        out.extend(_component_cycles(vs, edges, max_dim))
    return out


def _component_cycles(vs, edges, max_dim):
    nodes = sorted({c for v in vs for c in edges[v]})
    dim = len(vs) - len(nodes) + 1
    if dim <= 0:
        return []
    if dim > max_dim:
        raise GuardExceeded(f"cycle space dimension {dim} exceeds {max_dim}")
    bit = {v: 1 << k for k, v in enumerate(vs)}
    # spanning tree by BFS; record tree path (as edge mask) from root to each node
    inc = {c: [] for c in nodes}
    for v in vs:
        c1, c2 = edges[v]
        inc[c1].append((v, c2))
        if c1 != c2:
            inc[c2].append((v, c1))
    root = nodes[0]
    path = {root: 0}
    tree = set()
    queue = [root]
    for c in queue:
        for v, o in inc[c]:
            if o not in path:
                path[o] = path[c] ^ bit[v]
                tree.add(v)
                queue.append(o)
    fundamentals = []
    for v in vs:
        if v in tree:
            continue
        c1, c2 = edges[v]
        fundamentals.append(path[c1] ^ path[c2] ^ bit[v])
    cycles = []
    cur = 0
    for t in range(1, 2 ** len(fundamentals)):
        cur ^= fundamentals[(t & -t).bit_length() - 1]
        if _is_simple_cycle(cur, vs, edges):
            cycles.append(frozenset(v for v in vs if cur & bit[v]))
    return cycles


def _is_simple_cycle(mask: int, vs, edges) -> bool:
    members = [v for k, v in enumerate(vs) if mask >> k & 1]
    deg: dict = {}
    for v in members:
        c1, c2 = edges[v]
        deg[c1] = deg.get(c1, 0) + 1
        deg[c2] = deg.get(c2, 0) + 1
    if any(d != 2 for d in deg.values()):
        return False
    # connectivity
    seen = {edges[members[0]][0]}
    frontier = list(seen)
    while frontier:
        c = frontier.pop()
        for v in members:
            c1, c2 = edges[v]
            for a, b in ((c1, c2), (c2, c1)):
                if a == c and b not in seen:
                    seen.add(b)
                    frontier.append(b)
    return len(seen) == len(deg)


def cycle_codeword(n: int, cycle) -> np.ndarray:
    """±1 indicator: -1 on the cycle's variables, +1 elsewhere."""
    x = np.ones(n, dtype=np.int8)
    x[list(cycle)] = -1
    return x


def example_graph(which: int = 1) -> TannerGraph:
    """Small degree-two examples with checks a, b, c = 0, 1, 2.

    Graph 1 has variables (a,b), (a,b), (a,c), (c,b); graph 2 adds a fifth
    variable (c,b).
    """
    adj = [[0, 1], [0, 1], [0, 2], [2, 1]]
    if which == 2:
        adj.append([2, 1])
    elif which != 1:
        raise ValidationError("example graph must be 1 or 2")
    return TannerGraph.from_adjacency(adj, 3)
