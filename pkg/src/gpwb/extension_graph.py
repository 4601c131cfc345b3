"""The extension graph: canonical vertices, adjacency, finite windows, and
checkers for its geodesic structure (girth, bigons, triangles, Greenlinger
subpaths, plane counts, fineness, tightness, asymptotic-dimension covers).

A vertex ``gG_vg^-1`` is stored as :class:`ExtVertex` ``(v, rep)`` where
``rep`` is the shortest representative of ``g P_St(v)``.  A copy ``g.Gamma``
is the set ``{(w, coset_canonical(g, St(w)))}``; two elements give the same
copy exactly when they agree modulo ``P_K``, ``K`` the intersection of all
stars (usually empty).
"""

from __future__ import annotations

import math
import random
from collections import OrderedDict, deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping, NamedTuple, Sequence

import numpy as np

from . import _kernels
from .core_graph import (
    INF,
    SimplicialGraph,
    canonical_circuit,
    circuits_through,
    csr_without_edge,
    estimate_delta,
    geodesics as graph_geodesics,
    girth,
    is_connected,
)
from .errors import BudgetExceeded, HypothesisError, InputError, VerificationFailure
from .graph_product import (
    IDENTITY,
    NormalWord,
    ProductContext,
    _canonical,
    enumerate_ball,
    inv,
    mul,
    normalize,
    product,
    support_mask,
)
from .parabolics import (
    coset_canonical_mask,
    coset_intersection,
    copy_of,
    double_coset_member,
    strip_right,
)

__all__ = [
    "ExtVertex",
    "ext_vertex",
    "base_vertex",
    "vertex_key",
    "format_vertex",
    "parse_vertex",
    "core_mask",
    "copy_vertex",
    "in_copy",
    "same_copy",
    "adjacent_fast",
    "adjacent_direct",
    "adjacent",
    "in_common_copy",
    "CopyTools",
    "Window",
    "TruncatedWindow",
    "build_window",
    "build_window_pairwise",
    "neighbors_in_window",
    "WindowFamily",
    "window_distance",
    "bfs_base_distance",
    "base_geodesic",
    "girth_check",
    "doubling_census",
    "fineness_census",
    "fineness_function",
    "is_path",
    "is_circuit_loop",
    "copy_segmentation",
    "is_admissible",
    "BigonWitness",
    "bigon_decomposition",
    "check_bigon_witness",
    "TriangleWitness",
    "triangle_decomposition",
    "check_triangle_witness",
    "GreenlingerWitness",
    "greenlinger_witness",
    "check_greenlinger_witness",
    "plane_visits",
    "plane_count_check",
    "tightness_constants",
    "graph_delta",
    "tightness_sample_check",
    "AsdimCover",
    "asdim_cover",
    "cover_disjointness_check",
    "sample_bigons",
    "copy_circuit",
    "sample_triangles",
    "sample_geodesics",
    "window_delta",
]

DEFAULT_WINDOW_CAP = 2_000_000
DEFAULT_CIRCUIT_CAP = 100_000
DEFAULT_GEODESIC_CAP = 10_000


# ----------------------------------------------------------------------------
# vertices, copies, adjacency


class ExtVertex(NamedTuple):
    v: int
    rep: NormalWord


def ext_vertex(ctx: ProductContext, v, g: Sequence = IDENTITY) -> ExtVertex:
    """The vertex ``g.v``."""
    i = ctx.vindex(v)
    return ExtVertex(i, coset_canonical_mask(ctx, g, ctx.star_mask[i]))


def base_vertex(ctx: ProductContext, v) -> ExtVertex:
    return ExtVertex(ctx.vindex(v), IDENTITY)


def vertex_key(x: ExtVertex):
    """Deterministic total order: rep length, orbit vertex, rep."""
    return (len(x.rep), x.v, x.rep)


def format_vertex(ctx: ProductContext, x: ExtVertex) -> str:
    return f"{ctx.vid(x.v)}@{ctx.format(x.rep)}"


def parse_vertex(ctx: ProductContext, text: str) -> ExtVertex:
    """Parse ``"v@u:1 w:1"`` (word acting on the base vertex v); ``"v"`` alone is base."""
    vid, _, word = text.partition("@")
    return ext_vertex(ctx, vid.strip(), ctx.parse(word) if word.strip() else IDENTITY)


def core_mask(ctx: ProductContext) -> int:
    m = ctx.full_mask
    for s in ctx.star_mask:
        m &= s
    return m


def copy_vertex(ctx: ProductContext, g: Sequence, w: int) -> ExtVertex:
    return ExtVertex(w, coset_canonical_mask(ctx, g, ctx.star_mask[w]))


def in_copy(ctx: ProductContext, x: ExtVertex, g: Sequence) -> bool:
    return coset_canonical_mask(ctx, g, ctx.star_mask[x.v]) == x.rep


def same_copy(ctx: ProductContext, g: Sequence, h: Sequence) -> bool:
    return support_mask(product(ctx, inv(ctx, g), h)) & ~core_mask(ctx) == 0


def adjacent_fast(ctx: ProductContext, x: ExtVertex, y: ExtVertex) -> bool:
    """Edge test through the double coset P_St(w) P_St(v)."""
    if x == y or not ctx.commute(x.v, y.v):
        return False
    return double_coset_member(ctx, product(ctx, inv(ctx, y.rep), x.rep),
                               ctx.star_mask[y.v], ctx.star_mask[x.v])


def adjacent_direct(ctx: ProductContext, x: ExtVertex, y: ExtVertex) -> bool:
    """Edge test by commuting every pair of conjugated generators."""
    if x == y:
        return False
    xi, yi = inv(ctx, x.rep), inv(ctx, y.rep)
    left = [product(ctx, x.rep, [(x.v, a)], xi) for a in ctx.groups[x.v].nontrivial()]
    right = [product(ctx, y.rep, [(y.v, b)], yi) for b in ctx.groups[y.v].nontrivial()]
    return all(mul(ctx, s, t) == mul(ctx, t, s) for s in left for t in right)


def adjacent(ctx: ProductContext, x: ExtVertex, y: ExtVertex, method: str = "fast") -> bool:
    if method == "fast":
        return adjacent_fast(ctx, x, y)
    if method == "direct":
        ctx.require_finite()
        return adjacent_direct(ctx, x, y)
    raise InputError(f"unknown adjacency method {method!r}")


def in_common_copy(ctx: ProductContext, x: ExtVertex, y: ExtVertex) -> bool:
    """Coned-off adjacency (for x != y)."""
    if x == y:
        return False
    return coset_intersection(ctx, x.rep, ctx.star_mask[x.v], y.rep, ctx.star_mask[y.v]) is not None


class CopyTools:
    """Memoized copy computations for one context."""

    def __init__(self, ctx: ProductContext):
        self.ctx = ctx
        self.core = core_mask(ctx)
        self._member: dict = {}

    def member(self, x: ExtVertex, g: NormalWord) -> bool:
        key = (x, g)
        hit = self._member.get(key)
        if hit is None:
            hit = self._member[key] = in_copy(self.ctx, x, g)
        return hit

    def of(self, pts: Iterable[ExtVertex]):
        return copy_of(self.ctx, pts)

    def unique(self, pts: Iterable[ExtVertex]) -> NormalWord | None:
        got = copy_of(self.ctx, pts)
        if got is None or got[1] != self.core:
            return None
        return got[0]

    def segment_table(self, path: Sequence[ExtVertex]) -> dict:
        """``(i, j) -> copy`` for every subpath ``path[i..j]`` (i < j) inside a
        single copy; the value is the copy element when unique, else ``None``."""
        ctx = self.ctx
        out = {}
        for i in range(len(path)):
            k, mask = IDENTITY, ctx.full_mask
            got = coset_intersection(ctx, k, mask, path[i].rep, ctx.star_mask[path[i].v])
            k, mask = got
            for j in range(i + 1, len(path)):
                x = path[j]
                got = coset_intersection(ctx, k, mask, x.rep, ctx.star_mask[x.v])
                if got is None:
                    break
                k, mask = got
                out[(i, j)] = k if mask == self.core else None
        return out

    def copies_through_pair(self, x: ExtVertex, y: ExtVertex, cap: int = 4096) -> list[NormalWord]:
        """Every copy containing x and y (finitely many when their stars meet in a clique)."""
        ctx = self.ctx
        got = coset_intersection(ctx, x.rep, ctx.star_mask[x.v], y.rep, ctx.star_mask[y.v])
        if got is None:
            return []
        k, mask = got
        if mask == self.core:
            return [k]
        extra = mask & ~self.core
        verts = [i for i in range(ctx.n) if (extra >> i) & 1]
        if any(not ctx.commute(a, b) for a in verts for b in verts if a < b):
            raise BudgetExceeded("infinitely many copies contain this pair")
        out = {coset_canonical_mask(ctx, mul(ctx, k, h), self.core)
               for h in enumerate_ball(ctx, len(verts), cap, vertices=verts)}
        return sorted(out, key=lambda w: (len(w), w))


# ----------------------------------------------------------------------------
# windows


def _window_vertices(ctx: ProductContext, ball: Sequence[NormalWord]) -> list[ExtVertex]:
    out = []
    for g in ball:
        for v in range(ctx.n):
            _, taken = strip_right(ctx, g, ctx.star_mask[v])
            if not taken:
                out.append(ExtVertex(v, g))
    out.sort(key=vertex_key)
    return out


def _shift_sets(ctx: ProductContext, L: int, pairs: Iterable[tuple[int, int]], cap: int) -> dict:
    """For (v, w): elements s of P_St(v), length <= L, that are shortest in
    s P_(St(v) & St(w)).  Neighbours of (v, r) at w are (w, canon_w(r s))."""
    balls: dict = {}
    out = {}
    for v, w in pairs:
        if v not in balls:
            sv = [i for i in range(ctx.n) if (ctx.star_mask[v] >> i) & 1]
            balls[v] = enumerate_ball(ctx, L, cap, vertices=sv)
        meet = ctx.star_mask[v] & ctx.star_mask[w]
        out[(v, w)] = [s for s in balls[v] if not strip_right(ctx, s, meet)[1]]
    return out


def _generate_edges(ctx: ProductContext, L: int, verts: list[ExtVertex], index: dict,
                    coned: bool, cap: int) -> np.ndarray:
    n = ctx.n
    if coned:
        pairs = [(v, w) for v in range(n) for w in range(v + 1, n)]
    else:
        pairs = [(v, w) for v in range(n) for w in range(v + 1, n) if ctx.commute(v, w)]
    shifts = _shift_sets(ctx, L, pairs, cap)
    targets = {}
    for v, w in pairs:
        targets.setdefault(v, []).append((w, shifts[(v, w)]))
    star = ctx.star_mask
    edges = []
    for i, x in enumerate(verts):
        r = list(x.rep)
        for w, ss in targets.get(x.v, ()):
            mw = star[w]
            for s in ss:
                # r has no terminal St(v) letter, so r + s is already reduced
                kept, _ = strip_right(ctx, r + list(s), mw)
                if len(kept) > L:
                    continue
                j = index.get(ExtVertex(w, _canonical(ctx, kept)))
                if j is not None:
                    edges.append((i, j) if i < j else (j, i))
    if not edges:
        return np.zeros((0, 2), dtype=np.int64)
    arr = np.unique(np.array(edges, dtype=np.int64), axis=0)
    return arr


def _csr_from_edges(n: int, edges: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    if edges.shape[0] == 0:
        return np.zeros(n + 1, dtype=np.int64), np.zeros(0, dtype=np.int64)
    src = np.concatenate([edges[:, 0], edges[:, 1]])
    dst = np.concatenate([edges[:, 1], edges[:, 0]])
    order = np.lexsort((dst, src))
    src, dst = src[order], dst[order]
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.add.at(indptr, src + 1, 1)
    return np.cumsum(indptr), dst.astype(np.int64)


class Window:
    """Induced subgraph of the extension graph on all vertices whose
    representative has syllable length at most ``L``."""

    ROW_CACHE = 256

    def __init__(self, ctx: ProductContext, L: int, vertices: list[ExtVertex],
                 edges: np.ndarray, cap: int = DEFAULT_WINDOW_CAP):
        self.ctx = ctx
        self.L = L
        self.vertices = vertices
        self.index = {x: i for i, x in enumerate(vertices)}
        self.edges = edges
        self.indptr, self.indices = _csr_from_edges(len(vertices), edges)
        self._cap = cap
        self._coned = None
        self._rows: OrderedDict = OrderedDict()

    def __len__(self):
        return len(self.vertices)

    def __contains__(self, x):
        return x in self.index

    def __repr__(self):
        return f"Window(L={self.L}, vertices={len(self)}, edges={self.edges.shape[0]})"

    @property
    def coned(self) -> tuple[np.ndarray, np.ndarray]:
        """CSR arrays of the coned-off graph on the same vertices."""
        if self._coned is None:
            e = _generate_edges(self.ctx, self.L, self.vertices, self.index, True, self._cap)
            self._coned = _csr_from_edges(len(self.vertices), e)
        return self._coned

    def neighbors(self, x: ExtVertex, coned: bool = False) -> list[ExtVertex]:
        i = self.index[x]
        ptr, idx = self.coned if coned else (self.indptr, self.indices)
        return [self.vertices[j] for j in idx[ptr[i]:ptr[i + 1]]]

    def nbr_idx(self, i: int) -> np.ndarray:
        return self.indices[self.indptr[i]:self.indptr[i + 1]]

    def dist_row(self, i: int, coned: bool = False) -> np.ndarray:
        key = (i, coned)
        row = self._rows.get(key)
        if row is not None:
            self._rows.move_to_end(key)
            return row
        ptr, idx = self.coned if coned else (self.indptr, self.indices)
        row = _kernels.bfs(ptr, idx, i).astype(np.int32)
        self._rows[key] = row
        if len(self._rows) > self.ROW_CACHE:
            self._rows.popitem(last=False)
        return row

    def distance(self, x: ExtVertex, y: ExtVertex, coned: bool = False) -> float | int:
        i, j = self.index.get(x), self.index.get(y)
        if i is None or j is None:
            return INF
        d = int(self.dist_row(i, coned)[j])
        return INF if d < 0 else d

    def multi_source_distance(self, sources: Iterable[int]) -> np.ndarray:
        dist = np.full(len(self), -1, dtype=np.int64)
        queue = deque()
        for s in sources:
            if dist[s] < 0:
                dist[s] = 0
                queue.append(s)
        ptr, idx = self.indptr, self.indices
        while queue:
            u = queue.popleft()
            for w in idx[ptr[u]:ptr[u + 1]]:
                if dist[w] < 0:
                    dist[w] = dist[u] + 1
                    queue.append(w)
        return dist

    def geodesics(self, x: ExtVertex, y: ExtVertex, cap: int = DEFAULT_GEODESIC_CAP) -> list[list[ExtVertex]]:
        """All shortest x-y paths inside the window (error above ``cap``)."""
        i, j = self.index[x], self.index[y]
        dx = self.dist_row(i)
        dy = self.dist_row(j)
        d = int(dx[j])
        if d < 0:
            return []
        count = {j: 1}
        # count paths backwards from y so the cap is checked before enumeration
        layer = [j]
        for t in range(d - 1, -1, -1):
            nxt = {}
            for u in layer:
                for w in self.nbr_idx(u):
                    w = int(w)
                    if dx[w] == t and dy[w] == d - t:
                        nxt[w] = nxt.get(w, 0) + count[u]
            count.update(nxt)
            layer = sorted(nxt)
        if count.get(i, 0) > cap:
            raise BudgetExceeded(f"{count[i]} geodesics exceed the cap of {cap}")
        out = []

        def walk(path):
            u = path[-1]
            if u == j:
                out.append([self.vertices[k] for k in path])
                return
            t = len(path)
            for w in sorted(int(w) for w in self.nbr_idx(u)):
                if dx[w] == t and dy[w] == d - t:
                    path.append(w)
                    walk(path)
                    path.pop()

        walk([i])
        return out

    def geodesic_count_row(self, i: int) -> tuple[np.ndarray, np.ndarray]:
        """Distances from vertex i and the number of geodesics to each vertex."""
        dist = self.dist_row(i)
        order = np.argsort(dist, kind="stable")
        counts = np.zeros(len(self), dtype=np.float64)
        counts[i] = 1
        for u in order:
            du = dist[u]
            if du <= 0:
                continue
            nb = self.nbr_idx(u)
            counts[u] = counts[nb[dist[nb] == du - 1]].sum()
        return dist, counts

    def tree_parents(self, i: int) -> np.ndarray:
        """Geodesic spanning tree rooted at i: parent = least-index predecessor."""
        dist = self.dist_row(i)
        parent = np.full(len(self), -1, dtype=np.int64)
        for u in range(len(self)):
            du = dist[u]
            if du > 0:
                nb = self.nbr_idx(u)
                parent[u] = int(nb[dist[nb] == du - 1].min())
        return parent

    def circuits_through(self, x: ExtVertex, y: ExtVertex, n: int,
                         cap: int = DEFAULT_CIRCUIT_CAP) -> list[list[ExtVertex]]:
        """Circuits of length <= n through the window edge (x, y), each once,
        as vertex cycles starting with the least-index vertex."""
        a, b = self.index[x], self.index[y]
        ptr2, idx2 = csr_without_edge(self.indptr, self.indices, a, b)
        if ptr2[-1] == self.indptr[-1]:
            raise InputError("circuits_through needs an edge of the window")
        dist_to_a = _kernels.bfs(ptr2, idx2, a)
        paths = _kernels.circuits_dfs(self.indptr, self.indices, a, b, int(n), dist_to_a, int(cap))
        if paths is None:
            raise BudgetExceeded(f"more than {cap} circuits of length <= {n}")
        out = []
        for p in paths:  # p = [b, ..., a]; the cycle closes with edge (a, b)
            out.append(_canonical_index_cycle(p))
        out = sorted(set(out))
        return [[self.vertices[k] for k in c] for c in out]

    def to_graph(self, coned: bool = False) -> SimplicialGraph:
        names = [format_vertex(self.ctx, x) for x in self.vertices]
        ptr, idx = self.coned if coned else (self.indptr, self.indices)
        edges = [(names[u], names[int(w)]) for u in range(len(self))
                 for w in idx[ptr[u]:ptr[u + 1]] if u < w]
        return SimplicialGraph(names, edges, sort=False)

    def to_json(self) -> dict:
        return {
            "L": self.L,
            "vertices": [{"orbit": str(self.ctx.vid(x.v)), "rep": self.ctx.format(x.rep)}
                         for x in self.vertices],
            "edges": self.edges.tolist(),
        }

    def to_dot(self, coned: bool = False) -> str:
        g = self.to_graph(coned)
        colors = {name: x.v for name, x in zip(g.vertices, self.vertices)}
        return g.to_dot("window", colors=colors)


TruncatedWindow = Window


def _canonical_index_cycle(cycle: Sequence[int]) -> tuple[int, ...]:
    n = len(cycle)
    best = None
    for seq in (list(cycle), list(reversed(cycle))):
        for s in range(n):
            rot = tuple(seq[s:] + seq[:s])
            if best is None or rot < best:
                best = rot
    return best


def build_window(ctx: ProductContext, L: int, cap: int = DEFAULT_WINDOW_CAP) -> Window:
    """All vertices with representative length <= L and every edge among them."""
    if L < 0:
        raise InputError("window budget L must be non-negative")
    ctx.require_finite()
    ball = enumerate_ball(ctx, L, cap)
    verts = _window_vertices(ctx, ball)
    if len(verts) > cap:
        raise BudgetExceeded(f"window with {len(verts)} vertices exceeds the cap of {cap}")
    index = {x: i for i, x in enumerate(verts)}
    edges = _generate_edges(ctx, L, verts, index, False, cap)
    return Window(ctx, L, verts, edges, cap)


def build_window_pairwise(ctx: ProductContext, L: int, method: str = "fast",
                          coned: bool = False) -> Window:
    """Reference construction testing every vertex pair (quadratic; tests only)."""
    ctx.require_finite()
    verts = _window_vertices(ctx, enumerate_ball(ctx, L))
    test = in_common_copy if coned else (lambda c, x, y: adjacent(c, x, y, method))
    edges = [(i, j) for i in range(len(verts)) for j in range(i + 1, len(verts))
             if test(ctx, verts[i], verts[j])]
    arr = np.array(edges, dtype=np.int64).reshape(-1, 2)
    win = Window(ctx, L, verts, arr)
    if coned:
        win._coned = (win.indptr, win.indices)
    return win


def neighbors_in_window(win: Window, x: ExtVertex) -> list[ExtVertex]:
    return win.neighbors(x)


class WindowFamily:
    """Lazily built windows of one context, shared by distance queries."""

    def __init__(self, ctx: ProductContext, max_L: int = 3, cap: int = DEFAULT_WINDOW_CAP):
        self.ctx = ctx
        self.max_L = max_L
        self.cap = cap
        self._windows: dict[int, Window] = {}
        self.copies = CopyTools(ctx)

    def window(self, L: int) -> Window:
        if L > self.max_L:
            raise BudgetExceeded(f"window L={L} is beyond the budget max_L={self.max_L}")
        if L not in self._windows:
            self._windows[L] = build_window(self.ctx, L, self.cap)
        return self._windows[L]

    def distance(self, x: ExtVertex, y: ExtVertex) -> tuple[float | int, bool]:
        return window_distance(self.ctx, x, y, range(0, self.max_L + 1), family=self)


def window_distance(ctx: ProductContext, x: ExtVertex, y: ExtVertex,
                    L_schedule: Iterable[int] = (1, 2, 3), family: WindowFamily | None = None):
    """``(distance, certified)``.

    Exact when x and y share a copy (copies are isometrically embedded and
    convex).  Otherwise the window distance is certified once it agrees for
    two consecutive budgets of the schedule.
    """
    if x == y:
        return 0, True
    if copy_of(ctx, [x, y]) is not None:
        return bfs_base_distance(ctx, x.v, y.v), True
    fam = family or WindowFamily(ctx, max(L_schedule))
    need = max(len(x.rep), len(y.rep))
    prev = None
    last = INF
    for L in sorted(set(L_schedule)):
        if L < need:
            continue
        d = fam.window(L).distance(x, y)
        if prev is not None and d == prev and d != INF:
            return d, True
        prev = last = d
    return last, False


_BASE_DIST: dict = {}


def bfs_base_distance(ctx: ProductContext, v: int, w: int) -> float | int:
    rows = _BASE_DIST.get(id(ctx.graph))
    if rows is None or rows[0] is not ctx.graph:
        indptr, indices = ctx.graph.csr
        mat = _kernels.bfs_many(indptr, indices, np.arange(ctx.n))
        rows = _BASE_DIST[id(ctx.graph)] = (ctx.graph, mat)
    d = int(rows[1][v, w])
    return INF if d < 0 else d


def base_geodesic(ctx: ProductContext, v: int, w: int) -> list[int]:
    """The least-index geodesic of Gamma from v to w (vertex indices)."""
    paths = graph_geodesics(ctx.graph, ctx.vid(v), ctx.vid(w), cap=DEFAULT_GEODESIC_CAP)
    if not paths:
        raise InputError("vertices of Gamma in different components")
    return [ctx.graph.index(u) for u in paths[0]]


# ----------------------------------------------------------------------------
# girth, doubling, fineness


def _require_large_girth(ctx: ProductContext, bound: int = 20):
    gg = girth(ctx.graph)
    if not gg > bound:
        raise HypothesisError(f"needs girth(Gamma) > {bound}, got {gg}")
    return gg


def girth_check(ctx: ProductContext, L: int = 2, n_max: int | None = None,
                window: Window | None = None, cap: int = DEFAULT_CIRCUIT_CAP) -> dict:
    """Circuits of length <= n_max through every base edge inside window(L)."""
    gg = girth(ctx.graph)
    if n_max is None:
        n_max = gg if gg != INF else 3
    if gg != INF and gg > n_max:
        raise InputError(f"n_max={n_max} is below girth(Gamma)={gg}")
    win = window or build_window(ctx, L)
    tools = CopyTools(ctx)
    found = set()
    lengths: dict[int, int] = {}
    in_one_copy = True
    for a, b in ctx.graph.edge_indices:
        for c in win.circuits_through(base_vertex(ctx, a), base_vertex(ctx, b), n_max, cap):
            key = tuple(c)
            if key in found:
                continue
            found.add(key)
            lengths[len(c)] = lengths.get(len(c), 0) + 1
            if len(c) == gg and tools.of(c) is None:
                in_one_copy = False
    min_len = min(lengths) if lengths else INF
    if gg != INF and not lengths:
        raise BudgetExceeded("window too small to contain a circuit of girth length")
    ok = min_len == gg and in_one_copy
    return {
        "girth_gamma": gg,
        "min_circuit_length": min_len,
        "circuits_by_length": {str(k): v for k, v in sorted(lengths.items())},
        "girth_circuits_in_one_copy": in_one_copy,
        "window_L": win.L,
        "status": "verified" if ok else "failed",
    }


def _require_cycle_graph(ctx: ProductContext):
    g = ctx.graph
    if not (is_connected(g) and all(len(g.neighbor_indices(i)) == 2 for i in range(ctx.n))):
        raise HypothesisError("Gamma must be a single circuit")
    if ctx.n <= 20:
        raise HypothesisError("Gamma must be a circuit of length > 20")


def doubling_census(ctx: ProductContext, v, L: int = 1, window: Window | None = None,
                    cap: int = DEFAULT_CIRCUIT_CAP) -> int:
    """Number of girth-length circuits of window(L) containing the path St(v)."""
    _require_cycle_graph(ctx)
    ctx.require_nontrivial()
    vi = ctx.vindex(v)
    u, w = ctx.graph.neighbor_indices(vi)
    win = window or build_window(ctx, L)
    bu, bv, bw = (base_vertex(ctx, t) for t in (u, vi, w))
    count = 0
    for c in win.circuits_through(bu, bv, ctx.n, cap):
        if len(c) != ctx.n:
            continue
        k = c.index(bv)
        if bw in (c[k - 1], c[(k + 1) % len(c)]):
            count += 1
    return count


def fineness_census(ctx: ProductContext, e: Sequence, n: int, L_schedule: Iterable[int] = (1, 2, 3),
                    family: WindowFamily | None = None, cap: int = DEFAULT_CIRCUIT_CAP) -> dict:
    """Circuits of length <= n through a base edge, counted in growing windows."""
    ctx.require_finite()
    a, b = (base_vertex(ctx, t) for t in e)
    if not ctx.commute(a.v, b.v):
        raise InputError(f"{tuple(e)!r} is not an edge of Gamma")
    fam = family or WindowFamily(ctx, max(L_schedule))
    counts = {}
    prev = None
    for L in sorted(set(L_schedule)):
        c = len(fam.window(L).circuits_through(a, b, n, cap))
        counts[L] = c
        if prev is not None and c == prev:
            return {"count": c, "counts": counts, "status": "stabilized-at-budget"}
        prev = c
    return {"count": prev, "counts": counts, "status": "unstable"}


def fineness_function(g: SimplicialGraph, n: int, mode: str = "vertices",
                      cap: int = DEFAULT_CIRCUIT_CAP) -> int:
    """Max over edges of Gamma of |union of vertices of circuits of length <= n
    through e| (``mode="vertices"``) or of the number of such circuits."""
    best = 0
    for a, b in g.edges:
        cs = circuits_through(g, (a, b), n, cap)
        if mode == "circuits":
            val = len(cs)
        elif mode == "vertices":
            val = len({v for c in cs for v in c})
        else:
            raise InputError(f"unknown fineness mode {mode!r}")
        best = max(best, val)
    return best


# ----------------------------------------------------------------------------
# paths: circuits, admissibility, copy segmentation


def is_path(ctx: ProductContext, p: Sequence[ExtVertex]) -> bool:
    return all(adjacent_fast(ctx, x, y) for x, y in zip(p, p[1:]))


def is_circuit_loop(p: Sequence[ExtVertex]) -> bool:
    """A closed vertex sequence (first = last) without other repeats, length > 2."""
    return len(p) > 3 and p[0] == p[-1] and len(set(p[:-1])) == len(p) - 1


def copy_segmentation(ctx: ProductContext, path: Sequence[ExtVertex],
                      tools: CopyTools | None = None) -> list[int]:
    """Greedy marks: fewest subpaths each inside one copy.  Returns mark indices."""
    marks = [0]
    i = 0
    n = len(path) - 1
    while i < n:
        k, mask = IDENTITY, ctx.full_mask
        j = i
        while j <= n:
            x = path[j]
            got = coset_intersection(ctx, k, mask, x.rep, ctx.star_mask[x.v])
            if got is None:
                break
            k, mask = got
            j += 1
        j -= 1
        if j <= i:
            raise InputError("consecutive path vertices are not adjacent")
        marks.append(j)
        i = j
    return marks


def is_admissible(ctx: ProductContext, p: Sequence[ExtVertex], marks: Sequence[int],
                  distance: Callable[[ExtVertex, ExtVertex], tuple] | None = None):
    """The three admissibility conditions for path p with marked indices.

    Returns True or False, or None when a needed distance is uncertified.
    """
    if not marks or marks[0] != 0 or marks[-1] != len(p) - 1 or list(marks) != sorted(set(marks)):
        raise InputError("marks must be increasing indices from 0 to the end of the path")
    if len(p) < 2 or p[0] == p[-1]:
        raise InputError("admissible paths join distinct vertices")
    fam_dist = distance or WindowFamily(ctx).distance
    tools = CopyTools(ctx)
    seg_d = []
    unknown = False
    for s, t in zip(marks, marks[1:]):
        seg = p[s:t + 1]
        if tools.of(seg) is None:
            return False
        d, cert = fam_dist(seg[0], seg[-1])
        if not cert:
            unknown = True
        elif d != t - s:
            return False
        seg_d.append(d)
    for i in range(len(marks) - 2):
        if tools.of(p[marks[i]:marks[i + 2] + 1]) is not None:
            return False
        if max(seg_d[i], seg_d[i + 1]) <= 4:
            sub = p[marks[i]:marks[i + 2] + 1]
            if any(sub[t] == sub[t + 2] for t in range(len(sub) - 2)):
                return False
    return None if unknown else True


# ----------------------------------------------------------------------------
# bigons


@dataclass
class BigonWitness:
    xs: list[int]
    ys: list[int]
    copies: list[NormalWord]


def _check_bigon_input(p, q):
    if len(p) < 2 or len(q) < 2 or p[0] != q[0] or p[-1] != q[-1]:
        raise InputError("bigon sides must share both endpoints")
    loop = list(p) + list(reversed(q))[1:]
    if not is_circuit_loop(loop):
        raise InputError("the loop p q^-1 is not a circuit")


def _chain_dp(tools: CopyTools, p: Sequence[ExtVertex], q: Sequence[ExtVertex],
              min_piece: int = 7) -> dict:
    """Chains of paired pieces from (p[0], q[0]) with each pair in one copy,
    pieces of length >= min_piece and consecutive copies distinct.

    Returns ``{(i, j): {last_copy: back_pointer}}``; the empty chain is the
    state ``(0, 0)`` with last copy ``None``.
    """
    segp = tools.segment_table(p)
    segq = tools.segment_table(q)
    P, Q = len(p) - 1, len(q) - 1
    by_start: dict = {}
    for (j0, j), k in segq.items():
        if k is not None and j - j0 >= min_piece:
            by_start.setdefault(j0, {}).setdefault(k, []).append(j)
    states: dict = {(0, 0): {None: None}}
    for i0 in range(P + 1):
        for j0 in range(Q + 1):
            st = states.get((i0, j0))
            if not st:
                continue
            qmap = by_start.get(j0, {})
            for i in range(i0 + min_piece, P + 1):
                if (i0, i) not in segp:
                    break
                k = segp[(i0, i)]
                if k is None:
                    continue
                prev = next((c for c in st if c != k), False)
                if prev is False:
                    continue
                for j in qmap.get(k, ()):
                    states.setdefault((i, j), {}).setdefault(k, (i0, j0, prev))
    return states


def _chain_back(states: dict, end: tuple[int, int], last) -> tuple[list, list, list]:
    xs, ys, cs = [end[0]], [end[1]], []
    i, j, k = end[0], end[1], last
    while k is not None:
        i0, j0, prev = states[(i, j)][k]
        cs.append(k)
        xs.append(i0)
        ys.append(j0)
        i, j, k = i0, j0, prev
    return xs[::-1], ys[::-1], cs[::-1]


def bigon_decomposition(ctx: ProductContext, p: Sequence[ExtVertex], q: Sequence[ExtVertex],
                        min_piece: int = 7, tools: CopyTools | None = None) -> BigonWitness:
    """Pieces p[x_{i-1}..x_i], q[y_{i-1}..y_i] inside distinct consecutive copies,
    each piece of length >= 7.  Raises VerificationFailure if none exists."""
    _check_bigon_input(p, q)
    tools = tools or CopyTools(ctx)
    states = _chain_dp(tools, p, q, min_piece)
    end = (len(p) - 1, len(q) - 1)
    final = states.get(end)
    if not final:
        raise VerificationFailure("no bigon decomposition exists for this bigon")
    last = next(iter(final))
    xs, ys, cs = _chain_back(states, end, last)
    return BigonWitness(xs, ys, cs)


def check_bigon_witness(ctx: ProductContext, p, q, w: BigonWitness, min_piece: int = 7) -> list[str]:
    """Independent re-check; returns the list of violated conditions."""
    bad = []
    n = len(w.copies)
    if not (w.xs[0] == 0 and w.ys[0] == 0 and w.xs[-1] == len(p) - 1 and w.ys[-1] == len(q) - 1):
        bad.append("endpoints")
    if len(w.xs) != n + 1 or len(w.ys) != n + 1:
        bad.append("lengths")
        return bad
    for i in range(1, n + 1):
        g = w.copies[i - 1]
        segs = list(p[w.xs[i - 1]:w.xs[i] + 1]) + list(q[w.ys[i - 1]:w.ys[i] + 1])
        if not all(in_copy(ctx, x, g) for x in segs):
            bad.append(f"(1) piece {i} not in its copy")
        if min(w.xs[i] - w.xs[i - 1], w.ys[i] - w.ys[i - 1]) < min_piece:
            bad.append(f"(2) piece {i} shorter than {min_piece}")
        if i < n and same_copy(ctx, g, w.copies[i]):
            bad.append(f"(3) copies {i} and {i + 1} coincide")
    for i in range(1, n):
        a, b = p[w.xs[i]], q[w.ys[i]]
        if bfs_base_distance(ctx, a.v, b.v) > 2:
            bad.append(f"bridge {i} longer than 2")
    return bad


# ----------------------------------------------------------------------------
# triangles


@dataclass
class TriangleWitness:
    x: list[int]      # indices on p: x_0..x_n, x'_0..x'_m
    y: list[int]      # indices on q, increasing: y_m..y_0 (from b), y'_0..y'_l
    z: list[int]      # indices on r: z_0..z_n, z'_0..z'_l
    f: list[NormalWord]
    g: list[NormalWord]
    h: list[NormalWord]
    k: NormalWord
    n: int = 0
    m: int = 0
    l: int = 0


def _triangle_candidates(ctx: ProductContext, tools: CopyTools, p, q, r) -> list[NormalWord]:
    others = list(dict.fromkeys(list(q) + list(r)))
    seen = set()
    out = []
    for x in p:
        for y in others:
            if x == y or x.v == y.v:
                continue
            for k in tools.copies_through_pair(x, y):
                if k not in seen:
                    seen.add(k)
                    out.append(k)
    out.sort(key=lambda w: (len(w), w))
    return out


def triangle_decomposition(ctx: ProductContext, p: Sequence[ExtVertex], q: Sequence[ExtVertex],
                           r: Sequence[ExtVertex], min_piece: int = 7,
                           tools: CopyTools | None = None) -> TriangleWitness:
    """Three bigon chains from the corners meeting in a central copy k.

    p runs a -> b, q runs b -> c, r runs a -> c; the loop p q r^-1 must be a
    circuit.  Raises VerificationFailure if no witness exists.
    """
    a, b, c = p[0], q[0], q[-1]
    if p[-1] != b or r[0] != a or r[-1] != c or len({a, b, c}) < 3:
        raise InputError("triangle sides must join three distinct corners a->b, b->c, a->c")
    loop = list(p) + list(q)[1:] + list(reversed(r))[1:]
    if not is_circuit_loop(loop):
        raise InputError("the loop p q r^-1 is not a circuit")
    tools = tools or CopyTools(ctx)
    P, Q, R = len(p) - 1, len(q) - 1, len(r) - 1
    F = _chain_dp(tools, p, r, min_piece)
    G = _chain_dp(tools, list(reversed(p)), q, min_piece)
    H = _chain_dp(tools, list(reversed(q)), list(reversed(r)), min_piece)
    d_ab = P  # p is a geodesic

    def pick(states, key, k):
        st = states.get(key)
        if not st:
            return False
        return next((c for c in st if c != k), False)

    for k in _triangle_candidates(ctx, tools, p, q, r):
        inp = [tools.member(x, k) for x in p]
        inq = [tools.member(x, k) for x in q]
        inr = [tools.member(x, k) for x in r]
        if not (any(inp) and any(inq) and any(inr)):
            continue
        Ip = [i for i, t in enumerate(inp) if t]
        Iq = [i for i, t in enumerate(inq) if t]
        Ir = [i for i, t in enumerate(inr) if t]
        FV = [(i, j, cf) for i in Ip for j in Ir if (cf := pick(F, (i, j), k)) is not False]
        GV = [(i2, y0, cg) for i2 in Ip for y0 in Iq if (cg := pick(G, (P - i2, y0), k)) is not False]
        HV = [(y1, j2, ch) for y1 in Iq for j2 in Ir if (ch := pick(H, (Q - y1, R - j2), k)) is not False]
        for i, j, cf in FV:
            for i2, y0, cg in GV:
                if i2 < i or not all(inp[i:i2 + 1]):
                    continue
                for y1, j2, ch in HV:
                    if y1 < y0 or j2 < j or not all(inq[y0:y1 + 1]) or not all(inr[j:j2 + 1]):
                        continue
                    n0 = (i, j) == (0, 0)
                    m0 = (i2, y0) == (P, 0)
                    if n0 and m0 and d_ab <= 2 and min(y1 - y0, j2 - j) < min_piece:
                        continue
                    fx, fz, fc = _chain_back(F, (i, j), cf)
                    gx, gy, gc = _chain_back(G, (P - i2, y0), cg)
                    hy, hz, hc = _chain_back(H, (Q - y1, R - j2), ch)
                    x = fx + [P - t for t in reversed(gx)]
                    y = gy + [Q - t for t in reversed(hy)]
                    z = fz + [R - t for t in reversed(hz)]
                    return TriangleWitness(x, y, z, fc, list(reversed(gc)), list(reversed(hc)), k,
                                           len(fc), len(gc), len(hc))
    raise VerificationFailure("no triangle decomposition exists for this triangle")


def check_triangle_witness(ctx: ProductContext, p, q, r, w: TriangleWitness,
                           min_piece: int = 7) -> list[str]:
    """Re-check the eight conditions; returns the violated ones."""
    bad = []
    n, m, l = w.n, w.m, w.l
    P, Q, R = len(p) - 1, len(q) - 1, len(r) - 1
    x, y, z = w.x, w.y, w.z
    if len(x) != n + m + 2 or len(y) != m + l + 2 or len(z) != n + l + 2:
        return ["sequence lengths"]
    if x != sorted(x) or y != sorted(y) or z != sorted(z):
        bad.append("not subsequences")
    if x[0] != 0 or x[-1] != P or y[0] != 0 or y[-1] != Q or z[0] != 0 or z[-1] != R:
        bad.append("endpoints")
    xn, xp = x[:n + 1], x[n + 1:]          # x_0..x_n and x'_0..x'_m
    yrev, yp = y[:m + 1], y[m + 1:]        # y_m..y_0 (increasing along q) and y'_0..y'_l
    yy = list(reversed(yrev))              # y_0..y_m as indices on q
    zn, zp = z[:n + 1], z[n + 1:]

    def inside(segs, g):
        return all(in_copy(ctx, v, g) for seg in segs for v in seg)

    for i in range(1, n + 1):
        if not inside([p[xn[i - 1]:xn[i] + 1], r[zn[i - 1]:zn[i] + 1]], w.f[i - 1]):
            bad.append(f"(1) piece {i}")
        if min(xn[i] - xn[i - 1], zn[i] - zn[i - 1]) < min_piece:
            bad.append(f"(5) piece {i} short")
    for i in range(1, m + 1):
        seg_q = q[yy[i]:yy[i - 1] + 1]
        if not inside([p[xp[i - 1]:xp[i] + 1], seg_q], w.g[i - 1]):
            bad.append(f"(2) piece {i}")
        if min(xp[i] - xp[i - 1], yy[i - 1] - yy[i]) < min_piece:
            bad.append(f"(6) piece {i} short")
    for i in range(1, l + 1):
        if not inside([q[yp[i - 1]:yp[i] + 1], r[zp[i - 1]:zp[i] + 1]], w.h[i - 1]):
            bad.append(f"(3) piece {i}")
        if min(yp[i] - yp[i - 1], zp[i] - zp[i - 1]) < min_piece:
            bad.append(f"(7) piece {i} short")
    if not inside([p[xn[-1]:xp[0] + 1], q[yy[0]:yp[0] + 1], r[zn[-1]:zp[0] + 1]], w.k):
        bad.append("(4) central copy")
    for seq, tag in ((w.f, "(5)"), (w.g, "(6)"), (w.h, "(7)")):
        for s, t in zip(seq, seq[1:]):
            if same_copy(ctx, s, t):
                bad.append(f"{tag} consecutive copies coincide")
    if n and same_copy(ctx, w.f[-1], w.k):
        bad.append("(5) f_n = k")
    if m and same_copy(ctx, w.g[0], w.k):
        bad.append("(6) g_1 = k")
    if l and same_copy(ctx, w.h[0], w.k):
        bad.append("(7) h_1 = k")
    if n == 0 and m == 0 and P <= 2 and min(yp[0] - yy[0], zp[0] - zn[-1]) < min_piece:
        bad.append("(8)")
    return bad


# ----------------------------------------------------------------------------
# Greenlinger subpaths


@dataclass
class GreenlingerWitness:
    start: int                 # index of a on the circuit
    length: int                # |p_[a,b]|; equals the circuit length when a = b
    a: ExtVertex
    b: ExtVertex
    g: NormalWord
    q: list[ExtVertex]         # the geodesic from a to b inside g.Gamma
    d_ab: int


def greenlinger_witness(ctx: ProductContext, cycle: Sequence[ExtVertex],
                        tools: CopyTools | None = None) -> GreenlingerWitness:
    """A subpath p_[a,b] of the circuit inside one copy g.Gamma with
    d(a, b) <= 4 such that p_[a,b] q^-1 is a circuit of g.Gamma."""
    cyc = list(cycle[:-1]) if len(cycle) > 1 and cycle[0] == cycle[-1] else list(cycle)
    N = len(cyc)
    if N < 3 or len(set(cyc)) != N:
        raise InputError("not a circuit")
    tools = tools or CopyTools(ctx)
    whole = tools.of(cyc)
    if whole is not None:
        return GreenlingerWitness(0, N, cyc[0], cyc[0], whole[0], [cyc[0]], 0)
    for ell in range(2, N):
        for s in range(N):
            seg = [cyc[(s + t) % N] for t in range(ell + 1)]
            got = tools.of(seg)
            if got is None:
                continue
            a, b = seg[0], seg[-1]
            d = bfs_base_distance(ctx, a.v, b.v)
            if d > 4 or d >= ell:
                continue
            g = got[0]
            q = [copy_vertex(ctx, g, u) for u in base_geodesic(ctx, a.v, b.v)]
            interior = set(seg[1:-1])
            if any(x in interior for x in q) or len(set(q)) != len(q):
                continue
            return GreenlingerWitness(s, ell, a, b, g, q, d)
    raise VerificationFailure("no Greenlinger subpath found on this circuit")


def check_greenlinger_witness(ctx: ProductContext, cycle: Sequence[ExtVertex],
                              w: GreenlingerWitness) -> list[str]:
    cyc = list(cycle[:-1]) if cycle[0] == cycle[-1] else list(cycle)
    N = len(cyc)
    bad = []
    seg = [cyc[(w.start + t) % N] for t in range(w.length + 1)]
    if seg[0] != w.a or seg[-1] != w.b:
        bad.append("endpoints")
    if not all(in_copy(ctx, x, w.g) for x in seg):
        bad.append("subpath not in copy")
    if w.d_ab > 4 or bfs_base_distance(ctx, w.a.v, w.b.v) != w.d_ab:
        bad.append("d(a,b) > 4")
    if w.a == w.b:
        if w.length != N:
            bad.append("a = b but the subpath is not the whole circuit")
    else:
        if not all(in_copy(ctx, x, w.g) for x in w.q) or not is_path(ctx, w.q):
            bad.append("q not a path in the copy")
        if len(w.q) - 1 != w.d_ab:
            bad.append("q not geodesic")
        loop = seg + list(reversed(w.q))[1:]
        if not is_circuit_loop(loop):
            bad.append("p_[a,b] q^-1 not a circuit")
    return bad


# ----------------------------------------------------------------------------
# planes S(p; n)


def plane_visits(ctx: ProductContext, p: Sequence[ExtVertex], n: int,
                 tools: CopyTools | None = None) -> list[tuple[NormalWord, int, int]]:
    """S(p; n) as (copy, first index, last index) for copies meeting the
    geodesic p in a subpath of length >= n (n >= 3 makes the copy unique)."""
    if n < 3:
        raise InputError("plane_visits needs n >= 3 so that each copy is determined")
    tools = tools or CopyTools(ctx)
    seg = tools.segment_table(p)
    best: dict = {}
    for (i, j), k in seg.items():
        if k is None or j - i < n:
            continue
        lo, hi = best.get(k, (i, j))
        best[k] = (min(lo, i), max(hi, j))
    return sorted(((k, lo, hi) for k, (lo, hi) in best.items()), key=lambda t: (t[1], t[2]))


def plane_count_check(ctx: ProductContext, p: Sequence[ExtVertex], k: int, c: int,
                      visits: list | None = None) -> tuple[int, int, bool]:
    """``(count, bound, ok)`` for |{g in S(p;3) : d(c, g.Gamma & p) <= k}| <= 2(k+1)+4.
    ``c`` is an index on p; distances along a geodesic are index gaps."""
    visits = plane_visits(ctx, p, 3) if visits is None else visits
    count = 0
    for _, lo, hi in visits:
        gap = 0 if lo <= c <= hi else min(abs(c - lo), abs(c - hi))
        if gap <= k:
            count += 1
    bound = 2 * (k + 1) + 4
    return count, bound, count <= bound


# ----------------------------------------------------------------------------
# tightness


def tightness_constants(k: int, delta: int, f) -> tuple[int, int, int]:
    """(P0, P1, k1) from the tightness proposition; ``f`` maps n to f(n)."""
    if k < 0 or delta < 0:
        raise InputError("k and delta must be non-negative")
    get = f if callable(f) else (lambda n: f[n])
    try:
        f0 = int(get(24 * delta + 32))
        f1 = int(get(32 * delta + 32))
    except (KeyError, IndexError):
        raise InputError(f"f must be given at {24 * delta + 32} and {32 * delta + 32}") from None
    a0 = k + 2 * delta + 3
    a1 = k + 4 * delta + 3
    P0 = 2 * k + 1 + 2 * a0 * (2 * a0 + 4) * f0
    P1 = 2 * k + 1 + 2 * a1 * (2 * a1 + 4) * f1
    k1 = k + 12 * delta + 23
    return P0, P1, k1


def graph_delta(g: SimplicialGraph) -> int:
    """Integer hyperbolicity constant: the four-point delta of Gamma, rounded up."""
    return math.ceil(estimate_delta(g))


def tightness_sample_check(fam: WindowFamily, pairs: Iterable[tuple[ExtVertex, ExtVertex]],
                           k: int, P0: int, L: int = 2, cap: int = 2000) -> dict:
    """|V(a,b) & N(c,k)| <= P0 with V(a,b) and distances read off window(L).

    Window geodesics and balls can only undercount, so a pass here is a
    pass for the window data, not a global statement.
    """
    win = fam.window(L)
    worst = 0
    checked = 0
    for a, b in pairs:
        geos = win.geodesics(a, b, cap)
        V = sorted({win.index[x] for path in geos for x in path})
        if not V:
            continue
        Varr = np.array(V, dtype=np.int64)
        for ci in V:
            row = win.dist_row(ci)
            cnt = int(((row[Varr] >= 0) & (row[Varr] <= k)).sum())
            worst = max(worst, cnt)
            checked += 1
    return {"k": k, "P0": P0, "max_count": worst, "checked": checked,
            "status": "verified" if worst <= P0 else "failed"}


# ----------------------------------------------------------------------------
# asymptotic-dimension cover


@dataclass
class AsdimCover:
    o: ExtVertex
    R: int
    L: int
    window: Window = field(repr=False)
    hat: np.ndarray = field(repr=False)              # coned-off distances from o
    X: list[int] = field(repr=False)                 # window indices with hat <= R+1
    labels: dict = field(repr=False)                 # index -> (k, g)
    pieces: dict = field(repr=False)                 # (k, g) -> list of indices
    segmentation_mismatches: int = 0
    piece_outside_copy: int = 0


def asdim_cover(ctx: ProductContext, o: ExtVertex, R: int, L: int = 2,
                window: Window | None = None) -> AsdimCover:
    """The pieces Q_o(k, g) on the window, from a geodesic spanning tree at o."""
    win = window or build_window(ctx, L)
    if o not in win:
        raise InputError("root vertex outside the window")
    tools = CopyTools(ctx)
    oi = win.index[o]
    hat = win.dist_row(oi, coned=True).astype(np.int64)
    parent = win.tree_parents(oi)
    X = [i for i in range(len(win)) if 0 <= hat[i] <= R + 1]
    labels = {}
    pieces: dict = {}
    mismatches = 0
    outside = 0
    for i in X:
        path = [i]
        while path[-1] != oi:
            path.append(int(parent[path[-1]]))
        path.reverse()
        verts = [win.vertices[t] for t in path]
        if len(verts) == 1:
            key = (0, IDENTITY)
        else:
            marks = copy_segmentation(ctx, verts)
            if len(marks) - 1 != hat[i]:
                mismatches += 1
            got = tools.of(verts[marks[-2]:])
            key = (len(marks) - 1, got[0])
            if not tools.member(verts[-1], got[0]):
                outside += 1
        labels[i] = key
        pieces.setdefault(key, []).append(i)
    return AsdimCover(o, R, win.L, win, hat, X, labels, pieces, mismatches, outside)


def cover_disjointness_check(cover: AsdimCover, r: int) -> dict:
    """Distinct pieces minus Y = N(hat <= R, 3r+12) are at least r apart."""
    win = cover.window
    inner = [i for i in cover.X if cover.hat[i] <= cover.R]
    dist_inner = win.multi_source_distance(inner)
    radius = 3 * r + 12
    survivors = [i for i in cover.X if not (0 <= dist_inner[i] <= radius)]
    min_sep = INF
    violations = 0
    for a in survivors:
        row = win.dist_row(a)
        for b in survivors:
            if b <= a or cover.labels[a] == cover.labels[b]:
                continue
            d = int(row[b])
            d = INF if d < 0 else d
            min_sep = min(min_sep, d)
            if d < r:
                violations += 1
    ok = violations == 0 and cover.segmentation_mismatches == 0 and cover.piece_outside_copy == 0
    return {
        "R": cover.R,
        "r": r,
        "pieces": len(cover.pieces),
        "X_size": len(cover.X),
        "survivors": len(survivors),
        "min_separation": min_sep,
        "violations": violations,
        "segmentation_mismatches": cover.segmentation_mismatches,
        "pieces_outside_copy": cover.piece_outside_copy,
        "status": "verified" if ok else "failed",
    }


# ----------------------------------------------------------------------------
# samplers


def sample_bigons(ctx: ProductContext, count: int, rng: random.Random,
                  fam: WindowFamily, L_src: int = 1, L_geo: int = 2,
                  per_pair: int = 2, cap: int = 256) -> list[tuple[list, list]]:
    """Geodesic bigons (p, q) with p q^-1 a circuit.

    Endpoints x have representatives of length <= L_src; geodesics are read
    in window(L_geo) and kept only when their length is a certified distance.
    """
    win = fam.window(L_geo)
    srcs = [i for i, x in enumerate(win.vertices) if len(x.rep) <= L_src]
    rng.shuffle(srcs)
    out = []
    seen = set()
    for i in srcs:
        dist, cnt = win.geodesic_count_row(i)
        cands = [j for j in range(len(win)) if cnt[j] >= 2 and dist[j] >= 2]
        rng.shuffle(cands)
        for j in cands:
            x, y = win.vertices[i], win.vertices[j]
            if (y, x) in seen:
                continue
            d, cert = fam.distance(x, y)
            if not cert or d != dist[j]:
                continue
            geos = win.geodesics(x, y, cap)
            found = 0
            for s in range(len(geos)):
                for t in range(s + 1, len(geos)):
                    if set(geos[s][1:-1]).isdisjoint(geos[t][1:-1]):
                        out.append((geos[s], geos[t]))
                        found += 1
                        if found >= per_pair:
                            break
                if found >= per_pair:
                    break
            if found:
                seen.add((x, y))
            if len(out) >= count:
                return out[:count]
    return out


def copy_circuit(ctx: ProductContext, g: Sequence) -> list[ExtVertex]:
    """The circuit g.C for Gamma a single circuit, starting at g.(least vertex)."""
    _require_cycle_graph(ctx)
    order = [0]
    prev = None
    while len(order) < ctx.n:
        nb = [w for w in ctx.graph.neighbor_indices(order[-1]) if w != prev]
        prev = order[-1]
        order.append(min(nb) if len(order) == 1 else nb[0])
    return [copy_vertex(ctx, g, w) for w in order]


def sample_triangles(ctx: ProductContext, count: int, rng: random.Random, fam: WindowFamily,
                     loops: Sequence[Sequence[ExtVertex]]) -> list[tuple[list, list, list]]:
    """Geodesic triangles cut out of the given circuits at three corners.
    A side is kept only when its length is a certified distance."""
    out = []
    tries = 0
    loops = [list(c) for c in loops]
    while len(out) < count and tries < 200 * count and loops:
        tries += 1
        cyc = loops[rng.randrange(len(loops))]
        N = len(cyc)
        s = sorted(rng.sample(range(N), 3))
        i, j, k = s
        p = cyc[i:j + 1]
        q = cyc[j:k + 1]
        # r runs from a = cyc[i] backwards around the loop to c = cyc[k]
        r = [cyc[(i - t) % N] for t in range(N - k + i + 1)]
        ok = True
        for side in (p, q, r):
            d, cert = fam.distance(side[0], side[-1])
            if not cert or d != len(side) - 1:
                ok = False
                break
        if ok:
            out.append((p, q, r))
    return out


def sample_geodesics(ctx: ProductContext, count: int, rng: random.Random, fam: WindowFamily,
                     L_src: int = 1, L_geo: int = 2, min_len: int = 3) -> list[list[ExtVertex]]:
    """Certified geodesics: least-index tree paths in window(L_geo)."""
    win = fam.window(L_geo)
    srcs = [i for i, x in enumerate(win.vertices) if len(x.rep) <= L_src]
    out = []
    tries = 0
    while len(out) < count and tries < 50 * count:
        tries += 1
        i = rng.choice(srcs)
        j = rng.randrange(len(win))
        x, y = win.vertices[i], win.vertices[j]
        dw = win.distance(x, y)
        if dw == INF or dw < min_len:
            continue
        d, cert = fam.distance(x, y)
        if not cert or d != dw:
            continue
        path = [j]
        parent = win.tree_parents(i)
        while path[-1] != i:
            path.append(int(parent[path[-1]]))
        out.append([win.vertices[t] for t in reversed(path)])
    return out


def window_delta(win: Window, rng: random.Random, samples: int = 2000) -> Fraction:
    """Four-point delta over random quadruples of one window (sampled diagnostic)."""
    n = len(win)
    pts = sorted({rng.randrange(n) for _ in range(min(n, 4 * int(math.isqrt(samples)) + 4))})
    rows = np.stack([win.dist_row(i) for i in pts]).astype(np.int64)
    sub = rows[:, pts]
    if (sub < 0).any():
        raise InputError("window is disconnected on the sample")
    m = len(pts)
    quads = np.array([[rng.randrange(m) for _ in range(4)] for _ in range(samples)], dtype=np.int64)
    return Fraction(_kernels.delta_doubled_quads(sub, quads), 2)
