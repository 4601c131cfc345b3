"""Finite simplicial graphs: metric, circuits, spanning trees, four-point delta."""

from __future__ import annotations

import math
from collections import deque
from fractions import Fraction
from functools import cached_property
from typing import Hashable, Iterable, Mapping, Sequence

import numpy as np

from . import _kernels
from .errors import BudgetExceeded, InputError

__all__ = [
    "SimplicialGraph",
    "Circuit",
    "link",
    "star",
    "girth",
    "circuits_through",
    "csr_without_edge",
    "canonical_circuit",
    "subdivide",
    "bfs_distance",
    "geodesics",
    "geodesic_spanning_tree",
    "bfs_parents",
    "gromov_product",
    "estimate_delta",
    "distance_matrix",
    "is_connected",
    "cycle_graph",
    "path_graph",
    "complete_graph",
    "star_graph",
    "DEFAULT_GEODESIC_CAP",
]

DEFAULT_GEODESIC_CAP = 10**5
INF = math.inf


class SimplicialGraph:
    """Finite undirected simple graph.

    Vertex ids are any hashables.  By default they are sorted (strings sort
    lexicographically), and that order is the tie-break order used by every
    algorithm in the package.  Pass ``sort=False`` to keep the given order,
    which derived graphs use when their ids are not mutually comparable.
    """

    __slots__ = ("_vertices", "_index", "_adj", "_edges", "__dict__")

    def __init__(self, vertices: Iterable[Hashable], edges: Iterable[Sequence[Hashable]] = (),
                 *, sort: bool = True):
        verts = list(dict.fromkeys(vertices))
        if sort:
            verts.sort()
        self._vertices = tuple(verts)
        self._index = {v: i for i, v in enumerate(self._vertices)}
        adj: list[set[int]] = [set() for _ in verts]
        for e in edges:
            if len(e) != 2:
                raise InputError(f"edge {e!r} does not have two endpoints")
            a, b = e
            if a not in self._index or b not in self._index:
                raise InputError(f"edge {e!r} references an unknown vertex")
            if a == b:
                raise InputError(f"self-loop at {a!r} is not allowed")
            i, j = self._index[a], self._index[b]
            adj[i].add(j)
            adj[j].add(i)
        self._adj = tuple(tuple(sorted(s)) for s in adj)
        self._edges = tuple((i, j) for i in range(len(verts)) for j in self._adj[i] if i < j)

    # -- basic accessors ---------------------------------------------------
    @property
    def vertices(self) -> tuple:
        return self._vertices

    @property
    def edges(self) -> tuple:
        """Edges as id pairs, each listed once with the smaller index first."""
        vs = self._vertices
        return tuple((vs[i], vs[j]) for i, j in self._edges)

    @property
    def edge_indices(self) -> tuple:
        return self._edges

    def __len__(self) -> int:
        return len(self._vertices)

    def __contains__(self, v) -> bool:
        return v in self._index

    def __eq__(self, other) -> bool:
        if not isinstance(other, SimplicialGraph):
            return NotImplemented
        return self._vertices == other._vertices and self._edges == other._edges

    def __hash__(self) -> int:
        return hash((self._vertices, self._edges))

    def __repr__(self) -> str:
        return f"SimplicialGraph(|V|={len(self._vertices)}, |E|={len(self._edges)})"

    def index(self, v) -> int:
        try:
            return self._index[v]
        except KeyError:
            raise InputError(f"unknown vertex {v!r}") from None

    def neighbor_indices(self, i: int) -> tuple:
        return self._adj[i]

    def neighbors(self, v) -> tuple:
        vs = self._vertices
        return tuple(vs[j] for j in self._adj[self.index(v)])

    def has_edge(self, a, b) -> bool:
        if a not in self._index or b not in self._index:
            return False
        return self._index[b] in self._adj[self._index[a]]

    def degree(self, v) -> int:
        return len(self._adj[self.index(v)])

    @cached_property
    def csr(self) -> tuple[np.ndarray, np.ndarray]:
        indptr = np.zeros(len(self._vertices) + 1, dtype=np.int64)
        for i, nb in enumerate(self._adj):
            indptr[i + 1] = indptr[i] + len(nb)
        indices = np.fromiter((j for nb in self._adj for j in nb), dtype=np.int64,
                              count=int(indptr[-1]))
        return indptr, indices

    @cached_property
    def adjacency_matrix(self) -> np.ndarray:
        n = len(self._vertices)
        mat = np.zeros((n, n), dtype=bool)
        for i, j in self._edges:
            mat[i, j] = mat[j, i] = True
        return mat

    def induced_subgraph(self, vertices: Iterable[Hashable]) -> "SimplicialGraph":
        keep = [v for v in self._vertices if v in set(vertices)]
        kept = set(keep)
        edges = [(a, b) for a, b in self.edges if a in kept and b in kept]
        return SimplicialGraph(keep, edges, sort=False)

    # -- I/O ---------------------------------------------------------------
    @classmethod
    def from_json(cls, obj: Mapping) -> "SimplicialGraph":
        if not isinstance(obj, Mapping) or "vertices" not in obj:
            raise InputError('graph JSON needs a "vertices" list')
        verts = obj["vertices"]
        if not isinstance(verts, list):
            raise InputError('"vertices" must be a list')
        verts = [str(v) for v in verts]
        if len(set(verts)) != len(verts):
            raise InputError("duplicate vertex ids in graph JSON")
        edges = obj.get("edges", [])
        if not isinstance(edges, list):
            raise InputError('"edges" must be a list of pairs')
        return cls(verts, [tuple(str(x) for x in e) for e in edges])

    def to_json(self) -> dict:
        return {"vertices": [str(v) for v in self._vertices],
                "edges": [[str(a), str(b)] for a, b in self.edges]}

    def to_dot(self, name: str = "G", colors: Mapping | None = None,
               labels: Mapping | None = None) -> str:
        palette = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                   "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"]
        lines = [f"graph {name} {{"]
        for i, v in enumerate(self._vertices):
            attrs = [f'label="{_dot_escape(labels[v] if labels and v in labels else v)}"']
            if colors is not None and v in colors:
                c = colors[v]
                if isinstance(c, int):
                    c = palette[c % len(palette)]
                attrs.append(f'style=filled fillcolor="{c}"')
            lines.append(f"  n{i} [{' '.join(attrs)}];")
        for i, j in self._edges:
            lines.append(f"  n{i} -- n{j};")
        lines.append("}")
        return "\n".join(lines) + "\n"


def _dot_escape(s) -> str:
    return str(s).replace("\\", "\\\\").replace('"', '\\"')


class Circuit(tuple):
    """A circuit stored as its vertex cycle (without repeating the start).

    Instances built by :func:`canonical_circuit` are in the canonical
    rotation/orientation: the lexicographically least index sequence.
    """

    __slots__ = ()

    @property
    def closed_path(self) -> tuple:
        return tuple(self) + (self[0],)

    def edge_set(self) -> frozenset:
        n = len(self)
        return frozenset(frozenset((self[i], self[(i + 1) % n])) for i in range(n))


def canonical_circuit(g: SimplicialGraph, cycle: Sequence[Hashable]) -> Circuit:
    """Rotate/reflect a vertex cycle to its least index sequence."""
    idx = [g.index(v) for v in cycle]
    n = len(idx)
    if n < 3 or len(set(idx)) != n:
        raise InputError(f"a circuit needs at least 3 distinct vertices, got {list(cycle)!r}")
    for a, b in zip(cycle, list(cycle[1:]) + [cycle[0]]):
        if not g.has_edge(a, b):
            raise InputError(f"{a!r} and {b!r} are not adjacent")
    best = None
    for seq in (idx, idx[::-1]):
        for r in range(n):
            cand = tuple(seq[r:] + seq[:r])
            if best is None or cand < best:
                best = cand
    vs = g.vertices
    return Circuit(vs[i] for i in best)


def link(g: SimplicialGraph, v) -> frozenset:
    """Lk(v): the neighbours of v."""
    return frozenset(g.neighbors(v))


def star(g: SimplicialGraph, v) -> frozenset:
    """St(v) = {v} together with Lk(v)."""
    return frozenset(g.neighbors(v)) | {v}


def girth(g: SimplicialGraph) -> float | int:
    """Length of a shortest circuit, or ``math.inf`` for a forest."""
    best = INF
    n = len(g)
    for s in range(n):
        dist = [-1] * n
        parent = [-1] * n
        dist[s] = 0
        queue = deque([s])
        while queue:
            u = queue.popleft()
            if 2 * dist[u] >= best:
                break
            for w in g.neighbor_indices(u):
                if dist[w] < 0:
                    dist[w] = dist[u] + 1
                    parent[w] = u
                    queue.append(w)
                elif parent[u] != w:
                    best = min(best, dist[u] + dist[w] + 1)
    return best if best == INF else int(best)


def _csr_without_edge(g: SimplicialGraph, i: int, j: int):
    indptr, indices = g.csr
    return csr_without_edge(indptr, indices, i, j)


def csr_without_edge(indptr: np.ndarray, indices: np.ndarray, i: int, j: int):
    """CSR arrays with the undirected edge (i, j) removed."""
    keep = np.ones(indices.shape[0], dtype=bool)
    for a, b in ((i, j), (j, i)):
        row = indices[indptr[a]:indptr[a + 1]]
        keep[indptr[a] + np.nonzero(row == b)[0]] = False
    counts = np.diff(indptr)
    counts[i] -= 1
    counts[j] -= 1
    new_ptr = np.concatenate([[0], np.cumsum(counts)]).astype(np.int64)
    return new_ptr, indices[keep]


def circuits_through(g: SimplicialGraph, e: Sequence[Hashable], n: int,
                     cap: int = DEFAULT_GEODESIC_CAP) -> list[Circuit]:
    """All circuits of length at most ``n`` that contain the edge ``e``.

    Each circuit is reported once, in canonical form, sorted.  Raises
    :class:`BudgetExceeded` when more than ``cap`` circuits exist.
    """
    a, b = e
    if not g.has_edge(a, b):
        raise InputError(f"{tuple(e)!r} is not an edge")
    ia, ib = g.index(a), g.index(b)
    if n < 3:
        return []
    ptr2, idx2 = _csr_without_edge(g, ia, ib)
    dist_to_a = _kernels.bfs(ptr2, idx2, ia)
    indptr, indices = g.csr
    paths = _kernels.circuits_dfs(indptr, indices, ia, ib, int(n), dist_to_a, int(cap))
    if paths is None:
        raise BudgetExceeded(f"more than {cap} circuits through {tuple(e)!r} of length <= {n}")
    vs = g.vertices
    out = {canonical_circuit(g, [vs[k] for k in p]) for p in paths}
    return sorted(out, key=lambda c: [g.index(v) for v in c])


def subdivide(g: SimplicialGraph, k: int) -> SimplicialGraph:
    """Replace every edge by a path of length k+1 through k new vertices."""
    if k < 0:
        raise InputError("subdivision parameter must be non-negative")
    verts = list(g.vertices)
    edges = []
    for a, b in g.edges:
        chain = [a] + [f"{a}~{b}~{t}" for t in range(1, k + 1)] + [b]
        verts.extend(chain[1:-1])
        edges.extend(zip(chain, chain[1:]))
    return SimplicialGraph(verts, edges)


def bfs_distance(g: SimplicialGraph, a, b) -> float | int:
    indptr, indices = g.csr
    d = int(_kernels.bfs(indptr, indices, g.index(a))[g.index(b)])
    return INF if d < 0 else d


def geodesics(g: SimplicialGraph, a, b, cap: int = DEFAULT_GEODESIC_CAP) -> list[tuple]:
    """Every shortest path from a to b, in lexicographic index order."""
    ia, ib = g.index(a), g.index(b)
    indptr, indices = g.csr
    da = _kernels.bfs(indptr, indices, ia)
    db = _kernels.bfs(indptr, indices, ib)
    d = int(da[ib])
    if d < 0:
        return []
    # number of geodesic continuations from each vertex on the a->b geodesic DAG
    on_dag = (da >= 0) & (db >= 0) & (da + db == d)
    layers: list[list[int]] = [[] for _ in range(d + 1)]
    for v in np.nonzero(on_dag)[0]:
        layers[int(da[v])].append(int(v))
    ways = {ib: 1}
    for lvl in range(d - 1, -1, -1):
        for v in layers[lvl]:
            ways[v] = sum(ways.get(w, 0) for w in g.neighbor_indices(v)
                          if on_dag[w] and da[w] == lvl + 1)
    if ways.get(ia, 0) > cap:
        raise BudgetExceeded(f"{ways[ia]} geodesics exceed the cap {cap}")
    vs = g.vertices
    out: list[tuple] = []

    def walk(prefix: list[int]):
        u = prefix[-1]
        if u == ib:
            out.append(tuple(vs[i] for i in prefix))
            return
        lvl = len(prefix)
        for w in g.neighbor_indices(u):
            if on_dag[w] and da[w] == lvl:
                prefix.append(w)
                walk(prefix)
                prefix.pop()

    walk([ia])
    return out


def bfs_parents(g: SimplicialGraph, root) -> tuple[np.ndarray, np.ndarray]:
    """BFS distances and parents (least-index parent on the previous level)."""
    indptr, indices = g.csr
    ir = g.index(root)
    dist = _kernels.bfs(indptr, indices, ir)
    parent = np.full(len(g), -1, dtype=np.int64)
    for v in range(len(g)):
        if v == ir or dist[v] < 0:
            continue
        for w in g.neighbor_indices(v):  # sorted, so the first hit is the least
            if dist[w] == dist[v] - 1:
                parent[v] = w
                break
    return dist, parent


def geodesic_spanning_tree(g: SimplicialGraph, root) -> SimplicialGraph:
    """BFS tree rooted at ``root`` with least-id parents."""
    dist, parent = bfs_parents(g, root)
    if (dist < 0).any():
        raise InputError("geodesic spanning tree needs a connected graph")
    vs = g.vertices
    edges = [(vs[int(parent[v])], vs[v]) for v in range(len(g)) if parent[v] >= 0]
    return SimplicialGraph(vs, edges, sort=False)


def distance_matrix(g: SimplicialGraph, vertices: Sequence[Hashable] | None = None) -> np.ndarray:
    """Rows of BFS distances from ``vertices`` (default: all) to every vertex."""
    indptr, indices = g.csr
    src = np.arange(len(g)) if vertices is None else np.array([g.index(v) for v in vertices])
    return _kernels.bfs_many(indptr, indices, src)


def is_connected(g: SimplicialGraph) -> bool:
    if len(g) == 0:
        return True
    indptr, indices = g.csr
    return bool((_kernels.bfs(indptr, indices, 0) >= 0).all())


def gromov_product(g: SimplicialGraph, x, y, z) -> Fraction:
    """(x|y)_z = (d(x,z) + d(y,z) - d(x,y)) / 2."""
    rows = distance_matrix(g, [z, x])
    dxz, dyz = rows[0, g.index(x)], rows[0, g.index(y)]
    dxy = rows[1, g.index(y)]
    if min(dxz, dyz, dxy) < 0:
        raise InputError("Gromov product of vertices in different components")
    return Fraction(int(dxz + dyz - dxy), 2)


def estimate_delta(g: SimplicialGraph, sample: Iterable[Sequence[Hashable]] | None = None,
                   *, vertices: Sequence[Hashable] | None = None) -> Fraction:
    """Largest four-point defect min{(x|y)_w, (y|z)_w} - (x|z)_w, clipped at 0.

    With neither argument, every ordered quadruple of vertices is used.
    ``vertices`` restricts to all quadruples over a subset; ``sample``
    gives explicit (x, y, z, w) quadruples.
    """
    if sample is not None:
        quads = [tuple(q) for q in sample]
        support = sorted({v for q in quads for v in q}, key=g.index)
        pos = {v: i for i, v in enumerate(support)}
        full = distance_matrix(g, support)
        sub = full[:, [g.index(v) for v in support]]
        if (sub < 0).any():
            raise InputError("four-point sample spans several components")
        arr = np.array([[pos[v] for v in q] for q in quads], dtype=np.int64)
        return Fraction(_kernels.delta_doubled_quads(sub, arr), 2)
    verts = list(g.vertices) if vertices is None else list(vertices)
    full = distance_matrix(g, verts)
    sub = full[:, [g.index(v) for v in verts]]
    if (sub < 0).any():
        raise InputError("four-point delta needs a connected vertex set")
    return Fraction(_kernels.delta_doubled_full(sub), 2)


# -- small constructors used by tests, examples and the CLI -------------------

def cycle_graph(n: int, prefix: str = "v") -> SimplicialGraph:
    if n < 3:
        raise InputError("a simplicial cycle needs at least 3 vertices")
    vs = [f"{prefix}{i}" for i in range(n)]
    return SimplicialGraph(vs, [(vs[i], vs[(i + 1) % n]) for i in range(n)])


def path_graph(names: Sequence[str] | int) -> SimplicialGraph:
    vs = [f"p{i}" for i in range(names)] if isinstance(names, int) else list(names)
    return SimplicialGraph(vs, list(zip(vs, vs[1:])))


def complete_graph(n: int, prefix: str = "k") -> SimplicialGraph:
    vs = [f"{prefix}{i}" for i in range(n)]
    return SimplicialGraph(vs, [(vs[i], vs[j]) for i in range(n) for j in range(i + 1, n)])


def star_graph(leaves: int, center: str = "c", prefix: str = "l") -> SimplicialGraph:
    vs = [center] + [f"{prefix}{i}" for i in range(leaves)]
    return SimplicialGraph(vs, [(center, v) for v in vs[1:]])
