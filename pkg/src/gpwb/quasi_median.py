"""Balls in the quasi-median Cayley graph X (generators: all non-trivial
vertex-group elements), their hyperplanes, crossing and contact graphs,
and the comparison with the extension graph through F(gJ_v) = g.v.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .core_graph import SimplicialGraph, estimate_delta
from .errors import InputError
from .extension_graph import (
    ExtVertex,
    Window,
    copy_segmentation,
    format_vertex,
)
from .graph_product import DEFAULT_BALL_CAP, NormalWord, ProductContext, enumerate_ball, mul
from .parabolics import coset_canonical_mask, coset_intersection

__all__ = [
    "CayleyBall",
    "Hyperplane",
    "build_cayley_ball",
    "hyperplanes",
    "crossing_graph",
    "contact_graph",
    "verify_iso",
    "coned_off_window",
    "coned_off_geodesic_decompose",
    "contact_delta",
]


@dataclass
class CayleyBall:
    """Elements of syllable length <= r and the Cayley edges among them.

    ``edges[e] = (i, j, v)`` joins elements i < j with ``g_i^-1 g_j`` in G_v.
    """

    ctx: ProductContext
    r: int
    elements: list[NormalWord]
    index: dict
    edges: list[tuple[int, int, int]]
    edge_id: dict
    _classes: "HyperplaneSet | None" = field(default=None, repr=False)

    def __len__(self):
        return len(self.elements)

    def neighbor(self, i: int, v: int, a: int) -> int | None:
        return self.index.get(mul(self.ctx, self.elements[i], [(v, a)]))

    def to_dot(self, colored: bool = True) -> str:
        palette = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                   "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"]
        cls = hyperplanes(self).edge_class if colored else None
        lines = ["graph cayley_ball {"]
        for i, g in enumerate(self.elements):
            lines.append(f'  n{i} [label="{self.ctx.format(g)}"];')
        for e, (i, j, _) in enumerate(self.edges):
            attr = f' [color="{palette[cls[e] % len(palette)]}"]' if cls is not None else ""
            lines.append(f"  n{i} -- n{j}{attr};")
        lines.append("}")
        return "\n".join(lines) + "\n"


def build_cayley_ball(ctx: ProductContext, r: int, cap: int = DEFAULT_BALL_CAP) -> CayleyBall:
    if r < 0:
        raise InputError("ball radius must be non-negative")
    ctx.require_finite()
    elems = enumerate_ball(ctx, r, cap)
    index = {g: i for i, g in enumerate(elems)}
    edges = []
    edge_id = {}
    for i, g in enumerate(elems):
        for v in range(ctx.n):
            for a in ctx.groups[v].nontrivial():
                j = index.get(mul(ctx, g, [(v, a)]))
                if j is not None and i < j:
                    edge_id[(i, j)] = len(edges)
                    edges.append((i, j, v))
    return CayleyBall(ctx, r, elems, index, edges, edge_id)


@dataclass
class Hyperplane:
    id: int
    label: int                 # orbit vertex v of gJ_v
    edges: list[int]
    carrier: list[int]
    interior: bool
    image: ExtVertex           # F(gJ_v)


@dataclass
class HyperplaneSet:
    planes: list[Hyperplane]
    edge_class: np.ndarray
    crossings: set
    well_defined: bool


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        p = self.parent
        while p[x] != x:
            p[x] = p[p[x]]
            x = p[x]
        return x

    def union(self, a: int, b: int):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            if ra < rb:
                ra, rb = rb, ra
            self.parent[ra] = rb


def hyperplanes(ball: CayleyBall) -> HyperplaneSet:
    """Edge classes under triangle and opposite-square moves inside the ball.

    A class is interior when every triangle and square partner of each of
    its edges lies in the ball, so the class cannot grow past the boundary.
    """
    if ball._classes is not None:
        return ball._classes
    ctx = ball.ctx
    E = len(ball.edges)
    uf = _UnionFind(E)
    eid = ball.edge_id
    incident: dict = {}
    for e, (i, j, v) in enumerate(ball.edges):
        incident.setdefault((i, v), []).append(e)
        incident.setdefault((j, v), []).append(e)
    for es in incident.values():
        for e in es[1:]:
            uf.union(es[0], e)
    complete = np.ones(E, dtype=bool)
    squares = []
    for e, (i, j, v) in enumerate(ball.edges):
        gi, gj = ball.elements[i], ball.elements[j]
        if len(incident[(i, v)]) < ctx.groups[v].order - 1:
            complete[e] = False
        for w in range(ctx.n):
            if not (ctx.link_mask[v] >> w) & 1:
                continue
            for c in ctx.groups[w].nontrivial():
                i2 = ball.index.get(mul(ctx, gi, [(w, c)]))
                j2 = ball.index.get(mul(ctx, gj, [(w, c)]))
                if i2 is None or j2 is None:
                    complete[e] = False
                    continue
                opp = eid[(min(i2, j2), max(i2, j2))]
                uf.union(e, opp)
                squares.append((e, eid[(min(i, i2), max(i, i2))]))
    roots = [uf.find(e) for e in range(E)]
    order = {}
    for r_ in roots:
        order.setdefault(r_, len(order))
    edge_class = np.array([order[r_] for r_ in roots], dtype=np.int64)
    members: list[list[int]] = [[] for _ in order]
    for e, c in enumerate(edge_class):
        members[c].append(e)
    planes = []
    well = True
    for c, es in enumerate(members):
        v = ball.edges[es[0]][2]
        carrier = sorted({t for e in es for t in ball.edges[e][:2]})
        images = {coset_canonical_mask(ctx, ball.elements[ball.edges[e][0]], ctx.star_mask[v])
                  for e in es}
        labels = {ball.edges[e][2] for e in es}
        if len(images) != 1 or len(labels) != 1:
            well = False
        rep = min(images, key=lambda w: (len(w), w))
        planes.append(Hyperplane(c, v, es, carrier, bool(complete[es].all()), ExtVertex(v, rep)))
    crossings = {(min(a, b), max(a, b)) for a, b in
                 ((int(edge_class[e1]), int(edge_class[e2])) for e1, e2 in squares) if a != b}
    ball._classes = HyperplaneSet(planes, edge_class, crossings, well)
    return ball._classes


def _contacts(ball: CayleyBall, hs: HyperplaneSet) -> set:
    at: list[set] = [set() for _ in ball.elements]
    for e, (i, j, _) in enumerate(ball.edges):
        c = int(hs.edge_class[e])
        at[i].add(c)
        at[j].add(c)
    out = set()
    for cs in at:
        cs = sorted(cs)
        for s in range(len(cs)):
            for t in range(s + 1, len(cs)):
                out.add((cs[s], cs[t]))
    return out


def _plane_graph(ball: CayleyBall, pairs: set, interior_only: bool) -> SimplicialGraph:
    hs = hyperplanes(ball)
    keep = [h.id for h in hs.planes if h.interior or not interior_only]
    ok = set(keep)
    return SimplicialGraph(keep, [(a, b) for a, b in sorted(pairs) if a in ok and b in ok])


def crossing_graph(ball: CayleyBall, interior_only: bool = True) -> SimplicialGraph:
    """Hyperplanes adjacent when a square of the ball has sides in both."""
    return _plane_graph(ball, hyperplanes(ball).crossings, interior_only)


def contact_graph(ball: CayleyBall, interior_only: bool = True) -> SimplicialGraph:
    """Hyperplanes adjacent when their carriers share a vertex."""
    hs = hyperplanes(ball)
    return _plane_graph(ball, _contacts(ball, hs), interior_only)


def coned_off_window(ctx: ProductContext, window: Window) -> SimplicialGraph:
    return window.to_graph(coned=True)


def verify_iso(ctx: ProductContext, ball: CayleyBall, window: Window) -> dict:
    """Compare hyperplanes of the ball with window vertices through F.

    Checked exactly: F is constant on each class, injective, and hits every
    window vertex whose hyperplane meets the ball.  Edge comparisons run
    over pairs with both images in the window; a window edge is required
    to appear in the ball only when its smallest witness fits (a square at
    the minimal common coset element for crossings, a shared carrier
    vertex for contacts).  Ball edges must always map to window edges.
    """
    if ball.ctx is not ctx or window.ctx is not ctx:
        raise InputError("ball, window and context must match")
    hs = hyperplanes(ball)
    planes = hs.planes
    pre = {}
    injective = True
    for h in planes:
        if h.image in pre:
            injective = False
        pre.setdefault(h.image, h.id)
    orbit_ok = all(h.image.v == h.label for h in planes)
    in_win = {h.id: window.index[h.image] for h in planes if h.image in window.index}
    # surjectivity: a window vertex (v, rep) has hyperplane rep.J_v in the ball iff |rep| + 1 <= r
    should = [x for x in window.vertices if len(x.rep) + 1 <= ball.r]
    missing = [x for x in should if x not in pre]
    contacts = _contacts(ball, hs)

    def compare(ball_pairs: set, coned: bool, slack: int):
        ptr, idx = window.coned if coned else (window.indptr, window.indices)
        ball_only = 0
        missing_in_ball = 0
        checked = 0
        undecided = 0
        for a, b in ball_pairs:
            if a in in_win and b in in_win:
                ia, ib = in_win[a], in_win[b]
                if ib not in idx[ptr[ia]:ptr[ia + 1]]:
                    ball_only += 1
        for x_id, ia in in_win.items():
            x = window.vertices[ia]
            for ib in idx[ptr[ia]:ptr[ia + 1]]:
                y = window.vertices[int(ib)]
                y_id = pre.get(y)
                if y_id is None or y_id <= x_id:
                    continue
                meet = coset_intersection(ctx, x.rep, ctx.star_mask[x.v], y.rep, ctx.star_mask[y.v])
                if meet is None or len(meet[0]) + slack > ball.r:
                    undecided += 1
                    continue
                checked += 1
                if (x_id, y_id) not in ball_pairs:
                    missing_in_ball += 1
        return {"checked": checked, "undecided": undecided,
                "ball_edges_not_in_window": ball_only, "window_edges_not_in_ball": missing_in_ball}

    cross = compare(hs.crossings, False, 2)
    cont = compare(contacts, True, 1)
    ok = (hs.well_defined and injective and orbit_ok and not missing
          and cross["ball_edges_not_in_window"] == 0 and cross["window_edges_not_in_ball"] == 0
          and cont["ball_edges_not_in_window"] == 0 and cont["window_edges_not_in_ball"] == 0)
    return {
        "ball_r": ball.r,
        "window_L": window.L,
        "ball_elements": len(ball),
        "ball_edges": len(ball.edges),
        "hyperplanes": len(planes),
        "interior_hyperplanes": sum(h.interior for h in planes),
        "boundary_hyperplanes": sum(not h.interior for h in planes),
        "images_in_window": len(in_win),
        "well_defined": hs.well_defined,
        "injective": injective,
        "orbit_correct": orbit_ok,
        "surjective_onto": len(should),
        "not_hit": [format_vertex(ctx, x) for x in missing[:10]],
        "crossing_vs_extension": cross,
        "contact_vs_coned": cont,
        "status": "verified" if ok else "failed",
    }


def coned_off_geodesic_decompose(ctx: ProductContext, window: Window, p: Sequence[ExtVertex],
                                 next_window: Window | None = None) -> dict:
    """Greedy copy marks on a geodesic p, compared with the coned-off distance.

    The marks are a coned-off path, so their count bounds the coned-off
    distance from above; it is reported exact when it equals the window
    distance (and, given ``next_window``, the next budget agrees).  The
    marked subsequence is checked to lie within Hausdorff distance 1 of an
    independent coned-off geodesic.
    """
    if any(x not in window.index for x in p):
        raise InputError("path leaves the window")
    if window.distance(p[0], p[-1]) != len(p) - 1:
        raise InputError("p is not a geodesic of the window")
    marks = copy_segmentation(ctx, p)
    a, b = window.index[p[0]], window.index[p[-1]]
    row = window.dist_row(a, coned=True)
    d_hat = int(row[b])
    certified = d_hat == len(marks) - 1
    if next_window is not None:
        certified = certified and next_window.distance(p[0], p[-1], coned=True) == d_hat
    # independent coned-off geodesic: least-index predecessors from b back to a
    ptr, idx = window.coned
    alpha = [b]
    while alpha[-1] != a:
        u = alpha[-1]
        nb = idx[ptr[u]:ptr[u + 1]]
        alpha.append(int(nb[row[nb] == row[u] - 1].min()))
    alpha.reverse()
    mk = [window.index[p[t]] for t in marks]
    rows_alpha = [window.dist_row(t, coned=True) for t in alpha]
    haus = 0
    for m in mk:
        haus = max(haus, min(int(r_[m]) for r_ in rows_alpha))
    for r_ in rows_alpha:
        haus = max(haus, min(int(r_[m]) for m in mk))
    return {
        "marks": marks,
        "coned_distance": d_hat,
        "certified": certified,
        "alpha": [format_vertex(ctx, window.vertices[t]) for t in alpha],
        "hausdorff": haus,
        "status": "verified" if certified and haus <= 1 else "failed",
    }


def contact_delta(ball: CayleyBall):
    """Four-point delta of the ball's contact graph: a tree-likeness
    diagnostic on one finite ball, not a certificate."""
    g = contact_graph(ball, interior_only=False)
    if len(g) == 0:
        return 0
    return estimate_delta(g)
