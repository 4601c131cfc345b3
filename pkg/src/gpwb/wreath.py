"""Graph-wreath products: the semidirect product of a graph product with a
finite group G permuting the vertices (and the vertex groups) of the graph.
"""

from __future__ import annotations

import random
from typing import NamedTuple, Sequence

from .core_graph import girth
from .errors import HypothesisError, InputError
from .extension_graph import ExtVertex, base_vertex
from .graph_product import (
    IDENTITY,
    NormalWord,
    ProductContext,
    enumerate_ball,
    inv,
    normalize,
    product,
    random_word,
)
from .groups import GraphAction
from .parabolics import coset_canonical_mask

__all__ = [
    "WreathContext",
    "WreathElement",
    "alpha",
    "wmul",
    "winv",
    "act_on_vertex",
    "edge_stabilizer",
    "parabolic_family",
    "random_element",
]


class WreathElement(NamedTuple):
    f: NormalWord
    g: int


class WreathContext:
    """A product context together with a vertex-group-preserving action."""

    def __init__(self, ctx: ProductContext, action: GraphAction):
        if action.graph != ctx.graph:
            raise InputError("the action must be on the defining graph of the product")
        for a in range(action.group.order):
            for i in range(ctx.n):
                if ctx.groups[action.act_index(a, i)] != ctx.groups[i]:
                    raise InputError(
                        f"vertex groups are not constant on the orbit of {ctx.vid(i)!r}")
        self.ctx = ctx
        self.action = action
        self.G = action.group

    @property
    def identity(self) -> WreathElement:
        return WreathElement(IDENTITY, 0)

    def element(self, f: Sequence = IDENTITY, g: int | str = 0) -> WreathElement:
        if isinstance(g, str):
            g = self.G.parse(g)
        return WreathElement(normalize(self.ctx, f), int(g))

    def format(self, x: WreathElement) -> str:
        return f"({self.ctx.format(x.f)}, {self.G.name(x.g)})"


def alpha(wctx: WreathContext, g: int, f: Sequence) -> NormalWord:
    """The automorphism alpha_g: move each syllable to the image vertex."""
    act = wctx.action
    return normalize(wctx.ctx, [(act.act_index(g, v), a) for v, a in f])


def wmul(wctx: WreathContext, x: WreathElement, y: WreathElement) -> WreathElement:
    return WreathElement(product(wctx.ctx, x.f, alpha(wctx, x.g, y.f)), wctx.G.op(x.g, y.g))


def winv(wctx: WreathContext, x: WreathElement) -> WreathElement:
    gi = wctx.G.inverse(x.g)
    return WreathElement(alpha(wctx, gi, inv(wctx.ctx, x.f)), gi)


def act_on_vertex(wctx: WreathContext, x: WreathElement, y: ExtVertex) -> ExtVertex:
    """(f, g) sends r.v to (f alpha_g(r)).(g v)."""
    ctx = wctx.ctx
    w = wctx.action.act_index(x.g, y.v)
    return ExtVertex(w, coset_canonical_mask(ctx, product(ctx, x.f, alpha(wctx, x.g, y.rep)),
                                             ctx.star_mask[w]))


def random_element(wctx: WreathContext, length: int, rng: random.Random) -> WreathElement:
    return WreathElement(random_word(wctx.ctx, length, rng), rng.randrange(wctx.G.order))


def _stab_G_edge(wctx: WreathContext, i: int, j: int) -> list[int]:
    act = wctx.action
    return [a for a in range(wctx.G.order) if act.act_index(a, i) == i and act.act_index(a, j) == j]


def edge_stabilizer(wctx: WreathContext, e: Sequence, verify_L: int | None = 2) -> dict:
    """The stabilizer of the base edge (u, v): G_u x G_v x Stab_G(e).

    Stab_G(e) fixes both endpoints.  With ``verify_L`` every pair (f, g)
    with f in the length-``verify_L`` ball is tested against both endpoints.
    """
    ctx = wctx.ctx
    gg = girth(ctx.graph)
    if not gg > 4:
        raise HypothesisError(f"edge stabilizers need girth(Gamma) > 4, got {gg}")
    ctx.require_finite()
    u, v = (ctx.vindex(t) for t in e)
    if not ctx.commute(u, v):
        raise InputError(f"{tuple(e)!r} is not an edge of Gamma")
    stab_g = _stab_G_edge(wctx, u, v)
    listed = sorted(WreathElement(normalize(ctx, [(u, a), (v, b)]), s)
                    for a in ctx.groups[u].elements() for b in ctx.groups[v].elements()
                    for s in stab_g)
    bu, bv = base_vertex(ctx, u), base_vertex(ctx, v)
    fixes = all(act_on_vertex(wctx, x, bu) == bu and act_on_vertex(wctx, x, bv) == bv for x in listed)
    expected = ctx.groups[u].order * ctx.groups[v].order * len(stab_g)
    report = {
        "edge": [ctx.vid(u), ctx.vid(v)],
        "order": len(listed),
        "expected_order": expected,
        "stab_G_edge": [wctx.G.name(s) for s in stab_g],
        "listed_elements_fix_edge": fixes,
        "elements": [wctx.format(x) for x in listed],
    }
    ok = fixes and len(listed) == expected
    if verify_L is not None:
        brute = sorted(WreathElement(f, s) for f in enumerate_ball(ctx, verify_L)
                       for s in range(wctx.G.order)
                       if act_on_vertex(wctx, WreathElement(f, s), bu) == bu
                       and act_on_vertex(wctx, WreathElement(f, s), bv) == bv)
        report["bruteforce_L"] = verify_L
        report["bruteforce_order"] = len(brute)
        report["bruteforce_match"] = brute == listed
        ok = ok and brute == listed
    report["status"] = "verified" if ok else "failed"
    return report


def parabolic_family(wctx: WreathContext) -> list[dict]:
    """One entry per vertex orbit: the subgroup generated by Stab_G(v) and the
    vertex groups of St(v), flagged infinite when the link of v has two
    non-adjacent vertices (G is finite, so that is the only source)."""
    ctx, act = wctx.ctx, wctx.action
    out = []
    seen: set = set()
    for i in range(ctx.n):
        if i in seen:
            continue
        orbit = sorted({act.act_index(a, i) for a in range(wctx.G.order)})
        seen.update(orbit)
        link = [w for w in range(ctx.n) if ctx.commute(i, w)]
        nontriv = [w for w in link if ctx.groups[w].infinite or ctx.groups[w].order > 1]
        split = any(not ctx.commute(a, b) for a in nontriv for b in nontriv if a < b)
        stab = [a for a in range(wctx.G.order) if act.act_index(a, i) == i]
        infinite = split or any(ctx.groups[w].infinite for w in link + [i])
        order = None
        if not infinite:
            order = len(stab)
            for w in link + [i]:
                order *= ctx.groups[w].order
        out.append({
            "vertex": ctx.vid(i),
            "orbit": [ctx.vid(w) for w in orbit],
            "stab_G": [wctx.G.name(a) for a in stab],
            "star": [ctx.vid(w) for w in sorted(link + [i])],
            "infinite": infinite,
            "order": order,
            "peripheral": infinite,
        })
    return out
