"""Parabolic subgroups: membership, coset and double-coset representatives,
coset intersections and the copy of the defining graph containing a set
of extension-graph vertices.

Vertex sets are given either as iterables of vertex ids or as integer
bitmasks over vertex indices (the ``*_mask`` helpers).
"""

from __future__ import annotations

from typing import Iterable, Sequence

from .errors import HypothesisError, InputError
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

__all__ = [
    "parabolic_member",
    "strip_right",
    "strip_left",
    "coset_canonical",
    "coset_canonical_mask",
    "double_coset_decompose",
    "double_coset_member",
    "coset_intersection",
    "copy_of",
    "stab_intersection",
    "stab_intersection_bruteforce",
]


def _as_mask(ctx: ProductContext, S) -> int:
    return S if isinstance(S, int) and not isinstance(S, bool) else ctx.mask(S)


def parabolic_member(ctx: ProductContext, g: Sequence, S) -> bool:
    return support_mask(normalize(ctx, g)) & ~_as_mask(ctx, S) == 0


def strip_right(ctx: ProductContext, g: Sequence, mask: int) -> tuple[list, list]:
    """Split reduced g = r * p, p in P_S maximal: p collects every syllable
    at a vertex of S that commutes past all kept syllables to its right."""
    lk = ctx.link_mask
    kept_after = 0
    kept, taken = [], []
    for s in reversed(g):
        v = s[0]
        if (mask >> v) & 1 and kept_after & ~lk[v] == 0:
            taken.append(s)
        else:
            kept.append(s)
            kept_after |= 1 << v
    kept.reverse()
    taken.reverse()
    return kept, taken


def strip_left(ctx: ProductContext, g: Sequence, mask: int) -> tuple[list, list]:
    """Split reduced g = p * r with p in P_S maximal (mirror of strip_right)."""
    lk = ctx.link_mask
    kept_before = 0
    kept, taken = [], []
    for s in g:
        v = s[0]
        if (mask >> v) & 1 and kept_before & ~lk[v] == 0:
            taken.append(s)
        else:
            kept.append(s)
            kept_before |= 1 << v
    return taken, kept


def coset_canonical_mask(ctx: ProductContext, g: Sequence, mask: int) -> NormalWord:
    """Shortest representative of g P_S; equal for g, g' iff g P_S = g' P_S."""
    kept, _ = strip_right(ctx, normalize(ctx, g), mask)
    return _canonical(ctx, kept)


def coset_canonical(ctx: ProductContext, g: Sequence, S) -> NormalWord:
    return coset_canonical_mask(ctx, g, _as_mask(ctx, S))


def double_coset_decompose(ctx: ProductContext, g: Sequence, A, B):
    """Write g = a * m * b with a in P_A, b in P_B and m as short as possible.

    Alternates left stripping by A and right stripping by B until nothing
    moves.  ``m`` is trivial exactly when g lies in P_A P_B.
    """
    am, bm = _as_mask(ctx, A), _as_mask(ctx, B)
    mid = list(normalize(ctx, g))
    left: list = []
    right: list = []
    while True:
        t1, mid = strip_left(ctx, mid, am)
        mid, t2 = strip_right(ctx, mid, bm)
        left.extend(t1)
        right[:0] = t2
        if not t1 and not t2:
            break
    return normalize(ctx, left), _canonical(ctx, mid), normalize(ctx, right)


def double_coset_member(ctx: ProductContext, g: Sequence, A, B) -> bool:
    return not double_coset_decompose(ctx, g, A, B)[1]


def coset_intersection(ctx: ProductContext, r: Sequence, A, q: Sequence, B):
    """``r P_A`` intersected with ``q P_B``: ``None`` when empty, else
    ``(k, mask)`` with the intersection equal to ``k P_mask``,
    ``mask = A & B`` and ``k`` coset-canonical."""
    am, bm = _as_mask(ctx, A), _as_mask(ctx, B)
    a, m, _ = double_coset_decompose(ctx, product(ctx, inv(ctx, r), q), am, bm)
    if m:
        return None
    both = am & bm
    return coset_canonical_mask(ctx, mul(ctx, r, a), both), both


def copy_of(ctx: ProductContext, points: Iterable[tuple[int, Sequence]]):
    """The copies g.Gamma containing every given extension-graph vertex.

    A vertex ``(v, r)`` lies in g.Gamma iff g is in r P_St(v), so the set of
    such g is a single coset k P_K.  Returns ``(k, K)`` with K a vertex
    bitmask (the copy is unique modulo P_K), or ``None`` when no copy holds
    them all.
    """
    k: Sequence = IDENTITY
    mask = ctx.full_mask
    for v, r in points:
        got = coset_intersection(ctx, k, mask, r, ctx.star_mask[v])
        if got is None:
            return None
        k, mask = got
    return k, mask


def stab_intersection(ctx: ProductContext, a, b, verify_L: int | None = None) -> dict:
    """Stab(G_a) meet Stab(G_b) for distinct base vertices when girth > 4.

    The meet is P_(St(a) & St(b)): G_a x G_b for adjacent vertices, G_c for
    the unique common neighbour c at distance 2, trivial beyond.  With
    ``verify_L`` the element list is compared with every element of the
    length-``verify_L`` ball normalizing both vertex groups.
    """
    from .core_graph import bfs_distance, girth

    gg = girth(ctx.graph)
    if not gg > 4:
        raise HypothesisError(f"stabilizer meet needs girth(Gamma) > 4, got {gg}")
    ai, bi = ctx.vindex(a), ctx.vindex(b)
    if ai == bi:
        raise InputError("stabilizer meet needs two distinct vertices")
    ctx.require_finite()
    d = bfs_distance(ctx.graph, ctx.vid(ai), ctx.vid(bi))
    meet = ctx.star_mask[ai] & ctx.star_mask[bi]
    verts = [i for i in range(ctx.n) if (meet >> i) & 1]
    elements = enumerate_ball(ctx, len(verts), vertices=verts) if verts else [IDENTITY]
    case = "adjacent" if d == 1 else "distance-2" if d == 2 else "far"
    expected = 1
    for v in verts:
        expected *= ctx.groups[v].order
    report = {
        "a": ctx.vid(ai),
        "b": ctx.vid(bi),
        "distance": d,
        "case": case,
        "support": [ctx.vid(v) for v in verts],
        "order": len(elements),
        "expected_order": expected,
        "elements": [ctx.format(g) for g in elements],
        "girth": gg,
    }
    if verify_L is not None:
        brute = stab_intersection_bruteforce(ctx, ai, bi, verify_L)
        report["bruteforce_L"] = verify_L
        report["bruteforce_order"] = len(brute)
        report["bruteforce_match"] = sorted(brute) == sorted(elements)
    return report


def _normalizes_vertex_group(ctx: ProductContext, g: NormalWord, x: int) -> bool:
    if not g:
        return True
    gi = inv(ctx, g)
    for a in ctx.groups[x].nontrivial():
        c = product(ctx, g, [(x, a)], gi)
        if support_mask(c) != 1 << x:
            return False
    return True


def stab_intersection_bruteforce(ctx: ProductContext, a, b, L: int) -> list[NormalWord]:
    """Elements of the length-L ball normalizing both G_a and G_b."""
    ai, bi = ctx.vindex(a), ctx.vindex(b)
    if ctx.groups[ai].order < 2 or ctx.groups[bi].order < 2:
        raise InputError("stabilizers need non-trivial vertex groups")
    return [g for g in enumerate_ball(ctx, L)
            if _normalizes_vertex_group(ctx, g, ai) and _normalizes_vertex_group(ctx, g, bi)]
