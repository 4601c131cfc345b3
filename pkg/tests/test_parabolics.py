"""Parabolic membership, coset and double-coset canonicalization, stabilizer meets."""

import itertools

import pytest

from conftest import make_ctx
from gpwb.core_graph import cycle_graph
from gpwb.errors import HypothesisError, InputError
from gpwb.graph_product import IDENTITY, enumerate_ball, inv, mul, normalize, product, random_word, support
from gpwb.parabolics import (
    coset_canonical,
    coset_intersection,
    copy_of,
    double_coset_decompose,
    double_coset_member,
    parabolic_member,
    stab_intersection,
)


def star_of(ctx, v):
    return {v} | set(ctx.graph.neighbors(v))


def brute_coset_rep(ctx, g, S, P):
    """Shortest, then lex-least, element of g P_S over the enumerated part of P_S."""
    return min((mul(ctx, g, p) for p in P), key=lambda w: (len(w), w))


def test_member_examples(p3_z2):
    S = star_of(p3_z2, "u")
    assert parabolic_member(p3_z2, IDENTITY, S)
    assert parabolic_member(p3_z2, p3_z2.parse("v:1"), S)
    assert not parabolic_member(p3_z2, p3_z2.parse("w:1"), S)


def test_member_closed_under_products(c21_z3, rng):
    S = star_of(c21_z3, "v4")
    P = enumerate_ball(c21_z3, 3, vertices=S)
    for _ in range(200):
        x, y = rng.choice(P), rng.choice(P)
        assert parabolic_member(c21_z3, mul(c21_z3, x, y), S)
        assert parabolic_member(c21_z3, inv(c21_z3, x), S)


def test_coset_examples(p3_z2):
    S = star_of(p3_z2, "u")
    assert coset_canonical(p3_z2, p3_z2.parse("u:1 v:1"), S) == IDENTITY
    c = p3_z2.parse("w:1")
    assert coset_canonical(p3_z2, c, S) == c


@pytest.mark.parametrize("fixture,L,Lp", [("p3_z2", 3, 4), ("c5_z2", 3, 3), ("c21_z3", 2, 3)])
def test_coset_canonical_matches_bruteforce(request, fixture, L, Lp):
    ctx = request.getfixturevalue(fixture)
    ball = enumerate_ball(ctx, L)
    for v in ctx.graph.vertices[:3]:
        S = star_of(ctx, v)
        P = enumerate_ball(ctx, Lp, vertices=S)
        for g in ball:
            r = coset_canonical(ctx, g, S)
            assert r == brute_coset_rep(ctx, g, S, P)
            assert coset_canonical(ctx, r, S) == r
            assert parabolic_member(ctx, mul(ctx, inv(ctx, g), r), S)
            for p in P[:20]:
                assert coset_canonical(ctx, mul(ctx, g, p), S) == r


def test_double_coset_examples(p3_z2):
    S, T = star_of(p3_z2, "u"), star_of(p3_z2, "w")
    assert double_coset_member(p3_z2, IDENTITY, S, T)
    assert double_coset_member(p3_z2, p3_z2.parse("u:1"), S, T)
    assert double_coset_member(p3_z2, p3_z2.parse("v:1"), S, T)
    assert double_coset_member(p3_z2, p3_z2.parse("u:1 w:1"), S, T)
    assert not double_coset_member(p3_z2, p3_z2.parse("w:1 u:1"), S, T)


@pytest.mark.parametrize("fixture,L,Lp", [("p3_z2", 3, 3), ("c21_z2", 3, 3)])
def test_double_coset_matches_bruteforce(request, fixture, L, Lp):
    ctx = request.getfixturevalue(fixture)
    ball = enumerate_ball(ctx, L)
    vs = ctx.graph.vertices
    pairs = [(vs[0], vs[1]), (vs[0], vs[2])] if ctx.n > 3 else [("u", "w"), ("u", "v")]
    for a, b in pairs:
        S, T = star_of(ctx, a), star_of(ctx, b)
        PS = enumerate_ball(ctx, Lp, vertices=S)
        PT = enumerate_ball(ctx, Lp, vertices=T)
        reach = {mul(ctx, s, t) for s in PS for t in PT}
        for g in ball:
            x, m, y = double_coset_decompose(ctx, g, S, T)
            assert product(ctx, x, m, y) == g
            assert parabolic_member(ctx, x, S) and parabolic_member(ctx, y, T)
            assert double_coset_member(ctx, g, S, T) == (g in reach)


def test_coset_intersection_and_copy(c21_z2, rng):
    ctx = c21_z2
    St = [ctx.star_mask[i] for i in range(ctx.n)]
    ball = enumerate_ball(ctx, 2)
    P = {i: enumerate_ball(ctx, 2, vertices=[ctx.vid(j) for j in range(ctx.n) if St[i] >> j & 1])
         for i in range(4)}
    for _ in range(150):
        r, q = rng.choice(ball), rng.choice(ball)
        i, j = rng.randrange(4), rng.randrange(4)
        got = coset_intersection(ctx, r, St[i], q, St[j])
        left = {coset_canonical(ctx, mul(ctx, r, p), St[i] & St[j]) for p in P[i]}
        right = {coset_canonical(ctx, mul(ctx, q, p), St[i] & St[j]) for p in P[j]}
        if got is None:
            # no common element among the enumerated parts
            assert not ({mul(ctx, r, p) for p in P[i]} & {mul(ctx, q, p) for p in P[j]})
        else:
            k, m = got
            assert m == St[i] & St[j]
            assert parabolic_member(ctx, mul(ctx, inv(ctx, r), k), St[i])
            assert parabolic_member(ctx, mul(ctx, inv(ctx, q), k), St[j])
    # a base vertex and its neighbour share the base copy
    k, m = copy_of(ctx, [(0, IDENTITY), (1, IDENTITY)])
    assert k == IDENTITY and m == St[0] & St[1]


def test_conjugate_support_corollary(c21_z3, rng):
    ctx = c21_z3
    for _ in range(500):
        v = rng.randrange(ctx.n)
        g = normalize(ctx, random_word(ctx, rng.randrange(8), rng))
        c = product(ctx, g, [(v, 1)], inv(ctx, g))
        if len(c) == 1:
            assert c[0][0] == v
            assert support(ctx, g) <= star_of(ctx, ctx.vid(v))


@pytest.mark.parametrize("a,b,case,order", [("v0", "v1", "adjacent", 4),
                                            ("v0", "v2", "distance-2", 2),
                                            ("v0", "v3", "far", 1)])
def test_stab_intersection_z2(c21_z2, a, b, case, order):
    rep = stab_intersection(c21_z2, a, b, verify_L=3)
    assert rep["case"] == case and rep["order"] == order == rep["expected_order"]
    assert rep["bruteforce_match"]


def test_stab_intersection_z3(c21_z3):
    assert stab_intersection(c21_z3, "v5", "v6", verify_L=3)["order"] == 9
    rep = stab_intersection(c21_z3, "v5", "v7", verify_L=3)
    assert rep["order"] == 3 and rep["support"] == ["v6"] and rep["bruteforce_match"]


def test_stab_intersection_errors(c21_z2):
    with pytest.raises(HypothesisError):
        stab_intersection(make_ctx(cycle_graph(4)), "v0", "v1")
    with pytest.raises(InputError):
        stab_intersection(c21_z2, "v0", "v0")
