"""Extension-graph windows and the geometric checkers built on them."""

import itertools
import random

import numpy as np
import pytest

from conftest import make_ctx
from gpwb.core_graph import INF, SimplicialGraph, cycle_graph, path_graph, star_graph, subdivide
from gpwb.errors import BudgetExceeded, HypothesisError, InputError, VerificationFailure
from gpwb.extension_graph import (
    CopyTools,
    TruncatedWindow,
    WindowFamily,
    adjacent,
    adjacent_direct,
    adjacent_fast,
    asdim_cover,
    base_vertex,
    bfs_base_distance,
    bigon_decomposition,
    build_window,
    build_window_pairwise,
    check_bigon_witness,
    check_greenlinger_witness,
    check_triangle_witness,
    copy_circuit,
    copy_segmentation,
    copy_vertex,
    cover_disjointness_check,
    doubling_census,
    ext_vertex,
    fineness_census,
    fineness_function,
    format_vertex,
    girth_check,
    greenlinger_witness,
    in_common_copy,
    in_copy,
    is_admissible,
    neighbors_in_window,
    parse_vertex,
    plane_count_check,
    plane_visits,
    same_copy,
    sample_bigons,
    sample_geodesics,
    sample_triangles,
    tightness_constants,
    tightness_sample_check,
    triangle_decomposition,
    window_delta,
    window_distance,
)
from gpwb.graph_product import IDENTITY, enumerate_ball, mul, product
from gpwb.groups import cyclic
from gpwb.graph_product import ProductContext


def V(ctx, text):
    return parse_vertex(ctx, text)


# -- vertices and adjacency ------------------------------------------------------
def test_vertex_io_roundtrip(c21_z2):
    x = V(c21_z2, "v3@v5:1 v2:1")
    assert parse_vertex(c21_z2, format_vertex(c21_z2, x)) == x
    # v2 is in St(v3) and sits on the right, so the coset absorbs it
    assert x == V(c21_z2, "v3@v5:1")
    assert V(c21_z2, "v3") == base_vertex(c21_z2, "v3")


def test_adjacency_examples(p3_z2):
    gu, gv = base_vertex(p3_z2, "u"), base_vertex(p3_z2, "v")
    cu = V(p3_z2, "u@w:1")
    assert adjacent(p3_z2, gu, gv) and adjacent(p3_z2, gu, gv, "direct")
    assert adjacent(p3_z2, cu, gv) and adjacent_direct(p3_z2, cu, gv)
    assert cu != gu
    assert not adjacent(p3_z2, cu, gu) and not adjacent_direct(p3_z2, cu, gu)
    with pytest.raises(InputError):
        adjacent(p3_z2, gu, gv, "magic")


def _small_contexts():
    tri_tail = SimplicialGraph(["a", "b", "c", "d"], [("a", "b"), ("b", "c"), ("a", "c"), ("c", "d")])
    p4 = path_graph(["p", "q", "r", "s"])
    return [
        ("P3/Z2", make_ctx(path_graph(["u", "v", "w"])), 3),
        ("C5/Z2", make_ctx(cycle_graph(5)), 2),
        ("P4/mixed", ProductContext(p4, {"default": cyclic(2), "q": cyclic(3)}), 2),
        ("triangle+tail", make_ctx(tri_tail), 2),
        ("C4/Z2", make_ctx(cycle_graph(4)), 2),
    ]


@pytest.mark.parametrize("name,ctx,L", _small_contexts(), ids=lambda v: v if isinstance(v, str) else "")
def test_window_matches_pairwise_constructions(name, ctx, L):
    win = build_window(ctx, L)
    fast = build_window_pairwise(ctx, L, "fast")
    direct = build_window_pairwise(ctx, L, "direct")
    coned = build_window_pairwise(ctx, L, coned=True)
    assert win.vertices == fast.vertices
    E = lambda w, c=False: {tuple(sorted(map(int, e))) for e in w.to_graph(c).edge_indices}
    assert E(win) == E(fast) == E(direct)
    assert E(win, True) == E(coned, True)


def test_window_zero_is_base_graph(c5_z2):
    win = build_window(c5_z2, 0)
    assert len(win) == 5
    g = win.to_graph()
    assert len(g.edges) == 5
    assert isinstance(win, TruncatedWindow)
    single = make_ctx(SimplicialGraph(["z"]))
    assert len(build_window(single, 3)) == 1


def test_leaf_and_centre_links(p3_z2):
    gu, gv = base_vertex(p3_z2, "u"), base_vertex(p3_z2, "v")
    sizes = []
    for L in range(0, 5):
        win = build_window(p3_z2, L)
        assert neighbors_in_window(win, gu) == [gv]
        sizes.append(len(win.neighbors(gv)))
    assert all(a < b for a, b in zip(sizes, sizes[1:]))


def test_window_distance_examples(p3_z2, c21_z2):
    x, y = base_vertex(c21_z2, "v0"), base_vertex(c21_z2, "v11")
    assert window_distance(c21_z2, x, y) == (10, True)
    assert window_distance(c21_z2, x, x) == (0, True)
    d, cert = window_distance(p3_z2, V(p3_z2, "u@w:1"), base_vertex(p3_z2, "u"), (1, 2, 3))
    assert (d, cert) == (2, True)


def test_window_export(p3_z2):
    win = build_window(p3_z2, 1)
    js = win.to_json()
    assert len(js["vertices"]) == len(win)
    assert win.to_dot().count("--") == len(win.edges)


def test_window_cap(c21_z2):
    with pytest.raises(BudgetExceeded):
        build_window(c21_z2, 2, cap=1000)
    with pytest.raises(BudgetExceeded):
        WindowFamily(c21_z2, 1).window(2)


# -- properties of the windows ---------------------------------------------------
def test_convexity_of_base_copy(c21_family, c21_z2):
    win = c21_family.window(2)
    for a, b in [("v0", "v10"), ("v0", "v11"), ("v3", "v9"), ("v5", "v15")]:
        x, y = base_vertex(c21_z2, a), base_vertex(c21_z2, b)
        for path in win.geodesics(x, y):
            assert all(z.rep == IDENTITY for z in path)


def test_copy_intersection_diameter(c21_z2):
    ball = enumerate_ball(c21_z2, 2)
    rng = random.Random(3)
    for _ in range(300):
        g, h = rng.choice(ball), rng.choice(ball)
        if same_copy(c21_z2, g, h):
            continue
        common = [w for w in range(c21_z2.n) if copy_vertex(c21_z2, g, w) == copy_vertex(c21_z2, h, w)]
        diam = max((bfs_base_distance(c21_z2, a, b) for a in common for b in common), default=0)
        assert diam <= 2


def test_stabilizer_distance(c21_family, c21_z2):
    """Two vertices fixed by a common non-trivial element are within 4."""
    win1 = c21_family.window(1)
    ball = enumerate_ball(c21_z2, 2)[1:]
    rng = random.Random(5)
    checked = 0
    for g in rng.sample(ball, 60):
        fixed = [x for x in win1.vertices if ext_vertex(c21_z2, x.v, mul(c21_z2, g, x.rep)) == x]
        for a, b in itertools.combinations(fixed[:8], 2):
            d, cert = c21_family.distance(a, b)
            assert cert and d <= 4
            checked += 1
    assert checked > 0


def test_window_delta_does_not_grow(c21_family):
    rng = random.Random(1)
    deltas = [window_delta(c21_family.window(L), rng, 3000) for L in (1, 2)]
    assert all(d < INF for d in deltas)
    assert deltas[1] <= 11


# -- girth, doubling, fineness -------------------------------------------------------
def test_girth_check_c21(c21_family, c21_z2):
    rep = girth_check(c21_z2, window=c21_family.window(2), n_max=21)
    assert rep["min_circuit_length"] == 21 and rep["status"] == "verified"
    assert rep["girth_circuits_in_one_copy"]


def test_girth_check_tree_and_c25():
    tree = make_ctx(subdivide(star_graph(3), 1))
    rep = girth_check(tree, L=2, n_max=8)
    assert rep["min_circuit_length"] == INF and rep["status"] == "verified"
    c25 = make_ctx(cycle_graph(25), 3)
    rep = girth_check(c25, L=1, n_max=25)
    assert rep["min_circuit_length"] == 25 and rep["status"] == "verified"
    with pytest.raises(InputError):
        girth_check(c25, L=1, n_max=5)


@pytest.mark.parametrize("order", [2, 3, 5])
def test_doubling_census(order):
    ctx = make_ctx(cycle_graph(21), order)
    assert doubling_census(ctx, "v7", L=1) == order


def test_doubling_hypotheses():
    with pytest.raises(HypothesisError):
        doubling_census(make_ctx(cycle_graph(7)), "v0")
    with pytest.raises(HypothesisError):
        doubling_census(make_ctx(path_graph(list("abc"))), "b")


def test_fineness_census(c21_family, c21_z2):
    assert fineness_census(c21_z2, ("v0", "v1"), 20, (1, 2), family=c21_family)["count"] == 0
    rep = fineness_census(c21_z2, ("v0", "v1"), 21, (1, 2, 3), family=c21_family)
    # copies through the edge (u, v) are g.Gamma with g in G_u x G_v
    assert rep["counts"] == {1: 3, 2: 4, 3: 4}
    assert rep["status"] == "stabilized-at-budget" and rep["count"] == 4


def test_fineness_function():
    k4 = subdivide(SimplicialGraph(list("abcd"), itertools.combinations("abcd", 2)), 0)
    assert fineness_function(k4, 3, "circuits") == 2
    assert fineness_function(k4, 4, "circuits") == 4
    assert fineness_function(k4, 4) == 4
    assert fineness_function(cycle_graph(21), 20) == 0
    assert fineness_function(cycle_graph(21), 21) == 21
    with pytest.raises(InputError):
        fineness_function(k4, 3, "edges")


# -- admissibility ------------------------------------------------------------------
def test_geodesics_are_admissible(c21_family, c21_z2):
    rng = random.Random(9)
    for p in sample_geodesics(c21_z2, 30, rng, c21_family):
        marks = copy_segmentation(c21_z2, p)
        assert is_admissible(c21_z2, p, marks, c21_family.distance) is True


def test_admissibility_failures(c21_z2, c21_family):
    b = lambda i: base_vertex(c21_z2, f"v{i}")
    # backtracking inside the base copy
    p = [b(0), b(1), b(2), b(1), b(20)]
    assert is_admissible(c21_z2, p, [0, 2, 4], c21_family.distance) is False
    # two geodesic segments in one common copy, joint marked
    p = [b(i) for i in range(6)]
    assert is_admissible(c21_z2, p, [0, 3, 5], c21_family.distance) is False
    with pytest.raises(InputError):
        is_admissible(c21_z2, p, [1, 5], c21_family.distance)


# -- bigons -------------------------------------------------------------------------
def test_bigon_in_one_copy(c21_z2):
    arc = [base_vertex(c21_z2, f"v{i}") for i in range(11)]
    other = [base_vertex(c21_z2, "v0")] + [base_vertex(c21_z2, f"v{i}") for i in range(20, 9, -1)]
    w = bigon_decomposition(c21_z2, arc, other)
    assert len(w.copies) == 1 and check_bigon_witness(c21_z2, arc, other, w) == []
    with pytest.raises(InputError):
        bigon_decomposition(c21_z2, arc, arc)


def test_sampled_bigons_z2(c21_family, c21_z2):
    rng = random.Random(11)
    bigons = sample_bigons(c21_z2, 60, rng, c21_family)
    assert len(bigons) == 60
    tools = CopyTools(c21_z2)
    multi = 0
    for p, q in bigons:
        w = bigon_decomposition(c21_z2, p, q, tools=tools)
        assert check_bigon_witness(c21_z2, p, q, w) == []
        multi += len(w.copies) > 1
    assert multi > 0


def test_sampled_bigons_z3(c21_z3):
    fam = WindowFamily(c21_z3, 2)
    bigons = sample_bigons(c21_z3, 20, random.Random(2), fam, L_src=0, L_geo=2)
    assert bigons
    for p, q in bigons:
        w = bigon_decomposition(c21_z3, p, q)
        assert check_bigon_witness(c21_z3, p, q, w) == []


def test_corrupted_bigon_witness_rejected(c21_family, c21_z2):
    p, q = next((p, q) for p, q in sample_bigons(c21_z2, 40, random.Random(4), c21_family)
                if len(bigon_decomposition(c21_z2, p, q).copies) > 1)
    w = bigon_decomposition(c21_z2, p, q)
    bad = type(w)(list(w.xs), list(w.ys), [w.copies[0]] * len(w.copies))
    assert check_bigon_witness(c21_z2, p, q, bad)
    bad = type(w)([0, len(p) - 1], [0, len(q) - 1], [w.copies[0]])
    assert check_bigon_witness(c21_z2, p, q, bad)


# -- triangles ----------------------------------------------------------------------
def test_triangle_in_one_copy(c21_family, c21_z2):
    cyc = copy_circuit(c21_z2, IDENTITY)
    p, q = cyc[0:7], cyc[6:14]
    r = [cyc[(-t) % 21] for t in range(0, 9)]
    w = triangle_decomposition(c21_z2, p, q, r)
    assert (w.n, w.m, w.l) == (0, 0, 0)
    assert check_triangle_witness(c21_z2, p, q, r, w) == []


def test_sampled_triangles(c21_family, c21_z2):
    rng = random.Random(21)
    bigons = sample_bigons(c21_z2, 30, rng, c21_family)
    loops = [p + list(reversed(q))[1:-1] for p, q in bigons]
    loops += [copy_circuit(c21_z2, g) for g in enumerate_ball(c21_z2, 1)[:6]]
    tris = sample_triangles(c21_z2, 30, rng, c21_family, loops)
    assert len(tris) == 30
    tools = CopyTools(c21_z2)
    shapes = set()
    for p, q, r in tris:
        w = triangle_decomposition(c21_z2, p, q, r, tools=tools)
        assert check_triangle_witness(c21_z2, p, q, r, w) == []
        shapes.add((w.n, w.m, w.l))
    assert len(shapes) > 1
    # a witness whose central copy is moved elsewhere is rejected
    p, q, r = tris[0]
    w = triangle_decomposition(c21_z2, p, q, r, tools=tools)
    w.k = product(c21_z2, w.k, [(c21_z2.vindex("v10"), 1), (c21_z2.vindex("v12"), 1)])
    assert check_triangle_witness(c21_z2, p, q, r, w)


def test_triangle_precondition(c21_z2):
    cyc = copy_circuit(c21_z2, IDENTITY)
    with pytest.raises(InputError):
        triangle_decomposition(c21_z2, cyc[0:3], cyc[2:3], cyc[0:3])


# -- Greenlinger ----------------------------------------------------------------------
def test_greenlinger_girth_circuit(c21_z2):
    g = V(c21_z2, "v0@v5:1 v9:1").rep
    cyc = copy_circuit(c21_z2, g)
    w = greenlinger_witness(c21_z2, cyc)
    assert w.a == w.b and w.length == 21
    assert check_greenlinger_witness(c21_z2, cyc, w) == []


def test_greenlinger_detours(c21_family, c21_z2):
    bigons = sample_bigons(c21_z2, 40, random.Random(8), c21_family)
    found = 0
    for p, q in bigons:
        loop = p + list(reversed(q))[1:-1]
        w = greenlinger_witness(c21_z2, loop)
        assert check_greenlinger_witness(c21_z2, loop, w) == []
        assert w.d_ab <= 4
        found += w.a != w.b
    assert found > 0


def test_greenlinger_rejects_non_circuit(c21_z2):
    with pytest.raises(InputError):
        greenlinger_witness(c21_z2, [base_vertex(c21_z2, "v0"), base_vertex(c21_z2, "v1")])


# -- planes ---------------------------------------------------------------------------
def test_plane_visits_single_copy(c21_z2):
    p = [base_vertex(c21_z2, f"v{i}") for i in range(9)]
    visits = plane_visits(c21_z2, p, 3)
    assert [(k, lo, hi) for k, lo, hi in visits] == [(IDENTITY, 0, 8)]
    assert plane_count_check(c21_z2, p, 0, 4)[1] == 6
    with pytest.raises(InputError):
        plane_visits(c21_z2, p, 2)


def test_plane_bound_on_samples(c21_family, c21_z2):
    geos = sample_geodesics(c21_z2, 40, random.Random(13), c21_family, min_len=6)
    assert geos
    for p in geos:
        visits = plane_visits(c21_z2, p, 3)
        for k in range(6):
            for c in range(len(p)):
                cnt, bound, ok = plane_count_check(c21_z2, p, k, c, visits)
                assert ok and bound == 2 * (k + 1) + 4


# -- tightness -----------------------------------------------------------------------
def test_tightness_constants():
    assert tightness_constants(1, 0, lambda n: 1) == (99, 99, 24)
    # hand substitution at k=2, delta=1, f(56)=3, f(64)=5
    P0, P1, k1 = tightness_constants(2, 1, {56: 3, 64: 5})
    assert P0 == 5 + 2 * 7 * 18 * 3 and P1 == 5 + 2 * 9 * 22 * 5 and k1 == 37
    with pytest.raises(InputError):
        tightness_constants(1, 0, {})


def test_tightness_sample(c21_family, c21_z2):
    rng = random.Random(17)
    geos = sample_geodesics(c21_z2, 15, rng, c21_family, min_len=4)
    pairs = [(p[0], p[-1]) for p in geos]
    P0, _, _ = tightness_constants(2, 5, lambda n: fineness_function(c21_z2.graph, n))
    rep = tightness_sample_check(c21_family, pairs, 2, P0)
    assert rep["status"] == "verified" and rep["checked"] > 0


# -- asymptotic dimension cover --------------------------------------------------------------
def test_asdim_R0_is_singleton(c21_family, c21_z2):
    o = base_vertex(c21_z2, "v0")
    cover = asdim_cover(c21_z2, o, 0, window=c21_family.window(2))
    hat0 = [i for i in cover.X if cover.hat[i] == 0]
    assert [cover.window.vertices[i] for i in hat0] == [o]
    assert cover.pieces[(0, IDENTITY)] == hat0


@pytest.mark.parametrize("R", [0, 1])
def test_asdim_pieces_in_copies(c21_family, c21_z2, R):
    o = base_vertex(c21_z2, "v0")
    cover = asdim_cover(c21_z2, o, R, window=c21_family.window(2))
    for (k, g), idx in cover.pieces.items():
        assert all(in_copy(c21_z2, cover.window.vertices[i], g) for i in idx)
    rep = cover_disjointness_check(cover, 2)
    assert rep["status"] == "verified"
    assert rep["segmentation_mismatches"] == 0


def test_asdim_rejects_outside_root(c21_family, c21_z2):
    far = V(c21_z2, "v0@v5:1 v9:1 v13:1")
    with pytest.raises(InputError):
        asdim_cover(c21_z2, far, 1, window=c21_family.window(2))
