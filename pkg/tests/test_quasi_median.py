"""Cayley balls, hyperplanes, crossing and contact graphs, and the map F."""

import itertools
import random

import pytest

from conftest import make_ctx
from gpwb.core_graph import SimplicialGraph, cycle_graph, girth, path_graph
from gpwb.errors import InputError
from gpwb.extension_graph import base_vertex, build_window, parse_vertex, sample_geodesics
from gpwb.graph_product import IDENTITY, inv, mul
from gpwb.quasi_median import (
    build_cayley_ball,
    coned_off_geodesic_decompose,
    coned_off_window,
    contact_delta,
    contact_graph,
    crossing_graph,
    hyperplanes,
    verify_iso,
)


def check_ball_edges(ball):
    ctx = ball.ctx
    for i, j, v in ball.edges:
        d = mul(ctx, inv(ctx, ball.elements[i]), ball.elements[j])
        assert len(d) == 1 and d[0][0] == v and d[0][1] != 0


def test_ball_examples(edge_z2, iso_z2):
    b0 = build_cayley_ball(edge_z2, 0)
    assert b0.elements == [IDENTITY] and b0.edges == []
    sq = build_cayley_ball(edge_z2, 2)
    assert len(sq) == 4 and len(sq.edges) == 4
    g = SimplicialGraph(range(4), [(i, j) for i, j, _ in sq.edges])
    assert girth(g) == 4
    line = build_cayley_ball(iso_z2, 3)
    assert len(line) == 7 and len(line.edges) == 6
    degs = sorted(sum(t in e[:2] for e in line.edges) for t in range(7))
    assert degs == [1, 1, 2, 2, 2, 2, 2]
    check_ball_edges(sq)
    check_ball_edges(build_cayley_ball(make_ctx(cycle_graph(5), 3), 2))
    with pytest.raises(InputError):
        build_cayley_ball(edge_z2, -1)


def test_square_hyperplanes(edge_z2):
    sq = build_cayley_ball(edge_z2, 2)
    hs = hyperplanes(sq)
    assert len(hs.planes) == 2 and hs.well_defined
    for h in hs.planes:
        assert len(h.edges) == 2
        (a, b), (c, d) = (sq.edges[e][:2] for e in h.edges)
        assert not {a, b} & {c, d}
    assert len(crossing_graph(sq).edges) == 1
    assert len(contact_graph(sq).edges) == 1


def test_triangle_is_one_class():
    ctx = make_ctx(SimplicialGraph(["z"]), 3)
    ball = build_cayley_ball(ctx, 1)
    assert len(ball) == 3 and len(ball.edges) == 3
    hs = hyperplanes(ball)
    assert len(hs.planes) == 1 and len(hs.planes[0].edges) == 3


def test_dihedral_line(iso_z2):
    ball = build_cayley_ball(iso_z2, 3)
    hs = hyperplanes(ball)
    assert len(hs.planes) == 6
    assert crossing_graph(ball).edges == ()
    cx = contact_graph(ball)
    assert len(cx) == 6 and len(cx.edges) == 5 and girth(cx) == float("inf")
    assert contact_delta(ball) == 0


def test_classes_partition_edges(p3_z2):
    ball = build_cayley_ball(p3_z2, 3)
    hs = hyperplanes(ball)
    seen = sorted(e for h in hs.planes for e in h.edges)
    assert seen == list(range(len(ball.edges)))
    # edges inside one vertex-group coset always share a class
    z3 = make_ctx(path_graph(["u", "v"]), 3)
    b = build_cayley_ball(z3, 2)
    h = hyperplanes(b)
    for (e1, (i1, j1, v1)), (e2, (i2, j2, v2)) in itertools.combinations(enumerate(b.edges), 2):
        if v1 == v2 and {i1, j1} & {i2, j2}:
            assert h.edge_class[e1] == h.edge_class[e2]


def test_crossing_implies_gamma_edge(p3_z2, c5_z2):
    for ctx, r in ((p3_z2, 4), (c5_z2, 3)):
        ball = build_cayley_ball(ctx, r)
        hs = hyperplanes(ball)
        for a, b in hs.crossings:
            assert ctx.commute(hs.planes[a].label, hs.planes[b].label)
        assert all(h.image.v == h.label for h in hs.planes)


def test_verify_iso_edge(edge_z2):
    rep = verify_iso(edge_z2, build_cayley_ball(edge_z2, 2), build_window(edge_z2, 1))
    assert rep["status"] == "verified"
    assert rep["hyperplanes"] == 2 and rep["injective"]
    assert rep["crossing_vs_extension"]["checked"] == 1


def test_verify_iso_single_vertex():
    ctx = make_ctx(SimplicialGraph(["z"]))
    rep = verify_iso(ctx, build_cayley_ball(ctx, 2), build_window(ctx, 1))
    assert rep["status"] == "verified" and rep["hyperplanes"] == 1
    assert len(build_window(ctx, 1).edges) == 0


def test_verify_iso_p3(p3_z2):
    rep = verify_iso(p3_z2, build_cayley_ball(p3_z2, 4), build_window(p3_z2, 2))
    assert rep["status"] == "verified"
    assert rep["interior_hyperplanes"] > 0
    assert rep["crossing_vs_extension"]["checked"] > 0
    assert rep["contact_vs_coned"]["checked"] > 0


def test_verify_iso_c5(c5_z2):
    rep = verify_iso(c5_z2, build_cayley_ball(c5_z2, 3), build_window(c5_z2, 2))
    assert rep["status"] == "verified"


def test_verify_iso_mismatch(p3_z2, edge_z2):
    with pytest.raises(InputError):
        verify_iso(p3_z2, build_cayley_ball(edge_z2, 1), build_window(p3_z2, 1))


def test_coned_off_window(p3_z2, c21_z2):
    win = build_window(p3_z2, 2)
    cg = coned_off_window(p3_z2, win)
    plain = {frozenset(e) for e in win.to_graph().edge_indices}
    coned = {frozenset(e) for e in cg.edge_indices}
    assert plain <= coned
    w = build_window(c21_z2, 1)
    base = [w.index[base_vertex(c21_z2, f"v{i}")] for i in range(21)]
    ptr, idx = w.coned
    for a in base:
        assert set(base) - {a} <= set(int(t) for t in idx[ptr[a]:ptr[a + 1]])


def test_coned_geodesic_examples(p3_z2, c21_family, c21_z2):
    win, nxt = build_window(p3_z2, 2), build_window(p3_z2, 3)
    p = [base_vertex(p3_z2, "u"), base_vertex(p3_z2, "v"), parse_vertex(p3_z2, "u@w:1")]
    rep = coned_off_geodesic_decompose(p3_z2, win, p, nxt)
    assert rep["coned_distance"] <= 2 and rep["status"] == "verified"
    q = [base_vertex(c21_z2, f"v{i}") for i in range(6)]
    rep = coned_off_geodesic_decompose(c21_z2, c21_family.window(1), q, c21_family.window(2))
    assert rep["coned_distance"] == 1 and rep["marks"] == [0, 5]
    for p in sample_geodesics(c21_z2, 20, random.Random(6), c21_family, L_src=0, L_geo=1):
        rep = coned_off_geodesic_decompose(c21_z2, c21_family.window(1), p, c21_family.window(2))
        assert rep["coned_distance"] <= len(p) - 1
        assert rep["hausdorff"] <= 1


def test_ball_dot(edge_z2):
    dot = build_cayley_ball(edge_z2, 2).to_dot()
    assert dot.count("--") == 4 and "color=" in dot
