"""Graph primitives, with networkx as an independent oracle where it helps."""

import itertools
import random
from fractions import Fraction

import numpy as np
import pytest

from gpwb import _kernels
from gpwb.core_graph import (
    INF,
    SimplicialGraph,
    canonical_circuit,
    circuits_through,
    complete_graph,
    cycle_graph,
    distance_matrix,
    estimate_delta,
    geodesic_spanning_tree,
    geodesics,
    girth,
    gromov_product,
    link,
    path_graph,
    star,
    star_graph,
    subdivide,
    bfs_distance,
)
from gpwb.errors import BudgetExceeded, InputError

nx = pytest.importorskip("networkx")


def random_graph(n, p, seed):
    r = random.Random(seed)
    vs = [f"x{i:02d}" for i in range(n)]
    es = [(a, b) for a, b in itertools.combinations(vs, 2) if r.random() < p]
    return SimplicialGraph(vs, es)


def to_nx(g):
    h = nx.Graph()
    h.add_nodes_from(g.vertices)
    h.add_edges_from(g.edges)
    return h


def test_rejects_loops_and_unknown_vertices():
    with pytest.raises(InputError):
        SimplicialGraph(["a"], [("a", "a")])
    with pytest.raises(InputError):
        SimplicialGraph(["a"], [("a", "b")])


def test_link_and_star():
    g = path_graph(["u", "v", "w"])
    assert link(g, "v") == {"u", "w"}
    assert star(g, "v") == {"u", "v", "w"}
    assert link(SimplicialGraph(["z"]), "z") == frozenset()
    c = cycle_graph(21)
    assert link(c, "v0") == {"v1", "v20"}


def test_girth_examples():
    assert girth(cycle_graph(21)) == 21
    assert girth(star_graph(4)) == INF
    assert girth(complete_graph(4)) == 3
    assert girth(subdivide(cycle_graph(5), 4)) == 25
    assert girth(subdivide(complete_graph(4), 6)) == 21
    assert girth(subdivide(star_graph(3), 2)) == INF


@pytest.mark.parametrize("seed", range(8))
def test_girth_matches_networkx(seed):
    g = random_graph(11, 0.25, seed)
    h = to_nx(g)
    assert girth(g) == nx.girth(h)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_subdivision_scales_girth(k):
    for g in (complete_graph(4), cycle_graph(6), random_graph(9, 0.35, 3)):
        if girth(g) != INF:
            assert girth(subdivide(g, k)) == (k + 1) * girth(g)


def test_circuits_through_examples():
    c = cycle_graph(21)
    assert circuits_through(c, ("v0", "v1"), 20) == []
    assert len(circuits_through(c, ("v0", "v1"), 21)) == 1
    k4 = complete_graph(4)
    a, b = k4.edges[0]
    assert len(circuits_through(k4, (a, b), 3)) == 2
    assert len(circuits_through(k4, (a, b), 4)) == 4


@pytest.mark.parametrize("seed", range(6))
def test_circuits_match_naive_enumeration(seed):
    g = random_graph(10, 0.35, seed)
    h = to_nx(g)
    for e in g.edges[:4]:
        ours = {c.edge_set() for c in circuits_through(g, e, 8)}
        ref = set()
        for cyc in nx.simple_cycles(h, length_bound=8):
            if len(cyc) < 3:
                continue
            es = frozenset(frozenset(p) for p in zip(cyc, cyc[1:] + cyc[:1]))
            if frozenset(e) in es:
                ref.add(es)
        assert ours == ref


def test_circuit_canonical_form():
    g = cycle_graph(5)
    c1 = canonical_circuit(g, ["v2", "v3", "v4", "v0", "v1"])
    c2 = canonical_circuit(g, ["v1", "v0", "v4", "v3", "v2"])
    assert c1 == c2
    assert c1.closed_path[0] == c1.closed_path[-1]
    with pytest.raises(InputError):
        canonical_circuit(g, ["v0", "v1"])


def test_circuit_cap():
    with pytest.raises(BudgetExceeded):
        circuits_through(complete_graph(7), ("k0", "k1"), 7, cap=5)


def test_distances_and_geodesics():
    c = cycle_graph(21)
    assert bfs_distance(c, "v0", "v10") == 10
    assert bfs_distance(c, "v0", "v11") == 10
    assert geodesics(c, "v3", "v3") == [("v3",)]
    p = path_graph(["a", "b", "c"])
    assert bfs_distance(p, "a", "c") == 2
    assert geodesics(p, "a", "c") == [("a", "b", "c")]
    sq = cycle_graph(4)
    assert len(geodesics(sq, "v0", "v2")) == 2
    assert bfs_distance(SimplicialGraph(["a", "b"]), "a", "b") == INF
    with pytest.raises(BudgetExceeded):
        geodesics(sq, "v0", "v2", cap=1)


@pytest.mark.parametrize("seed", range(5))
def test_distance_matrix_matches_networkx(seed):
    g = random_graph(12, 0.3, seed)
    ref = dict(nx.all_pairs_shortest_path_length(to_nx(g)))
    dm = distance_matrix(g)
    for i, a in enumerate(g.vertices):
        for j, b in enumerate(g.vertices):
            assert (dm[i, j] if dm[i, j] >= 0 else INF) == ref[a].get(b, INF)


def test_spanning_tree_preserves_root_distances():
    c = cycle_graph(21)
    t = geodesic_spanning_tree(c, "v0")
    assert len(t.edges) == 20 and girth(t) == INF
    assert max(bfs_distance(t, "v0", v) for v in c.vertices) == 10
    for v in c.vertices:
        assert bfs_distance(t, "v0", v) == bfs_distance(c, "v0", v)
    p = path_graph(["a", "b", "c"])
    assert geodesic_spanning_tree(p, "a") == p


def test_gromov_and_delta():
    c = cycle_graph(21)
    assert gromov_product(c, "v0", "v0", "v5") == 5
    assert estimate_delta(star_graph(5)) == 0
    assert estimate_delta(subdivide(star_graph(3), 2)) == 0
    assert estimate_delta(cycle_graph(4)) == 1
    # brute force over all quadruples of C21, written out directly
    dm = distance_matrix(c)
    best = 0
    n = len(c)
    for x, y, z, w in itertools.product(range(n), repeat=4):
        s = sorted([dm[x, y] + dm[z, w], dm[x, z] + dm[y, w], dm[x, w] + dm[y, z]])
        best = max(best, s[2] - s[1])
    assert estimate_delta(c) == Fraction(best, 2)


def test_json_and_dot_roundtrip():
    g = cycle_graph(5)
    assert SimplicialGraph.from_json(g.to_json()) == g
    dot = g.to_dot("C5", colors={"v0": 1})
    assert dot.startswith("graph C5 {") and dot.count("--") == 5
    with pytest.raises(InputError):
        SimplicialGraph.from_json({"edges": []})


def test_kernel_paths_agree():
    """The compiled kernels and the numpy/python fallbacks give identical output."""
    g = random_graph(30, 0.12, 7)
    indptr, indices = g.csr
    for s in range(0, 30, 7):
        assert np.array_equal(_kernels._bfs_np(indptr, indices, s),
                              _kernels.bfs(indptr, indices, s))
    dm = distance_matrix(g)
    dm = np.where(dm < 0, 99, dm)
    assert _kernels._delta_full_np(dm) == _kernels.delta_doubled_full(dm)
    quads = np.random.default_rng(0).integers(0, 30, size=(200, 4))
    assert _kernels._delta_quads_np(dm, quads) == _kernels.delta_doubled_quads(dm, quads)
    c = complete_graph(6)
    ip, ix = c.csr
    from gpwb.core_graph import csr_without_edge

    p2, i2 = csr_without_edge(ip, ix, 0, 1)
    dist = _kernels.bfs(p2, i2, 0)
    a = _kernels.circuits_dfs(ip, ix, 0, 1, 6, dist, 10_000)
    b = _kernels._circuits_py(*_kernels._as_csr(ip, ix), 0, 1, 6, dist.astype(np.int64), 10_000)
    assert sorted(map(tuple, a)) == sorted(map(tuple, b))
