import random

import pytest

from gpwb.core_graph import SimplicialGraph, cycle_graph, path_graph
from gpwb.groups import cyclic
from gpwb.graph_product import ProductContext


def make_ctx(graph, order=2, **overrides):
    groups = {"default": cyclic(order)}
    groups.update({v: cyclic(k) for v, k in overrides.items()})
    return ProductContext(graph, groups)


@pytest.fixture
def rng():
    return random.Random(12345)


@pytest.fixture(scope="session")
def edge_z2():
    return make_ctx(path_graph(["u", "v"]))


@pytest.fixture(scope="session")
def iso_z2():
    return make_ctx(SimplicialGraph(["u", "v"]))


@pytest.fixture(scope="session")
def p3_z2():
    return make_ctx(path_graph(["u", "v", "w"]))


@pytest.fixture(scope="session")
def c5_z2():
    return make_ctx(cycle_graph(5))


@pytest.fixture(scope="session")
def c21_z2():
    return make_ctx(cycle_graph(21))


@pytest.fixture(scope="session")
def c21_z3():
    return make_ctx(cycle_graph(21), 3)


@pytest.fixture(scope="session")
def c21_family(c21_z2):
    from gpwb.extension_graph import WindowFamily

    return WindowFamily(c21_z2, 3)
