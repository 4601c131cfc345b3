"""Vertex groups (finite tables, optional infinite cyclic) and graph actions."""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .core_graph import SimplicialGraph
from .errors import BudgetExceeded, InputError

__all__ = [
    "GroupTable",
    "InfiniteCyclic",
    "cyclic",
    "symmetric",
    "direct_product",
    "from_table",
    "group_from_json",
    "GraphAction",
    "action_from_generators",
    "action_from_json",
    "validate_action",
    "DEFAULT_TABLE_CAP",
]

DEFAULT_TABLE_CAP = 5040


@dataclass(frozen=True, eq=False)
class GroupTable:
    """Finite group given by its multiplication table; element 0 is the identity."""

    mul: np.ndarray
    names: tuple[str, ...]
    label: str = "table"
    verify: bool = field(default=True, repr=False)
    inv: np.ndarray = field(init=False, repr=False)

    infinite = False

    def __post_init__(self):
        mul = np.asarray(self.mul, dtype=np.int64)
        n = mul.shape[0]
        if mul.ndim != 2 or mul.shape != (n, n) or n == 0:
            raise InputError("multiplication table must be a non-empty square array")
        if len(self.names) != n or len(set(self.names)) != n:
            raise InputError("group element names must be distinct, one per element")
        if mul.min() < 0 or mul.max() >= n:
            raise InputError("multiplication table entries out of range")
        ar = np.arange(n)
        if not (np.array_equal(mul[0], ar) and np.array_equal(mul[:, 0], ar)):
            raise InputError("element 0 must be the identity")
        if self.verify:
            # associativity (ab)c == a(bc), one left factor at a time
            for a in range(n):
                if not np.array_equal(mul[mul[a]], mul[a][mul]):
                    raise InputError("multiplication table is not associative")
        inv = np.full(n, -1, dtype=np.int64)
        for a in range(n):
            hits = np.nonzero(mul[a] == 0)[0]
            if len(hits) != 1 or mul[hits[0], a] != 0:
                raise InputError(f"element {self.names[a]!r} has no two-sided inverse")
            inv[a] = hits[0]
        for row in mul:
            if len(set(row.tolist())) != n:
                raise InputError("multiplication table is not a Latin square")
        mul.setflags(write=False)
        inv.setflags(write=False)
        object.__setattr__(self, "mul", mul)
        object.__setattr__(self, "inv", inv)
        object.__setattr__(self, "_lookup", {nm: i for i, nm in enumerate(self.names)})
        object.__setattr__(self, "_mul_list", mul.tolist())
        object.__setattr__(self, "_inv_list", inv.tolist())

    @property
    def order(self) -> int:
        return len(self.names)

    identity = 0

    def elements(self) -> range:
        return range(self.order)

    def nontrivial(self) -> range:
        return range(1, self.order)

    def op(self, a: int, b: int) -> int:
        return self._mul_list[a][b]

    def inverse(self, a: int) -> int:
        return self._inv_list[a]

    def name(self, a: int) -> str:
        return self.names[a]

    def element_order(self, a: int) -> int:
        k, x = 1, a
        while x != 0:
            x = self._mul_list[x][a]
            k += 1
        return k

    def parse(self, token: str) -> int:
        """Element from its name, its index, or ``a``/``a^k`` as a power of element 1."""
        if token in self._lookup:
            return self._lookup[token]
        m = re.fullmatch(r"-?\d+", token)
        if m:
            k = int(token)
            if 0 <= k < self.order:
                return k
            raise InputError(f"element index {k} out of range for order {self.order}")
        m = re.fullmatch(r"[A-Za-z]\w*?(?:\^(-?\d+))?", token)
        if m and self.order > 1:
            return self.power(1, int(m.group(1)) if m.group(1) else 1)
        raise InputError(f"cannot parse group element {token!r}")

    def power(self, a: int, k: int) -> int:
        if k < 0:
            a, k = self.inverse(a), -k
        x = 0
        for _ in range(k % self.element_order(a)):
            x = self._mul_list[x][a]
        return x

    def __eq__(self, other):
        return (isinstance(other, GroupTable) and self.names == other.names
                and np.array_equal(self.mul, other.mul))

    def __hash__(self):
        return hash((self.names, self.mul.tobytes()))

    def to_json(self) -> dict:
        if self.label.startswith("cyclic"):
            return {"type": "cyclic", "n": self.order}
        if self.label.startswith("symmetric"):
            return {"type": "symmetric", "n": int(self.label.split(":")[1])}
        return {"type": "table", "mul": self.mul.tolist(), "names": list(self.names)}


class InfiniteCyclic:
    """The integers under addition; an element is its exponent."""

    infinite = True
    identity = 0
    order = None
    label = "infinite-cyclic"

    def op(self, a: int, b: int) -> int:
        return a + b

    def inverse(self, a: int) -> int:
        return -a

    def name(self, a: int) -> str:
        return str(a)

    def parse(self, token: str) -> int:
        if re.fullmatch(r"-?\d+", token):
            return int(token)
        m = re.fullmatch(r"[A-Za-z]\w*?(?:\^(-?\d+))?", token)
        if m:
            return int(m.group(1)) if m.group(1) else 1
        raise InputError(f"cannot parse integer exponent {token!r}")

    def elements(self):
        raise BudgetExceeded("the infinite cyclic group cannot be enumerated")

    def nontrivial(self):
        raise BudgetExceeded("the infinite cyclic group cannot be enumerated")

    def __eq__(self, other):
        return isinstance(other, InfiniteCyclic)

    def __hash__(self):
        return hash("infinite-cyclic")

    def to_json(self) -> dict:
        return {"type": "infinite-cyclic"}


def _check_cap(order: int, cap: int):
    if order > cap:
        raise BudgetExceeded(f"group order {order} exceeds the table cap {cap}")


def cyclic(n: int, cap: int = DEFAULT_TABLE_CAP) -> GroupTable:
    if n < 1:
        raise InputError("cyclic group order must be positive")
    _check_cap(n, cap)
    ar = np.arange(n)
    return GroupTable((ar[:, None] + ar[None, :]) % n, tuple(str(i) for i in range(n)),
                      label=f"cyclic:{n}", verify=n <= 360)


def symmetric(n: int, cap: int = DEFAULT_TABLE_CAP) -> GroupTable:
    """S_n with (g*h)(i) = g(h(i)); elements named by one-line notation."""
    if n < 1:
        raise InputError("symmetric group degree must be positive")
    if n > 10:
        raise BudgetExceeded("symmetric groups above degree 10 are not supported")
    order = 1
    for k in range(2, n + 1):
        order *= k
    _check_cap(order, cap)
    perms = sorted(itertools.permutations(range(n)))  # identity sorts first
    pos = {p: i for i, p in enumerate(perms)}
    mul = [[pos[tuple(g[h[i]] for i in range(n))] for h in perms] for g in perms]
    return GroupTable(np.array(mul), tuple("".join(map(str, p)) for p in perms),
                      label=f"symmetric:{n}", verify=order <= 120)


def direct_product(a: GroupTable, b: GroupTable, cap: int = DEFAULT_TABLE_CAP) -> GroupTable:
    na, nb = a.order, b.order
    _check_cap(na * nb, cap)
    idx = np.arange(na * nb)
    ia, ib = idx // nb, idx % nb
    mul = a.mul[ia[:, None], ia[None, :]] * nb + b.mul[ib[:, None], ib[None, :]]
    names = tuple(f"({a.names[i]},{b.names[j]})" for i in range(na) for j in range(nb))
    return GroupTable(mul, names, label=f"product({a.label},{b.label})",
                      verify=na * nb <= 360)


def from_table(mul, names: Sequence[str] | None = None, cap: int = DEFAULT_TABLE_CAP) -> GroupTable:
    mul = np.asarray(mul)
    _check_cap(mul.shape[0], cap)
    names = tuple(names) if names is not None else tuple(str(i) for i in range(mul.shape[0]))
    return GroupTable(mul, names)


def group_from_json(obj: Mapping, cap: int = DEFAULT_TABLE_CAP):
    if not isinstance(obj, Mapping) or "type" not in obj:
        raise InputError('group JSON needs a "type" field')
    kind = obj["type"]
    if kind == "cyclic":
        return cyclic(int(obj["n"]), cap)
    if kind == "symmetric":
        return symmetric(int(obj["n"]), cap)
    if kind == "table":
        return from_table(obj["mul"], obj.get("names"), cap)
    if kind in ("infinite-cyclic", "integers", "Z"):
        return InfiniteCyclic()
    raise InputError(f"unknown group type {kind!r}")


# -- actions on graphs --------------------------------------------------------

@dataclass(frozen=True, eq=False)
class GraphAction:
    """A finite group acting on a graph; ``images[g][i]`` is the image of vertex i."""

    group: GroupTable
    graph: SimplicialGraph
    images: np.ndarray

    def act(self, g: int, v):
        return self.graph.vertices[int(self.images[g][self.graph.index(v)])]

    def act_index(self, g: int, i: int) -> int:
        return int(self.images[g][i])


def _compose(p: tuple, q: tuple) -> tuple:
    """(p o q)(i) = p(q(i))."""
    return tuple(p[i] for i in q)


def action_from_generators(graph: SimplicialGraph, generators: Mapping[str, Sequence[int]],
                           order: int | None = None,
                           cap: int = DEFAULT_TABLE_CAP) -> GraphAction:
    """Close generator permutations (as vertex-index images) into a group action.

    The acting group is the permutation group generated, so the action is
    faithful; its elements are ordered breadth-first from the identity.
    """
    n = len(graph)
    gens = []
    for name, perm in generators.items():
        perm = tuple(int(x) for x in perm)
        if sorted(perm) != list(range(n)):
            raise InputError(f"generator {name!r} is not a permutation of the vertices")
        gens.append(perm)
    ident = tuple(range(n))
    elems = [ident]
    seen = {ident: 0}
    frontier = [ident]
    while frontier:
        nxt = []
        for p in frontier:
            for s in gens:
                q = _compose(s, p)
                if q not in seen:
                    seen[q] = len(elems)
                    elems.append(q)
                    nxt.append(q)
                    limit = order if order is not None else cap
                    if len(elems) > limit:
                        raise BudgetExceeded(
                            f"closure of the action exceeds the declared order {limit}")
        frontier = nxt
    if order is not None and len(elems) != order:
        raise InputError(f"action generates a group of order {len(elems)}, not {order}")
    mul = np.array([[seen[_compose(p, q)] for q in elems] for p in elems])
    names = tuple("e" if p == ident else "g" + "".join(f".{x}" for x in p) for p in elems)
    group = GroupTable(mul, names, label="action")
    act = GraphAction(group, graph, np.array(elems, dtype=np.int64).reshape(len(elems), n))
    validate_action(act)
    return act


def action_from_json(graph: SimplicialGraph, obj: Mapping | None,
                     cap: int = DEFAULT_TABLE_CAP) -> GraphAction:
    """Generator map ``{name: {vertex: image}}`` or ``{name: [images in vertex order]}``."""
    if obj is None:
        return action_from_generators(graph, {}, 1)
    gens_obj = obj.get("generators", obj)
    gens = {}
    for name, spec in gens_obj.items():
        if isinstance(spec, Mapping):
            perm = list(range(len(graph)))
            for src, dst in spec.items():
                perm[graph.index(str(src))] = graph.index(str(dst))
        elif isinstance(spec, list):
            perm = [graph.index(str(x)) for x in spec]
        else:
            raise InputError(f"generator {name!r} must be a map or a list")
        gens[name] = perm
    order = obj.get("order") if "generators" in obj else None
    return action_from_generators(graph, gens, order, cap)


def validate_action(act: GraphAction) -> dict:
    """Check automorphism and homomorphism laws; report orbits and stabilizers.

    Stab_G(e) is the pointwise stabilizer of both endpoints.
    """
    g, graph, images = act.group, act.graph, act.images
    n = len(graph)
    if images.shape != (g.order, n):
        raise InputError("action images have the wrong shape")
    edge_set = set(graph.edge_indices)
    for a in range(g.order):
        if sorted(images[a].tolist()) != list(range(n)):
            raise InputError(f"image of {g.name(a)!r} is not a permutation")
        for i, j in graph.edge_indices:
            x, y = int(images[a][i]), int(images[a][j])
            if (min(x, y), max(x, y)) not in edge_set:
                raise InputError(f"image of {g.name(a)!r} is not a graph automorphism")
    if images[0].tolist() != list(range(n)):
        raise InputError("the identity must act trivially")
    for a in range(g.order):
        for b in range(g.order):
            if not np.array_equal(images[g.op(a, b)], images[a][images[b]]):
                raise InputError("action images do not respect multiplication")
    vs = graph.vertices
    vorbits, seen = [], set()
    for i in range(n):
        if i in seen:
            continue
        orb = sorted({int(images[a][i]) for a in range(g.order)})
        seen.update(orb)
        vorbits.append([vs[k] for k in orb])
    eorbits, eseen = [], set()
    for e in graph.edge_indices:
        if e in eseen:
            continue
        orb = set()
        for a in range(g.order):
            x, y = int(images[a][e[0]]), int(images[a][e[1]])
            orb.add((min(x, y), max(x, y)))
        eseen.update(orb)
        eorbits.append([[vs[x], vs[y]] for x, y in sorted(orb)])
    stab_v = {vs[i]: [a for a in range(g.order) if images[a][i] == i] for i in range(n)}
    stab_e = {(vs[i], vs[j]): [a for a in range(g.order)
                               if images[a][i] == i and images[a][j] == j]
              for i, j in graph.edge_indices}
    return {"group_order": g.order, "vertex_orbits": vorbits, "edge_orbits": eorbits,
            "stab_vertex": stab_v, "stab_edge": stab_e}
