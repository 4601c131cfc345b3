"""Graph products of groups: normal forms, multiplication, support, balls.

A syllable is a pair ``(vertex_index, element)`` with a non-identity
element of that vertex's group.  A :class:`NormalWord` is the canonical
representative of a group element: a reduced syllable sequence that is
lexicographically least (under ``(vertex_index, element)``) among all of
its reorderings by commuting adjacent syllables.
"""

from __future__ import annotations

import random
from typing import Hashable, Iterable, Mapping, Sequence

from .core_graph import SimplicialGraph
from .errors import BudgetExceeded, HypothesisError, InputError
from .groups import GroupTable, InfiniteCyclic

__all__ = [
    "ProductContext",
    "NormalWord",
    "normalize",
    "rewrite",
    "mul",
    "inv",
    "product",
    "support",
    "support_mask",
    "syllable_length",
    "is_reduced_word",
    "is_reduced_decomposition",
    "conjugation_decomposition",
    "enumerate_ball",
    "random_word",
    "DEFAULT_BALL_CAP",
]

DEFAULT_BALL_CAP = 2_000_000


class NormalWord(tuple):
    """Canonical syllable sequence; the empty word is the identity."""

    __slots__ = ()

    def __repr__(self):
        return f"NormalWord({tuple.__repr__(self)})"


IDENTITY = NormalWord(())


class ProductContext:
    """A defining graph together with one group per vertex.

    ``groups`` maps vertex ids to groups; a ``"default"`` key (or passing a
    single group) covers every vertex not listed.
    """

    def __init__(self, graph: SimplicialGraph, groups):
        self.graph = graph
        n = len(graph)
        if isinstance(groups, (GroupTable, InfiniteCyclic)):
            groups = {"default": groups}
        assigned = []
        for v in graph.vertices:
            g = groups.get(v, groups.get("default"))
            if g is None:
                raise InputError(f"no group assigned to vertex {v!r}")
            assigned.append(g)
        for key in groups:
            if key != "default" and key not in graph:
                raise InputError(f"group assigned to unknown vertex {key!r}")
        self.groups = tuple(assigned)
        self.n = n
        self.link_mask = tuple(sum(1 << j for j in graph.neighbor_indices(i)) for i in range(n))
        self.star_mask = tuple(m | (1 << i) for i, m in enumerate(self.link_mask))
        self.full_mask = (1 << n) - 1
        self.finite = all(not g.infinite for g in self.groups)

    def __repr__(self):
        return f"ProductContext({self.graph!r})"

    # -- vertices and masks ------------------------------------------------
    def vindex(self, v) -> int:
        if isinstance(v, int) and not isinstance(v, bool) and v not in self.graph:
            if 0 <= v < self.n:
                return v
        return self.graph.index(v)

    def vid(self, i: int):
        return self.graph.vertices[i]

    def mask(self, vertices: Iterable) -> int:
        m = 0
        for v in vertices:
            m |= 1 << self.vindex(v)
        return m

    def ids_of_mask(self, m: int) -> frozenset:
        return frozenset(self.vid(i) for i in range(self.n) if (m >> i) & 1)

    def commute(self, i: int, j: int) -> bool:
        return bool((self.link_mask[i] >> j) & 1)

    def require_nontrivial(self):
        for v, g in zip(self.graph.vertices, self.groups):
            if not g.infinite and g.order < 2:
                raise HypothesisError(f"vertex group at {v!r} is trivial")

    def require_finite(self):
        if not self.finite:
            raise BudgetExceeded("operation needs finite vertex groups")

    # -- construction and I/O -------------------------------------------------
    def syllable(self, v, a) -> NormalWord:
        i = self.vindex(v)
        g = self.groups[i]
        if isinstance(a, str):
            a = g.parse(a)
        if not g.infinite and not 0 <= a < g.order:
            raise InputError(f"element {a!r} is not in the group at {self.vid(i)!r}")
        return IDENTITY if a == 0 else NormalWord(((i, a),))

    def word(self, syllables: Iterable[tuple]) -> list[tuple[int, int]]:
        """Validate ``(vertex, element)`` pairs into internal syllables."""
        out = []
        for item in syllables:
            try:
                v, a = item
            except (TypeError, ValueError):
                raise InputError(f"syllable {item!r} is not a (vertex, element) pair") from None
            i = self.vindex(v)
            g = self.groups[i]
            if isinstance(a, str):
                a = g.parse(a)
            elif not isinstance(a, int):
                raise InputError(f"group element {a!r} must be an int or a name")
            if not g.infinite and not 0 <= a < g.order:
                raise InputError(f"element {a!r} is not in the group at {self.vid(i)!r}")
            out.append((i, a))
        return out

    def parse(self, text: str) -> NormalWord:
        """Parse ``"u:a v:b u:a"`` (``1`` or an empty string is the identity)."""
        text = text.strip()
        if text in ("", "1", "e"):
            return IDENTITY
        items = []
        for tok in text.split():
            if ":" not in tok:
                raise InputError(f"syllable {tok!r} must look like vertex:element")
            v, a = tok.rsplit(":", 1)
            items.append((v, a))
        return normalize(self, self.word(items))

    def format(self, w: Sequence[tuple[int, int]]) -> str:
        if not w:
            return "1"
        return " ".join(f"{self.vid(v)}:{self.groups[v].name(a)}" for v, a in w)


# -- core rewriting ------------------------------------------------------------

def _push(ctx: ProductContext, syls: list, v: int, a: int) -> None:
    """Right-multiply a reduced syllable list by (v, a), keeping it reduced."""
    if a == 0:
        return
    lk = ctx.link_mask[v]
    for k in range(len(syls) - 1, -1, -1):
        w, b = syls[k]
        if w == v:
            c = ctx.groups[v].op(b, a)
            if c == 0:
                del syls[k]
            else:
                syls[k] = (v, c)
            return
        if not (lk >> w) & 1:
            break
    syls.append((v, a))


def _canonical(ctx: ProductContext, syls: Sequence[tuple[int, int]]) -> NormalWord:
    """Lex-least reordering of a reduced word by commuting neighbours."""
    rest = list(syls)
    out = []
    lk = ctx.link_mask
    while rest:
        seen = 0
        best = None
        best_j = -1
        for j, s in enumerate(rest):
            if seen & ~lk[s[0]] == 0 and (best is None or s < best):
                best, best_j = s, j
            seen |= 1 << s[0]
        out.append(rest.pop(best_j))
    return NormalWord(out)


def _reduce(ctx: ProductContext, syls: Iterable[tuple[int, int]]) -> list:
    out: list = []
    for v, a in syls:
        _push(ctx, out, v, a)
    return out


def _mergeable_pairs(ctx: ProductContext, syls: list) -> list[tuple[int, int]]:
    pairs = []
    for i, (v, _) in enumerate(syls):
        lk = ctx.link_mask[v]
        for j in range(i + 1, len(syls)):
            w = syls[j][0]
            if w == v:
                pairs.append((i, j))
                break
            if not (lk >> w) & 1:
                break
    return pairs


def rewrite(ctx: ProductContext, word: Iterable[tuple[int, int]],
            rng: random.Random | None = None, shuffles: int = 0) -> NormalWord:
    """Normalize by the explicit rule system: drop identities, merge, sort.

    Merges a pair of same-vertex syllables whenever every syllable between
    them commutes with that vertex.  Without ``rng`` the leftmost pair is
    merged first; with ``rng`` a random pair is chosen and ``shuffles``
    random legal swaps of commuting neighbours are applied between merges.
    """
    syls = [s for s in word if s[1] != 0]
    lk = ctx.link_mask
    while True:
        if rng is not None and len(syls) > 1:
            for _ in range(shuffles):
                k = rng.randrange(len(syls) - 1)
                if (lk[syls[k][0]] >> syls[k + 1][0]) & 1:
                    syls[k], syls[k + 1] = syls[k + 1], syls[k]
        pairs = _mergeable_pairs(ctx, syls)
        if not pairs:
            break
        i, j = pairs[0] if rng is None else rng.choice(pairs)
        v = syls[i][0]
        c = ctx.groups[v].op(syls[i][1], syls[j][1])
        del syls[j]
        if c == 0:
            del syls[i]
        else:
            syls[i] = (v, c)
    return _canonical(ctx, syls)


def normalize(ctx: ProductContext, word: Iterable[tuple[int, int]]) -> NormalWord:
    """Canonical normal form of the product of the given syllables."""
    if isinstance(word, NormalWord):
        return word
    return _canonical(ctx, _reduce(ctx, word))


def mul(ctx: ProductContext, x: Sequence, y: Sequence) -> NormalWord:
    out = list(x)
    for v, a in y:
        _push(ctx, out, v, a)
    return _canonical(ctx, out)


def product(ctx: ProductContext, *parts: Sequence) -> NormalWord:
    out: list = []
    for part in parts:
        for v, a in part:
            _push(ctx, out, v, a)
    return _canonical(ctx, out)


def inv(ctx: ProductContext, x: Sequence) -> NormalWord:
    groups = ctx.groups
    return _canonical(ctx, [(v, groups[v].inverse(a)) for v, a in reversed(x)])


def support_mask(x: Sequence) -> int:
    m = 0
    for v, _ in x:
        m |= 1 << v
    return m


def support(ctx: ProductContext, x: Sequence) -> frozenset:
    return frozenset(ctx.vid(v) for v, _ in x)


def syllable_length(x: Sequence) -> int:
    return len(x)


def is_reduced_word(ctx: ProductContext, word: Sequence[tuple[int, int]]) -> bool:
    """The normal-form criterion: no identity syllables, and between any two
    syllables at one vertex some syllable at a non-adjacent vertex."""
    for v, a in word:
        if a == 0:
            return False
    return not _mergeable_pairs(ctx, list(word))


def is_reduced_decomposition(ctx: ProductContext, parts: Sequence[Sequence]) -> bool:
    total = sum(len(normalize(ctx, p)) for p in parts)
    return len(product(ctx, *parts)) == total


def conjugation_decomposition(ctx: ProductContext, v, a: int, g: Sequence):
    """Split g = h1 h2 h3 with supp(h1) + {v} = supp(g a g^-1),
    supp(h2) inside Lk(v), supp(h3) inside {v}.

    Follows the induction on syllable length: strip a syllable that either
    commutes with v and everything after it, or sits at v with everything
    after it in Lk(v).
    """
    vi = ctx.vindex(v)
    if isinstance(a, str):
        a = ctx.groups[vi].parse(a)
    if a == 0:
        raise InputError("conjugation decomposition needs a non-identity element")
    if not ctx.groups[vi].infinite and not 0 < a < ctx.groups[vi].order:
        raise InputError(f"{a!r} is not an element of the group at {ctx.vid(vi)!r}")
    g = normalize(ctx, g)
    lk = ctx.link_mask
    h2_parts: list = []  # prepended pieces, in order
    h3_parts: list = []
    cur = list(g)
    while cur:
        conj = product(ctx, cur, [(vi, a)], inv(ctx, cur))
        if len(conj) == 2 * len(cur) + 1:
            break
        after = 0  # mask of vertices of syllables after position i
        pick = None
        for i in range(len(cur) - 1, -1, -1):
            w = cur[i][0]
            if w != vi and ((lk[w] >> vi) & 1) and after & ~lk[w] == 0:
                pick = (i, 1)
                break
            if w == vi and after & ~lk[vi] == 0:
                pick = (i, 2)
                break
            after |= 1 << w
        if pick is None:  # cannot happen for a non-reduced conjugate
            raise AssertionError("conjugation decomposition found no removable syllable")
        i, case = pick
        gi = cur.pop(i)
        if case == 1:
            h2_parts.insert(0, gi)
        else:
            grp = ctx.groups[vi]
            a = grp.op(grp.op(gi[1], a), grp.inverse(gi[1]))
            h3_parts.insert(0, gi)
    return normalize(ctx, cur), normalize(ctx, h2_parts), normalize(ctx, h3_parts)


def _extends_canonically(ctx: ProductContext, w: Sequence, v: int, a: int) -> bool:
    """True when ``w + [(v, a)]`` is itself a canonical normal word."""
    lk = ctx.link_mask[v]
    s = (v, a)
    for k in range(len(w) - 1, -1, -1):
        x = w[k]
        if x[0] == v or not (lk >> x[0]) & 1:
            return x[0] != v
        if s < x:
            return False
    return True


def enumerate_ball(ctx: ProductContext, L: int, cap: int = DEFAULT_BALL_CAP,
                   vertices: Iterable | None = None) -> list[NormalWord]:
    """All elements of syllable length at most ``L`` (optionally with support
    inside ``vertices``), each once, ordered by length then canonical word.

    A canonical word's prefixes are canonical, so each element of length
    k+1 is produced exactly once from its length-k prefix.
    """
    ctx.require_finite()
    allowed = range(ctx.n) if vertices is None else sorted({ctx.vindex(v) for v in vertices})
    letters = [(v, a) for v in allowed for a in ctx.groups[v].nontrivial()]
    layer = [IDENTITY]
    out = [IDENTITY]
    for _ in range(L):
        nxt = []
        for w in layer:
            for v, a in letters:
                if _extends_canonically(ctx, w, v, a):
                    nxt.append(NormalWord(w + ((v, a),)))
            if len(out) + len(nxt) > cap:
                raise BudgetExceeded(f"ball exceeds the cap of {cap} elements")
        if not nxt:
            break
        nxt.sort()
        out.extend(nxt)
        layer = nxt
    return out


def random_word(ctx: ProductContext, length: int, rng: random.Random,
                exponent_range: int = 3) -> list[tuple[int, int]]:
    """A random (usually non-reduced) syllable sequence of the given length."""
    out = []
    for _ in range(length):
        v = rng.randrange(ctx.n)
        g = ctx.groups[v]
        if g.infinite:
            a = rng.choice([k for k in range(-exponent_range, exponent_range + 1) if k])
        else:
            a = rng.randrange(1, g.order)
        out.append((v, a))
    return out
