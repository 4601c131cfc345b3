"""Command-line entry point: ``gpwb <command> --config FILE [options]``.

Exit codes: 0 success, 1 verification failure, 2 budget exhausted,
3 input error.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from concurrent.futures import ProcessPoolExecutor
from typing import Any, Callable, Mapping, Sequence

from . import extension_graph as ext
from . import quasi_median as qm
from . import wreath as wr
from .core_graph import (
    INF,
    SimplicialGraph,
    complete_graph,
    cycle_graph,
    girth,
    path_graph,
    star_graph,
)
from .errors import BudgetExceeded, GpwbError, InputError, VerificationFailure
from .graph_product import ProductContext, mul, normalize, support, syllable_length
from .groups import action_from_generators, action_from_json, cyclic, group_from_json
from .parabolics import coset_canonical, double_coset_member, parabolic_member, stab_intersection

DEFAULT_BUDGETS = {"L": 2, "r": 3, "circuit_cap": ext.DEFAULT_CIRCUIT_CAP,
                   "geodesic_cap": ext.DEFAULT_GEODESIC_CAP, "window_cap": ext.DEFAULT_WINDOW_CAP}


# ----------------------------------------------------------------------------
# configuration


class Config:
    """Everything a command needs: the context, an optional action, budgets, seed."""

    def __init__(self, obj: Mapping, source: str = "<config>"):
        if not isinstance(obj, Mapping):
            raise InputError(f"{source}: top level must be a JSON object")
        self.source = source
        self.graph = _graph_from_config(obj.get("graph"))
        groups = obj.get("groups", {"default": {"type": "cyclic", "n": 2}})
        if not isinstance(groups, Mapping):
            raise InputError('"groups" must map vertex ids (or "default") to group specs')
        self.ctx = ProductContext(self.graph, {str(k): _group(v) for k, v in groups.items()})
        self.action_spec = obj.get("action")
        budgets = dict(DEFAULT_BUDGETS)
        extra = obj.get("budgets", {})
        if not isinstance(extra, Mapping):
            raise InputError('"budgets" must be an object')
        for k, v in extra.items():
            if k not in DEFAULT_BUDGETS:
                raise InputError(f"unknown budget {k!r}")
            if not isinstance(v, int) or v < 0 or (k != "L" and k != "r" and v == 0):
                raise InputError(f"budget {k!r} must be a positive integer")
            budgets[k] = v
        self.budgets = budgets
        self.seed = int(obj.get("seed", 0))

    def action(self):
        spec = self.action_spec
        if spec is None or spec == "trivial" or (isinstance(spec, Mapping) and spec.get("type") == "trivial"):
            return action_from_generators(self.graph, {}, 1)
        if isinstance(spec, Mapping) and spec.get("type") == "rotation":
            return action_from_generators(self.graph, {"r": _rotation(self.graph)})
        if not isinstance(spec, Mapping):
            raise InputError('"action" must be an object')
        return action_from_json(self.graph, spec)


def _group(spec):
    if isinstance(spec, int):
        return cyclic(spec)
    return group_from_json(spec)


def _graph_from_config(spec) -> SimplicialGraph:
    if not isinstance(spec, Mapping):
        raise InputError('config needs a "graph" object')
    if "vertices" in spec:
        return SimplicialGraph.from_json(spec)
    kind = spec.get("type")
    try:
        if kind == "cycle":
            return cycle_graph(int(spec["n"]), spec.get("prefix", "v"))
        if kind == "path":
            return path_graph(spec["names"] if "names" in spec else int(spec["n"]))
        if kind == "complete":
            return complete_graph(int(spec["n"]))
        if kind == "star":
            return star_graph(int(spec["leaves"]))
    except KeyError as exc:
        raise InputError(f"graph of type {kind!r} needs the field {exc.args[0]!r}") from None
    raise InputError('graph needs "vertices"/"edges" or a "type" of cycle, path, complete, star')


def _rotation(g: SimplicialGraph) -> list[int]:
    """The rotation v_i -> v_(i+1) of a cycle graph, as vertex-index images."""
    order = [0]
    prev = None
    while len(order) < len(g):
        nb = [w for w in g.neighbor_indices(order[-1]) if w != prev]
        if len(g.neighbor_indices(order[-1])) != 2:
            raise InputError("rotation actions need a cycle graph")
        prev = order[-1]
        order.append(min(nb) if len(order) == 1 else nb[0])
    perm = [0] * len(g)
    for k, i in enumerate(order):
        perm[i] = order[(k + 1) % len(order)]
    return perm


def load_config(path: str) -> Config:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read config {path!r}: {exc.strerror}") from None
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}:{exc.lineno}:{exc.colno}: malformed JSON: {exc.msg}") from None
    return Config(obj, path)


# ----------------------------------------------------------------------------
# helpers


def _budget(args, cfg: Config, key: str) -> int:
    val = getattr(args, key, None)
    return cfg.budgets[key] if val is None else val


def _vertex_list(ctx: ProductContext, text: str) -> list:
    items = [t.strip() for t in text.split(",") if t.strip()]
    for t in items:
        ctx.vindex(t)
    return items


def _path_arg(ctx: ProductContext, text: str) -> list:
    return [ext.parse_vertex(ctx, t) for t in text.split(";") if t.strip()]


def _parallel_map(fn: Callable, items: Sequence, jobs: int) -> list:
    if jobs <= 1 or len(items) < 32:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items, chunksize=max(1, len(items) // (4 * jobs))))


def _jsonable(obj):
    if isinstance(obj, float) and obj == INF:
        return "inf"
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if hasattr(obj, "numerator") and hasattr(obj, "denominator") and not isinstance(obj, int):
        return str(obj)
    if hasattr(obj, "item"):
        return obj.item()
    return obj


def _emit(report: Mapping, as_json: bool, out=sys.stdout):
    report = _jsonable(report)
    if as_json:
        out.write(json.dumps(report, sort_keys=True, indent=2) + "\n")
        return
    width = max((len(k) for k in report), default=0)
    for k, v in report.items():
        if isinstance(v, list) and len(v) > 12:
            v = v[:12] + [f"... ({len(v)} total)"]
        if isinstance(v, (dict, list)):
            v = json.dumps(v, sort_keys=True)
        out.write(f"{k.ljust(width)}  {v}\n")


def _write_dot(path: str | None, text: Callable[[], str]):
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text())


def _window(cfg: Config, L: int) -> ext.Window:
    return ext.build_window(cfg.ctx, L, cfg.budgets["window_cap"])


def _family(cfg: Config, L: int) -> ext.WindowFamily:
    return ext.WindowFamily(cfg.ctx, L + 1, cfg.budgets["window_cap"])


# ----------------------------------------------------------------------------
# group-level commands


def cmd_normalize(cfg, args):
    w = cfg.ctx.parse(args.word)
    return {"normal_form": cfg.ctx.format(w), "syllable_length": syllable_length(w)}


def cmd_mul(cfg, args):
    acc = cfg.ctx.parse("")
    for t in args.words:
        acc = mul(cfg.ctx, acc, cfg.ctx.parse(t))
    return {"product": cfg.ctx.format(acc), "syllable_length": syllable_length(acc)}


def cmd_support(cfg, args):
    return {"support": sorted(str(v) for v in support(cfg.ctx, cfg.ctx.parse(args.word)))}


def cmd_girth(cfg, args):
    _write_dot(args.dot, lambda: cfg.graph.to_dot("Gamma"))
    return {"girth": girth(cfg.graph)}


def _subset(cfg, args):
    if args.star:
        i = cfg.ctx.vindex(args.star)
        return cfg.ctx.star_mask[i]
    if args.S is None:
        raise InputError("give a vertex set with --S a,b,... or --star v")
    return cfg.ctx.mask(_vertex_list(cfg.ctx, args.S))


def cmd_coset_canon(cfg, args):
    m = _subset(cfg, args)
    return {"coset_canonical": cfg.ctx.format(coset_canonical(cfg.ctx, cfg.ctx.parse(args.word), m))}


def cmd_in_parabolic(cfg, args):
    g = cfg.ctx.parse(args.word)
    m = _subset(cfg, args)
    out = {"member": parabolic_member(cfg.ctx, g, m)}
    if args.T:
        out["double_coset_member"] = double_coset_member(cfg.ctx, g, m, cfg.ctx.mask(_vertex_list(cfg.ctx, args.T)))
    return out


def cmd_stab_meet(cfg, args):
    rep = stab_intersection(cfg.ctx, args.a, args.b, verify_L=args.verify_L)
    if "bruteforce_match" in rep:
        rep["status"] = "verified" if rep["bruteforce_match"] and rep["order"] == rep["expected_order"] else "failed"
    return rep


# ----------------------------------------------------------------------------
# extension-graph commands


def cmd_ext_build(cfg, args):
    L = _budget(args, cfg, "L")
    win = _window(cfg, L)
    _write_dot(args.dot, lambda: win.to_dot())
    out = {"L": L, "vertices": len(win), "edges": int(win.edges.shape[0])}
    if args.full:
        out.update(win.to_json())
    return out


def cmd_ext_dist(cfg, args):
    x, y = ext.parse_vertex(cfg.ctx, args.x), ext.parse_vertex(cfg.ctx, args.y)
    L = _budget(args, cfg, "L")
    fam = _family(cfg, L)
    d, cert = ext.window_distance(cfg.ctx, x, y, range(0, L + 2), family=fam)
    return {"distance": d, "certified": cert,
            "status": "verified" if cert else "unstable"}


def cmd_ext_girth(cfg, args):
    L = _budget(args, cfg, "L")
    return ext.girth_check(cfg.ctx, L, args.n_max, window=_window(cfg, L), cap=cfg.budgets["circuit_cap"])


def cmd_ext_census_doubling(cfg, args):
    L = args.L if args.L is not None else 1
    c = ext.doubling_census(cfg.ctx, args.vertex, L, window=_window(cfg, L), cap=cfg.budgets["circuit_cap"])
    i = cfg.ctx.vindex(args.vertex)
    expected = cfg.ctx.groups[i].order
    return {"vertex": args.vertex, "L": L, "count": c, "vertex_group_order": expected,
            "status": "verified" if c == expected else "failed"}


def cmd_ext_circuits(cfg, args):
    e = _vertex_list(cfg.ctx, args.edge)
    if len(e) != 2:
        raise InputError("--edge takes two comma-separated vertices")
    L = _budget(args, cfg, "L")
    n = args.n if args.n is not None else girth(cfg.graph)
    if n == INF:
        raise InputError("Gamma has no circuits; give --n")
    fam = _family(cfg, L)
    return ext.fineness_census(cfg.ctx, e, int(n), range(1, L + 2), family=fam,
                               cap=args.cap or cfg.budgets["circuit_cap"])


def _sampled_inputs(cfg, args, kind: str):
    rng = random.Random(args.seed if args.seed is not None else cfg.seed)
    L = _budget(args, cfg, "L")
    fam = _family(cfg, L)
    ctx = cfg.ctx
    count = args.count
    if kind == "bigon":
        return fam, ext.sample_bigons(ctx, count, rng, fam, L_geo=L)
    bigons = ext.sample_bigons(ctx, max(count, 40), rng, fam, L_geo=L)
    loops = [p + list(reversed(q))[1:-1] for p, q in bigons]
    if kind == "circuit":
        return fam, loops[:count]
    copies = []
    try:
        copies = [ext.copy_circuit(ctx, ctx.parse(""))] + [
            ext.copy_circuit(ctx, [(v, 1)]) for v in range(min(ctx.n, 4))]
    except GpwbError:
        pass
    tris = ext.sample_triangles(ctx, count - count // 2, rng, fam, loops)
    if copies:
        tris += ext.sample_triangles(ctx, count // 2, rng, fam, copies)
    return fam, tris[:count]


class _Checker:
    """Picklable worker for sampled verification."""

    def __init__(self, ctx, kind):
        self.ctx, self.kind = ctx, kind

    def __call__(self, item):
        ctx = self.ctx
        try:
            if self.kind == "bigon":
                w = ext.bigon_decomposition(ctx, *item)
                return ext.check_bigon_witness(ctx, *item, w), len(w.copies)
            if self.kind == "triangle":
                w = ext.triangle_decomposition(ctx, *item)
                return ext.check_triangle_witness(ctx, *item, w), (w.n, w.m, w.l)
            w = ext.greenlinger_witness(ctx, item)
            return ext.check_greenlinger_witness(ctx, item, w), w.length
        except VerificationFailure as exc:
            return [str(exc)], None


def _verify_sampled(cfg, args, kind: str):
    ctx = cfg.ctx
    if args.paths:
        try:
            with open(args.paths, encoding="utf-8") as fh:
                obj = json.load(fh)
        except OSError as exc:
            raise InputError(f"cannot read {args.paths!r}: {exc.strerror}") from None
        except json.JSONDecodeError as exc:
            raise InputError(f"{args.paths}:{exc.lineno}:{exc.colno}: malformed JSON: {exc.msg}") from None
        keys = {"bigon": ("p", "q"), "triangle": ("p", "q", "r"), "circuit": ("cycle",)}[kind]
        fam = _family(cfg, _budget(args, cfg, "L"))
        items = []
        for n, entry in enumerate(obj if isinstance(obj, list) else [obj]):
            try:
                sides = [[ext.parse_vertex(ctx, str(t)) for t in entry[k]] for k in keys]
            except (KeyError, TypeError):
                raise InputError(f"entry {n} needs the lists {', '.join(keys)}") from None
            for side in sides:
                if len(side) < 2 or not ext.is_path(ctx, side):
                    raise InputError(f"entry {n}: a side is not a path of the extension graph")
                if kind != "circuit":
                    d, cert = fam.distance(side[0], side[-1])
                    if not cert or d != len(side) - 1:
                        raise InputError(f"entry {n}: a side is not a certified geodesic")
            items.append(tuple(sides) if kind != "circuit" else sides[0])
        source = "file"
    else:
        _, items = _sampled_inputs(cfg, args, kind)
        source = "sampled"
    results = _parallel_map(_Checker(ctx, kind), items, args.jobs or 1)
    failures = [i for i, (bad, _) in enumerate(results) if bad]
    shapes: dict = {}
    for _, s in results:
        shapes[str(s)] = shapes.get(str(s), 0) + 1
    return {
        "kind": kind,
        "inputs": len(items),
        "source": source,
        "witnessed": len(items) - len(failures),
        "failures": failures[:20],
        "first_failure": results[failures[0]][0] if failures else None,
        "witness_shapes": dict(sorted(shapes.items())),
        "status": "verified" if not failures and items else "failed",
    }


def cmd_ext_verify_bigon(cfg, args):
    return _verify_sampled(cfg, args, "bigon")


def cmd_ext_verify_triangle(cfg, args):
    return _verify_sampled(cfg, args, "triangle")


def cmd_ext_greenlinger(cfg, args):
    return _verify_sampled(cfg, args, "circuit")


def cmd_ext_planes(cfg, args):
    rng = random.Random(args.seed if args.seed is not None else cfg.seed)
    L = _budget(args, cfg, "L")
    fam = _family(cfg, L)
    geos = ext.sample_geodesics(cfg.ctx, args.count, rng, fam, L_geo=L)
    worst = {}
    bad = 0
    for p in geos:
        vis = ext.plane_visits(cfg.ctx, p, 3)
        for k in range(args.k_max + 1):
            for c in range(len(p)):
                n, bound, ok = ext.plane_count_check(cfg.ctx, p, k, c, vis)
                worst[k] = max(worst.get(k, 0), n)
                bad += not ok
    return {"geodesics": len(geos), "max_count_by_k": worst,
            "bound_by_k": {k: 2 * (k + 1) + 4 for k in worst}, "violations": bad,
            "status": "verified" if bad == 0 and geos else "failed"}


def cmd_ext_tightness(cfg, args):
    delta = args.delta if args.delta is not None else ext.graph_delta(cfg.graph)
    f = lambda n: ext.fineness_function(cfg.graph, n, args.f_mode, cfg.budgets["circuit_cap"])
    P0, P1, k1 = ext.tightness_constants(args.k, delta, f)
    out = {"k": args.k, "delta": delta, "P0": P0, "P1": P1, "k1": k1}
    if args.count:
        rng = random.Random(args.seed if args.seed is not None else cfg.seed)
        L = _budget(args, cfg, "L")
        fam = _family(cfg, L)
        geos = ext.sample_geodesics(cfg.ctx, args.count, rng, fam, L_geo=L)
        rep = ext.tightness_sample_check(fam, [(p[0], p[-1]) for p in geos], args.k, P0, L,
                                         cfg.budgets["geodesic_cap"])
        out.update({"max_count": rep["max_count"], "checked": rep["checked"], "status": rep["status"]})
    return out


def cmd_ext_asdim_cover(cfg, args):
    L = _budget(args, cfg, "L")
    o = ext.parse_vertex(cfg.ctx, args.o)
    win = _window(cfg, L)
    out = {}
    status = "verified"
    for R in args.R:
        cov = ext.asdim_cover(cfg.ctx, o, R, L, window=win)
        rep = ext.cover_disjointness_check(cov, args.r_sep)
        out[f"R={R}"] = rep
        if rep["status"] != "verified":
            status = "failed"
    out["status"] = status
    return out


# ----------------------------------------------------------------------------
# quasi-median and wreath commands


def _ball(cfg, args):
    return qm.build_cayley_ball(cfg.ctx, _budget(args, cfg, "r"))


def cmd_qm_ball(cfg, args):
    b = _ball(cfg, args)
    _write_dot(args.dot, lambda: b.to_dot(colored=False))
    return {"r": b.r, "elements": len(b), "edges": len(b.edges)}


def cmd_qm_hyperplanes(cfg, args):
    b = _ball(cfg, args)
    hs = qm.hyperplanes(b)
    _write_dot(args.dot, lambda: b.to_dot(colored=True))
    return {"r": b.r, "hyperplanes": len(hs.planes),
            "interior": sum(h.interior for h in hs.planes),
            "well_defined": hs.well_defined,
            "classes": [{"id": h.id, "vertex": str(cfg.ctx.vid(h.label)), "edges": len(h.edges),
                         "interior": h.interior, "image": ext.format_vertex(cfg.ctx, h.image)}
                        for h in hs.planes[:args.limit]]}


def _plane_graph_report(cfg, args, fn):
    b = _ball(cfg, args)
    g = fn(b, interior_only=not args.all)
    _write_dot(args.dot, lambda: g.to_dot("planes"))
    return {"r": b.r, "vertices": len(g), "edges": len(g.edges)}


def cmd_qm_crossing(cfg, args):
    return _plane_graph_report(cfg, args, qm.crossing_graph)


def cmd_qm_contact(cfg, args):
    return _plane_graph_report(cfg, args, qm.contact_graph)


def cmd_qm_verify_iso(cfg, args):
    b = _ball(cfg, args)
    return qm.verify_iso(cfg.ctx, b, _window(cfg, _budget(args, cfg, "L")))


def _wreath_ctx(cfg):
    return wr.WreathContext(cfg.ctx, cfg.action())


def _welem(w, text: str):
    f, _, g = text.partition("|")
    return w.element(w.ctx.parse(f), g.strip() or 0)


def cmd_wreath_mul(cfg, args):
    w = _wreath_ctx(cfg)
    acc = w.identity
    for t in args.elements:
        acc = wr.wmul(w, acc, _welem(w, t))
    return {"product": w.format(acc)}


def cmd_wreath_stab_edge(cfg, args):
    e = _vertex_list(cfg.ctx, args.edge)
    if len(e) != 2:
        raise InputError("--edge takes two comma-separated vertices")
    return wr.edge_stabilizer(_wreath_ctx(cfg), e, verify_L=args.verify_L)


def cmd_wreath_peripherals(cfg, args):
    fam = wr.parabolic_family(_wreath_ctx(cfg))
    return {"orbits": len(fam), "peripheral": [f["vertex"] for f in fam if f["infinite"]], "family": fam}


# ----------------------------------------------------------------------------
# parser


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--config", required=True, help="JSON context file")
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.add_argument("--jobs", type=int, default=None, help="worker processes for sampled checks")
    p.add_argument("--seed", type=int, default=None, help="override the config seed")
    p.add_argument("--L", type=int, default=None, help="window budget (syllable length)")
    p.add_argument("--r", type=int, default=None, help="Cayley ball radius")
    p.add_argument("--cap", type=int, default=None, help="enumeration cap")
    p.add_argument("--dot", default=None, metavar="PATH", help="write a DOT drawing")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    top = argparse.ArgumentParser(prog="gpwb", description="Graph products and extension graphs")
    sub = top.add_subparsers(dest="command", required=True)

    def leaf(parent, name, fn, help_):
        p = parent.add_parser(name, parents=[common], help=help_)
        p.set_defaults(fn=fn)
        return p

    p = leaf(sub, "normalize", cmd_normalize, "canonical normal form of a word")
    p.add_argument("word")
    p = leaf(sub, "mul", cmd_mul, "product of words")
    p.add_argument("words", nargs="+")
    p = leaf(sub, "support", cmd_support, "support of an element")
    p.add_argument("word")
    leaf(sub, "girth", cmd_girth, "girth of the defining graph")
    for name, fn, hlp in (("coset-canon", cmd_coset_canon, "canonical left coset representative mod G_S"),
                          ("in-parabolic", cmd_in_parabolic, "membership in G_S and in G_S x G_T")):
        p = leaf(sub, name, fn, hlp)
        p.add_argument("word")
        p.add_argument("--S", default=None, help="comma-separated vertex set")
        p.add_argument("--star", default=None, help="use St(v) as the vertex set")
        if name == "in-parabolic":
            p.add_argument("--T", default=None, help="second set: test membership in P_S P_T")
    p = leaf(sub, "stab-meet", cmd_stab_meet, "intersection of two vertex stabilizers")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--verify-L", type=int, default=None, dest="verify_L")

    e = sub.add_parser("ext", help="extension graph").add_subparsers(dest="sub", required=True)
    p = leaf(e, "build", cmd_ext_build, "build a window")
    p.add_argument("--full", action="store_true", help="include vertex and edge lists")
    p = leaf(e, "dist", cmd_ext_dist, "certified distance")
    p.add_argument("x")
    p.add_argument("y")
    p = leaf(e, "girth", cmd_ext_girth, "shortest circuits through base edges")
    p.add_argument("--n-max", type=int, default=None, dest="n_max")
    p = leaf(e, "census-doubling", cmd_ext_census_doubling, "girth circuits through St(v)")
    p.add_argument("--vertex", required=True)
    p = leaf(e, "circuits", cmd_ext_circuits, "bounded circuits through a base edge")
    p.add_argument("--edge", required=True)
    p.add_argument("--n", type=int, default=None)
    for name, fn, default in (("verify-bigon", cmd_ext_verify_bigon, 200),
                              ("verify-triangle", cmd_ext_verify_triangle, 50),
                              ("greenlinger", cmd_ext_greenlinger, 100)):
        p = leaf(e, name, fn, "find and re-check witnesses")
        p.add_argument("--count", type=int, default=default)
        p.add_argument("--paths", default=None, help="JSON file of inputs instead of sampling")
    p = leaf(e, "planes", cmd_ext_planes, "plane-count bound on sampled geodesics")
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--k-max", type=int, default=5, dest="k_max")
    p = leaf(e, "tightness", cmd_ext_tightness, "tightness constants and sampled check")
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--delta", type=int, default=None)
    p.add_argument("--f-mode", choices=["vertices", "circuits"], default="vertices", dest="f_mode")
    p.add_argument("--count", type=int, default=0)
    p = leaf(e, "asdim-cover", cmd_ext_asdim_cover, "cover pieces and their separation")
    p.add_argument("--o", required=True, help="root vertex, e.g. v0@1")
    p.add_argument("--R", type=int, nargs="+", default=[0, 1])
    p.add_argument("--r-sep", type=int, default=2, dest="r_sep")

    q = sub.add_parser("qm", help="quasi-median Cayley graph").add_subparsers(dest="sub", required=True)
    leaf(q, "ball", cmd_qm_ball, "Cayley ball")
    p = leaf(q, "hyperplanes", cmd_qm_hyperplanes, "hyperplane classes")
    p.add_argument("--limit", type=int, default=50)
    for name, fn in (("crossing", cmd_qm_crossing), ("contact", cmd_qm_contact)):
        p = leaf(q, name, fn, f"{name} graph of hyperplanes")
        p.add_argument("--all", action="store_true", help="include boundary hyperplanes")
    leaf(q, "verify-iso", cmd_qm_verify_iso, "compare hyperplanes with the extension graph")

    w = sub.add_parser("wreath", help="graph-wreath product").add_subparsers(dest="sub", required=True)
    p = leaf(w, "mul", cmd_wreath_mul, "multiply elements written word|g")
    p.add_argument("elements", nargs="+")
    p = leaf(w, "stab-edge", cmd_wreath_stab_edge, "stabilizer of a base edge")
    p.add_argument("--edge", required=True)
    p.add_argument("--verify-L", type=int, default=2, dest="verify_L")
    leaf(w, "peripherals", cmd_wreath_peripherals, "vertex-orbit parabolic family")
    return top


def run(argv: Sequence[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 3
    if args.jobs is None:
        args.jobs = os.cpu_count() or 1
    try:
        cfg = load_config(args.config)
        if args.cap is not None:
            cfg.budgets["circuit_cap"] = args.cap
        report = args.fn(cfg, args)
    except GpwbError as exc:
        err.write(f"gpwb: {type(exc).__name__}: {exc}\n")
        return exc.exit_code
    _emit(report, args.json, out)
    status = report.get("status") if isinstance(report, Mapping) else None
    if status == "failed":
        err.write("gpwb: verification failed\n")
        return 1
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
