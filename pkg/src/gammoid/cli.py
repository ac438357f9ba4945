"""Command-line front end.

Exit codes: 0 success or property holds, 1 property fails (dependent set,
failing axiom, maximal-iff-onto witness found, probe bound exceeded, internal cross-check),
2 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from typing import Callable, Sequence, TextIO

from . import dimaze as dz
from .dimaze import Dimaze, DirectedPath, Linkage
from .errors import ConsistencyError, GammoidError, ParseError
from .families import FAMILIES, RULES, FamilyGenerator, generate
from .linkage import extend_onto, is_independent, max_linkage
from .matroid import MatroidView, check_axioms, circuits, cocircuits, finitarisation_probe, separation_value
from .pym import check_dagger, comb_trace, exchange, format_trace, merge
from .transversal import (
    BipartiteGraph,
    bigraph_to_json,
    dimaze_tree_to_bipartite,
    parse_bigraph,
    serialize_bigraph,
    stage_violations,
    tree_maximal_extension,
)

SETSYSTEM_HEADER = "setsystem v1"


# --- argument syntax ---------------------------------------------------------


_SET_ITEM = re.compile(r"(?:\([^()]*\)|[^,(])+")


def parse_set(text: str) -> frozenset[str]:
    """``a,b,c``; the literal ``-`` is the empty set.

    Commas inside parentheses belong to the name, so grid cells like ``(1,2)``
    can be listed directly.
    """
    text = text.strip()
    if text == "-":
        return frozenset()
    items = [t.strip() for t in _SET_ITEM.findall(text)]
    if not all(items) or ",".join(items) != text.replace(" ", ""):
        raise ParseError(f"malformed vertex set {text!r}")
    return frozenset(items)


def parse_linkage(text: str) -> Linkage:
    """``a>b>c;d``: paths separated by ``;``, vertices by ``>``; ``-`` is empty."""
    text = text.strip()
    if text == "-":
        return Linkage.empty()
    paths = []
    for chunk in text.split(";"):
        vs = [v.strip() for v in chunk.split(">")]
        if not all(vs):
            raise ParseError(f"malformed path {chunk!r}")
        paths.append(DirectedPath(tuple(vs)))
    return Linkage.of(*paths)


def fmt_set(S) -> str:
    return ",".join(sorted(S)) or "-"


def parse_krange(text: str) -> list[int]:
    """``3..6``, ``3-6`` or ``3,4,6``."""
    try:
        for sep in ("..", "-"):
            if sep in text:
                lo, hi = text.split(sep, 1)
                return list(range(int(lo), int(hi) + 1))
        return [int(t) for t in text.split(",")]
    except ValueError:
        raise ParseError(f"malformed k range {text!r}") from None


def parse_setsystem(text: str) -> MatroidView:
    lines = [(n, b.split()) for n, raw in enumerate(text.splitlines(), 1) if (b := raw.split("#", 1)[0].strip())]
    if not lines or lines[0][1] != SETSYSTEM_HEADER.split():
        raise ParseError(f"expected header '{SETSYSTEM_HEADER}'", lines[0][0] if lines else None)
    ground: list[str] = []
    sets: list[frozenset[str]] = []
    for lineno, toks in lines[1:]:
        if toks[0] == "element" and len(toks) == 2:
            if toks[1] in ground:
                raise ParseError(f"duplicate element {toks[1]}", lineno)
            ground.append(toks[1])
        elif toks[0] == "independent":
            members = [t for t in toks[1:] if t != "-"]
            unknown = [t for t in members if t not in ground]
            if unknown:
                raise ParseError(f"unknown element {unknown[0]}", lineno)
            sets.append(frozenset(members))
        else:
            raise ParseError(f"cannot parse {' '.join(toks)!r}", lineno)
    return MatroidView.from_independent_sets(ground, sets)


# --- input -------------------------------------------------------------------


def _read(args) -> str:
    if args.input in (None, "-"):
        return sys.stdin.read()
    with open(args.input, encoding="utf-8") as fh:
        return fh.read()


def _header(text: str) -> str:
    for raw in text.splitlines():
        body = raw.split("#", 1)[0].strip()
        if body:
            return body
    return ""


def _parse_dimaze(text: str) -> Dimaze:
    # the JSON written by --json is accepted back as input
    if text.lstrip().startswith("{"):
        try:
            return dz.from_json(text)
        except (ValueError, KeyError, TypeError) as exc:
            raise ParseError(f"bad dimaze JSON: {exc}") from exc
    return dz.parse(text)


def load_dimaze(args) -> Dimaze:
    d = _parse_dimaze(_read(args))
    problems = dz.validate(d)
    if problems:
        raise ParseError("invalid dimaze: " + "; ".join(problems))
    return d


def load_bigraph(args) -> BipartiteGraph:
    return parse_bigraph(_read(args))


def load_view(args) -> tuple[MatroidView, Dimaze | None]:
    text = _read(args)
    head = _header(text)
    if head == dz.HEADER or head.startswith("{"):
        d = _parse_dimaze(text)
        return MatroidView.from_dimaze(d), d
    if head == "bigraph v1":
        return MatroidView.from_bigraph(parse_bigraph(text)), None
    if head == SETSYSTEM_HEADER:
        return parse_setsystem(text), None
    raise ParseError(f"unknown input format {head!r}; expected dimaze v1, bigraph v1 or {SETSYSTEM_HEADER}", 1)


# --- output ------------------------------------------------------------------


class Out:
    def __init__(self, args, stream: TextIO):
        self.args = args
        self.stream = stream

    def emit(self, text: str, data: dict | None = None, dot: str | None = None) -> None:
        if getattr(self.args, "dot", False) and dot is not None:
            self.stream.write(dot)
        elif getattr(self.args, "json", False) and data is not None:
            self.stream.write(json.dumps(data, indent=2, sort_keys=True) + "\n")
        else:
            self.stream.write(text if text.endswith("\n") else text + "\n")


# --- subcommands -------------------------------------------------------------


def cmd_gen(args, out: Out) -> int:
    g = FamilyGenerator(args.family, args.k, args.n, args.b)
    d = generate(g)
    out.emit(dz.serialize(d), dz.to_json(d), dz.to_dot(d))
    return 0


def cmd_validate(args, out: Out) -> int:
    d = _parse_dimaze(_read(args))
    problems = dz.validate(d)
    out.emit("ok" if not problems else "\n".join(problems), {"valid": not problems, "problems": problems})
    return 1 if problems else 0


def cmd_indep(args, out: Out) -> int:
    d = load_dimaze(args)
    res = is_independent(d, parse_set(args.set))
    data = {"independent": res.independent, "witness": res.witness.to_json() if res else None}
    text = f"true\n{res.witness}" if res else "false"
    out.emit(text, data, dz.to_dot(d, res.witness if res else None))
    return 0 if res else 1


def cmd_link(args, out: Out) -> int:
    d = load_dimaze(args)
    link, sep = max_linkage(d, parse_set(args.set))
    data = {"size": len(link), "linkage": link.to_json(), "separator": sorted(sep.separator)}
    out.emit(f"size {len(link)}\nlinkage {link}\nseparator {fmt_set(sep.separator)}", data, dz.to_dot(d, link))
    return 0


def cmd_extend_onto(args, out: Out) -> int:
    d = load_dimaze(args)
    link = extend_onto(d, parse_linkage(args.linkage))
    out.emit(str(link), {"linkage": link.to_json()}, dz.to_dot(d, link))
    return 0


def cmd_merge(args, out: Out) -> int:
    d = load_dimaze(args)
    res = merge(d, parse_linkage(args.red), parse_linkage(args.blue), record=args.trace)
    st = res.state
    data = {
        "linkage": res.linkage.to_json(),
        "steps": st.step,
        "f": dict(sorted(st.f.items())),
        "t": dict(sorted(st.t.items())),
        "A": [list(p.vertices) for p in st.A],
        "B": [list(p.vertices) for p in st.B],
        "C": [list(p.vertices) for p in st.C],
    }
    text = format_trace(res) if args.trace else str(res.linkage)
    out.emit(text, data, dz.to_dot(d, res.linkage))
    return 0


def cmd_exchange(args, out: Out) -> int:
    d = load_dimaze(args)
    res = exchange(d, parse_set(args.I), parse_set(args.J), args.v)
    data = {"u": res.u, "none_needed": res.none_needed, "witness": res.witness.to_json(), "cases": list(res.cases)}
    head = "none needed" if res.none_needed else f"u {res.u}"
    out.emit(f"{head}\nwitness {res.witness}", data)
    return 0


def cmd_comb_trace(args, out: Out) -> int:
    d = load_dimaze(args)
    c = comb_trace(d, parse_set(args.I), args.x0, args.depth, parse_set(args.frontier))
    data = {
        "depth": c.depth,
        "x": list(c.x),
        "p": list(c.p),
        "q": list(c.q),
        "settle_steps": list(c.settle_steps),
        "blue_segments": [list(s.vertices) for s in c.blue_segments],
        "red_segments": [list(s.vertices) for s in c.red_segments],
        "teeth": [list(s.vertices) for s in c.teeth],
        "stopped": c.stopped,
    }
    lines = [f"depth {c.depth}", f"stopped: {c.stopped}"]
    for k, (b, r, t) in enumerate(zip(c.blue_segments, c.red_segments, c.teeth), start=1):
        lines.append(f"{k}: blue {b} red {r} tooth {t} step {c.settle_steps[k]}")
    out.emit("\n".join(lines), data)
    return 0


def cmd_dagger(args, out: Out) -> int:
    d = load_dimaze(args)
    ws = check_dagger(d)
    data = {
        "holds": not ws,
        "witnesses": [
            {
                "kind": w.kind,
                "base": sorted(w.base),
                "extra": w.extra,
                "onto": w.onto.to_json() if w.onto else None,
                "larger": w.larger.to_json() if w.larger else None,
            }
            for w in ws
        ],
    }
    text = "holds" if not ws else "\n".join(f"{w.kind} {fmt_set(w.base)}" for w in ws)
    out.emit(text, data)
    return 1 if ws else 0


def cmd_axioms(args, out: Out) -> int:
    m, _ = load_view(args)
    rep = check_axioms(m)
    out.emit(str(rep), rep.to_json())
    return 0 if rep.ok else 1


def cmd_circuits(args, out: Out) -> int:
    m, _ = load_view(args)
    fn = cocircuits if args.co else circuits
    found = fn(m, args.max)
    key = "cocircuits" if args.co else "circuits"
    out.emit("\n".join(fmt_set(c) for c in found) or "none", {key: [sorted(c) for c in found]})
    return 0


def cmd_separation(args, out: Out) -> int:
    m, _ = load_view(args)
    rep = separation_value(m, parse_set(args.X), seed=args.seed, exhaustive=args.exhaustive)
    seps = ", ".join(f"{k}:{'yes' if v else 'no'}" for k, v in rep.separations().items())
    text = f"d {rep.d}\norder {rep.order if rep.order is not None else '-'}\nk-separation {seps}"
    out.emit(text, rep.to_json())
    return 0


def cmd_finprobe(args, out: Out) -> int:
    g = FamilyGenerator(args.family, 1, args.n, args.b)
    rep = finitarisation_probe(
        g, args.rule, parse_krange(args.krange), slack=args.slack, samples=args.samples, seed=args.seed
    )
    out.emit(str(rep), rep.to_json())
    if args.bound is not None and any(r.max_distance > args.bound for r in rep.rows):
        return 1
    return 0


def cmd_tree_base(args, out: Out) -> int:
    g = load_bigraph(args)
    ext = tree_maximal_extension(g, parse_set(args.I))
    problems = stage_violations(g, ext)
    data = {
        "B": sorted(ext.B),
        "matching": ext.matching.to_json(),
        "gamma": ext.gamma,
        "U": sorted(ext.U),
        "stages": [
            {
                "alpha": st.alpha,
                "matching": st.matching.to_json(),
                "C": sorted(st.C),
                "S": sorted(st.S),
                "paths": {v: list(p) for v, p in sorted(st.paths.items())},
            }
            for st in ext.history
        ],
        "violations": problems,
    }
    lines = [f"B {fmt_set(ext.B)}", f"matching {ext.matching}", f"gamma {ext.gamma}"]
    for st in ext.history:
        lines.append(f"stage {st.alpha}: C {fmt_set(st.C)} S {fmt_set(st.S)} m {st.matching}")
    lines += problems
    out.emit("\n".join(lines), data)
    return 1 if problems else 0


def cmd_to_bigraph(args, out: Out) -> int:
    g = dimaze_tree_to_bipartite(load_dimaze(args))
    out.emit(serialize_bigraph(g), bigraph_to_json(g))
    return 0


# --- parser --------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--in", dest="input", metavar="PATH", help="input file (default: stdin)")
    common.add_argument("--json", action="store_true", help="JSON output")
    common.add_argument("--dot", action="store_true", help="Graphviz output where available")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized choices")

    p = argparse.ArgumentParser(prog="gammoid", description="Linkability systems of dimazes and transversal matroids.")
    sub = p.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(name: str, fn: Callable, help_: str) -> argparse.ArgumentParser:
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.set_defaults(fn=fn)
        return sp

    sp = add("gen", cmd_gen, "print a truncation of a named family")
    sp.add_argument("family", choices=FAMILIES)
    sp.add_argument("k", type=int)
    sp.add_argument("--n", type=int, help="turbine copies")
    sp.add_argument("--b", type=int, help="branching_tree branching")

    add("validate", cmd_validate, "check dimaze invariants")
    add("indep", cmd_indep, "independence with witness linkage").add_argument("set")
    add("link", cmd_link, "maximum linkage and separator").add_argument("set")
    add("extend-onto", cmd_extend_onto, "extend a linkage onto the exits").add_argument("linkage", nargs="?", default="-")

    sp = add("merge", cmd_merge, "merge a red and a blue linkage")
    sp.add_argument("red")
    sp.add_argument("blue")
    sp.add_argument("--trace", action="store_true", help="print the per-step trace")

    sp = add("exchange", cmd_exchange, "exchange element u for v")
    sp.add_argument("I")
    sp.add_argument("J")
    sp.add_argument("v")

    sp = add("comb-trace", cmd_comb_trace, "bounded alternating comb trace")
    sp.add_argument("I")
    sp.add_argument("x0")
    sp.add_argument("--depth", type=int, default=10)
    sp.add_argument("--frontier", default="-", help="exits the blue linkage may miss")

    add("dagger", cmd_dagger, "sets violating maximal iff onto-linkable")
    add("axioms", cmd_axioms, "check the independence and base axioms")
    sp = add("circuits", cmd_circuits, "enumerate circuits")
    sp.add_argument("--max", type=int, default=None)
    sp.add_argument("--co", action="store_true", help="cocircuits instead")

    sp = add("separation", cmd_separation, "separation value of (X, E - X)")
    sp.add_argument("X")
    sp.add_argument("--exhaustive", action="store_true")

    sp = add("finprobe", cmd_finprobe, "finitarisation probe on a family")
    sp.add_argument("family", choices=FAMILIES)
    sp.add_argument("rule", choices=sorted(RULES))
    sp.add_argument("krange")
    sp.add_argument("--n", type=int)
    sp.add_argument("--b", type=int)
    sp.add_argument("--slack", type=int)
    sp.add_argument("--samples", type=int, default=64)
    sp.add_argument("--bound", type=int, help="exit 1 if some deletion distance exceeds this")

    add("tree-base", cmd_tree_base, "maximal extension in a bipartite tree").add_argument("I")
    add("to-bigraph", cmd_to_bigraph, "bipartite tree of a dimaze tree")
    return p


def run(argv: Sequence[str] | None = None, stdout: TextIO | None = None, stderr: TextIO | None = None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    try:
        return args.fn(args, Out(args, stdout))
    except ConsistencyError as exc:
        stderr.write(f"internal check failed: {exc}\n")
        return 1
    except GammoidError as exc:
        stderr.write(f"error: {exc}\n")
        return 2
    except OSError as exc:
        stderr.write(f"error: {exc}\n")
        return 2


def main() -> None:
    sys.exit(run())
