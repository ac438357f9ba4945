"""Dimazes, directed paths and linkages, plus the ``dimaze v1`` text format."""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Sequence

from .errors import ContractViolation, ParseError, UnknownVertexError

Edge = tuple[str, str]

HEADER = "dimaze v1"


@dataclass(frozen=True)
class Dimaze:
    """A finite digraph with a set of exits.

    Construction normalizes but does not validate: ``vertices`` is sorted and
    deduplicated, ``edges`` and ``exits`` become frozensets. Use :func:`validate`
    to list invariant violations.
    """

    vertices: tuple[str, ...]
    edges: frozenset[Edge]
    exits: frozenset[str]

    def __post_init__(self) -> None:
        object.__setattr__(self, "vertices", tuple(sorted(set(self.vertices))))
        object.__setattr__(self, "edges", frozenset((str(t), str(h)) for t, h in self.edges))
        object.__setattr__(self, "exits", frozenset(self.exits))

    @cached_property
    def vertex_set(self) -> frozenset[str]:
        return frozenset(self.vertices)

    @cached_property
    def succ(self) -> dict[str, tuple[str, ...]]:
        out: dict[str, list[str]] = {v: [] for v in self.vertices}
        for t, h in self.edges:
            out.setdefault(t, []).append(h)
        return {v: tuple(sorted(hs)) for v, hs in out.items()}

    @cached_property
    def pred(self) -> dict[str, tuple[str, ...]]:
        into: dict[str, list[str]] = {v: [] for v in self.vertices}
        for t, h in self.edges:
            into.setdefault(h, []).append(t)
        return {v: tuple(sorted(ts)) for v, ts in into.items()}

    def out_degree(self, v: str) -> int:
        return len(self.succ.get(v, ()))

    def has_edge(self, tail: str, head: str) -> bool:
        return (tail, head) in self.edges

    def with_exits(self, exits: Iterable[str]) -> Dimaze:
        """Same digraph, different exit set."""
        return Dimaze(self.vertices, self.edges, frozenset(exits))

    def sorted_edges(self) -> list[Edge]:
        return sorted(self.edges)


def validate(d: Dimaze) -> list[str]:
    """Return every invariant violation of ``d``; an empty list means valid."""
    problems: list[str] = []
    vs = d.vertex_set
    for t, h in d.sorted_edges():
        if t == h:
            problems.append(f"self-loop at {t}")
        for end in (t, h):
            if end not in vs:
                problems.append(f"edge {t}->{h}: unknown vertex {end}")
    for b in sorted(d.exits):
        if b not in vs:
            problems.append(f"exit {b} is not a vertex")
        deg = d.out_degree(b)
        if deg:
            problems.append(f"exit {b} has out-degree {deg}")
    return problems


@dataclass(frozen=True)
class DirectedPath:
    """A nonempty sequence of distinct vertices; a single vertex is a trivial path."""

    vertices: tuple[str, ...]

    def __post_init__(self) -> None:
        vs = tuple(self.vertices)
        object.__setattr__(self, "vertices", vs)
        if not vs:
            raise ContractViolation("a path has at least one vertex")
        if len(set(vs)) != len(vs):
            raise ContractViolation(f"path repeats a vertex: {'>'.join(vs)}")

    @classmethod
    def of(cls, *vertices: str) -> DirectedPath:
        return cls(tuple(vertices))

    @property
    def initial(self) -> str:
        return self.vertices[0]

    @property
    def terminal(self) -> str:
        return self.vertices[-1]

    @property
    def trivial(self) -> bool:
        return len(self.vertices) == 1

    def __len__(self) -> int:
        return len(self.vertices)

    def __iter__(self) -> Iterator[str]:
        return iter(self.vertices)

    def __contains__(self, v: object) -> bool:
        return v in self.vertices

    def __str__(self) -> str:
        return ">".join(self.vertices)

    def index(self, v: str) -> int:
        return self.vertices.index(v)

    def edges(self) -> list[Edge]:
        vs = self.vertices
        return list(zip(vs, vs[1:]))

    # Segment notation: Pw, P(w excluded), wP, (w excluded)P, PwQ.
    def upto(self, w: str) -> DirectedPath:
        return DirectedPath(self.vertices[: self.index(w) + 1])

    def before(self, w: str) -> tuple[str, ...]:
        return self.vertices[: self.index(w)]

    def from_(self, w: str) -> DirectedPath:
        return DirectedPath(self.vertices[self.index(w):])

    def after(self, w: str) -> tuple[str, ...]:
        return self.vertices[self.index(w) + 1:]

    def join(self, w: str, other: DirectedPath) -> DirectedPath:
        """``PwQ``: this path up to ``w`` followed by ``other`` from ``w`` on."""
        return DirectedPath(self.vertices[: self.index(w)] + other.vertices[other.index(w):])

    def sort_key(self) -> tuple[str, ...]:
        return self.vertices


@dataclass(frozen=True)
class Linkage:
    """A set of pairwise vertex-disjoint directed paths."""

    paths: frozenset[DirectedPath]

    def __post_init__(self) -> None:
        object.__setattr__(self, "paths", frozenset(self.paths))
        seen: dict[str, DirectedPath] = {}
        for p in self.sorted_paths():
            for v in p.vertices:
                if v in seen:
                    raise ContractViolation(f"paths {seen[v]} and {p} share vertex {v}")
                seen[v] = p
        object.__setattr__(self, "_owner", seen)

    @classmethod
    def of(cls, *paths: Sequence[str] | DirectedPath) -> Linkage:
        return cls(frozenset(p if isinstance(p, DirectedPath) else DirectedPath(tuple(p)) for p in paths))

    @classmethod
    def empty(cls) -> Linkage:
        return cls(frozenset())

    def __len__(self) -> int:
        return len(self.paths)

    def __iter__(self) -> Iterator[DirectedPath]:
        return iter(self.sorted_paths())

    def __str__(self) -> str:
        return "; ".join(str(p) for p in self.sorted_paths()) or "-"

    def sorted_paths(self) -> list[DirectedPath]:
        return sorted(self.paths, key=DirectedPath.sort_key)

    def ini(self) -> frozenset[str]:
        return frozenset(p.initial for p in self.paths)

    def ter(self) -> frozenset[str]:
        return frozenset(p.terminal for p in self.paths)

    @cached_property
    def vertex_set(self) -> frozenset[str]:
        return frozenset(self._owner)  # type: ignore[attr-defined]

    @cached_property
    def edge_set(self) -> frozenset[Edge]:
        return frozenset(e for p in self.paths for e in p.edges())

    def path_through(self, v: str) -> DirectedPath | None:
        return self._owner.get(v)  # type: ignore[attr-defined]

    def path_from(self, x: str) -> DirectedPath | None:
        p = self.path_through(x)
        return p if p is not None and p.initial == x else None

    def path_to(self, y: str) -> DirectedPath | None:
        p = self.path_through(y)
        return p if p is not None and p.terminal == y else None

    def to_json(self) -> list[list[str]]:
        return [list(p.vertices) for p in self.sorted_paths()]


def linkage_violations(d: Dimaze, link: Linkage) -> list[str]:
    """Problems that stop ``link`` from being a linkage in ``d``."""
    problems = []
    for p in link.sorted_paths():
        for v in p.vertices:
            if v not in d.vertex_set:
                problems.append(f"path {p}: unknown vertex {v}")
        for t, h in p.edges():
            if not d.has_edge(t, h):
                problems.append(f"path {p}: {t}->{h} is not an edge")
        if p.terminal not in d.exits:
            problems.append(f"path {p} ends at non-exit {p.terminal}")
    return problems


def require_linkage(d: Dimaze, link: Linkage, what: str = "linkage") -> None:
    problems = linkage_violations(d, link)
    if problems:
        raise ContractViolation(f"{what} is not a linkage: " + "; ".join(problems))


# --- text, JSON and DOT formats -------------------------------------------


def _lines(text: str) -> Iterator[tuple[int, list[str]]]:
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].strip()
        if body:
            yield lineno, body.split()


def parse(text: str) -> Dimaze:
    """Parse the ``dimaze v1`` format. Vertex order is normalized lexicographically."""
    lines = _lines(text)
    first = next(lines, None)
    if first is None or first[1] != HEADER.split():
        raise ParseError(f"expected header '{HEADER}'", first[0] if first else None)

    vertices: list[str] = []
    declared: set[str] = set()
    exits: list[tuple[int, str]] = []
    edges: list[tuple[int, str, str]] = []
    seen_edges: set[Edge] = set()
    for lineno, toks in lines:
        kind, args = toks[0], toks[1:]
        if kind == "vertex" and len(args) == 1:
            if args[0] in declared:
                raise ParseError(f"duplicate vertex {args[0]}", lineno)
            declared.add(args[0])
            vertices.append(args[0])
        elif kind == "exit" and len(args) == 1:
            exits.append((lineno, args[0]))
        elif kind == "edge" and len(args) == 2:
            if tuple(args) in seen_edges:
                raise ParseError(f"duplicate edge {args[0]} {args[1]}", lineno)
            seen_edges.add((args[0], args[1]))
            edges.append((lineno, args[0], args[1]))
        else:
            raise ParseError(f"cannot parse {' '.join(toks)!r}", lineno)

    for lineno, b in exits:
        if b not in declared:
            raise UnknownVertexError(f"exit {b} is not a declared vertex", lineno)
    for lineno, t, h in edges:
        for end in (t, h):
            if end not in declared:
                raise UnknownVertexError(f"edge {t} {h}: unknown vertex {end}", lineno)
    return Dimaze(tuple(vertices), frozenset((t, h) for _, t, h in edges), frozenset(b for _, b in exits))


def serialize(d: Dimaze) -> str:
    out = [HEADER]
    out += [f"vertex {v}" for v in d.vertices]
    out += [f"exit {b}" for b in sorted(d.exits)]
    out += [f"edge {t} {h}" for t, h in d.sorted_edges()]
    return "\n".join(out) + "\n"


def to_json(d: Dimaze) -> dict:
    return {
        "vertices": list(d.vertices),
        "edges": [list(e) for e in d.sorted_edges()],
        "exits": sorted(d.exits),
    }


def from_json(data: dict | str) -> Dimaze:
    if isinstance(data, str):
        data = json.loads(data)
    return Dimaze(tuple(data["vertices"]), frozenset(tuple(e) for e in data["edges"]), frozenset(data["exits"]))


def to_dot(d: Dimaze, linkage: Linkage | None = None) -> str:
    """Graphviz source; exits are drawn as double circles, linkage edges in bold."""
    bold = linkage.edge_set if linkage is not None else frozenset()
    out = ["digraph dimaze {"]
    for v in d.vertices:
        attrs = " [shape=doublecircle]" if v in d.exits else ""
        out.append(f'  "{v}"{attrs};')
    for t, h in d.sorted_edges():
        attrs = " [penwidth=2.5]" if (t, h) in bold else ""
        out.append(f'  "{t}" -> "{h}"{attrs};')
    out.append("}")
    return "\n".join(out) + "\n"
