"""Transversal matroids of bipartite graphs and the stage construction on trees."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator

from .dimaze import Dimaze
from .errors import ConsistencyError, ContractViolation, ModeError, ParseError, UnknownVertexError

HEADER = "bigraph v1"
Pair = tuple[str, str]  # (left, right)


@dataclass(frozen=True)
class BipartiteGraph:
    """Edges are ``(v, w)`` pairs with ``v`` on the left (V) and ``w`` on the right (W)."""

    left: tuple[str, ...]
    right: tuple[str, ...]
    edges: frozenset[Pair]
    root: str | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "left", tuple(sorted(set(self.left))))
        object.__setattr__(self, "right", tuple(sorted(set(self.right))))
        object.__setattr__(self, "edges", frozenset((str(v), str(w)) for v, w in self.edges))
        both = set(self.left) & set(self.right)
        if both:
            raise ModeError(f"vertices on both sides: {', '.join(sorted(both))}")
        L, R = set(self.left), set(self.right)
        for v, w in sorted(self.edges):
            if v not in L or w not in R:
                raise ModeError(f"edge {v} {w} does not go from the left side to the right side")
        if self.root is not None and self.root not in R:
            raise ModeError(f"root {self.root} is not a right-side vertex")

    @cached_property
    def adj_left(self) -> dict[str, tuple[str, ...]]:
        out: dict[str, list[str]] = {v: [] for v in self.left}
        for v, w in self.edges:
            out[v].append(w)
        return {v: tuple(sorted(ws)) for v, ws in out.items()}

    @cached_property
    def adj_right(self) -> dict[str, tuple[str, ...]]:
        out: dict[str, list[str]] = {w: [] for w in self.right}
        for v, w in self.edges:
            out[w].append(v)
        return {w: tuple(sorted(vs)) for w, vs in out.items()}

    def neighbours(self, x: str) -> tuple[str, ...]:
        return self.adj_left.get(x) or self.adj_right.get(x, ())

    @property
    def vertices(self) -> tuple[str, ...]:
        return self.left + self.right


def is_tree(g: BipartiteGraph) -> bool:
    """Connected and acyclic (the empty graph is not a tree)."""
    vs = g.vertices
    if not vs or len(g.edges) != len(vs) - 1:
        return False
    seen = {vs[0]}
    stack = [vs[0]]
    while stack:
        x = stack.pop()
        for y in g.neighbours(x):
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return len(seen) == len(vs)


# --- text format --------------------------------------------------------------


def parse_bigraph(text: str) -> BipartiteGraph:
    lines: Iterator[tuple[int, list[str]]] = (
        (n, body.split()) for n, raw in enumerate(text.splitlines(), 1) if (body := raw.split("#", 1)[0].strip())
    )
    first = next(lines, None)
    if first is None or first[1] != HEADER.split():
        raise ParseError(f"expected header '{HEADER}'", first[0] if first else None)
    left: list[str] = []
    right: list[str] = []
    edges: list[tuple[int, str, str]] = []
    root: tuple[int, str] | None = None
    declared: set[str] = set()
    for lineno, toks in lines:
        kind, args = toks[0], toks[1:]
        if kind in ("left", "right") and len(args) == 1:
            if args[0] in declared:
                raise ParseError(f"duplicate vertex {args[0]}", lineno)
            declared.add(args[0])
            (left if kind == "left" else right).append(args[0])
        elif kind == "root" and len(args) == 1:
            if root is not None:
                raise ParseError("second root line", lineno)
            root = (lineno, args[0])
        elif kind == "edge" and len(args) == 2:
            edges.append((lineno, args[0], args[1]))
        else:
            raise ParseError(f"cannot parse {' '.join(toks)!r}", lineno)
    L, R = set(left), set(right)
    for lineno, v, w in edges:
        if v not in L:
            raise UnknownVertexError(f"edge {v} {w}: {v} is not a left vertex", lineno)
        if w not in R:
            raise UnknownVertexError(f"edge {v} {w}: {w} is not a right vertex", lineno)
    if root is not None and root[1] not in R:
        raise UnknownVertexError(f"root {root[1]} is not a right vertex", root[0])
    return BipartiteGraph(tuple(left), tuple(right), frozenset((v, w) for _, v, w in edges), root and root[1])


def serialize_bigraph(g: BipartiteGraph) -> str:
    out = [HEADER]
    out += [f"left {v}" for v in g.left]
    out += [f"right {w}" for w in g.right]
    if g.root is not None:
        out.append(f"root {g.root}")
    out += [f"edge {v} {w}" for v, w in sorted(g.edges)]
    return "\n".join(out) + "\n"


def bigraph_to_json(g: BipartiteGraph) -> dict:
    return {"left": list(g.left), "right": list(g.right), "edges": [list(e) for e in sorted(g.edges)], "root": g.root}


# --- matchings ---------------------------------------------------------------


@dataclass(frozen=True)
class Matching:
    """Pairwise disjoint ``(v, w)`` edges."""

    pairs: frozenset[Pair]

    def __post_init__(self) -> None:
        object.__setattr__(self, "pairs", frozenset(self.pairs))
        lefts = [v for v, _ in self.pairs]
        rights = [w for _, w in self.pairs]
        if len(set(lefts)) != len(lefts) or len(set(rights)) != len(rights):
            raise ContractViolation(f"edges {sorted(self.pairs)} are not disjoint")

    @classmethod
    def of(cls, mapping: dict[str, str]) -> Matching:
        return cls(frozenset(mapping.items()))

    @cached_property
    def partner(self) -> dict[str, str]:
        out = {}
        for v, w in self.pairs:
            out[v] = w
            out[w] = v
        return out

    @property
    def left(self) -> frozenset[str]:
        return frozenset(v for v, _ in self.pairs)

    @property
    def right(self) -> frozenset[str]:
        return frozenset(w for _, w in self.pairs)

    def __len__(self) -> int:
        return len(self.pairs)

    def __str__(self) -> str:
        return ", ".join(f"{v}-{w}" for v, w in sorted(self.pairs)) or "-"

    def to_json(self) -> list[list[str]]:
        return [list(p) for p in sorted(self.pairs)]


def _kuhn(g: BipartiteGraph, I: Iterable[str], banned: frozenset[Pair] = frozenset()) -> dict[str, str] | None:
    match_r: dict[str, str] = {}

    def try_match(v: str, seen: set[str]) -> bool:
        for w in g.adj_left.get(v, ()):
            if (v, w) in banned or w in seen:
                continue
            seen.add(w)
            if w not in match_r or try_match(match_r[w], seen):
                match_r[w] = v
                return True
        return False

    for v in sorted(I):
        if not try_match(v, set()):
            return None
    return {v: w for w, v in match_r.items()}


@dataclass(frozen=True)
class MTIndependence:
    independent: bool
    witness: Matching | None

    def __bool__(self) -> bool:
        return self.independent


def mt_is_independent(g: BipartiteGraph, I: Iterable[str]) -> MTIndependence:
    """Whether ``I`` is matchable into the right side; the witness saturates ``I``."""
    I = frozenset(I)
    unknown = I - set(g.left)
    if unknown:
        raise ContractViolation(f"not left vertices: {', '.join(sorted(unknown))}")
    m = _kuhn(g, I)
    return MTIndependence(m is not None, Matching.of(m) if m is not None else None)


@dataclass(frozen=True)
class MTAugmentation:
    """``y`` with ``I + y`` independent, the alternating path that found it and the new matching."""

    y: str
    x: str
    path: tuple[str, ...]
    matching: Matching


def mt_augment(g: BipartiteGraph, I: Iterable[str], B: Iterable[str]) -> MTAugmentation:
    """Exchange for transversal systems along an ``m``--``m'`` alternating path.

    ``x`` is the least left vertex outside ``I`` with ``I + x`` independent,
    ``m`` a matching of ``I + x`` and ``m'`` one of ``B``. Starting at ``x`` the
    path follows an ``m``-edge, then an ``m'``-edge, and so on, until it reaches
    a vertex of ``B - I``.
    """
    I, B = frozenset(I), frozenset(B)
    if not mt_is_independent(g, I):
        raise ContractViolation("I is not independent")
    mb = mt_is_independent(g, B)
    if not mb:
        raise ContractViolation("B is not independent")
    for v in g.left:
        if v not in B and mt_is_independent(g, B | {v}):
            raise ContractViolation(f"B is not maximal: B+{v} is independent")
    x = next((v for v in g.left if v not in I and mt_is_independent(g, I | {v})), None)
    if x is None:
        raise ContractViolation("I is maximal")
    m = dict(mt_is_independent(g, I | {x}).witness.pairs)
    m_prime = mb.witness.partner
    path = [x]
    v = x
    while not (v in B and v not in I):
        w = m[v]
        path.append(w)
        if w not in m_prime:
            raise ConsistencyError(f"{w} is unmatched by m' although B is maximal")
        v = m_prime[w]
        if v in path:
            raise ConsistencyError("alternating path revisits a vertex")
        path.append(v)
    # m Δ E(P): x gives up its m-edge and each later left vertex takes the m'-edge behind it
    new = dict(m)
    if len(path) > 1:
        for u in path[0::2]:
            new.pop(u, None)
        for i in range(1, len(path) - 1, 2):
            new[path[i + 1]] = path[i]
    y = path[-1]
    new_m = Matching.of(new)
    if new_m.left != I | {y}:
        raise ConsistencyError(f"m Δ E(P) matches {sorted(new_m.left)}, not I+{y}")
    return MTAugmentation(y, x, tuple(path), new_m)


# --- tree mode ---------------------------------------------------------------


@dataclass(frozen=True)
class RootedTree:
    """Parent and children maps of a bipartite tree rooted on the right side."""

    graph: BipartiteGraph
    parent: dict[str, str | None]
    children: dict[str, tuple[str, ...]]

    def up(self, v: str) -> str | None:
        return self.parent[v]

    def down(self, x: str) -> tuple[str, ...]:
        return self.children[x]

    def is_upward(self, v: str, w: str) -> bool:
        """Whether the edge ``{v, w}`` (``v`` left) points from ``v`` toward the root."""
        return self.parent[v] == w


def rooted(g: BipartiteGraph) -> RootedTree:
    if g.root is None:
        raise ModeError("tree mode needs a root on the right side")
    if not is_tree(g):
        raise ModeError("underlying graph is not a tree")
    parent: dict[str, str | None] = {g.root: None}
    children: dict[str, list[str]] = {x: [] for x in g.vertices}
    queue = deque([g.root])
    while queue:
        x = queue.popleft()
        for y in g.neighbours(x):
            if y not in parent:
                parent[y] = x
                children[x].append(y)
                queue.append(y)
    return RootedTree(g, parent, {x: tuple(sorted(ys)) for x, ys in children.items()})


@dataclass(frozen=True)
class StageState:
    """Everything the construction fixes at stage ``alpha``.

    ``paths`` maps each ``v`` in ``I & C - S`` to its alternating path
    ``v w0 v1 w1 ... r_v``.
    """

    alpha: int
    matching: Matching
    C: frozenset[str]
    S: frozenset[str]
    paths: dict[str, tuple[str, ...]] = field(default_factory=dict)

    @property
    def I(self) -> frozenset[str]:
        return self.matching.left

    @property
    def W(self) -> frozenset[str]:
        return self.matching.right


@dataclass(frozen=True)
class TreeExtension:
    B: frozenset[str]
    matching: Matching
    history: tuple[StageState, ...]
    U: frozenset[str]
    gamma: int
    I: frozenset[str]


def forced_upward_edges(t: RootedTree, I: frozenset[str]) -> dict[str, str]:
    """``m^0``: upward edges of ``I`` used by every matching of ``I``."""
    out = {}
    for v in sorted(I):
        w = t.up(v)
        if w is not None and _kuhn(t.graph, I, banned=frozenset({(v, w)})) is None:
            out[v] = w
    return out


def _first_descent(t: RootedTree, v: str, W0: frozenset[str], m: dict[str, str], I: frozenset[str]) -> tuple[str, ...]:
    m_rev = {w: u for u, w in m.items()}
    path = [v]
    cur = v
    while True:
        w = next((c for c in t.down(cur) if c not in W0), None)
        if w is None:
            raise ConsistencyError(f"{cur} has no child outside W^0")
        if w not in m_rev:
            raise ConsistencyError(f"child {w} of {cur} is unmatched at this stage")
        nxt = m_rev[w]
        if nxt in path:
            raise ConsistencyError("descent revisits a vertex")
        path += [w, nxt]
        if nxt not in I:
            return tuple(path)
        cur = nxt


def tree_maximal_extension(g: BipartiteGraph, I: Iterable[str]) -> TreeExtension:
    """Extend ``I`` to a maximal independent set by the stage construction.

    Stages are integers here. ``S^alpha`` takes the least candidate below each
    unmatched ``w`` and each descent path follows the least child outside
    ``W^0``.
    """
    t = rooted(g)
    I = frozenset(I)
    if not mt_is_independent(g, I):
        raise ContractViolation("I is not independent")
    V = g.left
    m = forced_upward_edges(t, I)
    W0 = frozenset(m.values())
    first_cover: dict[str, int] = {}
    history: list[StageState] = []
    alpha = 0
    while True:
        W = frozenset(m.values())
        Ia = frozenset(m)
        for v in V:
            if v not in first_cover and set(t.down(v)) <= W:
                first_cover[v] = alpha
        C = frozenset(v for v in V if v not in Ia and first_cover.get(v) == alpha)
        if not C:
            history.append(StageState(alpha, Matching.of(m), C, frozenset()))
            break
        S = set()
        for w in g.right:
            if w in W:
                continue
            cands = [v for v in t.down(w) if v in C]
            if cands:
                S.add(cands[0])
        paths = {v: _first_descent(t, v, W0, m, I) for v in sorted((I & C) - S)}
        history.append(StageState(alpha, Matching.of(m), C, frozenset(S), paths))
        nxt = dict(m)
        for p in paths.values():
            for u in p[2::2]:
                del nxt[u]
            for i in range(0, len(p) - 1, 2):
                nxt[p[i]] = p[i + 1]
        for v in S:
            nxt[v] = t.up(v)
        m = nxt
        Matching.of(m)  # raises if the update is not a matching
        alpha += 1
        if alpha > len(V) + 1:
            raise ConsistencyError("stages did not stabilize within |V| steps")
    gamma = alpha
    C_all = frozenset().union(*(st.C for st in history))
    I0 = history[0].I
    U = frozenset(v for v in V if v not in I0 and v not in C_all)
    W_gamma = history[-1].W
    mB = dict(m)
    for u in sorted(U):
        w = next((c for c in t.down(u) if c not in W_gamma), None)
        if w is None:
            raise ConsistencyError(f"{u} in U has every child matched")
        mB[u] = w
    matching = Matching.of(mB)
    B = U | frozenset(m)
    if not I <= B:
        raise ConsistencyError(f"{sorted(I - B)} dropped from the extension")
    if matching.left != B:
        raise ConsistencyError("m^B does not match B")
    for v in V:
        if v not in B and mt_is_independent(g, B | {v}):
            raise ConsistencyError(f"B is not maximal: B+{v} is independent")
    return TreeExtension(B, matching, tuple(history), U, gamma, I)


def stage_violations(g: BipartiteGraph, ext: TreeExtension) -> list[str]:
    """Check monotonicity, the single-flip rule and every A(beta) path family."""
    t = rooted(g)
    I = ext.I
    hist = ext.history
    problems = []
    for a, b in zip(hist, hist[1:]):
        if not a.W <= b.W:
            problems.append(f"W shrinks from stage {a.alpha} to {b.alpha}")
        if not (a.I & I) <= (b.I & I):
            problems.append(f"I^alpha & I shrinks from stage {a.alpha} to {b.alpha}")
    seen_C: set[str] = set()
    for st in hist:
        if st.C & seen_C:
            problems.append(f"C^{st.alpha} meets an earlier C")
        seen_C |= st.C
    for u in sorted(I | set(g.right)):
        partners = [st.matching.partner.get(u) for st in hist]
        distinct = []
        for p in partners:
            if p is not None and (not distinct or distinct[-1] != p):
                distinct.append(p)
        if len(distinct) > 2:
            problems.append(f"{u} changes partner more than once: {distinct}")
        if len(distinct) == 2:
            v0, v1 = (u, distinct[0]) if u in I else (distinct[0], u)
            v2, w2 = (u, distinct[1]) if u in I else (distinct[1], u)
            if not t.is_upward(v0, v1) or t.is_upward(v2, w2):
                problems.append(f"{u} flips partner other than upward-to-downward")
        if u in g.right:
            first = next((i for i, p in enumerate(partners) if p is not None), None)
            if first is not None and any(p is None for p in partners[first:]):
                problems.append(f"{u} becomes unmatched")
    for st in hist:
        problems += _path_violations(t, st, I)
    return problems


def _path_violations(t: RootedTree, st: StageState, I: frozenset[str]) -> list[str]:
    problems = []
    expected = (I & st.C) - st.S
    if set(st.paths) != expected:
        problems.append(f"stage {st.alpha}: paths start at {sorted(st.paths)}, expected {sorted(expected)}")
    used: set[str] = set()
    partner = st.matching.partner
    for v, p in sorted(st.paths.items()):
        if p[0] != v or len(p) < 3 or len(p) % 2 == 0:
            problems.append(f"stage {st.alpha}: malformed path {p}")
            continue
        if t.is_upward(p[0], p[1]):
            problems.append(f"stage {st.alpha}: path of {v} starts with an upward edge")
        for i in range(1, len(p) - 1, 2):
            w, nxt = p[i], p[i + 1]
            if partner.get(w) != nxt:
                problems.append(f"stage {st.alpha}: {w}-{nxt} is not a matching edge")
            if partner.get(p[i - 1]) == w:
                problems.append(f"stage {st.alpha}: {p[i - 1]}-{w} should be a non-matching edge")
        r = p[-1]
        if r in I or r not in st.I:
            problems.append(f"stage {st.alpha}: path of {v} ends at {r}, not in I^alpha - I")
        if any(u not in I for u in p[2:-1:2]):
            problems.append(f"stage {st.alpha}: path of {v} passes a vertex outside I before its end")
        if set(p) & used:
            problems.append(f"stage {st.alpha}: path of {v} meets another path")
        used |= set(p)
    return problems


# --- dimaze trees --------------------------------------------------------------


def copy_name(b: str) -> str:
    return b + "'"


def dimaze_tree_to_bipartite(d: Dimaze) -> BipartiteGraph:
    """Undirect ``d`` and hang a copy ``b'`` below every exit ``b``.

    Requires a tree whose exits form one side of the bipartition with all
    edges pointing at them. The result is rooted at the least exit.
    """
    exits = d.exits
    for t, h in d.sorted_edges():
        if h not in exits or t in exits:
            raise ModeError(f"edge {t}->{h} does not run from a non-exit to an exit")
    und = {frozenset(e) for e in d.edges}
    if len(und) != len(d.edges):
        raise ModeError("antiparallel edges")
    g0 = BipartiteGraph(
        tuple(v for v in d.vertices if v not in exits), tuple(sorted(exits)), frozenset(d.edges)
    )
    if len(d.vertices) > 1 and not is_tree(g0):
        raise ModeError("underlying graph is not a tree")
    copies = {b: copy_name(b) for b in exits}
    clash = set(copies.values()) & d.vertex_set
    if clash:
        raise ModeError(f"copy names collide with vertices: {', '.join(sorted(clash))}")
    left = tuple(v for v in d.vertices if v not in exits) + tuple(copies.values())
    edges = frozenset(d.edges) | frozenset((c, b) for b, c in copies.items())
    root = min(exits) if exits else None
    return BipartiteGraph(left, tuple(sorted(exits)), edges, root)


def dimaze_vertex_map(d: Dimaze) -> dict[str, str]:
    """The isomorphism from the linkability system onto the transversal one."""
    return {v: copy_name(v) if v in d.exits else v for v in d.vertices}
