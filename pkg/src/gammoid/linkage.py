"""Independence in linkability systems by alternating-walk augmentation.

The search runs on (vertex, mode) states. ``OUT`` means the walk may leave the
vertex along any edge not in the reference linkage; ``IN`` means it arrived
along a forward edge and, if the vertex lies on the linkage, must continue
backwards along the linkage edge into it. Each state is visited once, so the
search is breadth-first and polynomial, and vertices are expanded in
lexicographic order so every answer is deterministic.

A vertex of ``X`` that lies on the linkage without being an initial vertex is
also a starting point: the walk first runs backwards along the linkage edge
into it. Without such starts a linkage can be non-maximum while no walk from
``X - V(P)`` exists and no separator on it exists either (take ``X = {a, d}``,
edges ``a->d``, ``a->e``, exits ``d, e`` and ``P = {a d}``).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable

from .dimaze import Dimaze, DirectedPath, Edge, Linkage, require_linkage
from .errors import ConsistencyError, ContractViolation

IN, OUT = 0, 1
State = tuple[str, int]


@dataclass(frozen=True)
class AlternatingWalk:
    """``v0 e0 v1 ... e(n-1) vn`` relative to a linkage; edges are digraph edges (tail, head)."""

    vertices: tuple[str, ...]
    edges: tuple[Edge, ...]

    @property
    def start(self) -> str:
        return self.vertices[0]

    @property
    def end(self) -> str:
        return self.vertices[-1]

    def __str__(self) -> str:
        parts = [self.vertices[0]]
        for (t, h), v in zip(self.edges, self.vertices[1:]):
            parts.append(("->" if h == v else "<-") + v)
        return "".join(parts)


@dataclass(frozen=True)
class SeparatorOnLinkage:
    """An X--B0 separator with exactly one vertex on each path of ``linkage``."""

    separator: frozenset[str]
    linkage: Linkage


@dataclass(frozen=True)
class Augmentation:
    """A strictly larger linkage found along ``walk``."""

    linkage: Linkage
    walk: AlternatingWalk
    added_initial: str
    added_terminal: str


@dataclass(frozen=True)
class Independence:
    """Answer of an independence query; truthy iff independent."""

    independent: bool
    witness: Linkage | None

    def __bool__(self) -> bool:
        return self.independent


class _Flow:
    """Mutable successor/predecessor view of a linkage."""

    def __init__(self, link: Linkage):
        self.nxt: dict[str, str] = {}
        self.prv: dict[str, str] = {}
        self.starts: set[str] = set()
        for p in link.paths:
            self.starts.add(p.initial)
            for t, h in p.edges():
                self.nxt[t] = h
                self.prv[h] = t

    def on(self, v: str) -> bool:
        return v in self.starts or v in self.prv

    def paths(self) -> list[DirectedPath]:
        out = []
        for s in sorted(self.starts):
            seq = [s]
            while seq[-1] in self.nxt:
                seq.append(self.nxt[seq[-1]])
            out.append(DirectedPath(tuple(seq)))
        return out

    def rebuild(self) -> None:
        # drops any cycle left over from the symmetric difference
        paths = self.paths()
        self.nxt, self.prv = {}, {}
        for p in paths:
            for t, h in p.edges():
                self.nxt[t] = h
                self.prv[h] = t


def _sources(X: Iterable[str], flow: _Flow) -> list[State]:
    out = []
    for x in sorted(X):
        if not flow.on(x):
            out.append((x, OUT))
        elif x not in flow.starts:
            out.append((x, IN))
    return out


def _search(d: Dimaze, sources: list[State], flow: _Flow) -> tuple[State | None, dict[State, State | None]]:
    parent: dict[State, State | None] = {}
    queue: deque[State] = deque()
    exits = d.exits
    for st in sources:
        if st in parent:
            continue
        parent[st] = None
        if st[0] in exits and not flow.on(st[0]):
            return st, parent
        queue.append(st)
    while queue:
        v, mode = queue.popleft()
        if mode == OUT:
            nexts = [(w, IN) for w in d.succ.get(v, ()) if flow.nxt.get(v) != w]
            if flow.on(v):
                nexts.append((v, IN))
            nexts.sort()
        elif flow.on(v):
            p = flow.prv.get(v)
            nexts = [(p, OUT)] if p is not None else []
        else:
            nexts = [(v, OUT)]
        for st in nexts:
            if st in parent:
                continue
            parent[st] = (v, mode)
            w = st[0]
            if w in exits and not flow.on(w):
                return st, parent
            queue.append(st)
    return None, parent


def _walk_from_states(states: list[State]) -> AlternatingWalk:
    vertices = [states[0][0]]
    edges: list[Edge] = []
    for (a, ma), (b, mb) in zip(states, states[1:]):
        if a == b:
            continue
        if ma == OUT and mb == IN:
            edges.append((a, b))
        else:
            edges.append((b, a))
        vertices.append(b)
    return AlternatingWalk(tuple(vertices), tuple(edges))


def _trace(sink: State, parent: dict[State, State | None]) -> list[State]:
    states = [sink]
    while parent[states[-1]] is not None:
        states.append(parent[states[-1]])  # type: ignore[arg-type]
    states.reverse()
    return states


def _apply(flow: _Flow, walk: AlternatingWalk) -> None:
    forward, backward = [], []
    for (t, h), v in zip(walk.edges, walk.vertices[1:]):
        (forward if h == v else backward).append((t, h))
    for t, h in backward:
        del flow.nxt[t]
        del flow.prv[h]
    for t, h in forward:
        flow.nxt[t] = h
        flow.prv[h] = t
    flow.starts.add(walk.start)
    flow.rebuild()


def _separator(flow: _Flow, link: Linkage, parent: dict[State, State | None]) -> frozenset[str]:
    reached = {v for v, _ in parent}
    picks = set()
    for p in link.paths:
        hits = [v for v in p.vertices if v in reached]
        picks.add(hits[-1] if hits else p.initial)
    return frozenset(picks)


def _check_sources(d: Dimaze, X: frozenset[str]) -> None:
    unknown = X - d.vertex_set
    if unknown:
        raise ContractViolation(f"not vertices of the dimaze: {', '.join(sorted(unknown))}")


def augment(d: Dimaze, X: Iterable[str], link: Linkage) -> Augmentation | SeparatorOnLinkage:
    """One augmentation round.

    Returns a linkage with one more path (initial vertex in ``X``, terminal in
    the exits) if an alternating walk from ``X`` minus ``V(link)`` reaches an
    exit off the linkage; otherwise an ``X``--exits separator on ``link``.
    """
    X = frozenset(X)
    _check_sources(d, X)
    require_linkage(d, link)
    if not link.ini() <= X:
        raise ContractViolation("link must start inside X")
    flow = _Flow(link)
    sink, parent = _search(d, _sources(X, flow), flow)
    if sink is None:
        return SeparatorOnLinkage(_separator(flow, link, parent), link)
    walk = _walk_from_states(_trace(sink, parent))
    _apply(flow, walk)
    bigger = Linkage(frozenset(flow.paths()))
    return Augmentation(bigger, walk, walk.start, walk.end)


def max_linkage(d: Dimaze, X: Iterable[str]) -> tuple[Linkage, SeparatorOnLinkage]:
    """A maximum linkage from a subset of ``X`` and a separator on it (finite Menger)."""
    X = frozenset(X)
    _check_sources(d, X)
    flow = _Flow(Linkage.empty())
    for _ in range(len(d.exits) + 1):
        sink, parent = _search(d, _sources(X, flow), flow)
        if sink is None:
            link = Linkage(frozenset(flow.paths()))
            return link, SeparatorOnLinkage(_separator(flow, link, parent), link)
        _apply(flow, _walk_from_states(_trace(sink, parent)))
    raise ConsistencyError("more augmentation rounds than exits")


def is_independent(d: Dimaze, I: Iterable[str]) -> Independence:
    """Whether some linkage has initial set exactly ``I``; the witness is one such linkage."""
    I = frozenset(I)
    link, _ = max_linkage(d, I)
    if len(link) == len(I):
        return Independence(True, link)
    return Independence(False, None)


def extend_onto(d: Dimaze, link: Linkage) -> Linkage:
    """Extend ``link`` to a linkage onto the exits.

    In a finite dimaze every exit missed by ``link`` is off the linkage (exits
    have out-degree 0), so trivial paths complete it.
    """
    require_linkage(d, link)
    missed = d.exits - link.ter()
    return Linkage(link.paths | {DirectedPath((b,)) for b in missed})


def is_onto_linkable(d: Dimaze, I: Iterable[str]) -> Independence:
    """Whether some linkage from exactly ``I`` has terminal set exactly the exits."""
    res = is_independent(d, I)
    if res and res.witness.ter() == d.exits:
        return res
    return Independence(False, None)


def walk_violations(d: Dimaze, X: Iterable[str], link: Linkage, walk: AlternatingWalk) -> list[str]:
    """Check the defining conditions of an alternating walk.

    The conditions are checked verbatim except that the walk may also start at
    a non-initial vertex of ``X`` on the linkage whose first step reverses the
    linkage edge into it (see the module docstring).
    """
    X = frozenset(X)
    vs, es = walk.vertices, walk.edges
    p_vertices, p_edges = link.vertex_set, link.edge_set
    problems = []
    if len(vs) != len(es) + 1:
        problems.append("walk must alternate vertices and edges")
        return problems
    starts_on_p = bool(es) and vs[0] in p_vertices and es[0] == (vs[1], vs[0]) and es[0] in p_edges
    if vs[0] not in X or (vs[0] in p_vertices and not starts_on_p):
        problems.append(f"walk starts at {vs[0]}, not in X minus V(P)")
    if len(set(es)) != len(es):
        problems.append("walk repeats an edge")
    for i, e in enumerate(es):
        if e not in d.edges:
            problems.append(f"e{i}={e} is not an edge")
        if set(e) != {vs[i], vs[i + 1]}:
            problems.append(f"e{i}={e} is not incident with v{i}, v{i + 1}")
        reversed_ = e == (vs[i + 1], vs[i])
        if reversed_ != (e in p_edges):
            problems.append(f"e{i}={e}: traversed backwards iff in E(P) fails")
    n = len(es)
    for i in range(n):
        for j in range(i + 1, n):
            if vs[i] == vs[j] and vs[i] not in p_vertices:
                problems.append(f"v{i}=v{j}={vs[i]} repeats off the linkage")
    for i in range(n):
        if vs[i] in p_vertices:
            around = {es[i - 1] if i > 0 else es[0], es[i]}
            if not around & p_edges:
                problems.append(f"v{i}={vs[i]} on V(P) without an incident linkage edge")
    return problems


def separator_violations(d: Dimaze, X: Iterable[str], sep: SeparatorOnLinkage) -> list[str]:
    """Check that ``sep`` meets every X--exits path and has one vertex per linkage path."""
    X = frozenset(X)
    S = sep.separator
    problems = []
    for p in sep.linkage.sorted_paths():
        on = [v for v in p.vertices if v in S]
        if len(on) != 1:
            problems.append(f"path {p} carries {len(on)} separator vertices")
    if len(S) != len(sep.linkage):
        problems.append("separator has vertices off the linkage")
    # reachability avoiding S
    seen = set(x for x in X if x not in S)
    stack = list(seen)
    while stack:
        v = stack.pop()
        if v in d.exits:
            problems.append(f"exit {v} reachable from X avoiding the separator")
            break
        for w in d.succ.get(v, ()):
            if w not in S and w not in seen:
                seen.add(w)
                stack.append(w)
    return problems


# --- (I3) witness ----------------------------------------------------------


@dataclass(frozen=True)
class BaseAugmentation:
    """Result of :func:`augment_toward_base`.

    Either ``element`` is set (with the linkage from ``I + element`` and the
    walk that produced it), or ``maximal`` is True because ``I`` has no proper
    independent superset.
    """

    element: str | None
    linkage: Linkage | None = None
    walk: AlternatingWalk | None = None
    maximal: bool = False


def relink_through_separator(blue: Linkage, red: Linkage, separator: Iterable[str]) -> Linkage:
    """``{Q_v s_v P_v}``: follow each blue path to its first separator vertex, then the red path on it."""
    S = frozenset(separator)
    paths = []
    for q in blue.sorted_paths():
        s = next((v for v in q.vertices if v in S), None)
        if s is None:
            raise ContractViolation(f"blue path {q} avoids the separator")
        p = red.path_through(s)
        if p is None:
            raise ContractViolation(f"separator vertex {s} is off the red linkage")
        paths.append(q.join(s, p))
    return Linkage(frozenset(paths))


def augment_toward_base(d: Dimaze, I: Iterable[str], B: Iterable[str], check_maximal: bool = True) -> BaseAugmentation:
    """Find ``x`` in ``B - I`` with ``I + x`` independent, given ``B`` maximal.

    If no alternating walk exists the separator relink is built; for a genuinely
    maximal ``B`` that branch cannot happen, so reaching it raises.
    """
    I, B = frozenset(I), frozenset(B)
    red = is_independent(d, I)
    blue = is_independent(d, B)
    if not red or not blue:
        raise ContractViolation("I and B must both be independent")
    if check_maximal:
        for v in d.vertices:
            if v not in B and is_independent(d, B | {v}):
                raise ContractViolation(f"B is not maximal: B+{v} is independent")
    if all(not is_independent(d, I | {v}) for v in d.vertices if v not in I):
        return BaseAugmentation(None, red.witness, None, maximal=True)
    P = red.witness
    res = augment(d, B | I, P)
    if isinstance(res, Augmentation):
        if res.added_initial not in B - I:
            raise ConsistencyError(f"augmentation added {res.added_initial}, outside B - I")
        return BaseAugmentation(res.added_initial, res.linkage, res.walk)
    missed = sorted(d.exits - P.ter())
    relinked = relink_through_separator(blue.witness, P, res.separator)
    raise ContractViolation(
        f"B is not maximal: relinked {relinked} starts at B and misses exit {missed[0] if missed else '?'}"
    )
