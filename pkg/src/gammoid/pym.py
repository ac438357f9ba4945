"""Pym's linkage merge and what is built on it: exchange, comb traces and the maximal-iff-onto check.

Notation follows the usual red/blue convention: the red linkage ``P_x`` runs
from ``X_P`` onto ``Y_P``; the blue one ``Q_y`` from ``X_Q`` onto ``Y_Q`` and
is keyed by its terminal vertex. At step ``i`` each red path carries a marker
``f[x]`` and each blue path a marker ``t[y]``; ``Q^i`` is assembled from the
untouched blue paths (A), red-then-blue concatenations (B) and whole red paths
(C). Iteration stops at the first fixed point.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable

from .dimaze import Dimaze, DirectedPath, Linkage, require_linkage
from .errors import ConsistencyError, ContractViolation, SizeGuardError
from .linkage import is_independent, is_onto_linkable
from .matroid import size_guard


@dataclass(frozen=True)
class MergeState:
    """Snapshot of the merge after ``step`` rounds."""

    step: int
    f: dict[str, str]
    t: dict[str, str]
    A: tuple[DirectedPath, ...]
    B: tuple[DirectedPath, ...]
    C: tuple[DirectedPath, ...]
    linkage: Linkage


@dataclass(frozen=True)
class MergeResult:
    linkage: Linkage
    state: MergeState
    red: Linkage
    blue: Linkage
    history: tuple[MergeState, ...] = ()

    def settle_step(self, x: str) -> int:
        """Least step at which the red marker of ``x`` reached its final place (needs history)."""
        final = self.state.f[x]
        for st in self.history:
            if st.f[x] == final:
                return st.step
        raise ConsistencyError("merge history was not recorded")


def _assemble(red: dict[str, DirectedPath], blue: dict[str, DirectedPath], f: dict[str, str], t: dict[str, str]):
    owner = {v: x for x, v in f.items()}
    A, B, C = [], [], []
    t_values = set(t.values())
    for y in sorted(blue):
        q = blue[y]
        if t[y] in owner:
            x = owner[t[y]]
            B.append(red[x].join(t[y], q))
        else:
            A.append(q)
    for x in sorted(red):
        p = red[x]
        if f[x] == p.terminal and f[x] not in t_values:
            C.append(p)
    return tuple(A), tuple(B), tuple(C)


def merge(d: Dimaze, red: Linkage, blue: Linkage, record: bool = False) -> MergeResult:
    """Combine ``red`` and ``blue`` into one linkage.

    The result starts from a set between ``Ini(red)`` and ``Ini(red) | Ini(blue)``
    and ends on a set between ``Ter(blue)`` and ``Ter(blue) | Ter(red)``. With
    ``record`` the full per-step history is kept.
    """
    require_linkage(d, red, "red")
    require_linkage(d, blue, "blue")
    R = {p.initial: p for p in red.paths}
    Q = {q.terminal: q for q in blue.paths}
    f = {x: x for x in R}
    t = {y: q.initial for y, q in Q.items()}
    current = blue
    state = MergeState(0, dict(f), dict(t), tuple(blue.sorted_paths()), (), (), blue)
    history = [state] if record else []
    bound = sum(len(p) for p in red.paths) + sum(len(q) for q in blue.paths) + 2

    for step in range(1, bound + 1):
        occupied = current.vertex_set
        new_f = {}
        for x, p in R.items():
            seg = p.vertices[p.index(f[x]):]
            new_f[x] = next((v for v in seg if v in occupied), p.terminal)
            if p.index(new_f[x]) < p.index(f[x]):
                raise ConsistencyError(f"red marker of {x} moved backwards at step {step}")
        owner = set(new_f.values())
        new_t = {}
        for y, q in Q.items():
            last = q.initial
            for v in q.vertices:
                if v in owner:
                    last = v
            if q.index(last) < q.index(t[y]):
                raise ConsistencyError(f"blue marker of {y} moved backwards at step {step}")
            new_t[y] = last
        A, B, C = _assemble(R, Q, new_f, new_t)
        try:
            nxt = Linkage(frozenset(A + B + C))
        except ContractViolation as exc:
            raise ConsistencyError(f"step {step} did not produce a linkage: {exc}") from exc
        if not Q.keys() <= nxt.ter():
            raise ConsistencyError(f"step {step} does not cover the blue terminals")
        f, t = new_f, new_t
        state = MergeState(step, dict(f), dict(t), A, B, C, nxt)
        if record:
            history.append(state)
        if nxt == current:
            break
        current = nxt
    else:
        raise ConsistencyError("merge did not reach a fixed point")

    out = state.linkage
    xp, xq, yp, yq = red.ini(), blue.ini(), red.ter(), blue.ter()
    if not (xp <= out.ini() <= xp | xq and yq <= out.ter() <= yq | yp):
        raise ConsistencyError("merge result violates the initial/terminal inclusions")
    return MergeResult(out, state, red, blue, tuple(history))


def format_trace(result: MergeResult) -> str:
    """One line per step: ``i | moved x | their f | t updates``."""
    lines = []
    prev = None
    for st in result.history:
        if prev is None:
            xs = sorted(st.f)
            tu = sorted(st.t)
        else:
            xs = sorted(x for x in st.f if st.f[x] != prev.f[x])
            tu = sorted(y for y in st.t if st.t[y] != prev.t[y])
        cols = [
            str(st.step),
            ",".join(xs) or "-",
            ",".join(st.f[x] for x in xs) or "-",
            ",".join(f"{y}={st.t[y]}" for y in tu) or "-",
        ]
        lines.append(" | ".join(cols))
        prev = st
    return "\n".join(lines) + "\n"


# --- exchange ----------------------------------------------------------------


@dataclass(frozen=True)
class ExchangeResult:
    """``u`` is None when the merged linkage already starts at all of ``J + v``.

    ``witness`` is a linkage from ``J + v - u`` (or ``J + v``). ``cases`` lists,
    per merge step, which branch of the unique-uncovered-vertex claim applied.
    """

    u: str | None
    witness: Linkage
    cases: tuple[str, ...] = ()

    @property
    def none_needed(self) -> bool:
        return self.u is None


def exchange(d: Dimaze, I: Iterable[str], J: Iterable[str], v: str) -> ExchangeResult:
    """Find ``u`` in ``J - I`` such that ``J + v - u`` is independent.

    ``I`` is first cut down to ``J + v`` so that ``I - J = {v}``. The merge of a
    red linkage from ``I`` with a blue one from ``J`` then leaves at most one
    element of ``J + v`` uncovered; that element is ``u``.
    """
    I, J = frozenset(I), frozenset(J)
    red_full = is_independent(d, I)
    blue = is_independent(d, J)
    if not red_full or not blue:
        raise ContractViolation("I and J must both be independent")
    if v not in I - J:
        raise ContractViolation(f"{v} must lie in I - J")
    target = J | {v}
    if not J - I:
        # J + v is a subset of I
        return ExchangeResult(None, Linkage(frozenset(p for p in red_full.witness.paths if p.initial in target)))
    I_red = I & target
    red = is_independent(d, I_red)
    res = merge(d, red.witness, blue.witness, record=True)
    cases, claimed_u = _track_claim(res, I_red, target)
    final = res.linkage
    missing = target - final.ini()
    if len(missing) > 1:
        raise ConsistencyError(f"merge left {sorted(missing)} uncovered")
    u = next(iter(missing), None)
    if u is not None and claimed_u is not None and u != claimed_u:
        raise ConsistencyError(f"uncovered {u} differs from case (ii) vertex {claimed_u}")
    if u is not None and u not in J - I:
        raise ConsistencyError(f"uncovered {u} is not in J - I")
    witness = Linkage(frozenset(p for p in final.paths if p.initial in target))
    return ExchangeResult(u, witness, cases)


def _track_claim(res: MergeResult, I: frozenset[str], target: frozenset[str]) -> tuple[tuple[str, ...], str | None]:
    """Replay the unique-unhappy-vertex claim along the recorded history."""
    blue_paths = {q.terminal: q for q in res.blue.paths}
    hist = res.history
    final = res.linkage
    cases: list[str] = []
    claimed_u = None
    for prev, cur in zip(hist, hist[1:]):
        if prev.linkage == final:
            break
        unhappy = target - prev.linkage.ini()
        if len(unhappy) != 1:
            raise ConsistencyError(f"step {prev.step}: {len(unhappy)} uncovered vertices, expected one")
        (x_prev,) = unhappy
        if x_prev not in I:
            # only v or a vertex of I is ever displaced
            raise ConsistencyError(f"step {prev.step}: displaced {x_prev} is outside I")
        spot = cur.f[x_prev]
        y = next((y for y, q in blue_paths.items() if spot in q), None)
        others = [] if y is None else [x for x in I - {x_prev} if cur.f[x] in blue_paths[y]]
        if others:
            if len(others) > 1:
                raise ConsistencyError(f"step {cur.step}: two markers share blue path {y}")
            cases.append("i")
        else:
            cases.append("ii")
            if y is not None:
                claimed_u = blue_paths[y].initial
            break
    return tuple(cases), claimed_u


# --- alternating comb trace -------------------------------------------------


@dataclass(frozen=True)
class CombPrefix:
    """A finite prefix of the alternating comb built by the trace.

    ``blue_segments[k-1]`` is ``q_k Q_k p_(k-1)`` and ``red_segments[k-1]`` is
    ``q_k P_(x_k) p_k``; ``teeth[k-1]`` is the blue terminal segment from
    ``p_(k-1)`` to its exit.
    """

    x: tuple[str, ...]
    p: tuple[str, ...]
    q: tuple[str, ...]
    blue_segments: tuple[DirectedPath, ...]
    red_segments: tuple[DirectedPath, ...]
    teeth: tuple[DirectedPath, ...]
    settle_steps: tuple[int, ...]
    stopped: str
    merge: MergeResult = field(repr=False, compare=False, default=None)

    @property
    def depth(self) -> int:
        return len(self.red_segments)

    def spine(self) -> tuple[str, ...]:
        """Vertex sequence of the alternating path ``p_0 ... q_1 ... p_1 ... q_2 ...``."""
        seq = [self.p[0]]
        for blue, red in zip(self.blue_segments, self.red_segments):
            seq += list(reversed(blue.vertices[:-1]))
            seq += list(red.vertices[1:])
        return tuple(seq)


def comb_violations(c: CombPrefix) -> list[str]:
    """Disjointness and shape conditions every comb prefix must satisfy."""
    problems = []
    for k, (b, r) in enumerate(zip(c.blue_segments, c.red_segments), start=1):
        if b.trivial:
            problems.append(f"blue segment {k} is trivial")
        if r.trivial:
            problems.append(f"red segment {k} is trivial")
    for segs, name in ((c.blue_segments, "blue"), (c.red_segments, "red")):
        for (j, a), (k, b) in combinations(enumerate(segs, start=1), 2):
            if set(a.vertices) & set(b.vertices):
                problems.append(f"{name} segments {j} and {k} meet")
    for k, r in enumerate(c.red_segments, start=1):
        for j in range(1, k):
            whole = set(c.blue_segments[j - 1].vertices) | set(c.teeth[j - 1].vertices)
            if set(r.vertices) & whole:
                problems.append(f"red segment {k} meets blue path {j}")
    spine = c.spine()
    if len(set(spine)) != len(spine):
        problems.append("spine is not a path")
    spine_set = set(spine)
    for k, tooth in enumerate(c.teeth, start=1):
        if set(tooth.vertices[1:]) & spine_set:
            problems.append(f"tooth {k} meets the spine beyond its initial vertex")
    for a, b in zip(c.settle_steps, c.settle_steps[1:]):
        if not a < b:
            problems.append(f"settle steps {c.settle_steps} not strictly increasing")
            break
    return problems


def comb_trace(
    d: Dimaze,
    I: Iterable[str],
    x0: str,
    max_depth: int,
    frontier: Iterable[str] = (),
) -> CombPrefix:
    """Alternate between a blue linkage from ``I`` and a red one from ``I + x0``.

    The blue linkage must be onto the exits minus ``frontier``. With an empty
    frontier this is the onto-linkable set of the infinite argument, which on a
    finite dimaze can never be extended; truncations of an infinite family pass
    the exits cut off from the rest of the object as ``frontier``.
    """
    I = frozenset(I)
    frontier = frozenset(frontier)
    if x0 in I:
        raise ContractViolation(f"x0={x0} already in I")
    if not frontier <= d.exits:
        raise ContractViolation("frontier must consist of exits")
    blue = is_onto_linkable(d.with_exits(d.exits - frontier), I)
    if not blue:
        raise ContractViolation("I is not linkable onto the exits" + (" minus the frontier" if frontier else ""))
    red = is_independent(d, I | {x0})
    if not red:
        raise ContractViolation(f"I + {x0} is not independent")
    res = merge(d, red.witness, blue.witness, record=True)
    st = res.state
    if red.witness.ter() <= blue.witness.ter() and blue.witness.ini() <= red.witness.ini():
        if st.A or st.C:
            raise ConsistencyError("A and C must be empty when red terminals lie among blue ones")

    blue_by_vertex = {v: q for q in res.blue.paths for v in q.vertices}
    red_by_vertex = {v: x for x, fx in st.f.items() for v in res.red.path_from(x).upto(fx).vertices}
    final_vertices = res.linkage.vertex_set

    xs, ps, qs = [x0], [st.f[x0]], []
    blues, reds, teeth, settle = [], [], [], [res.settle_step(x0)]
    stopped = "max_depth reached"
    while len(reds) < max_depth:
        p_prev = ps[-1]
        Qk = blue_by_vertex.get(p_prev)
        if Qk is None:
            stopped = f"p_{len(reds)}={p_prev} lies on no blue path"
            break
        if p_prev == Qk.initial:
            stopped = f"p_{len(reds)}={p_prev} is the initial vertex of its blue path"
            break
        before = [v for v in Qk.before(p_prev) if v in final_vertices]
        if not before:
            stopped = f"no vertex of Q before p_{len(reds)}={p_prev} lies on the merged linkage"
            break
        qk = before[-1]
        xk = red_by_vertex.get(qk)
        if xk is None:
            stopped = f"q_{len(reds) + 1}={qk} lies on no red segment"
            break
        pk = st.f[xk]
        if pk == qk:
            stopped = f"red segment at q_{len(reds) + 1}={qk} is trivial"
            break
        if xk in xs:
            stopped = f"x_{len(reds) + 1}={xk} repeats"
            break
        blues.append(Qk.from_(qk).upto(p_prev))
        teeth.append(Qk.from_(p_prev))
        reds.append(res.red.path_from(xk).from_(qk).upto(pk))
        xs.append(xk)
        ps.append(pk)
        qs.append(qk)
        settle.append(res.settle_step(xk))
    return CombPrefix(
        tuple(xs), tuple(ps), tuple(qs), tuple(blues), tuple(reds), tuple(teeth), tuple(settle), stopped, res
    )


# --- maximal iff onto --------------------------------------------------------


@dataclass(frozen=True)
class DaggerWitness:
    """A set on which "maximal iff onto-linkable" fails.

    ``kind == "onto-not-maximal"``: ``base`` is onto-linkable via ``onto`` yet
    ``base + extra`` is linkable via ``larger``. ``kind == "maximal-not-onto"``:
    ``base`` is maximal but no linkage from it is onto; ``onto`` is None.
    """

    kind: str
    base: frozenset[str]
    extra: str | None
    onto: Linkage | None
    larger: Linkage | None


def check_dagger(d: Dimaze, guard: int | None = None) -> list[DaggerWitness]:
    """All sets violating "maximally independent iff linkable onto the exits"."""
    n = len(d.vertices)
    if n > size_guard(guard):
        raise SizeGuardError(f"{n} vertices exceed the enumeration guard {size_guard(guard)}")
    out = []
    for r in range(n + 1):
        for combo in combinations(d.vertices, r):
            S = frozenset(combo)
            indep = is_independent(d, S)
            if not indep:
                continue
            onto = is_onto_linkable(d, S)
            bigger = next(
                ((v, w) for v in d.vertices if v not in S for w in [is_independent(d, S | {v})] if w), None
            )
            if onto and bigger:
                out.append(DaggerWitness("onto-not-maximal", S, bigger[0], onto.witness, bigger[1].witness))
            elif not onto and bigger is None:
                out.append(DaggerWitness("maximal-not-onto", S, None, None, indep.witness))
    return out
