"""Exhaustive matroid checks on small ground sets.

Every view materializes its independence oracle into a table indexed by
bitmask (bit ``i`` is ``ground[i]``), so the axiom checks are plain loops over
integers. That caps the ground set; see :func:`size_guard`.
"""

from __future__ import annotations

import os
import random
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Callable, Iterable, Sequence

from .dimaze import Dimaze
from .errors import ConsistencyError, ContractViolation, SizeGuardError
from .families import FamilyGenerator, apply_rule, generate
from .linkage import is_independent, is_onto_linkable, max_linkage

DEFAULT_GUARD = 20
AXIOMS = ("I1", "I2", "I3", "IM", "B1", "B2")


def size_guard(guard: int | None = None) -> int:
    """Largest ground set enumerated exhaustively; ``GAMMOID_SIZE_GUARD`` overrides the default."""
    if guard is not None:
        return guard
    raw = os.environ.get("GAMMOID_SIZE_GUARD")
    if raw:
        try:
            return int(raw)
        except ValueError:
            raise SizeGuardError(f"GAMMOID_SIZE_GUARD must be an integer, got {raw!r}") from None
    return DEFAULT_GUARD


def popcount(mask: int) -> int:
    return bin(mask).count("1")


@lru_cache(maxsize=1 << 16)
def _order_key(n: int, mask: int) -> tuple[int, tuple[int, ...]]:
    return popcount(mask), tuple(i for i in range(n) if mask >> i & 1)


def submasks(mask: int):
    """All submasks of ``mask``, largest first, ending with 0."""
    s = mask
    while True:
        yield s
        if s == 0:
            return
        s = (s - 1) & mask


@dataclass(frozen=True)
class MatroidView:
    """A finite set system presented by an independence oracle."""

    ground: tuple[str, ...]
    indep: Callable[[frozenset[str]], bool] = field(repr=False, compare=False)
    source: str = "explicit"
    guard: int | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "ground", tuple(self.ground))
        if len(set(self.ground)) != len(self.ground):
            raise ContractViolation("ground set has repeated elements")
        if len(self.ground) > size_guard(self.guard):
            raise SizeGuardError(
                f"ground set of {len(self.ground)} elements exceeds the enumeration guard {size_guard(self.guard)}"
            )

    @classmethod
    def from_dimaze(cls, d: Dimaze, guard: int | None = None) -> MatroidView:
        return cls(d.vertices, lambda S: bool(is_independent(d, S)), "dimaze", guard)

    @classmethod
    def from_bigraph(cls, g, guard: int | None = None) -> MatroidView:
        from .transversal import mt_is_independent

        return cls(tuple(g.left), lambda S: bool(mt_is_independent(g, S)), "bipartite", guard)

    @classmethod
    def from_independent_sets(cls, ground: Iterable[str], sets: Iterable[Iterable[str]]) -> MatroidView:
        family = frozenset(frozenset(s) for s in sets)
        ground = tuple(ground)
        extra = set().union(*family) - set(ground) if family else set()
        if extra:
            raise ContractViolation(f"independent sets use non-ground elements: {', '.join(sorted(extra))}")
        return cls(ground, lambda S: frozenset(S) in family, "explicit")

    @property
    def n(self) -> int:
        return len(self.ground)

    @property
    def full(self) -> int:
        return (1 << self.n) - 1

    @cached_property
    def _index(self) -> dict[str, int]:
        return {e: i for i, e in enumerate(self.ground)}

    def mask(self, S: Iterable[str]) -> int:
        m = 0
        for e in S:
            try:
                m |= 1 << self._index[e]
            except KeyError:
                raise ContractViolation(f"{e} is not in the ground set") from None
        return m

    def set_of(self, mask: int) -> frozenset[str]:
        return frozenset(e for i, e in enumerate(self.ground) if mask >> i & 1)

    def sorted_of(self, mask: int) -> list[str]:
        return [e for i, e in enumerate(self.ground) if mask >> i & 1]

    def order_key(self, mask: int) -> tuple[int, tuple[int, ...]]:
        """Cardinality first, then lexicographic on ground positions."""
        return _order_key(self.n, mask)

    @cached_property
    def table(self) -> list[bool]:
        return [bool(self.indep(self.set_of(m))) for m in range(1 << self.n)]

    def is_indep(self, S: Iterable[str]) -> bool:
        return self.table[self.mask(S)]

    @cached_property
    def _has_indep_superset(self) -> list[bool]:
        # superset zeta transform: entry M says some independent set contains M
        up = list(self.table)
        for i in range(self.n):
            bit = 1 << i
            for m in range(1 << self.n):
                if not m & bit and up[m | bit]:
                    up[m] = True
        return up

    @cached_property
    def _all_subsets_indep(self) -> list[bool]:
        down = list(self.table)
        for m in range(1 << self.n):
            if down[m]:
                for i in range(self.n):
                    if m >> i & 1 and not down[m ^ (1 << i)]:
                        down[m] = False
                        break
        return down

    @cached_property
    def maximal_masks(self) -> list[int]:
        """Independent sets with no independent proper superset, ordered by ``order_key``."""
        up = self._has_indep_superset
        out = []
        for m in range(1 << self.n):
            if self.table[m] and not any(up[m | 1 << i] for i in range(self.n) if not m >> i & 1):
                out.append(m)
        return sorted(out, key=self.order_key)

    def maximal_sets(self) -> list[frozenset[str]]:
        return [self.set_of(m) for m in self.maximal_masks]

    def maximal_within(self, X: int) -> list[int]:
        """Maximal independent subsets of the set with mask ``X``."""
        cands = [m for m in submasks(X) if self.table[m]]
        cand_set = set(cands)
        out = []
        for m in cands:
            rest = X & ~m
            if not any((m | s) in cand_set for s in submasks(rest) if s):
                out.append(m)
        return sorted(out, key=self.order_key)

    def greedy(self, X: int, order: Sequence[int] | None = None, start: int = 0) -> int:
        """Extend ``start`` inside ``X`` one element at a time in ``order``."""
        J = start
        for i in order if order is not None else range(self.n):
            bit = 1 << i
            if X & bit and not J & bit and self.table[J | bit]:
                J |= bit
        return J

    def rank(self, S: Iterable[str] | None = None) -> int:
        X = self.full if S is None else self.mask(S)
        return max(popcount(m) for m in submasks(X) if self.table[m]) if self.table[0] else 0


# --- axioms --------------------------------------------------------------------


@dataclass(frozen=True)
class AxiomResult:
    axiom: str
    passed: bool
    counterexample: dict[str, list[str]] | None = None

    def to_json(self) -> dict:
        out: dict = {"status": "pass" if self.passed else "fail"}
        if self.counterexample is not None:
            out["counterexample"] = self.counterexample
        return out


@dataclass(frozen=True)
class AxiomReport:
    source: str
    ground: tuple[str, ...]
    results: tuple[AxiomResult, ...]

    @property
    def ok(self) -> bool:
        return all(r.passed for r in self.results)

    def __getitem__(self, axiom: str) -> AxiomResult:
        return next(r for r in self.results if r.axiom == axiom)

    def failures(self) -> list[str]:
        return [r.axiom for r in self.results if not r.passed]

    def to_json(self) -> dict:
        return {
            "source": self.source,
            "ground": list(self.ground),
            "ok": self.ok,
            "axioms": {r.axiom: r.to_json() for r in self.results},
        }

    def __str__(self) -> str:
        lines = []
        for r in self.results:
            line = f"{r.axiom}: {'pass' if r.passed else 'FAIL'}"
            if r.counterexample:
                line += " " + " ".join(f"{k}={{{','.join(v)}}}" for k, v in r.counterexample.items())
            lines.append(line)
        return "\n".join(lines) + "\n"


def _by_order(m: MatroidView, masks: Iterable[int]) -> list[int]:
    return sorted(masks, key=m.order_key)


def _check_i1(m: MatroidView) -> AxiomResult:
    return AxiomResult("I1", m.table[0], None if m.table[0] else {"I": []})


def _check_i2(m: MatroidView) -> AxiomResult:
    # the least violating I' has a dependent one-element deletion
    for big in _by_order(m, (x for x in range(1 << m.n) if m.table[x])):
        if any(big >> i & 1 and not m.table[big ^ (1 << i)] for i in range(m.n)):
            small = min((s for s in submasks(big) if not m.table[s]), key=m.order_key)
            return AxiomResult("I2", False, {"I": m.sorted_of(small), "I'": m.sorted_of(big)})
    return AxiomResult("I2", True)


def _check_i3(m: MatroidView) -> AxiomResult:
    maximal = m.maximal_masks
    maximal_set = set(maximal)
    for I in _by_order(m, (x for x in range(1 << m.n) if m.table[x] and x not in maximal_set)):
        ext = 0
        for i in range(m.n):
            if not I >> i & 1 and m.table[I | 1 << i]:
                ext |= 1 << i
        for big in maximal:
            if not (big & ~I) & ext:
                return AxiomResult("I3", False, {"I": m.sorted_of(I), "I'": m.sorted_of(big)})
    return AxiomResult("I3", True)


def _check_im(m: MatroidView, i2_holds: bool) -> AxiomResult:
    """For all independent I inside X, some maximal independent J with I <= J <= X.

    Climbs greedily; when (I2) fails a one-element-maximal J is additionally
    checked against every independent proper superset inside X.
    """
    for X in _by_order(m, range(1 << m.n)):
        for I in _by_order(m, (s for s in submasks(X) if m.table[s])):
            J = I
            while True:
                J = m.greedy(X, start=J)
                if i2_holds:
                    break
                bigger = next((J | s for s in submasks(X & ~J) if s and m.table[J | s]), None)
                if bigger is None:
                    break
                J = bigger
            if not m.table[J]:
                return AxiomResult("IM", False, {"I": m.sorted_of(I), "X": m.sorted_of(X)})
    return AxiomResult("IM", True)


def _check_b1(m: MatroidView) -> AxiomResult:
    return AxiomResult("B1", bool(m.maximal_masks), None if m.maximal_masks else {"B": []})


def _check_b2(m: MatroidView) -> AxiomResult:
    bases = m.maximal_masks
    base_set = set(bases)
    for B1 in bases:
        for B2 in bases:
            for i in range(m.n):
                x = 1 << i
                if not B1 & x or B2 & x:
                    continue
                ok = any(
                    B2 >> j & 1 and not B1 >> j & 1 and ((B1 ^ x) | 1 << j) in base_set for j in range(m.n)
                )
                if not ok:
                    return AxiomResult(
                        "B2", False, {"B1": m.sorted_of(B1), "B2": m.sorted_of(B2), "x": [m.ground[i]]}
                    )
    return AxiomResult("B2", True)


def check_axioms(m: MatroidView) -> AxiomReport:
    """Check I1, I2, I3, IM, B1 and B2 exhaustively; failures carry a minimal counterexample."""
    i2 = _check_i2(m)
    results = (_check_i1(m), i2, _check_i3(m), _check_im(m, i2.passed), _check_b1(m), _check_b2(m))
    return AxiomReport(m.source, m.ground, results)


# --- circuits and cocircuits ------------------------------------------------------


def circuit_masks(m: MatroidView, max_size: int | None = None) -> list[int]:
    down = m._all_subsets_indep
    limit = m.n if max_size is None else max_size
    out = [
        C
        for C in range(1, 1 << m.n)
        if popcount(C) <= limit
        and not m.table[C]
        and all(down[C ^ (1 << i)] for i in range(m.n) if C >> i & 1)
    ]
    return sorted(out, key=m.order_key)


def circuits(m: MatroidView, max_size: int | None = None) -> list[frozenset[str]]:
    """Minimal dependent sets with at most ``max_size`` elements."""
    return [m.set_of(C) for C in circuit_masks(m, max_size)]


def cocircuit_masks(m: MatroidView, max_size: int | None = None) -> list[int]:
    bases = m.maximal_masks
    limit = m.n if max_size is None else max_size

    def meets_all(D: int) -> bool:
        return all(D & B for B in bases)

    out = [
        D
        for D in range(1, 1 << m.n)
        if popcount(D) <= limit
        and meets_all(D)
        and not any(meets_all(D ^ (1 << i)) for i in range(m.n) if D >> i & 1)
    ]
    return sorted(out, key=m.order_key)


def cocircuits(m: MatroidView, max_size: int | None = None) -> list[frozenset[str]]:
    """Minimal sets meeting every base (equivalently, complements of hyperplanes)."""
    return [m.set_of(D) for D in cocircuit_masks(m, max_size)]


# --- separations --------------------------------------------------------------


@dataclass(frozen=True)
class SeparationReport:
    """``d`` is the number of elements to delete from ``B_X | B_Y`` to reach a base."""

    X: frozenset[str]
    Y: frozenset[str]
    B_X: frozenset[str]
    B_Y: frozenset[str]
    B: frozenset[str]
    d: int
    choices_tried: int

    def is_k_separation(self, k: int) -> bool:
        return len(self.X) >= k and len(self.Y) >= k and self.d < k

    @property
    def order(self) -> int | None:
        """Least ``k`` for which this is a k-separation, or None."""
        k = self.d + 1
        return k if self.is_k_separation(k) else None

    def separations(self) -> dict[int, bool]:
        return {k: self.is_k_separation(k) for k in range(1, min(len(self.X), len(self.Y)) + 1)}

    def to_json(self) -> dict:
        return {
            "X": sorted(self.X),
            "Y": sorted(self.Y),
            "B_X": sorted(self.B_X),
            "B_Y": sorted(self.B_Y),
            "B": sorted(self.B),
            "d": self.d,
            "order": self.order,
            "k_separation": {str(k): v for k, v in self.separations().items()},
            "choices_tried": self.choices_tried,
        }


def _pick(options: list[int], rng: random.Random) -> list[int]:
    picks = [options[0], options[-1], options[len(options) // 2], rng.choice(options)]
    return picks


def separation_value(m: MatroidView, X: Iterable[str], seed: int = 0, exhaustive: bool = False) -> SeparationReport:
    """Compute ``d`` for the partition ``(X, E - X)`` over several choices and check they agree.

    The default tries four choices of ``(B_X, B_Y, B)``: first, last and middle
    in (cardinality, lex) order plus one seeded random pick. ``exhaustive``
    tries every pair of bases of the two sides and every maximal subset B.
    """
    Xm = m.mask(X)
    if Xm == 0 or Xm == m.full:
        raise ContractViolation("X must be a nonempty proper subset of the ground set")
    Ym = m.full & ~Xm
    rng = random.Random(seed)
    bx_all, by_all = m.maximal_within(Xm), m.maximal_within(Ym)
    if exhaustive:
        pairs = [(bx, by) for bx in bx_all for by in by_all]
    else:
        pairs = list(zip(_pick(bx_all, rng), _pick(by_all, rng)))
    base_set = set(m.maximal_masks)
    values: dict[int, tuple[int, int, int]] = {}
    tried = 0
    for bx, by in pairs:
        U = bx | by
        if exhaustive:
            Bs = m.maximal_within(U)
        else:
            idx = list(range(m.n))
            rng.shuffle(idx)
            Bs = [m.greedy(U), m.greedy(U, order=range(m.n - 1, -1, -1)), m.greedy(U, order=idx)]
        for B in Bs:
            if B not in base_set:
                raise ConsistencyError(f"{m.sorted_of(B)} is maximal in B_X | B_Y but not a base")
            tried += 1
            values.setdefault(popcount(U) - popcount(B), (bx, by, B))
    if len(values) != 1:
        raise ConsistencyError(f"d depends on the choice of bases: values {sorted(values)}")
    ((d, (bx, by, B)),) = values.items()
    return SeparationReport(m.set_of(Xm), m.set_of(Ym), m.set_of(bx), m.set_of(by), m.set_of(B), d, tried)


def k_separations(m: MatroidView, max_k: int) -> dict[int, list[frozenset[str]]]:
    """For each ``k <= max_k``, the sides X (containing the first element) of all k-separations."""
    out: dict[int, list[frozenset[str]]] = {k: [] for k in range(1, max_k + 1)}
    for Xm in range(1, m.full):
        if not Xm & 1:
            continue
        rep = separation_value(m, m.set_of(Xm))
        for k in out:
            if rep.is_k_separation(k):
                out[k].append(rep.X)
    return out


# --- maximal iff onto, at matroid level -------------------------------------------


@dataclass(frozen=True)
class BaseCriterionReport:
    onto_linkable: tuple[frozenset[str], ...]
    maximal: tuple[frozenset[str], ...]
    only_onto: tuple[frozenset[str], ...]
    only_maximal: tuple[frozenset[str], ...]

    @property
    def coincide(self) -> bool:
        return not self.only_onto and not self.only_maximal

    def to_json(self) -> dict:
        def dump(sets):
            return [sorted(s) for s in sets]

        return {
            "coincide": self.coincide,
            "onto_linkable": dump(self.onto_linkable),
            "maximal": dump(self.maximal),
            "only_onto": dump(self.only_onto),
            "only_maximal": dump(self.only_maximal),
        }


def base_criterion(d: Dimaze, guard: int | None = None, view: MatroidView | None = None) -> BaseCriterionReport:
    """Compare onto-linkable sets with maximal independent sets by separate enumerations."""
    m = view or MatroidView.from_dimaze(d, guard)
    onto = [mask for mask in range(1 << m.n) if m.table[mask] and is_onto_linkable(d, m.set_of(mask))]
    onto = sorted(onto, key=m.order_key)
    maximal = m.maximal_masks
    so, sm = set(onto), set(maximal)
    return BaseCriterionReport(
        tuple(m.set_of(x) for x in onto),
        tuple(m.set_of(x) for x in maximal),
        tuple(m.set_of(x) for x in onto if x not in sm),
        tuple(m.set_of(x) for x in maximal if x not in so),
    )


# --- finitarisation probe -----------------------------------------------------------


@dataclass(frozen=True)
class ProbeRow:
    """One truncation depth.

    ``rule_in_fin``: the rule's set is independent in the deeper truncation.
    ``rule_distance``: deletions needed to make it independent at depth ``k``.
    ``max_distance``: the same quantity maximized over the enumerated maximal
    elements of the deeper system restricted to the depth-``k`` vertices.
    """

    k: int
    rule_set: frozenset[str]
    rule_in_fin: bool
    rule_distance: int
    maximal_found: int
    max_distance: int
    worst: frozenset[str]
    exhaustive: bool
    budget_exhausted: bool

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "rule_set": sorted(self.rule_set),
            "rule_in_fin": self.rule_in_fin,
            "rule_distance": self.rule_distance,
            "maximal_found": self.maximal_found,
            "max_distance": self.max_distance,
            "worst": sorted(self.worst),
            "exhaustive": self.exhaustive,
            "budget_exhausted": self.budget_exhausted,
        }


@dataclass(frozen=True)
class ProbeReport:
    generator: str
    rule: str
    slack: int
    rows: tuple[ProbeRow, ...]

    def to_json(self) -> dict:
        return {"generator": self.generator, "rule": self.rule, "slack": self.slack, "rows": [r.to_json() for r in self.rows]}

    def __str__(self) -> str:
        head = f"{self.generator} rule={self.rule} slack={self.slack}"
        lines = [head, "k | |I| | I in fin | dist(I) | maximal | max dist | exhaustive"]
        for r in self.rows:
            flag = "yes" if r.exhaustive else ("budget" if r.budget_exhausted else "sampled")
            lines.append(
                f"{r.k} | {len(r.rule_set)} | {r.rule_in_fin} | {r.rule_distance} | "
                f"{r.maximal_found} | {r.max_distance} | {flag}"
            )
        return "\n".join(lines) + "\n"


def deletion_distance(d: Dimaze, S: Iterable[str]) -> int:
    """Least number of elements to delete from ``S`` to make it independent in ``d``."""
    S = frozenset(S)
    link, _ = max_linkage(d, S)
    return len(S) - len(link)


def finitarisation_probe(
    g: FamilyGenerator,
    rule: str,
    ks: Iterable[int],
    slack: int | None = None,
    exhaustive_limit: int = 12,
    samples: int = 64,
    budget: int = 200_000,
    seed: int = 0,
) -> ProbeReport:
    """Approximate the finitarisation by a deeper truncation and measure deletion distance.

    At depth ``k`` a set of depth-``k`` vertices counts as finitarily
    independent when it is independent in the depth-``k + slack`` truncation.
    Maximal such sets are enumerated exhaustively for at most
    ``exhaustive_limit`` vertices, otherwise by ``samples`` seeded greedy runs.
    ``budget`` caps the number of independence queries per depth.
    """
    if slack is None:
        slack = (g.n or 1) + 1
    rng = random.Random(seed)
    rows = []
    for k in ks:
        gk = g.with_k(k)
        dk = generate(gk)
        deep = generate(g.with_k(k + slack))
        I = apply_rule(rule, gk, dk)
        if not I <= dk.vertex_set:
            raise ContractViolation(f"rule {rule} left the depth-{k} vertex set")
        queries = 0
        exhausted = False

        def fin(S: frozenset[str]) -> bool:
            nonlocal queries
            queries += 1
            return bool(is_independent(deep, S))

        verts = dk.vertices
        found: set[frozenset[str]] = set()
        exhaustive = len(verts) <= exhaustive_limit
        if exhaustive:
            view = MatroidView(verts, fin, "truncation", guard=exhaustive_limit)
            found = set(view.maximal_sets())
        else:
            orders = []
            if fin(I):
                orders.append(sorted(I) + sorted(set(verts) - I))
            for _ in range(samples):
                order = list(verts)
                rng.shuffle(order)
                orders.append(order)
            for order in orders:
                if queries + len(order) > budget:
                    exhausted = True
                    break
                S: frozenset[str] = frozenset()
                for v in order:
                    if fin(S | {v}):
                        S = S | {v}
                found.add(S)
        dists = {S: deletion_distance(dk, S) for S in found}
        worst = max(sorted(dists, key=sorted), key=lambda S: dists[S]) if dists else frozenset()
        rows.append(
            ProbeRow(
                k, I, fin(I), deletion_distance(dk, I), len(found), dists.get(worst, 0), worst, exhaustive, exhausted
            )
        )
    return ProbeReport(g.label, rule, slack, tuple(rows))
