"""Finite truncations of the infinite dimaze families.

Every family is parameterized by a truncation depth ``k`` and the depth-k
dimaze is an induced sub-dimaze of the depth-(k+1) one, exits included.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable

from .dimaze import Dimaze
from .errors import ParameterError

FAMILIES = ("star", "path", "half_grid", "alt_comb", "incoming_comb", "turbine", "branching_tree")


@dataclass(frozen=True)
class FamilyGenerator:
    """A named family plus its integer parameters.

    ``k`` is the truncation depth (number of leaves for ``star``, tree depth for
    ``branching_tree``); ``n`` is the turbine copy count; ``b`` the branching.
    """

    family: str
    k: int
    n: int | None = None
    b: int | None = None

    def with_k(self, k: int) -> FamilyGenerator:
        return replace(self, k=k)

    def _extra(self) -> str:
        return "".join(f",{name}={val}" for name, val in (("n", self.n), ("b", self.b)) if val is not None)

    def __str__(self) -> str:
        return f"{self.family}(k={self.k}{self._extra()})"

    @property
    def label(self) -> str:
        """Name and parameters other than ``k``."""
        extra = self._extra()
        return f"{self.family}({extra[1:]})" if extra else self.family


def _check(g: FamilyGenerator) -> None:
    if g.family not in FAMILIES:
        raise ParameterError(f"unknown family {g.family!r}; expected one of {', '.join(FAMILIES)}")
    if not isinstance(g.k, int) or g.k < 1:
        raise ParameterError(f"{g.family}: k must be >= 1, got {g.k!r}")
    if g.family == "turbine" and (g.n is None or g.n < 2):
        raise ParameterError(f"turbine: n must be >= 2, got {g.n!r}")
    if g.family == "branching_tree" and (g.b is None or g.b < 1):
        raise ParameterError(f"branching_tree: b must be >= 1, got {g.b!r}")


def _star(k: int) -> Dimaze:
    leaves = [f"e{i}" for i in range(1, k + 1)]
    return Dimaze(("c", *leaves), frozenset(("c", e) for e in leaves), frozenset(leaves))


def _path(k: int) -> Dimaze:
    # directed toward p0 so that the exit survives deeper truncations
    vs = [f"p{i}" for i in range(k + 1)]
    return Dimaze(tuple(vs), frozenset((vs[i], vs[i - 1]) for i in range(1, k + 1)), frozenset({"p0"}))


def cell(x: int, y: int) -> str:
    return f"({x},{y})"


def _half_grid(k: int) -> Dimaze:
    cells = [(x, y) for y in range(1, k + 1) for x in range(0, y + 1)]
    edges = set()
    for x, y in cells:
        if x >= 1:
            edges.add((cell(x, y), cell(x - 1, y)))
            if y + 1 <= k:
                edges.add((cell(x, y), cell(x, y + 1)))
    exits = {cell(0, y) for y in range(1, k + 1)}
    return Dimaze(tuple(cell(x, y) for x, y in cells), frozenset(edges), frozenset(exits))


def _alt_comb(k: int) -> Dimaze:
    ys = [f"y{i}" for i in range(k + 1)]
    xs = [f"x{i}" for i in range(1, k + 1)]
    edges = {(f"x{i}", f"y{i - 1}") for i in range(1, k + 1)} | {(f"x{i}", f"y{i}") for i in range(1, k + 1)}
    return Dimaze(tuple(xs + ys), frozenset(edges), frozenset(ys))


def _incoming_comb(k: int) -> Dimaze:
    rs = [f"r{i}" for i in range(1, k + 1)]
    es = [f"e{i}" for i in range(k + 1)]
    edges = {(f"r{i}", f"r{i - 1}") for i in range(2, k + 1)}
    edges |= {(f"r{i}", f"e{i}") for i in range(1, k + 1)}
    edges.add(("r1", "e0"))
    return Dimaze(tuple(rs + es), frozenset(edges), frozenset(es))


def turbine_spine(copy: int, i: int) -> str:
    return f"r{copy}_{i}"


def _turbine(n: int, k: int) -> Dimaze:
    vertices = [f"e{i}" for i in range(k + 1)]
    edges = set()
    for c in range(1, n + 1):
        for i in range(k + 1):
            vertices.append(turbine_spine(c, i))
            edges.add((turbine_spine(c, i), f"e{i}"))
            if i < k:
                edges.add((turbine_spine(c, i), turbine_spine(c, i + 1)))
    return Dimaze(tuple(vertices), frozenset(edges), frozenset(f"e{i}" for i in range(k + 1)))


def _branching_tree(b: int, depth: int) -> Dimaze:
    levels = [["t"]]
    for _ in range(depth):
        levels.append([f"{p}.{j}" for p in levels[-1] for j in range(1, b + 1)])
    vertices, edges, exits = [], set(), set()
    for lvl, names in enumerate(levels):
        vertices += names
        if lvl % 2 == 0:
            exits.update(names)
        if lvl:
            for child in names:
                parent = child.rsplit(".", 1)[0]
                # every edge points at its even-level (exit) endpoint
                edges.add((child, parent) if lvl % 2 else (parent, child))
    return Dimaze(tuple(vertices), frozenset(edges), frozenset(exits))


def generate(g: FamilyGenerator) -> Dimaze:
    """The canonical depth-``g.k`` truncation of the family."""
    _check(g)
    if g.family == "star":
        return _star(g.k)
    if g.family == "path":
        return _path(g.k)
    if g.family == "half_grid":
        return _half_grid(g.k)
    if g.family == "alt_comb":
        return _alt_comb(g.k)
    if g.family == "incoming_comb":
        return _incoming_comb(g.k)
    if g.family == "turbine":
        return _turbine(g.n, g.k)
    return _branching_tree(g.b, g.k)


def frontier(g: FamilyGenerator) -> frozenset[str]:
    """Exits that, in the infinite object, are also reached from beyond the cut.

    Only the alternating comb has one: ``y_k`` is the second out-neighbour of
    the missing ``x_(k+1)``.
    """
    _check(g)
    if g.family == "alt_comb":
        return frozenset({f"y{g.k}"})
    return frozenset()


# --- vertex-set rules for finitarisation probes ----------------------------

Rule = Callable[[FamilyGenerator, Dimaze], frozenset]


def _spine(g: FamilyGenerator, d: Dimaze) -> frozenset[str]:
    if g.family == "turbine":
        return frozenset(turbine_spine(1, i) for i in range(g.k + 1))
    return frozenset(v for v in d.vertices if v not in d.exits)


def _diagonal(g: FamilyGenerator, d: Dimaze) -> frozenset[str]:
    if g.family != "half_grid":
        raise ParameterError("the diagonal rule only applies to half_grid")
    return frozenset(cell(x, x) for x in range(1, g.k + 1))


RULES: dict[str, Rule] = {
    "empty": lambda g, d: frozenset(),
    "all": lambda g, d: frozenset(d.vertices),
    "exits": lambda g, d: d.exits,
    "spine": _spine,
    "nonexits": lambda g, d: frozenset(v for v in d.vertices if v not in d.exits),
    "diagonal": _diagonal,
    "diagonal_exits": lambda g, d: _diagonal(g, d) | d.exits,
}


def apply_rule(name: str, g: FamilyGenerator, d: Dimaze) -> frozenset[str]:
    try:
        rule = RULES[name]
    except KeyError:
        raise ParameterError(f"unknown rule {name!r}; expected one of {', '.join(RULES)}") from None
    return frozenset(rule(g, d))
