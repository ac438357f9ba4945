import pytest

from gammoid.dimaze import validate
from gammoid.errors import ParameterError
from gammoid.families import FAMILIES, RULES, FamilyGenerator, apply_rule, frontier, generate

PARAMS = {"turbine": {"n": 2}, "branching_tree": {"b": 2}}


def gen(family, k):
    return generate(FamilyGenerator(family, k, **PARAMS.get(family, {})))


@pytest.mark.parametrize("family", FAMILIES)
@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_truncations_are_valid(family, k):
    assert validate(gen(family, k)) == []


@pytest.mark.parametrize("family", FAMILIES)
@pytest.mark.parametrize("k", [1, 2, 3])
def test_truncations_are_induced_and_nested(family, k):
    small, big = gen(family, k), gen(family, k + 1)
    assert small.vertex_set < big.vertex_set
    induced = {(t, h) for t, h in big.edges if t in small.vertex_set and h in small.vertex_set}
    assert small.edges == induced
    assert small.exits == big.exits & small.vertex_set


def test_sizes():
    assert len(gen("star", 2).vertices) == 3
    assert len(gen("path", 3).vertices) == 4
    assert len(gen("half_grid", 2).vertices) == 5
    assert len(gen("alt_comb", 3).vertices) == 7
    assert len(gen("incoming_comb", 3).vertices) == 7
    assert len(generate(FamilyGenerator("turbine", 3, n=3)).vertices) == 4 + 3 * 4
    assert len(generate(FamilyGenerator("branching_tree", 2, b=3)).vertices) == 1 + 3 + 9


def test_alt_comb_shape():
    d = gen("alt_comb", 2)
    assert d.edges == {("x1", "y0"), ("x1", "y1"), ("x2", "y1"), ("x2", "y2")}
    assert d.exits == {"y0", "y1", "y2"}


def test_half_grid_shape():
    d = gen("half_grid", 2)
    assert d.vertices == ("(0,1)", "(0,2)", "(1,1)", "(1,2)", "(2,2)")
    assert d.edges == {("(1,1)", "(0,1)"), ("(1,1)", "(1,2)"), ("(1,2)", "(0,2)"), ("(2,2)", "(1,2)")}
    assert d.exits == {"(0,1)", "(0,2)"}


def test_branching_tree_orientation():
    d = generate(FamilyGenerator("branching_tree", 2, b=2))
    assert d.exits == {"t", "t.1.1", "t.1.2", "t.2.1", "t.2.2"}
    assert all(h in d.exits and t not in d.exits for t, h in d.edges)


@pytest.mark.parametrize(
    "g",
    [
        FamilyGenerator("star", 0),
        FamilyGenerator("nope", 2),
        FamilyGenerator("turbine", 3),
        FamilyGenerator("turbine", 3, n=1),
        FamilyGenerator("branching_tree", 2, b=0),
    ],
)
def test_bad_parameters(g):
    with pytest.raises(ParameterError):
        generate(g)


def test_frontier():
    assert frontier(FamilyGenerator("alt_comb", 4)) == {"y4"}
    assert frontier(FamilyGenerator("star", 4)) == frozenset()


@pytest.mark.parametrize("rule", sorted(RULES))
def test_rules_stay_inside(rule):
    g = FamilyGenerator("half_grid", 3)
    d = generate(g)
    assert apply_rule(rule, g, d) <= d.vertex_set


def test_rule_values():
    g = FamilyGenerator("turbine", 2, n=2)
    assert apply_rule("spine", g, generate(g)) == {"r1_0", "r1_1", "r1_2"}
    g = FamilyGenerator("half_grid", 2)
    assert apply_rule("diagonal_exits", g, generate(g)) == {"(1,1)", "(2,2)", "(0,1)", "(0,2)"}
    with pytest.raises(ParameterError):
        apply_rule("diagonal", FamilyGenerator("star", 2), generate(FamilyGenerator("star", 2)))
    with pytest.raises(ParameterError):
        apply_rule("bogus", g, generate(g))


def test_label():
    assert FamilyGenerator("turbine", 3, n=2).label == "turbine(n=2)"
    assert str(FamilyGenerator("turbine", 3, n=2)) == "turbine(k=3,n=2)"
    assert FamilyGenerator("star", 3).label == "star"
