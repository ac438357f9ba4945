import itertools
import random

import pytest
from hypothesis import given

import oracles
from conftest import dimaze_and_subset, dimazes
from gammoid.dimaze import Dimaze, Linkage, linkage_violations
from gammoid.errors import ContractViolation
from gammoid.families import FamilyGenerator, cell, generate
from gammoid.linkage import (
    Augmentation,
    SeparatorOnLinkage,
    augment,
    augment_toward_base,
    extend_onto,
    is_independent,
    is_onto_linkable,
    max_linkage,
    relink_through_separator,
    separator_violations,
    walk_violations,
)

STAR2 = generate(FamilyGenerator("star", 2))
ALT2 = generate(FamilyGenerator("alt_comb", 2))
AB = Dimaze(("a", "b"), frozenset({("a", "b")}), frozenset({"b"}))


class TestAugment:
    def test_star_reroutes_around_trivial_exit(self):
        res = augment(STAR2, {"c", "e1"}, Linkage.of(["e1"]))
        assert isinstance(res, Augmentation)
        assert res.linkage == Linkage.of(["c", "e2"], ["e1"])
        assert walk_violations(STAR2, {"c", "e1"}, Linkage.of(["e1"]), res.walk) == []

    def test_blocked_path_gives_separator(self):
        res = augment(AB, {"a", "b"}, Linkage.of(["b"]))
        assert isinstance(res, SeparatorOnLinkage)
        assert res.separator == {"b"}
        assert separator_violations(AB, {"a", "b"}, res) == []

    def test_empty(self):
        res = augment(STAR2, set(), Linkage.empty())
        assert isinstance(res, SeparatorOnLinkage)
        assert res.separator == frozenset()

    def test_link_must_start_in_x(self):
        with pytest.raises(ContractViolation):
            augment(STAR2, {"c"}, Linkage.of(["e1"]))

    def test_link_must_be_a_linkage(self):
        with pytest.raises(ContractViolation):
            augment(STAR2, {"e1", "c"}, Linkage.of(["e1", "c"]))

    def test_reversal_walk(self):
        d = Dimaze(tuple("abce"), frozenset({("a", "c"), ("b", "c"), ("a", "e")}), frozenset({"c", "e"}))
        link = Linkage.of(["a", "c"])
        res = augment(d, {"a", "b"}, link)
        assert str(res.walk) == "b->c<-a->e"
        assert res.linkage == Linkage.of(["a", "e"], ["b", "c"])
        assert walk_violations(d, {"a", "b"}, link, res.walk) == []


class TestMaxLinkage:
    def test_half_grid(self):
        d = generate(FamilyGenerator("half_grid", 2))
        X = {cell(1, 1), cell(2, 2)}
        link, sep = max_linkage(d, X)
        assert len(link) == 2 == len(sep.separator)
        assert oracles.max_disjoint_paths(d, X) == 2

    def test_star(self):
        link, sep = max_linkage(STAR2, {"c", "e1", "e2"})
        assert len(link) == 2

    def test_no_exits(self):
        d = Dimaze(("a",), frozenset(), frozenset())
        link, sep = max_linkage(d, {"a"})
        assert len(link) == 0 and sep.separator == frozenset()

    def test_unknown_source(self):
        with pytest.raises(ContractViolation):
            max_linkage(STAR2, {"zz"})


class TestIndependence:
    def test_alt_comb_witness(self):
        res = is_independent(ALT2, {"x1", "x2"})
        assert res and res.witness == Linkage.of(["x1", "y0"], ["x2", "y1"])

    def test_star_dependent(self):
        assert not is_independent(STAR2, {"c", "e1", "e2"})

    def test_empty(self):
        res = is_independent(STAR2, set())
        assert res and res.witness == Linkage.empty()

    def test_onto(self):
        assert is_onto_linkable(STAR2, {"c", "e1"})
        assert not is_onto_linkable(STAR2, {"c"})


class TestExtendOnto:
    def test_star(self):
        assert extend_onto(STAR2, Linkage.of(["c", "e1"])) == Linkage.of(["c", "e1"], ["e2"])

    def test_alt_comb(self):
        out = extend_onto(ALT2, Linkage.of(["x1", "y1"], ["x2", "y2"]))
        assert out == Linkage.of(["x1", "y1"], ["x2", "y2"], ["y0"])
        assert oracles.is_linkage(ALT2, [p.vertices for p in out.paths])

    def test_empty_on_path(self):
        assert extend_onto(AB, Linkage.empty()) == Linkage.of(["b"])


class TestAugmentTowardBase:
    def test_star_exit(self):
        assert augment_toward_base(STAR2, {"e1"}, {"e1", "e2"}).element == "e2"

    def test_star_centre(self):
        assert augment_toward_base(STAR2, {"c"}, {"e1", "e2"}).element in {"e1", "e2"}

    def test_maximal(self):
        res = augment_toward_base(STAR2, {"e1", "e2"}, {"e1", "e2"})
        assert res.maximal and res.element is None

    def test_non_maximal_b(self):
        with pytest.raises(ContractViolation, match="not maximal"):
            augment_toward_base(STAR2, set(), {"e1"})

    def test_dependent(self):
        with pytest.raises(ContractViolation):
            augment_toward_base(STAR2, {"c", "e1", "e2"}, {"e1", "e2"})


def test_relink_through_separator():
    # blue from {a}, red the trivial path at b; the separator {b} splices them
    out = relink_through_separator(Linkage.of(["a", "b"]), Linkage.of(["b"]), {"b"})
    assert out == Linkage.of(["a", "b"])


# --- properties against brute force -------------------------------------------


@given(dimaze_and_subset(6))
def test_independence_matches_brute_force(case):
    d, X = case
    res = is_independent(d, X)
    assert bool(res) == oracles.linkable(d, X)
    if res:
        assert res.witness.ini() == X
        assert linkage_violations(d, res.witness) == []


@given(dimaze_and_subset(7))
def test_menger(case):
    d, X = case
    link, sep = max_linkage(d, X)
    assert link.ini() <= X
    assert len(link) == len(sep.separator) == oracles.max_disjoint_paths(d, X)
    assert separator_violations(d, X, sep) == []


@given(dimaze_and_subset(7))
def test_every_walk_is_alternating(case):
    d, X = case
    link = Linkage.empty()
    for _ in range(len(d.exits) + 1):
        res = augment(d, X, link)
        if isinstance(res, SeparatorOnLinkage):
            assert separator_violations(d, X, res) == []
            break
        assert walk_violations(d, X, link, res.walk) == []
        assert link.ini() < res.linkage.ini() <= X
        assert link.ter() < res.linkage.ter() <= d.exits
        link = res.linkage


@given(dimazes(6))
def test_onto_linkable_matches_brute_force(d):
    for r in range(len(d.vertices) + 1):
        for S in itertools.combinations(d.vertices, r):
            assert bool(is_onto_linkable(d, S)) == oracles.onto_linkable(d, S)


def test_augment_toward_base_on_random_instances():
    rng = random.Random(7)
    for _ in range(150):
        d = oracles.random_dimaze(rng, rng.randint(1, 6))
        fam = oracles.independent_family(d)
        bases = sorted(oracles.maximal_sets(fam), key=sorted)
        for I in sorted(fam, key=sorted)[:8]:
            B = rng.choice(bases)
            res = augment_toward_base(d, I, B)
            if res.maximal:
                assert I in bases
            else:
                assert res.element in B - I
                assert I | {res.element} in fam


def test_walk_validator_rejects_bad_walks():
    from gammoid.linkage import AlternatingWalk

    link = Linkage.of(["e1"])
    # traverses no linkage edge yet visits e1, and starts inside V(P)
    bad = AlternatingWalk(("e1", "c"), (("c", "e1"),))
    problems = walk_violations(STAR2, {"c", "e1"}, link, bad)
    assert any("starts at e1" in p for p in problems)
    assert any("backwards iff" in p for p in problems)


GAP = Dimaze(tuple("ade"), frozenset({("a", "d"), ("a", "e")}), frozenset({"d", "e"}))


def test_source_inside_linkage_is_used():
    # d lies on a>d without starting it; rerouting a onto e frees d
    res = augment(GAP, {"a", "d"}, Linkage.of(["a", "d"]))
    assert isinstance(res, Augmentation)
    assert res.linkage == Linkage.of(["a", "e"], ["d"])
    assert str(res.walk) == "d<-a->e"
    assert walk_violations(GAP, {"a", "d"}, Linkage.of(["a", "d"]), res.walk) == []


def test_max_linkage_with_source_on_first_path():
    link, sep = max_linkage(GAP, {"a", "d"})
    assert len(link) == 2
    assert separator_violations(GAP, {"a", "d"}, sep) == []


def test_menger_seeded_sweep():
    rng = random.Random(11)
    for _ in range(300):
        d = oracles.random_dimaze(rng, rng.randint(1, 7))
        X = frozenset(v for v in d.vertices if rng.random() < 0.6)
        link, sep = max_linkage(d, X)
        assert len(link) == len(sep.separator) == oracles.max_disjoint_paths(d, X)
        assert separator_violations(d, X, sep) == []
