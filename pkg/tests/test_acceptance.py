"""Acceptance suite: one test per criterion, each printing a pass/fail line.

Instances are seeded so every run checks the same objects. The census and the
random sample behind criteria 1, 2 and 10 are built once per module.
"""

import itertools
import random

import networkx as nx
import pytest

import oracles
from gammoid.dimaze import Linkage
from gammoid.errors import ContractViolation
from gammoid.families import FamilyGenerator, frontier, generate
from gammoid.linkage import is_independent, max_linkage, separator_violations
from gammoid.matroid import MatroidView, base_criterion, check_axioms, finitarisation_probe, separation_value
from gammoid.pym import check_dagger, comb_trace, comb_violations, exchange, merge
from gammoid.transversal import (
    dimaze_tree_to_bipartite,
    dimaze_vertex_map,
    mt_is_independent,
    stage_violations,
    tree_maximal_extension,
)

SEED = 20240601


@pytest.fixture(scope="module")
def desk_instances():
    """Every dimaze on at most 5 vertices up to isomorphism, then 1000 random ones on at most 8."""
    rng = random.Random(SEED)
    census = list(oracles.census(5))
    sample = [oracles.random_dimaze(rng, rng.randint(1, 8)) for _ in range(1000)]
    return [(d, MatroidView.from_dimaze(d)) for d in census + sample], len(census)


def test_criterion_01_axioms(criterion, desk_instances):
    instances, n_census = desk_instances
    with criterion(1, "I1 I2 I3 IM B1 B2 hold on desk-scale gammoids") as note:
        bad = [(d, check_axioms(m).failures()) for d, m in instances if not check_axioms(m).ok]
        assert not bad, f"{len(bad)} failures, first {bad[0]}"
        note(f"{n_census} census + {len(instances) - n_census} random")


def test_criterion_02_base_criterion(criterion, desk_instances):
    instances, _ = desk_instances
    with criterion(2, "onto-linkable sets are exactly the maximal independent sets") as note:
        mismatches = [d for d, m in instances if not base_criterion(d, view=m).coincide]
        assert not mismatches, f"{len(mismatches)} mismatches"
        named = [generate(FamilyGenerator(f, k)) for f in ("star", "path", "half_grid", "alt_comb", "incoming_comb") for k in (1, 2, 3)]
        named.append(generate(FamilyGenerator("turbine", 1, n=2)))
        assert all(check_dagger(d) == [] for d in named)
        note(f"{len(instances) + len(named)} instances, 0 mismatches")


def test_criterion_03_menger(criterion):
    rng = random.Random(SEED + 3)
    with criterion(3, "max linkage size = separator size = brute-force path count") as note:
        mismatches = 0
        for _ in range(1000):
            d = oracles.random_dimaze(rng, rng.randint(1, 8))
            X = frozenset(v for v in d.vertices if rng.random() < 0.5)
            link, sep = max_linkage(d, X)
            brute = oracles.max_disjoint_paths(d, X)
            if not (len(link.ini()) == len(sep.separator) == brute) or separator_violations(d, X, sep):
                mismatches += 1
        assert mismatches == 0, f"{mismatches} mismatches"
        note("1000 random (d, X), 0 mismatches")


def test_criterion_04_merge(criterion):
    rng = random.Random(SEED + 4)
    with criterion(4, "merge output inclusions, linkage validity, marker monotonicity") as note:
        nontrivial = 0
        for _ in range(1000):
            n = rng.randint(2, 10)
            d = oracles.random_dimaze(rng, n, p=rng.uniform(0.1, 0.45))
            red = Linkage.of(*oracles.random_linkage(rng, d, tries=n))
            blue = Linkage.of(*oracles.random_linkage(rng, d, tries=n))
            # merge raises on any backwards marker step
            res = merge(d, red, blue, record=True)
            out = res.linkage
            assert oracles.is_linkage(d, [p.vertices for p in out.paths])
            assert red.ini() <= out.ini() <= red.ini() | blue.ini()
            assert blue.ter() <= out.ter() <= blue.ter() | red.ter()
            for a, b in zip(res.history, res.history[1:]):
                assert all(red.path_from(x).index(a.f[x]) <= red.path_from(x).index(b.f[x]) for x in a.f)
                assert all(blue.path_to(y).index(a.t[y]) <= blue.path_to(y).index(b.t[y]) for y in a.t)
            nontrivial += len(res.history) > 2
        assert nontrivial >= 100
        note(f"1000 triples, {nontrivial} needing more than one step")


def test_criterion_05_exchange(criterion):
    rng = random.Random(SEED + 5)
    with criterion(5, "exchange makes J+v-u independent") as note:
        done = swaps = 0
        while done < 1000:
            d = oracles.random_dimaze(rng, rng.randint(2, 7))
            fam = sorted(oracles.independent_family(d), key=sorted)
            for _ in range(5):
                I, J = rng.choice(fam), rng.choice(fam)
                if not I - J:
                    continue
                v = rng.choice(sorted(I - J))
                res = exchange(d, I, J, v)
                if res.u is None:
                    assert J | {v} in fam
                else:
                    assert res.u in J - I and (J | {v}) - {res.u} in fam
                    swaps += 1
                done += 1
        note(f"{done} instances, {swaps} with a swap")


def test_criterion_06_comb_depth(criterion):
    with criterion(6, "alt_comb traces reach depth >= k-2; star and path stay at depth <= 1") as note:
        depths = []
        for k in range(3, 9):
            g = FamilyGenerator("alt_comb", k)
            c = comb_trace(generate(g), {f"x{i}" for i in range(1, k + 1)}, "y0", k + 2, frontier(g))
            assert comb_violations(c) == []
            assert c.depth >= k - 2, f"k={k}: depth {c.depth}"
            depths.append(c.depth)
        admissible = 0
        for family in ("star", "path"):
            for k in range(1, 6):
                d = generate(FamilyGenerator(family, k))
                for F, I, x0 in _trace_inputs(d):
                    try:
                        c = comb_trace(d, I, x0, 5, F)
                    except ContractViolation:
                        continue
                    admissible += 1
                    assert c.depth <= 1, f"{family}({k}) I={sorted(I)} x0={x0}: depth {c.depth}"
        note(f"alt_comb depths {depths}; {admissible} star/path traces")


def _trace_inputs(d):
    for r in range(len(d.exits) + 1):
        for F in itertools.combinations(sorted(d.exits), r):
            for s in range(len(d.vertices) + 1):
                for I in itertools.combinations(d.vertices, s):
                    for x0 in d.vertices:
                        if x0 not in I:
                            yield frozenset(F), frozenset(I), x0


def _random_matching_side(rng, g):
    edges = sorted(g.edges)
    rng.shuffle(edges)
    used_l, used_r = set(), set()
    for v, w in edges:
        if v not in used_l and w not in used_r and rng.random() < 0.6:
            used_l.add(v)
            used_r.add(w)
    return frozenset(used_l)


def _nx_rank(g, S):
    G = nx.Graph()
    G.add_nodes_from(S, bipartite=0)
    G.add_nodes_from(g.right, bipartite=1)
    G.add_edges_from((v, w) for v, w in g.edges if v in S)
    return len(nx.bipartite.maximum_matching(G, top_nodes=set(S))) // 2


def test_criterion_07_tree_transversal(criterion):
    rng = random.Random(SEED + 7)
    with criterion(7, "tree stage construction gives maximum bases and keeps its invariants") as note:
        rootings = runs = 0
        for n in range(2, 13):
            for T in nx.nonisomorphic_trees(n):
                edges = list(T.edges())
                roots = range(n) if n <= 9 else sorted(set(rng.sample(range(n), 3)) | {0, edges[0][1]})
                for root in roots:
                    g = oracles.bigraph_from_tree(edges, n, root)
                    best = _nx_rank(g, g.left)
                    if len(g.left) <= 6:
                        subsets = (frozenset(S) for r in range(len(g.left) + 1) for S in itertools.combinations(g.left, r))
                        inputs = [S for S in subsets if oracles.matchable(g, S)]
                    else:
                        inputs = {_random_matching_side(rng, g) for _ in range(12)}
                    rootings += 1
                    for I in inputs:
                        ext = tree_maximal_extension(g, I)
                        assert I <= ext.B
                        assert _nx_rank(g, ext.B) == len(ext.B) == best
                        assert stage_violations(g, ext) == []
                        runs += 1
        note(f"{rootings} rooted trees, {runs} extensions")


def test_criterion_08_tree_conversion(criterion):
    with criterion(8, "branching-tree linkability equals the converted transversal system") as note:
        checked = 0
        for b in range(1, 10):
            for k in itertools.count(1):
                d = generate(FamilyGenerator("branching_tree", k, b=b))
                if len(d.vertices) > 10:
                    break
                g = dimaze_tree_to_bipartite(d)
                phi = dimaze_vertex_map(d)
                for r in range(len(d.vertices) + 1):
                    for S in itertools.combinations(d.vertices, r):
                        image = [phi[v] for v in S]
                        lhs = bool(is_independent(d, S))
                        assert lhs == bool(mt_is_independent(g, image)) == oracles.matchable(g, image), (b, k, S)
                        checked += 1
        note(f"{checked} subsets")


def test_criterion_09_turbine(criterion):
    with criterion(9, "turbine finitarisation elements lie within n deletions") as note:
        seen = []
        for n in (2, 3):
            rep = finitarisation_probe(FamilyGenerator("turbine", 3, n=n), "spine", range(3, 7), seed=SEED)
            for row in rep.rows:
                assert row.max_distance <= n, f"n={n} k={row.k}: {row.max_distance}"
                assert row.rule_distance <= n
                assert not row.budget_exhausted
            seen.append(max(r.max_distance for r in rep.rows))
        note(f"max distance {seen[0]} for n=2, {seen[1]} for n=3")


def test_criterion_10_separation(criterion, desk_instances):
    instances, n_census = desk_instances
    rng = random.Random(SEED + 10)
    with criterion(10, "separation value agrees across base choices") as note:
        partitions = 0
        for i, (_, m) in enumerate(instances):
            proper = list(range(1, m.full))
            masks = proper if i < n_census else rng.sample(proper, min(12, len(proper)))
            for X in masks:
                # raises on any disagreement between choices
                rep = separation_value(m, m.set_of(X), seed=i)
                assert rep.choices_tried >= 3
                partitions += 1
        note(f"{partitions} partitions, 0 disagreements")
