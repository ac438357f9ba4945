"""Linkability systems of dimazes, Pym's linkage merge and transversal matroids on trees."""

from .dimaze import Dimaze, DirectedPath, Linkage, parse, serialize, validate
from .errors import (
    ConsistencyError,
    ContractViolation,
    GammoidError,
    ModeError,
    ParameterError,
    ParseError,
    SizeGuardError,
    UnknownVertexError,
)
from .families import FamilyGenerator, frontier, generate
from .linkage import augment, augment_toward_base, extend_onto, is_independent, is_onto_linkable, max_linkage
from .matroid import (
    MatroidView,
    base_criterion,
    check_axioms,
    circuits,
    cocircuits,
    finitarisation_probe,
    separation_value,
)
from .pym import check_dagger, comb_trace, exchange, merge
from .transversal import (
    BipartiteGraph,
    Matching,
    dimaze_tree_to_bipartite,
    mt_augment,
    mt_is_independent,
    tree_maximal_extension,
)

__all__ = [
    "BipartiteGraph",
    "ConsistencyError",
    "ContractViolation",
    "Dimaze",
    "DirectedPath",
    "FamilyGenerator",
    "GammoidError",
    "Linkage",
    "Matching",
    "MatroidView",
    "ModeError",
    "ParameterError",
    "ParseError",
    "SizeGuardError",
    "UnknownVertexError",
    "augment",
    "augment_toward_base",
    "base_criterion",
    "check_axioms",
    "check_dagger",
    "circuits",
    "cocircuits",
    "comb_trace",
    "dimaze_tree_to_bipartite",
    "exchange",
    "extend_onto",
    "finitarisation_probe",
    "frontier",
    "generate",
    "is_independent",
    "is_onto_linkable",
    "max_linkage",
    "merge",
    "mt_augment",
    "mt_is_independent",
    "parse",
    "separation_value",
    "serialize",
    "tree_maximal_extension",
    "validate",
]
