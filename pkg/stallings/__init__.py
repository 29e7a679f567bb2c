"""
PSL2 Subgroups Stallings Module

Represents finitely generated subgroups of PSL2(Z) = Z2 * Z3:
- Words and shortlex normal forms
- Stallings graphs (folding, PSL2(Z) completion, validation)
- Membership, conjugation, cyclically reduced cores, canonical forms
- Index, isomorphism type, freeness and bases
- Realization of combinatorial types
- JSON / DOT export

Author: PSL2 Subgroups Team
License: MIT
"""

__version__ = "1.0.0"
__author__ = "PSL2 Subgroups Team"

from .words import Letter, Word, free_reduce, normalize_shortlex, is_equal_in_group, parse_generators
from .graphs import (
    CombinatorialType,
    StallingsGraph,
    WorkGraph,
    build_work_graph,
    fold,
    psl2_complete,
    stallings_graph,
    validate,
    combinatorial_type,
    membership,
    conjugate,
    cyclically_reduced_core,
    core_vertices,
    canonical_form,
    canonical_relabel,
)
from .properties import Basis, IsomorphismType, index, isomorphism_type, is_free, basis, access_path_length
from .realization import is_realizable, realize_type
from .export import graph_to_json, graph_from_json, graph_to_dot

__all__ = [
    "Letter",
    "Word",
    "free_reduce",
    "normalize_shortlex",
    "is_equal_in_group",
    "parse_generators",
    "CombinatorialType",
    "StallingsGraph",
    "WorkGraph",
    "build_work_graph",
    "fold",
    "psl2_complete",
    "stallings_graph",
    "validate",
    "combinatorial_type",
    "membership",
    "conjugate",
    "cyclically_reduced_core",
    "core_vertices",
    "canonical_form",
    "canonical_relabel",
    "Basis",
    "IsomorphismType",
    "index",
    "isomorphism_type",
    "is_free",
    "basis",
    "access_path_length",
    "is_realizable",
    "realize_type",
    "graph_to_json",
    "graph_from_json",
    "graph_to_dot",
]
