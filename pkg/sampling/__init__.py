"""
PSL2 Subgroups Sampling Module

Exact-uniform random generation:
- Seeded random source with exactly uniform big-integer draws
- tau2 / tau3 structures by the recursive method
- Subgroups of a given size (all, finite index, free, free finite index)

Author: PSL2 Subgroups Team
License: MIT
"""

__version__ = "1.0.0"
__author__ = "PSL2 Subgroups Team"

from .rng import RngState
from .structures import LabeledStructure, StructureKind, sample_structure
from .subgroups import (
    SAMPLERS,
    SampleStats,
    Sampler,
    sample_cyclically_reduced,
    sample_subgroup,
    sample_finite_index,
    sample_free,
    sample_free_finite_index,
)

__all__ = [
    "RngState",
    "LabeledStructure",
    "StructureKind",
    "sample_structure",
    "SAMPLERS",
    "SampleStats",
    "Sampler",
    "sample_cyclically_reduced",
    "sample_subgroup",
    "sample_finite_index",
    "sample_free",
    "sample_free_finite_index",
]
