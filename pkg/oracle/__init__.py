"""
PSL2 Subgroups Oracle Module

Exhaustive enumeration for small sizes, used to cross-check the counting
tables, the samplers and membership:
- tau2 x tau3 pair enumeration with connectivity filtering
- Tallies by loops, isolated b-edges and combinatorial type
- Root-loop words of a Stallings graph

Author: PSL2 Subgroups Team
License: MIT
"""

__version__ = "1.0.0"
__author__ = "PSL2 Subgroups Team"

from .brute import BruteCounts, EnumerationCursor, brute_counts, enumerate_loop_words, structure_maps

__all__ = [
    "BruteCounts",
    "EnumerationCursor",
    "brute_counts",
    "enumerate_loop_words",
    "structure_maps",
]
