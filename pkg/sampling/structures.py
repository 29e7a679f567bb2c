"""
Uniform tau2 / tau3 structures

A tau2-structure is an involution (a-loops and a-pairs); a tau3-structure a
partial injection whose orbits are b-loops, isolated b-edges and b-triangles.
Restricted kinds drop loops (free graphs) or isolated edges (finite index).

Author: PSL2 Subgroups Team
License: MIT
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Tuple

from psl2.exceptions import InvalidSizeError
from counting.species import (
    TAU2, TAU3, TAU3_FI, TAU2_FREE, TAU3_FREE, TAU3_FREE_FI,
    SpeciesSpec, sample_multiset,
)
from counting.tables import CountingEngine, CountTable
from .rng import RngState

logger = logging.getLogger(__name__)


class StructureKind(str, Enum):
    TAU2 = "tau2"
    TAU3 = "tau3"
    TAU2_LOOPFREE = "tau2_loopfree"
    TAU3_LOOPFREE = "tau3_loopfree"
    TAU3_PERMUTATIONAL = "tau3_perm"
    TAU3_PERM_LOOPFREE = "tau3_perm_loopfree"

    @property
    def letter(self) -> str:
        return "a" if self in (StructureKind.TAU2, StructureKind.TAU2_LOOPFREE) else "b"


_SPECS = {
    StructureKind.TAU2: TAU2,
    StructureKind.TAU3: TAU3,
    StructureKind.TAU2_LOOPFREE: TAU2_FREE,
    StructureKind.TAU3_LOOPFREE: TAU3_FREE,
    StructureKind.TAU3_PERMUTATIONAL: TAU3_FI,
    StructureKind.TAU3_PERM_LOOPFREE: TAU3_FREE_FI,
}


def species_of(kind) -> SpeciesSpec:
    return _SPECS[StructureKind(kind)]


def count_table(engine: CountingEngine, kind, n: int) -> CountTable:
    kind = StructureKind(kind)
    builders = {
        StructureKind.TAU2: engine.t2,
        StructureKind.TAU3: engine.t3,
        StructureKind.TAU2_LOOPFREE: engine.t2_free,
        StructureKind.TAU3_LOOPFREE: engine.t3_free,
        StructureKind.TAU3_PERMUTATIONAL: engine.t3_fi,
        StructureKind.TAU3_PERM_LOOPFREE: engine.t3_free_fi,
    }
    return builders[kind](n)


@dataclass(frozen=True)
class LabeledStructure:
    """
    Structure on {0..n-1} as a partial map

    For tau2 kinds ``mapping`` is the involution v -> a(v); for tau3 kinds
    it is v -> b(v), None at the head of an isolated edge.
    """
    kind: StructureKind
    n: int
    mapping: Tuple[Optional[int], ...]

    @property
    def loops(self) -> List[int]:
        return [v for v, w in enumerate(self.mapping) if w == v]

    @property
    def orbits(self) -> List[Tuple[int, ...]]:
        seen = set()
        result = []
        for v in range(self.n):
            # heads of isolated edges are reached from their tails
            if v in seen or self.mapping[v] is None:
                continue
            orbit = [v]
            w = self.mapping[v]
            while w is not None and w != v:
                orbit.append(w)
                w = self.mapping[w]
            seen.update(orbit)
            result.append(tuple(orbit))
        return result


def _component_map(letter: str, shape: int, labels: Tuple[int, ...], mapping: List[Optional[int]]):
    if len(labels) == 1:
        (v,) = labels
        mapping[v] = v
    elif len(labels) == 2:
        p, q = labels if shape == 0 else labels[::-1]
        mapping[p] = q
        if letter == "a":
            mapping[q] = p
    else:
        x, y, z = labels if shape == 0 else (labels[0], labels[2], labels[1])
        mapping[x], mapping[y], mapping[z] = y, z, x


def sample_structure(kind, n: int, rng: RngState, engine: Optional[CountingEngine] = None) -> LabeledStructure:
    """
    Exactly uniform structure of the given kind on n labels

    Raises:
        InvalidSizeError: if no structure of that kind has size n
    """
    kind = StructureKind(kind)
    if n < 1:
        raise InvalidSizeError(f"size must be positive, got {n}")
    counts = count_table(engine, kind, n).values if engine is not None else None
    if counts is not None and counts[n] == 0:
        raise InvalidSizeError(f"no {kind.value} structure of size {n}")

    mapping: List[Optional[int]] = [None] * n
    for shape, labels in sample_multiset(species_of(kind), n, rng, counts):
        _component_map(kind.letter, shape, labels, mapping)
    return LabeledStructure(kind, n, tuple(mapping))
