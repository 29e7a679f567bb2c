"""
Brute-force ground truth for small sizes

Enumerates every pair of labeled tau2 / tau3 structures on {0..n-1}, keeps
the connected ones (the proper cyclically reduced graphs) and tallies them
by loops, isolated b-edges and combinatorial type. Subgroup counts follow
from rooting at a vertex or deleting one loop; for small n the rooted
outcomes are also deduplicated by canonical form.

Author: PSL2 Subgroups Team
License: MIT
"""

import logging
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterator, List, Optional, Set, Tuple

from tqdm import tqdm

from psl2.config import config
from psl2.exceptions import InvalidGraphError, InvalidSizeError, UnknownFamilyError
from sampling.structures import StructureKind
from stallings.graphs import CombinatorialType, StallingsGraph, canonical_form
from stallings.union_find import UnionFind
from stallings.words import Letter, Word

logger = logging.getLogger(__name__)

Mapping = Tuple[Optional[int], ...]

_KINDS = {
    "all": (StructureKind.TAU2, StructureKind.TAU3),
    "fi": (StructureKind.TAU2, StructureKind.TAU3_PERMUTATIONAL),
    "crfree": (StructureKind.TAU2_LOOPFREE, StructureKind.TAU3_LOOPFREE),
    "free": (StructureKind.TAU2, StructureKind.TAU3),
    "frfi": (StructureKind.TAU2_LOOPFREE, StructureKind.TAU3_PERM_LOOPFREE),
}

# dedupe rooted outcomes by canonical form up to this size by default
DEDUPE_MAX_SIZE = 6


# ---------------------------------------------------------------------------
# Structure enumeration
# ---------------------------------------------------------------------------

def _tau2_maps(n: int, loops: bool) -> Iterator[List[Optional[int]]]:
    """Involutions by pairing the smallest unused label"""
    mapping: List[Optional[int]] = [None] * n

    def extend(free: List[int]):
        if not free:
            yield list(mapping)
            return
        v, rest = free[0], free[1:]
        if loops:
            mapping[v] = v
            yield from extend(rest)
        for i, w in enumerate(rest):
            mapping[v], mapping[w] = w, v
            yield from extend(rest[:i] + rest[i + 1:])
            mapping[w] = None
        mapping[v] = None

    yield from extend(list(range(n)))


def _tau3_maps(n: int, loops: bool, edges: bool) -> Iterator[List[Optional[int]]]:
    """Partial injections with orbits of size <= 3, smallest unused label first"""
    mapping: List[Optional[int]] = [None] * n

    def extend(free: List[int]):
        if not free:
            yield list(mapping)
            return
        v, rest = free[0], free[1:]
        if loops:
            mapping[v] = v
            yield from extend(rest)
            mapping[v] = None
        if edges:
            for i, w in enumerate(rest):
                remaining = rest[:i] + rest[i + 1:]
                mapping[v] = w
                yield from extend(remaining)
                mapping[v] = None
                mapping[w] = v
                yield from extend(remaining)
                mapping[w] = None
        for i, w in enumerate(rest):
            for j in range(i + 1, len(rest)):
                x = rest[j]
                remaining = [u for k, u in enumerate(rest) if k not in (i, j)]
                for second, third in ((w, x), (x, w)):
                    mapping[v], mapping[second], mapping[third] = second, third, v
                    yield from extend(remaining)
                mapping[v] = mapping[w] = mapping[x] = None

    yield from extend(list(range(n)))


def structure_maps(kind, n: int) -> Iterator[Mapping]:
    kind = StructureKind(kind)
    if kind is StructureKind.TAU2:
        return (tuple(m) for m in _tau2_maps(n, True))
    if kind is StructureKind.TAU2_LOOPFREE:
        return (tuple(m) for m in _tau2_maps(n, False))
    loops = kind in (StructureKind.TAU3, StructureKind.TAU3_PERMUTATIONAL)
    edges = kind in (StructureKind.TAU3, StructureKind.TAU3_LOOPFREE)
    return (tuple(m) for m in _tau3_maps(n, loops, edges))


@dataclass
class EnumerationCursor:
    """
    Stream of every (tau2, tau3) pair on n labels

    The tau3 side is listed once and replayed for each tau2 structure, so
    the full product is never materialized.
    """
    n: int
    a_kind: StructureKind = StructureKind.TAU2
    b_kind: StructureKind = StructureKind.TAU3
    _b_maps: List[Mapping] = field(default_factory=list, repr=False)

    def __post_init__(self):
        self._b_maps = list(structure_maps(self.b_kind, self.n))

    @property
    def a_count(self) -> int:
        return sum(1 for _ in structure_maps(self.a_kind, self.n))

    @property
    def b_count(self) -> int:
        return len(self._b_maps)

    def __len__(self) -> int:
        return self.a_count * self.b_count

    def __iter__(self) -> Iterator[Tuple[Mapping, Mapping]]:
        for a in structure_maps(self.a_kind, self.n):
            for b in self._b_maps:
                yield a, b


# ---------------------------------------------------------------------------
# Counting
# ---------------------------------------------------------------------------

@dataclass
class BruteCounts:
    """Tallies of one exhaustive enumeration"""
    n: int
    family: str
    pairs: int = 0
    connected: int = 0
    by_loops: Counter = field(default_factory=Counter)
    by_b_edges: Counter = field(default_factory=Counter)
    by_loop_letter: Counter = field(default_factory=Counter)
    types: Set[CombinatorialType] = field(default_factory=set)
    rooted: int = 0
    classes: Optional[Set[bytes]] = None

    @property
    def subgroups(self) -> int:
        """Number of subgroups of the family (canonical classes when deduplicated)"""
        if self.classes is not None:
            return len(self.classes)
        quotient, remainder = divmod(self.rooted, math.factorial(self.n))
        if remainder:
            raise InvalidGraphError(f"{self.rooted} rooted outcomes is not a multiple of {self.n}!")
        return quotient

    def loops_row(self) -> List[int]:
        top = max(self.by_loops, default=-1)
        return [self.by_loops.get(l, 0) for l in range(top + 1)]

    def b_edges_row(self) -> List[int]:
        top = max(self.by_b_edges, default=-1)
        return [self.by_b_edges.get(k, 0) for k in range(top + 1)]


def _connected(n: int, a: Mapping, b: Mapping) -> bool:
    uf = UnionFind(range(n))
    for v in range(n):
        if a[v] is not None:
            uf.union(v, a[v])
        if b[v] is not None:
            uf.union(v, b[v])
    return uf.weights[uf[0]] == n


def _type_of(n: int, a: Mapping, b: Mapping) -> CombinatorialType:
    l2 = sum(1 for v in range(n) if a[v] == v)
    l3 = sum(1 for v in range(n) if b[v] == v)
    k3 = sum(1 for v in range(n) if b[v] is not None and b[v] != v and b[b[v]] is None)
    m = sum(1 for v in range(n) if b[v] is not None and b[v] != v and b[b[v]] is not None) // 3
    return CombinatorialType(n=n, k2=(n - l2) // 2, k3=k3, l2=l2, l3=l3, m=m)


def _outcomes(family: str, n: int, loops: int) -> int:
    if family == "all":
        return n + loops
    if family == "free":
        return n if loops == 0 else (1 if loops == 1 else 0)
    return n


def _rooted_graphs(family: str, g: StallingsGraph) -> Iterator[StallingsGraph]:
    if family == "free" and g.loop_count > 1:
        return
    if family != "free" or g.loop_count == 0:
        for v in range(g.n):
            yield g.with_root(v)
    if family in ("all", "free"):
        for v in g.a_loops:
            yield StallingsGraph.create(g.n, tuple(x for x in g.a_loops if x != v), g.a_pairs,
                                        g.b_loops, g.b_edges, g.b_triangles, v)
        for v in g.b_loops:
            yield StallingsGraph.create(g.n, g.a_loops, g.a_pairs, tuple(x for x in g.b_loops if x != v),
                                        g.b_edges, g.b_triangles, v)


def brute_counts(n: int, family: str = "all", dedupe: Optional[bool] = None,
                 progress: bool = False) -> BruteCounts:
    """
    Exhaustive tallies for size n

    Raises:
        InvalidSizeError: if n exceeds the oracle cap (at most 8)
    """
    if family not in _KINDS:
        raise UnknownFamilyError(f"Unknown family {family!r}; expected one of {', '.join(_KINDS)}")
    cap = min(config.limits.oracle_max_size, 8)
    if not 1 <= n <= cap:
        raise InvalidSizeError(f"brute force enumeration is limited to 1 <= n <= {cap}, got {n}")
    if dedupe is None:
        dedupe = n <= DEDUPE_MAX_SIZE

    a_kind, b_kind = _KINDS[family]
    cursor = EnumerationCursor(n, a_kind, b_kind)
    result = BruteCounts(n, family, classes=set() if dedupe else None)
    logger.info(f"Brute force {family} n={n}: {cursor.b_count} tau3 structures per tau2 structure")

    for a, b in tqdm(cursor, total=len(cursor), disable=not progress, desc=f"{family} n={n}", unit="pair"):
        result.pairs += 1
        if not _connected(n, a, b):
            continue
        t = _type_of(n, a, b)
        loops = t.l2 + t.l3
        result.connected += 1
        result.by_loops[loops] += 1
        result.by_b_edges[t.k3] += 1
        if loops == 1:
            result.by_loop_letter["a" if t.l2 else "b"] += 1
        result.types.add(t)
        result.rooted += _outcomes(family, n, loops)
        if dedupe:
            g = StallingsGraph.from_maps(a, b)
            result.classes.update(canonical_form(r) for r in _rooted_graphs(family, g))

    if family == "all" and n == 1:
        # both loops deleted: the trivial subgroup
        result.rooted += 1
        if dedupe:
            result.classes.add(canonical_form(StallingsGraph(n=1, root=0)))
    logger.info(f"Brute force {family} n={n}: {result.connected} connected of {result.pairs} pairs")
    return result


# ---------------------------------------------------------------------------
# Subgroup elements
# ---------------------------------------------------------------------------

_STEPS = ((Letter.A, "a"), (Letter.B, "b"), (Letter.B_INV, "b"))


def enumerate_loop_words(g: StallingsGraph, max_len: int) -> Set[Word]:
    """All normal forms of length <= max_len labeling a loop at the root"""
    if g.root is None:
        raise InvalidGraphError("enumerating subgroup elements requires a rooted graph")
    found = {Word()}
    frontier: List[Tuple[int, Optional[str], Tuple[Letter, ...]]] = [(g.root, None, ())]
    for _ in range(max_len):
        next_frontier = []
        for v, last, letters in frontier:
            for letter, generator in _STEPS:
                if generator == last:
                    continue
                if letter is Letter.A:
                    w = g.a_map[v]
                elif letter is Letter.B:
                    w = g.b_next[v]
                else:
                    w = g.b_prev[v]
                if w is None:
                    continue
                path = letters + (letter,)
                if w == g.root:
                    found.add(Word(path))
                next_frontier.append((w, generator, path))
        frontier = next_frontier
    return found
