"""
Structural Queries on Stallings Graphs

Index, isomorphism type (Kurosh decomposition Z2^*l2 * Z3^*l3 * F_r),
freeness and an independent generating set read off a spanning tree.

Author: PSL2 Subgroups Team
License: MIT
"""

import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, NamedTuple, Optional, Tuple, Union

from psl2.exceptions import InvalidGraphError
from .graphs import StallingsGraph, combinatorial_type, core_vertices, is_cyclically_reduced
from .words import Letter, Word, normalize_shortlex

_A = Word((Letter.A,))
_B = Word((Letter.B,))
_B_INV = Word((Letter.B_INV,))


class IsomorphismType(NamedTuple):
    """(l2, l3, r): numbers of Z2 and Z3 free factors and free rank"""
    l2: int
    l3: int
    r: int


@dataclass
class Basis:
    """Independent generating set split by kind"""
    b2: List[Word] = field(default_factory=list)
    b3: List[Word] = field(default_factory=list)
    b12: List[Word] = field(default_factory=list)
    b13: List[Word] = field(default_factory=list)

    @property
    def words(self) -> List[Word]:
        return self.b2 + self.b3 + self.b12 + self.b13

    @property
    def rank(self) -> int:
        return len(self.b12) + len(self.b13)

    def to_dict(self) -> Dict[str, List[str]]:
        return {
            "B2": [str(w) for w in self.b2],
            "B3": [str(w) for w in self.b3],
            "B12": [str(w) for w in self.b12],
            "B13": [str(w) for w in self.b13],
        }


def _require_root(g: StallingsGraph):
    if g.root is None:
        raise InvalidGraphError("a rooted graph is required")


def index(g: StallingsGraph) -> Union[int, float]:
    """Index of the subgroup: n for proper graphs without isolated b-edges, else infinity"""
    _require_root(g)
    if is_cyclically_reduced(g) and not g.b_edges:
        return g.n
    return math.inf


_SINGLE_VERTEX_TYPES = {
    (False, False): IsomorphismType(0, 0, 0),
    (True, False): IsomorphismType(1, 0, 0),
    (False, True): IsomorphismType(0, 1, 0),
    (True, True): IsomorphismType(1, 1, 0),
}


def isomorphism_type(g: StallingsGraph) -> IsomorphismType:
    """
    Isomorphism type of the subgroup

    Raises:
        InvalidGraphError: if the rank formula is not an integer, which only
            happens on graphs that are not PSL2(Z)-reduced
    """
    _require_root(g)
    if g.n == 1:
        return _SINGLE_VERTEX_TYPES[(bool(g.a_loops), bool(g.b_loops))]

    t = combinatorial_type(g)
    rank = Fraction(t.n - 2 * t.k3 - 3 * t.l2 - 4 * t.l3, 6)
    root_a, root_b = g.has_a(g.root), g.has_b(g.root)
    if root_a and root_b:
        rank += 1
    elif root_a:
        rank += Fraction(1, 3)
    elif root_b:
        rank += Fraction(1, 2)

    if rank.denominator != 1 or rank < 0:
        raise InvalidGraphError(f"rank formula gives {rank} on type {tuple(t)}")
    return IsomorphismType(t.l2, t.l3, int(rank))


def is_free(g: StallingsGraph) -> Tuple[bool, Optional[int]]:
    """(free, rank) with rank None when the subgroup has torsion"""
    iso = isomorphism_type(g)
    if iso.l2 == 0 and iso.l3 == 0:
        return True, iso.r
    return False, None


def _shortlex_key(w: Word) -> Tuple[int, str]:
    return len(w), str(w)


def spanning_tree(g: StallingsGraph) -> Tuple[Dict[int, Word], set]:
    """
    BFS spanning tree from the root

    Whenever a vertex of a b-triangle is reached, the rest of its triangle
    is reached at once through b and b^-1, so two edges of every triangle
    belong to the tree. Returns the access words and the tree edges, keyed
    ("a", min, max) or ("b", source, target).
    """
    _require_root(g)
    access: Dict[int, Word] = {}
    tree = set()
    queue = deque()

    def discover(v: int, word: Word, edge=None):
        access[v] = word
        queue.append(v)
        if edge is not None:
            tree.add(edge)
        x = g.b_next[v]
        if x is not None and x != v and g.b_next[x] is not None and g.b_next[g.b_next[x]] == v:
            y = g.b_next[x]
            if x not in access:
                access[x] = word + _B
                queue.append(x)
                tree.add(("b", v, x))
            if y not in access:
                access[y] = word + _B_INV
                queue.append(y)
                tree.add(("b", y, v))

    discover(g.root, Word())
    while queue:
        v = queue.popleft()
        w = g.a_map[v]
        if w is not None and w not in access:
            discover(w, access[v] + _A, ("a", min(v, w), max(v, w)))
        w = g.b_next[v]
        if w is not None and w not in access:
            discover(w, access[v] + _B, ("b", v, w))
        w = g.b_prev[v]
        if w is not None and w not in access:
            discover(w, access[v] + _B_INV, ("b", w, v))

    if len(access) != g.n:
        raise InvalidGraphError("graph is not connected")
    return access, tree


def basis(g: StallingsGraph) -> Basis:
    """Independent generating set in shortlex normal form"""
    access, tree = spanning_tree(g)
    result = Basis()

    def cycle(p: int, letter: Word, q: int) -> Word:
        return normalize_shortlex(access[p] + letter + access[q].invert())

    for v in g.a_loops:
        result.b2.append(cycle(v, _A, v))
    for v in g.b_loops:
        result.b3.append(cycle(v, _B, v))
    for p, q in g.a_pairs:
        if ("a", p, q) not in tree:
            result.b12.append(min(cycle(p, _A, q), cycle(q, _A, p), key=_shortlex_key))
    for p, q in g.b_edges:
        if ("b", p, q) not in tree:
            result.b13.append(cycle(p, _B, q))
    return result


def access_path_length(g: StallingsGraph) -> int:
    """Number of edges between the root and the cyclically reduced core"""
    _require_root(g)
    core = core_vertices(g)
    if g.root in core:
        return 0
    distance = {g.root: 0}
    queue = deque([g.root])
    while queue:
        v = queue.popleft()
        for w in g.neighbours(v):
            if w is None or w in distance:
                continue
            if w in core:
                return distance[v] + 1
            distance[w] = distance[v] + 1
            queue.append(w)
    raise InvalidGraphError("graph has no cyclically reduced core reachable from the root")
