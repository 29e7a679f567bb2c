"""
Realizable combinatorial types

A tuple (n, k2, k3, l2, l3, m) is the type of some cyclically reduced
Stallings graph iff n = 2*k2 + l2 = 2*k3 + l3 + 3*m and d = m - l2 - l3 is
even and at least -2.

Author: PSL2 Subgroups Team
License: MIT
"""

import logging
from typing import Iterator, List, Sequence, Tuple, Union

from psl2.exceptions import NotRealizableError
from .graphs import CombinatorialType, StallingsGraph

logger = logging.getLogger(__name__)

TypeLike = Union[CombinatorialType, Sequence[int]]


def _as_type(t: TypeLike) -> CombinatorialType:
    return t if isinstance(t, CombinatorialType) else CombinatorialType(*t)


def is_realizable(t: TypeLike) -> bool:
    t = _as_type(t)
    if t.n < 1 or min(t) < 0:
        return False
    if t.n != 2 * t.k2 + t.l2 or t.n != 2 * t.k3 + t.l3 + 3 * t.m:
        return False
    d = t.m - t.l2 - t.l3
    return d % 2 == 0 and d >= -2


def realizable_types(n: int) -> Iterator[CombinatorialType]:
    """Every realizable type with n vertices"""
    for m in range(n // 3 + 1):
        for k3 in range((n - 3 * m) // 2 + 1):
            l3 = n - 3 * m - 2 * k3
            for k2 in range(n // 2 + 1):
                t = CombinatorialType(n, k2, k3, n - 2 * k2, l3, m)
                if is_realizable(t):
                    yield t


def realize_type(t: TypeLike) -> StallingsGraph:
    """
    Unrooted cyclically reduced graph of type ``t``

    Triangles and isolated b-edges are chained by a-edges; the m + 2 slots
    left over receive, in order, the a-edges to the b-loop vertices, the
    a-loops, and a-edges pairing the remaining slots among themselves.

    Raises:
        NotRealizableError: if ``t`` is not realizable
    """
    t = _as_type(t)
    if not is_realizable(t):
        raise NotRealizableError(f"Type {tuple(t)} is not realizable")

    n, k2, k3, l2, l3, m = t
    a_loops: List[int] = []
    a_pairs: List[Tuple[int, int]] = []
    b_loops: List[int] = []
    b_edges: List[Tuple[int, int]] = []
    b_triangles: List[Tuple[int, int, int]] = []

    components: List[List[int]] = []
    for i in range(m):
        x = 3 * i
        b_triangles.append((x, x + 1, x + 2))
        components.append([x, x + 1, x + 2])
    offset = 3 * m
    for i in range(k3):
        p = offset + 2 * i
        b_edges.append((p, p + 1))
        components.append([p, p + 1])
    next_vertex = offset + 2 * k3

    if not components:
        # only b-loops: a single vertex with an a-loop, or two joined by an a-edge
        b_loops = list(range(l3))
        if l3 == 1:
            a_loops = [0]
        else:
            a_pairs = [(0, 1)]
        return StallingsGraph.create(n, a_loops, a_pairs, b_loops, b_edges, b_triangles)

    for left, right in zip(components, components[1:]):
        a_pairs.append((left.pop(), right.pop(0)))
    free_slots = [v for component in components for v in component]

    for _ in range(l3):
        v = next_vertex
        next_vertex += 1
        b_loops.append(v)
        a_pairs.append((v, free_slots.pop(0)))
    for _ in range(l2):
        a_loops.append(free_slots.pop(0))
    while free_slots:
        a_pairs.append((free_slots.pop(0), free_slots.pop(0)))

    graph = StallingsGraph.create(n, a_loops, a_pairs, b_loops, b_edges, b_triangles)
    assert len(graph.a_pairs) == k2, f"built {len(graph.a_pairs)} a-edges for {tuple(t)}"
    logger.debug(f"Realized type {tuple(t)}")
    return graph
