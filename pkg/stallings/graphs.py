"""
Stallings Graphs for Subgroups of PSL2(Z)

Construction of the Stallings graph of a finitely generated subgroup from a
list of generators (bouquet of loops, folding, PSL2(Z) completion), structural
validation, combinatorial type, membership, conjugation, cyclically reduced
cores and canonical forms.

Author: PSL2 Subgroups Team
License: MIT
"""

import heapq
import logging
from collections import deque
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import Dict, Iterable, Iterator, List, NamedTuple, Optional, Sequence, Set, Tuple

import networkx as nx

from psl2.exceptions import InvalidGraphError
from .union_find import UnionFind
from .words import Letter, Word, as_word, normalize_shortlex

logger = logging.getLogger(__name__)

LABELS = ("a", "b")


class CombinatorialType(NamedTuple):
    """(n, k2, k3, l2, l3, m): vertices, isolated a-edges, isolated b-edges, a-loops, b-loops, b-triangles"""
    n: int
    k2: int
    k3: int
    l2: int
    l3: int
    m: int


class ValidationMode(str, Enum):
    ROOTED = "rooted"
    CYCLICALLY_REDUCED = "cyclically_reduced"
    PROPER = "proper"


@dataclass(frozen=True)
class Violation:
    """One violated structural property"""
    prop: str
    vertices: Tuple[int, ...] = ()
    message: str = ""

    def __str__(self) -> str:
        where = f" at {list(self.vertices)}" if self.vertices else ""
        return f"{self.prop}{where}: {self.message}" if self.message else f"{self.prop}{where}"


# ---------------------------------------------------------------------------
# Work graphs
# ---------------------------------------------------------------------------

class WorkGraph:
    """
    Mutable labeled graph used while building a Stallings graph.

    Edges are stored per vertex in ``out[v][label]`` and ``inn[v][label]``.
    A b^-1 edge from p to q is stored as the b-edge q -> p, likewise for a^-1.
    """

    def __init__(self, size: int = 1, root: int = 0):
        self.out: List[Dict[str, Set[int]]] = []
        self.inn: List[Dict[str, Set[int]]] = []
        self.alive: List[bool] = []
        for _ in range(size):
            self.add_vertex()
        self.root = root

    def add_vertex(self) -> int:
        self.out.append({label: set() for label in LABELS})
        self.inn.append({label: set() for label in LABELS})
        self.alive.append(True)
        return len(self.alive) - 1

    def add_edge(self, source: int, target: int, label: str):
        self.out[source][label].add(target)
        self.inn[target][label].add(source)

    def add_letter(self, start: int, letter: Letter, end: Optional[int] = None) -> int:
        """Add one edge reading ``letter`` from ``start``; returns its far end"""
        if end is None:
            end = self.add_vertex()
        label = letter.generator
        if letter in (Letter.A, Letter.B):
            self.add_edge(start, end, label)
        else:
            self.add_edge(end, start, label)
        return end

    def add_path(self, start: int, word: Word, end: Optional[int] = None) -> int:
        """Add a path reading ``word`` from ``start`` (closing on ``end`` if given)"""
        current = start
        letters = word.letters
        for i, letter in enumerate(letters):
            last = i == len(letters) - 1
            current = self.add_letter(current, letter, end if last else None)
        return current

    @property
    def vertices(self) -> List[int]:
        return [v for v, alive in enumerate(self.alive) if alive]

    def edges(self) -> Iterator[Tuple[int, int, str]]:
        for v in self.vertices:
            for label in LABELS:
                for w in sorted(self.out[v][label]):
                    yield v, w, label

    def copy(self) -> "WorkGraph":
        clone = WorkGraph(0, self.root)
        clone.out = [{label: set(s) for label, s in d.items()} for d in self.out]
        clone.inn = [{label: set(s) for label, s in d.items()} for d in self.inn]
        clone.alive = list(self.alive)
        return clone

    def compact(self) -> "WorkGraph":
        """Relabel live vertices 0..n-1, root first"""
        order = [self.root] + [v for v in self.vertices if v != self.root]
        index = {v: i for i, v in enumerate(order)}
        result = WorkGraph(len(order), 0)
        for v, w, label in self.edges():
            result.add_edge(index[v], index[w], label)
        return result

    def is_folded(self) -> bool:
        return all(
            len(table[v][label]) <= 1
            for v in self.vertices for table in (self.out, self.inn) for label in LABELS
        )

    def __len__(self) -> int:
        return sum(self.alive)

    def __repr__(self) -> str:
        return f"WorkGraph(n={len(self)}, edges={len(list(self.edges()))}, root={self.root})"


def build_work_graph(gens: Iterable) -> WorkGraph:
    """Bouquet of loops at the root, one per non-trivial normalized generator"""
    graph = WorkGraph(1, 0)
    for gen in gens:
        w = normalize_shortlex(as_word(gen))
        if len(w):
            graph.add_path(graph.root, w, end=graph.root)
    return graph


def _merge(graph: WorkGraph, uf: UnionFind, vertices: Set[int]) -> int:
    survivor = uf.union(*vertices)
    for v in vertices:
        if v == survivor:
            continue
        for label in LABELS:
            graph.out[survivor][label] |= graph.out[v][label]
            graph.inn[survivor][label] |= graph.inn[v][label]
            graph.out[v][label] = set()
            graph.inn[v][label] = set()
        graph.alive[v] = False
    return survivor


def fold(g: WorkGraph, policy: str = "fifo") -> WorkGraph:
    """
    Identify vertices until no two equally labeled edges share a source or a target.

    ``policy`` chooses the worklist discipline ("fifo" or "lifo"); the folded
    graph does not depend on it. The input is left untouched.
    """
    graph = g.copy()
    uf = UnionFind(graph.vertices)
    pending = deque(graph.vertices)
    pop = pending.popleft if policy == "fifo" else pending.pop
    merges = 0

    while pending:
        v = uf[pop()]
        if not graph.alive[v]:
            continue
        clashed = False
        for table in (graph.out, graph.inn):
            for label in LABELS:
                ends = {uf[w] for w in table[v][label]}
                table[v][label] = ends
                if len(ends) > 1:
                    survivor = _merge(graph, uf, ends)
                    merges += len(ends) - 1
                    pending.append(survivor)
                    pending.append(uf[v])
                    clashed = True
                    break
            if clashed:
                break

    # normalize every stored end to its representative
    for v in graph.vertices:
        for table in (graph.out, graph.inn):
            for label in LABELS:
                table[v][label] = {uf[w] for w in table[v][label]}
    graph.root = uf[graph.root]
    logger.debug(f"Folded {len(g)} -> {len(graph)} vertices ({merges} identifications)")
    return graph.compact()


# ---------------------------------------------------------------------------
# Stallings graphs
# ---------------------------------------------------------------------------

def _rotate_cycle(cycle: Sequence[int]) -> Tuple[int, ...]:
    i = cycle.index(min(cycle))
    return tuple(cycle[i:]) + tuple(cycle[:i])


@dataclass(frozen=True)
class StallingsGraph:
    """
    Immutable PSL2(Z)-labeled graph stored as a-orbits and b-orbits.

    a-structure: loops and unordered pairs (a partial involution).
    b-structure: loops, directed isolated edges and directed triangles
    (triangles in cycle order starting from their smallest vertex).
    """
    n: int
    a_loops: Tuple[int, ...] = ()
    a_pairs: Tuple[Tuple[int, int], ...] = ()
    b_loops: Tuple[int, ...] = ()
    b_edges: Tuple[Tuple[int, int], ...] = ()
    b_triangles: Tuple[Tuple[int, int, int], ...] = ()
    root: Optional[int] = None

    @classmethod
    def create(cls, n: int, a_loops=(), a_pairs=(), b_loops=(), b_edges=(), b_triangles=(),
               root: Optional[int] = None) -> "StallingsGraph":
        """Build with normalized (sorted, rotated) orbit lists"""
        return cls(
            n=n,
            a_loops=tuple(sorted(a_loops)),
            a_pairs=tuple(sorted((min(p), max(p)) for p in a_pairs)),
            b_loops=tuple(sorted(b_loops)),
            b_edges=tuple(sorted((p, q) for p, q in b_edges)),
            b_triangles=tuple(sorted(_rotate_cycle(t) for t in b_triangles)),
            root=root,
        )

    @classmethod
    def from_maps(cls, a_map: Sequence[Optional[int]], b_next: Sequence[Optional[int]],
                  root: Optional[int] = None) -> "StallingsGraph":
        """
        Build from the partial maps v -> a(v) and v -> b(v)

        Raises:
            InvalidGraphError: if a_map is not an involution or b_next has
                an orbit that is neither a loop, an isolated edge nor a triangle
        """
        n = len(a_map)
        a_loops, a_pairs = [], []
        for v, w in enumerate(a_map):
            if w is None:
                continue
            if a_map[w] != v:
                raise InvalidGraphError(f"a-map is not an involution at vertex {v}")
            if w == v:
                a_loops.append(v)
            elif v < w:
                a_pairs.append((v, w))

        b_prev: List[Optional[int]] = [None] * n
        for v, w in enumerate(b_next):
            if w is not None:
                if b_prev[w] is not None:
                    raise InvalidGraphError(f"Two b-edges enter vertex {w}")
                b_prev[w] = v

        b_loops, b_edges, b_triangles = [], [], []
        for v, w in enumerate(b_next):
            if w is None:
                continue
            if w == v:
                b_loops.append(v)
            elif b_next[w] is None:
                if b_prev[v] is not None:
                    raise InvalidGraphError(f"b-path of length 2 through {v} is not closed")
                b_edges.append((v, w))
            elif b_next[b_next[w]] == v:
                if v == min(v, w, b_next[w]):
                    b_triangles.append((v, w, b_next[w]))
            else:
                raise InvalidGraphError(f"b-orbit through vertex {v} is not a loop, edge or triangle")

        return cls.create(n, a_loops, a_pairs, b_loops, b_edges, b_triangles, root)

    # derived maps ---------------------------------------------------------

    @cached_property
    def a_map(self) -> Tuple[Optional[int], ...]:
        result: List[Optional[int]] = [None] * self.n
        for v in self.a_loops:
            result[v] = v
        for p, q in self.a_pairs:
            result[p], result[q] = q, p
        return tuple(result)

    @cached_property
    def b_next(self) -> Tuple[Optional[int], ...]:
        result: List[Optional[int]] = [None] * self.n
        for v in self.b_loops:
            result[v] = v
        for p, q in self.b_edges:
            result[p] = q
        for x, y, z in self.b_triangles:
            result[x], result[y], result[z] = y, z, x
        return tuple(result)

    @cached_property
    def b_prev(self) -> Tuple[Optional[int], ...]:
        result: List[Optional[int]] = [None] * self.n
        for v, w in enumerate(self.b_next):
            if w is not None:
                result[w] = v
        return tuple(result)

    def has_a(self, v: int) -> bool:
        return self.a_map[v] is not None

    def has_b(self, v: int) -> bool:
        return self.b_next[v] is not None or self.b_prev[v] is not None

    def neighbours(self, v: int) -> Tuple[Optional[int], Optional[int], Optional[int]]:
        """Ports in canonical order: a, b-forward, b-backward"""
        return self.a_map[v], self.b_next[v], self.b_prev[v]

    @property
    def is_rooted(self) -> bool:
        return self.root is not None

    @property
    def loop_count(self) -> int:
        return len(self.a_loops) + len(self.b_loops)

    def with_root(self, root: Optional[int]) -> "StallingsGraph":
        return StallingsGraph(self.n, self.a_loops, self.a_pairs, self.b_loops,
                              self.b_edges, self.b_triangles, root)

    def to_networkx(self) -> nx.MultiDiGraph:
        graph = nx.MultiDiGraph()
        graph.add_nodes_from(range(self.n))
        for v in self.a_loops:
            graph.add_edge(v, v, label="a")
        for p, q in self.a_pairs:
            graph.add_edge(p, q, label="a")
        for v, w in enumerate(self.b_next):
            if w is not None:
                graph.add_edge(v, w, label="b")
        return graph

    def __repr__(self) -> str:
        return (f"StallingsGraph(n={self.n}, a_loops={list(self.a_loops)}, a_pairs={list(self.a_pairs)}, "
                f"b_loops={list(self.b_loops)}, b_edges={list(self.b_edges)}, "
                f"b_triangles={list(self.b_triangles)}, root={self.root})")


TRIVIAL_GRAPH = StallingsGraph(n=1, root=0)


def to_work_graph(g: StallingsGraph) -> WorkGraph:
    work = WorkGraph(g.n, g.root if g.root is not None else 0)
    for v, w in enumerate(g.a_map):
        if w is not None:
            work.add_edge(v, w, "a")
    for v, w in enumerate(g.b_next):
        if w is not None:
            work.add_edge(v, w, "b")
    return work


def _maps_from_work(graph: WorkGraph) -> Tuple[List[Optional[int]], List[Optional[int]]]:
    # graph must be compact and folded
    a_map: List[Optional[int]] = [None] * len(graph)
    b_next: List[Optional[int]] = [None] * len(graph)
    for v, w, label in graph.edges():
        if label == "a":
            a_map[v] = w
        else:
            b_next[v] = w
    return a_map, b_next


def _trim(a_map: List[Optional[int]], b_next: List[Optional[int]], alive: List[bool],
          protected: Optional[int]) -> None:
    """
    Delete vertices lacking a- or b-adjacency, smallest id first, in place.

    A deleted triangle vertex leaves the opposite isolated b-edge behind.
    ``protected`` (the root) is never deleted; without a root the last
    remaining vertex is kept.
    """
    n = len(a_map)
    b_prev: List[Optional[int]] = [None] * n
    for v, w in enumerate(b_next):
        if w is not None:
            b_prev[w] = v

    def lacking(v: int) -> bool:
        has_b = b_next[v] is not None or b_prev[v] is not None
        return alive[v] and v != protected and (a_map[v] is None or not has_b)

    remaining = sum(alive)
    heap = [v for v in range(n) if lacking(v)]
    heapq.heapify(heap)
    while heap:
        if protected is None and remaining <= 1:
            return
        v = heapq.heappop(heap)
        if not lacking(v):
            continue
        touched = {a_map[v], b_next[v], b_prev[v]} - {None, v}
        w = a_map[v]
        if w is not None and w != v:
            a_map[w] = None
        nxt, prv = b_next[v], b_prev[v]
        # in a triangle prv -> v -> nxt -> prv the edge nxt -> prv survives
        if nxt is not None and nxt != v:
            b_prev[nxt] = None
        if prv is not None and prv != v:
            b_next[prv] = None
        a_map[v] = b_next[v] = b_prev[v] = None
        alive[v] = False
        remaining -= 1
        for u in touched:
            if lacking(u):
                heapq.heappush(heap, u)


def _graph_from_alive(a_map, b_next, alive, root: Optional[int]) -> StallingsGraph:
    order = [v for v in range(len(a_map)) if alive[v]]
    if root is not None:
        order.remove(root)
        order.insert(0, root)
    index = {v: i for i, v in enumerate(order)}
    new_a = [None if a_map[v] is None else index[a_map[v]] for v in order]
    new_b = [None if b_next[v] is None else index[b_next[v]] for v in order]
    return StallingsGraph.from_maps(new_a, new_b, 0 if root is not None else None)


def psl2_complete(g: WorkGraph) -> StallingsGraph:
    """
    Turn a folded work graph into a PSL2(Z)-reduced Stallings graph

    Every a-edge gets its reverse, every non-loop b-edge p -> q is closed into
    a triangle through a fresh vertex, the result is folded, and vertices
    other than the root missing a- or b-adjacency are trimmed.
    """
    work = g.copy()
    for p, q, label in list(work.edges()):
        if label == "a" and p != q:
            work.add_edge(q, p, "a")
    for p, q, label in list(work.edges()):
        if label == "b" and p != q:
            r = work.add_vertex()
            work.add_edge(q, r, "b")
            work.add_edge(r, p, "b")

    folded = fold(work)
    a_map, b_next = _maps_from_work(folded)
    alive = [True] * len(a_map)
    _trim(a_map, b_next, alive, protected=folded.root)
    return _graph_from_alive(a_map, b_next, alive, folded.root)


def stallings_graph(gens: Iterable) -> StallingsGraph:
    """Stallings graph of the subgroup generated by ``gens`` (words or text)"""
    words = [normalize_shortlex(as_word(gen)) for gen in gens]
    graph = psl2_complete(fold(build_work_graph(words)))
    logger.debug(f"Stallings graph of {[str(w) for w in words]}: {graph.n} vertices")
    return graph


# ---------------------------------------------------------------------------
# Validation and invariants
# ---------------------------------------------------------------------------

def validate(g: StallingsGraph, mode="rooted") -> List[Violation]:
    """List every violated property; empty iff g is valid for ``mode``"""
    mode = ValidationMode(mode)
    violations: List[Violation] = []

    if g.n < 1:
        return [Violation("non-empty", (), "graph has no vertex")]

    a_items = [(v,) for v in g.a_loops] + [tuple(p) for p in g.a_pairs]
    b_items = [(v,) for v in g.b_loops] + [tuple(e) for e in g.b_edges] + [tuple(t) for t in g.b_triangles]

    bad_ids = sorted({v for item in a_items + b_items for v in item if not 0 <= v < g.n})
    if g.root is not None and not 0 <= g.root < g.n:
        bad_ids.append(g.root)
    if bad_ids:
        return [Violation("vertex-range", tuple(bad_ids), f"ids must lie in [0, {g.n})")]

    for name, items in (("a-involution", a_items), ("b-injection", b_items)):
        seen: Dict[int, int] = {}
        for item in items:
            if len(set(item)) != len(item):
                violations.append(Violation(name, item, "repeated vertex inside one orbit"))
            for v in item:
                seen[v] = seen.get(v, 0) + 1
        repeated = tuple(sorted(v for v, count in seen.items() if count > 1))
        if repeated:
            violations.append(Violation(name, repeated, "vertex lies in more than one orbit"))
    if violations:
        return violations

    if g.n > 1 and not nx.is_connected(g.to_networkx().to_undirected(as_view=True)):
        components = nx.connected_components(g.to_networkx().to_undirected())
        violations.append(Violation("connected", tuple(sorted(min(c) for c in components)),
                                    "graph is not connected"))

    if mode is ValidationMode.ROOTED and g.root is None:
        violations.append(Violation("rooted", (), "rooted mode requires a root"))

    if mode is ValidationMode.CYCLICALLY_REDUCED and g.n == 1:
        return violations

    exempt = g.root if mode is ValidationMode.ROOTED else None
    missing_a = tuple(v for v in range(g.n) if v != exempt and not g.has_a(v))
    missing_b = tuple(v for v in range(g.n) if v != exempt and not g.has_b(v))
    if missing_a:
        violations.append(Violation("a-adjacency", missing_a, "vertex not adjacent to an a-edge"))
    if missing_b:
        violations.append(Violation("b-adjacency", missing_b, "vertex not adjacent to a b-edge"))
    return violations


def is_cyclically_reduced(g: StallingsGraph) -> bool:
    """Every vertex, root included, is adjacent to both an a-item and a b-item"""
    return all(g.has_a(v) and g.has_b(v) for v in range(g.n))


def combinatorial_type(g: StallingsGraph) -> CombinatorialType:
    return CombinatorialType(
        n=g.n,
        k2=len(g.a_pairs),
        k3=len(g.b_edges),
        l2=len(g.a_loops),
        l3=len(g.b_loops),
        m=len(g.b_triangles),
    )


# ---------------------------------------------------------------------------
# Queries and transformations
# ---------------------------------------------------------------------------

def read_word(g: StallingsGraph, start: int, w: Word) -> Optional[int]:
    """End vertex of the path reading ``w`` from ``start``, or None"""
    v: Optional[int] = start
    for letter in w:
        if letter in (Letter.A, Letter.A_INV):
            v = g.a_map[v]
        elif letter is Letter.B:
            v = g.b_next[v]
        else:
            v = g.b_prev[v]
        if v is None:
            return None
    return v


def membership(g: StallingsGraph, w) -> bool:
    """True iff the normal form of w labels a loop at the root"""
    if g.root is None:
        raise InvalidGraphError("membership requires a rooted graph")
    return read_word(g, g.root, normalize_shortlex(as_word(w))) == g.root


def conjugate(g: StallingsGraph, w) -> StallingsGraph:
    """Stallings graph of w^-1 H w"""
    if g.root is None:
        raise InvalidGraphError("conjugate requires a rooted graph")
    word = normalize_shortlex(as_word(w))
    if not len(word):
        return g
    work = to_work_graph(g)
    work.root = work.add_path(g.root, word)
    return psl2_complete(fold(work))


def core_vertices(g: StallingsGraph) -> Set[int]:
    """Vertices of g that survive trimming down to the cyclically reduced core"""
    a_map = list(g.a_map)
    b_next = list(g.b_next)
    alive = [True] * g.n
    _trim(a_map, b_next, alive, protected=None)
    return {v for v in range(g.n) if alive[v]}


def cyclically_reduced_core(g: StallingsGraph) -> StallingsGraph:
    """Forget the root and trim to the cyclically reduced core (unrooted)"""
    a_map = list(g.a_map)
    b_next = list(g.b_next)
    alive = [True] * g.n
    _trim(a_map, b_next, alive, protected=None)
    return _graph_from_alive(a_map, b_next, alive, None)


def _bfs_order(g: StallingsGraph, root: int) -> List[int]:
    order = [root]
    index = {root: 0}
    head = 0
    while head < len(order):
        v = order[head]
        head += 1
        for w in g.neighbours(v):
            if w is not None and w not in index:
                index[w] = len(order)
                order.append(w)
    return order


def _encode(g: StallingsGraph, order: List[int]) -> bytes:
    index = {v: i for i, v in enumerate(order)}
    parts = []
    for v in order:
        a, b = g.a_map[v], g.b_next[v]
        parts.append(f"{'-' if a is None else index[a]}.{'-' if b is None else index[b]}")
    return f"{len(order)}|".encode() + ",".join(parts).encode()


def canonical_relabel(g: StallingsGraph, root: Optional[int] = None) -> StallingsGraph:
    """Relabel vertices in BFS discovery order from ``root`` (default g.root)"""
    start = g.root if root is None else root
    if start is None:
        start = min(range(g.n), key=lambda v: _encode(g, _bfs_order(g, v)))
    order = _bfs_order(g, start)
    if len(order) != g.n:
        raise InvalidGraphError("canonical relabeling needs a connected graph")
    index = {v: i for i, v in enumerate(order)}
    a_map = [None if g.a_map[v] is None else index[g.a_map[v]] for v in order]
    b_next = [None if g.b_next[v] is None else index[g.b_next[v]] for v in order]
    return StallingsGraph.from_maps(a_map, b_next, 0 if g.root is not None else None)


def canonical_form(g: StallingsGraph) -> bytes:
    """
    Isomorphism invariant byte string

    Rooted graphs are encoded from a BFS at the root exploring a, b, b^-1 in
    that order; unrooted graphs take the minimum encoding over all roots.
    """
    if g.root is not None:
        order = _bfs_order(g, g.root)
        if len(order) != g.n:
            raise InvalidGraphError("canonical form needs a connected graph")
        return b"R" + _encode(g, order)
    best = min(_encode(g, _bfs_order(g, v)) for v in range(g.n))
    return b"U" + best
