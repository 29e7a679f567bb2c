"""
Exact-uniform random subgroups of PSL2(Z)

Cyclically reduced graphs are drawn as independent pairs of uniform tau2 and
tau3 structures, rejected until the union graph is connected. Subgroups
are then obtained by rooting at a vertex or by deleting one loop and rooting
at its vertex. Free subgroups that are not cyclically reduced go through the
one-loop decomposition (loop attached to a loop-free core by an alternating
access path).

Author: PSL2 Subgroups Team
License: MIT
"""

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Tuple

import networkx as nx

from psl2.exceptions import InvalidSizeError, UnknownFamilyError
from stallings.graphs import StallingsGraph, canonical_relabel
from counting.tables import CountingEngine
from .rng import RngState
from .structures import StructureKind, sample_structure

logger = logging.getLogger(__name__)

# (tau2 kind, tau3 kind) per family of cyclically reduced graphs
_KINDS: Dict[str, Tuple[StructureKind, StructureKind]] = {
    "all": (StructureKind.TAU2, StructureKind.TAU3),
    "fi": (StructureKind.TAU2, StructureKind.TAU3_PERMUTATIONAL),
    "free": (StructureKind.TAU2_LOOPFREE, StructureKind.TAU3_LOOPFREE),
    "frfi": (StructureKind.TAU2_LOOPFREE, StructureKind.TAU3_PERM_LOOPFREE),
}
_ALIASES = {"finite_index": "fi", "crfree": "free", "free_finite_index": "frfi"}

# the four size-1 subgroups: trivial, <a>, <b>, the whole group
_SIZE_ONE = (
    StallingsGraph(n=1, root=0),
    StallingsGraph(n=1, a_loops=(0,), root=0),
    StallingsGraph(n=1, b_loops=(0,), root=0),
    StallingsGraph(n=1, a_loops=(0,), b_loops=(0,), root=0),
)


@dataclass
class SampleStats:
    """Bookkeeping of one sampler run"""
    attempts: int = 0
    rejections: int = 0

    @property
    def acceptance_rate(self) -> float:
        return (self.attempts - self.rejections) / self.attempts if self.attempts else 0.0


def _family_key(family: str) -> str:
    key = _ALIASES.get(family, family)
    if key not in _KINDS:
        raise UnknownFamilyError(f"Unknown sampling family {family!r}")
    return key


def _sampler_key(family: str) -> str:
    key = _ALIASES.get(family, family)
    if key not in SAMPLERS or family == "crfree":
        raise UnknownFamilyError(f"No subgroup sampler for family {family!r}; expected all, fi, free or frfi")
    return key


def _is_connected(g: StallingsGraph) -> bool:
    return g.n == 1 or nx.is_connected(g.to_networkx().to_undirected(as_view=True))


def sample_cyclically_reduced(n: int, family: str, rng: RngState,
                              engine: Optional[CountingEngine] = None,
                              stats: Optional[SampleStats] = None) -> StallingsGraph:
    """
    Uniform labeled proper cyclically reduced graph of size n (unrooted)

    Raises:
        InvalidSizeError: if the family has no structure pair of size n
    """
    kind2, kind3 = _KINDS[_family_key(family)]
    engine = engine or CountingEngine.from_config()
    stats = stats if stats is not None else SampleStats()
    rejected = 0
    while True:
        a = sample_structure(kind2, n, rng, engine)
        b = sample_structure(kind3, n, rng, engine)
        g = StallingsGraph.from_maps(a.mapping, b.mapping)
        stats.attempts += 1
        if _is_connected(g):
            break
        stats.rejections += 1
        rejected += 1
    logger.debug(f"Cyclically reduced {family} graph of size {n} after {rejected} rejections")
    return g


def _delete_loop(g: StallingsGraph, vertex: int, letter: str) -> StallingsGraph:
    if letter == "a":
        a_loops = tuple(v for v in g.a_loops if v != vertex)
        return StallingsGraph.create(g.n, a_loops, g.a_pairs, g.b_loops, g.b_edges, g.b_triangles, vertex)
    b_loops = tuple(v for v in g.b_loops if v != vertex)
    return StallingsGraph.create(g.n, g.a_loops, g.a_pairs, b_loops, g.b_edges, g.b_triangles, vertex)


def sample_subgroup(n: int, rng: RngState, engine: Optional[CountingEngine] = None,
                    stats: Optional[SampleStats] = None) -> StallingsGraph:
    """Uniform subgroup of size n, as a canonically labeled rooted graph"""
    if n < 1:
        raise InvalidSizeError(f"size must be positive, got {n}")
    if n == 1:
        return _SIZE_ONE[rng.randbelow(4)]

    engine = engine or CountingEngine.from_config()
    stats = stats if stats is not None else SampleStats()
    while True:
        g = sample_cyclically_reduced(n, "all", rng, engine, stats)
        loops = sorted([(v, "a") for v in g.a_loops] + [(v, "b") for v in g.b_loops])
        # j is uniform on [1, 2n]; accepting j <= n + l weights every (G, j) equally
        j = rng.uniform_bigint(2 * n)
        if j <= n:
            return canonical_relabel(g.with_root(j - 1))
        if j <= n + len(loops):
            vertex, letter = loops[j - n - 1]
            return canonical_relabel(_delete_loop(g, vertex, letter))


def sample_finite_index(n: int, rng: RngState, engine: Optional[CountingEngine] = None,
                        stats: Optional[SampleStats] = None) -> StallingsGraph:
    """Uniform subgroup of index n"""
    if n < 1:
        raise InvalidSizeError(f"size must be positive, got {n}")
    g = sample_cyclically_reduced(n, "fi", rng, engine, stats)
    return canonical_relabel(g.with_root(rng.randbelow(n)))


def sample_free_finite_index(n: int, rng: RngState, engine: Optional[CountingEngine] = None,
                             stats: Optional[SampleStats] = None) -> StallingsGraph:
    """Uniform free subgroup of index n (n a multiple of 6)"""
    if n < 6 or n % 6:
        raise InvalidSizeError(f"free finite index subgroups have index a multiple of 6, got {n}")
    g = sample_cyclically_reduced(n, "frfi", rng, engine, stats)
    return canonical_relabel(g.with_root(rng.randbelow(n)))


# ---------------------------------------------------------------------------
# Free subgroups
# ---------------------------------------------------------------------------

def _marked_core(size: int, rng: RngState, engine: CountingEngine,
                 stats: SampleStats) -> Tuple[List[Optional[int]], List[Optional[int]], Tuple[int, int]]:
    """
    Loop-free cyclically reduced graph with a uniform marked isolated b-edge

    Pairs (graph, edge) are uniform: the graph is accepted with probability
    k / floor(size/2) where k is its number of isolated b-edges.
    """
    bound = size // 2
    while True:
        g = sample_cyclically_reduced(size, "free", rng, engine, stats)
        k = len(g.b_edges)
        if k and rng.uniform_bigint(bound) <= k:
            edge = g.b_edges[rng.randbelow(k)]
            return list(g.a_map), list(g.b_next), edge


def _sample_one_loop(n: int, letter: str, rng: RngState, engine: CountingEngine,
                     stats: SampleStats) -> StallingsGraph:
    """
    Uniform one-loop cyclically reduced graph, rooted at its loop with the loop removed

    Walk down the size, recording steps, until the a-loop vertex lies on a
    b-triangle; rebuild from the marked core by replaying the steps backwards.
    """
    gv = engine.gv(n)
    ga, _ = engine.one_loop_tables(n)

    steps: List[str] = []
    state, size = letter, n
    while True:
        if state == "b":
            # b-loop vertex is a-paired to an a-loop graph of size - 1
            steps.append("B")
            state, size = "a", size - 1
            continue
        m = rng.uniform_bigint(ga[size])
        if m <= size * gv[size - 1]:
            break
        # a-loop vertex hangs off an isolated b-edge to a b-loop graph of size - 1
        steps.append("EDGE")
        state, size = "b", size - 1

    a_map, b_next, (p, q) = _marked_core(size - 1, rng, engine, stats)
    t = len(a_map)
    a_map.append(t)
    b_next.append(p)
    b_next[q] = t
    kind = "a"

    for step in reversed(steps):
        u = len(a_map)
        if step == "B":
            a_map[t] = u
            a_map.append(t)
            b_next.append(u)
            kind = "b"
        else:
            b_next[t] = None
            a_map.append(u)
            if rng.randbelow(2):
                b_next.append(t)
            else:
                b_next[t] = u
                b_next.append(None)
            kind = "a"
        t = u

    if kind == "a":
        a_map[t] = None
    else:
        b_next[t] = None
    return canonical_relabel(StallingsGraph.from_maps(a_map, b_next, t))


def sample_free(n: int, rng: RngState, engine: Optional[CountingEngine] = None,
                stats: Optional[SampleStats] = None) -> StallingsGraph:
    """
    Uniform free subgroup of size n

    Raises:
        InvalidSizeError: if there is no free subgroup of size n
    """
    if n < 2:
        raise InvalidSizeError(f"there is no free subgroup of size {n}")
    engine = engine or CountingEngine.from_config()
    stats = stats if stats is not None else SampleStats()

    g0 = engine.g0(n)[n]
    ga, gb = engine.one_loop_tables(n)
    cyclically_reduced = n * g0
    total = cyclically_reduced + ga[n] + gb[n]
    if total == 0:
        raise InvalidSizeError(f"there is no free subgroup of size {n}")

    x = rng.uniform_bigint(total)
    if x <= cyclically_reduced:
        g = sample_cyclically_reduced(n, "free", rng, engine, stats)
        return canonical_relabel(g.with_root(rng.randbelow(n)))
    letter = "a" if x <= cyclically_reduced + ga[n] else "b"
    return _sample_one_loop(n, letter, rng, engine, stats)


SAMPLERS: Dict[str, Callable[..., StallingsGraph]] = {
    "all": sample_subgroup,
    "fi": sample_finite_index,
    "free": sample_free,
    "frfi": sample_free_finite_index,
}


class Sampler:
    """
    Draws batches of uniform subgroups of one family

    Counting tables are built once before any draw and then shared
    read-only between workers; worker w uses the stream seed ^ w.
    """

    def __init__(self, engine: Optional[CountingEngine] = None, seed: Optional[int] = None):
        self.engine = engine or CountingEngine.from_config()
        self.rng = RngState(seed)
        self.stats = SampleStats()
        self.logger = logging.getLogger(__name__)

    @property
    def seed(self) -> int:
        return self.rng.seed

    def prepare(self, family: str, n: int):
        """Build every table the family touches, so that workers only read"""
        family = _sampler_key(family)
        if family == "all":
            self.engine.t2(n), self.engine.t3(n)
        elif family == "fi":
            self.engine.t2(n), self.engine.t3_fi(n)
        elif family == "free":
            self.engine.t2_free(n), self.engine.t3_free(n), self.engine.g0(n)
            self.engine.gv(n), self.engine.one_loop_tables(n)
        else:
            self.engine.t2_free(n), self.engine.t3_free_fi(n)

    def sample(self, family: str, n: int) -> StallingsGraph:
        key = _sampler_key(family)
        return SAMPLERS[key](n, self.rng, self.engine, self.stats)

    def _run(self, family: str, n: int, count: int, rng: RngState, stats: SampleStats) -> List[StallingsGraph]:
        sampler = SAMPLERS[family]
        return [sampler(n, rng, self.engine, stats) for _ in range(count)]

    def sample_many(self, family: str, n: int, count: int, jobs: int = 1) -> List[StallingsGraph]:
        """``count`` samples; with jobs > 1 the work is split over derived streams"""
        key = _sampler_key(family)
        self.prepare(key, n)
        start = time.time()

        if jobs <= 1:
            results = self._run(key, n, count, self.rng, self.stats)
        else:
            shares = [count // jobs + (1 if w < count % jobs else 0) for w in range(jobs)]
            worker_stats = [SampleStats() for _ in range(jobs)]
            with ThreadPoolExecutor(max_workers=jobs) as pool:
                futures = [pool.submit(self._run, key, n, shares[w], self.rng.derive(w), worker_stats[w])
                           for w in range(jobs)]
                results = [g for future in futures for g in future.result()]
            for s in worker_stats:
                self.stats.attempts += s.attempts
                self.stats.rejections += s.rejections

        self.logger.debug(f"Sampled {count} {key} subgroups of size {n} in {time.time() - start:.2f}s "
                          f"(acceptance {self.stats.acceptance_rate:.3f})")
        return results
