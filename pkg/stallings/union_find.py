"""
Disjoint sets over vertex ids, used while folding work graphs.

Author: PSL2 Subgroups Team
License: MIT
"""

from collections import defaultdict
from typing import Dict, Hashable, Iterable, Iterator, Set


class UnionFind:
    """
    Disjoint-set forest with path compression and union by size.

    FIND is ``uf[x]`` (unknown items become singletons), UNION is
    ``uf.union(x, y, ...)`` and returns the surviving representative.
    """

    def __init__(self, items: Iterable[Hashable] = ()):
        self.parents: Dict[Hashable, Hashable] = {}
        self.weights: Dict[Hashable, int] = {}
        for item in items:
            self.parents[item] = item
            self.weights[item] = 1

    def __getitem__(self, item: Hashable) -> Hashable:
        if item not in self.parents:
            self.parents[item] = item
            self.weights[item] = 1
            return item

        path = [item]
        root = self.parents[item]
        while root != path[-1]:
            path.append(root)
            root = self.parents[root]
        for node in path:
            self.parents[node] = root
        return root

    def union(self, *items: Hashable) -> Hashable:
        roots = {self[item] for item in items}
        heaviest = max(roots, key=lambda root: (self.weights[root], -hash(root)))
        for root in roots:
            if root != heaviest:
                self.parents[root] = heaviest
                self.weights[heaviest] += self.weights[root]
        return heaviest

    def connected(self, x: Hashable, y: Hashable) -> bool:
        return self[x] == self[y]

    def __iter__(self) -> Iterator[Hashable]:
        return iter(self.parents)

    def __len__(self) -> int:
        return len(self.parents)

    def to_sets(self) -> Iterator[Set[Hashable]]:
        groups: Dict[Hashable, Set[Hashable]] = defaultdict(set)
        for item in self.parents:
            groups[self[item]].add(item)
        yield from groups.values()

    def __str__(self) -> str:
        return str(list(self.to_sets()))
