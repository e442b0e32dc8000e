"""From coreference edges to partitions (response clusters)."""

from __future__ import annotations

from typing import Iterable, Literal, Mapping

from .engine import CorefGraph
from .metrics import Partition
from .model import CERTAIN, POSSIBLE

Mode = Literal["certain_only", "possible_only", "combined"]
MODES: dict[str, tuple[str, ...]] = {
    "certain_only": (CERTAIN,),
    "possible_only": (POSSIBLE,),
    "combined": (CERTAIN, POSSIBLE),
}


class UnionFind:
    """Disjoint sets with path halving and union by size."""

    def __init__(self, items: Iterable[str] = ()):
        self._parent: dict[str, str] = {}
        self._size: dict[str, int] = {}
        for x in items:
            self.add(x)

    def add(self, x: str) -> None:
        if x not in self._parent:
            self._parent[x] = x
            self._size[x] = 1

    def find(self, x: str) -> str:
        parent = self._parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, a: str, b: str) -> str:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return ra
        if self._size[ra] < self._size[rb] or (self._size[ra] == self._size[rb] and rb < ra):
            ra, rb = rb, ra
        self._parent[rb] = ra
        self._size[ra] += self._size[rb]
        return ra

    def groups(self) -> list[list[str]]:
        out: dict[str, list[str]] = {}
        for x in self._parent:
            out.setdefault(self.find(x), []).append(x)
        return sorted(sorted(g) for g in out.values())


def components(nodes: Iterable[str], edges: Iterable[tuple[str, str]]) -> Partition:
    uf = UnionFind(nodes)
    for a, b in edges:
        uf.add(a)
        uf.add(b)
        uf.union(a, b)
    return Partition(uf.groups())


def clusters(graph: CorefGraph, mode: Mode = "combined") -> Partition:
    """Connected components of the selected edges over every node of ``graph``.

    Mentions without a selected edge come out as singletons.
    """
    try:
        strengths = MODES[mode]
    except KeyError:
        raise ValueError(f"unknown mode {mode!r}; expected one of {sorted(MODES)}") from None
    edges = [(a, b) for (a, b, s) in graph.edges if s in strengths]
    return components(graph.nodes, edges)


def split_by_topic(partition: Partition, topics: Mapping[str, Iterable[str]]
                   ) -> dict[str, Partition]:
    """Restrict ``partition`` to each topic's mentions.

    Blocks spanning topics (possible with cross-topic evaluation) are cut.
    """
    return {t: partition.restrict(ids) for t, ids in topics.items()}
