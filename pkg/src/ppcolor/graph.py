"""Undirected coupling graphs, their orientations, and level analytics.

Vertices are dense 1-based integer ids. Both graph types are frozen; every
function here is pure.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Mapping


class GraphError(ValueError):
    """Raised for malformed graphs or unknown vertex ids."""


class CycleError(GraphError):
    """Raised when an operation requiring a DAG receives a cyclic graph."""


def _norm_edge(i: int, j: int) -> tuple[int, int]:
    return (i, j) if i < j else (j, i)


@dataclass(frozen=True)
class CouplingGraph:
    """Undirected agent interaction graph on vertices ``1..n``."""

    n: int
    edges: frozenset[tuple[int, int]] = frozenset()
    _adj: tuple[frozenset[int], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if not isinstance(self.n, int) or self.n < 1:
            raise GraphError(f"vertex count must be a positive integer, got {self.n!r}")
        normed = set()
        for e in self.edges:
            i, j = e
            if i == j:
                raise GraphError(f"self-loop on vertex {i}")
            for v in (i, j):
                if not (1 <= v <= self.n):
                    raise GraphError(f"edge {e} references unknown vertex {v}")
            normed.add(_norm_edge(i, j))
        adj: list[set[int]] = [set() for _ in range(self.n + 1)]
        for i, j in normed:
            adj[i].add(j)
            adj[j].add(i)
        object.__setattr__(self, "edges", frozenset(normed))
        object.__setattr__(self, "_adj", tuple(frozenset(a) for a in adj))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Iterable[int]]) -> CouplingGraph:
        pairs = []
        seen = set()
        for e in edges:
            i, j = (int(v) for v in e)
            key = _norm_edge(i, j)
            if key in seen:
                raise GraphError(f"duplicate edge {key}")
            seen.add(key)
            pairs.append((i, j))
        return cls(n, frozenset(pairs))

    @classmethod
    def complete(cls, n: int) -> CouplingGraph:
        return cls(n, frozenset(combinations(range(1, n + 1), 2)))

    @classmethod
    def path(cls, n: int) -> CouplingGraph:
        return cls(n, frozenset((i, i + 1) for i in range(1, n)))

    @classmethod
    def cycle(cls, n: int) -> CouplingGraph:
        return cls(n, frozenset([(i, i + 1) for i in range(1, n)] + [(1, n)]))

    @property
    def vertices(self) -> range:
        return range(1, self.n + 1)

    def neighbors(self, i: int) -> frozenset[int]:
        self._check(i)
        return self._adj[i]

    def has_edge(self, i: int, j: int) -> bool:
        return _norm_edge(i, j) in self.edges

    def max_degree(self) -> int:
        return max(len(self._adj[i]) for i in self.vertices)

    def _check(self, i: int) -> None:
        if not isinstance(i, int) or not (1 <= i <= self.n):
            raise GraphError(f"unknown vertex id {i!r}")


def degree(g: CouplingGraph, i: int) -> int:
    return len(g.neighbors(i))


@dataclass(frozen=True)
class CouplingDag:
    """Directed coupling graph; arcs point from higher to lower priority.

    Acyclicity is not enforced at construction so that :func:`is_acyclic`
    can be asked about arbitrary arc sets.
    """

    n: int
    arcs: frozenset[tuple[int, int]] = frozenset()
    _succ: tuple[tuple[int, ...], ...] = field(init=False, repr=False, compare=False)
    _pred: tuple[tuple[int, ...], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if not isinstance(self.n, int) or self.n < 1:
            raise GraphError(f"vertex count must be a positive integer, got {self.n!r}")
        arcs = frozenset((int(i), int(j)) for i, j in self.arcs)
        succ: list[list[int]] = [[] for _ in range(self.n + 1)]
        pred: list[list[int]] = [[] for _ in range(self.n + 1)]
        for i, j in arcs:
            if i == j:
                raise GraphError(f"self-loop on vertex {i}")
            if not (1 <= i <= self.n and 1 <= j <= self.n):
                raise GraphError(f"arc {(i, j)} references unknown vertex")
            succ[i].append(j)
            pred[j].append(i)
        object.__setattr__(self, "arcs", arcs)
        object.__setattr__(self, "_succ", tuple(tuple(sorted(s)) for s in succ))
        object.__setattr__(self, "_pred", tuple(tuple(sorted(p)) for p in pred))

    @property
    def vertices(self) -> range:
        return range(1, self.n + 1)

    def successors(self, i: int) -> tuple[int, ...]:
        return self._succ[i]

    def predecessors(self, i: int) -> tuple[int, ...]:
        return self._pred[i]

    def in_degree(self, i: int) -> int:
        return len(self._pred[i])

    def out_degree(self, i: int) -> int:
        return len(self._succ[i])

    def undirected(self) -> CouplingGraph:
        return CouplingGraph(self.n, frozenset(self.arcs))


def topological_order(d: CouplingDag) -> list[int] | None:
    """Kahn's algorithm, smallest ready id first; ``None`` if cyclic."""
    indeg = [0] + [d.in_degree(i) for i in d.vertices]
    ready = [i for i in d.vertices if indeg[i] == 0]
    heapq.heapify(ready)
    order = []
    while ready:
        i = heapq.heappop(ready)
        order.append(i)
        for j in d.successors(i):
            indeg[j] -= 1
            if indeg[j] == 0:
                heapq.heappush(ready, j)
    return order if len(order) == d.n else None


def is_acyclic(d: CouplingDag) -> bool:
    return topological_order(d) is not None


def _require_order(d: CouplingDag) -> list[int]:
    order = topological_order(d)
    if order is None:
        raise CycleError("coupling graph contains a directed cycle")
    return order


def sources_sinks(d: CouplingDag) -> tuple[set[int], set[int]]:
    """Vertices without incoming arcs and vertices without outgoing arcs."""
    _require_order(d)
    sources = {i for i in d.vertices if d.in_degree(i) == 0}
    sinks = {i for i in d.vertices if d.out_degree(i) == 0}
    return sources, sinks


@dataclass(frozen=True)
class LevelAssignment:
    level: Mapping[int, int]
    n_levels: int

    def members(self, lvl: int) -> list[int]:
        return sorted(i for i, v in self.level.items() if v == lvl)


def compute_levels(d: CouplingDag) -> LevelAssignment:
    """Computation level of every vertex: 1 for sources, else 1 + max over predecessors."""
    level: dict[int, int] = {}
    for i in _require_order(d):
        level[i] = 1 + max((level[j] for j in d.predecessors(i)), default=0)
    return LevelAssignment(level, max(level.values()))


def longest_weighted_path(d: CouplingDag, weight: Mapping[int, float]) -> tuple[list[int], float]:
    """Source-to-sink path maximizing the summed vertex weights.

    Among equally heavy paths the lexicographically smallest id sequence wins.
    """
    missing = [i for i in d.vertices if i not in weight]
    if missing:
        raise GraphError(f"missing weight for vertices {missing}")
    if any(weight[i] < 0 for i in d.vertices):
        raise GraphError("vertex weights must be nonnegative")

    best: dict[int, tuple[float, tuple[int, ...]]] = {}
    for i in _require_order(d):
        cand = [(best[j][0] + weight[i], best[j][1] + (i,)) for j in d.predecessors(i)]
        best[i] = min(cand, key=_heaviest_first) if cand else (weight[i], (i,))

    total, path = min((best[i] for i in d.vertices if d.out_degree(i) == 0), key=_heaviest_first)
    return list(path), total


def _heaviest_first(c: tuple[float, tuple[int, ...]]):
    return (-c[0], c[1])

