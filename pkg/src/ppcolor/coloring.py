"""Priority assignment by decentralized greedy graph coloring.

Every agent runs :func:`greedy_color` on the same coupling graph and, because
all ties end at the unique vertex id, obtains the same coloring without any
coordination. Colors become priorities (:func:`color_to_priority`), priorities
orient the coupling graph (:func:`orient_edges`), and the number of colors
equals the number of sequential computation levels of the result.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from enum import Enum
from itertools import permutations
from typing import Mapping

from .graph import CouplingDag, CouplingGraph, GraphError, compute_levels


class ValidityError(ValueError):
    """A coloring or priority assignment conflicts with the graph."""


class BudgetError(ValueError):
    """Exhaustive oracle asked to run on a graph that is too large."""


@dataclass(frozen=True)
class Coloring:
    color: Mapping[int, int]
    n_colors: int

    def classes(self) -> list[list[int]]:
        """Vertex ids per color, index 0 holding color 1."""
        out: list[list[int]] = [[] for _ in range(self.n_colors)]
        for v in sorted(self.color):
            out[self.color[v] - 1].append(v)
        return out


def check_coloring(c: Coloring, g: CouplingGraph) -> None:
    if set(c.color) != set(g.vertices):
        raise ValidityError("coloring must cover exactly the graph's vertices")
    for i, j in g.edges:
        if c.color[i] == c.color[j]:
            raise ValidityError(f"adjacent vertices {i} and {j} share color {c.color[i]}")
    if set(c.color.values()) != set(range(1, c.n_colors + 1)):
        raise ValidityError("colors must form the contiguous range 1..n_colors")


def greedy_color(g: CouplingGraph) -> Coloring:
    """Greedy coloring with saturation, then degree, then id vertex ordering.

    Follows the pseudocode line by line: the uncolored vertices are scanned in
    ascending id order, a strictly larger saturation degree takes over the
    selection, an equal saturation degree takes over only with a strictly
    larger degree, and the selected vertex gets the smallest color absent from
    its neighborhood.
    """
    n = g.n
    adj = [()] + [tuple(sorted(g.neighbors(i))) for i in g.vertices]
    deg = [len(a) for a in adj]
    phi = [0] * (n + 1)
    uncolored = list(g.vertices)
    while uncolored:
        s_max = -1
        i_max = uncolored[0]
        for i in uncolored:
            s = len({phi[j] for j in adj[i] if phi[j] != 0})
            if s > s_max:
                s_max = s
                i_max = i
            if s == s_max and deg[i] > deg[i_max]:
                i_max = i
        adjacent = {phi[j] for j in adj[i_max] if phi[j] != 0}
        phi[i_max] = next(c for c in range(1, n + 1) if c not in adjacent)
        uncolored.remove(i_max)
    color = {i: phi[i] for i in g.vertices}
    return Coloring(color, max(phi))


def _k_colorable(adj: list[tuple[int, ...]], order: list[int], k: int) -> bool:
    color = [0] * len(adj)

    def assign(pos: int, used: int) -> bool:
        if pos == len(order):
            return True
        v = order[pos]
        taken = {color[u] for u in adj[v]}
        # symmetry breaking: a fresh color is only tried once
        for c in range(1, min(k, used + 1) + 1):
            if c not in taken:
                color[v] = c
                if assign(pos + 1, max(used, c)):
                    return True
        color[v] = 0
        return False

    return assign(0, 0)


MAX_BRUTE_FORCE = 12


def chromatic_number_bruteforce(g: CouplingGraph) -> int:
    """Exact chromatic number by trying k = 1, 2, ... with backtracking."""
    if g.n > MAX_BRUTE_FORCE:
        raise BudgetError(f"exhaustive coloring limited to {MAX_BRUTE_FORCE} vertices, got {g.n}")
    adj = [()] + [tuple(g.neighbors(i)) for i in g.vertices]
    order = sorted(g.vertices, key=lambda v: (-len(adj[v]), v))
    for k in range(1, g.n + 1):
        if _k_colorable(adj, order, k):
            return k
    raise AssertionError("unreachable: n colors always suffice")


def min_levels(g: CouplingGraph) -> int:
    """Fewest computation levels any prioritization can reach (the chromatic number)."""
    return chromatic_number_bruteforce(g)


@dataclass(frozen=True)
class PriorityAssignment:
    """``priority[i] < priority[j]`` means agent i plans before agent j."""

    priority: Mapping[int, int]

    def order(self) -> list[int]:
        return sorted(self.priority, key=lambda v: (self.priority[v], v))


def check_priority(p: PriorityAssignment, g: CouplingGraph) -> None:
    if set(p.priority) != set(g.vertices):
        raise ValidityError("priority must cover exactly the graph's vertices")
    for i, j in g.edges:
        if p.priority[i] == p.priority[j]:
            raise ValidityError(f"adjacent vertices {i} and {j} share priority {p.priority[i]}")


def color_to_priority(c: Coloring) -> PriorityAssignment:
    order = sorted(c.color, key=lambda v: (c.color[v], v))
    return PriorityAssignment({v: k for k, v in enumerate(order, start=1)})


def orient_edges(g: CouplingGraph, p: PriorityAssignment) -> CouplingDag:
    """Point every edge from the higher-priority (smaller number) endpoint to the other."""
    check_priority(p, g)
    pr = p.priority
    arcs = frozenset((i, j) if pr[i] < pr[j] else (j, i) for i, j in g.edges)
    return CouplingDag(g.n, arcs)


def reorder_levels(c: Coloring, g: CouplingGraph) -> Coloring:
    """Renumber color classes so classes holding high-degree vertices plan first.

    Sort key per class: max degree (descending), degree sum (descending),
    original color (ascending). Class membership is untouched.
    """
    classes = c.classes()
    degs = [sorted((len(g.neighbors(v)) for v in cls), reverse=True) for cls in classes]
    ranked = sorted(range(c.n_colors), key=lambda k: (-degs[k][0], -sum(degs[k]), k))
    new_color = {old + 1: new for new, old in enumerate(ranked, start=1)}
    return Coloring({v: new_color[col] for v, col in c.color.items()}, c.n_colors)


class StrategyKind(str, Enum):
    CONSTANT = "constant"
    RANDOM = "random"
    CONSTRAINT = "constraint"
    COLORING = "coloring"


@dataclass(frozen=True)
class PrioritizationStrategy:
    kind: StrategyKind
    seed: int | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", StrategyKind(self.kind))
        if self.kind is StrategyKind.RANDOM and self.seed is None:
            raise ValueError("random strategy needs an explicit seed")

    @property
    def name(self) -> str:
        return self.kind.value


def random_permutation(ids: list[int], seed: int) -> list[int]:
    """Fisher-Yates shuffle of ``ids`` (taken in ascending order) from a 64-bit seed."""
    rng = random.Random(seed & 0xFFFF_FFFF_FFFF_FFFF)
    out = sorted(ids)
    for k in range(len(out) - 1, 0, -1):
        r = rng.randrange(k + 1)
        out[k], out[r] = out[r], out[k]
    return out


def prioritize(
    strategy: PrioritizationStrategy,
    g: CouplingGraph,
    context: Mapping[int, int] | None = None,
) -> PriorityAssignment:
    kind = strategy.kind
    if kind is StrategyKind.CONSTANT:
        return PriorityAssignment({i: i for i in g.vertices})
    if kind is StrategyKind.RANDOM:
        perm = random_permutation(list(g.vertices), strategy.seed)
        return PriorityAssignment({v: k for k, v in enumerate(perm, start=1)})
    if kind is StrategyKind.CONSTRAINT:
        if context is None or any(i not in context for i in g.vertices):
            raise GraphError("constraint-based prioritization needs a collision count per vertex")
        order = sorted(g.vertices, key=lambda i: (-context[i], i))
        return PriorityAssignment({v: k for k, v in enumerate(order, start=1)})
    return color_to_priority(reorder_levels(greedy_color(g), g))


MAX_ENUMERATION = 9


def enumerate_prioritizations(g: CouplingGraph) -> dict[int, int]:
    """Histogram of level counts over all n! priority permutations.

    Each permutation is a topological order of its own orientation, so the
    levels follow from one pass in priority order.
    """
    if g.n > MAX_ENUMERATION:
        raise BudgetError(f"enumeration limited to {MAX_ENUMERATION} vertices, got {g.n}")
    adj = [()] + [tuple(g.neighbors(i)) for i in g.vertices]
    hist: dict[int, int] = {}
    level = [0] * (g.n + 1)
    for perm in permutations(g.vertices):
        for v in perm:
            level[v] = 0
        top = 0
        for v in perm:
            lv = 1 + max((level[u] for u in adj[v]), default=0)
            level[v] = lv
            if lv > top:
                top = lv
        hist[top] = hist.get(top, 0) + 1
    assert sum(hist.values()) == math.factorial(g.n)
    return dict(sorted(hist.items()))


def levels_for(g: CouplingGraph, p: PriorityAssignment) -> int:
    return compute_levels(orient_edges(g, p)).n_levels
