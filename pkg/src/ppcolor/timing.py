"""Networked computation time of one prioritized-planning instance.

The instance finishes when the slowest prioritization is done and the
heaviest chain of sequential solves has run, so the total is the maximum
prioritization time plus the planning times along the weighted longest path
of the coupling DAG. Communication time is not modeled.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from .coloring import PrioritizationStrategy, orient_edges, prioritize
from .graph import CouplingDag, CouplingGraph, GraphError, compute_levels, longest_weighted_path


@dataclass(frozen=True)
class TimingModel:
    planning_time: Mapping[int, float]  # ms per agent
    prioritization_time: Mapping[int, float]  # ms per agent

    @classmethod
    def uniform(cls, n: int, planning_ms: float, prioritization_ms: float = 0.0) -> TimingModel:
        ids = range(1, n + 1)
        return cls({i: planning_ms for i in ids}, {i: prioritization_ms for i in ids})


@dataclass(frozen=True)
class InstanceTiming:
    total: float
    critical_path: list[int]
    n_levels: int


def instance_time(d: CouplingDag, t: TimingModel) -> InstanceTiming:
    for name, table in (("planning", t.planning_time), ("prioritization", t.prioritization_time)):
        missing = [i for i in d.vertices if i not in table]
        if missing:
            raise GraphError(f"missing {name} time for vertices {missing}")
        if any(table[i] < 0 for i in d.vertices):
            raise GraphError(f"{name} times must be nonnegative")
    path, planning = longest_weighted_path(d, t.planning_time)
    prio = max(t.prioritization_time[i] for i in d.vertices)
    return InstanceTiming(prio + planning, path, compute_levels(d).n_levels)


def compare_strategies(
    g: CouplingGraph,
    strategies: Sequence[PrioritizationStrategy],
    t: TimingModel,
    contexts: Mapping[str, Mapping[int, int]] | None = None,
) -> dict[str, InstanceTiming]:
    """Timing of the same graph under each strategy, keyed by strategy name.

    ``contexts`` supplies per-vertex collision counts by strategy name; only
    the constraint-based strategy reads it.
    """
    contexts = contexts or {}
    out = {}
    for s in strategies:
        p = prioritize(s, g, contexts.get(s.name))
        out[s.name] = instance_time(orient_edges(g, p), t)
    return out
