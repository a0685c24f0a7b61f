"""Closed-loop prioritized planning: couple, prioritize, solve level by level, apply.

Agents are simulated as independent deterministic solvers invoked by a
scheduler. All data exchanged between agents is an immutable
:class:`~ppcolor.planner.Prediction`, passed as a serialized copy so that the
consistency check compares what a successor received with what its
predecessor actually planned.

Randomness comes from one experiment seed; :func:`derive_seed` expands it per
(component, step, agent) so different strategies see common random numbers.
"""

from __future__ import annotations

import hashlib
import math
import statistics
import time
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Mapping, Sequence

from .coloring import (
    PrioritizationStrategy,
    PriorityAssignment,
    StrategyKind,
    greedy_color,
    orient_edges,
    prioritize,
)
from .geometry import Polygon, polygons_intersect, rectangle
from .graph import CouplingDag, CouplingGraph, LevelAssignment, compute_levels
from .paths import Polyline, reference_along
from .planner import PlannerConfig, PlanningInfeasible, Prediction, plan, swept_footprint, trajectory_cost
from .timing import InstanceTiming, TimingModel, instance_time
from .vehicle import AutomatonState, MotionPrimitiveAutomaton, VehicleState, build_mpa


class ConsistencyError(RuntimeError):
    """A stored copy of a predecessor's prediction differs from the original."""


def derive_seed(seed: int, component: str, *keys: int) -> int:
    """64-bit seed from blake2b over ``"seed:component:key1:key2..."``."""
    text = ":".join([str(seed), component, *map(str, keys)])
    return int.from_bytes(hashlib.blake2b(text.encode(), digest_size=8).digest(), "little")


@dataclass(frozen=True)
class MpaSpec:
    speed_levels: tuple[float, ...] = (0.0, 0.2, 0.4, 0.6)
    steering_levels: tuple[float, ...] = (-0.4, -0.2, 0.0, 0.2, 0.4)
    max_speed_change: float = 0.2
    max_steering_change: float = math.inf
    n_samples: int = 5
    wheelbase: float = 0.15
    length: float = 0.22
    width: float = 0.10


@lru_cache(maxsize=8)
def _mpa_for(spec: MpaSpec, dt: float) -> MotionPrimitiveAutomaton:
    return build_mpa(
        spec.speed_levels,
        spec.steering_levels,
        dt,
        wheelbase=spec.wheelbase,
        max_speed_change=spec.max_speed_change,
        max_steering_change=spec.max_steering_change,
        n_samples=spec.n_samples,
        length=spec.length,
        width=spec.width,
    )


@dataclass(frozen=True)
class VehicleSpec:
    state: VehicleState
    path: Polyline
    ref_speed: float


@dataclass(frozen=True)
class Scenario:
    vehicles: tuple[VehicleSpec, ...]
    dt: float = 0.2
    n_steps: int = 25
    horizon: int = 8
    n_expansions: int = 2500
    strategy: str = "coloring"
    seed: int = 0
    boundaries: tuple[Polygon, ...] = ()
    mpa: MpaSpec = MpaSpec()
    planning_ms: float = 50.0  # modeled uniform planning time
    prioritization_ms: float = 1.0  # modeled prioritization time
    speed_weight: float = 0.1
    goal_tolerance: float = 0.05
    avoid_successor_plans: bool = True
    name: str = "scenario"

    def __post_init__(self) -> None:
        if not self.vehicles:
            raise ValueError("a scenario needs at least one vehicle")
        if self.dt <= 0 or self.n_steps < 0 or self.horizon < 1 or self.n_expansions < 1:
            raise ValueError("need dt > 0, n_steps >= 0, horizon >= 1, n_expansions >= 1")
        StrategyKind(self.strategy)

    @property
    def n(self) -> int:
        return len(self.vehicles)

    def build_mpa(self) -> MotionPrimitiveAutomaton:
        return _mpa_for(self.mpa, self.dt)

    def with_(self, **changes) -> Scenario:
        return replace(self, **changes)


def reach_radius(mpa: MotionPrimitiveAutomaton, horizon: int) -> float:
    return mpa.max_step_displacement() * horizon + mpa.params.circumradius


def build_coupling(states: Sequence[VehicleState], mpa: MotionPrimitiveAutomaton, horizon: int) -> CouplingGraph:
    """Couple two agents when discs over-approximating their reachable sets intersect."""
    r = reach_radius(mpa, horizon)
    n = len(states)
    edges = [
        (i + 1, j + 1)
        for i in range(n)
        for j in range(i + 1, n)
        if math.hypot(states[i].x - states[j].x, states[i].y - states[j].y) <= 2.0 * r
    ]
    return CouplingGraph(n, frozenset(edges))


def footprint(s: VehicleState, mpa: MotionPrimitiveAutomaton) -> Polygon:
    return rectangle(s.x, s.y, s.yaw, mpa.params.length, mpa.params.width)


def predictions_overlap(a: Prediction, b: Prediction) -> bool:
    return any(polygons_intersect(p, q) for p, q in zip(a.occupancies, b.occupancies))


def prediction_from_dict(d: Mapping) -> Prediction:
    return Prediction(
        VehicleState(*d["start"]),
        tuple(VehicleState(*p) for p in d["poses"]),
        tuple(tuple(tuple(pt) for pt in poly) for poly in d["occupancies"]),
        d["cost"],
        tuple(tuple(s) for s in d["automaton_states"]),
    )


def _send(pred: Prediction) -> Prediction:
    return prediction_from_dict(pred.to_dict())


@dataclass
class StepRecord:
    step: int
    strategy: str
    graph: CouplingGraph
    priority: PriorityAssignment
    dag: CouplingDag
    levels: LevelAssignment
    n_colors: int | None
    costs: dict[int, float]
    solve_ms: dict[int, float]
    prioritization_ms: float
    timing_modeled: InstanceTiming
    timing_measured: InstanceTiming
    consistent: bool
    infeasible: list[int]
    overlap_free: bool
    executed_collisions: list[tuple[int, int]]
    predictions: dict[int, Prediction] = field(repr=False)
    states: dict[int, VehicleState] = field(repr=False)  # after applying the first input

    @property
    def n_levels(self) -> int:
        return self.levels.n_levels

    @property
    def cost(self) -> float:
        return sum(self.costs[i] for i in sorted(self.costs))


def _brake_prediction(
    state: VehicleState, auto: AutomatonState, mpa: MotionPrimitiveAutomaton, horizon: int
) -> Prediction:
    poses, hulls, autos = [], [], [auto]
    cur = state
    for _ in range(horizon):
        vi, si = autos[-1]
        prim = mpa.transition(autos[-1], (max(vi - 1, 0), si))
        nxt = VehicleState(*prim.apply(cur.x, cur.y, cur.yaw)[-1])
        hulls.append(swept_footprint(cur, nxt, mpa.params.length, mpa.params.width))
        poses.append(nxt)
        autos.append(prim.end)
        cur = nxt
    return Prediction(state, tuple(poses), tuple(hulls), math.nan, tuple(autos))


class Simulation:
    """Mutable closed-loop state of one scenario run."""

    def __init__(self, sc: Scenario):
        self.sc = sc
        self.mpa = sc.build_mpa()
        self.strategy = StrategyKind(sc.strategy)
        self.ids = list(range(1, sc.n + 1))
        self.states = {i: v.state for i, v in zip(self.ids, sc.vehicles)}
        self.auto = {i: self.mpa.nearest_state(v.state.speed) for i, v in zip(self.ids, sc.vehicles)}
        for i in self.ids:
            if abs(self.mpa.speed(self.auto[i]) - self.states[i].speed) > 1e-9:
                raise ValueError(f"vehicle {i} initial speed is not an automaton speed level")
        self.paths = {i: v.path for i, v in zip(self.ids, sc.vehicles)}
        self.prev: dict[int, Prediction] = {}
        self.reached = {i: self._progress(i) >= self.paths[i].length - sc.goal_tolerance for i in self.ids}
        self.k = 0

    def _progress(self, i: int) -> float:
        s = self.states[i]
        return self.paths[i].project(s.x, s.y)

    def _reference(self, i: int):
        s = self.states[i]
        v = self.sc.vehicles[i - 1]
        return reference_along(self.paths[i], s.x, s.y, v.ref_speed, self.sc.dt, self.sc.horizon)

    def _cfg(self, component: str, i: int) -> PlannerConfig:
        sc = self.sc
        return PlannerConfig(
            sc.horizon, sc.n_expansions, sc.dt, derive_seed(sc.seed, component, self.k, i), sc.speed_weight
        )

    def _collision_counts(self, g: CouplingGraph) -> dict[int, int]:
        """Per agent, how many coupled partners its unconstrained plan would hit."""
        static = [list(self.sc.boundaries)] * self.sc.horizon
        free = {}
        for i in self.ids:
            try:
                free[i] = plan(
                    self.states[i], self._reference(i), static, self.mpa, self._cfg("unconstrained", i), self.auto[i]
                )
            except PlanningInfeasible:
                free[i] = _brake_prediction(self.states[i], self.auto[i], self.mpa, self.sc.horizon)
        counts = {i: 0 for i in self.ids}
        for i, j in sorted(g.edges):
            if predictions_overlap(free[i], free[j]):
                counts[i] += 1
                counts[j] += 1
        return counts

    def _prioritize(self, g: CouplingGraph) -> tuple[PriorityAssignment, float]:
        sc = self.sc
        context = None
        seed = None
        if self.strategy is StrategyKind.CONSTRAINT:
            context = self._collision_counts(g)
        if self.strategy is StrategyKind.RANDOM:
            seed = derive_seed(sc.seed, "random", self.k)
        strategy = PrioritizationStrategy(self.strategy, seed)
        t0 = time.perf_counter()
        p = prioritize(strategy, g, context)
        return p, (time.perf_counter() - t0) * 1e3

    def _obstacles(self, i: int, dag: CouplingDag, inbox: Mapping[int, Prediction]) -> list[list[Polygon]]:
        H = self.sc.horizon
        obstacles = [list(self.sc.boundaries) for _ in range(H)]
        others = [inbox[j] for j in dag.predecessors(i)]
        if self.sc.avoid_successor_plans:
            others += [self.prev[j].shifted(self.mpa) for j in dag.successors(i) if j in self.prev]
        for pred in others:
            for l in range(H):
                obstacles[l].append(pred.occupancies[l])
        return obstacles

    def run_step(self) -> StepRecord:
        sc, mpa = self.sc, self.mpa
        g = build_coupling([self.states[i] for i in self.ids], mpa, sc.horizon)
        priority, prio_ms = self._prioritize(g)
        dag = orient_edges(g, priority)
        levels = compute_levels(dag)
        n_colors = greedy_color(g).n_colors if self.strategy is StrategyKind.COLORING else None

        predictions: dict[int, Prediction] = {}
        inboxes: dict[int, dict[int, Prediction]] = {}
        solve_ms: dict[int, float] = {}
        infeasible: list[int] = []
        for lvl in range(1, levels.n_levels + 1):
            # agents on one level only read predictions from lower levels
            for i in levels.members(lvl):
                inbox = {j: _send(predictions[j]) for j in dag.predecessors(i)}
                inboxes[i] = inbox
                ref = self._reference(i)
                warm = self.prev[i].shifted(mpa).automaton_states[1:] if i in self.prev else None
                t0 = time.perf_counter()
                try:
                    pred = plan(
                        self.states[i], ref, self._obstacles(i, dag, inbox), mpa, self._cfg("plan", i), self.auto[i], warm
                    )
                except PlanningInfeasible:
                    infeasible.append(i)
                    if i in self.prev:
                        pred = self.prev[i].shifted(mpa)
                    else:
                        pred = _brake_prediction(self.states[i], self.auto[i], mpa, sc.horizon)
                    pred = replace(pred, cost=trajectory_cost(pred.poses, ref, sc.speed_weight))
                solve_ms[i] = (time.perf_counter() - t0) * 1e3
                predictions[i] = pred

        consistent = all(inboxes[i][j] == predictions[j] for i in self.ids for j in inboxes[i])
        if not consistent:
            raise ConsistencyError(f"step {self.k}: received predictions differ from the originals")
        overlap_free = not any(predictions_overlap(predictions[i], predictions[j]) for i, j in sorted(dag.arcs))

        for i in self.ids:
            self.states[i] = predictions[i].poses[0]
            self.auto[i] = predictions[i].automaton_states[1]
            if self._progress(i) >= self.paths[i].length - sc.goal_tolerance:
                self.reached[i] = True
        self.prev = predictions
        fps = {i: footprint(self.states[i], mpa) for i in self.ids}
        collisions = [
            (i, j) for i in self.ids for j in self.ids if i < j and polygons_intersect(fps[i], fps[j])
        ]

        n = sc.n
        modeled = instance_time(dag, TimingModel.uniform(n, sc.planning_ms, sc.prioritization_ms))
        measured = instance_time(dag, TimingModel(solve_ms, {i: prio_ms for i in self.ids}))
        record = StepRecord(
            step=self.k,
            strategy=self.strategy.value,
            graph=g,
            priority=priority,
            dag=dag,
            levels=levels,
            n_colors=n_colors,
            costs={i: predictions[i].cost for i in self.ids},
            solve_ms=solve_ms,
            prioritization_ms=prio_ms,
            timing_modeled=modeled,
            timing_measured=measured,
            consistent=consistent,
            infeasible=sorted(infeasible),
            overlap_free=overlap_free,
            executed_collisions=collisions,
            predictions=predictions,
            states=dict(self.states),
        )
        self.k += 1
        return record


@dataclass
class Summary:
    strategy: str
    n_steps: int
    total_cost: float
    max_levels: int
    median_levels: float
    max_t_ncs_modeled_ms: float
    median_t_ncs_modeled_ms: float
    max_t_ncs_measured_ms: float
    median_t_ncs_measured_ms: float
    infeasible_solves: int
    executed_collisions: int
    consistency_violations: int
    all_reached: bool
    reached: dict[int, bool]


@dataclass
class ExperimentResult:
    scenario: Scenario
    records: list[StepRecord]
    summary: Summary


def _median(xs: list[float]) -> float:
    return statistics.median(xs) if xs else 0.0


def summarize(strategy: str, records: list[StepRecord], reached: dict[int, bool]) -> Summary:
    levels = [r.n_levels for r in records]
    modeled = [r.timing_modeled.total for r in records]
    measured = [r.timing_measured.total for r in records]
    return Summary(
        strategy=strategy,
        n_steps=len(records),
        total_cost=sum(r.cost for r in records),
        max_levels=max(levels, default=0),
        median_levels=_median(levels),
        max_t_ncs_modeled_ms=max(modeled, default=0.0),
        median_t_ncs_modeled_ms=_median(modeled),
        max_t_ncs_measured_ms=max(measured, default=0.0),
        median_t_ncs_measured_ms=_median(measured),
        infeasible_solves=sum(len(r.infeasible) for r in records),
        executed_collisions=sum(len(r.executed_collisions) for r in records),
        consistency_violations=sum(not r.consistent for r in records),
        all_reached=all(reached.values()),
        reached=dict(reached),
    )


def run_experiment(sc: Scenario) -> ExperimentResult:
    sim = Simulation(sc)
    records = [sim.run_step() for _ in range(sc.n_steps)]
    return ExperimentResult(sc, records, summarize(sc.strategy, records, sim.reached))


STRATEGIES = ("constant", "random", "constraint", "coloring")


def run_comparison(sc: Scenario, strategies: Sequence[str] = STRATEGIES) -> dict[str, ExperimentResult]:
    return {s: run_experiment(sc.with_(strategy=s)) for s in strategies}


def normalized_costs(results: Mapping[str, ExperimentResult], baseline: str = "constant") -> dict[str, float]:
    """Total cost of each strategy divided by the baseline strategy's total cost."""
    base = results[baseline].summary.total_cost
    return {name: (r.summary.total_cost / base if base else math.nan) for name, r in results.items()}
