"""Sampling tree search over motion primitives for one agent's receding-horizon problem.

The search tree starts at the agent's current automaton state; each edge is a
motion primitive, each level one time step. A node is kept only if its swept
footprint stays clear of every obstacle polygon given for that step. The
search spends a fixed budget of transition evaluations and returns the
cheapest full-horizon leaf.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Sequence

from .geometry import Polygon, convex_hull, polygons_intersect, rectangle
from .vehicle import AutomatonState, MotionPrimitiveAutomaton, Primitive, VehicleState


class PlanningInfeasible(RuntimeError):
    """No collision-free full-horizon path was found within the budget."""

    def __init__(self, message: str, prefix: Prediction):
        super().__init__(message)
        self.prefix = prefix


@dataclass(frozen=True)
class PlannerConfig:
    horizon: int = 8
    n_expansions: int = 2500
    dt: float = 0.2
    seed: int = 0
    speed_weight: float = 0.1

    def __post_init__(self) -> None:
        if self.horizon < 1 or self.n_expansions < 1 or self.dt <= 0:
            raise ValueError("need horizon >= 1, n_expansions >= 1 and dt > 0")


@dataclass(frozen=True)
class ReferenceTrajectory:
    points: tuple[tuple[float, float], ...]
    speeds: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.points) != len(self.speeds):
            raise ValueError("one reference speed per reference point")


@dataclass(frozen=True)
class Prediction:
    """An agent's planned trajectory over the horizon, steps k+1..k+H."""

    start: VehicleState
    poses: tuple[VehicleState, ...]
    occupancies: tuple[Polygon, ...]
    cost: float
    automaton_states: tuple[AutomatonState, ...]  # includes the root, so H+1 entries

    @property
    def horizon(self) -> int:
        return len(self.poses)

    def primitives(self, mpa: MotionPrimitiveAutomaton) -> list[Primitive]:
        s = self.automaton_states
        return [mpa.transition(a, b) for a, b in zip(s, s[1:])]

    def shifted(self, mpa: MotionPrimitiveAutomaton) -> Prediction:
        """The same plan one step later, extended by repeating its last primitive."""
        last = self.automaton_states[-1]
        tail = mpa.self_loop(last)
        end = self.poses[-1]
        world = tail.apply(end.x, end.y, end.yaw)[-1]
        extra = VehicleState(*world)
        hull = swept_footprint(end, extra, mpa.params.length, mpa.params.width)
        return Prediction(
            self.poses[0],
            self.poses[1:] + (extra,),
            self.occupancies[1:] + (hull,),
            math.nan,
            self.automaton_states[1:] + (last,),
        )

    def to_dict(self) -> dict:
        return {
            "start": list(self.start.as_tuple()),
            "poses": [list(p.as_tuple()) for p in self.poses],
            "occupancies": [[list(pt) for pt in poly] for poly in self.occupancies],
            "cost": self.cost,
            "automaton_states": [list(s) for s in self.automaton_states],
        }


def stage_cost(pose: VehicleState, ref_point: tuple[float, float], ref_speed: float, speed_weight: float) -> float:
    dx = pose.x - ref_point[0]
    dy = pose.y - ref_point[1]
    dv = pose.speed - ref_speed
    return dx * dx + dy * dy + speed_weight * dv * dv


def trajectory_cost(poses: Sequence[VehicleState], ref: ReferenceTrajectory, speed_weight: float = 0.1) -> float:
    """Reference-tracking objective summed over the horizon, left to right."""
    total = 0.0
    for pose, pt, v in zip(poses, ref.points, ref.speeds):
        total += stage_cost(pose, pt, v, speed_weight)
    return total


def swept_footprint(a: VehicleState, b: VehicleState, length: float, width: float) -> Polygon:
    return convex_hull(rectangle(a.x, a.y, a.yaw, length, width) + rectangle(b.x, b.y, b.yaw, length, width))


class _Obstacles:
    """Per-step obstacle polygons with bounding circles for a cheap prefilter."""

    def __init__(self, per_step: Sequence[Sequence[Polygon]]):
        self.steps = []
        for polys in per_step:
            entries = []
            for poly in polys:
                n = len(poly)
                cx = sum(p[0] for p in poly) / n
                cy = sum(p[1] for p in poly) / n
                r = max(math.hypot(p[0] - cx, p[1] - cy) for p in poly)
                entries.append((cx, cy, r, poly))
            self.steps.append(entries)

    def collides(self, step: int, hull: Polygon, cx: float, cy: float, r: float) -> bool:
        for ox, oy, orad, poly in self.steps[step]:
            rr = r + orad
            dx, dy = cx - ox, cy - oy
            if dx * dx + dy * dy > rr * rr:
                continue
            if polygons_intersect(hull, poly, validate=False):
                return True
        return False


@dataclass
class _Tree:
    parent: list[int] = field(default_factory=list)
    depth: list[int] = field(default_factory=list)
    state: list[AutomatonState] = field(default_factory=list)
    pose: list[VehicleState] = field(default_factory=list)
    hull: list[Polygon | None] = field(default_factory=list)
    cost: list[float] = field(default_factory=list)
    children: list[dict[AutomatonState, int]] = field(default_factory=list)
    dead: list[bool] = field(default_factory=list)

    def add(self, parent, depth, state, pose, hull, cost) -> int:
        self.parent.append(parent)
        self.depth.append(depth)
        self.state.append(state)
        self.pose.append(pose)
        self.hull.append(hull)
        self.cost.append(cost)
        self.children.append({})
        self.dead.append(False)
        return len(self.parent) - 1

    def path(self, node: int) -> list[int]:
        out = []
        while node >= 0:
            out.append(node)
            node = self.parent[node]
        return out[::-1]


class _BudgetSpent(Exception):
    pass


class _Search:
    def __init__(self, state, root_state, ref, obstacles, mpa, cfg):
        self.ref = ref
        self.obs = _Obstacles(obstacles)
        self.mpa = mpa
        self.cfg = cfg
        self.H = cfg.horizon
        self.length = mpa.params.length
        self.width = mpa.params.width
        self.r_fp = 0.5 * math.hypot(self.length, self.width)
        self.rng = random.Random(cfg.seed)
        self.budget = cfg.n_expansions
        self.used = 0
        self.tree = _Tree()
        self.tree.add(-1, 0, root_state, state, None, 0.0)
        self.best: int | None = None
        self.deepest = 0

    # a transition whose child is infeasible is remembered as -1
    def child(self, node: int, prim: Primitive) -> int:
        if self.used >= self.budget:
            raise _BudgetSpent
        self.used += 1
        t = self.tree
        known = t.children[node].get(prim.end)
        if known is not None:
            return known
        p = t.pose[node]
        x, y, yaw, v = prim.apply(p.x, p.y, p.yaw)[-1]
        pose = VehicleState(x, y, yaw, v)
        depth = t.depth[node] + 1
        ok = 0.0 <= v <= self.mpa.params.max_speed + 1e-9
        hull = None
        if ok:
            hull = convex_hull(
                rectangle(p.x, p.y, p.yaw, self.length, self.width) + rectangle(x, y, yaw, self.length, self.width)
            )
            half = 0.5 * math.hypot(x - p.x, y - p.y)
            ok = not self.obs.collides(depth - 1, hull, 0.5 * (x + p.x), 0.5 * (y + p.y), half + self.r_fp)
        if not ok:
            t.children[node][prim.end] = -1
            return -1
        step = depth - 1
        c = t.cost[node] + stage_cost(pose, self.ref.points[step], self.ref.speeds[step], self.cfg.speed_weight)
        idx = t.add(node, depth, prim.end, pose, hull, c)
        t.children[node][prim.end] = idx
        if depth > t.depth[self.deepest]:
            self.deepest = idx
        if depth == self.H and (self.best is None or c < t.cost[self.best]):
            self.best = idx
        return idx

    def admissible(self, node: int) -> list[Primitive]:
        """Primitives allowed from ``node``; the last step must end in a repeatable state."""
        t = self.tree
        prims = self.mpa.primitives[t.state[node]]
        if t.depth[node] == self.H - 1:
            prims = tuple(p for p in prims if p.is_self_loop or p.end[0] == 0)
        kids = t.children[node]
        return [p for p in prims if (k := kids.get(p.end)) is None or (k >= 0 and not t.dead[k])]

    def follow(self, node: int, choose) -> None:
        """Descend from ``node`` to the horizon, ``choose`` picking each primitive."""
        t = self.tree
        while t.depth[node] < self.H:
            prim = choose(node)
            if prim is None:
                return
            nxt = self.child(node, prim)
            if nxt < 0:
                return
            node = nxt

    def random_rollout(self, node: int) -> None:
        t = self.tree
        while t.depth[node] < self.H:
            options = self.admissible(node)
            nxt = -1
            while options:
                prim = options.pop(self.rng.randrange(len(options)))
                nxt = self.child(node, prim)
                if nxt >= 0:
                    break
            if nxt < 0:
                t.dead[node] = True
                return
            node = nxt

    def greedy_rollout(self) -> None:
        t = self.tree
        node = 0
        while t.depth[node] < self.H:
            kids = [k for k in (self.child(node, p) for p in self.admissible(node)) if k >= 0]
            if not kids:
                t.dead[node] = True
                return
            node = min(kids, key=lambda k: (t.cost[k], k))

    def run(self, warm_start: Sequence[AutomatonState] | None) -> None:
        mpa, t = self.mpa, self.tree
        try:
            if warm_start:
                seq = iter(warm_start)

                def replay(node):
                    try:
                        end = next(seq)
                    except StopIteration:
                        return None
                    return next((p for p in self.admissible(node) if p.end == end), None)

                self.follow(0, replay)
            self.follow(0, lambda n: next((p for p in self.admissible(n) if p.is_self_loop), None))

            def brake(n):
                vi, si = t.state[n]
                target = (max(vi - 1, 0), si)
                return next((p for p in self.admissible(n) if p.end == target), None)

            self.follow(0, brake)
            self.greedy_rollout()
            while not t.dead[0]:
                if self.best is not None and self.rng.random() < 0.5:
                    start = self.rng.choice(t.path(self.best)[:-1])
                else:
                    start = self.rng.randrange(len(t.parent))
                if t.depth[start] >= self.H or t.dead[start]:
                    self.used += 1
                    if self.used >= self.budget:
                        raise _BudgetSpent
                    continue
                self.random_rollout(start)
        except _BudgetSpent:
            pass

    def prediction(self, node: int) -> Prediction:
        t = self.tree
        nodes = t.path(node)
        return Prediction(
            t.pose[0],
            tuple(t.pose[k] for k in nodes[1:]),
            tuple(t.hull[k] for k in nodes[1:]),
            t.cost[node],
            tuple(t.state[k] for k in nodes),
        )


def plan(
    state: VehicleState,
    ref: ReferenceTrajectory,
    obstacles: Sequence[Sequence[Polygon]],
    mpa: MotionPrimitiveAutomaton,
    cfg: PlannerConfig,
    mpa_state: AutomatonState | None = None,
    warm_start: Sequence[AutomatonState] | None = None,
) -> Prediction:
    """Cheapest collision-free full-horizon trajectory found within ``cfg.n_expansions``.

    ``obstacles[l]`` lists the polygons to avoid at step ``l + 1``.
    ``mpa_state`` defaults to the speed level nearest ``state.speed`` with the
    steering level nearest zero. ``warm_start`` is a sequence of automaton
    states (excluding the root) tried before any random transition, typically
    a previous plan shifted by one step.
    """
    H = cfg.horizon
    if len(obstacles) != H:
        raise ValueError(f"need obstacle lists for {H} steps, got {len(obstacles)}")
    if len(ref.points) != H:
        raise ValueError(f"reference must have {H} points, got {len(ref.points)}")
    root = mpa_state if mpa_state is not None else mpa.nearest_state(state.speed)
    if root not in mpa.primitives:
        raise ValueError(f"automaton state {root} not in the automaton")
    if abs(mpa.speed(root) - state.speed) > 1e-6:
        raise ValueError(f"vehicle speed {state.speed} does not match automaton state {root}")
    search = _Search(state, root, ref, obstacles, mpa, cfg)
    search.run(warm_start)
    if search.best is None:
        raise PlanningInfeasible(
            f"no feasible {H}-step trajectory within {cfg.n_expansions} expansions",
            search.prediction(search.deepest),
        )
    return search.prediction(search.best)
