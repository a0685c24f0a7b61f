import json
import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from ppcolor.geometry import polygons_intersect, rectangle
from ppcolor.planner import (
    PlannerConfig,
    PlanningInfeasible,
    ReferenceTrajectory,
    plan,
    swept_footprint,
    trajectory_cost,
)
from ppcolor.vehicle import VehicleState, build_mpa, step_model, wrap_angle

H = 8
DT = 0.2


@pytest.fixture(scope="module")
def mpa():
    return build_mpa((0.0, 0.2, 0.4, 0.6), (-0.4, -0.2, 0.0, 0.2, 0.4), DT, max_speed_change=0.2)


def straight_ref(x0, y0, speed, horizon=H):
    return ReferenceTrajectory(
        tuple((x0 + speed * DT * (l + 1), y0) for l in range(horizon)), (speed,) * horizon
    )


def box(cx, cy, side):
    return rectangle(cx, cy, 0.0, side, side)


def random_case(seed):
    rng = random.Random(seed)
    speed = rng.choice((0.0, 0.2, 0.4, 0.6))
    start = VehicleState(0.0, 0.0, rng.uniform(-0.3, 0.3), speed)
    ref = straight_ref(0.0, rng.uniform(-0.1, 0.1), rng.choice((0.2, 0.4, 0.6)))
    static = [box(rng.uniform(0.2, 1.2), rng.uniform(-0.5, 0.5), rng.uniform(0.05, 0.2)) for _ in range(rng.randint(0, 3))]
    obstacles = []
    for l in range(H):
        moving = [box(1.5 - 0.1 * l, rng.uniform(-0.4, 0.4), 0.1)] if rng.random() < 0.5 else []
        obstacles.append(static + moving)
    return start, ref, obstacles


def audit(pred, obstacles, ref, mpa, start):
    assert len(pred.poses) == len(pred.occupancies) == H
    prev = start
    for l, (pose, occ) in enumerate(zip(pred.poses, pred.occupancies)):
        assert not any(polygons_intersect(occ, o) for o in obstacles[l])
        assert occ == swept_footprint(prev, pose, mpa.params.length, mpa.params.width)
        prev = pose
    assert pred.cost == trajectory_cost(pred.poses, ref, 0.1)


def replay_error(pred, mpa, start):
    s = start
    worst = 0.0
    for prim, pose in zip(pred.primitives(mpa), pred.poses):
        s = step_model(s, prim.steering, prim.speed_change / mpa.dt, mpa.dt, mpa.params, substeps=50)
        worst = max(worst, math.hypot(s.x - pose.x, s.y - pose.y), abs(wrap_angle(s.yaw - pose.yaw)))
    return worst


@settings(max_examples=30)
@given(seed=st.integers(0, 10**6))
def test_returned_plans_pass_audit_and_replay(seed, mpa):
    start, ref, obstacles = random_case(seed)
    try:
        pred = plan(start, ref, obstacles, mpa, PlannerConfig(H, 400, DT, seed))
    except PlanningInfeasible as e:
        prefix = e.prefix
        assert len(prefix.poses) < H
        return
    audit(pred, obstacles, ref, mpa, start)
    assert replay_error(pred, mpa, start) < 1e-6
    last = pred.primitives(mpa)[-1]
    assert last.is_self_loop or last.end[0] == 0


def test_deterministic(mpa):
    start, ref, obstacles = random_case(11)
    cfg = PlannerConfig(H, 600, DT, 3)
    a = plan(start, ref, obstacles, mpa, cfg)
    b = plan(start, ref, obstacles, mpa, cfg)
    assert json.dumps(a.to_dict()) == json.dumps(b.to_dict())


@pytest.mark.parametrize("case", range(12))
def test_bigger_budget_never_costs_more(case, mpa):
    start, ref, obstacles = random_case(100 + case)
    costs = []
    for budget in (500, 1000, 2000):
        try:
            costs.append(plan(start, ref, obstacles, mpa, PlannerConfig(H, budget, DT, case)).cost)
        except PlanningInfeasible:
            costs.append(math.inf)
    assert costs[0] >= costs[1] >= costs[2]


@pytest.mark.parametrize("speed", [0.2, 0.4, 0.6])
def test_no_worse_than_holding_straight(speed, mpa):
    start = VehicleState(0.0, 0.0, 0.0, speed)
    ref = straight_ref(0.0, 0.0, speed)
    pred = plan(start, ref, [[] for _ in range(H)], mpa, PlannerConfig(H, 300, DT, 0))
    hold = mpa.self_loop(mpa.nearest_state(speed))
    poses, s = [], start
    for _ in range(H):
        s = VehicleState(*hold.apply(s.x, s.y, s.yaw)[-1])
        poses.append(s)
    assert pred.cost <= trajectory_cost(poses, ref, 0.1)
    assert pred.cost < 1e-12


def test_tracks_an_offset_reference(mpa):
    start = VehicleState(0.0, 0.0, 0.0, 0.4)
    ref = straight_ref(0.0, 0.15, 0.4)
    pred = plan(start, ref, [[] for _ in range(H)], mpa, PlannerConfig(H, 2500, DT, 1))
    assert pred.poses[-1].y > 0.08


def test_fully_blocked_is_infeasible(mpa):
    start = VehicleState(0.0, 0.0, 0.0, 0.4)
    wall = box(0.0, 0.0, 3.0)
    with pytest.raises(PlanningInfeasible) as err:
        plan(start, straight_ref(0, 0, 0.4), [[wall]] * H, mpa, PlannerConfig(H, 500, DT, 0))
    assert err.value.prefix.poses == ()


def test_blocked_late_reports_prefix(mpa):
    start = VehicleState(0.0, 0.0, 0.0, 0.6)
    wall = box(0.0, 0.0, 3.0)
    obstacles = [[] for _ in range(4)] + [[wall]] * 4
    with pytest.raises(PlanningInfeasible) as err:
        plan(start, straight_ref(0, 0, 0.6), obstacles, mpa, PlannerConfig(H, 500, DT, 0))
    assert len(err.value.prefix.poses) == 4


def test_avoids_obstacle_in_lane(mpa):
    start = VehicleState(0.0, 0.0, 0.0, 0.6)
    obstacles = [[box(0.6, 0.0, 0.15)]] * H
    pred = plan(start, straight_ref(0, 0, 0.6), obstacles, mpa, PlannerConfig(H, 2500, DT, 0))
    audit(pred, obstacles, straight_ref(0, 0, 0.6), mpa, start)


def test_input_validation(mpa):
    start = VehicleState(0.0, 0.0, 0.0, 0.4)
    with pytest.raises(ValueError):
        plan(start, straight_ref(0, 0, 0.4), [[]] * (H - 1), mpa, PlannerConfig(H, 10, DT, 0))
    with pytest.raises(ValueError):
        plan(start, straight_ref(0, 0, 0.4, H - 1), [[]] * H, mpa, PlannerConfig(H, 10, DT, 0))
    with pytest.raises(ValueError):
        plan(VehicleState(0, 0, 0, 0.3), straight_ref(0, 0, 0.4), [[]] * H, mpa, PlannerConfig(H, 10, DT, 0))
    with pytest.raises(ValueError):
        PlannerConfig(0, 10, DT, 0)


def test_warm_start_is_reused(mpa):
    start = VehicleState(0.0, 0.0, 0.0, 0.4)
    ref = straight_ref(0.0, 0.15, 0.4)
    first = plan(start, ref, [[] for _ in range(H)], mpa, PlannerConfig(H, 2500, DT, 1))
    again = plan(start, ref, [[] for _ in range(H)], mpa, PlannerConfig(H, H, DT, 99), warm_start=first.automaton_states[1:])
    assert again.cost == first.cost


def test_shifted_prediction(mpa):
    start = VehicleState(0.0, 0.0, 0.0, 0.4)
    pred = plan(start, straight_ref(0, 0, 0.4), [[] for _ in range(H)], mpa, PlannerConfig(H, 300, DT, 0))
    sh = pred.shifted(mpa)
    assert sh.poses[:-1] == pred.poses[1:]
    assert sh.automaton_states[0] == pred.automaton_states[1]
    assert len(sh.poses) == H and len(sh.automaton_states) == H + 1
    assert sh.poses[-1].x == pytest.approx(pred.poses[-1].x + 0.4 * DT)
