"""Shipped scenarios.

The intersection is a four-arm crossing with two incoming and two outgoing
lanes per arm (right-hand traffic), sized to fit a 4.5 m x 4.0 m lab map.
From every arm one vehicle drives straight on the inner lane and one turns
right from the outer lane.
"""

from __future__ import annotations

import math

from .paths import Polyline, arc_points, join
from .simulator import MpaSpec, Scenario, VehicleSpec
from .vehicle import VehicleState

LANE_WIDTH = 0.3
INNER = 0.5 * LANE_WIDTH
OUTER = 1.5 * LANE_WIDTH

# arm name -> heading of the traffic entering from that arm
ARMS = {"south": math.pi / 2, "east": math.pi, "north": -math.pi / 2, "west": 0.0}


def _frame(heading: float):
    h = (math.cos(heading), math.sin(heading))
    r = (math.sin(heading), -math.cos(heading))  # right-hand normal

    def world(along: float, right: float) -> tuple[float, float]:
        return (along * h[0] + right * r[0], along * h[1] + right * r[1])

    return world


def straight_path(heading: float, start: float, exit_at: float) -> list[tuple[float, float]]:
    """Inner lane straight through; ``start``/``exit_at`` are signed distances along the heading."""
    w = _frame(heading)
    return [w(start, INNER), w(exit_at, INNER)]


def right_turn_path(heading: float, start: float, exit_at: float, radius: float) -> list[tuple[float, float]]:
    """Outer lane into the outer outgoing lane of the arm to the right.

    The path ends ``exit_at`` to the right of the centre, or just past the
    end of the arc if that lies further out.
    """
    w = _frame(heading)
    c = OUTER + radius
    arc = [
        w(-c + radius * math.sin(t), c + radius * math.cos(t))
        for t in (math.pi + (math.pi / 2 - math.pi) * k / 40 for k in range(41))
    ]
    # arc runs from (along=-c, right=OUTER) to (along=-OUTER, right=c)
    return join([w(start, OUTER)], arc, [w(-OUTER, max(exit_at, c + 0.1))])


def intersection_scenario(
    start_distances: dict[str, tuple[float, float]] | None = None,
    speed: float = 0.6,
    ref_speed: float = 0.6,
    exit_at: float = 0.75,
    turn_radius: float = 0.45,
    **overrides,
) -> Scenario:
    """Eight vehicles, two per arm; ids go south, east, north, west, straight before right.

    ``start_distances[arm]`` gives (straight, right-turn) start distances from
    the centre of the crossing.
    """
    start_distances = start_distances or DEFAULT_STARTS
    vehicles = []
    for arm, heading in ARMS.items():
        d_straight, d_right = start_distances[arm]
        for pts in (
            straight_path(heading, -d_straight, exit_at),
            right_turn_path(heading, -d_right, exit_at, turn_radius),
        ):
            x, y = pts[0]
            vehicles.append(VehicleSpec(VehicleState(x, y, heading, speed), Polyline(tuple(pts)), ref_speed))
    params = dict(name="intersection8", dt=0.2, n_steps=25, horizon=8, n_expansions=2500, mpa=MpaSpec())
    params.update(overrides)
    return Scenario(vehicles=tuple(vehicles), **params)


DEFAULT_STARTS = {
    "south": (1.0, 1.0),
    "east": (1.2, 1.2),
    "north": (1.4, 1.4),
    "west": (1.6, 1.6),
}
