"""Kinematic single-track vehicle model and its motion-primitive automaton."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence


class InputError(ValueError):
    pass


def wrap_angle(a: float) -> float:
    """Map an angle to (-pi, pi]."""
    a = math.fmod(a, 2.0 * math.pi)
    if a <= -math.pi:
        a += 2.0 * math.pi
    elif a > math.pi:
        a -= 2.0 * math.pi
    return a


@dataclass(frozen=True)
class VehicleState:
    x: float
    y: float
    yaw: float
    speed: float

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.x, self.y, self.yaw, self.speed)


@dataclass(frozen=True)
class VehicleParams:
    """Small-scale lab vehicle defaults (metres, radians, seconds)."""

    wheelbase: float = 0.15
    length: float = 0.22
    width: float = 0.10
    max_speed: float = 1.0
    max_steering: float = 0.6
    max_accel: float = 2.0

    @property
    def circumradius(self) -> float:
        return math.hypot(0.5 * self.length, 0.5 * self.width)


def _deriv(y: tuple[float, float, float, float], steering: float, accel: float, wheelbase: float):
    _, _, yaw, v = y
    return (v * math.cos(yaw), v * math.sin(yaw), v / wheelbase * math.tan(steering), accel)


def _rk4(y, steering, accel, h, wheelbase):
    k1 = _deriv(y, steering, accel, wheelbase)
    y2 = tuple(a + 0.5 * h * b for a, b in zip(y, k1))
    k2 = _deriv(y2, steering, accel, wheelbase)
    y3 = tuple(a + 0.5 * h * b for a, b in zip(y, k2))
    k3 = _deriv(y3, steering, accel, wheelbase)
    y4 = tuple(a + h * b for a, b in zip(y, k3))
    k4 = _deriv(y4, steering, accel, wheelbase)
    return tuple(a + h / 6.0 * (b + 2.0 * c + 2.0 * d + e) for a, b, c, d, e in zip(y, k1, k2, k3, k4))


def step_model(
    s: VehicleState,
    steering: float,
    accel: float,
    dt: float,
    params: VehicleParams = VehicleParams(),
    substeps: int = 10,
) -> VehicleState:
    """Advance the kinematic single-track model by ``dt`` under constant input.

    Fixed-step RK4 with ``substeps`` equal steps; the yaw of the result is
    wrapped to (-pi, pi].
    """
    if abs(steering) > params.max_steering + 1e-12:
        raise InputError(f"steering {steering} outside +-{params.max_steering}")
    if abs(accel) > params.max_accel + 1e-9:
        raise InputError(f"acceleration {accel} outside +-{params.max_accel}")
    if dt <= 0:
        raise InputError("dt must be positive")
    y = s.as_tuple()
    h = dt / substeps
    for _ in range(substeps):
        y = _rk4(y, steering, accel, h, params.wheelbase)
    x, yy, yaw, v = y
    return VehicleState(x, yy, wrap_angle(yaw), v)


AutomatonState = tuple[int, int]  # (speed index, steering index)
Pose = tuple[float, float, float, float]  # x, y, yaw, speed


@dataclass(frozen=True)
class Primitive:
    start: AutomatonState
    end: AutomatonState
    steering: float
    speed_change: float
    poses: tuple[Pose, ...]  # local frame, t = dt/n .. dt; start pose is the origin

    @property
    def is_self_loop(self) -> bool:
        return self.start == self.end

    def apply(self, x: float, y: float, yaw: float) -> list[Pose]:
        """Sampled poses of this primitive started at world pose ``(x, y, yaw)``."""
        c, s = math.cos(yaw), math.sin(yaw)
        return [
            (x + c * lx - s * ly, y + s * lx + c * ly, wrap_angle(yaw + lyaw), v)
            for lx, ly, lyaw, v in self.poses
        ]


@dataclass(frozen=True)
class MotionPrimitiveAutomaton:
    speed_levels: tuple[float, ...]
    steering_levels: tuple[float, ...]
    dt: float
    params: VehicleParams
    max_speed_change: float
    max_steering_change: float
    primitives: dict[AutomatonState, tuple[Primitive, ...]] = field(compare=False)

    @property
    def states(self) -> list[AutomatonState]:
        return sorted(self.primitives)

    def speed(self, st: AutomatonState) -> float:
        return self.speed_levels[st[0]]

    def self_loop(self, st: AutomatonState) -> Primitive:
        return next(p for p in self.primitives[st] if p.is_self_loop)

    def transition(self, start: AutomatonState, end: AutomatonState) -> Primitive:
        for p in self.primitives[start]:
            if p.end == end:
                return p
        raise KeyError(f"no primitive {start} -> {end}")

    def max_step_displacement(self) -> float:
        """Largest distance from the start pose reached by any primitive sample."""
        return max(
            math.hypot(px, py) for prims in self.primitives.values() for p in prims for px, py, _, _ in p.poses
        )

    def nearest_state(self, speed: float, steering: float = 0.0) -> AutomatonState:
        vi = min(range(len(self.speed_levels)), key=lambda k: (abs(self.speed_levels[k] - speed), k))
        si = min(range(len(self.steering_levels)), key=lambda k: (abs(self.steering_levels[k] - steering), k))
        return (vi, si)

    def to_dict(self) -> dict:
        return {
            "speed_levels": list(self.speed_levels),
            "steering_levels": list(self.steering_levels),
            "dt": self.dt,
            "params": self.params.__dict__,
            "max_speed_change": self.max_speed_change,
            "max_steering_change": self.max_steering_change,
            "states": [list(s) for s in self.states],
            "primitives": [
                {
                    "from": list(p.start),
                    "to": list(p.end),
                    "steering": p.steering,
                    "speed_change": p.speed_change,
                    "poses": [list(q) for q in p.poses],
                }
                for s in self.states
                for p in self.primitives[s]
            ],
        }

    @classmethod
    def from_dict(cls, d: dict) -> MotionPrimitiveAutomaton:
        prims: dict[AutomatonState, list[Primitive]] = {tuple(s): [] for s in d["states"]}
        for p in d["primitives"]:
            prim = Primitive(
                tuple(p["from"]), tuple(p["to"]), p["steering"], p["speed_change"], tuple(tuple(q) for q in p["poses"])
            )
            prims[prim.start].append(prim)
        return cls(
            tuple(d["speed_levels"]),
            tuple(d["steering_levels"]),
            d["dt"],
            VehicleParams(**d["params"]),
            d["max_speed_change"],
            d["max_steering_change"],
            {s: tuple(v) for s, v in prims.items()},
        )

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=1))

    @classmethod
    def load(cls, path: str | Path) -> MotionPrimitiveAutomaton:
        return cls.from_dict(json.loads(Path(path).read_text()))


def build_mpa(
    speed_levels: Sequence[float],
    steering_levels: Sequence[float],
    dt: float,
    wheelbase: float = 0.15,
    max_speed_change: float | None = None,
    max_steering_change: float = math.inf,
    n_samples: int = 5,
    length: float = 0.22,
    width: float = 0.10,
) -> MotionPrimitiveAutomaton:
    """Quantize the single-track model into automaton states and one-step primitives.

    A primitive from ``(v_i, d_i)`` to ``(v_j, d_j)`` exists when the speed and
    steering changes stay within their per-step limits. It holds steering
    ``d_j`` and accelerates uniformly from ``v_i`` to ``v_j`` over ``dt``.
    """
    if not speed_levels or not steering_levels:
        raise InputError("speed and steering levels must be non-empty")
    if dt <= 0:
        raise InputError("dt must be positive")
    if n_samples < 5:
        raise InputError("each primitive needs at least 5 sampled poses")
    speeds = tuple(float(v) for v in sorted(speed_levels))
    steers = tuple(float(d) for d in sorted(steering_levels))
    if speeds[0] < 0:
        raise InputError("speed levels must be nonnegative")
    if max_speed_change is None:
        max_speed_change = max((b - a for a, b in zip(speeds, speeds[1:])), default=0.0)
    params = VehicleParams(
        wheelbase=wheelbase,
        length=length,
        width=width,
        max_speed=speeds[-1],
        max_steering=max(abs(d) for d in steers),
        max_accel=max_speed_change / dt,
    )
    eps = 1e-9
    prims: dict[AutomatonState, tuple[Primitive, ...]] = {}
    h = dt / n_samples
    for vi, v0 in enumerate(speeds):
        for si, d0 in enumerate(steers):
            out = []
            for vj, v1 in enumerate(speeds):
                if abs(v1 - v0) > max_speed_change + eps:
                    continue
                for sj, d1 in enumerate(steers):
                    if abs(d1 - d0) > max_steering_change + eps:
                        continue
                    accel = (v1 - v0) / dt
                    s = VehicleState(0.0, 0.0, 0.0, v0)
                    poses = []
                    for k in range(n_samples):
                        s = step_model(s, d1, accel, h, params)
                        poses.append((s.x, s.y, s.yaw, v1 if k == n_samples - 1 else s.speed))
                    out.append(Primitive((vi, si), (vj, sj), d1, v1 - v0, tuple(poses)))
            prims[(vi, si)] = tuple(out)
    return MotionPrimitiveAutomaton(speeds, steers, dt, params, max_speed_change, max_steering_change, prims)
