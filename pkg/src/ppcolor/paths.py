"""Reference polylines parameterized by arc length."""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from typing import Sequence

from .planner import ReferenceTrajectory


@dataclass(frozen=True)
class Polyline:
    points: tuple[tuple[float, float], ...]
    _cum: tuple[float, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        pts = tuple((float(x), float(y)) for x, y in self.points)
        if len(pts) < 2:
            raise ValueError("a polyline needs at least two points")
        cum = [0.0]
        for (x0, y0), (x1, y1) in zip(pts, pts[1:]):
            seg = math.hypot(x1 - x0, y1 - y0)
            if seg <= 0:
                raise ValueError("consecutive polyline points must differ")
            cum.append(cum[-1] + seg)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "_cum", tuple(cum))

    @property
    def length(self) -> float:
        return self._cum[-1]

    def point_at(self, s: float) -> tuple[float, float]:
        """Point at arc length ``s``; beyond either end the end segment is extended."""
        k = min(max(bisect.bisect_right(self._cum, s) - 1, 0), len(self.points) - 2)
        (x0, y0), (x1, y1) = self.points[k], self.points[k + 1]
        t = (s - self._cum[k]) / (self._cum[k + 1] - self._cum[k])
        return (x0 + t * (x1 - x0), y0 + t * (y1 - y0))

    def heading_at(self, s: float) -> float:
        k = min(max(bisect.bisect_right(self._cum, s) - 1, 0), len(self.points) - 2)
        (x0, y0), (x1, y1) = self.points[k], self.points[k + 1]
        return math.atan2(y1 - y0, x1 - x0)

    def project(self, x: float, y: float) -> float:
        """Arc length of the closest point; past the last point the final segment is extended."""
        best_d, best_s = math.inf, 0.0
        last = len(self.points) - 2
        for k, ((x0, y0), (x1, y1)) in enumerate(zip(self.points, self.points[1:])):
            dx, dy = x1 - x0, y1 - y0
            seg2 = dx * dx + dy * dy
            t = ((x - x0) * dx + (y - y0) * dy) / seg2
            t = max(t, 0.0) if k == last else min(max(t, 0.0), 1.0)
            px, py = x0 + t * dx, y0 + t * dy
            d = math.hypot(x - px, y - py)
            if d < best_d:
                best_d, best_s = d, self._cum[k] + t * math.sqrt(seg2)
        return best_s


def reference_along(path: Polyline, x: float, y: float, speed: float, dt: float, horizon: int) -> ReferenceTrajectory:
    """Points ``speed * dt`` apart along ``path`` starting from the projection of ``(x, y)``."""
    s0 = path.project(x, y)
    pts = tuple(path.point_at(s0 + speed * dt * (l + 1)) for l in range(horizon))
    return ReferenceTrajectory(pts, (speed,) * horizon)


def arc_points(
    center: tuple[float, float], radius: float, start_angle: float, end_angle: float, spacing: float = 0.03
) -> list[tuple[float, float]]:
    n = max(2, int(math.ceil(abs(end_angle - start_angle) * radius / spacing)) + 1)
    return [
        (center[0] + radius * math.cos(a), center[1] + radius * math.sin(a))
        for a in (start_angle + (end_angle - start_angle) * k / (n - 1) for k in range(n))
    ]


def join(*pieces: Sequence[tuple[float, float]]) -> list[tuple[float, float]]:
    out: list[tuple[float, float]] = []
    for piece in pieces:
        for p in piece:
            if not out or math.hypot(p[0] - out[-1][0], p[1] - out[-1][1]) > 1e-9:
                out.append((float(p[0]), float(p[1])))
    return out
