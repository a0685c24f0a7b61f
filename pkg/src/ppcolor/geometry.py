"""Convex polygon helpers: separating-axis overlap test, hulls, vehicle footprints.

Polygons are plain tuples of ``(x, y)`` points in counter-clockwise or
clockwise order. Everything here is pure Python because the polygons are tiny
(4 to 8 vertices) and the per-call overhead of numpy would dominate.
"""

from __future__ import annotations

import math
from typing import Sequence

Point = tuple[float, float]
Polygon = tuple[Point, ...]


class GeometryError(ValueError):
    pass


def _check(poly: Sequence[Point]) -> None:
    if len(poly) < 3:
        raise GeometryError(f"polygon needs at least 3 vertices, got {len(poly)}")
    if abs(signed_area(poly)) <= 1e-15:
        raise GeometryError("degenerate polygon with zero area")


def signed_area(poly: Sequence[Point]) -> float:
    a = 0.0
    n = len(poly)
    for k in range(n):
        x0, y0 = poly[k]
        x1, y1 = poly[(k + 1) % n]
        a += x0 * y1 - x1 * y0
    return 0.5 * a


def _separated_on_edges(a: Sequence[Point], b: Sequence[Point]) -> bool:
    n = len(a)
    for k in range(n):
        x0, y0 = a[k]
        x1, y1 = a[(k + 1) % n]
        nx, ny = y1 - y0, x0 - x1
        if nx == 0.0 and ny == 0.0:
            continue
        amin = amax = nx * x0 + ny * y0
        for x, y in a:
            d = nx * x + ny * y
            if d < amin:
                amin = d
            elif d > amax:
                amax = d
        bmin = bmax = nx * b[0][0] + ny * b[0][1]
        for x, y in b:
            d = nx * x + ny * y
            if d < bmin:
                bmin = d
            elif d > bmax:
                bmax = d
        # closed sets: touching boundaries count as intersecting
        if amax < bmin or bmax < amin:
            return True
    return False


def polygons_intersect(a: Sequence[Point], b: Sequence[Point], validate: bool = True) -> bool:
    """True iff the closed convex polygons ``a`` and ``b`` share at least one point."""
    if validate:
        _check(a)
        _check(b)
    return not (_separated_on_edges(a, b) or _separated_on_edges(b, a))


def convex_hull(points: Sequence[Point]) -> Polygon:
    """Andrew's monotone chain; counter-clockwise, collinear points dropped."""
    pts = sorted(set(points))
    if len(pts) <= 2:
        return tuple(pts)

    def cross(o: Point, p: Point, q: Point) -> float:
        return (p[0] - o[0]) * (q[1] - o[1]) - (p[1] - o[1]) * (q[0] - o[0])

    lower: list[Point] = []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list[Point] = []
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return tuple(lower[:-1] + upper[:-1])


def rectangle(x: float, y: float, yaw: float, length: float, width: float) -> Polygon:
    """Corners of a ``length`` x ``width`` box centred at ``(x, y)`` heading ``yaw``."""
    c, s = math.cos(yaw), math.sin(yaw)
    hl, hw = 0.5 * length, 0.5 * width
    return tuple(
        (x + c * dx - s * dy, y + s * dx + c * dy)
        for dx, dy in ((hl, hw), (-hl, hw), (-hl, -hw), (hl, -hw))
    )


def bounding_circle(poly: Sequence[Point]) -> tuple[float, float, float]:
    """Centroid-of-vertices circle enclosing the polygon: ``(cx, cy, r)``."""
    n = len(poly)
    cx = sum(p[0] for p in poly) / n
    cy = sum(p[1] for p in poly) / n
    r = max(math.hypot(p[0] - cx, p[1] - cy) for p in poly)
    return cx, cy, r

