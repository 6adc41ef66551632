"""Core SE(2) and convex-polygon geometry shared by all modules.

Angle convention: headings are always normalized to (-pi, pi].
Polygons are counter-clockwise, strictly convex, and immutable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Tuple

Point = Tuple[float, float]

_TWO_PI = 2.0 * math.pi


def normalize_angle(a: float) -> float:
    """Reduce an angle to the canonical interval (-pi, pi]."""
    if not math.isfinite(a):
        raise ValueError(f"non-finite angle: {a!r}")
    a = math.fmod(a, _TWO_PI)
    if a <= -math.pi:
        a += _TWO_PI
    elif a > math.pi:
        a -= _TWO_PI
    return a


@dataclass(frozen=True)
class Pose:
    """An SE(2) state (x, y, heading); heading stored normalized."""

    x: float
    y: float
    theta: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"non-finite pose position: ({self.x!r}, {self.y!r})")
        object.__setattr__(self, "theta", normalize_angle(self.theta))

    @property
    def position(self) -> Point:
        return (self.x, self.y)

    def distance_to(self, other: "Pose") -> float:
        return math.hypot(other.x - self.x, other.y - self.y)

    def heading_error_to(self, other: "Pose") -> float:
        return abs(normalize_angle(other.theta - self.theta))


@dataclass(frozen=True)
class Transform:
    """Rigid planar transform: rotate by `rotation`, then translate."""

    translation: Point
    rotation: float

    def __post_init__(self):
        object.__setattr__(self, "rotation", normalize_angle(self.rotation))

    @classmethod
    def from_pose(cls, pose: Pose) -> "Transform":
        return cls((pose.x, pose.y), pose.theta)

    def apply(self, p: Point) -> Point:
        c, s = math.cos(self.rotation), math.sin(self.rotation)
        return (
            c * p[0] - s * p[1] + self.translation[0],
            s * p[0] + c * p[1] + self.translation[1],
        )


class ConvexPolygon:
    """A strictly convex polygon with counter-clockwise vertices.

    Validity (>= 3 vertices, strict convexity, no repeats) is checked once
    at construction; every operation may then assume it.
    """

    __slots__ = ("vertices",)

    def __init__(self, vertices: Sequence[Point]):
        verts = [(float(x), float(y)) for x, y in vertices]
        if len(verts) < 3:
            raise ValueError("polygon needs at least 3 vertices")
        for x, y in verts:
            if not (math.isfinite(x) and math.isfinite(y)):
                raise ValueError("non-finite polygon vertex")
        n = len(verts)
        for i in range(n):
            ax, ay = verts[i]
            bx, by = verts[(i + 1) % n]
            cx, cy = verts[(i + 2) % n]
            cross = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)
            if cross <= 0.0:
                raise ValueError(
                    "vertices must be strictly convex and counter-clockwise"
                )
        self.vertices: Tuple[Point, ...] = tuple(verts)

    def __repr__(self):
        return f"ConvexPolygon({list(self.vertices)!r})"

    def __eq__(self, other):
        return isinstance(other, ConvexPolygon) and self.vertices == other.vertices

    def __hash__(self):
        return hash(self.vertices)

    @classmethod
    def rectangle(cls, x0: float, y0: float, x1: float, y1: float) -> "ConvexPolygon":
        """Axis-aligned rectangle from min/max corners."""
        if not (x1 > x0 and y1 > y0):
            raise ValueError("rectangle corners must satisfy x1 > x0, y1 > y0")
        return cls([(x0, y0), (x1, y0), (x1, y1), (x0, y1)])

    def area(self) -> float:
        total = 0.0
        n = len(self.vertices)
        for i in range(n):
            x0, y0 = self.vertices[i]
            x1, y1 = self.vertices[(i + 1) % n]
            total += x0 * y1 - x1 * y0
        return 0.5 * total

    def centroid(self) -> Point:
        sx = sum(v[0] for v in self.vertices)
        sy = sum(v[1] for v in self.vertices)
        n = len(self.vertices)
        return (sx / n, sy / n)

    def bounding_box(self) -> Tuple[float, float, float, float]:
        xs = [v[0] for v in self.vertices]
        ys = [v[1] for v in self.vertices]
        return (min(xs), min(ys), max(xs), max(ys))

    def circumscribed_radius(self) -> float:
        """Max vertex distance from the body-frame origin (0, 0)."""
        return max(math.hypot(x, y) for x, y in self.vertices)

    def contains_point(self, p: Point) -> bool:
        """Closed-set containment: boundary points count as inside."""
        n = len(self.vertices)
        for i in range(n):
            ax, ay = self.vertices[i]
            bx, by = self.vertices[(i + 1) % n]
            if (bx - ax) * (p[1] - ay) - (by - ay) * (p[0] - ax) < 0.0:
                return False
        return True

    def boundary_distance(self, p: Point) -> float:
        """Distance from p to the polygon boundary (0 if p is inside)."""
        if self.contains_point(p):
            return 0.0
        n = len(self.vertices)
        return min(
            point_segment_distance(p, self.vertices[i], self.vertices[(i + 1) % n])
            for i in range(n)
        )


def transform_polygon(poly: ConvexPolygon, t: Transform) -> ConvexPolygon:
    """Rotate then translate every vertex; orientation is preserved."""
    return ConvexPolygon([t.apply(v) for v in poly.vertices])


def _project(vertices: Sequence[Point], ax: float, ay: float) -> Tuple[float, float]:
    lo = hi = vertices[0][0] * ax + vertices[0][1] * ay
    for x, y in vertices[1:]:
        d = x * ax + y * ay
        if d < lo:
            lo = d
        elif d > hi:
            hi = d
    return lo, hi


def polygons_intersect(a: ConvexPolygon, b: ConvexPolygon) -> bool:
    """Separating-axis test between two convex polygons.

    Closed-set semantics: polygons touching along an edge or vertex count
    as intersecting.
    """
    for poly in (a, b):
        verts = poly.vertices
        n = len(verts)
        for i in range(n):
            ex = verts[(i + 1) % n][0] - verts[i][0]
            ey = verts[(i + 1) % n][1] - verts[i][1]
            # outward edge normal
            ax, ay = ey, -ex
            lo_a, hi_a = _project(a.vertices, ax, ay)
            lo_b, hi_b = _project(b.vertices, ax, ay)
            if hi_a < lo_b or hi_b < lo_a:
                return False
    return True


def point_segment_distance(p: Point, a: Point, b: Point) -> float:
    """Euclidean distance from p to the closed segment ab."""
    abx, aby = b[0] - a[0], b[1] - a[1]
    apx, apy = p[0] - a[0], p[1] - a[1]
    denom = abx * abx + aby * aby
    if denom == 0.0:
        return math.hypot(apx, apy)
    t = (apx * abx + apy * aby) / denom
    if t <= 0.0:
        return math.hypot(apx, apy)
    if t >= 1.0:
        return math.hypot(p[0] - b[0], p[1] - b[1])
    return math.hypot(apx - t * abx, apy - t * aby)
