"""State and path validity checking plus clearance queries.

Checkers are private to one planner run: environments are immutable and the
only mutable element is the state-check counter, so each run owns its own
checker instance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .env import Environment, GridEnv, PolygonEnv
from .geom import ConvexPolygon, Pose, Transform, polygons_intersect, transform_polygon
from .steer import SteeredPath


@dataclass(frozen=True)
class CollisionModel:
    """Point robot or a convex footprint given in the body frame.

    The body-frame origin must lie inside a footprint (it is the pose
    reference point).
    """

    footprint: Optional[ConvexPolygon] = None

    def __post_init__(self):
        if self.footprint is not None and not self.footprint.contains_point((0.0, 0.0)):
            raise ValueError("body-frame origin must lie inside the footprint")

    @property
    def is_point(self) -> bool:
        return self.footprint is None

    @classmethod
    def point(cls) -> "CollisionModel":
        return cls(None)

    @classmethod
    def car(cls) -> "CollisionModel":
        """2.0 x 1.0 m rectangle, origin 0.5 m ahead of the rear edge."""
        return cls(ConvexPolygon.rectangle(-0.5, -0.5, 1.5, 0.5))

    @classmethod
    def warehouse_bot(cls) -> "CollisionModel":
        """0.8 x 0.6 m rectangle, centered origin."""
        return cls(ConvexPolygon.rectangle(-0.4, -0.3, 0.4, 0.3))


def default_check_resolution(env: Environment) -> float:
    if isinstance(env, GridEnv):
        return min(0.1, env.cell_size / 4.0)
    return 0.1


class ValidityChecker:
    """Validity and clearance queries against one environment."""

    def __init__(
        self,
        env: Environment,
        model: CollisionModel,
        check_resolution: Optional[float] = None,
    ):
        if check_resolution is None:
            check_resolution = default_check_resolution(env)
        if check_resolution <= 0:
            raise ValueError("check_resolution must be positive")
        self.env = env
        self.model = model
        self.check_resolution = check_resolution
        self._state_checks = 0
        self._occupied_rects: Optional[np.ndarray] = None

    @property
    def state_checks(self) -> int:
        return self._state_checks

    def clone(self) -> "ValidityChecker":
        """Fresh checker over the same environment with a zeroed counter."""
        return ValidityChecker(self.env, self.model, self.check_resolution)

    # -- state validity -------------------------------------------------

    def is_state_valid(self, pose: Pose) -> bool:
        self._state_checks += 1
        env = self.env
        if self.model.is_point:
            if isinstance(env, GridEnv):
                if not env.in_bounds(pose.x, pose.y):
                    return False
                col, row = env.cell_of(pose.x, pose.y)
                return not env.is_cell_occupied(
                    min(col, env.width - 1), min(row, env.height - 1)
                )
            if not env.in_bounds(pose.x, pose.y):
                return False
            return not any(
                obs.contains_point((pose.x, pose.y)) for obs in env.obstacles
            )

        footprint = transform_polygon(self.model.footprint, Transform.from_pose(pose))
        bx0, by0, bx1, by1 = footprint.bounding_box()
        ex0, ey0, ex1, ey1 = env.bounds
        if bx0 < ex0 or by0 < ey0 or bx1 > ex1 or by1 > ey1:
            return False
        if isinstance(env, GridEnv):
            cs = env.cell_size
            c0 = max(0, int(bx0 // cs))
            c1 = min(env.width - 1, int(bx1 // cs))
            r0 = max(0, int(by0 // cs))
            r1 = min(env.height - 1, int(by1 // cs))
            for row in range(r0, r1 + 1):
                for col in range(c0, c1 + 1):
                    if env.occupancy[row, col] and polygons_intersect(
                        footprint,
                        ConvexPolygon.rectangle(
                            col * cs, row * cs, (col + 1) * cs, (row + 1) * cs
                        ),
                    ):
                        return False
            return True
        return not any(polygons_intersect(footprint, obs) for obs in env.obstacles)

    def is_path_valid(self, path: SteeredPath) -> bool:
        """Check every sample at the checker's resolution, short-circuiting
        on the first violation."""
        for sample in path.resample(self.check_resolution):
            if not self.is_state_valid(sample.pose):
                return False
        return True

    # -- clearance -------------------------------------------------------

    def _occupied_cell_rects(self) -> np.ndarray:
        if self._occupied_rects is None:
            env = self.env
            cells = np.argwhere(env.occupancy)  # (row, col)
            cs = env.cell_size
            rects = np.empty((len(cells), 4))
            rects[:, 0] = cells[:, 1] * cs  # x0
            rects[:, 1] = cells[:, 0] * cs  # y0
            rects[:, 2] = rects[:, 0] + cs
            rects[:, 3] = rects[:, 1] + cs
            self._occupied_rects = rects
        return self._occupied_rects

    def clearance(self, point: Tuple[float, float]) -> float:
        """Distance to the nearest obstacle, capped by the bounds distance."""
        px, py = point
        env = self.env
        x0, y0, x1, y1 = env.bounds
        if not (x0 <= px <= x1 and y0 <= py <= y1):
            raise ValueError(f"point {point!r} is outside the environment bounds")
        bound_dist = min(px - x0, x1 - px, py - y0, y1 - py)
        if isinstance(env, GridEnv):
            rects = self._occupied_cell_rects()
            if len(rects) == 0:
                obstacle_dist = math.hypot(x1 - x0, y1 - y0)
            else:
                dx = np.maximum(np.maximum(rects[:, 0] - px, px - rects[:, 2]), 0.0)
                dy = np.maximum(np.maximum(rects[:, 1] - py, py - rects[:, 3]), 0.0)
                obstacle_dist = float(np.min(np.hypot(dx, dy)))
        else:
            if env.obstacles:
                obstacle_dist = min(
                    obs.boundary_distance((px, py)) for obs in env.obstacles
                )
            else:
                obstacle_dist = math.hypot(x1 - x0, y1 - y0)
        return min(obstacle_dist, bound_dist)
