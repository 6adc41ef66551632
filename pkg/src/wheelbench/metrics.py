"""Quality metrics computed on solution paths.

Curvature is estimated discretely per maximal same-direction run so the
heading flip at a reversal shows up in the cusp count, never as infinite
curvature. Absent values stay None (serialized as nulls, not zeros).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, NamedTuple, Optional, Sequence

from .collision import ValidityChecker
from .geom import normalize_angle
from .steer import PathSample, SteeredPath


class CurvatureStats(NamedTuple):
    mean: float
    max: float
    degenerate: bool = False


@dataclass(frozen=True)
class MetricsRecord:
    found: bool
    collision_free: bool
    exact: bool
    length: Optional[float]
    mean_curvature: Optional[float]
    max_curvature: Optional[float]
    cusps: Optional[int]
    mean_clearance: Optional[float]
    planning_time: Optional[float]
    state_checks: int

    def to_dict(self) -> dict:
        return {
            "found": self.found,
            "collision_free": self.collision_free,
            "exact": self.exact,
            "length": self.length,
            "mean_curvature": self.mean_curvature,
            "max_curvature": self.max_curvature,
            "cusps": self.cusps,
            "mean_clearance": self.mean_clearance,
            "planning_time": self.planning_time,
            "state_checks": self.state_checks,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "MetricsRecord":
        return cls(**{k: doc.get(k) for k in cls.__dataclass_fields__})

    @classmethod
    def not_found(cls, planning_time=None, state_checks=0) -> "MetricsRecord":
        return cls(
            found=False,
            collision_free=False,
            exact=False,
            length=None,
            mean_curvature=None,
            max_curvature=None,
            cusps=None,
            mean_clearance=None,
            planning_time=planning_time,
            state_checks=state_checks,
        )


def path_length(path: SteeredPath) -> float:
    """Total arc length: |signed segment lengths|, chord sums when integrated."""
    return path.length


def _direction_runs(samples: Sequence[PathSample]) -> List[List[PathSample]]:
    runs: List[List[PathSample]] = [[samples[0]]]
    for prev, cur in zip(samples, samples[1:]):
        if cur.direction != prev.direction:
            runs.append([cur])
        else:
            runs[-1].append(cur)
    return runs


def curvature_stats(path: SteeredPath) -> CurvatureStats:
    """Arc-length-weighted mean and max of |d heading / d arc length|.

    Estimated centrally at interior samples of each same-direction run;
    cusp points separate runs and contribute no curvature.
    """
    samples = path.samples
    if len(samples) < 3:
        return CurvatureStats(0.0, 0.0, degenerate=True)
    weighted = 0.0
    weight = 0.0
    peak = 0.0
    for run in _direction_runs(samples):
        for a, b, c in zip(run, run[1:], run[2:]):
            ds = c.arc_length - a.arc_length
            if ds <= 1e-12:
                continue
            dtheta = abs(normalize_angle(c.pose.theta - a.pose.theta))
            kappa = dtheta / ds
            weighted += kappa * ds
            weight += ds
            if kappa > peak:
                peak = kappa
    if weight == 0.0:
        return CurvatureStats(0.0, 0.0, degenerate=True)
    return CurvatureStats(weighted / weight, peak)


def count_cusps(path: SteeredPath) -> int:
    """Number of driving-direction reversals along the sampled path."""
    return sum(
        1
        for a, b in zip(path.samples, path.samples[1:])
        if a.direction != b.direction
    )


def mean_path_clearance(path: SteeredPath, checker: ValidityChecker) -> float:
    """Arithmetic mean of the clearance at every sample position."""
    values = [checker.clearance(s.pose.position) for s in path.samples]
    return sum(values) / len(values)


def evaluate(result, problem) -> MetricsRecord:
    """Build the metrics row for one planner result.

    Re-validates the path with a fresh checker so the planner's state-check
    counter is reported untouched.
    """
    from .planners import PlanStatus  # local import to avoid a cycle

    if result.status is not PlanStatus.SOLVED or result.path is None:
        return MetricsRecord.not_found(
            planning_time=result.total_time, state_checks=result.state_checks
        )
    path = result.path
    checker = problem.checker.clone()
    collision_free = checker.is_path_valid(path)
    pos_tol, heading_tol = problem.goal_tolerance
    end = path.end_pose
    exact = (
        end.distance_to(problem.scenario.goal) <= pos_tol
        and abs(normalize_angle(end.theta - problem.scenario.goal.theta)) <= heading_tol
    )
    stats = curvature_stats(path)
    return MetricsRecord(
        found=True,
        collision_free=collision_free,
        exact=exact,
        length=path_length(path),
        mean_curvature=stats.mean,
        max_curvature=stats.max,
        cusps=count_cusps(path),
        mean_clearance=mean_path_clearance(path, checker),
        planning_time=result.total_time,
        state_checks=result.state_checks,
    )
