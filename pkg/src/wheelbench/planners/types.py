"""Shared planner types: problem description, parameters, results, budgets."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from ..collision import ValidityChecker
from ..env import Scenario
from ..geom import Pose, normalize_angle
from ..steer import NotConverged, SteerConfig, SteeredPath


class EnvUnsupported(ValueError):
    """The planner cannot run on this environment representation."""


class PlanStatus(Enum):
    SOLVED = "solved"
    NOT_SOLVED = "not_solved"
    TIMEOUT = "timeout"
    START_OR_GOAL_INVALID = "start_or_goal_invalid"


@dataclass
class PlanningProblem:
    scenario: Scenario
    checker: ValidityChecker
    steer_fn: Callable[[Pose, Pose, SteerConfig], SteeredPath]
    steer_config: SteerConfig
    goal_tolerance: Tuple[float, float] = (0.5, 0.5)

    def steer(self, a: Pose, b: Pose) -> Optional[SteeredPath]:
        """Steer with unconnectable queries mapped to None."""
        try:
            return self.steer_fn(a, b, self.steer_config)
        except NotConverged:
            return None

    def near_goal(self, pose: Pose) -> bool:
        pos_tol, heading_tol = self.goal_tolerance
        goal = self.scenario.goal
        return (
            pose.distance_to(goal) <= pos_tol
            and abs(normalize_angle(pose.theta - goal.theta)) <= heading_tol
        )


@dataclass
class PlannerParams:
    """Knobs shared across the planner suite.

    max_iterations, when set, bounds the planner loop deterministically and
    usually binds before the wall-clock deadline; reproducible experiment
    configs rely on it.
    """

    goal_bias: float = 0.05
    max_steer_extension: float = 10.0
    rewire_neighbors: Optional[int] = None  # None = ceil(k_rrt * log n)
    k_rrt: float = 3.7
    roadmap_k: int = 8
    k_prm: float = 3.7
    lattice_weights: Sequence[float] = (3.0, 2.0, 1.0)
    lattice_heading_bins: int = 16
    lattice_primitives: Optional[list] = None
    rng_seed: int = 0
    max_iterations: Optional[int] = None

    def __post_init__(self):
        if not 0.0 <= self.goal_bias < 1.0:
            raise ValueError("goal_bias must be in [0, 1)")
        weights = tuple(self.lattice_weights)
        if not weights or weights[-1] < 1.0:
            raise ValueError("lattice weight schedule must end at w >= 1")
        if any(b >= a for a, b in zip(weights, weights[1:])):
            raise ValueError("lattice weight schedule must be strictly decreasing")
        if self.max_steer_extension <= 0:
            raise ValueError("max_steer_extension must be positive")


@dataclass
class PlanResult:
    status: PlanStatus
    path: Optional[SteeredPath] = None
    time_to_first_solution: Optional[float] = None
    total_time: float = 0.0
    iterations: int = 0
    state_checks: int = 0
    solution_history: List[Tuple[float, float]] = field(default_factory=list)


class Budget:
    """Cooperative stopping rule: wall-clock deadline plus an optional
    deterministic iteration cap (whichever binds first)."""

    def __init__(self, deadline: float, max_iterations: Optional[int] = None):
        if deadline <= 0:
            raise ValueError("deadline must be positive")
        self.start = time.monotonic()
        self.deadline = self.start + deadline
        self.max_iterations = max_iterations

    def elapsed(self) -> float:
        return time.monotonic() - self.start

    def expired(self, iterations: int) -> bool:
        if self.max_iterations is not None and iterations >= self.max_iterations:
            return True
        return time.monotonic() >= self.deadline


def sample_uniform_pose(bounds, rng: np.random.Generator) -> Pose:
    x0, y0, x1, y1 = bounds
    return Pose(
        rng.uniform(x0, x1),
        rng.uniform(y0, y1),
        rng.uniform(-math.pi, math.pi),
    )


def endpoints_valid(problem: PlanningProblem) -> bool:
    return problem.checker.is_state_valid(
        problem.scenario.start
    ) and problem.checker.is_state_valid(problem.scenario.goal)
