"""Planner suite: RRT, RRT*/Informed RRT*, PRM/PRM*, Theta*, lattice search.

Planners are registered by name so additional algorithms can be plugged in
without touching the harness. Every run owns its RNG, checker and data
structures; nothing is shared between concurrent runs.
"""

from .types import (
    Budget,
    EnvUnsupported,
    PlannerParams,
    PlanningProblem,
    PlanResult,
    PlanStatus,
)
from .rrt import informed_sample_ok, rrt_plan, rrt_star_plan
from .prm import prm_plan
from .theta_star import theta_star_plan
from .lattice import lattice_plan

PLANNERS = {
    "rrt": lambda p, params, deadline: rrt_plan(p, params, deadline),
    "rrt-star": lambda p, params, deadline: rrt_star_plan(
        p, params, deadline, informed=False
    ),
    "informed-rrt-star": lambda p, params, deadline: rrt_star_plan(
        p, params, deadline, informed=True
    ),
    "prm": lambda p, params, deadline: prm_plan(p, params, deadline, star=False),
    "prm-star": lambda p, params, deadline: prm_plan(p, params, deadline, star=True),
    "theta-star": lambda p, params, deadline: theta_star_plan(p, params, deadline),
    "lattice": lambda p, params, deadline: lattice_plan(p, params, deadline),
}


def get_planner(name: str):
    try:
        return PLANNERS[name]
    except KeyError:
        raise KeyError(f"unknown planner {name!r}; known: {sorted(PLANNERS)}") from None


def register_planner(name: str, fn) -> None:
    """Add a planner callable (problem, params, deadline) -> PlanResult."""
    PLANNERS[name] = fn


__all__ = [
    "Budget",
    "EnvUnsupported",
    "PLANNERS",
    "PlanResult",
    "PlanStatus",
    "PlannerParams",
    "PlanningProblem",
    "get_planner",
    "informed_sample_ok",
    "lattice_plan",
    "prm_plan",
    "register_planner",
    "rrt_plan",
    "rrt_star_plan",
    "theta_star_plan",
]
