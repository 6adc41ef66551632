"""Theta* over grid cell centers with steer-function line-of-sight tests.

The classic any-angle parent shortcut is kept, but both the shortcut test
and every edge use the configured steer function: an edge is usable iff
the steer path between the two poses is collision-free, and g-values are
steer-path lengths. Cell headings follow the direction of travel from the
assigned parent; start and goal keep their scenario headings.
"""

from __future__ import annotations

import heapq
import math
from typing import Dict, List, Optional, Tuple

from ..env import GridEnv
from ..geom import Pose
from ..steer import SteeredPath, concatenate_paths
from .types import (
    Budget,
    EnvUnsupported,
    PlannerParams,
    PlanningProblem,
    PlanResult,
    PlanStatus,
    endpoints_valid,
)

Cell = Tuple[int, int]

_NEIGHBORS = ((1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (1, -1), (-1, 1), (-1, -1))


def theta_star_plan(
    problem: PlanningProblem, params: PlannerParams, deadline: float
) -> PlanResult:
    env = problem.scenario.env
    if not isinstance(env, GridEnv):
        raise EnvUnsupported("theta* requires a grid environment")
    budget = Budget(deadline, params.max_iterations)
    if not endpoints_valid(problem):
        return PlanResult(
            PlanStatus.START_OR_GOAL_INVALID,
            total_time=budget.elapsed(),
            state_checks=problem.checker.state_checks,
        )

    scenario = problem.scenario
    start_cell = env.cell_of(scenario.start.x, scenario.start.y)
    goal_cell = env.cell_of(scenario.goal.x, scenario.goal.y)
    gx, gy = scenario.goal.x, scenario.goal.y

    g: Dict[Cell, float] = {start_cell: 0.0}
    parent: Dict[Cell, Cell] = {start_cell: start_cell}
    pose: Dict[Cell, Pose] = {start_cell: scenario.start}
    edge: Dict[Cell, SteeredPath] = {}
    closed = set()
    counter = 0
    heap: List[Tuple[float, int, Cell]] = []

    def heuristic(cell: Cell) -> float:
        cx, cy = env.cell_center(*cell)
        return math.hypot(gx - cx, gy - cy)

    heapq.heappush(heap, (heuristic(start_cell), counter, start_cell))
    iterations = 0
    solved = False

    while heap:
        if budget.expired(iterations):
            break
        iterations += 1
        _, _, s = heapq.heappop(heap)
        if s in closed:
            continue
        closed.add(s)
        if s == goal_cell:
            solved = True
            break
        for dc, dr in _NEIGHBORS:
            n = (s[0] + dc, s[1] + dr)
            if n in closed or env.is_cell_occupied(*n):
                continue
            relaxed = False
            for p in (parent[s], s):  # any-angle shortcut first
                if p == n:
                    continue
                if n == goal_cell:
                    n_pose = scenario.goal
                else:
                    px, py = pose[p].x, pose[p].y
                    cx, cy = env.cell_center(*n)
                    n_pose = Pose(cx, cy, math.atan2(cy - py, cx - px))
                path = problem.steer(pose[p], n_pose)
                if path is None or not problem.checker.is_path_valid(path):
                    continue
                candidate = g[p] + path.length
                if candidate < g.get(n, math.inf) - 1e-12:
                    g[n] = candidate
                    parent[n] = p
                    pose[n] = n_pose
                    edge[n] = path
                    counter += 1
                    heapq.heappush(heap, (candidate + heuristic(n), counter, n))
                    relaxed = True
                if relaxed:
                    break

    total = budget.elapsed()
    if not solved:
        status = PlanStatus.TIMEOUT if heap and budget.expired(iterations) else PlanStatus.NOT_SOLVED
        return PlanResult(
            status,
            total_time=total,
            iterations=iterations,
            state_checks=problem.checker.state_checks,
        )
    chain = []
    node = goal_cell
    while node != start_cell:
        chain.append(edge[node])
        node = parent[node]
    solution = concatenate_paths(list(reversed(chain)))
    return PlanResult(
        PlanStatus.SOLVED,
        path=solution,
        time_to_first_solution=total,
        total_time=total,
        iterations=iterations,
        state_checks=problem.checker.state_checks,
        solution_history=[(total, solution.length)],
    )
