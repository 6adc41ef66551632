"""State-lattice search: weighted A* over forward-propagated motion
primitives with an anytime decreasing-inflation schedule.

States discretize SE(2) into (cell x, cell y, heading bin). Every state is
represented by its canonical pose (cell center, bin center) and primitives
are propagated from that representative, so the search graph is a fixed
function of the environment and start pose: any optimal search on it finds
the same cost. The assembled solution keeps each edge's exact geometry and
carries the per-step snap jump between an edge endpoint and the next
representative (bounded by half a cell diagonal plus half a heading bin).

With inflation w = 1 the heuristic (euclidean distance) is consistent and
the search is optimal over the lattice.
"""

from __future__ import annotations

import heapq
import math
from typing import Dict, List, Optional, Tuple

from ..env import GridEnv
from ..geom import Pose, normalize_angle
from ..steer import (
    PathSample,
    SteeredPath,
    default_primitive_set,
    expand_primitives,
)
from .types import (
    Budget,
    EnvUnsupported,
    PlannerParams,
    PlanningProblem,
    PlanResult,
    PlanStatus,
    endpoints_valid,
)

Key = Tuple[int, int, int]


def lattice_key(pose: Pose, cell_size: float, heading_bins: int) -> Key:
    bin_width = 2.0 * math.pi / heading_bins
    b = int(round(pose.theta / bin_width)) % heading_bins
    return (int(pose.x // cell_size), int(pose.y // cell_size), b)


def representative_pose(key: Key, cell_size: float, heading_bins: int) -> Pose:
    ix, iy, b = key
    return Pose(
        (ix + 0.5) * cell_size,
        (iy + 0.5) * cell_size,
        normalize_angle(b * 2.0 * math.pi / heading_bins),
    )


def _stitch(edges: List[SteeredPath]) -> SteeredPath:
    """Concatenate edge geometries, keeping the snap discontinuity between
    an edge's endpoint and the next edge's representative start."""
    samples: List[PathSample] = list(edges[0].samples)
    segments = list(edges[0].segments)
    offset = edges[0].length
    for nxt in edges[1:]:
        for smp in nxt.samples:
            samples.append(
                PathSample(smp.pose, offset + smp.arc_length, smp.direction, smp.curvature)
            )
        segments.extend(nxt.segments)
        offset += nxt.length
    return SteeredPath(samples[0].pose, segments, offset, samples=samples)


def _expand_from(problem, key, start_key, start_pose, primitives, cell_size, bins):
    base = (
        start_pose if key == start_key else representative_pose(key, cell_size, bins)
    )
    return expand_primitives(base, primitives, cell_size / 4.0)


def _weighted_astar(problem, primitives, weight, cell_size, bins, budget, iterations):
    """One search episode; returns (edge chain or None, iterations, finished)."""
    scenario = problem.scenario
    start_key = lattice_key(scenario.start, cell_size, bins)
    goal_key = lattice_key(scenario.goal, cell_size, bins)
    gx, gy = scenario.goal.x, scenario.goal.y

    # euclidean heuristic discounted for the free snap each step gains:
    # a step of cost L displaces at most L plus half a cell diagonal, so
    # remaining cost >= euclid * L_min / (L_min + snap); this keeps the
    # heuristic consistent and w = 1 exactly optimal over the lattice
    snap = 0.5 * math.sqrt(2.0) * cell_size
    l_min = min(abs(c.v) * d for c, d in primitives)
    h_scale = l_min / (l_min + snap)

    g: Dict[Key, float] = {start_key: 0.0}
    parent: Dict[Key, Key] = {}
    edge: Dict[Key, SteeredPath] = {}
    closed = set()
    counter = 0
    heap = [
        (
            weight * h_scale * math.hypot(gx - scenario.start.x, gy - scenario.start.y),
            0,
            start_key,
        )
    ]

    while heap:
        if budget.expired(iterations):
            return None, iterations, False
        iterations += 1
        _, _, key = heapq.heappop(heap)
        if key in closed:
            continue
        closed.add(key)
        if key == goal_key:
            chain = []
            node = key
            while node != start_key:
                chain.append(edge[node])
                node = parent[node]
            return list(reversed(chain)), iterations, True
        for path in _expand_from(
            problem, key, start_key, scenario.start, primitives, cell_size, bins
        ):
            end = path.end_pose
            nk = lattice_key(end, cell_size, bins)
            if nk == key or nk in closed:
                continue
            candidate = g[key] + abs(path.length)
            if candidate >= g.get(nk, math.inf):
                continue
            if not problem.checker.is_path_valid(path):
                continue
            g[nk] = candidate
            parent[nk] = key
            edge[nk] = path
            counter += 1
            rep = representative_pose(nk, cell_size, bins)
            h = h_scale * math.hypot(gx - rep.x, gy - rep.y)
            heapq.heappush(heap, (candidate + weight * h, counter, nk))
    return None, iterations, True  # open list exhausted: lattice fully explored


def lattice_plan(
    problem: PlanningProblem, params: PlannerParams, deadline: float
) -> PlanResult:
    env = problem.scenario.env
    if not isinstance(env, GridEnv):
        raise EnvUnsupported("lattice search requires a grid environment")
    budget = Budget(deadline, params.max_iterations)
    if not endpoints_valid(problem):
        return PlanResult(
            PlanStatus.START_OR_GOAL_INVALID,
            total_time=budget.elapsed(),
            state_checks=problem.checker.state_checks,
        )
    primitives = params.lattice_primitives or default_primitive_set(
        problem.steer_config, env.cell_size
    )
    bins = params.lattice_heading_bins

    history: List[Tuple[float, float]] = []
    best: Optional[SteeredPath] = None
    first_time: Optional[float] = None
    iterations = 0
    exhausted_without_solution = False

    for weight in params.lattice_weights:
        if budget.expired(iterations):
            break
        chain, iterations, finished = _weighted_astar(
            problem, primitives, weight, env.cell_size, bins, budget, iterations
        )
        if chain is None:
            if finished:
                exhausted_without_solution = True
                break  # reachable lattice has no solution at any weight
            break  # budget ran out mid-search
        solution = _stitch(chain)
        if best is None or solution.length < best.length - 1e-12:
            best = solution
            t = budget.elapsed()
            if first_time is None:
                first_time = t
            history.append((t, solution.length))

    total = budget.elapsed()
    if best is None:
        status = PlanStatus.NOT_SOLVED if exhausted_without_solution else PlanStatus.TIMEOUT
        return PlanResult(
            status,
            total_time=total,
            iterations=iterations,
            state_checks=problem.checker.state_checks,
        )
    return PlanResult(
        PlanStatus.SOLVED,
        path=best,
        time_to_first_solution=first_time,
        total_time=total,
        iterations=iterations,
        state_checks=problem.checker.state_checks,
        solution_history=history,
    )
