"""RRT and RRT* (optionally informed) with steer-function extensions."""

from __future__ import annotations

import math
import time
from typing import Dict, List, Optional

from ..geom import Pose
from ..rng import make_rng
from ..steer import SteeredPath, concatenate_paths
from .nn import Se2NearestNeighbors
from .types import (
    Budget,
    PlannerParams,
    PlanningProblem,
    PlanResult,
    PlanStatus,
    endpoints_valid,
    sample_uniform_pose,
)

_RRT_STREAM = 0x8871
_RRT_STAR_STREAM = 0x8872


def informed_sample_ok(start: Pose, goal: Pose, sample: Pose, c_best: float) -> bool:
    """Admissible ellipse bound: a sample can only improve the incumbent if
    the euclidean lower bound through it beats the incumbent cost."""
    lb = start.distance_to(sample) + sample.distance_to(goal)
    return lb <= c_best


def _extend(problem: PlanningProblem, params: PlannerParams, from_pose: Pose, target: Pose):
    path = problem.steer(from_pose, target)
    if path is None:
        return None
    if path.length > params.max_steer_extension:
        path = path.truncated(
            params.max_steer_extension, problem.steer_config.sample_resolution
        )
    if path.length <= 1e-9:
        return None
    return path


def rrt_plan(problem: PlanningProblem, params: PlannerParams, deadline: float) -> PlanResult:
    """Classic RRT: terminates at the first tree node within goal tolerance."""
    budget = Budget(deadline, params.max_iterations)
    if not endpoints_valid(problem):
        return PlanResult(
            PlanStatus.START_OR_GOAL_INVALID,
            total_time=budget.elapsed(),
            state_checks=problem.checker.state_checks,
        )
    rng = make_rng(params.rng_seed, _RRT_STREAM)
    scenario = problem.scenario
    bounds = scenario.env.bounds

    nn = Se2NearestNeighbors(problem.steer_config.turning_radius)
    nn.add(scenario.start)
    parents: List[int] = [0]
    edges: List[Optional[SteeredPath]] = [None]

    iterations = 0
    while not budget.expired(iterations):
        iterations += 1
        target = (
            scenario.goal
            if rng.random() < params.goal_bias
            else sample_uniform_pose(bounds, rng)
        )
        near_i, _ = nn.nearest(target)
        path = _extend(problem, params, nn.poses[near_i], target)
        if path is None or not problem.checker.is_path_valid(path):
            continue
        new_i = nn.add(path.end_pose)
        parents.append(near_i)
        edges.append(path)
        if problem.near_goal(path.end_pose):
            chain = []
            node = new_i
            while node != 0:
                chain.append(edges[node])
                node = parents[node]
            solution = concatenate_paths(list(reversed(chain)))
            elapsed = budget.elapsed()
            return PlanResult(
                PlanStatus.SOLVED,
                path=solution,
                time_to_first_solution=elapsed,
                total_time=elapsed,
                iterations=iterations,
                state_checks=problem.checker.state_checks,
                solution_history=[(elapsed, solution.length)],
            )
    return PlanResult(
        PlanStatus.TIMEOUT,
        total_time=budget.elapsed(),
        iterations=iterations,
        state_checks=problem.checker.state_checks,
    )


def rrt_star_plan(
    problem: PlanningProblem,
    params: PlannerParams,
    deadline: float,
    informed: bool = False,
) -> PlanResult:
    """Anytime RRT*: best-parent choice and rewiring by steer-path cost;
    optional informed sample rejection once an incumbent solution exists."""
    budget = Budget(deadline, params.max_iterations)
    if not endpoints_valid(problem):
        return PlanResult(
            PlanStatus.START_OR_GOAL_INVALID,
            total_time=budget.elapsed(),
            state_checks=problem.checker.state_checks,
        )
    rng = make_rng(params.rng_seed, _RRT_STAR_STREAM)
    scenario = problem.scenario
    bounds = scenario.env.bounds

    nn = Se2NearestNeighbors(problem.steer_config.turning_radius)
    nn.add(scenario.start)
    parents: List[int] = [0]
    edges: List[Optional[SteeredPath]] = [None]
    costs: List[float] = [0.0]
    children: Dict[int, List[int]] = {0: []}

    goal_nodes: List[int] = []
    best_cost = math.inf
    history: List = []
    first_time: Optional[float] = None
    iterations = 0

    def propagate(root: int, delta: float):
        stack = [root]
        while stack:
            u = stack.pop()
            for v in children.get(u, ()):
                costs[v] += delta
                stack.append(v)

    while not budget.expired(iterations):
        iterations += 1
        target = (
            scenario.goal
            if rng.random() < params.goal_bias
            else sample_uniform_pose(bounds, rng)
        )
        if (
            informed
            and best_cost < math.inf
            and not informed_sample_ok(scenario.start, scenario.goal, target, best_cost)
        ):
            continue
        near_i, _ = nn.nearest(target)
        path = _extend(problem, params, nn.poses[near_i], target)
        if path is None or not problem.checker.is_path_valid(path):
            continue
        new_pose = path.end_pose

        k = params.rewire_neighbors or max(
            1, math.ceil(params.k_rrt * math.log(len(nn) + 1))
        )
        neighbor_ids = nn.nearest_k(new_pose, k)

        # best collision-free parent among the near set (nearest included);
        # euclidean distance lower-bounds any steer length, pruning most steers
        best_parent, best_edge = near_i, path
        best_through = costs[near_i] + path.length
        for nb in neighbor_ids:
            if nb == near_i:
                continue
            if costs[nb] + nn.poses[nb].distance_to(new_pose) >= best_through:
                continue
            cand = problem.steer(nn.poses[nb], new_pose)
            if cand is None or cand.length <= 1e-9:
                continue
            through = costs[nb] + cand.length
            if through < best_through and problem.checker.is_path_valid(cand):
                best_parent, best_edge, best_through = nb, cand, through

        new_i = nn.add(new_pose)
        parents.append(best_parent)
        edges.append(best_edge)
        costs.append(best_through)
        children[new_i] = []
        children[best_parent].append(new_i)

        # rewire the neighborhood through the new node
        for nb in neighbor_ids:
            if nb == best_parent or nb == 0:
                continue
            if costs[new_i] + new_pose.distance_to(nn.poses[nb]) >= costs[nb]:
                continue
            cand = problem.steer(new_pose, nn.poses[nb])
            if cand is None or cand.length <= 1e-9:
                continue
            through = costs[new_i] + cand.length
            if through + 1e-12 < costs[nb] and problem.checker.is_path_valid(cand):
                children[parents[nb]].remove(nb)
                children[new_i].append(nb)
                delta = through - costs[nb]
                parents[nb] = new_i
                edges[nb] = cand
                costs[nb] += delta
                propagate(nb, delta)

        if problem.near_goal(new_pose):
            goal_nodes.append(new_i)
        if goal_nodes:
            incumbent = min(costs[g] for g in goal_nodes)
            if incumbent < best_cost - 1e-9:
                best_cost = incumbent
                t = budget.elapsed()
                if first_time is None:
                    first_time = t
                history.append((t, incumbent))

    total = budget.elapsed()
    if not goal_nodes:
        return PlanResult(
            PlanStatus.TIMEOUT,
            total_time=total,
            iterations=iterations,
            state_checks=problem.checker.state_checks,
        )
    best_goal = min(goal_nodes, key=lambda g: costs[g])
    chain = []
    node = best_goal
    while node != 0:
        chain.append(edges[node])
        node = parents[node]
    solution = concatenate_paths(list(reversed(chain)))
    return PlanResult(
        PlanStatus.SOLVED,
        path=solution,
        time_to_first_solution=first_time,
        total_time=total,
        iterations=iterations,
        state_checks=problem.checker.state_checks,
        solution_history=history,
    )
