"""PRM and PRM* roadmap planners with anytime growth."""

from __future__ import annotations

import heapq
import math
from typing import Dict, List, Optional, Tuple

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

_PRM_STREAM = 0x9173
_SEARCH_EVERY = 25  # roadmap insertions between graph searches


def _dijkstra(adjacency, source: int, target: int) -> Optional[List[int]]:
    dist = {source: 0.0}
    prev: Dict[int, int] = {}
    heap: List[Tuple[float, int]] = [(0.0, source)]
    seen = set()
    while heap:
        d, u = heapq.heappop(heap)
        if u in seen:
            continue
        seen.add(u)
        if u == target:
            node, chain = target, [target]
            while node != source:
                node = prev[node]
                chain.append(node)
            return list(reversed(chain))
        for v, w in adjacency.get(u, ()):
            nd = d + w
            if nd < dist.get(v, math.inf):
                dist[v] = nd
                prev[v] = u
                heapq.heappush(heap, (nd, v))
    return None


def prm_plan(
    problem: PlanningProblem,
    params: PlannerParams,
    deadline: float,
    star: bool = False,
) -> PlanResult:
    """Grow a roadmap of uniformly sampled valid poses until the budget ends,
    answering with uniform-cost search over steer-path costs.

    Plain PRM connects each node to its roadmap_k nearest neighbors; PRM*
    uses k = ceil(k_prm * log n). Edges are directed steer paths, checked
    per direction, so asymmetric steer functions stay correct.
    """
    budget = Budget(deadline, params.max_iterations)
    if not endpoints_valid(problem):
        return PlanResult(
            PlanStatus.START_OR_GOAL_INVALID,
            total_time=budget.elapsed(),
            state_checks=problem.checker.state_checks,
        )
    if not star and params.roadmap_k < 1:
        return PlanResult(
            PlanStatus.NOT_SOLVED,
            total_time=budget.elapsed(),
            state_checks=problem.checker.state_checks,
        )

    rng = make_rng(params.rng_seed, _PRM_STREAM)
    scenario = problem.scenario
    bounds = scenario.env.bounds

    nn = Se2NearestNeighbors(problem.steer_config.turning_radius)
    adjacency: Dict[int, List[Tuple[int, float]]] = {}
    edge_paths: Dict[Tuple[int, int], SteeredPath] = {}

    def connect(new_i: int, neighbor_ids: List[int]):
        adjacency.setdefault(new_i, [])
        for nb in neighbor_ids:
            if nb == new_i:
                continue
            out = problem.steer(nn.poses[new_i], nn.poses[nb])
            if out is not None and out.length > 1e-9 and problem.checker.is_path_valid(out):
                adjacency[new_i].append((nb, out.length))
                edge_paths[(new_i, nb)] = out
            back = problem.steer(nn.poses[nb], nn.poses[new_i])
            if (
                back is not None
                and back.length > 1e-9
                and problem.checker.is_path_valid(back)
            ):
                adjacency.setdefault(nb, []).append((new_i, back.length))
                edge_paths[(nb, new_i)] = back

    def k_for(n: int) -> int:
        if star:
            return max(1, math.ceil(params.k_prm * math.log(n + 1)))
        return params.roadmap_k

    start_i = nn.add(scenario.start)
    adjacency[start_i] = []
    goal_i = nn.add(scenario.goal)
    connect(goal_i, [start_i])

    history: List[Tuple[float, float]] = []
    best_len = math.inf
    best_path: Optional[SteeredPath] = None
    first_time: Optional[float] = None
    iterations = 0
    since_search = 0

    def search():
        nonlocal best_len, best_path, first_time
        chain = _dijkstra(adjacency, start_i, goal_i)
        if chain is None:
            return
        paths = [edge_paths[(a, b)] for a, b in zip(chain, chain[1:])]
        solution = concatenate_paths(paths)
        if solution.length < best_len - 1e-9:
            best_len = solution.length
            best_path = solution
            t = budget.elapsed()
            if first_time is None:
                first_time = t
            history.append((t, best_len))

    while not budget.expired(iterations):
        iterations += 1
        pose = sample_uniform_pose(bounds, rng)
        if not problem.checker.is_state_valid(pose):
            continue
        new_i = nn.add(pose)
        connect(new_i, nn.nearest_k(pose, k_for(len(nn)) + 1))
        since_search += 1
        if since_search >= _SEARCH_EVERY:
            since_search = 0
            search()
    search()

    total = budget.elapsed()
    if best_path is None:
        return PlanResult(
            PlanStatus.TIMEOUT,
            total_time=total,
            iterations=iterations,
            state_checks=problem.checker.state_checks,
        )
    return PlanResult(
        PlanStatus.SOLVED,
        path=best_path,
        time_to_first_solution=first_time,
        total_time=total,
        iterations=iterations,
        state_checks=problem.checker.state_checks,
        solution_history=history,
    )
