"""Nearest-neighbor index for SE(2) tree and roadmap queries.

The metric is the standard planning surrogate d = |dxy| + lam * |dtheta|
with lam the turning radius. Below the rebuild threshold queries are plain
linear scans; beyond it a 2D cKDTree over positions prunes candidates, and
because |dxy| lower-bounds the metric the pruned search stays exact.
"""

from __future__ import annotations

import math
from typing import List, Sequence, Tuple

import numpy as np
from scipy.spatial import cKDTree

from ..geom import Pose, normalize_angle


class Se2NearestNeighbors:
    def __init__(self, lam: float, rebuild_threshold: int = 2000):
        if lam <= 0:
            raise ValueError("angular weight must be positive")
        self.lam = lam
        self.rebuild_threshold = rebuild_threshold
        self.poses: List[Pose] = []
        self._tree: cKDTree | None = None
        self._tree_size = 0

    def __len__(self):
        return len(self.poses)

    def add(self, pose: Pose) -> int:
        self.poses.append(pose)
        tail = len(self.poses) - self._tree_size
        if tail >= self.rebuild_threshold:
            self._tree = cKDTree([(p.x, p.y) for p in self.poses])
            self._tree_size = len(self.poses)
        return len(self.poses) - 1

    def metric(self, a: Pose, b: Pose) -> float:
        return a.distance_to(b) + self.lam * abs(normalize_angle(a.theta - b.theta))

    def _scan(self, query: Pose, indices) -> Tuple[int, float]:
        best_i, best_d = -1, math.inf
        for i in indices:
            d = self.metric(query, self.poses[i])
            if d < best_d:
                best_i, best_d = i, d
        return best_i, best_d

    def nearest(self, query: Pose) -> Tuple[int, float]:
        if not self.poses:
            raise ValueError("index is empty")
        best_i, best_d = self._scan(query, range(self._tree_size, len(self.poses)))
        if self._tree is not None:
            # any closer node must lie within euclidean distance best_d
            if best_i < 0:
                _, seed = self._tree.query((query.x, query.y))
                best_i, best_d = self._scan(query, [int(seed)])
            candidates = self._tree.query_ball_point((query.x, query.y), best_d)
            ci, cd = self._scan(query, candidates)
            if cd < best_d:
                best_i, best_d = ci, cd
        return best_i, best_d

    def near(self, query: Pose, radius: float) -> List[int]:
        """All indices within metric radius (exact)."""
        out = []
        tail = range(self._tree_size, len(self.poses))
        candidates = list(tail)
        if self._tree is not None:
            candidates += self._tree.query_ball_point((query.x, query.y), radius)
        for i in candidates:
            if self.metric(query, self.poses[i]) <= radius:
                out.append(i)
        return out

    def nearest_k(self, query: Pose, k: int) -> List[int]:
        """The k metric-nearest indices (exact), nearest first."""
        n = len(self.poses)
        if k <= 0 or n == 0:
            return []
        if self._tree is None or k >= n:
            ranked = sorted(range(n), key=lambda i: self.metric(query, self.poses[i]))
            return ranked[:k]
        kq = min(self._tree_size, k)
        _, seeds = self._tree.query((query.x, query.y), k=kq)
        seeds = np.atleast_1d(seeds).tolist()
        candidates = set(int(s) for s in seeds)
        candidates.update(range(self._tree_size, n))
        ranked = sorted(candidates, key=lambda i: self.metric(query, self.poses[i]))
        bound = self.metric(query, self.poses[ranked[min(k, len(ranked)) - 1]])
        # widen to every node whose position alone could beat the kth candidate
        widened = set(self._tree.query_ball_point((query.x, query.y), bound))
        widened.update(candidates)
        ranked = sorted(widened, key=lambda i: self.metric(query, self.poses[i]))
        return ranked[:k]
