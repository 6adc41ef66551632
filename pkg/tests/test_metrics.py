import math

import numpy as np
import pytest

from wheelbench.collision import CollisionModel, ValidityChecker
from wheelbench.env import GridEnv, Scenario
from wheelbench.geom import Pose, Transform
from wheelbench.metrics import (
    MetricsRecord,
    count_cusps,
    curvature_stats,
    evaluate,
    mean_path_clearance,
    path_length,
)
from wheelbench.planners import PlannerParams, PlanningProblem, PlanResult, PlanStatus, rrt_plan
from wheelbench.steer import (
    SegmentDescriptor,
    SegmentKind,
    SteerConfig,
    SteeredPath,
    concatenate_paths,
    dubins_steer,
    posq_steer,
    reeds_shepp_steer,
)

CFG = SteerConfig()


def seg_path(start, segs, res=0.05):
    return SteeredPath.from_segments(start, segs, res)


def transform_path(path, t: Transform):
    start = Pose(*t.apply((path.start.x, path.start.y)), path.start.theta + t.rotation)
    return SteeredPath.from_segments(start, path.segments, 0.05)


class TestPathLength:
    def test_straight(self):
        p = seg_path(Pose(0, 0, 0), [SegmentDescriptor(SegmentKind.STRAIGHT, 5.0)])
        assert path_length(p) == pytest.approx(5.0)

    def test_quarter_arc_radius_two(self):
        p = seg_path(
            Pose(0, 0, 0), [SegmentDescriptor(SegmentKind.LEFT_ARC, 2 * math.pi / 2, 0.5)]
        )
        assert path_length(p) == pytest.approx(math.pi)

    def test_matches_rs_solver(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            a = Pose(*rng.uniform(-4, 4, 2), rng.uniform(-3, 3))
            b = Pose(*rng.uniform(-4, 4, 2), rng.uniform(-3, 3))
            p = reeds_shepp_steer(a, b, CFG)
            assert path_length(p) == pytest.approx(
                sum(abs(s.signed_length) for s in p.segments), abs=1e-6
            )

    def test_additive_under_concatenation(self):
        a = dubins_steer(Pose(0, 0, 0), Pose(4, 2, 1.0), CFG)
        b = dubins_steer(Pose(4, 2, 1.0), Pose(8, 0, 0.0), CFG)
        assert path_length(concatenate_paths([a, b])) == pytest.approx(
            path_length(a) + path_length(b)
        )


class TestCurvature:
    def test_straight_is_flat(self):
        p = seg_path(Pose(0, 0, 0), [SegmentDescriptor(SegmentKind.STRAIGHT, 5.0)])
        stats = curvature_stats(p)
        assert stats.mean == 0 and stats.max == 0

    def test_circle_radius_two(self):
        p = seg_path(
            Pose(0, 0, 0),
            [SegmentDescriptor(SegmentKind.LEFT_ARC, 2 * 2 * math.pi, 0.5)],
            res=0.05,
        )
        stats = curvature_stats(p)
        assert stats.mean == pytest.approx(0.5, rel=0.02)
        assert stats.max == pytest.approx(0.5, rel=0.02)

    def test_rs_respects_curvature_bound(self):
        rng = np.random.default_rng(1)
        for _ in range(30):
            a = Pose(*rng.uniform(-4, 4, 2), rng.uniform(-3, 3))
            b = Pose(*rng.uniform(-4, 4, 2), rng.uniform(-3, 3))
            p = reeds_shepp_steer(a, b, CFG)
            assert curvature_stats(p).max <= 1.0 * 1.05

    def test_degenerate_flagged(self):
        p = seg_path(Pose(0, 0, 0), [])
        stats = curvature_stats(p)
        assert stats.degenerate and stats.mean == 0 and stats.max == 0

    def test_rigid_transform_invariant(self):
        solved = reeds_shepp_steer(Pose(0, 0, 0), Pose(2, 1.5, 2.0), CFG)
        # rebuild at the same sampling resolution the transform helper uses
        p = SteeredPath.from_segments(solved.start, solved.segments, 0.05)
        moved = transform_path(p, Transform((13.0, -4.0), 1.1))
        a, b = curvature_stats(p), curvature_stats(moved)
        assert a.mean == pytest.approx(b.mean, rel=1e-6)
        assert a.max == pytest.approx(b.max, rel=1e-6)
        assert count_cusps(p) == count_cusps(moved)


class TestCusps:
    def test_dubins_forward_only(self):
        p = dubins_steer(Pose(0, 0, 0), Pose(3, 3, 1.0), CFG)
        assert count_cusps(p) == 0

    def test_out_and_back(self):
        p = seg_path(
            Pose(0, 0, 0),
            [
                SegmentDescriptor(SegmentKind.STRAIGHT, 2.0),
                SegmentDescriptor(SegmentKind.STRAIGHT, -1.0),
            ],
        )
        assert count_cusps(p) == 1

    def test_sign_pattern(self):
        p = seg_path(
            Pose(0, 0, 0),
            [
                SegmentDescriptor(SegmentKind.LEFT_ARC, 1.0, 1.0),
                SegmentDescriptor(SegmentKind.RIGHT_ARC, -1.0, -1.0),
                SegmentDescriptor(SegmentKind.STRAIGHT, 1.0),
            ],
        )
        assert count_cusps(p) == 2


class TestClearanceMetric:
    def test_corridor_centerline(self):
        occ = np.ones((20, 20), dtype=bool)
        occ[8:12, :] = False  # 4 m corridor, centerline y = 10
        env = GridEnv(20, 20, occ)
        checker = ValidityChecker(env, CollisionModel.point())
        p = seg_path(Pose(2, 10, 0), [SegmentDescriptor(SegmentKind.STRAIGHT, 14.0)])
        assert mean_path_clearance(p, checker) == pytest.approx(2.0)

    def test_empty_env_finite(self):
        env = GridEnv(10, 10, np.zeros((10, 10), dtype=bool))
        checker = ValidityChecker(env, CollisionModel.point())
        p = seg_path(Pose(2, 5, 0), [SegmentDescriptor(SegmentKind.STRAIGHT, 6.0)])
        value = mean_path_clearance(p, checker)
        assert 0 < value <= 5.0

    def test_tangent_sample_zero_min(self):
        occ = np.zeros((10, 10), dtype=bool)
        occ[5, 5] = True  # cell [5,6]x[5,6]
        env = GridEnv(10, 10, occ)
        checker = ValidityChecker(env, CollisionModel.point())
        p = seg_path(Pose(2, 5, 0), [SegmentDescriptor(SegmentKind.STRAIGHT, 6.0)])
        clearances = [checker.clearance(s.pose.position) for s in p.samples]
        assert min(clearances) == 0.0
        assert mean_path_clearance(p, checker) > 0


class TestIntegratedRefinement:
    def test_resampled_length_stable(self):
        p = posq_steer(Pose(0, 0, 0), Pose(4, 3, 1.0), CFG)

        def chord_length(res):
            samples = p.resample(res)
            return sum(
                a.pose.distance_to(b.pose) for a, b in zip(samples, samples[1:])
            )

        coarse, fine = chord_length(0.1), chord_length(0.01)
        assert abs(coarse - fine) / fine < 0.005


class TestEvaluate:
    def _problem(self):
        env = GridEnv(20, 20, np.zeros((20, 20), dtype=bool))
        sc = Scenario("e", env, Pose(2, 2, 0), Pose(17, 17, 0))
        checker = ValidityChecker(env, CollisionModel.point())
        return PlanningProblem(sc, checker, reeds_shepp_steer, CFG, (0.5, 0.5))

    def test_not_solved_all_absent(self):
        problem = self._problem()
        rec = evaluate(PlanResult(PlanStatus.TIMEOUT, total_time=1.0), problem)
        assert rec.found is False
        assert rec.length is None and rec.cusps is None
        assert rec.mean_clearance is None

    def test_solved_exact(self):
        problem = self._problem()
        result = rrt_plan(problem, PlannerParams(rng_seed=5), 10.0)
        rec = evaluate(result, problem)
        assert rec.found and rec.collision_free and rec.exact
        assert rec.length == pytest.approx(result.path.length)
        assert rec.state_checks == result.state_checks

    def test_solved_but_not_exact(self):
        problem = self._problem()
        path = reeds_shepp_steer(Pose(2, 2, 0), Pose(15, 15, 0), CFG)
        result = PlanResult(PlanStatus.SOLVED, path=path, total_time=0.5)
        rec = evaluate(result, problem)
        assert rec.found and not rec.exact

    def test_invariant_exact_implies_found(self):
        rec = MetricsRecord.not_found()
        assert not rec.exact or rec.found
