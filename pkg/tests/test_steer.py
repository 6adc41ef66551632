import math

import numpy as np
import pytest

from wheelbench import Pose, SteerConfig
from wheelbench.geom import normalize_angle
from wheelbench.steer import (
    Control,
    NotConverged,
    SegmentKind,
    concatenate_paths,
    dubins_steer,
    expand_primitives,
    posq_steer,
    reeds_shepp_steer,
    sample_path,
)
from wheelbench.steer.reeds_shepp import reeds_shepp_distance

from oracles import dubins_words, reeds_shepp_oracle_lengths

CFG = SteerConfig()


def random_pose(rng, span=5.0):
    return Pose(
        rng.uniform(-span, span), rng.uniform(-span, span), rng.uniform(-np.pi, np.pi)
    )


class TestDubins:
    def test_straight_ahead(self):
        p = dubins_steer(Pose(0, 0, 0), Pose(10, 0, 0), CFG)
        assert p.length == pytest.approx(10.0)
        assert [s.kind for s in p.segments] == [SegmentKind.STRAIGHT]

    def test_identity_query(self):
        p = dubins_steer(Pose(0, 0, 0), Pose(0, 0, 0), CFG)
        assert p.length == 0
        assert p.segments == ()

    def test_half_circle(self):
        p = dubins_steer(Pose(0, 0, 0), Pose(0, 2, math.pi), CFG)
        assert p.length == pytest.approx(math.pi)
        assert [s.kind for s in p.segments] == [SegmentKind.LEFT_ARC]

    def test_forward_only(self):
        rng = np.random.default_rng(1)
        for _ in range(50):
            p = dubins_steer(random_pose(rng), random_pose(rng), CFG)
            assert all(s.direction == 1 for s in p.samples)

    def test_matches_numeric_oracle(self):
        rng = np.random.default_rng(2)
        queries = np.column_stack(
            [rng.uniform(-5, 5, 150), rng.uniform(-5, 5, 150), rng.uniform(-np.pi, np.pi, 150)]
        )
        oracle = reeds_shepp_oracle_lengths(
            queries, words=dubins_words(), nonnegative_params=True
        )
        for (x, y, th), expect in zip(queries, oracle):
            got = dubins_steer(Pose(0, 0, 0), Pose(x, y, th), CFG).length
            assert got == pytest.approx(expect, abs=1e-4)

    def test_scale_equivariance(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            a, b = random_pose(rng), random_pose(rng)
            s = rng.uniform(0.2, 5.0)
            base = dubins_steer(a, b, CFG).length
            scaled_cfg = SteerConfig(turning_radius=s, sample_resolution=0.05 * s)
            scaled = dubins_steer(
                Pose(a.x * s, a.y * s, a.theta), Pose(b.x * s, b.y * s, b.theta), scaled_cfg
            ).length
            assert scaled == pytest.approx(base * s, rel=1e-9)


class TestReedsShepp:
    def test_reverse_straight(self):
        p = reeds_shepp_steer(Pose(0, 0, 0), Pose(-5, 0, 0), CFG)
        assert p.length == pytest.approx(5.0)
        assert [s.kind for s in p.segments] == [SegmentKind.STRAIGHT]
        assert p.segments[0].signed_length == pytest.approx(-5.0)
        assert all(s.direction == -1 for s in p.samples)

    def test_identity_query(self):
        p = reeds_shepp_steer(Pose(0, 0, 0), Pose(0, 0, 0), CFG)
        assert p.length == 0

    def test_matches_numeric_oracle(self):
        rng = np.random.default_rng(4)
        queries = np.column_stack(
            [rng.uniform(-5, 5, 150), rng.uniform(-5, 5, 150), rng.uniform(-np.pi, np.pi, 150)]
        )
        oracle = reeds_shepp_oracle_lengths(queries)
        for (x, y, th), expect in zip(queries, oracle):
            got = reeds_shepp_distance(Pose(0, 0, 0), Pose(x, y, th), CFG)
            assert got == pytest.approx(expect, abs=1e-4)

    def test_symmetry(self):
        rng = np.random.default_rng(5)
        for _ in range(100):
            a, b = random_pose(rng), random_pose(rng)
            assert reeds_shepp_distance(a, b, CFG) == pytest.approx(
                reeds_shepp_distance(b, a, CFG), abs=1e-6
            )

    def test_dominated_by_dubins_and_bounded_below(self):
        rng = np.random.default_rng(6)
        for _ in range(100):
            a, b = random_pose(rng), random_pose(rng)
            rs = reeds_shepp_distance(a, b, CFG)
            du = dubins_steer(a, b, CFG).length
            assert rs <= du + 1e-9
            assert du >= a.distance_to(b) - 1e-9
            assert rs >= a.distance_to(b) - 1e-9 or rs >= 0

    def test_scale_equivariance(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            a, b = random_pose(rng), random_pose(rng)
            s = rng.uniform(0.2, 5.0)
            base = reeds_shepp_distance(a, b, CFG)
            scaled_cfg = SteerConfig(turning_radius=s, sample_resolution=0.05 * s)
            scaled = reeds_shepp_distance(
                Pose(a.x * s, a.y * s, a.theta), Pose(b.x * s, b.y * s, b.theta), scaled_cfg
            )
            assert scaled == pytest.approx(base * s, rel=1e-9)


class TestEndpointConsistency:
    @pytest.mark.parametrize("steer", [dubins_steer, reeds_shepp_steer])
    def test_exact_endpoints(self, steer):
        rng = np.random.default_rng(8)
        for _ in range(200):
            a, b = random_pose(rng), random_pose(rng)
            p = steer(a, b, CFG)
            assert p.samples[0].pose == a
            assert p.end_pose.distance_to(b) <= 1e-6
            assert abs(normalize_angle(p.end_pose.theta - b.theta)) <= 1e-6

    @pytest.mark.parametrize("steer", [dubins_steer, reeds_shepp_steer])
    def test_curvature_bound(self, steer):
        rng = np.random.default_rng(9)
        cfg = SteerConfig(turning_radius=2.0, sample_resolution=0.1)
        for _ in range(50):
            p = steer(random_pose(rng), random_pose(rng), cfg)
            for smp in p.samples:
                assert abs(smp.curvature) <= 0.5 + 1e-9

    @pytest.mark.parametrize("steer", [dubins_steer, reeds_shepp_steer])
    def test_arc_length_monotone(self, steer):
        rng = np.random.default_rng(10)
        for _ in range(30):
            p = steer(random_pose(rng), random_pose(rng), CFG)
            arcs = [s.arc_length for s in p.samples]
            assert all(b > a for a, b in zip(arcs, arcs[1:]))
            assert p.length == pytest.approx(arcs[-1])
            assert p.length == pytest.approx(
                sum(abs(s.signed_length) for s in p.segments)
            )


class TestPosq:
    def test_straight_line(self):
        p = posq_steer(Pose(0, 0, 0), Pose(5, 0, 0), CFG)
        assert p.end_pose.distance_to(Pose(5, 0, 0)) < CFG.posq_goal_eps
        assert max(abs(s.pose.y) for s in p.samples) < CFG.posq_goal_eps
        assert all(s.direction == 1 for s in p.samples)

    def test_already_at_goal(self):
        p = posq_steer(Pose(0, 0, 0), Pose(0.01, 0, 1.0), CFG)
        assert p.length == 0
        assert len(p.samples) == 1

    def test_turn_converges_monotonically(self):
        goal = Pose(0, 5, math.pi / 2)
        p = posq_steer(Pose(0, 0, 0), goal, CFG)
        rho = [s.pose.distance_to(goal) for s in p.samples]
        increases = [i for i in range(1, len(rho)) if rho[i] > rho[i - 1] + 1e-12]
        if increases:
            assert increases[-1] < 0.1 * len(rho)
        assert rho[-1] < CFG.posq_goal_eps

    def test_not_converged_raises(self):
        cfg = SteerConfig(posq_max_time=0.05)
        with pytest.raises(NotConverged):
            posq_steer(Pose(0, 0, 0), Pose(50, 0, 0), cfg)


class TestPrimitives:
    def test_straight(self):
        (p,) = expand_primitives(Pose(0, 0, 0), [(Control(1.0, 0.0), 1.0)])
        assert p.end_pose == Pose(1, 0, 0)

    def test_unit_arc(self):
        (p,) = expand_primitives(Pose(0, 0, 0), [(Control(1.0, 1.0), math.pi / 2)])
        assert p.end_pose.x == pytest.approx(1.0)
        assert p.end_pose.y == pytest.approx(1.0)
        assert p.end_pose.theta == pytest.approx(math.pi / 2)

    def test_reverse_straight(self):
        (p,) = expand_primitives(Pose(0, 0, 0), [(Control(-1.0, 0.0), 2.0)])
        assert p.end_pose == Pose(-2, 0, 0)
        assert all(s.direction == -1 for s in p.samples)

    def test_empty_set_rejected(self):
        with pytest.raises(ValueError):
            expand_primitives(Pose(0, 0, 0), [])


class TestSamplePath:
    def test_uniform_subdivision(self):
        p = dubins_steer(Pose(0, 0, 0), Pose(1, 0, 0), CFG)
        samples = sample_path(p, 0.25)
        assert [s.arc_length for s in samples] == pytest.approx([0, 0.25, 0.5, 0.75, 1.0])

    def test_zero_length(self):
        p = dubins_steer(Pose(0, 0, 0), Pose(0, 0, 0), CFG)
        samples = sample_path(p, 0.25)
        assert len(samples) == 1
        assert samples[0].pose == Pose(0, 0, 0)

    def test_spacing_and_endpoints(self):
        p = dubins_steer(Pose(0, 0, 0), Pose(4, 3, 2.0), CFG)
        samples = sample_path(p, 0.25)
        arcs = [s.arc_length for s in samples]
        assert arcs[0] == 0
        assert arcs[-1] == pytest.approx(p.length)
        assert max(b - a for a, b in zip(arcs, arcs[1:])) <= 0.25 + 1e-12
        boundaries = {0.0}
        acc = 0.0
        for seg in p.segments:
            acc += abs(seg.signed_length)
            boundaries.add(round(acc, 9))
        assert boundaries <= {round(a, 9) for a in arcs}

    def test_direction_changes_only_at_boundaries(self):
        p = reeds_shepp_steer(Pose(0, 0, 0), Pose(0.3, 0.3, 2.5), CFG)
        samples = sample_path(p, 0.05)
        boundaries = set()
        acc = 0.0
        for seg in p.segments:
            acc += abs(seg.signed_length)
            boundaries.add(round(acc, 9))
        for a, b in zip(samples, samples[1:]):
            if a.direction != b.direction:
                assert round(a.arc_length, 9) in boundaries


class TestConcatenate:
    def test_lengths_accumulate(self):
        a = dubins_steer(Pose(0, 0, 0), Pose(3, 0, 0), CFG)
        b = dubins_steer(Pose(3, 0, 0), Pose(3, 3, math.pi / 2), CFG)
        joined = concatenate_paths([a, b])
        assert joined.length == pytest.approx(a.length + b.length)
        assert joined.samples[0].pose == Pose(0, 0, 0)
        assert joined.end_pose == b.end_pose

    def test_gap_rejected(self):
        a = dubins_steer(Pose(0, 0, 0), Pose(3, 0, 0), CFG)
        b = dubins_steer(Pose(4, 0, 0), Pose(5, 0, 0), CFG)
        with pytest.raises(ValueError):
            concatenate_paths([a, b])
