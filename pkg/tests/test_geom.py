import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wheelbench.geom import (
    ConvexPolygon,
    Pose,
    Transform,
    normalize_angle,
    point_segment_distance,
    polygons_intersect,
    transform_polygon,
)

finite_angle = st.floats(-1e6, 1e6, allow_nan=False, allow_infinity=False)


def random_convex_polygon(rng, n_min=3, n_max=8, scale=1.0, center=(0.0, 0.0)):
    """Distinct sorted angles on an ellipse give a strictly convex polygon."""
    n = int(rng.integers(n_min, n_max + 1))
    while True:
        angles = np.sort(rng.uniform(0, 2 * np.pi, n))
        if np.min(np.diff(angles, append=angles[0] + 2 * np.pi)) > 0.15:
            break
    rx = rng.uniform(0.3, 1.0) * scale
    ry = rng.uniform(0.3, 1.0) * scale
    rot = rng.uniform(0, 2 * np.pi)
    c, s = np.cos(rot), np.sin(rot)
    xs = rx * np.cos(angles)
    ys = ry * np.sin(angles)
    return ConvexPolygon(
        [(c * x - s * y + center[0], s * x + c * y + center[1]) for x, y in zip(xs, ys)]
    )


def shoelace(vertices):
    total = 0.0
    n = len(vertices)
    for i in range(n):
        x0, y0 = vertices[i]
        x1, y1 = vertices[(i + 1) % n]
        total += x0 * y1 - x1 * y0
    return 0.5 * total


class TestNormalizeAngle:
    def test_identity(self):
        assert normalize_angle(0.0) == 0.0

    def test_periodicity(self):
        assert normalize_angle(3 * math.pi) == pytest.approx(math.pi)

    def test_boundary_is_pi(self):
        assert normalize_angle(-math.pi) == pytest.approx(math.pi)

    def test_non_finite_rejected(self):
        with pytest.raises(ValueError):
            normalize_angle(float("nan"))

    @given(finite_angle)
    def test_idempotent(self, a):
        once = normalize_angle(a)
        assert normalize_angle(once) == once

    @given(finite_angle)
    def test_range_and_congruence(self, a):
        r = normalize_angle(a)
        assert -math.pi < r <= math.pi
        assert math.isclose(math.sin(r), math.sin(a), abs_tol=1e-9)
        assert math.isclose(math.cos(r), math.cos(a), abs_tol=1e-9)


class TestPose:
    def test_theta_normalized_on_construction(self):
        assert Pose(0, 0, 3 * math.pi).theta == pytest.approx(math.pi)

    def test_non_finite_rejected(self):
        with pytest.raises(ValueError):
            Pose(float("inf"), 0, 0)


class TestTransformPolygon:
    def test_identity(self):
        square = ConvexPolygon.rectangle(0, 0, 1, 1)
        out = transform_polygon(square, Transform((0, 0), 0))
        assert out.vertices == square.vertices

    def test_square_quarter_turn_same_vertex_set(self):
        square = ConvexPolygon([(-1, -1), (1, -1), (1, 1), (-1, 1)])
        out = transform_polygon(square, Transform((0, 0), math.pi / 2))
        got = {(round(x, 9), round(y, 9)) for x, y in out.vertices}
        assert got == {(-1, -1), (1, -1), (1, 1), (-1, 1)}

    def test_area_preserved_random(self):
        rng = np.random.default_rng(11)
        for _ in range(50):
            poly = random_convex_polygon(rng, n_min=5, n_max=5, scale=3.0)
            t = Transform(tuple(rng.uniform(-10, 10, 2)), rng.uniform(-np.pi, np.pi))
            out = transform_polygon(poly, t)
            assert shoelace(out.vertices) == pytest.approx(
                shoelace(poly.vertices), abs=1e-9
            )


class TestConvexPolygon:
    def test_too_few_vertices(self):
        with pytest.raises(ValueError):
            ConvexPolygon([(0, 0), (1, 0)])

    def test_clockwise_rejected(self):
        with pytest.raises(ValueError):
            ConvexPolygon([(0, 0), (0, 1), (1, 0)])

    def test_collinear_rejected(self):
        with pytest.raises(ValueError):
            ConvexPolygon([(0, 0), (1, 0), (2, 0), (1, 1)])

    def test_repeated_vertex_rejected(self):
        with pytest.raises(ValueError):
            ConvexPolygon([(0, 0), (1, 0), (1, 0), (0, 1)])


class TestPolygonsIntersect:
    def test_overlapping_squares(self):
        a = ConvexPolygon.rectangle(-0.5, -0.5, 0.5, 0.5)
        b = ConvexPolygon.rectangle(0.0, 0.0, 1.0, 1.0)
        assert polygons_intersect(a, b)

    def test_disjoint_squares(self):
        a = ConvexPolygon.rectangle(-0.5, -0.5, 0.5, 0.5)
        b = ConvexPolygon.rectangle(2.5, -0.5, 3.5, 0.5)
        assert not polygons_intersect(a, b)

    def test_touching_edge_counts_as_intersecting(self):
        a = ConvexPolygon.rectangle(0, 0, 1, 1)
        b = ConvexPolygon.rectangle(1, 0, 2, 1)
        assert polygons_intersect(a, b)

    def test_self_intersection(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            p = random_convex_polygon(rng)
            assert polygons_intersect(p, p)

    def test_symmetry_and_translation_invariance(self):
        rng = np.random.default_rng(17)
        for _ in range(100):
            a = random_convex_polygon(rng, center=rng.uniform(-2, 2, 2))
            b = random_convex_polygon(rng, center=rng.uniform(-2, 2, 2))
            r = polygons_intersect(a, b)
            assert polygons_intersect(b, a) == r
            shift = Transform(tuple(rng.uniform(-5, 5, 2)), 0.0)
            assert polygons_intersect(
                transform_polygon(a, shift), transform_polygon(b, shift)
            ) == r


class TestPointSegmentDistance:
    def test_perpendicular_foot_inside(self):
        assert point_segment_distance((0, 1), (-1, 0), (1, 0)) == pytest.approx(1.0)

    def test_nearest_endpoint(self):
        assert point_segment_distance((2, 0), (-1, 0), (1, 0)) == pytest.approx(1.0)

    def test_degenerate_segment(self):
        assert point_segment_distance((3, 4), (0, 0), (0, 0)) == pytest.approx(5.0)

    def test_at_least_line_distance(self):
        rng = np.random.default_rng(23)
        for _ in range(200):
            p, a, b = (tuple(rng.uniform(-5, 5, 2)) for _ in range(3))
            d = point_segment_distance(p, a, b)
            abx, aby = b[0] - a[0], b[1] - a[1]
            norm = math.hypot(abx, aby)
            if norm < 1e-9:
                continue
            line = abs(abx * (p[1] - a[1]) - aby * (p[0] - a[0])) / norm
            assert d >= line - 1e-12
