import math

import numpy as np
import pytest

from polyroof_eval import (
    DegenerateInput,
    Point2,
    PolygonRing,
    area,
    compactness,
    convex_hull,
    convexity,
    get_epsilon,
    intersection_area,
    iou,
    perimeter,
    set_epsilon,
)

import oracles
import synthgen

UNIT_SQUARE = [(0, 0), (1, 0), (1, 1), (0, 1)]
L_SHAPE = [(0, 0), (2, 0), (2, 1), (1, 1), (1, 2), (0, 2)]
TRIANGLE_345 = [(0, 0), (4, 0), (0, 3)]


class TestPolygonRing:
    def test_point_rejects_non_finite(self):
        with pytest.raises(DegenerateInput):
            Point2(math.nan, 0.0)
        with pytest.raises(DegenerateInput):
            Point2(0.0, math.inf)

    def test_cw_input_is_reversed(self):
        ring = PolygonRing(list(reversed(UNIT_SQUARE)))
        assert area(ring) == 1.0
        x, y = ring.coords[:, 0], ring.coords[:, 1]
        signed = 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))
        assert signed > 0

    def test_collinear_and_duplicate_vertices_cleaned(self):
        ring = PolygonRing([(0, 0), (0.5, 0), (1, 0), (1, 1), (1, 1), (0, 1)])
        assert len(ring) == 4
        assert area(ring) == 1.0

    def test_too_few_vertices(self):
        with pytest.raises(DegenerateInput):
            PolygonRing([(0, 0), (1, 0)])
        with pytest.raises(DegenerateInput):
            PolygonRing([(0, 0), (1, 0), (2, 0)])  # collinear collapses below 3

    def test_self_intersecting_rejected(self):
        with pytest.raises(DegenerateInput):
            PolygonRing([(0, 0), (2, 2), (2, 0), (0, 2)])  # bowtie

    def test_non_adjacent_touch_rejected(self):
        # edge passes through a non-adjacent vertex
        with pytest.raises(DegenerateInput):
            PolygonRing([(0, 0), (4, 0), (4, 2), (2, 0), (0, 2)])

    def test_repeated_vertex_rejected(self):
        with pytest.raises(DegenerateInput):
            PolygonRing([(0, 0), (2, 0), (2, 2), (1, 1), (0, 2), (1, 1)])

    def test_immutable(self):
        ring = PolygonRing(UNIT_SQUARE)
        with pytest.raises(AttributeError):
            ring._area = 7.0
        with pytest.raises(ValueError):
            ring.coords[0, 0] = 9.0

    def test_epsilon_config(self):
        default = get_epsilon()
        try:
            set_epsilon(1e-6)
            assert get_epsilon() == 1e-6
            with pytest.raises(ValueError):
                set_epsilon(-1.0)
        finally:
            set_epsilon(default)


class TestAreaPerimeter:
    def test_unit_square(self):
        sq = PolygonRing(UNIT_SQUARE)
        assert area(sq) == 1.0
        assert perimeter(sq) == 4.0

    def test_l_shape_against_monte_carlo(self, rng):
        ring = PolygonRing(L_SHAPE)
        estimate, noise = oracles.mc_polygon_area(L_SHAPE, rng, 50_000)
        assert area(ring) == pytest.approx(3.0, abs=1e-12)
        assert abs(area(ring) - estimate) <= noise
        assert perimeter(ring) == pytest.approx(oracles.edge_length_sum(L_SHAPE), abs=1e-12)
        assert perimeter(ring) == pytest.approx(8.0, abs=1e-12)

    def test_triangle(self):
        tri = PolygonRing(TRIANGLE_345)
        assert area(tri) == 6.0
        assert perimeter(tri) == 12.0

    def test_random_rings_match_shoelace_oracle(self, rng):
        for _ in range(50):
            coords = synthgen.star_polygon(rng, int(rng.integers(5, 30)))
            ring = PolygonRing(coords)
            assert area(ring) == pytest.approx(oracles.shoelace(ring.coords), rel=1e-12)
            assert perimeter(ring) == pytest.approx(
                oracles.edge_length_sum(ring.coords), rel=1e-12
            )


class TestConvexHull:
    def test_square_is_its_own_hull(self):
        hull = convex_hull(UNIT_SQUARE)
        assert sorted(map(tuple, hull.coords.tolist())) == sorted(
            [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]
        )

    def test_l_shape_hull_is_pentagon(self):
        hull = convex_hull(L_SHAPE)
        expected = sorted(oracles.gift_wrap_hull(L_SHAPE))
        assert sorted(map(tuple, hull.coords.tolist())) == expected
        assert len(hull) == 5

    def test_interior_point_dropped(self):
        hull = convex_hull(UNIT_SQUARE + [(0.5, 0.5)])
        assert len(hull) == 4

    def test_collinear_raises(self):
        with pytest.raises(DegenerateInput):
            convex_hull([(0, 0), (1, 1), (2, 2), (3, 3)])

    def test_matches_gift_wrapping_on_random_clouds(self, rng):
        for _ in range(30):
            pts = rng.uniform(-5, 5, size=(int(rng.integers(5, 40)), 2))
            hull = convex_hull(pts)
            expected = sorted(oracles.gift_wrap_hull(pts))
            assert sorted(map(tuple, hull.coords.tolist())) == pytest.approx(expected)


class TestConvexityCompactness:
    def test_square_convexity(self):
        assert convexity(PolygonRing(UNIT_SQUARE)) == 100.0

    def test_l_shape_convexity(self):
        assert convexity(PolygonRing(L_SHAPE)) == pytest.approx(100 * 3.0 / 3.5, abs=1e-9)

    def test_random_convex_polygons_hit_100(self, rng):
        for _ in range(100):
            coords = synthgen.convex_polygon(rng, int(rng.integers(4, 30)))
            assert convexity(PolygonRing(coords)) == pytest.approx(100.0, abs=1e-9)

    def test_square_compactness(self):
        assert compactness(PolygonRing(UNIT_SQUARE)) == pytest.approx(25 * math.pi, abs=1e-12)

    def test_regular_64gon_compactness(self):
        n = 64
        angles = 2 * math.pi * np.arange(n) / n
        ring = PolygonRing(np.column_stack([np.cos(angles), np.sin(angles)]))
        value = compactness(ring)
        analytic = 100.0 * (math.pi / n) / math.tan(math.pi / n)
        assert value == pytest.approx(analytic, rel=1e-12)
        assert 99.5 < value < 100.0

    def test_compactness_scale_invariant(self, rng):
        for _ in range(30):
            coords = synthgen.star_polygon(rng, int(rng.integers(5, 25)))
            base = compactness(PolygonRing(coords))
            for k in (0.01, 3.7, 1250.0):
                assert compactness(PolygonRing(coords * k)) == pytest.approx(base, rel=1e-9)

    def test_rigid_motion_invariance(self, rng):
        for _ in range(20):
            coords = synthgen.star_polygon(rng, int(rng.integers(5, 25)))
            ring = PolygonRing(coords)
            moved = PolygonRing(
                synthgen.rigid_motion(coords, rng.uniform(0, 2 * math.pi), rng.uniform(-50, 50, 2))
            )
            assert area(moved) == pytest.approx(area(ring), rel=1e-6)
            assert perimeter(moved) == pytest.approx(perimeter(ring), rel=1e-6)
            assert convexity(moved) == pytest.approx(convexity(ring), rel=1e-6)
            assert compactness(moved) == pytest.approx(compactness(ring), rel=1e-6)


class TestIntersectionIoU:
    def test_self_intersection_is_area(self):
        sq = PolygonRing(UNIT_SQUARE)
        assert intersection_area(sq, sq) == pytest.approx(1.0, abs=1e-12)
        assert iou(sq, sq) == 1.0

    def test_half_overlap(self):
        sq = PolygonRing(UNIT_SQUARE)
        shifted = PolygonRing([(0.5, 0), (1.5, 0), (1.5, 1), (0.5, 1)])
        assert intersection_area(sq, shifted) == pytest.approx(0.5, abs=1e-12)
        assert iou(sq, shifted) == pytest.approx(1.0 / 3.0, abs=1e-12)

    def test_l_shape_contains_unit_square(self):
        L = PolygonRing(L_SHAPE)
        sq = PolygonRing(UNIT_SQUARE)
        raster_inter, _ = oracles.raster_pair_areas(L.coords, sq.coords, n=1024)
        assert intersection_area(L, sq) == pytest.approx(1.0, abs=1e-9)
        assert raster_inter == pytest.approx(1.0, abs=0.01)

    def test_disjoint(self):
        sq = PolygonRing(UNIT_SQUARE)
        far = PolygonRing([(10, 10), (11, 10), (11, 11), (10, 11)])
        assert intersection_area(sq, far) == 0.0
        assert iou(sq, far) == 0.0

    def test_shared_edge_neighbors(self):
        left = PolygonRing([(0, 0), (1, 0), (1, 1), (0, 1)])
        right = PolygonRing([(1, 0), (2, 0), (2, 1), (1, 1)])
        assert intersection_area(left, right) == pytest.approx(0.0, abs=1e-12)
        assert iou(left, right) == pytest.approx(0.0, abs=1e-12)

    def test_symmetry_and_bounds_on_random_pairs(self, rng):
        for _ in range(100):
            a = PolygonRing(synthgen.star_polygon(rng, int(rng.integers(5, 25))))
            b = PolygonRing(
                synthgen.star_polygon(rng, int(rng.integers(5, 25)), center=rng.uniform(-2, 2, 2))
            )
            ab = iou(a, b)
            assert ab == pytest.approx(iou(b, a), abs=1e-12)
            assert 0.0 <= ab <= 1.0
            assert intersection_area(a, b) <= min(area(a), area(b)) + 1e-12

    def test_against_rasterization_oracle(self, rng):
        # the full 1000-pair run lives in the acceptance suite
        for _ in range(60):
            a = PolygonRing(synthgen.star_polygon(rng, int(rng.integers(5, 40))))
            b = PolygonRing(
                synthgen.star_polygon(rng, int(rng.integers(5, 40)), center=rng.uniform(-2, 2, 2))
            )
            inter = intersection_area(a, b)
            raster_inter, raster_union = oracles.raster_pair_areas(a.coords, b.coords, n=512)
            assert abs(inter - raster_inter) <= 0.01 * max(raster_union, 1e-9) + 1e-6

    def test_nonconvex_pair_exact(self):
        # two interlocking L shapes with a hand-computed overlap
        L = PolygonRing(L_SHAPE)
        other = PolygonRing([(1, 0), (3, 0), (3, 2), (2, 2), (2, 1), (1, 1)])
        # overlap is the 1x1 cell [1,2]x[0,1]
        assert intersection_area(L, other) == pytest.approx(1.0, abs=1e-12)
