import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from abstractsoccer.geometry import (
    Pose2D,
    Vec2,
    egocentric_transform,
    inverse_egocentric,
    normalize_angle,
    point_in_rect,
    rects_overlap,
)

finite_angle = st.floats(-1e6, 1e6, allow_nan=False, allow_infinity=False)
coord = st.floats(-100, 100, allow_nan=False, allow_infinity=False)


def brute_force_ego(observer: Pose2D, target: Vec2) -> Vec2:
    """Independent 2x2 rotation-matrix oracle."""
    rot = np.array(
        [
            [math.cos(-observer.heading), -math.sin(-observer.heading)],
            [math.sin(-observer.heading), math.cos(-observer.heading)],
        ]
    )
    rel = np.array([target.x - observer.position.x, target.y - observer.position.y])
    out = rot @ rel
    return Vec2(out[0], out[1])


class TestNormalizeAngle:
    def test_zero(self):
        assert normalize_angle(0.0) == 0.0

    def test_odd_multiple_of_pi(self):
        assert normalize_angle(3 * math.pi) == pytest.approx(math.pi)

    def test_boundary_maps_to_half_open_side(self):
        assert normalize_angle(-math.pi) == pytest.approx(math.pi)

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            normalize_angle(float("nan"))
        with pytest.raises(ValueError):
            normalize_angle(float("inf"))

    @given(finite_angle)
    def test_range_and_congruence(self, theta):
        out = normalize_angle(theta)
        assert -math.pi < out <= math.pi
        assert math.remainder(out - theta, 2 * math.pi) == pytest.approx(0.0, abs=1e-6)

    @given(finite_angle)
    def test_idempotent(self, theta):
        once = normalize_angle(theta)
        assert normalize_angle(once) == once


class TestEgocentric:
    def test_identity_frame(self):
        out = egocentric_transform(Pose2D(Vec2(0, 0), 0.0), Vec2(1, 0))
        assert out == pytest.approx((1.0, 0.0))

    def test_quarter_turn(self):
        out = egocentric_transform(Pose2D(Vec2(1, 0), math.pi / 2), Vec2(1, 2))
        assert out == pytest.approx((2.0, 0.0), abs=1e-12)

    def test_half_turn_negates_forward(self):
        out = egocentric_transform(Pose2D(Vec2(0, 0), math.pi), Vec2(1, 0))
        assert out == pytest.approx((-1.0, 0.0), abs=1e-12)

    @given(coord, coord, finite_angle, coord, coord)
    def test_matches_rotation_matrix_oracle(self, px, py, heading, tx, ty):
        pose = Pose2D(Vec2(px, py), heading)
        target = Vec2(tx, ty)
        got = egocentric_transform(pose, target)
        want = brute_force_ego(pose, target)
        assert got == pytest.approx(tuple(want), abs=1e-9)

    @given(coord, coord, finite_angle, coord, coord)
    def test_round_trip(self, px, py, heading, tx, ty):
        pose = Pose2D(Vec2(px, py), heading)
        target = Vec2(tx, ty)
        back = inverse_egocentric(pose, egocentric_transform(pose, target))
        assert back == pytest.approx(tuple(target), abs=1e-9)


class TestRects:
    def test_point_in_axis_aligned(self):
        assert point_in_rect(Vec2(0, 0), 0.0, 0.5, 0.25, Vec2(0.4, 0.2))
        assert not point_in_rect(Vec2(0, 0), 0.0, 0.5, 0.25, Vec2(0.6, 0.0))

    def test_point_in_rotated(self):
        # rect rotated 45 degrees: the world-frame corner is now outside,
        # while a point just past the old edge along the new diagonal is inside
        assert not point_in_rect(Vec2(0, 0), math.pi / 4, 0.5, 0.5, Vec2(0.5, 0.5))
        assert point_in_rect(Vec2(0, 0), math.pi / 4, 0.5, 0.5, Vec2(0.0, 0.6))

    def test_overlap_separated(self):
        assert not rects_overlap(Vec2(0, 0), 0.0, (0.5, 0.5), Vec2(1.2, 0), 0.0, (0.5, 0.5))

    def test_overlap_touching_diagonals(self):
        assert rects_overlap(Vec2(0, 0), 0.0, (0.5, 0.5), Vec2(0.9, 0), 0.0, (0.5, 0.5))

    def test_rotation_enables_separation(self):
        # two long thin rects crossing at right angles overlap
        assert rects_overlap(Vec2(0, 0), 0.0, (1.0, 0.1), Vec2(0, 0), math.pi / 2, (1.0, 0.1))
