"""Planar geometry primitives shared by the simulator.

All positions are in meters in the global field frame unless noted.
Headings are radians, normalized into (-pi, pi].
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

TWO_PI = 2.0 * math.pi


class Vec2(NamedTuple):
    x: float
    y: float

    def __add__(self, other):  # type: ignore[override]
        return Vec2(self.x + other[0], self.y + other[1])

    def __sub__(self, other):
        return Vec2(self.x - other[0], self.y - other[1])

    def scaled(self, k: float) -> "Vec2":
        return Vec2(self.x * k, self.y * k)

    def norm(self) -> float:
        return math.hypot(self.x, self.y)


@dataclass(frozen=True)
class Pose2D:
    """Position plus heading in the global frame."""

    position: Vec2
    heading: float

    def __post_init__(self):
        if not (math.isfinite(self.position.x) and math.isfinite(self.position.y)):
            raise ValueError("pose position must be finite")
        object.__setattr__(self, "heading", normalize_angle(self.heading))


def normalize_angle(theta: float) -> float:
    """Map an angle into (-pi, pi]."""
    if not math.isfinite(theta):
        raise ValueError(f"angle must be finite, got {theta!r}")
    theta = math.remainder(theta, TWO_PI)
    if theta <= -math.pi:
        theta += TWO_PI
    return theta


def egocentric_transform(observer: Pose2D, target: Vec2) -> Vec2:
    """Express ``target`` in the observer's body frame.

    First component is the distance ahead of the observer, second is the
    distance to the observer's left.
    """
    dx = target[0] - observer.position.x
    dy = target[1] - observer.position.y
    c = math.cos(observer.heading)
    s = math.sin(observer.heading)
    return Vec2(c * dx + s * dy, -s * dx + c * dy)


def inverse_egocentric(observer: Pose2D, local: Vec2) -> Vec2:
    """Inverse of :func:`egocentric_transform`."""
    c = math.cos(observer.heading)
    s = math.sin(observer.heading)
    return Vec2(
        observer.position.x + c * local[0] - s * local[1],
        observer.position.y + s * local[0] + c * local[1],
    )


def rotate_vec(v: Vec2, angle: float) -> Vec2:
    c = math.cos(angle)
    s = math.sin(angle)
    return Vec2(c * v[0] - s * v[1], s * v[0] + c * v[1])


def point_in_rect(center: Vec2, heading: float, half_len: float, half_wid: float, point: Vec2) -> bool:
    """True if ``point`` lies inside the oriented rectangle (inclusive)."""
    local = egocentric_transform(Pose2D(center, heading), point)
    return abs(local.x) <= half_len and abs(local.y) <= half_wid


def _rect_corners(center: Vec2, heading: float, half_len: float, half_wid: float):
    c = math.cos(heading)
    s = math.sin(heading)
    out = []
    for sx, sy in ((1, 1), (1, -1), (-1, -1), (-1, 1)):
        lx = sx * half_len
        ly = sy * half_wid
        out.append((center.x + c * lx - s * ly, center.y + s * lx + c * ly))
    return out


def rects_overlap(
    center_a: Vec2,
    heading_a: float,
    half_a: tuple,
    center_b: Vec2,
    heading_b: float,
    half_b: tuple,
) -> bool:
    """Separating-axis overlap test for two oriented rectangles."""
    corners_a = _rect_corners(center_a, heading_a, half_a[0], half_a[1])
    corners_b = _rect_corners(center_b, heading_b, half_b[0], half_b[1])
    for heading in (heading_a, heading_b):
        for axis_angle in (heading, heading + math.pi / 2.0):
            ax = math.cos(axis_angle)
            ay = math.sin(axis_angle)
            proj_a = [ax * px + ay * py for px, py in corners_a]
            proj_b = [ax * px + ay * py for px, py in corners_b]
            if max(proj_a) < min(proj_b) or max(proj_b) < min(proj_a):
                return False
    return True
