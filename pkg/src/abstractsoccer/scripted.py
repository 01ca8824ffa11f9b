"""Hand-scripted baseline controller: walk behind the ball, face the goal, kick.

Serves as the solvability oracle for the evaluation scenarios: it reads
exact world state (no learned components) and scores by repeatedly lining
up behind the ball and kicking toward the attacked goal.
"""

from __future__ import annotations

import math
from typing import List, Sequence

from .dynamics import WorldState
from .geometry import Vec2, egocentric_transform, normalize_angle
from .model import SimConfig, attacked_goal_center

_STAND = (0.0, 0.0, 0.0, 0.0, 1.0)


def _clamp(v: float, lo: float = -1.0, hi: float = 1.0) -> float:
    return lo if v < lo else hi if v > hi else v


class ScriptedKicker:
    """Deterministic state-machine striker; the teammate stands still."""

    def __init__(self, config: SimConfig, align_tol: float = 0.05):
        self.config = config
        self.align_tol = align_tol

    def _ball_rest_position(self, state: WorldState) -> Vec2:
        ball = state.ball
        speed = ball.speed
        if speed == 0.0:
            return ball.position
        roll = speed * speed / (2.0 * self.config.ball_deceleration)
        return Vec2(
            ball.position.x + ball.velocity.x / speed * roll,
            ball.position.y + ball.velocity.y / speed * roll,
        )

    def _striker_action(self, state: WorldState, agent: int) -> Sequence[float]:
        config = self.config
        spec = config.robot
        robot = state.robots[agent]
        pose = robot.pose
        if robot.kick_timer > 0.0:
            return _STAND
        ball = self._ball_rest_position(state)
        goal = attacked_goal_center(config.field)
        aim = math.atan2(goal.y - ball.y, goal.x - ball.x)
        standoff = 0.5 * (spec.half_diagonal + spec.kick_range)
        standpoint = Vec2(
            ball.x - math.cos(aim) * standoff,
            ball.y - math.sin(aim) * standoff,
        )
        ego_sp = egocentric_transform(pose, standpoint)
        dist_sp = math.hypot(ego_sp.x, ego_sp.y)
        heading_err = normalize_angle(aim - pose.heading)
        dt = config.dt
        angular = _clamp(heading_err / (spec.max_angular_speed * dt))

        if dist_sp > 0.06:
            # Detour if the straight line to the standpoint passes through the ball.
            target = standpoint
            ego_ball = egocentric_transform(pose, ball)
            dist_ball = math.hypot(ego_ball.x, ego_ball.y)
            avoid = spec.half_diagonal + 0.1
            if dist_ball < dist_sp and ego_ball.x > 0.0 and abs(ego_ball.y) < avoid:
                side = 1.0 if ego_ball.y <= 0.0 else -1.0
                to_ball = math.atan2(ball.y - pose.position.y, ball.x - pose.position.x)
                target = Vec2(
                    ball.x - math.cos(to_ball) * 0.0 - math.sin(to_ball) * side * avoid * 1.5,
                    ball.y - math.sin(to_ball) * 0.0 + math.cos(to_ball) * side * avoid * 1.5,
                )
            ego_t = egocentric_transform(pose, target)
            return (
                _clamp(ego_t.x / (spec.max_forward_speed * dt)),
                _clamp(ego_t.y / (spec.max_lateral_speed * dt)),
                angular,
                0.0,
                0.0,
            )
        # In position: finish the rotation, then kick.
        dist_to_ball = math.hypot(ball.x - pose.position.x, ball.y - pose.position.y)
        if abs(heading_err) < self.align_tol and dist_to_ball <= spec.kick_range * 0.98:
            return (0.0, 0.0, 0.0, 1.0, 0.0)
        if abs(heading_err) >= self.align_tol:
            return (0.0, 0.0, angular, 0.0, 0.0)
        # Aligned but out of reach: creep forward.
        return (0.3, 0.0, angular, 0.0, 0.0)

    def act(self, state: WorldState) -> List[Sequence[float]]:
        ball = state.ball.position
        dists = [
            math.hypot(ball.x - r.pose.position.x, ball.y - r.pose.position.y)
            for r in state.robots[: self.config.num_agents]
        ]
        striker = dists.index(min(dists))
        actions: List[Sequence[float]] = []
        for i in range(self.config.num_agents):
            actions.append(self._striker_action(state, i) if i == striker else _STAND)
        return actions
