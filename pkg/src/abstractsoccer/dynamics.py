"""World transition function: robot kinematics, kicks, pushes and ball physics.

Step composition order is fixed: per agent (list order) move -> kick ->
push, then defender contacts, then ball integration, then event detection.
Kicks are noiseless; pushes optionally carry uniform contact noise.
Robots never collide with each other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field, replace
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .geometry import Pose2D, Vec2, egocentric_transform, normalize_angle
from .model import RobotSpec, SimConfig, in_goal, out_of_bounds

# Gap left between the ball and a rectangle it is expelled from.
CONTACT_EPS = 0.01


@dataclass(frozen=True)
class RobotState:
    pose: Pose2D
    kick_timer: float = 0.0
    standing: bool = False
    last_displacement: Vec2 = Vec2(0.0, 0.0)


@dataclass(frozen=True)
class BallState:
    position: Vec2
    velocity: Vec2 = Vec2(0.0, 0.0)

    @property
    def speed(self) -> float:
        return math.hypot(self.velocity.x, self.velocity.y)


@dataclass
class WorldState:
    """Complete Markov state: agents first, then defenders."""

    robots: List[RobotState]
    ball: BallState
    elapsed: float = 0.0
    step_count: int = 0
    rng: np.random.Generator = dc_field(default_factory=lambda: np.random.default_rng(0))

    def copy(self) -> "WorldState":
        clone = WorldState(
            robots=list(self.robots),
            ball=self.ball,
            elapsed=self.elapsed,
            step_count=self.step_count,
            rng=np.random.default_rng(),
        )
        clone.rng.bit_generator.state = self.rng.bit_generator.state
        return clone


@dataclass(frozen=True)
class StepEvents:
    goal_scored: bool = False
    out_of_bounds: bool = False
    kicks: Tuple[bool, ...] = ()
    pushes: Tuple[bool, ...] = ()


def _clamp(value: float, lo: float, hi: float) -> float:
    return lo if value < lo else hi if value > hi else value


def apply_action(robot: RobotState, action: Sequence[float], spec: RobotSpec, dt: float,
                 field_half: Tuple[float, float] = (math.inf, math.inf)) -> RobotState:
    """Advance one robot kinematically; position clamped to the field rectangle.

    A robot mid-kick is frozen until its timer expires; the stand channel
    suppresses motion for the step.  Out-of-range channels are clamped.
    """
    if robot.kick_timer > 0.0:
        return replace(
            robot,
            kick_timer=max(0.0, robot.kick_timer - dt),
            last_displacement=Vec2(0.0, 0.0),
        )
    forward = _clamp(action[0], -1.0, 1.0)
    lateral = _clamp(action[1], -1.0, 1.0)
    angular = _clamp(action[2], -1.0, 1.0)
    stand = action[4] > 0.0
    if stand:
        return replace(robot, standing=True, last_displacement=Vec2(0.0, 0.0))
    pose = robot.pose
    c = math.cos(pose.heading)
    s = math.sin(pose.heading)
    dx_local = forward * spec.max_forward_speed * dt
    dy_local = lateral * spec.max_lateral_speed * dt
    x = _clamp(pose.position.x + c * dx_local - s * dy_local, -field_half[0], field_half[0])
    y = _clamp(pose.position.y + s * dx_local + c * dy_local, -field_half[1], field_half[1])
    heading = normalize_angle(pose.heading + angular * spec.max_angular_speed * dt)
    return RobotState(
        pose=Pose2D(Vec2(x, y), heading),
        kick_timer=0.0,
        standing=False,
        last_displacement=Vec2(x - pose.position.x, y - pose.position.y),
    )


def resolve_kick(
    robot: RobotState,
    action: Sequence[float],
    ball: BallState,
    spec: RobotSpec,
) -> Tuple[RobotState, BallState, bool]:
    """Noiseless kick: ball velocity set to kick_speed along the heading."""
    if action[3] <= 0.0 or robot.kick_timer > 0.0:
        return robot, ball, False
    dist = math.hypot(
        ball.position.x - robot.pose.position.x,
        ball.position.y - robot.pose.position.y,
    )
    if dist > spec.kick_range:
        return robot, ball, False
    heading = robot.pose.heading
    velocity = Vec2(spec.kick_speed * math.cos(heading), spec.kick_speed * math.sin(heading))
    return (
        replace(robot, kick_timer=spec.kick_duration),
        BallState(position=ball.position, velocity=velocity),
        True,
    )


def _expel_point(center: Vec2, heading: float, half_len: float, half_wid: float,
                 direction: Vec2) -> Vec2:
    """Point just outside the rectangle from its center along ``direction``."""
    c = math.cos(heading)
    s = math.sin(heading)
    dx = c * direction.x + s * direction.y
    dy = -s * direction.x + c * direction.y
    tx = half_len / abs(dx) if dx != 0.0 else math.inf
    ty = half_wid / abs(dy) if dy != 0.0 else math.inf
    t = min(tx, ty) + CONTACT_EPS
    return Vec2(center.x + direction.x * t, center.y + direction.y * t)


def resolve_push(
    robot: RobotState,
    ball: BallState,
    spec: RobotSpec,
    config: SimConfig,
    rng: np.random.Generator,
) -> Tuple[BallState, bool]:
    """Displacement-driven push with optional uniform contact noise.

    A stationary robot does not push; the ball is re-seated just outside
    the collision rectangle along the (noisy) push direction.
    """
    disp = robot.last_displacement
    disp_norm = math.hypot(disp.x, disp.y)
    if disp_norm == 0.0:
        return ball, False
    local = egocentric_transform(robot.pose, ball.position)
    if abs(local.x) > spec.body_length / 2.0 or abs(local.y) > spec.body_width / 2.0:
        return ball, False
    angle = math.atan2(disp.y, disp.x)
    speed = spec.push_speed
    if config.ball_contact_noise:
        angle += rng.uniform(-config.contact_noise_angle, config.contact_noise_angle)
        f = config.contact_noise_speed_frac
        speed *= rng.uniform(1.0 - f, 1.0 + f)
    direction = Vec2(math.cos(angle), math.sin(angle))
    position = _expel_point(
        robot.pose.position,
        robot.pose.heading,
        spec.body_length / 2.0,
        spec.body_width / 2.0,
        direction,
    )
    return BallState(position=position, velocity=direction.scaled(speed)), True


def resolve_defender_contact(
    defender: RobotState,
    ball: BallState,
    config: SimConfig,
) -> Tuple[BallState, bool]:
    """Reflect a moving ball off the struck face of a static defender."""
    if ball.speed == 0.0:
        return ball, False
    spec = config.robot
    local = egocentric_transform(defender.pose, ball.position)
    hl, hw = spec.body_length / 2.0, spec.body_width / 2.0
    if abs(local.x) > hl or abs(local.y) > hw:
        return ball, False
    heading = defender.pose.heading
    c = math.cos(heading)
    s = math.sin(heading)
    vx_local = c * ball.velocity.x + s * ball.velocity.y
    vy_local = -s * ball.velocity.x + c * ball.velocity.y
    # Struck face: axis with the deeper relative penetration.
    if abs(local.x) / hl >= abs(local.y) / hw:
        vx_local = -config.defender_restitution * vx_local
        px = math.copysign(hl + CONTACT_EPS, local.x)
        py = local.y
    else:
        vy_local = -config.defender_restitution * vy_local
        px = local.x
        py = math.copysign(hw + CONTACT_EPS, local.y)
    position = Vec2(
        defender.pose.position.x + c * px - s * py,
        defender.pose.position.y + s * px + c * py,
    )
    velocity = Vec2(c * vx_local - s * vy_local, s * vx_local + c * vy_local)
    return BallState(position=position, velocity=velocity), True


def integrate_ball(ball: BallState, deceleration: float, dt: float) -> BallState:
    """One Euler step: advance, then decelerate toward rest."""
    position = Vec2(
        ball.position.x + ball.velocity.x * dt,
        ball.position.y + ball.velocity.y * dt,
    )
    speed = ball.speed
    if speed == 0.0:
        return BallState(position=position)
    new_speed = max(0.0, speed - deceleration * dt)
    if new_speed == 0.0:
        return BallState(position=position)
    k = new_speed / speed
    return BallState(position=position, velocity=Vec2(ball.velocity.x * k, ball.velocity.y * k))


def step_world(
    state: WorldState,
    actions: Sequence[Sequence[float]],
    config: SimConfig,
    num_agents: Optional[int] = None,
) -> Tuple[WorldState, StepEvents]:
    """Advance the world one timestep under the joint action.

    ``actions`` holds one 5-channel action per agent; defenders are static
    and receive none.  The input state is not mutated.
    """
    if num_agents is None:
        num_agents = config.num_agents
    if len(actions) != num_agents:
        raise ValueError(f"expected {num_agents} actions, got {len(actions)}")
    next_state = state.copy()
    spec = config.robot
    field_half = (config.field.half_length, config.field.half_width)
    ball = next_state.ball
    kicks = []
    pushes = []
    for i in range(num_agents):
        robot = apply_action(next_state.robots[i], actions[i], spec, config.dt, field_half)
        robot, ball, kicked = resolve_kick(robot, actions[i], ball, spec)
        pushed = False
        if not kicked:
            ball, pushed = resolve_push(robot, ball, spec, config, next_state.rng)
        next_state.robots[i] = robot
        kicks.append(kicked)
        pushes.append(pushed)
    for j in range(num_agents, len(next_state.robots)):
        ball, _ = resolve_defender_contact(next_state.robots[j], ball, config)
    ball = integrate_ball(ball, config.ball_deceleration, config.dt)
    next_state.ball = ball
    # elapsed stays an exact multiple of dt rather than an accumulated sum.
    next_state.step_count = state.step_count + 1
    next_state.elapsed = next_state.step_count * config.dt
    goal = in_goal(config.field, ball.position, True)
    oob = (not goal) and out_of_bounds(config.field, ball.position)
    events = StepEvents(
        goal_scored=goal,
        out_of_bounds=oob,
        kicks=tuple(kicks),
        pushes=tuple(pushes),
    )
    return next_state, events
