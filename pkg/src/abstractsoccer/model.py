"""Field, robot and simulation configuration, plus the named presets.

Every ablation switch lives in :class:`SimConfig`; the named presets each
flip exactly one knob relative to ``full_marl``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace, asdict
from pathlib import Path
from typing import Dict, List

from .geometry import Vec2

CONFIG_SCHEMA_VERSION = "1"

# Margin by which the kick trigger radius extends beyond the body half-diagonal.
KICK_MARGIN = 0.1

PRESET_NAMES = (
    "full_marl",
    "large_displacement",
    "small_displacement",
    "large_angle_displacement",
    "realistic_agent_size",
    "realistic_goals",
    "kicking_time",
    "no_ball_noise",
    "with_observation_noise",
    "eval_realistic",
)


@dataclass(frozen=True)
class FieldSpec:
    """Rectangular field with goals centered on the x-axis at x = +-length/2."""

    length: float = 9.0
    width: float = 6.0
    goal_width: float = 1.5
    goal_depth: float = 0.5

    def __post_init__(self):
        if self.length <= 0 or self.width <= 0:
            raise ValueError("field dimensions must be positive")
        if not (0 < self.goal_width < self.width):
            raise ValueError("goal_width must be in (0, width)")
        if self.goal_depth <= 0:
            raise ValueError("goal_depth must be positive")

    @property
    def half_length(self) -> float:
        return self.length / 2.0

    @property
    def half_width(self) -> float:
        return self.width / 2.0


@dataclass(frozen=True)
class RobotSpec:
    body_length: float = 1.2
    body_width: float = 1.2
    max_forward_speed: float = 0.2
    max_lateral_speed: float = 0.12
    max_angular_speed: float = 1.0
    kick_speed: float = 2.5
    kick_range: float = 0.0  # 0 -> derived from body size
    kick_duration: float = 0.0
    push_speed: float = 0.5

    def __post_init__(self):
        if self.kick_range == 0.0:
            object.__setattr__(self, "kick_range", self.half_diagonal + KICK_MARGIN)
        for name in (
            "body_length",
            "body_width",
            "max_forward_speed",
            "max_lateral_speed",
            "max_angular_speed",
            "kick_speed",
            "kick_range",
            "push_speed",
        ):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be strictly positive")
        if self.kick_duration < 0:
            raise ValueError("kick_duration must be >= 0")
        if self.kick_range < self.half_diagonal:
            raise ValueError("kick_range must reach beyond the collision volume")

    @property
    def half_diagonal(self) -> float:
        return math.hypot(self.body_length, self.body_width) / 2.0


@dataclass(frozen=True)
class SimConfig:
    field: FieldSpec = FieldSpec()
    robot: RobotSpec = RobotSpec()
    dt: float = 0.1
    episode_timeout: float = 60.0
    ball_deceleration: float = 0.8
    ball_contact_noise: bool = True
    contact_noise_angle: float = 0.4
    contact_noise_speed_frac: float = 0.3
    observation_noise: bool = False
    observation_noise_std: float = 0.1
    defender_restitution: float = 0.5
    num_agents: int = 2
    num_defenders: int = 1
    seed: int = 0

    def __post_init__(self):
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        steps = self.episode_timeout / self.dt
        if abs(steps - round(steps)) > 1e-9:
            raise ValueError("episode_timeout must be an integer multiple of dt")
        if self.ball_deceleration <= 0:
            raise ValueError("ball_deceleration must be positive")
        if not (0 <= self.contact_noise_angle <= math.pi / 2):
            raise ValueError("contact_noise_angle must be in [0, pi/2]")
        if not (0 <= self.contact_noise_speed_frac < 1):
            raise ValueError("contact_noise_speed_frac must be in [0, 1)")
        if not (0 <= self.defender_restitution <= 1):
            raise ValueError("defender_restitution must be in [0, 1]")
        if self.num_agents < 1 or self.num_defenders < 0:
            raise ValueError("invalid robot counts")

    @property
    def max_steps(self) -> int:
        return int(round(self.episode_timeout / self.dt))


def in_goal(field: FieldSpec, ball: Vec2, attacking_positive_x: bool = True) -> bool:
    """True iff the ball is past the attacked goal line inside the goal mouth."""
    x = ball[0] if attacking_positive_x else -ball[0]
    return x > field.half_length and abs(ball[1]) < field.goal_width / 2.0


def out_of_bounds(field: FieldSpec, ball: Vec2) -> bool:
    """True iff the ball left the field without entering either goal mouth."""
    inside = abs(ball[0]) <= field.half_length and abs(ball[1]) <= field.half_width
    if inside:
        return False
    if in_goal(field, ball, True) or in_goal(field, ball, False):
        return False
    return True


def attacked_goal_center(field: FieldSpec, attacking_positive_x: bool = True) -> Vec2:
    return Vec2(field.half_length if attacking_positive_x else -field.half_length, 0.0)


# --- presets ---------------------------------------------------------------

# Semantic knob -> SimConfig leaf fields it touches.  kick_range follows body
# size, so it belongs to the agent_size knob.
SEMANTIC_GROUPS: Dict[str, List[str]] = {
    "displacement": ["robot.max_forward_speed", "robot.max_lateral_speed"],
    "angular_displacement": ["robot.max_angular_speed"],
    "agent_size": ["robot.body_length", "robot.body_width", "robot.kick_range"],
    "goal_size": ["field.goal_width"],
    "kick_delay": ["robot.kick_duration"],
    "ball_contact_noise": ["ball_contact_noise"],
    "observation_noise": ["observation_noise"],
}

REALISTIC_BODY = 0.3
LARGE_BODY = 1.2  # ~4x the real footprint, linear
FULL_GOAL_WIDTH = 1.5
TRAINING_GOAL_WIDTH = 0.75  # halved
REALISTIC_KICK_DURATION = 1.0


def _full_marl() -> SimConfig:
    return SimConfig(
        field=FieldSpec(goal_width=TRAINING_GOAL_WIDTH),
        robot=RobotSpec(body_length=LARGE_BODY, body_width=LARGE_BODY),
    )


def _sized_robot(base: RobotSpec, body: float, **extra) -> RobotSpec:
    return replace(base, body_length=body, body_width=body, kick_range=0.0, **extra)


def get_preset(name: str) -> SimConfig:
    """Build one of the named ablation configurations."""
    base = _full_marl()
    if name == "full_marl":
        return base
    if name == "large_displacement":
        return replace(
            base,
            robot=replace(
                base.robot,
                max_forward_speed=base.robot.max_forward_speed * 2.0,
                max_lateral_speed=base.robot.max_lateral_speed * 2.0,
            ),
        )
    if name == "small_displacement":
        return replace(
            base,
            robot=replace(
                base.robot,
                max_forward_speed=base.robot.max_forward_speed * 0.5,
                max_lateral_speed=base.robot.max_lateral_speed * 0.5,
            ),
        )
    if name == "large_angle_displacement":
        return replace(
            base,
            robot=replace(base.robot, max_angular_speed=base.robot.max_angular_speed * 2.0),
        )
    if name == "realistic_agent_size":
        return replace(base, robot=_sized_robot(base.robot, REALISTIC_BODY))
    if name == "realistic_goals":
        return replace(base, field=replace(base.field, goal_width=FULL_GOAL_WIDTH))
    if name == "kicking_time":
        return replace(base, robot=replace(base.robot, kick_duration=REALISTIC_KICK_DURATION))
    if name == "no_ball_noise":
        return replace(base, ball_contact_noise=False)
    if name == "with_observation_noise":
        return replace(base, observation_noise=True)
    if name == "eval_realistic":
        return replace(
            base,
            field=replace(base.field, goal_width=FULL_GOAL_WIDTH),
            robot=_sized_robot(base.robot, REALISTIC_BODY, kick_duration=REALISTIC_KICK_DURATION),
        )
    raise KeyError(f"unknown preset {name!r}; valid: {', '.join(PRESET_NAMES)}")


def _flatten(config: SimConfig) -> Dict[str, object]:
    out: Dict[str, object] = {}
    for key, value in asdict(config).items():
        if isinstance(value, dict):
            for sub, sval in value.items():
                out[f"{key}.{sub}"] = sval
        else:
            out[key] = value
    return out


def semantic_diff(a: SimConfig, b: SimConfig) -> List[str]:
    """Names of the semantic knobs on which two configs differ.

    Leaf fields not covered by a knob are reported under their own name.
    """
    fa, fb = _flatten(a), _flatten(b)
    leaf_to_group = {leaf: g for g, leaves in SEMANTIC_GROUPS.items() for leaf in leaves}
    groups = []
    for leaf in fa:
        if fa[leaf] != fb[leaf]:
            groups.append(leaf_to_group.get(leaf, leaf))
    return sorted(set(groups))


# --- serialization ---------------------------------------------------------


def config_to_dict(config: SimConfig) -> dict:
    data = asdict(config)
    data["schema_version"] = CONFIG_SCHEMA_VERSION
    return data


def config_from_dict(data: dict) -> SimConfig:
    data = dict(data)
    version = data.pop("schema_version", None)
    if version != CONFIG_SCHEMA_VERSION:
        raise ValueError(
            f"config schema_version {version!r} not supported (expected {CONFIG_SCHEMA_VERSION!r})"
        )
    field = FieldSpec(**data.pop("field"))
    robot = RobotSpec(**data.pop("robot"))
    return SimConfig(field=field, robot=robot, **data)


def save_config(config: SimConfig, path) -> None:
    Path(path).write_text(json.dumps(config_to_dict(config), indent=2) + "\n")


def load_config(path) -> SimConfig:
    return config_from_dict(json.loads(Path(path).read_text()))
