"""Named evaluation scenarios and randomized training initialization.

The fixed BS/D layouts are constants chosen to force cooperative play:
the ball carrier starts behind the ball facing the attacked (+x) goal and
the teammate starts wide, level with the ball.  Defender placements sit on
the line segment between a robot and the ball (D1, D3) or between the ball
and the goal (D2).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field as dc_field, asdict
from pathlib import Path
from typing import List, Optional

import numpy as np

from .geometry import Pose2D, Vec2, point_in_rect, rects_overlap
from .model import CONFIG_SCHEMA_VERSION, SimConfig

SCENARIO_NAMES = ("BS1", "BS2", "BS3", "D1", "D2", "D3", "random_train")

# Ball kept this far inside the goal line when sampling random starts.
_BALL_GOAL_MARGIN = 0.5
_BALL_EDGE_MARGIN = 0.2


@dataclass(frozen=True)
class ScenarioSpec:
    name: str
    agent_poses: List[Pose2D]
    ball_position: Vec2
    defender_poses: List[Pose2D] = dc_field(default_factory=list)


def _pose(x: float, y: float, h: float) -> Pose2D:
    return Pose2D(Vec2(x, y), h)


_FIXED = {
    # Two attackers, empty field.
    "BS1": ScenarioSpec(
        name="BS1",
        agent_poses=[_pose(-1.0, 0.0, 0.0), _pose(0.0, 2.2, -math.pi / 2)],
        ball_position=Vec2(0.0, 0.0),
    ),
    "BS2": ScenarioSpec(
        name="BS2",
        agent_poses=[_pose(1.5, 0.8, 0.0), _pose(2.5, -1.5, math.pi / 2)],
        ball_position=Vec2(2.5, 0.8),
    ),
    "BS3": ScenarioSpec(
        name="BS3",
        agent_poses=[_pose(-3.0, -2.2, 0.0), _pose(-0.5, 1.0, -1.0)],
        ball_position=Vec2(-2.0, -2.2),
    ),
}

_FIXED["D1"] = ScenarioSpec(
    # Defender at the midpoint of the segment from agent A to the ball.
    name="D1",
    agent_poses=_FIXED["BS1"].agent_poses,
    ball_position=_FIXED["BS1"].ball_position,
    defender_poses=[_pose(-0.5, 0.0, math.pi)],
)
_FIXED["D2"] = ScenarioSpec(
    # Defender on the segment from the ball to the attacked goal center.
    name="D2",
    agent_poses=_FIXED["BS2"].agent_poses,
    ball_position=_FIXED["BS2"].ball_position,
    defender_poses=[_pose(3.5, 0.4, math.pi)],
)
_FIXED["D3"] = ScenarioSpec(
    # Defender at the midpoint of the segment from agent B to the ball.
    name="D3",
    agent_poses=_FIXED["BS3"].agent_poses,
    ball_position=_FIXED["BS3"].ball_position,
    defender_poses=[_pose(-1.25, -0.6, 0.5)],
)


def get_scenario(name: str, config: Optional[SimConfig] = None, rng=None) -> ScenarioSpec:
    """Look up a fixed scenario, or sample ``random_train`` with ``rng``."""
    if name == "random_train":
        if config is None or rng is None:
            raise ValueError("random_train requires a config and an rng")
        return sample_random_scenario(config, rng)
    try:
        return _FIXED[name]
    except KeyError:
        raise KeyError(f"unknown scenario {name!r}; valid: {', '.join(SCENARIO_NAMES)}") from None


def validate_scenario(scenario: ScenarioSpec, config: SimConfig) -> None:
    """Reject placements that violate the reset contract for ``config``."""
    if len(scenario.agent_poses) != config.num_agents:
        raise ValueError(
            f"scenario {scenario.name} has {len(scenario.agent_poses)} agents, "
            f"config expects {config.num_agents}"
        )
    if len(scenario.defender_poses) > config.num_defenders:
        raise ValueError(
            f"scenario {scenario.name} has {len(scenario.defender_poses)} defenders, "
            f"config allows at most {config.num_defenders}"
        )
    half = (config.robot.body_length / 2.0, config.robot.body_width / 2.0)
    poses = list(scenario.agent_poses) + list(scenario.defender_poses)
    for pose in poses:
        if (
            abs(pose.position.x) > config.field.half_length
            or abs(pose.position.y) > config.field.half_width
        ):
            raise ValueError(f"scenario {scenario.name}: robot at {pose.position} out of bounds")
    bx, by = scenario.ball_position
    if abs(bx) > config.field.half_length or abs(by) > config.field.half_width:
        raise ValueError(f"scenario {scenario.name}: ball out of bounds")
    for i in range(len(poses)):
        for j in range(i + 1, len(poses)):
            if rects_overlap(
                poses[i].position, poses[i].heading, half,
                poses[j].position, poses[j].heading, half,
            ):
                raise ValueError(
                    f"scenario {scenario.name}: robots {i} and {j} overlap at reset"
                )


def sample_random_scenario(
    config: SimConfig,
    rng: np.random.Generator,
    num_defenders: Optional[int] = None,
    max_attempts: int = 1000,
) -> ScenarioSpec:
    """Sample a non-overlapping random start inside the field.

    ``num_defenders`` defaults to the config's defender count; training may
    pass 0 to sample an empty-field start.
    """
    if num_defenders is None:
        num_defenders = config.num_defenders
    half = (config.robot.body_length / 2.0, config.robot.body_width / 2.0)
    margin = config.robot.half_diagonal
    hl, hw = config.field.half_length, config.field.half_width
    n_robots = config.num_agents + num_defenders
    for _ in range(max_attempts):
        poses = []
        ok = True
        for _ in range(n_robots):
            pose = Pose2D(
                Vec2(
                    rng.uniform(-hl + margin, hl - margin),
                    rng.uniform(-hw + margin, hw - margin),
                ),
                rng.uniform(-math.pi, math.pi),
            )
            for other in poses:
                if rects_overlap(
                    pose.position, pose.heading, half, other.position, other.heading, half
                ):
                    ok = False
                    break
            if not ok:
                break
            poses.append(pose)
        if not ok:
            continue
        ball = Vec2(
            rng.uniform(-hl + _BALL_GOAL_MARGIN, hl - _BALL_GOAL_MARGIN),
            rng.uniform(-hw + _BALL_EDGE_MARGIN, hw - _BALL_EDGE_MARGIN),
        )
        if any(point_in_rect(p.position, p.heading, half[0], half[1], ball) for p in poses):
            continue
        return ScenarioSpec(
            name="random_train",
            agent_poses=poses[: config.num_agents],
            ball_position=ball,
            defender_poses=poses[config.num_agents :],
        )
    raise RuntimeError("failed to sample a non-overlapping random scenario")


# --- serialization ---------------------------------------------------------


def scenario_to_dict(scenario: ScenarioSpec) -> dict:
    data = asdict(scenario)
    data["schema_version"] = CONFIG_SCHEMA_VERSION
    return data


def scenario_from_dict(data: dict) -> ScenarioSpec:
    data = dict(data)
    version = data.pop("schema_version", None)
    if version != CONFIG_SCHEMA_VERSION:
        raise ValueError(
            f"scenario schema_version {version!r} not supported "
            f"(expected {CONFIG_SCHEMA_VERSION!r})"
        )

    def pose(d):
        return Pose2D(Vec2(*d["position"]), d["heading"])

    return ScenarioSpec(
        name=data["name"],
        agent_poses=[pose(p) for p in data["agent_poses"]],
        ball_position=Vec2(*data["ball_position"]),
        defender_poses=[pose(p) for p in data.get("defender_poses", [])],
    )


def save_scenario(scenario: ScenarioSpec, path) -> None:
    Path(path).write_text(json.dumps(scenario_to_dict(scenario), indent=2) + "\n")


def load_scenario(path) -> ScenarioSpec:
    return scenario_from_dict(json.loads(Path(path).read_text()))
