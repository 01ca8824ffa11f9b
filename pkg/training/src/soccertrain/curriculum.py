"""Start-state curriculum for training.

Early rollouts start with the ball close to the goal and one agent lined
up behind it, so scoring happens within the first few hundred steps of
training instead of after millions of random-walk steps.  As training
progresses the sampler widens toward — and finally hands over to — the
plain random start distribution used by evaluation.
"""

from __future__ import annotations

import math

import numpy as np

from abstractsoccer.geometry import Pose2D, Vec2, point_in_rect
from abstractsoccer.model import SimConfig
from abstractsoccer.scenarios import ScenarioSpec, validate_scenario


def sample_easy_scenario(
    config: SimConfig,
    rng: np.random.Generator,
    progress: float,
    max_attempts: int = 200,
) -> ScenarioSpec:
    """A lined-up shot whose difficulty grows with ``progress`` in [0, 1].

    At progress 0 the ball sits 1.0-1.5 m in front of the goal with the
    first agent right behind it facing the goal; at progress 1 the ball
    can be anywhere up to deep in the defending half with a loosely
    aligned kicker.  No defenders.
    """
    progress = min(max(progress, 0.0), 1.0)
    hl, hw = config.field.half_length, config.field.half_width
    margin = config.robot.half_diagonal
    half = (config.robot.body_length / 2.0, config.robot.body_width / 2.0)
    max_ball_depth = 1.5 + (2.0 * hl - 3.0) * progress
    max_lateral = 0.5 + (hw - 1.0) * progress
    jitter = 0.2 + 0.6 * progress

    for _ in range(max_attempts):
        ball = Vec2(
            hl - rng.uniform(1.0, max_ball_depth),
            rng.uniform(-max_lateral, max_lateral),
        )
        to_goal = math.atan2(-ball.y, hl - ball.x)
        dist = rng.uniform(margin + 0.05, margin + 0.6 + 1.0 * progress)
        kicker = Pose2D(
            Vec2(
                ball.x - dist * math.cos(to_goal),
                ball.y - dist * math.sin(to_goal),
            ),
            to_goal + rng.uniform(-jitter, jitter),
        )
        mate = Pose2D(
            Vec2(
                rng.uniform(-hl + margin, hl - margin),
                rng.uniform(-hw + margin, hw - margin),
            ),
            rng.uniform(-math.pi, math.pi),
        )
        spec = ScenarioSpec(
            name="easy_shot",
            agent_poses=[kicker, mate],
            ball_position=ball,
            defender_poses=[],
        )
        if any(
            point_in_rect(p.position, p.heading, half[0], half[1], ball)
            for p in spec.agent_poses
        ):
            continue
        try:
            validate_scenario(spec, config)
        except ValueError:
            continue
        return spec
    raise RuntimeError("failed to sample a valid curriculum scenario")


def curriculum_progress(update: int, n_updates: int, frac: float) -> float:
    """Fraction of the way through the curriculum phase (1.0 = finished)."""
    if frac <= 0.0:
        return 1.0
    horizon = max(1.0, frac * n_updates)
    return min(1.0, (update - 1) / horizon)
