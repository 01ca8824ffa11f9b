"""Cooperative environment boundary: reset/step, observations, shared reward.

Observation layout (per agent), all positions divided by the field length,
ball velocity divided by kick_speed:

    index  field
    0-1    own position (x, y)
    2-3    own heading (sin, cos)
    4-5    egocentric ball position
    6-7    egocentric ball velocity
    8-9    egocentric teammate position (one slot per other agent)
    ...    per defender slot: egocentric position (x, y), presence flag
    -6,-5  egocentric attacked-goal center
    -4,-3  egocentric own-goal center
    -2     kick-timer fraction
    -1     elapsed-time fraction

With observation noise enabled, zero-mean Gaussian noise is added to the
global positions of observed objects (ball, teammate, present defenders)
before the egocentric transform; the robot's own pose is exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .dynamics import BallState, RobotState, StepEvents, WorldState, step_world
from .geometry import Pose2D, Vec2, egocentric_transform
from .model import SimConfig, attacked_goal_center
from .scenarios import ScenarioSpec, get_scenario, validate_scenario

ACTION_SIZE = 5
ACTION_CHANNELS = ("forward", "lateral", "angular", "kick", "stand")

OBS_LAYOUT_FORMAT = "ego-v1:a{agents}d{defenders}"


def obs_layout_version(config: SimConfig) -> str:
    return OBS_LAYOUT_FORMAT.format(agents=config.num_agents, defenders=config.num_defenders)


def observation_size(config: SimConfig) -> int:
    return 4 + 2 + 2 + 2 * (config.num_agents - 1) + 3 * config.num_defenders + 2 + 2 + 1 + 1


@dataclass(frozen=True)
class RewardWeights:
    goal: float = 1.0
    out_of_bounds: float = -0.5
    time_penalty: float = -0.001
    shaping: float = 1.0
    # optional second potential term (nearest agent's distance to the
    # ball); off by default, used to densify early training signal
    approach_shaping: float = 0.0


DEFAULT_REWARDS = RewardWeights()


@dataclass(frozen=True)
class StepResult:
    observations: List[np.ndarray]
    reward: float
    terminated: bool
    truncated: bool
    events: StepEvents
    # Set only by auto-resetting batch steps: the observation of the final
    # state of the finished episode (observations then belong to the reset).
    terminal_observations: Optional[List[np.ndarray]] = None


@dataclass(frozen=True)
class EpisodeOutcome:
    success: bool
    time_to_score: Optional[float] = None
    failure_reason: Optional[str] = None  # "timeout" | "out_of_bounds"


def ball_potential(ball_position: Vec2, config: SimConfig) -> float:
    """Negative normalized distance from the ball to the attacked goal."""
    goal = attacked_goal_center(config.field)
    return -math.hypot(ball_position.x - goal.x, ball_position.y - goal.y) / config.field.length


def approach_potential(state: WorldState, config: SimConfig) -> float:
    """Negative normalized distance of the nearest teammate to the ball."""
    ball = state.ball.position
    dists = [
        math.hypot(r.pose.position.x - ball.x, r.pose.position.y - ball.y)
        for r in state.robots[: config.num_agents]
    ]
    return -min(dists) / config.field.length


def compute_reward(
    prev: WorldState,
    next_state: WorldState,
    events: StepEvents,
    config: SimConfig,
    weights: RewardWeights = DEFAULT_REWARDS,
) -> float:
    """Shared scalar reward: terminal events, time penalty, potential shaping."""
    reward = weights.time_penalty
    if events.goal_scored:
        reward += weights.goal
    if events.out_of_bounds:
        reward += weights.out_of_bounds
    reward += weights.shaping * (
        ball_potential(next_state.ball.position, config)
        - ball_potential(prev.ball.position, config)
    )
    if weights.approach_shaping:
        reward += weights.approach_shaping * (
            approach_potential(next_state, config)
            - approach_potential(prev, config)
        )
    return reward


def build_observation(
    state: WorldState,
    agent_index: int,
    config: SimConfig,
    rng: Optional[np.random.Generator] = None,
) -> np.ndarray:
    """Fixed-layout egocentric observation for one agent.

    ``rng`` is consumed only when ``config.observation_noise`` is set.
    """
    if not 0 <= agent_index < config.num_agents:
        raise IndexError(f"agent_index {agent_index} out of range")
    spec = config.robot
    scale = config.field.length
    me = state.robots[agent_index]
    pose = me.pose
    noisy = config.observation_noise
    if noisy and rng is None:
        raise ValueError("observation noise enabled but no rng supplied")

    def observed(point: Vec2) -> Vec2:
        if noisy:
            dx, dy = rng.normal(0.0, config.observation_noise_std, 2)
            point = Vec2(point.x + dx, point.y + dy)
        return egocentric_transform(pose, point)

    obs = np.empty(observation_size(config))
    obs[0] = pose.position.x / scale
    obs[1] = pose.position.y / scale
    obs[2] = math.sin(pose.heading)
    obs[3] = math.cos(pose.heading)
    ball = observed(state.ball.position)
    obs[4] = ball.x / scale
    obs[5] = ball.y / scale
    ball_vel = egocentric_transform(
        Pose2D(Vec2(0.0, 0.0), pose.heading), state.ball.velocity
    )
    obs[6] = ball_vel.x / spec.kick_speed
    obs[7] = ball_vel.y / spec.kick_speed
    k = 8
    for other in range(config.num_agents):
        if other == agent_index:
            continue
        mate = observed(state.robots[other].pose.position)
        obs[k] = mate.x / scale
        obs[k + 1] = mate.y / scale
        k += 2
    n_defenders = len(state.robots) - config.num_agents
    for d in range(config.num_defenders):
        if d < n_defenders:
            dpos = observed(state.robots[config.num_agents + d].pose.position)
            obs[k] = dpos.x / scale
            obs[k + 1] = dpos.y / scale
            obs[k + 2] = 1.0
        else:
            obs[k] = obs[k + 1] = obs[k + 2] = 0.0
        k += 3
    goal = attacked_goal_center(config.field)
    ego_goal = egocentric_transform(pose, goal)
    obs[k] = ego_goal.x / scale
    obs[k + 1] = ego_goal.y / scale
    own_goal = Vec2(-goal.x, goal.y)
    ego_own = egocentric_transform(pose, own_goal)
    obs[k + 2] = ego_own.x / scale
    obs[k + 3] = ego_own.y / scale
    obs[k + 4] = me.kick_timer / spec.kick_duration if spec.kick_duration > 0 else 0.0
    obs[k + 5] = state.elapsed / config.episode_timeout
    return obs


def _build_all_observations(
    state: WorldState, config: SimConfig, rng: Optional[np.random.Generator]
) -> List[np.ndarray]:
    return [build_observation(state, i, config, rng) for i in range(config.num_agents)]


def reset(
    scenario: ScenarioSpec | str,
    config: SimConfig,
    seed: int,
) -> Tuple[WorldState, List[np.ndarray], np.random.Generator]:
    """Build the initial world and observations for a seeded episode.

    Returns ``(state, observations, obs_rng)``.  The dynamics rng lives in
    the state; observation noise draws from the separate ``obs_rng`` so a
    replay driven by recorded actions stays bit-exact.
    """
    seed_seq = np.random.SeedSequence(seed)
    dyn_seed, obs_seed, init_seed = seed_seq.spawn(3)
    obs_rng = np.random.default_rng(obs_seed)
    if isinstance(scenario, str):
        scenario = get_scenario(scenario, config, np.random.default_rng(init_seed))
    validate_scenario(scenario, config)
    robots = [
        RobotState(pose=p)
        for p in list(scenario.agent_poses) + list(scenario.defender_poses)
    ]
    state = WorldState(
        robots=robots,
        ball=BallState(position=scenario.ball_position),
        rng=np.random.default_rng(dyn_seed),
    )
    return state, _build_all_observations(state, config, obs_rng), obs_rng


def env_step(
    state: WorldState,
    actions: Sequence[Sequence[float]],
    config: SimConfig,
    obs_rng: Optional[np.random.Generator] = None,
    weights: RewardWeights = DEFAULT_REWARDS,
) -> Tuple[WorldState, StepResult]:
    """One cooperative step; every agent receives the same reward scalar."""
    next_state, events = step_world(state, actions, config)
    terminated = events.goal_scored or events.out_of_bounds
    truncated = (not terminated) and next_state.elapsed >= config.episode_timeout
    reward = compute_reward(state, next_state, events, config, weights)
    observations = _build_all_observations(next_state, config, obs_rng)
    return next_state, StepResult(
        observations=observations,
        reward=reward,
        terminated=terminated,
        truncated=truncated,
        events=events,
    )


class SoccerEnv:
    """Single-world convenience wrapper around reset/env_step."""

    def __init__(self, config: SimConfig, scenario: ScenarioSpec | str = "random_train",
                 weights: RewardWeights = DEFAULT_REWARDS):
        self.config = config
        self.scenario = scenario
        self.weights = weights
        self.state: Optional[WorldState] = None
        self.obs_rng: Optional[np.random.Generator] = None
        self._done = False

    def reset(self, seed: int) -> List[np.ndarray]:
        self.state, observations, self.obs_rng = reset(self.scenario, self.config, seed)
        self._done = False
        return observations

    def step(self, actions: Sequence[Sequence[float]]) -> StepResult:
        if self.state is None:
            raise RuntimeError("step before reset")
        if self._done:
            raise RuntimeError("episode already finished; call reset")
        self.state, result = env_step(
            self.state, actions, self.config, self.obs_rng, self.weights
        )
        self._done = result.terminated or result.truncated
        return result

    def outcome(self, result: StepResult) -> EpisodeOutcome:
        """Terminal outcome for the step that ended the episode."""
        if result.events.goal_scored:
            return EpisodeOutcome(success=True, time_to_score=self.state.elapsed)
        if result.events.out_of_bounds:
            return EpisodeOutcome(success=False, failure_reason="out_of_bounds")
        return EpisodeOutcome(success=False, failure_reason="timeout")


@dataclass
class BatchEntry:
    state: WorldState
    obs_rng: np.random.Generator


def batch_step(
    worlds: List[WorldState],
    joint_actions: Sequence[Sequence[Sequence[float]]],
    config: SimConfig,
    obs_rngs: Optional[List[np.random.Generator]] = None,
    workers: int = 1,
    weights: RewardWeights = DEFAULT_REWARDS,
    auto_reset: bool = False,
    scenario: ScenarioSpec | str = "random_train",
) -> List[Tuple[WorldState, StepResult]]:
    """Elementwise env_step over a batch of independent worlds.

    ``workers`` only partitions the batch; results are identical to the
    sequential application regardless of the partitioning.  With
    ``auto_reset``, a finished world is immediately re-seeded (seed drawn
    from its own dynamics rng) and the step's observations are those of
    the fresh episode; the final observation of the finished episode is
    kept in ``StepResult.terminal_observations``.
    """
    if len(worlds) != len(joint_actions):
        raise ValueError("worlds and joint_actions must have equal length")
    if obs_rngs is not None and len(obs_rngs) != len(worlds):
        raise ValueError("obs_rngs must match worlds in length")
    n = len(worlds)
    chunk = max(1, math.ceil(n / max(1, workers)))
    results: List[Tuple[WorldState, StepResult]] = []
    for start in range(0, n, chunk):
        for i in range(start, min(start + chunk, n)):
            rng = obs_rngs[i] if obs_rngs is not None else None
            state, result = env_step(worlds[i], joint_actions[i], config, rng, weights)
            if auto_reset and (result.terminated or result.truncated):
                new_seed = int(state.rng.integers(0, 2**63))
                state, fresh_obs, new_obs_rng = reset(scenario, config, new_seed)
                result = StepResult(
                    observations=fresh_obs,
                    reward=result.reward,
                    terminated=result.terminated,
                    truncated=result.truncated,
                    events=result.events,
                    terminal_observations=result.observations,
                )
                if obs_rngs is not None:
                    obs_rngs[i] = new_obs_rng
            results.append((state, result))
    return results
