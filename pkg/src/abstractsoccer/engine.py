"""Vectorized multi-world engine: struct-of-arrays stepping in numpy.

Semantically mirrors the scalar dynamics in :mod:`.dynamics` (same update
order, same per-world rng streams) while stepping many independent worlds
per call.  This is the throughput surface used by the benchmark and the
training harness; the scalar path remains the reference implementation.
"""

from __future__ import annotations

import math
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .dynamics import CONTACT_EPS, BallState, RobotState, WorldState
from .env import (
    DEFAULT_REWARDS,
    RewardWeights,
    build_observation,
    observation_size,
    obs_layout_version,
)
from .geometry import Pose2D, Vec2
from .model import SimConfig, attacked_goal_center
from .scenarios import ScenarioSpec, get_scenario, sample_random_scenario, validate_scenario

TWO_PI = 2.0 * math.pi


def _norm_angle(theta: np.ndarray) -> np.ndarray:
    out = theta - TWO_PI * np.round(theta / TWO_PI)
    out[out <= -math.pi] += TWO_PI
    return out


class VecSoccerEnv:
    """Batch of independent worlds with optional auto-reset.

    World ``w`` is seeded with ``base_seed + w`` using the same seed
    derivation as the scalar :func:`abstractsoccer.env.reset`, so a scalar
    environment run with the same seed reproduces the same episode.
    """

    def __init__(
        self,
        config: SimConfig,
        n_worlds: int,
        scenario: str | ScenarioSpec = "random_train",
        weights: RewardWeights = DEFAULT_REWARDS,
        auto_reset: bool = False,
        defender_prob: Optional[float] = None,
    ):
        self.config = config
        self.n_worlds = n_worlds
        self.scenario = scenario
        self.weights = weights
        self.auto_reset = auto_reset
        self.defender_prob = defender_prob
        self.num_agents = config.num_agents
        self.max_defenders = config.num_defenders
        self.n_robots = self.num_agents + self.max_defenders
        self.obs_size = observation_size(config)
        self.layout_version = obs_layout_version(config)

        w, r = n_worlds, self.n_robots
        self.pos = np.zeros((w, r, 2))
        self.heading = np.zeros((w, r))
        self.kick_timer = np.zeros((w, r))
        self.last_disp = np.zeros((w, r, 2))
        self.active = np.zeros((w, r), dtype=bool)
        self.ball_pos = np.zeros((w, 2))
        self.ball_vel = np.zeros((w, 2))
        self.steps = np.zeros(w, dtype=np.int64)
        self.dyn_rngs: List[np.random.Generator] = [None] * w  # type: ignore[list-item]
        self.obs_rngs: List[np.random.Generator] = [None] * w  # type: ignore[list-item]

    # -- reset --------------------------------------------------------------

    def _reset_world(self, w: int, seed: int) -> None:
        config = self.config
        dyn_seed, obs_seed, init_seed = np.random.SeedSequence(seed).spawn(3)
        self.dyn_rngs[w] = np.random.default_rng(dyn_seed)
        self.obs_rngs[w] = np.random.default_rng(obs_seed)
        scenario = self.scenario
        if isinstance(scenario, str):
            if scenario == "random_train":
                init_rng = np.random.default_rng(init_seed)
                n_def = self.max_defenders
                if self.defender_prob is not None:
                    n_def = int(init_rng.uniform() < self.defender_prob) * self.max_defenders
                scenario = sample_random_scenario(config, init_rng, num_defenders=n_def)
            else:
                scenario = get_scenario(scenario)
        validate_scenario(scenario, config)
        poses = list(scenario.agent_poses) + list(scenario.defender_poses)
        self.active[w] = False
        for i, pose in enumerate(poses):
            self.pos[w, i] = (pose.position.x, pose.position.y)
            self.heading[w, i] = pose.heading
            self.active[w, i] = True
        for i in range(len(poses), self.n_robots):
            self.pos[w, i] = 0.0
            self.heading[w, i] = 0.0
        self.kick_timer[w] = 0.0
        self.last_disp[w] = 0.0
        self.ball_pos[w] = (scenario.ball_position.x, scenario.ball_position.y)
        self.ball_vel[w] = 0.0
        self.steps[w] = 0

    def reset(self, base_seed: int = 0, seeds: Optional[Sequence[int]] = None) -> np.ndarray:
        if seeds is None:
            seeds = [base_seed + w for w in range(self.n_worlds)]
        if len(seeds) != self.n_worlds:
            raise ValueError("one seed per world required")
        for w, seed in enumerate(seeds):
            self._reset_world(w, int(seed))
        return self.build_observations()

    # -- stepping -----------------------------------------------------------

    def step(self, actions: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray, Dict]:
        """Advance every world one timestep.

        ``actions`` has shape (n_worlds, num_agents, 5).  Returns
        ``(observations, rewards, terminated, truncated, info)``; with
        auto-reset enabled, observations of finished worlds belong to the
        fresh episode and the final observations are in
        ``info["terminal_observations"]``.
        """
        actions = np.asarray(actions, dtype=float)
        if actions.shape != (self.n_worlds, self.num_agents, 5):
            raise ValueError(
                f"actions shape {actions.shape}, expected "
                f"{(self.n_worlds, self.num_agents, 5)}"
            )
        config = self.config
        spec = config.robot
        dt = config.dt
        hl_field = config.field.half_length
        hw_field = config.field.half_width
        half_len = spec.body_length / 2.0
        half_wid = spec.body_width / 2.0
        prev_ball = self.ball_pos.copy()
        prev_agent_pos = (
            self.pos[:, : self.num_agents, :].copy()
            if self.weights.approach_shaping
            else None
        )
        clamped = np.clip(actions, -1.0, 1.0)
        kicks = np.zeros((self.n_worlds, self.num_agents), dtype=bool)
        pushes = np.zeros((self.n_worlds, self.num_agents), dtype=bool)

        for i in range(self.num_agents):
            a = clamped[:, i, :]
            frozen = self.kick_timer[:, i] > 0.0
            stand = (actions[:, i, 4] > 0.0) & ~frozen
            moving = ~frozen & ~stand
            c = np.cos(self.heading[:, i])
            s = np.sin(self.heading[:, i])
            dxl = a[:, 0] * spec.max_forward_speed * dt
            dyl = a[:, 1] * spec.max_lateral_speed * dt
            nx = np.clip(self.pos[:, i, 0] + c * dxl - s * dyl, -hl_field, hl_field)
            ny = np.clip(self.pos[:, i, 1] + s * dxl + c * dyl, -hw_field, hw_field)
            nh = _norm_angle(self.heading[:, i] + a[:, 2] * spec.max_angular_speed * dt)
            self.last_disp[:, i, 0] = np.where(moving, nx - self.pos[:, i, 0], 0.0)
            self.last_disp[:, i, 1] = np.where(moving, ny - self.pos[:, i, 1], 0.0)
            self.pos[:, i, 0] = np.where(moving, nx, self.pos[:, i, 0])
            self.pos[:, i, 1] = np.where(moving, ny, self.pos[:, i, 1])
            self.heading[:, i] = np.where(moving, nh, self.heading[:, i])
            self.kick_timer[:, i] = np.where(
                frozen, np.maximum(0.0, self.kick_timer[:, i] - dt), self.kick_timer[:, i]
            )

            # kick: noiseless, along the heading, only when in range and idle
            delta = self.ball_pos - self.pos[:, i]
            dist = np.hypot(delta[:, 0], delta[:, 1])
            kick_mask = (
                (actions[:, i, 3] > 0.0)
                & (self.kick_timer[:, i] <= 0.0)
                & (dist <= spec.kick_range)
            )
            if kick_mask.any():
                ch = np.cos(self.heading[:, i][kick_mask])
                sh = np.sin(self.heading[:, i][kick_mask])
                self.ball_vel[kick_mask, 0] = spec.kick_speed * ch
                self.ball_vel[kick_mask, 1] = spec.kick_speed * sh
                self.kick_timer[kick_mask, i] = spec.kick_duration
                kicks[:, i] = kick_mask

            # push: displacement-driven, optional uniform contact noise
            c = np.cos(self.heading[:, i])
            s = np.sin(self.heading[:, i])
            delta = self.ball_pos - self.pos[:, i]
            lx = c * delta[:, 0] + s * delta[:, 1]
            ly = -s * delta[:, 0] + c * delta[:, 1]
            disp = self.last_disp[:, i]
            disp_norm = np.hypot(disp[:, 0], disp[:, 1])
            push_mask = (
                ~kick_mask
                & (disp_norm > 0.0)
                & (np.abs(lx) <= half_len)
                & (np.abs(ly) <= half_wid)
            )
            if push_mask.any():
                idx = np.nonzero(push_mask)[0]
                angles = np.arctan2(disp[idx, 1], disp[idx, 0])
                speeds = np.full(idx.shape, spec.push_speed)
                if config.ball_contact_noise:
                    na = config.contact_noise_angle
                    f = config.contact_noise_speed_frac
                    for j, w in enumerate(idx):
                        rng = self.dyn_rngs[w]
                        angles[j] += rng.uniform(-na, na)
                        speeds[j] *= rng.uniform(1.0 - f, 1.0 + f)
                dirx = np.cos(angles)
                diry = np.sin(angles)
                # expel the ball just past the rectangle along the push direction
                ldx = c[idx] * dirx + s[idx] * diry
                ldy = -s[idx] * dirx + c[idx] * diry
                with np.errstate(divide="ignore"):
                    tx = np.where(ldx != 0.0, half_len / np.abs(ldx), np.inf)
                    ty = np.where(ldy != 0.0, half_wid / np.abs(ldy), np.inf)
                t = np.minimum(tx, ty) + CONTACT_EPS
                self.ball_pos[idx, 0] = self.pos[idx, i, 0] + dirx * t
                self.ball_pos[idx, 1] = self.pos[idx, i, 1] + diry * t
                self.ball_vel[idx, 0] = dirx * speeds
                self.ball_vel[idx, 1] = diry * speeds
                pushes[:, i] = push_mask

        # static defender reflection
        for d in range(self.num_agents, self.n_robots):
            speed = np.hypot(self.ball_vel[:, 0], self.ball_vel[:, 1])
            c = np.cos(self.heading[:, d])
            s = np.sin(self.heading[:, d])
            delta = self.ball_pos - self.pos[:, d]
            lx = c * delta[:, 0] + s * delta[:, 1]
            ly = -s * delta[:, 0] + c * delta[:, 1]
            hit = (
                self.active[:, d]
                & (speed > 0.0)
                & (np.abs(lx) <= half_len)
                & (np.abs(ly) <= half_wid)
            )
            if not hit.any():
                continue
            idx = np.nonzero(hit)[0]
            vlx = c[idx] * self.ball_vel[idx, 0] + s[idx] * self.ball_vel[idx, 1]
            vly = -s[idx] * self.ball_vel[idx, 0] + c[idx] * self.ball_vel[idx, 1]
            x_face = np.abs(lx[idx]) / half_len >= np.abs(ly[idx]) / half_wid
            rest = self.config.defender_restitution
            vlx = np.where(x_face, -rest * vlx, vlx)
            vly = np.where(x_face, vly, -rest * vly)
            px = np.where(x_face, np.copysign(half_len + CONTACT_EPS, lx[idx]), lx[idx])
            py = np.where(x_face, ly[idx], np.copysign(half_wid + CONTACT_EPS, ly[idx]))
            self.ball_pos[idx, 0] = self.pos[idx, d, 0] + c[idx] * px - s[idx] * py
            self.ball_pos[idx, 1] = self.pos[idx, d, 1] + s[idx] * px + c[idx] * py
            self.ball_vel[idx, 0] = c[idx] * vlx - s[idx] * vly
            self.ball_vel[idx, 1] = s[idx] * vlx + c[idx] * vly

        # ball integration: advance then decelerate toward rest
        self.ball_pos += self.ball_vel * dt
        speed = np.hypot(self.ball_vel[:, 0], self.ball_vel[:, 1])
        new_speed = np.maximum(0.0, speed - config.ball_deceleration * dt)
        scale = np.where(speed > 0.0, new_speed / np.where(speed > 0.0, speed, 1.0), 0.0)
        self.ball_vel *= scale[:, None]

        self.steps += 1
        elapsed = self.steps * dt

        goal_half = config.field.goal_width / 2.0
        goal = (self.ball_pos[:, 0] > hl_field) & (np.abs(self.ball_pos[:, 1]) < goal_half)
        inside = (np.abs(self.ball_pos[:, 0]) <= hl_field) & (
            np.abs(self.ball_pos[:, 1]) <= hw_field
        )
        either_goal = (np.abs(self.ball_pos[:, 0]) > hl_field) & (
            np.abs(self.ball_pos[:, 1]) < goal_half
        )
        oob = ~goal & ~inside & ~either_goal
        terminated = goal | oob
        truncated = ~terminated & (elapsed >= config.episode_timeout)

        goal_center = attacked_goal_center(config.field)
        scale_len = config.field.length

        def potential(ball_xy: np.ndarray) -> np.ndarray:
            return -np.hypot(ball_xy[:, 0] - goal_center.x, ball_xy[:, 1] - goal_center.y) / scale_len

        rewards = (
            self.weights.time_penalty
            + self.weights.goal * goal
            + self.weights.out_of_bounds * oob
            + self.weights.shaping * (potential(self.ball_pos) - potential(prev_ball))
        )
        if self.weights.approach_shaping:

            def approach(agent_xy: np.ndarray, ball_xy: np.ndarray) -> np.ndarray:
                dists = np.hypot(
                    agent_xy[:, :, 0] - ball_xy[:, None, 0],
                    agent_xy[:, :, 1] - ball_xy[:, None, 1],
                )
                return -dists.min(axis=1) / scale_len

            rewards = rewards + self.weights.approach_shaping * (
                approach(self.pos[:, : self.num_agents, :], self.ball_pos)
                - approach(prev_agent_pos, prev_ball)
            )

        info: Dict = {
            "goal_scored": goal,
            "out_of_bounds": oob,
            "kicks": kicks,
            "pushes": pushes,
            "elapsed": elapsed,
        }
        done = terminated | truncated
        if self.auto_reset and done.any():
            # Final-step observations only for finished worlds, built with
            # that world's own observation stream so running worlds consume
            # no extra randomness.
            terminal_obs: List[Optional[np.ndarray]] = [None] * self.n_worlds
            for w in np.nonzero(done)[0]:
                state = self.world_state(w)
                terminal_obs[w] = np.stack(
                    [
                        build_observation(state, i, config, self.obs_rngs[w])
                        for i in range(self.num_agents)
                    ]
                )
                new_seed = int(self.dyn_rngs[w].integers(0, 2**63))
                self._reset_world(w, new_seed)
            info["terminal_observations"] = terminal_obs
        observations = self.build_observations()
        return observations, rewards, terminated, truncated, info

    # -- observations -------------------------------------------------------

    def build_observations(self) -> np.ndarray:
        """(n_worlds, num_agents, obs_size) egocentric observations."""
        config = self.config
        spec = config.robot
        scale = config.field.length
        noisy = config.observation_noise
        obs = np.zeros((self.n_worlds, self.num_agents, self.obs_size))
        goal = attacked_goal_center(config.field)
        own_goal = (-goal.x, goal.y)
        elapsed_frac = (self.steps * config.dt) / config.episode_timeout
        for i in range(self.num_agents):
            px = self.pos[:, i, 0]
            py = self.pos[:, i, 1]
            h = self.heading[:, i]
            c = np.cos(h)
            s = np.sin(h)

            def ego(tx, ty, w_idx=None):
                dx = tx - (px if w_idx is None else px[w_idx])
                dy = ty - (py if w_idx is None else py[w_idx])
                cc = c if w_idx is None else c[w_idx]
                ss = s if w_idx is None else s[w_idx]
                return cc * dx + ss * dy, -ss * dx + cc * dy

            def noisy_point(xy: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
                tx, ty = xy[:, 0], xy[:, 1]
                if noisy:
                    tx = tx.copy()
                    ty = ty.copy()
                    std = config.observation_noise_std
                    for w in range(self.n_worlds):
                        dxy = self.obs_rngs[w].normal(0.0, std, 2)
                        tx[w] += dxy[0]
                        ty[w] += dxy[1]
                return tx, ty

            obs[:, i, 0] = px / scale
            obs[:, i, 1] = py / scale
            obs[:, i, 2] = s
            obs[:, i, 3] = c
            bx, by = ego(*noisy_point(self.ball_pos))
            obs[:, i, 4] = bx / scale
            obs[:, i, 5] = by / scale
            obs[:, i, 6] = (c * self.ball_vel[:, 0] + s * self.ball_vel[:, 1]) / spec.kick_speed
            obs[:, i, 7] = (-s * self.ball_vel[:, 0] + c * self.ball_vel[:, 1]) / spec.kick_speed
            k = 8
            for other in range(self.num_agents):
                if other == i:
                    continue
                mx, my = ego(*noisy_point(self.pos[:, other]))
                obs[:, i, k] = mx / scale
                obs[:, i, k + 1] = my / scale
                k += 2
            for d in range(self.num_agents, self.n_robots):
                present = self.active[:, d]
                if present.any():
                    if noisy:
                        # Noise draws only for worlds where the defender exists,
                        # matching the scalar draw order.
                        tx = self.pos[:, d, 0].copy()
                        ty = self.pos[:, d, 1].copy()
                        std = config.observation_noise_std
                        for w in np.nonzero(present)[0]:
                            dxy = self.obs_rngs[w].normal(0.0, std, 2)
                            tx[w] += dxy[0]
                            ty[w] += dxy[1]
                        dx_e, dy_e = ego(tx, ty)
                    else:
                        dx_e, dy_e = ego(self.pos[:, d, 0], self.pos[:, d, 1])
                    obs[:, i, k] = np.where(present, dx_e / scale, 0.0)
                    obs[:, i, k + 1] = np.where(present, dy_e / scale, 0.0)
                    obs[:, i, k + 2] = present.astype(float)
                k += 3
            gx, gy = ego(goal.x, goal.y)
            obs[:, i, k] = gx / scale
            obs[:, i, k + 1] = gy / scale
            ox, oy = ego(own_goal[0], own_goal[1])
            obs[:, i, k + 2] = ox / scale
            obs[:, i, k + 3] = oy / scale
            if spec.kick_duration > 0:
                obs[:, i, k + 4] = self.kick_timer[:, i] / spec.kick_duration
            obs[:, i, k + 5] = elapsed_frac
        return obs

    # -- interop with the scalar path ---------------------------------------

    def world_state(self, w: int) -> WorldState:
        """Dataclass view of world ``w`` (agents plus active defenders)."""
        robots = []
        for i in range(self.n_robots):
            if not self.active[w, i]:
                continue
            robots.append(
                RobotState(
                    pose=Pose2D(Vec2(*self.pos[w, i]), self.heading[w, i]),
                    kick_timer=float(self.kick_timer[w, i]),
                    last_displacement=Vec2(*self.last_disp[w, i]),
                )
            )
        state = WorldState(
            robots=robots,
            ball=BallState(Vec2(*self.ball_pos[w]), Vec2(*self.ball_vel[w])),
            elapsed=float(self.steps[w] * self.config.dt),
            step_count=int(self.steps[w]),
        )
        state.rng.bit_generator.state = self.dyn_rngs[w].bit_generator.state
        return state
