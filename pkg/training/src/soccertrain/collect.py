"""Rollout collection through the environment's batch boundary."""

from __future__ import annotations

from typing import Optional

import numpy as np
import torch

from abstractsoccer.engine import VecSoccerEnv
from abstractsoccer.env import RewardWeights, obs_layout_version
from abstractsoccer.model import SimConfig

# Training-time reward: the evaluation terms scaled x10 (better value-net
# conditioning at these tiny per-step magnitudes) plus an approach term
# (nearest agent's distance to the ball) that densifies the early gradient.
# Both extras are potential-based/affine, so optimal behavior is unchanged;
# evaluation success only ever counts goals.
TRAIN_REWARDS = RewardWeights(
    goal=10.0,
    out_of_bounds=-5.0,
    time_penalty=-0.01,
    shaping=10.0,
    approach_shaping=20.0,
)

from .buffer import RolloutBuffer
from .hyperparams import PPOHyperparams
from .nets import ACTION_SIZE, PolicyNet, ValueNet
from .normalize import RunningNormalizer


def make_vec_env(
    config: SimConfig, n_worlds: int, defender_prob: Optional[float] = 0.5
) -> VecSoccerEnv:
    """Randomly initialized training worlds with auto-reset.

    Defender presence is randomized per episode (default 50%), so one
    policy learns both the open-field and the blocked variants.
    """
    return VecSoccerEnv(
        config,
        n_worlds,
        "random_train",
        weights=TRAIN_REWARDS,
        auto_reset=True,
        defender_prob=defender_prob,
    )


def collect_rollouts(
    policy: PolicyNet,
    value: ValueNet,
    env: VecSoccerEnv,
    observations: np.ndarray,
    hp: PPOHyperparams,
    generator: torch.Generator,
    normalizer: Optional[RunningNormalizer] = None,
) -> tuple[RolloutBuffer, np.ndarray, dict]:
    """Fill one buffer of ``rollout_length`` steps from every world.

    ``observations`` is the (n_worlds, n_agents, obs) array to start from;
    the matching array for the next call is returned alongside the buffer.
    Both agents run the identical network, and their transitions land in
    one pooled buffer.  With a ``normalizer``, its statistics are updated
    from every raw observation and the buffer stores normalized ones.
    """
    if env.layout_version != obs_layout_version(env.config):
        raise ValueError("environment layout drifted mid-training")
    T = hp.rollout_length
    W = env.n_worlds
    A = env.num_agents
    N = W * A
    obs_size = env.obs_size

    buf_obs = np.zeros((T, N, obs_size), dtype=np.float32)
    buf_z = np.zeros((T, N, ACTION_SIZE), dtype=np.float32)
    buf_logp = np.zeros((T, N), dtype=np.float32)
    buf_val = np.zeros((T, N), dtype=np.float32)
    buf_rew = np.zeros((T, N), dtype=np.float32)
    buf_done = np.zeros((T, N), dtype=np.float32)
    buf_term = np.zeros((T, N), dtype=np.float32)
    episodes_done = 0
    episode_successes = 0

    def net_input(raw: np.ndarray) -> np.ndarray:
        return normalizer.normalize(raw) if normalizer is not None else raw

    with torch.no_grad():
        for t in range(T):
            raw_obs = observations.reshape(N, obs_size)
            if normalizer is not None:
                normalizer.update(raw_obs)
            obs_in = net_input(raw_obs).astype(np.float32)
            flat_obs = torch.as_tensor(obs_in, dtype=torch.float32)
            action, z, logp = policy.sample(flat_obs, generator)
            values = value(flat_obs)

            actions_np = action.numpy().reshape(W, A, ACTION_SIZE)
            next_obs, rewards, terminated, truncated, info = env.step(actions_np)

            buf_obs[t] = obs_in
            buf_z[t] = z.numpy()
            buf_logp[t] = logp.numpy()
            buf_val[t] = values.numpy()
            # the shared scalar reward reaches every agent lane of the world
            rew = np.repeat(rewards, A).astype(np.float32)
            done = np.repeat((terminated | truncated).astype(np.float32), A)
            term = np.repeat(terminated.astype(np.float32), A)
            buf_done[t] = done
            buf_term[t] = term

            truncated_worlds = np.nonzero(truncated)[0]
            if truncated_worlds.size:
                # bootstrap the cut-off return from the final observation
                terminal_obs = info["terminal_observations"]
                for w in truncated_worlds:
                    v_final = value(
                        torch.as_tensor(
                            net_input(terminal_obs[w]).astype(np.float32)
                        )
                    ).numpy()
                    rew[w * A : (w + 1) * A] += hp.discount * v_final
            buf_rew[t] = rew

            episodes_done += int(terminated.sum() + truncated.sum())
            episode_successes += int(info["goal_scored"].sum())
            observations = next_obs

        flat_obs = torch.as_tensor(
            net_input(observations.reshape(N, obs_size)).astype(np.float32)
        )
        last_values = value(flat_obs).numpy()

    buffer = RolloutBuffer(
        observations=buf_obs,
        z_samples=buf_z,
        log_probs=buf_logp,
        values=buf_val,
        rewards=buf_rew,
        dones=buf_done,
        terminals=buf_term,
        last_values=last_values,
    )
    buffer.compute_gae(hp.discount, hp.gae_lambda)
    stats = {
        "episodes": episodes_done,
        "successes": episode_successes,
        "mean_reward": float(buf_rew.mean()),
    }
    return buffer, observations, stats
