"""The training loop: alternate collection and updates, track the best
deterministic-evaluation checkpoint, export it in the portable policy
format."""

from __future__ import annotations

import copy
import json
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional

import numpy as np
import torch

from abstractsoccer.engine import VecSoccerEnv
from abstractsoccer.env import obs_layout_version, observation_size
from abstractsoccer.model import SimConfig, get_preset
from abstractsoccer.policy import MlpPolicy, save_policy

from .collect import TRAIN_REWARDS, collect_rollouts, make_vec_env
from .curriculum import curriculum_progress, sample_easy_scenario
from .hyperparams import PPOHyperparams
from .nets import PolicyNet, ValueNet, export_policy
from .normalize import RunningNormalizer
from .update import DivergenceError, ppo_update


@dataclass
class TrainReport:
    preset: str
    total_env_steps: int
    best_success_rate: float
    best_at_env_steps: int
    diverged: bool
    curve: List[dict] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "preset": self.preset,
            "total_env_steps": self.total_env_steps,
            "best_success_rate": self.best_success_rate,
            "best_at_env_steps": self.best_at_env_steps,
            "diverged": self.diverged,
            "curve": self.curve,
        }


def evaluate_deterministic(
    policy: PolicyNet,
    config: SimConfig,
    n_episodes: int = 100,
    base_seed: int = 10_000,
    defender_prob: float = 0.0,
    normalizer: Optional[RunningNormalizer] = None,
) -> float:
    """Success rate of ``tanh(mean)`` actions over seeded random starts.

    Runs one world per episode with no defenders by default (the
    open-field task), fully deterministic given the seeds.
    """
    env = VecSoccerEnv(
        config, n_episodes, "random_train", auto_reset=False,
        defender_prob=defender_prob,
    )
    observations = env.reset(base_seed)
    W, A = env.n_worlds, env.num_agents
    succeeded = np.zeros(W, dtype=bool)
    finished = np.zeros(W, dtype=bool)
    with torch.no_grad():
        for _ in range(config.max_steps):
            flat = observations.reshape(W * A, -1)
            if normalizer is not None:
                flat = normalizer.normalize(flat)
            flat = torch.as_tensor(flat, dtype=torch.float32)
            actions = policy.deterministic_action(flat).numpy().reshape(W, A, 5)
            observations, _, terminated, truncated, info = env.step(actions)
            succeeded |= info["goal_scored"] & ~finished
            finished |= terminated | truncated
            if finished.all():
                break
    return float(succeeded.mean())


def evaluate_policy_file(
    policy: MlpPolicy,
    config: SimConfig,
    n_episodes: int = 100,
    base_seed: int = 10_000,
    defender_prob: float = 0.0,
) -> float:
    """``evaluate_deterministic`` for an exported policy file.

    Uses the same environment, seeds and protocol, so a freshly exported
    network and its file score identically up to float32 kernel rounding.
    """
    env = VecSoccerEnv(
        config, n_episodes, "random_train", auto_reset=False,
        defender_prob=defender_prob,
    )
    observations = env.reset(base_seed)
    W, A = env.n_worlds, env.num_agents
    succeeded = np.zeros(W, dtype=bool)
    finished = np.zeros(W, dtype=bool)
    for _ in range(config.max_steps):
        flat = observations.reshape(W * A, -1).astype(np.float32)
        actions = policy.forward(flat).reshape(W, A, 5).astype(np.float64)
        observations, _, terminated, truncated, info = env.step(actions)
        succeeded |= info["goal_scored"] & ~finished
        finished |= terminated | truncated
        if finished.all():
            break
    return float(succeeded.mean())


def train(
    preset_name: str,
    hp: PPOHyperparams,
    out_policy_path,
    eval_every_updates: int = 5,
    eval_episodes: int = 100,
    curve_path=None,
    log=None,
) -> TrainReport:
    """Train under the named preset and write the best checkpoint.

    On numerical divergence the last finite checkpoint is still exported
    and the report is flagged.
    """
    config = get_preset(preset_name)
    torch.manual_seed(hp.seed)
    sample_gen = torch.Generator().manual_seed(hp.seed + 1)
    shuffle_gen = torch.Generator().manual_seed(hp.seed + 2)

    obs_size = observation_size(config)
    layout = obs_layout_version(config)
    policy = PolicyNet(
        obs_size, hp.hidden_sizes, hp.initial_action_std, hp.min_action_std
    )
    value = ValueNet(obs_size, hp.hidden_sizes)
    optimizer = torch.optim.Adam(
        list(policy.parameters()) + list(value.parameters()), lr=hp.learning_rate
    )

    env = make_vec_env(config, hp.n_worlds, defender_prob=hp.train_defender_prob)
    observations = env.reset(hp.seed * 1_000_003)
    normalizer = RunningNormalizer(obs_size) if hp.normalize_obs else None
    curriculum_rng = np.random.default_rng(hp.seed + 3)

    steps_per_rollout = hp.rollout_length * hp.n_worlds
    n_updates = max(1, hp.total_env_steps // steps_per_rollout)

    report = TrainReport(
        preset=preset_name,
        total_env_steps=0,
        best_success_rate=-1.0,
        best_at_env_steps=0,
        diverged=False,
    )
    best_state = copy.deepcopy(policy.state_dict())
    best_normalizer = copy.deepcopy(normalizer)
    env_steps = 0
    t0 = time.time()

    def run_eval(update_idx: int, diag=None):
        nonlocal best_state, best_normalizer
        rate = evaluate_deterministic(
            policy, config, eval_episodes, normalizer=normalizer
        )
        point = {
            "update": update_idx,
            "env_steps": env_steps,
            "success_rate": rate,
            "wall_seconds": round(time.time() - t0, 1),
        }
        if diag is not None:
            point.update(
                policy_loss=diag.policy_loss,
                value_loss=diag.value_loss,
                entropy=diag.entropy,
                clip_fraction=diag.clip_fraction,
                approx_kl=diag.approx_kl,
            )
        report.curve.append(point)
        if log:
            log(f"[{preset_name}] update {update_idx} steps {env_steps:,} "
                f"success {rate:.2f} ({point['wall_seconds']}s)")
        if rate > report.best_success_rate:
            report.best_success_rate = rate
            report.best_at_env_steps = env_steps
            best_state = copy.deepcopy(policy.state_dict())
            best_normalizer = copy.deepcopy(normalizer)
        return rate

    try:
        for update in range(1, n_updates + 1):
            # linear learning-rate anneal down to final_lr_frac of the start
            frac = 1.0 - (1.0 - hp.final_lr_frac) * (update - 1) / max(n_updates - 1, 1)
            for group in optimizer.param_groups:
                group["lr"] = hp.learning_rate * frac
            progress = curriculum_progress(update, n_updates, hp.curriculum_frac)
            if progress < 1.0 and curriculum_rng.random() >= progress:
                # curriculum rollout: fresh worlds from a lined-up shot
                spec = sample_easy_scenario(config, curriculum_rng, progress)
                easy_env = VecSoccerEnv(
                    config, hp.n_worlds, spec,
                    weights=TRAIN_REWARDS, auto_reset=True,
                )
                easy_obs = easy_env.reset(int(curriculum_rng.integers(2**31)))
                buffer, _, roll_stats = collect_rollouts(
                    policy, value, easy_env, easy_obs, hp, sample_gen, normalizer
                )
            else:
                buffer, observations, roll_stats = collect_rollouts(
                    policy, value, env, observations, hp, sample_gen, normalizer
                )
            env_steps += steps_per_rollout
            diag = ppo_update(buffer, policy, value, optimizer, hp, shuffle_gen)
            if update % eval_every_updates == 0 or update == n_updates:
                run_eval(update, diag)
    except DivergenceError as exc:
        report.diverged = True
        if log:
            log(f"[{preset_name}] aborted: {exc} {exc.diagnostics}")

    report.total_env_steps = env_steps
    if report.best_success_rate < 0:  # never evaluated (tiny runs)
        run_eval(0)

    snapshot = PolicyNet(obs_size, hp.hidden_sizes, hp.initial_action_std)
    snapshot.load_state_dict(best_state)
    exported = export_policy(
        snapshot,
        layout,
        normalizer=best_normalizer,
        metadata={
            "preset": preset_name,
            "train_env_steps": report.best_at_env_steps,
            "total_env_steps": report.total_env_steps,
            "success_rate": report.best_success_rate,
            "hyperparams": hp.to_dict(),
        },
    )
    save_policy(exported, out_policy_path)
    if curve_path is not None:
        Path(curve_path).write_text(json.dumps(report.to_dict(), indent=2) + "\n")
    return report
