"""Training hyperparameters with light validation."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Optional, Tuple


@dataclass(frozen=True)
class PPOHyperparams:
    discount: float = 0.995
    gae_lambda: float = 0.95
    clip_epsilon: float = 0.3
    learning_rate: float = 1e-3
    rollout_length: int = 64
    minibatch_size: int = 1024
    epochs_per_update: int = 10
    entropy_coef: float = 0.01
    value_coef: float = 0.5
    target_kl: Optional[float] = None
    train_defender_prob: float = 0.25
    normalize_obs: bool = False
    curriculum_frac: float = 0.0
    total_env_steps: int = 5_000_000
    n_worlds: int = 256
    hidden_sizes: Tuple[int, ...] = (64, 64)
    initial_action_std: float = 0.5
    min_action_std: float = 0.1
    final_lr_frac: float = 0.1
    max_grad_norm: float = 0.5
    seed: int = 0

    def __post_init__(self):
        if not (0.0 < self.discount <= 1.0):
            raise ValueError(f"discount must be in (0, 1], got {self.discount}")
        if not (0.0 < self.gae_lambda <= 1.0):
            raise ValueError(f"gae_lambda must be in (0, 1], got {self.gae_lambda}")
        if self.clip_epsilon <= 0.0:
            raise ValueError(f"clip_epsilon must be > 0, got {self.clip_epsilon}")
        if self.rollout_length < 1 or self.n_worlds < 1:
            raise ValueError("rollout_length and n_worlds must be >= 1")
        if self.minibatch_size < 1 or self.epochs_per_update < 1:
            raise ValueError("minibatch_size and epochs_per_update must be >= 1")
        if self.initial_action_std <= 0.0:
            raise ValueError("initial_action_std must be > 0")
        if not (0.0 < self.min_action_std <= self.initial_action_std):
            raise ValueError("min_action_std must be in (0, initial_action_std]")
        if not (0.0 < self.final_lr_frac <= 1.0):
            raise ValueError("final_lr_frac must be in (0, 1]")
        if self.target_kl is not None and self.target_kl <= 0.0:
            raise ValueError("target_kl must be > 0 or None")
        if not (0.0 <= self.train_defender_prob <= 1.0):
            raise ValueError("train_defender_prob must be in [0, 1]")
        if not (0.0 <= self.curriculum_frac <= 1.0):
            raise ValueError("curriculum_frac must be in [0, 1]")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["hidden_sizes"] = list(self.hidden_sizes)
        return d
