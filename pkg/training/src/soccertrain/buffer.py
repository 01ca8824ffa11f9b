"""Rollout storage and generalized advantage estimation.

Transitions from every (world, agent) pair share one buffer because all
agents act through the same network parameters.  Advantages respect
episode boundaries: no value flows across a terminal, while truncated
episodes bootstrap from the value of their final observation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class RolloutBuffer:
    """Shape convention: (T, N, ...) with N = n_worlds * n_agents lanes."""

    observations: np.ndarray  # (T, N, obs)
    z_samples: np.ndarray  # (T, N, act) pre-squash Gaussian samples
    log_probs: np.ndarray  # (T, N)
    values: np.ndarray  # (T, N)
    rewards: np.ndarray  # (T, N) bootstrap-adjusted at truncations
    dones: np.ndarray  # (T, N) episode ended after this step (either way)
    terminals: np.ndarray  # (T, N) ended by termination (no bootstrapping)
    last_values: np.ndarray  # (N,) value of the observation after step T-1
    advantages: np.ndarray = None
    returns: np.ndarray = None

    @property
    def n_transitions(self) -> int:
        return self.observations.shape[0] * self.observations.shape[1]

    def compute_gae(self, discount: float, lam: float) -> None:
        T, N = self.rewards.shape
        advantages = np.zeros((T, N), dtype=np.float64)
        gae = np.zeros(N, dtype=np.float64)
        next_value = self.last_values.astype(np.float64)
        for t in range(T - 1, -1, -1):
            # any done cuts the recursion: terminals bootstrap nothing, and
            # truncations already carry discount * V(final obs) inside
            # rewards[t], folded in at collection time
            live = 1.0 - self.dones[t]
            delta = self.rewards[t] + discount * next_value * live - self.values[t]
            gae = delta + discount * lam * live * gae
            advantages[t] = gae
            next_value = self.values[t]
        self.advantages = advantages
        self.returns = advantages + self.values

    def flat(self) -> dict:
        """Transitions flattened to (T*N, ...) for minibatching."""
        if self.advantages is None:
            raise ValueError("compute_gae must run before flattening")
        T, N = self.rewards.shape
        return {
            "observations": self.observations.reshape(T * N, -1),
            "z_samples": self.z_samples.reshape(T * N, -1),
            "log_probs": self.log_probs.reshape(T * N),
            "values": self.values.reshape(T * N),
            "advantages": self.advantages.reshape(T * N),
            "returns": self.returns.reshape(T * N),
        }
