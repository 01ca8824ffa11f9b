"""Policy and value networks plus the squashed-Gaussian action head.

The policy body uses tanh activations throughout, including on the mean
head, so its deterministic action ``tanh(mean_logits)`` is exactly the
forward pass of the portable policy-file format it exports to.
"""

from __future__ import annotations

import math
from typing import List, Sequence, Tuple

import numpy as np
import torch
from torch import nn

from abstractsoccer.policy import MlpPolicy

ACTION_SIZE = 5
_SQUASH_EPS = 1e-6


def _mlp(sizes: Sequence[int]) -> nn.Sequential:
    layers: List[nn.Module] = []
    for a, b in zip(sizes[:-1], sizes[1:]):
        layers.append(nn.Linear(a, b))
        layers.append(nn.Tanh())
    layers.pop()  # final layer stays linear; callers squash as needed
    return nn.Sequential(*layers)


class PolicyNet(nn.Module):
    """Gaussian policy with tanh squashing and state-independent log-std."""

    def __init__(
        self,
        obs_size: int,
        hidden_sizes: Sequence[int],
        initial_std: float,
        min_std: float = 1e-4,
    ):
        super().__init__()
        self.obs_size = obs_size
        self.hidden_sizes = tuple(hidden_sizes)
        self.min_log_std = math.log(min_std)
        self.body = _mlp([obs_size, *hidden_sizes, ACTION_SIZE])
        self.log_std = nn.Parameter(
            torch.full((ACTION_SIZE,), math.log(initial_std))
        )
        with torch.no_grad():
            # bias the stand channel off at init so exploration moves;
            # a fresh policy would otherwise freeze on ~half its steps
            self.body[-1].bias[ACTION_SIZE - 1] = -1.0

    def mean_logits(self, obs: torch.Tensor) -> torch.Tensor:
        return self.body(obs)

    def clamped_log_std(self) -> torch.Tensor:
        # floor the std so exploration cannot collapse mid-training;
        # evaluation uses the deterministic mean and is unaffected
        return self.log_std.clamp(min=self.min_log_std)

    def deterministic_action(self, obs: torch.Tensor) -> torch.Tensor:
        return torch.tanh(self.mean_logits(obs))

    def sample(self, obs: torch.Tensor, generator: torch.Generator) -> Tuple[torch.Tensor, torch.Tensor, torch.Tensor]:
        """Returns (action in [-1, 1], pre-squash sample z, log-prob)."""
        mean = self.mean_logits(obs)
        std = self.clamped_log_std().exp()
        noise = torch.randn(mean.shape, generator=generator)
        z = mean + std * noise
        action = torch.tanh(z)
        return action, z, self.log_prob_of(obs, z, mean=mean)

    def log_prob_of(
        self, obs: torch.Tensor, z: torch.Tensor, mean: torch.Tensor = None
    ) -> torch.Tensor:
        """Log-density of the squashed action identified by its pre-squash z."""
        if mean is None:
            mean = self.mean_logits(obs)
        log_std = self.clamped_log_std()
        std = log_std.exp()
        normal = -0.5 * (((z - mean) / std) ** 2) - log_std - 0.5 * math.log(2 * math.pi)
        correction = torch.log(1.0 - torch.tanh(z) ** 2 + _SQUASH_EPS)
        return (normal - correction).sum(dim=-1)

    def entropy_estimate(self, log_prob: torch.Tensor) -> torch.Tensor:
        # the squashed density has no closed-form entropy; the standard
        # single-sample estimator is -E[log pi]
        return -log_prob.mean()


class ValueNet(nn.Module):
    def __init__(self, obs_size: int, hidden_sizes: Sequence[int]):
        super().__init__()
        self.body = _mlp([obs_size, *hidden_sizes, 1])

    def forward(self, obs: torch.Tensor) -> torch.Tensor:
        return self.body(obs).squeeze(-1)


def export_policy(
    net: PolicyNet,
    obs_layout_version: str,
    metadata: dict = None,
    normalizer=None,
) -> MlpPolicy:
    """Deterministic snapshot of the policy in the portable file format.

    The portable format applies tanh after every layer, which matches the
    network body exactly, so the exported file reproduces
    ``deterministic_action`` up to float32 kernel rounding.

    A running observation normalizer, if the policy was trained with one,
    is folded into the first linear layer (``W' = W/s``,
    ``b' = b - W (m/s)``), so the file still consumes raw observations.
    The fold drops the normalizer's outlier clip, which never binds on
    in-distribution play.
    """
    weights, biases = [], []
    for module in net.body:
        if isinstance(module, nn.Linear):
            weights.append(module.weight.detach().numpy().astype(np.float64))
            biases.append(module.bias.detach().numpy().astype(np.float64))
    if normalizer is not None:
        scale = normalizer.scale
        weights[0] = weights[0] / scale[None, :]
        biases[0] = biases[0] - weights[0] @ normalizer.mean
    weights = [w.astype(np.float32) for w in weights]
    biases = [b.astype(np.float32) for b in biases]
    sizes = [net.obs_size, *net.hidden_sizes, ACTION_SIZE]
    return MlpPolicy(sizes, weights, biases, obs_layout_version, metadata or {})
