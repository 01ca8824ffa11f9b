"""Clipped-surrogate PPO update over the pooled buffer."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import torch

from .buffer import RolloutBuffer
from .hyperparams import PPOHyperparams
from .nets import PolicyNet, ValueNet


class DivergenceError(RuntimeError):
    """Non-finite loss; carries the last diagnostics for the abort path."""

    def __init__(self, message: str, diagnostics: dict):
        super().__init__(message)
        self.diagnostics = diagnostics


@dataclass(frozen=True)
class UpdateDiagnostics:
    policy_loss: float
    value_loss: float
    entropy: float
    clip_fraction: float
    approx_kl: float


def ppo_losses(
    policy: PolicyNet,
    value: ValueNet,
    batch: dict,
    hp: PPOHyperparams,
):
    """The three loss terms plus clip/KL diagnostics for one minibatch."""
    obs = batch["observations"]
    new_logp = policy.log_prob_of(obs, batch["z_samples"])
    ratio = torch.exp(new_logp - batch["log_probs"])
    adv = batch["advantages"]
    unclipped = ratio * adv
    clipped = torch.clamp(ratio, 1.0 - hp.clip_epsilon, 1.0 + hp.clip_epsilon) * adv
    policy_loss = -torch.min(unclipped, clipped).mean()

    value_loss = ((value(obs) - batch["returns"]) ** 2).mean()
    entropy = policy.entropy_estimate(new_logp)

    with torch.no_grad():
        clip_fraction = ((ratio - 1.0).abs() > hp.clip_epsilon).float().mean()
        approx_kl = (batch["log_probs"] - new_logp).mean()
    return policy_loss, value_loss, entropy, clip_fraction, approx_kl


def ppo_update(
    buffer: RolloutBuffer,
    policy: PolicyNet,
    value: ValueNet,
    optimizer: torch.optim.Optimizer,
    hp: PPOHyperparams,
    generator: torch.Generator,
) -> UpdateDiagnostics:
    flat = buffer.flat()
    n = flat["log_probs"].shape[0]
    adv = flat["advantages"]
    adv = (adv - adv.mean()) / (adv.std() + 1e-8)
    tensors = {
        "observations": torch.as_tensor(flat["observations"], dtype=torch.float32),
        "z_samples": torch.as_tensor(flat["z_samples"], dtype=torch.float32),
        "log_probs": torch.as_tensor(flat["log_probs"], dtype=torch.float32),
        "advantages": torch.as_tensor(adv, dtype=torch.float32),
        "returns": torch.as_tensor(flat["returns"], dtype=torch.float32),
    }

    sums = {"policy": 0.0, "value": 0.0, "entropy": 0.0, "clip": 0.0, "kl": 0.0}
    n_batches = 0
    for _ in range(hp.epochs_per_update):
        if (
            hp.target_kl is not None
            and n_batches
            and sums["kl"] / n_batches > hp.target_kl
        ):
            break  # stop reusing this rollout once the policy drifted enough
        perm = torch.randperm(n, generator=generator)
        for start in range(0, n, hp.minibatch_size):
            idx = perm[start : start + hp.minibatch_size]
            batch = {k: v[idx] for k, v in tensors.items()}
            policy_loss, value_loss, entropy, clip_frac, approx_kl = ppo_losses(
                policy, value, batch, hp
            )
            loss = (
                policy_loss
                + hp.value_coef * value_loss
                - hp.entropy_coef * entropy
            )
            if not torch.isfinite(loss):
                raise DivergenceError(
                    "non-finite loss during PPO update",
                    {
                        "policy_loss": float(policy_loss.detach()),
                        "value_loss": float(value_loss.detach()),
                        "entropy": float(entropy.detach()),
                    },
                )
            optimizer.zero_grad()
            loss.backward()
            torch.nn.utils.clip_grad_norm_(
                list(policy.parameters()) + list(value.parameters()),
                hp.max_grad_norm,
            )
            optimizer.step()
            sums["policy"] += float(policy_loss.detach())
            sums["value"] += float(value_loss.detach())
            sums["entropy"] += float(entropy.detach())
            sums["clip"] += float(clip_frac)
            sums["kl"] += float(approx_kl)
            n_batches += 1

    return UpdateDiagnostics(
        policy_loss=sums["policy"] / n_batches,
        value_loss=sums["value"] / n_batches,
        entropy=sums["entropy"] / n_batches,
        clip_fraction=sums["clip"] / n_batches,
        approx_kl=sums["kl"] / n_batches,
    )
