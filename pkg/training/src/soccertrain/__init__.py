"""PPO training harness for the abstractsoccer environment."""

from .ablation import measure_kick_frequency, run_ablation_study
from .buffer import RolloutBuffer
from .collect import collect_rollouts, make_vec_env
from .curriculum import curriculum_progress, sample_easy_scenario
from .hyperparams import PPOHyperparams
from .nets import ACTION_SIZE, PolicyNet, ValueNet, export_policy
from .normalize import RunningNormalizer
from .train import TrainReport, evaluate_deterministic, evaluate_policy_file, train
from .update import DivergenceError, UpdateDiagnostics, ppo_losses, ppo_update

__version__ = "0.1.0"

__all__ = [
    "ACTION_SIZE",
    "DivergenceError",
    "PPOHyperparams",
    "PolicyNet",
    "RolloutBuffer",
    "RunningNormalizer",
    "TrainReport",
    "UpdateDiagnostics",
    "ValueNet",
    "collect_rollouts",
    "curriculum_progress",
    "evaluate_deterministic",
    "evaluate_policy_file",
    "export_policy",
    "make_vec_env",
    "measure_kick_frequency",
    "ppo_losses",
    "ppo_update",
    "run_ablation_study",
    "sample_easy_scenario",
    "train",
]
