"""Abstract 2D multi-robot soccer simulator with evaluation harness."""

from .geometry import Pose2D, Vec2, egocentric_transform, inverse_egocentric, normalize_angle
from .model import (
    FieldSpec,
    RobotSpec,
    SimConfig,
    PRESET_NAMES,
    get_preset,
    in_goal,
    load_config,
    out_of_bounds,
    save_config,
    semantic_diff,
)
from .scenarios import SCENARIO_NAMES, ScenarioSpec, get_scenario, sample_random_scenario
from .dynamics import BallState, RobotState, StepEvents, WorldState, step_world
from .env import (
    ACTION_SIZE,
    EpisodeOutcome,
    RewardWeights,
    SoccerEnv,
    StepResult,
    batch_step,
    build_observation,
    compute_reward,
    env_step,
    obs_layout_version,
    observation_size,
    reset,
)
from .engine import VecSoccerEnv
from .policy import MlpPolicy, PolicyFormatError, load_policy, save_policy
from .scripted import ScriptedKicker
from .stats import student_t_ci
from .evaluation import (
    MetricsSummary,
    ReplayError,
    TrialResult,
    export_replay,
    run_suite,
    run_trial,
    summarize_trials,
    verify_replay,
)

__version__ = "0.1.0"
