"""Trial rollouts, suite statistics and replay traces.

A replay trace is line-delimited JSON: a header line carrying the config,
scenario name, seed and observation-layout version, an ``initial`` line
with the reset state, then one record per step holding the post-step
state, the joint action and the events.  Floats round-trip exactly
through JSON, so a trace can be verified bit-for-bit by re-simulation.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field as dc_field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .dynamics import StepEvents, WorldState
from .env import SoccerEnv, EpisodeOutcome, obs_layout_version
from .model import CONFIG_SCHEMA_VERSION, SimConfig, config_from_dict, config_to_dict
from .policy import MlpPolicy
from .scripted import ScriptedKicker
from .stats import student_t_ci

TRACE_SCHEMA_VERSION = "1"

Controller = Union[MlpPolicy, ScriptedKicker]


class ReplayError(ValueError):
    """Raised for corrupt or non-verifying replay traces."""


@dataclass(frozen=True)
class TrialResult:
    scenario: str
    seed: int
    outcome: EpisodeOutcome
    step_count: int
    trace_path: Optional[str] = None


@dataclass(frozen=True)
class MetricsSummary:
    scenario: str
    n_trials: int
    success_rate: Tuple[float, float]  # (mean, ci half-width)
    time_to_score: Optional[Tuple[float, float]]  # None when zero successes
    confidence: float = 0.95


def _joint_actions(controller: Controller, state: WorldState, observations) -> List:
    if isinstance(controller, ScriptedKicker):
        return controller.act(state)
    batch = np.stack(observations)
    return [np.asarray(a, dtype=float) for a in controller.forward(batch)]


def _state_record(state: WorldState) -> dict:
    return {
        "robots": [
            [
                r.pose.position.x,
                r.pose.position.y,
                r.pose.heading,
                r.kick_timer,
                int(r.standing),
            ]
            for r in state.robots
        ],
        "ball": [
            state.ball.position.x,
            state.ball.position.y,
            state.ball.velocity.x,
            state.ball.velocity.y,
        ],
    }


def run_trial(
    controller: Controller,
    scenario: str,
    eval_config: SimConfig,
    seed: int,
    record: bool = False,
) -> Tuple[TrialResult, Optional[List[dict]]]:
    """One full deterministic episode; optionally returns the trace records."""
    if isinstance(controller, MlpPolicy):
        controller.check_layout(obs_layout_version(eval_config))
    env = SoccerEnv(eval_config, scenario)
    observations = env.reset(seed)
    trace: Optional[List[dict]] = None
    if record:
        trace = [
            {
                "kind": "replay",
                "schema_version": TRACE_SCHEMA_VERSION,
                "config": config_to_dict(eval_config),
                "scenario": scenario,
                "seed": seed,
                "obs_layout_version": obs_layout_version(eval_config),
            },
            {"initial": _state_record(env.state)},
        ]
    outcome = None
    steps = 0
    for _ in range(eval_config.max_steps):
        actions = _joint_actions(controller, env.state, observations)
        result = env.step(actions)
        steps += 1
        observations = result.observations
        if record:
            record_line = {"step": steps}
            record_line.update(_state_record(env.state))
            record_line["actions"] = [list(map(float, a)) for a in actions]
            record_line["reward"] = result.reward
            record_line["events"] = {
                "goal_scored": result.events.goal_scored,
                "out_of_bounds": result.events.out_of_bounds,
                "kicks": list(result.events.kicks),
                "pushes": list(result.events.pushes),
            }
            trace.append(record_line)
        if result.terminated or result.truncated:
            outcome = env.outcome(result)
            break
    if outcome is None:  # defensive: loop bound equals the timeout
        outcome = EpisodeOutcome(success=False, failure_reason="timeout")
    return TrialResult(scenario=scenario, seed=seed, outcome=outcome, step_count=steps), trace


def summarize_trials(
    scenario: str, trials: Sequence[TrialResult], confidence: float = 0.95
) -> MetricsSummary:
    """Success rate over all trials; time-to-score over successful trials only."""
    trials = sorted(trials, key=lambda t: t.seed)
    successes = [1.0 if t.outcome.success else 0.0 for t in trials]
    times = [t.outcome.time_to_score for t in trials if t.outcome.success]
    rate = student_t_ci(successes, confidence)
    tts = student_t_ci(times, confidence) if times else None
    return MetricsSummary(
        scenario=scenario,
        n_trials=len(trials),
        success_rate=rate,
        time_to_score=tts,
        confidence=confidence,
    )


def run_suite(
    controller: Controller,
    scenarios: Sequence[str],
    eval_config: SimConfig,
    n_trials: int,
    base_seed: int = 0,
) -> List[MetricsSummary]:
    """The experimental protocol: n seeded trials per scenario, t-CI summaries."""
    if n_trials < 1:
        raise ValueError("n_trials must be >= 1")
    summaries = []
    for scenario in scenarios:
        trials = [
            run_trial(controller, scenario, eval_config, base_seed + i)[0]
            for i in range(n_trials)
        ]
        summaries.append(summarize_trials(scenario, trials))
    return summaries


# --- replay traces ---------------------------------------------------------


def export_replay(trace: Optional[List[dict]], path) -> None:
    if not trace:
        raise ReplayError("no trace recorded; run the trial with record=True")
    with open(path, "w") as fh:
        for line in trace:
            fh.write(json.dumps(line) + "\n")


def load_replay(path) -> Tuple[dict, dict, List[dict]]:
    """Returns (header, initial, step_records); raises ReplayError when corrupt."""
    path = Path(path)
    lines = path.read_text().splitlines()
    if len(lines) < 2:
        raise ReplayError(f"{path}: truncated trace ({len(lines)} lines)")
    try:
        header = json.loads(lines[0])
        initial = json.loads(lines[1])
        records = [json.loads(line) for line in lines[2:]]
    except json.JSONDecodeError as exc:
        raise ReplayError(f"{path}: corrupt trace line {exc.lineno}: {exc.msg}") from exc
    if header.get("kind") != "replay" or "initial" not in initial:
        raise ReplayError(f"{path}: not a replay trace")
    if header.get("schema_version") != TRACE_SCHEMA_VERSION:
        raise ReplayError(
            f"{path}: trace schema_version {header.get('schema_version')!r} "
            f"not supported (expected {TRACE_SCHEMA_VERSION!r})"
        )
    return header, initial["initial"], records


def verify_replay(path) -> int:
    """Re-simulate a trace and confirm a bit-exact match.

    Returns the number of verified steps; raises ReplayError naming the
    first divergent step otherwise.
    """
    header, initial, records = load_replay(path)
    config = config_from_dict(header["config"])
    env = SoccerEnv(config, header["scenario"])
    env.reset(header["seed"])
    if _state_record(env.state) != {"robots": initial["robots"], "ball": initial["ball"]}:
        raise ReplayError(f"{path}: initial state does not match reset from seed")
    for record in records:
        result = env.step(record["actions"])
        expected = _state_record(env.state)
        if expected["robots"] != record["robots"] or expected["ball"] != record["ball"]:
            raise ReplayError(
                f"{path}: state diverges at step {record['step']}"
            )
        if result.reward != record["reward"]:
            raise ReplayError(f"{path}: reward diverges at step {record['step']}")
    return len(records)


# --- reporting -------------------------------------------------------------


def summary_to_dict(summary: MetricsSummary) -> dict:
    return {
        "scenario": summary.scenario,
        "n_trials": summary.n_trials,
        "confidence": summary.confidence,
        "success_rate": {"mean": summary.success_rate[0], "half_width": summary.success_rate[1]},
        "time_to_score": (
            None
            if summary.time_to_score is None
            else {"mean": summary.time_to_score[0], "half_width": summary.time_to_score[1]}
        ),
    }


def format_metrics_table(columns: Dict[str, List[MetricsSummary]]) -> str:
    """Rows are scenarios, columns are labelled runs (mirrors the result grids)."""
    labels = list(columns)
    scenarios: List[str] = []
    for summaries in columns.values():
        for s in summaries:
            if s.scenario not in scenarios:
                scenarios.append(s.scenario)
    by = {
        label: {s.scenario: s for s in summaries} for label, summaries in columns.items()
    }

    def cell(summary: Optional[MetricsSummary]) -> Tuple[str, str]:
        if summary is None:
            return "-", "-"
        sr = f"{summary.success_rate[0]:.2f} +- {summary.success_rate[1]:.1f}"
        if summary.time_to_score is None:
            tts = "N/A"
        else:
            tts = f"{summary.time_to_score[0]:.2f} +- {summary.time_to_score[1]:.1f}"
        return sr, tts

    width = max(22, max((len(l) for l in labels), default=0) + 2)
    lines = []
    for title, idx in (("Success rate", 0), ("Time to score (s)", 1)):
        lines.append(title)
        lines.append("  " + "scenario".ljust(10) + "".join(l.ljust(width) for l in labels))
        for scenario in scenarios:
            row = "  " + scenario.ljust(10)
            for label in labels:
                row += cell(by[label].get(scenario))[idx].ljust(width)
            lines.append(row)
        lines.append("")
    return "\n".join(lines)


def save_metrics_report(columns: Dict[str, List[MetricsSummary]], path) -> None:
    data = {
        "schema_version": CONFIG_SCHEMA_VERSION,
        "columns": {
            label: [summary_to_dict(s) for s in summaries]
            for label, summaries in columns.items()
        },
    }
    Path(path).write_text(json.dumps(data, indent=2) + "\n")
