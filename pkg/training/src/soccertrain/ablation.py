"""Ablation study runner: one policy per preset, shared evaluation grid."""

from __future__ import annotations

import json
from dataclasses import replace
from pathlib import Path
from typing import Dict, List, Optional, Sequence

from abstractsoccer.evaluation import (
    format_metrics_table,
    run_suite,
    run_trial,
    save_metrics_report,
)
from abstractsoccer.model import get_preset
from abstractsoccer.policy import load_policy

from .hyperparams import PPOHyperparams
from .train import TrainReport, train

EVAL_SCENARIOS = ("BS1", "BS2", "BS3", "D1", "D2", "D3")


def measure_kick_frequency(
    policy_path, scenarios: Sequence[str], n_trials: int, base_seed: int = 0
) -> float:
    """Fraction of steps with a kick event, over recorded evaluation trials."""
    config = get_preset("eval_realistic")
    policy = load_policy(policy_path)
    kick_steps = 0
    total_steps = 0
    for scenario in scenarios:
        for i in range(n_trials):
            _, trace = run_trial(policy, scenario, config, base_seed + i, record=True)
            for record in trace[2:]:
                total_steps += 1
                if any(record["events"]["kicks"]):
                    kick_steps += 1
    return kick_steps / total_steps if total_steps else 0.0


def run_ablation_study(
    presets: Sequence[str],
    hp: PPOHyperparams,
    n_eval_trials: int,
    out_dir,
    log=None,
) -> dict:
    """Train per preset, evaluate everything under the realistic config.

    A preset whose training run raises is recorded as failed and the study
    continues.  Writes per-preset policies/curves, the metrics grid (text
    and structured report) and a study summary into ``out_dir``.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    eval_config = get_preset("eval_realistic")
    columns: Dict[str, list] = {}
    failures: Dict[str, str] = {}
    reports: Dict[str, TrainReport] = {}

    for preset in presets:
        policy_path = out_dir / f"{preset}.pol"
        try:
            report = train(
                preset,
                hp,
                policy_path,
                curve_path=out_dir / f"{preset}_curve.json",
                log=log,
            )
            reports[preset] = report
            policy = load_policy(policy_path)
            columns[preset] = run_suite(
                policy, list(EVAL_SCENARIOS), eval_config, n_eval_trials
            )
        except Exception as exc:  # noqa: BLE001 - study must survive one bad cell
            failures[preset] = f"{type(exc).__name__}: {exc}"
            if log:
                log(f"[{preset}] FAILED: {failures[preset]}")

    grid = format_metrics_table(columns) if columns else "(no successful presets)\n"
    (out_dir / "grid.txt").write_text(grid)
    if columns:
        save_metrics_report(columns, out_dir / "grid.json")
    summary = {
        "presets": list(presets),
        "n_eval_trials": n_eval_trials,
        "failures": failures,
        "training": {k: r.to_dict() for k, r in reports.items()},
    }
    (out_dir / "study.json").write_text(json.dumps(summary, indent=2) + "\n")
    return {"columns": columns, "failures": failures, "grid": grid, "reports": reports}
