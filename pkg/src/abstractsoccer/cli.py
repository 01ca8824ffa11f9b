"""Command-line surface: evaluation suites, benchmarks, replays, inspection.

Exit codes:
    0  success
    2  usage error (unknown flag/name, bad value)
    3  missing input file
    4  file-format or layout error
    5  replay verification mismatch
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import asdict

from . import __version__
from .bench import run_bench
from .env import obs_layout_version
from .evaluation import (
    ReplayError,
    export_replay,
    format_metrics_table,
    load_replay,
    run_suite,
    run_trial,
    save_metrics_report,
    verify_replay,
)
from .model import PRESET_NAMES, get_preset, config_to_dict, load_config
from .policy import PolicyFormatError, load_policy
from .scenarios import SCENARIO_NAMES, get_scenario, scenario_to_dict
from .scripted import ScriptedKicker

EXIT_USAGE = 2
EXIT_MISSING = 3
EXIT_FORMAT = 4
EXIT_VERIFY = 5

CONFIG_DIR_ENV = "ABSTRACTSOCCER_CONFIG_DIR"


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _resolve_config(args) -> "SimConfig":
    if getattr(args, "config", None):
        path = args.config
        if not os.path.isabs(path) and not os.path.exists(path):
            config_dir = os.environ.get(CONFIG_DIR_ENV)
            if config_dir and os.path.exists(os.path.join(config_dir, path)):
                path = os.path.join(config_dir, path)
        if not os.path.exists(path):
            raise CliError(f"config file not found: {path}", EXIT_MISSING)
        try:
            return load_config(path)
        except (ValueError, KeyError, TypeError) as exc:
            raise CliError(f"bad config file {path}: {exc}", EXIT_FORMAT)
    try:
        return get_preset(args.preset)
    except KeyError as exc:
        raise CliError(str(exc.args[0]), EXIT_USAGE)


def _load_policy_or_scripted(path, config):
    if path == "scripted":
        return ScriptedKicker(config)
    if not os.path.exists(path):
        raise CliError(f"policy file not found: {path}", EXIT_MISSING)
    try:
        policy = load_policy(path)
        policy.check_layout(obs_layout_version(config))
    except PolicyFormatError as exc:
        raise CliError(str(exc), EXIT_FORMAT)
    return policy


def cmd_eval(args) -> int:
    config = _resolve_config(args)
    if args.trials < 1:
        raise CliError("--trials must be >= 1", EXIT_USAGE)
    scenarios = [s.strip() for s in args.scenarios.split(",") if s.strip()]
    for name in scenarios:
        if name not in SCENARIO_NAMES or name == "random_train":
            valid = ", ".join(n for n in SCENARIO_NAMES if n != "random_train")
            raise CliError(f"unknown scenario {name!r}; valid: {valid}", EXIT_USAGE)
    controller = _load_policy_or_scripted(args.policy, config)
    summaries = run_suite(controller, scenarios, config, args.trials, args.seed)
    label = args.label or args.preset
    print(format_metrics_table({label: summaries}))
    if args.out:
        save_metrics_report({label: summaries}, args.out)
        print(f"report written to {args.out}")
    return 0


def cmd_bench(args) -> int:
    config = _resolve_config(args)
    if args.steps < 1 or args.worlds < 1:
        raise CliError("--steps and --worlds must be >= 1", EXIT_USAGE)
    results = []
    for workers in sorted({1, args.workers}):
        result = run_bench(
            config,
            n_steps=args.steps,
            n_worlds=args.worlds,
            workers=workers,
            chunk_size=args.chunk_size,
        )
        results.append(result)
        print(
            f"workers={workers}: {result.steps_per_second:,.0f} steps/s "
            f"({result.n_worlds} worlds x {result.n_steps} steps in "
            f"{result.wall_seconds:.2f}s)"
        )
    if len(results) == 2:
        same = results[0].fingerprints == results[1].fingerprints
        print(f"final states identical across worker counts: {'yes' if same else 'NO'}")
        if not same:
            raise CliError("worker-count determinism check failed", EXIT_VERIFY)
    return 0


def cmd_replay(args) -> int:
    if not os.path.exists(args.trace):
        raise CliError(f"trace file not found: {args.trace}", EXIT_MISSING)
    try:
        header, _, records = load_replay(args.trace)
    except ReplayError as exc:
        raise CliError(str(exc), EXIT_FORMAT)
    last = records[-1] if records else None
    events = last["events"] if last else {}
    print(f"scenario: {header['scenario']}  seed: {header['seed']}  steps: {len(records)}")
    if events.get("goal_scored"):
        outcome = f"goal at t={last['step'] * header['config']['dt']:.1f}s"
    elif events.get("out_of_bounds"):
        outcome = "out of bounds"
    else:
        outcome = "timeout"
    print(f"outcome: {outcome}")
    if args.verify:
        try:
            steps = verify_replay(args.trace)
        except ReplayError as exc:
            print(f"FAIL: {exc}")
            return EXIT_VERIFY
        print(f"OK: {steps} steps verified bit-exactly")
    return 0


def cmd_record(args) -> int:
    config = _resolve_config(args)
    controller = _load_policy_or_scripted(args.policy, config)
    if args.scenario not in SCENARIO_NAMES:
        raise CliError(f"unknown scenario {args.scenario!r}", EXIT_USAGE)
    trial, trace = run_trial(controller, args.scenario, config, args.seed, record=True)
    export_replay(trace, args.out)
    print(
        f"recorded {trial.step_count} steps to {args.out} "
        f"(success={trial.outcome.success})"
    )
    return 0


def cmd_presets(args) -> int:
    if args.name:
        config = get_preset(args.name)
        print(json.dumps(config_to_dict(config), indent=2))
    else:
        for name in PRESET_NAMES:
            print(name)
    return 0


def cmd_scenarios(args) -> int:
    if args.name:
        scenario = get_scenario(args.name)
        print(json.dumps(scenario_to_dict(scenario), indent=2))
    else:
        for name in SCENARIO_NAMES:
            print(name)
    return 0


def cmd_policy_info(args) -> int:
    if not os.path.exists(args.policy):
        raise CliError(f"policy file not found: {args.policy}", EXIT_MISSING)
    try:
        policy = load_policy(args.policy)
    except PolicyFormatError as exc:
        raise CliError(str(exc), EXIT_FORMAT)
    n_params = sum(w.size + b.size for w, b in zip(policy.weights, policy.biases))
    print(f"layer sizes:  {policy.layer_sizes}")
    print(f"parameters:   {n_params}")
    print(f"obs layout:   {policy.obs_layout_version}")
    print(f"metadata:     {json.dumps(policy.metadata)}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="abstractsoccer",
        description="Abstract 2D robot-soccer simulator and evaluation harness",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_config_flags(p):
        p.add_argument("--preset", default="eval_realistic", help="named config preset")
        p.add_argument("--config", help="config JSON file (overrides --preset)")

    p = sub.add_parser("eval", help="run an evaluation suite and print the metrics grid")
    p.add_argument("--policy", required=True, help="policy file, or 'scripted'")
    add_config_flags(p)
    p.add_argument("--scenarios", default="BS1,BS2,BS3", help="comma-separated names")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="write machine-readable report here")
    p.add_argument("--label", help="column label in the report")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("bench", help="random-action throughput benchmark")
    add_config_flags(p)
    p.add_argument("--steps", type=int, default=1000)
    p.add_argument("--worlds", type=int, default=1024)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--chunk-size", type=int, default=None)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("replay", help="summarize and optionally verify a trace")
    p.add_argument("trace")
    p.add_argument("--verify", action="store_true")
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("record", help="run one episode and export its trace")
    p.add_argument("--policy", required=True, help="policy file, or 'scripted'")
    add_config_flags(p)
    p.add_argument("--scenario", default="BS1")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_record)

    p = sub.add_parser("presets", help="list presets or dump one as JSON")
    p.add_argument("name", nargs="?")
    p.set_defaults(func=cmd_presets)

    p = sub.add_parser("scenarios", help="list scenarios or dump one as JSON")
    p.add_argument("name", nargs="?")
    p.set_defaults(func=cmd_scenarios)

    p = sub.add_parser("policy-info", help="dump a policy file header")
    p.add_argument("policy")
    p.set_defaults(func=cmd_policy_info)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except KeyError as exc:
        print(f"error: {exc.args[0]}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
