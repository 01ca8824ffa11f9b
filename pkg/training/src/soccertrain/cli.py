"""Command-line entry points for training and ablation studies."""

from __future__ import annotations

import argparse
import dataclasses
import sys

from abstractsoccer.model import PRESET_NAMES

from .ablation import run_ablation_study
from .hyperparams import PPOHyperparams
from .train import train


def _hp_from_args(args) -> PPOHyperparams:
    defaults = PPOHyperparams()
    overrides = {}
    for f in dataclasses.fields(PPOHyperparams):
        val = getattr(args, f.name, None)
        if val is not None:
            overrides[f.name] = val
    return dataclasses.replace(defaults, **overrides)


def _add_hp_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--total-env-steps", dest="total_env_steps", type=int)
    p.add_argument("--n-worlds", dest="n_worlds", type=int)
    p.add_argument("--rollout-length", dest="rollout_length", type=int)
    p.add_argument("--learning-rate", dest="learning_rate", type=float)
    p.add_argument("--entropy-coef", dest="entropy_coef", type=float)
    p.add_argument("--seed", type=int)


def cmd_train(args) -> int:
    if args.preset not in PRESET_NAMES:
        print(f"error: unknown preset {args.preset!r}", file=sys.stderr)
        return 2
    hp = _hp_from_args(args)
    report = train(
        args.preset,
        hp,
        args.out,
        curve_path=args.curve,
        log=lambda msg: print(msg, flush=True),
    )
    print(
        f"best success {report.best_success_rate:.2f} at "
        f"{report.best_at_env_steps:,} env steps"
        + (" (diverged)" if report.diverged else "")
    )
    return 0


def cmd_ablation(args) -> int:
    presets = [s.strip() for s in args.presets.split(",") if s.strip()]
    for p in presets:
        if p not in PRESET_NAMES:
            print(f"error: unknown preset {p!r}", file=sys.stderr)
            return 2
    hp = _hp_from_args(args)
    result = run_ablation_study(
        presets, hp, args.trials, args.out_dir,
        log=lambda msg: print(msg, flush=True),
    )
    print(result["grid"])
    if result["failures"]:
        print(f"failed presets: {result['failures']}")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="soccertrain", description="PPO training for the soccer environment"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train one policy under a preset")
    p.add_argument("--preset", default="full_marl")
    p.add_argument("--out", required=True, help="exported policy file")
    p.add_argument("--curve", help="training-curve JSON path")
    _add_hp_flags(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("ablation", help="train and evaluate several presets")
    p.add_argument("--presets", required=True, help="comma-separated preset names")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--out-dir", required=True)
    _add_hp_flags(p)
    p.set_defaults(func=cmd_ablation)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
