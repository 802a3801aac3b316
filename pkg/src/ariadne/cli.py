"""Command-line entry point: gen, reward, train, eval, probe, version.

All randomness flows from ``--seed``; a flat ``key = value`` config file can
supply any flag's value, with command-line flags taking precedence.  Exit
codes: 0 success, 1 usage error, 2 runtime error.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from dataclasses import dataclass, fields

from . import __version__, boundary, grpo, maze, policy, sampler
from .errors import AriadneError, ConfigError, UsageError
from .reward import score_completion
from .trace import MoveSequence
from .util import fmt_float


@dataclass
class RunConfig:
    """Merged settings; None means "not set here", resolved per command."""

    width: int | None = None
    height: int | None = None
    count: int | None = None
    profile: str | None = None
    mode: str | None = None
    mu: float | None = None
    sigma: float | None = None
    step_min: int | None = None
    step_max: int | None = None
    turn_min: int | None = None
    turn_max: int | None = None
    group_size: int | None = None
    clip_epsilon: float | None = None
    learning_rate: float | None = None
    warmup_ratio: float | None = None
    grad_accum: int | None = None
    temperature: float | None = None
    total_updates: int | None = None
    hidden_dim: int | None = None
    kl_beta: float | None = None
    turn_floor: bool | None = None
    rollouts: int | None = None
    axis: str | None = None
    threshold: float | None = None
    seed: int | None = None
    threads: int | None = None


def _parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("true", "1", "yes", "on"):
        return True
    if lowered in ("false", "0", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


# key -> (parser, validator, description of the constraint)
_KEYS = {
    "width": (int, lambda v: v >= 1, ">= 1"),
    "height": (int, lambda v: v >= 1, ">= 1"),
    "count": (int, lambda v: v >= 1, ">= 1"),
    "profile": (str, lambda v: v in ("train", "test"), "train|test"),
    "mode": (str, lambda v: v in sampler.MODES, "|".join(sampler.MODES)),
    "mu": (float, lambda v: math.isfinite(v), "finite"),
    "sigma": (float, lambda v: v > 0, "> 0"),
    "step_min": (int, lambda v: 1 <= v <= 10, "in [1, 10]"),
    "step_max": (int, lambda v: 1 <= v <= 10, "in [1, 10]"),
    "turn_min": (int, lambda v: 0 <= v <= 4, "in [0, 4]"),
    "turn_max": (int, lambda v: 0 <= v <= 4, "in [0, 4]"),
    "group_size": (int, lambda v: v >= 2, ">= 2"),
    "clip_epsilon": (float, lambda v: 0 < v < 1 or math.isinf(v), "in (0, 1) or inf"),
    "learning_rate": (float, lambda v: v > 0, "> 0"),
    "warmup_ratio": (float, lambda v: 0 <= v < 1, "in [0, 1)"),
    "grad_accum": (int, lambda v: v >= 1, ">= 1"),
    "temperature": (float, lambda v: v > 0, "> 0"),
    "total_updates": (int, lambda v: v >= 1, ">= 1"),
    "hidden_dim": (int, lambda v: v >= 1, ">= 1"),
    "kl_beta": (float, lambda v: v >= 0, ">= 0"),
    "turn_floor": (_parse_bool, lambda v: True, "boolean"),
    "rollouts": (int, lambda v: v >= 1, ">= 1"),
    "axis": (str, lambda v: v in boundary.AXES, "moves|turns"),
    "threshold": (float, lambda v: 0 <= v <= 1, "in [0, 1]"),
    "seed": (int, lambda v: v >= 0, ">= 0"),
    "threads": (int, lambda v: v >= 1, ">= 1"),
}


def load_config(path) -> RunConfig:
    """Parse a flat ``key = value`` file; unknown keys are rejected."""
    settings = {}
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            if "=" not in stripped:
                raise ConfigError(
                    f"line {line_no}: expected 'key = value', got {stripped!r}",
                    line=line_no,
                )
            key, _, raw = stripped.partition("=")
            key, raw = key.strip(), raw.strip()
            if key not in _KEYS:
                raise ConfigError(f"line {line_no}: unknown key {key!r}", key=key, line=line_no)
            parse, valid, constraint = _KEYS[key]
            try:
                value = parse(raw)
            except ValueError:
                raise ConfigError(
                    f"line {line_no}: cannot parse {key} value {raw!r}",
                    key=key,
                    line=line_no,
                )
            if not valid(value):
                raise ConfigError(
                    f"line {line_no}: {key} must be {constraint}, got {raw}",
                    key=key,
                    line=line_no,
                )
            settings[key] = value
    return RunConfig(**settings)


def _merge(config: RunConfig, flag_values: dict) -> RunConfig:
    merged = RunConfig(**{f.name: getattr(config, f.name) for f in fields(RunConfig)})
    for key, value in flag_values.items():
        if value is not None:
            setattr(merged, key, value)
    return merged


def _resolve_threads(rc: RunConfig) -> int:
    if rc.threads is not None:
        return rc.threads
    env = os.environ.get("ARIADNE_THREADS")
    if env:
        try:
            n = int(env)
        except ValueError:
            raise ConfigError(f"ARIADNE_THREADS must be an integer, got {env!r}")
        if n < 1:
            raise ConfigError(f"ARIADNE_THREADS must be >= 1, got {n}")
        return n
    return os.cpu_count() or 1


def _sampler_config(rc: RunConfig) -> sampler.SamplerConfig:
    base = sampler.profile_config(rc.profile if rc.profile is not None else "train")
    return sampler.SamplerConfig(
        mu=rc.mu if rc.mu is not None else base.mu,
        sigma=rc.sigma if rc.sigma is not None else base.sigma,
        step_range=(
            rc.step_min if rc.step_min is not None else base.step_range[0],
            rc.step_max if rc.step_max is not None else base.step_range[1],
        ),
        turn_range=(
            rc.turn_min if rc.turn_min is not None else base.turn_range[0],
            rc.turn_max if rc.turn_max is not None else base.turn_range[1],
        ),
        mode=rc.mode if rc.mode is not None else base.mode,
    )


def _train_config(rc: RunConfig) -> grpo.TrainConfig:
    defaults = grpo.TrainConfig()
    return grpo.TrainConfig(
        group_size=rc.group_size if rc.group_size is not None else defaults.group_size,
        clip_epsilon=rc.clip_epsilon if rc.clip_epsilon is not None else defaults.clip_epsilon,
        learning_rate=(
            rc.learning_rate if rc.learning_rate is not None else defaults.learning_rate
        ),
        warmup_ratio=rc.warmup_ratio if rc.warmup_ratio is not None else defaults.warmup_ratio,
        grad_accum=rc.grad_accum if rc.grad_accum is not None else defaults.grad_accum,
        temperature=rc.temperature if rc.temperature is not None else defaults.temperature,
        total_updates=(
            rc.total_updates if rc.total_updates is not None else defaults.total_updates
        ),
        seed=rc.seed if rc.seed is not None else defaults.seed,
        hidden_dim=rc.hidden_dim if rc.hidden_dim is not None else defaults.hidden_dim,
        kl_beta=rc.kl_beta if rc.kl_beta is not None else defaults.kl_beta,
        turn_floor=rc.turn_floor if rc.turn_floor is not None else defaults.turn_floor,
    )


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="ariadne", description=__doc__)
    sub = parser.add_subparsers(dest="command")

    def add_common(p):
        p.add_argument("--config", help="flat key = value settings file")
        p.add_argument("--seed", type=int)
        p.add_argument("--threads", type=int)

    p_gen = sub.add_parser("gen", help="generate a maze dataset")
    add_common(p_gen)
    p_gen.add_argument("--count", type=int)
    p_gen.add_argument("--profile", choices=("train", "test"))
    p_gen.add_argument("--mode", choices=sampler.MODES)
    p_gen.add_argument("--mu", type=float)
    p_gen.add_argument("--sigma", type=float)
    p_gen.add_argument("--step-min", type=int, dest="step_min")
    p_gen.add_argument("--step-max", type=int, dest="step_max")
    p_gen.add_argument("--turn-min", type=int, dest="turn_min")
    p_gen.add_argument("--turn-max", type=int, dest="turn_max")
    p_gen.add_argument("--width", type=int)
    p_gen.add_argument("--height", type=int)
    p_gen.add_argument("--out", required=True)
    p_gen.add_argument("--show", action="store_true", help="print each maze as ASCII")

    p_reward = sub.add_parser("reward", help="score one completion against an answer")
    p_reward.add_argument("--completion", required=True)
    p_reward.add_argument("--answer", required=True)
    p_reward.add_argument("--turn-floor", action="store_true", dest="turn_floor")

    p_train = sub.add_parser("train", help="run GRPO training")
    add_common(p_train)
    p_train.add_argument("--data", required=True)
    p_train.add_argument("--updates", type=int, dest="total_updates")
    p_train.add_argument("--group-size", type=int, dest="group_size")
    p_train.add_argument("--clip", type=float, dest="clip_epsilon")
    p_train.add_argument("--lr", type=float, dest="learning_rate")
    p_train.add_argument("--warmup", type=float, dest="warmup_ratio")
    p_train.add_argument("--accum", type=int, dest="grad_accum")
    p_train.add_argument("--temp", type=float, dest="temperature")
    p_train.add_argument("--hidden-dim", type=int, dest="hidden_dim")
    p_train.add_argument("--kl-beta", type=float, dest="kl_beta")
    p_train.add_argument("--out", required=True, help="checkpoint path")
    p_train.add_argument("--log", required=True, help="training-log CSV path")

    p_eval = sub.add_parser("eval", help="evaluate a checkpoint into a success curve")
    add_common(p_eval)
    p_eval.add_argument("--ckpt", required=True)
    p_eval.add_argument("--data", required=True)
    p_eval.add_argument("--rollouts", type=int)
    p_eval.add_argument("--temp", type=float, dest="temperature")
    p_eval.add_argument("--axis", choices=boundary.AXES)
    p_eval.add_argument("--out", required=True)

    p_probe = sub.add_parser("probe", help="report both success curves and collapse points")
    add_common(p_probe)
    p_probe.add_argument("--ckpt", required=True)
    p_probe.add_argument("--data", required=True)
    p_probe.add_argument("--rollouts", type=int)
    p_probe.add_argument("--temp", type=float, dest="temperature")
    p_probe.add_argument("--threshold", type=float)
    p_probe.add_argument("--report", action="store_true", help="print per-bucket tables")

    sub.add_parser("version", help="print the package version")
    return parser


def _runconfig_from(args) -> RunConfig:
    base = load_config(args.config) if getattr(args, "config", None) else RunConfig()
    flag_values = {
        f.name: getattr(args, f.name)
        for f in fields(RunConfig)
        if hasattr(args, f.name)
    }
    return _merge(base, flag_values)


def _cmd_gen(args) -> int:
    rc = _runconfig_from(args)
    config = _sampler_config(rc)
    size = (rc.width or 5, rc.height or 5)
    records = sampler.build_dataset(
        config,
        count=rc.count if rc.count is not None else 100,
        size=size,
        seed=rc.seed or 0,
        threads=_resolve_threads(rc),
    )
    sampler.write_records(records, args.out)
    if args.show:
        for record in records:
            print(maze.render_ascii(record.maze))
            print(f"solution: {record.solution.serialize()}")
            print()
    print(f"wrote {len(records)} records to {args.out}")
    return 0


def _cmd_reward(args) -> int:
    answer = MoveSequence.from_text(args.answer)
    if not answer.moves:
        raise UsageError("--answer contains no move tokens")
    breakdown = score_completion(args.completion, answer, turn_floor=args.turn_floor)
    print("correctness,answer_format,reasoning_format,total")
    print(
        f"{fmt_float(breakdown.correctness)},{fmt_float(breakdown.answer_format)},"
        f"{fmt_float(breakdown.reasoning_format)},{fmt_float(breakdown.total)}"
    )
    return 0


def _cmd_train(args) -> int:
    rc = _runconfig_from(args)
    dataset = sampler.read_records(args.data)
    config = _train_config(rc)
    params, log = grpo.train(dataset, config, threads=_resolve_threads(rc))
    policy.save_checkpoint(params, args.out)
    log.write_csv(args.log)
    final = log.rows[-1]
    print(
        f"trained {config.total_updates} updates; "
        f"final mean reward {final.mean_reward:.4f}; checkpoint {args.out}"
    )
    return 0


def _cmd_eval(args) -> int:
    rc = _runconfig_from(args)
    params = policy.load_checkpoint(args.ckpt)
    testset = sampler.read_records(args.data)
    curve = boundary.evaluate(
        params,
        testset,
        rollouts=rc.rollouts if rc.rollouts is not None else 8,
        temperature=rc.temperature if rc.temperature is not None else 1.0,
        axis=rc.axis if rc.axis is not None else "moves",
        seed=rc.seed or 0,
        threads=_resolve_threads(rc),
    )
    boundary.write_curve_csv(curve, args.out)
    print(f"wrote {len(curve.buckets)} buckets to {args.out}")
    return 0


def _cmd_probe(args) -> int:
    rc = _runconfig_from(args)
    params = policy.load_checkpoint(args.ckpt)
    testset = sampler.read_records(args.data)
    threshold = rc.threshold if rc.threshold is not None else 0.0
    for axis in boundary.AXES:
        curve = boundary.evaluate(
            params,
            testset,
            rollouts=rc.rollouts if rc.rollouts is not None else 8,
            temperature=rc.temperature if rc.temperature is not None else 1.0,
            axis=axis,
            seed=rc.seed or 0,
            threads=_resolve_threads(rc),
        )
        collapse = boundary.detect_collapse(curve, threshold=threshold)
        label = "none" if collapse is None else str(collapse)
        print(f"axis={axis} collapse_point={label}")
        if args.report:
            print(f"  {boundary.CURVE_HEADER}")
            for key, stats in curve.sorted_items():
                print(
                    f"  {key},{stats.success_rate:.4f},"
                    f"{stats.mean_tokens:.2f},{stats.n_samples}"
                )
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            parser.print_usage(sys.stderr)
            return 1
        if args.command == "version":
            print(f"ariadne {__version__}")
            return 0
        handler = {
            "gen": _cmd_gen,
            "reward": _cmd_reward,
            "train": _cmd_train,
            "eval": _cmd_eval,
            "probe": _cmd_probe,
        }[args.command]
        return handler(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return 1
    except SystemExit as exc:  # argparse --help
        code = exc.code if isinstance(exc.code, int) else 0
        return code
    except (AriadneError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def run() -> None:
    sys.exit(main(sys.argv[1:]))


if __name__ == "__main__":
    run()
