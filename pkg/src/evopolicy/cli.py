"""Command-line interface: run experiments, re-evaluate saved solutions, and
compare two result sets with the Bayesian signed-rank analysis."""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

import numpy as np

from .bayes import (
    RopeConfig,
    bayesian_signed_rank,
    dominance_boundaries,
    simplex_coordinates,
    summarize,
)
from .config import ConfigError, load_config
from .envs import make_env
from .harness import (
    _CLI_EVAL_STREAM,
    derive_seed,
    load_run,
    read_summary,
    rollout,
    run_experiment,
)
from .network import NetworkSpec


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="evopolicy",
        description="Evolve feed-forward control policies and compare optimizers.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run a configured experiment")
    run_p.add_argument("config", help="path to an experiment config file")
    run_p.add_argument(
        "--workers",
        type=int,
        default=1,
        help="parallel evaluation processes; results are identical for any value",
    )
    run_p.set_defaults(func=cmd_run)

    eval_p = sub.add_parser("eval", help="re-evaluate the best individual of a saved run")
    eval_p.add_argument("result_json", help="path to a result.json written by `run`")
    eval_p.add_argument("--episodes", type=int, default=100, help="number of fresh episodes")
    eval_p.add_argument(
        "--seed",
        type=int,
        default=None,
        help="base seed for the fresh episodes (default: derived from the run's master seed)",
    )
    eval_p.set_defaults(func=cmd_eval)

    analyze_p = sub.add_parser(
        "analyze", help="Bayesian signed-rank comparison of two summary.csv files"
    )
    analyze_p.add_argument("summary_a", help="summary.csv of the first algorithm")
    analyze_p.add_argument("summary_b", help="summary.csv of the second algorithm")
    analyze_p.add_argument("--rope", type=float, default=0.1, help="practical-equivalence radius")
    analyze_p.add_argument("--out", type=Path, default=Path("analysis"), help="output directory")
    analyze_p.add_argument("--samples", type=int, default=50_000, help="Monte Carlo draws")
    analyze_p.add_argument("--seed", type=int, default=0, help="Monte Carlo seed")
    analyze_p.add_argument(
        "--algorithm-a",
        default=None,
        help="algorithm to pick from the first file (needed when it holds several)",
    )
    analyze_p.add_argument("--algorithm-b", default=None, help="same for the second file")
    analyze_p.set_defaults(func=cmd_analyze)
    return parser


def cmd_run(args) -> int:
    config = load_config(args.config)
    if args.workers < 1:
        print("error: --workers must be >= 1", file=sys.stderr)
        return 1
    results = run_experiment(config, workers=args.workers)
    for result in results:
        rep = result.config_snapshot.get("repetition")
        print(
            f"{config.algorithm} on {config.environment} repetition {rep}: "
            f"average reward over {len(result.final_eval)} episodes = {result.final_eval_mean:.2f}"
        )
    summary_path = Path(config.output_dir) / config.environment / "summary.csv"
    print(f"summary written to {summary_path}")
    if len(results) != config.repetitions:
        print(
            f"error: {config.repetitions - len(results)} of {config.repetitions} "
            "repetitions failed",
            file=sys.stderr,
        )
        return 1
    return 0


def cmd_eval(args) -> int:
    if args.episodes < 1:
        print("error: --episodes must be >= 1", file=sys.stderr)
        return 1
    result = load_run(Path(args.result_json))
    snapshot = result.config_snapshot
    try:
        env = make_env(snapshot["environment"])
        network = dict(snapshot["network"])
        network["hidden_dims"] = tuple(network.get("hidden_dims", ()))
        spec = NetworkSpec(**network)
        base_seed = args.seed if args.seed is not None else snapshot["evolution"]["master_seed"]
    except (KeyError, TypeError) as err:
        print(f"error: corrupt config snapshot in {args.result_json}: {err}", file=sys.stderr)
        return 1
    rewards = []
    for episode in range(args.episodes):
        seed = derive_seed(base_seed, _CLI_EVAL_STREAM, episode)
        rewards.append(rollout(env, spec, result.best_params, seed).total_reward)
        print(f"episode {episode}: total reward = {rewards[-1]:.2f}")
    print(f"mean over {args.episodes} episodes = {float(np.mean(rewards)):.4f}")
    return 0


def _write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def cmd_analyze(args) -> int:
    name_a, values_a = read_summary(Path(args.summary_a), args.algorithm_a)
    name_b, values_b = read_summary(Path(args.summary_b), args.algorithm_b)
    if sorted(values_a) != sorted(values_b):
        print(
            f"error: repetition sets differ: {sorted(values_a)} vs {sorted(values_b)}",
            file=sys.stderr,
        )
        return 1
    reps = sorted(values_a)
    diffs = np.array([values_a[rep] - values_b[rep] for rep in reps])

    cfg = RopeConfig(rope_radius=args.rope, mc_samples=args.samples)
    rng = np.random.default_rng(args.seed)
    triples = bayesian_signed_rank(diffs, cfg, rng)
    expected = summarize(triples)
    points = simplex_coordinates(triples)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    _write_csv(
        out / "posterior_samples.csv",
        ["p_left", "p_rope", "p_right"],
        ([repr(l), repr(r), repr(g)] for l, r, g in triples),
    )
    _write_csv(out / "simplex_points.csv", ["x", "y"], ([repr(x), repr(y)] for x, y in points))
    _write_csv(
        out / "simplex_boundaries.csv",
        ["x_start", "y_start", "x_end", "y_end"],
        ([repr(s[0]), repr(s[1]), repr(e[0]), repr(e[1])] for s, e in dominance_boundaries()),
    )
    print(f"P({name_a} better) = {expected.p_right:.3f}")
    print(f"P(rope, radius {args.rope}) = {expected.p_rope:.3f}")
    print(f"P({name_b} better) = {expected.p_left:.3f}")
    print(f"posterior samples and simplex data written to {out}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    except (OSError, ValueError, RuntimeError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
