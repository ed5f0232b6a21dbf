"""Episode rollouts, noisy fitness evaluation, and the experiment protocol.

A run evolves one population and ends with a 100-episode evaluation of the
best individual ever seen; an experiment repeats the run with derived seeds
and writes one summary row per repetition. Every episode seed is derived
from (master seed, stream tag, generation, row, episode), so results are
independent of evaluation order and worker count.
"""

from __future__ import annotations

import csv
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import TYPE_CHECKING

import numpy as np

from .envs import ENVIRONMENTS, Environment, make_env
from .evolution import (
    ALGORITHMS,
    EvolutionConfig,
    Population,
    ga_sample,
    init_population,
    next_generation,
    select_survivors,
    umda_estimate,
    umda_sample,
)
from .network import (
    NetworkSpec,
    forward_layers,
    select_continuous_action,
    select_discrete_action,
    unflatten,
)

if TYPE_CHECKING:
    from .config import ExperimentConfig

FINAL_EVAL_EPISODES = 100

# Sub-stream tags mixed into derived seeds so the random streams for
# initialisation, training episodes, final evaluation, model sampling and
# repetitions never overlap.
_INIT_STREAM = 0
_EVAL_STREAM = 1
_FINAL_EVAL_STREAM = 2
_SAMPLER_STREAM = 3
_REPETITION_STREAM = 4
_CLI_EVAL_STREAM = 5


def derive_seed(*parts: int) -> int:
    """Stable 64-bit seed hashed from integer components (order-sensitive)."""
    return int(np.random.SeedSequence(list(parts)).generate_state(1, np.uint64)[0])


@dataclass(frozen=True)
class EpisodeRecord:
    """Outcome of one seeded episode."""

    total_reward: float
    steps: int
    seed: int


@dataclass
class RunResult:
    """Everything one evolutionary run produces.

    ``history`` holds one (best, mean, worst) population-fitness triple per
    generation; ``final_eval`` the total rewards of the closing evaluation
    episodes of the best individual.
    """

    best_params: np.ndarray
    best_fitness: float
    history: list[tuple[float, float, float]]
    final_eval: list[float]
    config_snapshot: dict

    @property
    def final_eval_mean(self) -> float:
        return float(np.mean(self.final_eval))


def rollout(env: Environment, spec: NetworkSpec, params: np.ndarray, seed: int) -> EpisodeRecord:
    """Play one seeded episode with the given policy parameters."""
    if spec.input_dim != env.state_dim:
        raise ValueError(
            f"network input_dim {spec.input_dim} != {env.name} state_dim {env.state_dim}"
        )
    if spec.output_dim != env.action_spec.size:
        raise ValueError(
            f"network output_dim {spec.output_dim} != {env.name} action size {env.action_spec.size}"
        )
    layers = unflatten(params, spec)
    discrete = env.action_spec.kind == "discrete"
    observation = env.reset(seed)
    total = 0.0
    steps = 0
    while True:
        output = forward_layers(layers, observation, spec)
        action = select_discrete_action(output) if discrete else select_continuous_action(output)
        observation, reward, done = env.step(action)
        total += reward
        steps += 1
        if done:
            return EpisodeRecord(total, steps, seed)


def evaluate_individual(
    env: Environment,
    spec: NetworkSpec,
    params: np.ndarray,
    individual_evals: int,
    rng: np.random.Generator,
) -> float:
    """Fitness: mean total reward over independently seeded episodes."""
    if individual_evals < 1:
        raise ValueError(f"individual_evals must be >= 1, got {individual_evals}")
    seeds = [int(s) for s in rng.integers(0, 2**63, size=individual_evals)]
    return _mean_reward(env, spec, params, seeds)


def _mean_reward(env, spec, params, seeds):
    totals = [rollout(env, spec, params, seed).total_reward for seed in seeds]
    return float(np.mean(totals))


def _evaluate_batch(args):
    # Worker entry point: rebuilds the environment from its name so batches
    # can run in separate processes.
    env_name, spec, rows, seed_lists = args
    env = make_env(env_name)
    return [_mean_reward(env, spec, row, seeds) for row, seeds in zip(rows, seed_lists)]


def _evaluate_population(pop, env, spec, config, generation, executor, workers):
    """Fill in every NaN fitness; episode seeds are pre-assigned per row."""
    rows = [i for i in range(pop.size) if np.isnan(pop.fitnesses[i])]
    if not rows:
        return
    seed_lists = [
        [
            derive_seed(config.master_seed, _EVAL_STREAM, generation, row, episode)
            for episode in range(config.individual_evals)
        ]
        for row in rows
    ]
    if executor is None:
        fits = [
            _mean_reward(env, spec, pop.individuals[row], seeds)
            for row, seeds in zip(rows, seed_lists)
        ]
    else:
        batch_size = max(1, -(-len(rows) // (workers * 4)))
        batches = [
            (
                env.name,
                spec,
                pop.individuals[rows[start : start + batch_size]],
                seed_lists[start : start + batch_size],
            )
            for start in range(0, len(rows), batch_size)
        ]
        fits = [fit for batch in executor.map(_evaluate_batch, batches) for fit in batch]
    pop.fitnesses[rows] = fits


def run_evolution(
    config: EvolutionConfig,
    spec: NetworkSpec,
    env: Environment,
    algorithm: str,
    *,
    workers: int = 1,
    out_dir: Path | None = None,
    repetition: int | None = None,
    final_episodes: int = FINAL_EVAL_EPISODES,
) -> RunResult:
    """Run one full evolutionary loop and evaluate its best individual.

    Per generation: evaluate unevaluated rows, select survivors, sample
    replacements (normal model for ``umda_c``, survivor resampling plus noise
    for ``ga``), and rebuild the population around the unchanged survivors.
    The best individual is the one with the highest recorded fitness over all
    generations; it closes the run with ``final_episodes`` freshly seeded
    episodes. When ``out_dir`` is given the result is persisted there as
    history.csv and result.json.
    """
    if algorithm not in ALGORITHMS:
        raise ValueError(f"algorithm must be one of {ALGORITHMS}, got {algorithm!r}")
    master = config.master_seed
    rng_init = np.random.default_rng(derive_seed(master, _INIT_STREAM))
    rng_sampler = np.random.default_rng(derive_seed(master, _SAMPLER_STREAM))
    pop = init_population(config.pop_size, spec.param_count, rng_init)

    executor = ProcessPoolExecutor(workers) if workers > 1 else None
    best_params = None
    best_fitness = -np.inf
    history: list[tuple[float, float, float]] = []
    try:
        for generation in range(config.generations):
            if generation > 0:
                survivors = select_survivors(pop, config.survivor_rate)
                count = config.pop_size - survivors.size
                if algorithm == "umda_c":
                    model = umda_estimate(survivors)
                    children = umda_sample(model, count, rng_sampler)
                else:
                    children = ga_sample(survivors, count, config.mutation_rate, rng_sampler)
                pop = next_generation(survivors, children, config.pop_size)
                if config.reevaluate_survivors:
                    pop.fitnesses[:] = np.nan
            _evaluate_population(pop, env, spec, config, generation, executor, workers)
            if not np.all(np.isfinite(pop.fitnesses)):
                bad = int(np.flatnonzero(~np.isfinite(pop.fitnesses))[0])
                raise RuntimeError(
                    f"non-finite fitness {pop.fitnesses[bad]} for individual {bad} "
                    f"in generation {generation}"
                )
            leader = int(np.argmax(pop.fitnesses))
            if pop.fitnesses[leader] > best_fitness:
                best_fitness = float(pop.fitnesses[leader])
                best_params = pop.individuals[leader].copy()
            history.append(
                (
                    float(pop.fitnesses.max()),
                    float(pop.fitnesses.mean()),
                    float(pop.fitnesses.min()),
                )
            )
    finally:
        if executor is not None:
            executor.shutdown()

    final_eval = [
        rollout(env, spec, best_params, derive_seed(master, _FINAL_EVAL_STREAM, episode)).total_reward
        for episode in range(final_episodes)
    ]
    snapshot = {
        "environment": env.name,
        "algorithm": algorithm,
        "network": {
            "input_dim": spec.input_dim,
            "output_dim": spec.output_dim,
            "hidden_dims": list(spec.hidden_dims),
            "hidden_activation": spec.hidden_activation,
            "output_activation": spec.output_activation,
        },
        "evolution": {
            "pop_size": config.pop_size,
            "generations": config.generations,
            "survivor_rate": config.survivor_rate,
            "individual_evals": config.individual_evals,
            "mutation_rate": config.mutation_rate,
            "master_seed": config.master_seed,
            "reevaluate_survivors": config.reevaluate_survivors,
        },
    }
    if repetition is not None:
        snapshot["repetition"] = repetition
    result = RunResult(best_params, best_fitness, history, final_eval, snapshot)
    if out_dir is not None:
        save_run(result, Path(out_dir))
    return result


def save_run(result: RunResult, out_dir: Path) -> None:
    """Write history.csv and result.json for one run."""
    out_dir.mkdir(parents=True, exist_ok=True)
    with open(out_dir / "history.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["generation", "best", "mean", "worst"])
        for generation, (best, mean, worst) in enumerate(result.history):
            writer.writerow([generation, repr(best), repr(mean), repr(worst)])
    document = {
        "best_params": [float(v) for v in result.best_params],
        "best_fitness": result.best_fitness,
        "history": [list(triple) for triple in result.history],
        "final_eval": result.final_eval,
        "final_eval_mean": result.final_eval_mean,
        "config_snapshot": result.config_snapshot,
    }
    with open(out_dir / "result.json", "w") as fh:
        json.dump(document, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_run(path: Path) -> RunResult:
    """Reload a persisted result.json."""
    with open(path) as fh:
        document = json.load(fh)
    for key in ("best_params", "config_snapshot", "final_eval"):
        if key not in document:
            raise ValueError(f"result file {path} is missing {key!r}")
    return RunResult(
        best_params=np.asarray(document["best_params"], dtype=float),
        best_fitness=float(document.get("best_fitness", np.nan)),
        history=[tuple(triple) for triple in document.get("history", [])],
        final_eval=[float(v) for v in document["final_eval"]],
        config_snapshot=document["config_snapshot"],
    )


def run_experiment(exp: ExperimentConfig, *, workers: int = 1) -> list[RunResult]:
    """Run the repetition protocol for one (environment, algorithm) pair.

    Each repetition gets its own derived master seed and output directory
    under ``<output_dir>/<environment>/<algorithm>/rep<k>``. A repetition
    that raises is reported on stderr and in failures.log, then skipped.
    Per-repetition means of the final evaluation are merged into
    ``<output_dir>/<environment>/summary.csv``.
    """
    if exp.repetitions < 1:
        raise ValueError(f"repetitions must be >= 1, got {exp.repetitions}")
    env = make_env(exp.environment)
    spec = exp.network_spec()
    evo = exp.evolution_config()
    algorithm_dir = Path(exp.output_dir) / exp.environment / exp.algorithm

    results: list[RunResult] = []
    completed: list[tuple[int, float]] = []
    failures: list[str] = []
    for rep in range(exp.repetitions):
        rep_config = replace(evo, master_seed=derive_seed(exp.master_seed, _REPETITION_STREAM, rep))
        try:
            result = run_evolution(
                rep_config,
                spec,
                env,
                exp.algorithm,
                workers=workers,
                out_dir=algorithm_dir / f"rep{rep}",
                repetition=rep,
            )
        except Exception as err:  # a broken repetition must not sink the rest
            failures.append(f"repetition {rep}: {err}")
            print(f"{exp.algorithm} repetition {rep} failed: {err}", file=sys.stderr)
            continue
        results.append(result)
        completed.append((rep, result.final_eval_mean))
    if failures:
        algorithm_dir.mkdir(parents=True, exist_ok=True)
        (algorithm_dir / "failures.log").write_text("\n".join(failures) + "\n")
    update_summary(Path(exp.output_dir) / exp.environment / "summary.csv", exp.algorithm, completed)
    return results


def update_summary(path: Path, algorithm: str, completed: list[tuple[int, float]]) -> None:
    """Merge per-repetition final averages into the environment summary.

    Existing rows for the same algorithm are replaced; rows are kept sorted
    by (algorithm, repetition) so identical experiments rewrite the file
    byte-identically.
    """
    rows: dict[tuple[str, int], float] = {}
    if path.exists():
        with open(path, newline="") as fh:
            for record in csv.DictReader(fh):
                rows[(record["algorithm"], int(record["repetition"]))] = float(
                    record["avg_reward_100"]
                )
    rows = {key: value for key, value in rows.items() if key[0] != algorithm}
    for rep, mean in completed:
        rows[(algorithm, rep)] = mean
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["algorithm", "repetition", "avg_reward_100"])
        for (name, rep), mean in sorted(rows.items()):
            writer.writerow([name, rep, repr(mean)])


def read_summary(path: Path, algorithm: str | None = None) -> tuple[str, dict[int, float]]:
    """Read one algorithm's rows from a summary.csv.

    When ``algorithm`` is None the file must contain exactly one algorithm.
    Returns (algorithm name, {repetition: avg_reward_100}).
    """
    with open(path, newline="") as fh:
        records = list(csv.DictReader(fh))
    if not records:
        raise ValueError(f"summary file {path} is empty")
    names = sorted({record["algorithm"] for record in records})
    if algorithm is None:
        if len(names) > 1:
            raise ValueError(
                f"summary file {path} holds several algorithms ({', '.join(names)}); "
                "pick one explicitly"
            )
        algorithm = names[0]
    elif algorithm not in names:
        raise ValueError(f"summary file {path} has no rows for {algorithm!r} (found: {', '.join(names)})")
    values: dict[int, float] = {}
    for record in records:
        if record["algorithm"] != algorithm:
            continue
        rep = int(record["repetition"])
        if rep in values:
            raise ValueError(f"summary file {path} repeats repetition {rep} for {algorithm!r}")
        values[rep] = float(record["avg_reward_100"])
    return algorithm, values
