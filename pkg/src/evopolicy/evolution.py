"""Generational operators: truncation selection, a per-dimension normal
sampler (UMDA over continuous genes), a genetic-algorithm sampler, and
elitist replacement."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

ALGORITHMS = ("umda_c", "ga")

# Lower bound on per-gene standard deviations. A fully converged column would
# otherwise collapse to a point mass and stall the run; this keeps a sliver of
# sampling diversity without perturbing converged solutions.
STD_FLOOR = 1e-3


@dataclass
class Population:
    """Row-per-individual parameter matrix with per-row fitness.

    ``fitnesses`` entries are NaN until the corresponding row has been
    evaluated.
    """

    individuals: np.ndarray
    fitnesses: np.ndarray

    def __post_init__(self) -> None:
        self.individuals = np.asarray(self.individuals, dtype=float)
        self.fitnesses = np.asarray(self.fitnesses, dtype=float)
        if self.individuals.ndim != 2:
            raise ValueError(f"individuals must be a 2-D matrix, got ndim {self.individuals.ndim}")
        if self.fitnesses.shape != (self.individuals.shape[0],):
            raise ValueError(
                f"fitnesses must have one entry per row: "
                f"{self.fitnesses.shape} vs {self.individuals.shape[0]} rows"
            )

    @property
    def size(self) -> int:
        return self.individuals.shape[0]


@dataclass(frozen=True)
class UnivariateModel:
    """Independent normal distributions, one per solution dimension."""

    means: np.ndarray
    stds: np.ndarray


@dataclass(frozen=True)
class EvolutionConfig:
    """Hyperparameters of one evolutionary run.

    ``mutation_rate`` only affects the GA sampler. ``master_seed`` roots
    every random stream of the run (initialisation, sampling, episode seeds),
    making the whole trajectory a pure function of this configuration.
    """

    pop_size: int
    generations: int
    survivor_rate: float = 0.5
    individual_evals: int = 3
    mutation_rate: float = 0.1
    master_seed: int = 0
    reevaluate_survivors: bool = False

    def __post_init__(self) -> None:
        if self.pop_size < 2:
            raise ValueError(f"pop_size must be >= 2, got {self.pop_size}")
        if self.generations < 1:
            raise ValueError(f"generations must be >= 1, got {self.generations}")
        if not 0.0 < self.survivor_rate <= 1.0:
            raise ValueError(f"survivor_rate must be in (0, 1], got {self.survivor_rate}")
        if self.individual_evals < 1:
            raise ValueError(f"individual_evals must be >= 1, got {self.individual_evals}")
        if self.mutation_rate < 0.0:
            raise ValueError(f"mutation_rate must be >= 0, got {self.mutation_rate}")
        if not 0 <= self.master_seed < 2**64:
            raise ValueError(f"master_seed must be a 64-bit unsigned integer, got {self.master_seed}")
        if self.survivor_count < 1:
            raise ValueError(
                f"floor(pop_size * survivor_rate) must be >= 1, "
                f"got {self.pop_size} * {self.survivor_rate}"
            )

    @property
    def survivor_count(self) -> int:
        return int(self.pop_size * self.survivor_rate)


def init_population(pop_size: int, n: int, rng: np.random.Generator) -> Population:
    """Draw a fresh population with independent N(0, 1) genes, fitness unset."""
    if pop_size < 2:
        raise ValueError(f"pop_size must be >= 2, got {pop_size}")
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return Population(rng.standard_normal((pop_size, n)), np.full(pop_size, np.nan))


def select_survivors(pop: Population, survivor_rate: float) -> Population:
    """Keep the floor(pop_size * survivor_rate) fittest rows, best first.

    Equal fitnesses are broken by original row index, lower first. Rows are
    copied unchanged.
    """
    if np.isnan(pop.fitnesses).any():
        raise RuntimeError("population has unevaluated rows; evaluate before selecting")
    count = int(pop.size * survivor_rate)
    if count < 1:
        raise ValueError(f"survivor_rate {survivor_rate} keeps no rows of {pop.size}")
    order = np.argsort(-pop.fitnesses, kind="stable")[:count]
    return Population(pop.individuals[order].copy(), pop.fitnesses[order].copy())


def umda_estimate(survivors: Population) -> UnivariateModel:
    """Fit one normal distribution per column of the survivor matrix.

    Standard deviations divide by the row count (not count - 1, so a single
    survivor is valid) and are floored at STD_FLOOR.
    """
    means = survivors.individuals.mean(axis=0)
    stds = np.maximum(survivors.individuals.std(axis=0), STD_FLOOR)
    return UnivariateModel(means, stds)


def umda_sample(model: UnivariateModel, count: int, rng: np.random.Generator) -> np.ndarray:
    """Draw ``count`` new rows, gene j from N(means[j], stds[j]^2)."""
    if count < 0:
        raise ValueError(f"count must be >= 0, got {count}")
    n = model.means.shape[0]
    return rng.normal(model.means, model.stds, size=(count, n))


def ga_sample(
    survivors: Population, count: int, mutation_rate: float, rng: np.random.Generator
) -> np.ndarray:
    """Gene-wise uniform resampling from the survivors plus Gaussian noise.

    Each gene of each new row copies the same column of a uniformly random
    survivor, then receives additive N(0, mutation_rate^2) noise.
    """
    if count < 0:
        raise ValueError(f"count must be >= 0, got {count}")
    if mutation_rate < 0.0:
        raise ValueError(f"mutation_rate must be >= 0, got {mutation_rate}")
    rows, n = survivors.individuals.shape
    picks = rng.integers(0, rows, size=(count, n))
    genes = survivors.individuals[picks, np.arange(n)]
    return genes + rng.normal(0.0, mutation_rate, size=(count, n))


def next_generation(
    survivors: Population, new_individuals: np.ndarray, pop_size: int
) -> Population:
    """Stack survivors (fitness kept) above new rows (fitness unset)."""
    new_individuals = np.asarray(new_individuals, dtype=float)
    n = survivors.individuals.shape[1]
    if new_individuals.size == 0:
        new_individuals = new_individuals.reshape(0, n)
    if new_individuals.ndim != 2 or new_individuals.shape[1] != n:
        raise ValueError(
            f"new individuals must be rows of length {n}, got shape {new_individuals.shape}"
        )
    if survivors.size + new_individuals.shape[0] != pop_size:
        raise ValueError(
            f"{survivors.size} survivors + {new_individuals.shape[0]} new rows "
            f"!= population size {pop_size}"
        )
    individuals = np.vstack([survivors.individuals, new_individuals])
    fitnesses = np.concatenate(
        [survivors.fitnesses, np.full(new_individuals.shape[0], np.nan)]
    )
    return Population(individuals, fitnesses)
