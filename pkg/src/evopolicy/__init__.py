"""Neuroevolution of feed-forward control policies.

Optimizes flat policy-network parameter vectors with a per-dimension
Gaussian estimation-of-distribution algorithm (``umda_c``) or a genetic
algorithm baseline (``ga``) on built-in episodic environments, and compares
the two with a Bayesian signed-rank analysis.
"""

from .bayes import (
    PosteriorTriple,
    RopeConfig,
    bayesian_signed_rank,
    dominance_boundaries,
    simplex_coordinates,
    summarize,
)
from .config import ConfigError, ExperimentConfig, load_config, parse_config, serialize_config
from .envs import ENVIRONMENTS, ActionSpec, Environment, StepResult, make_env
from .evolution import (
    ALGORITHMS,
    STD_FLOOR,
    EvolutionConfig,
    Population,
    UnivariateModel,
    ga_sample,
    init_population,
    next_generation,
    select_survivors,
    umda_estimate,
    umda_sample,
)
from .harness import (
    EpisodeRecord,
    RunResult,
    derive_seed,
    evaluate_individual,
    load_run,
    read_summary,
    rollout,
    run_evolution,
    run_experiment,
    save_run,
)
from .network import (
    NetworkSpec,
    flatten,
    forward,
    select_continuous_action,
    select_discrete_action,
    unflatten,
)

__version__ = "0.1.0"
