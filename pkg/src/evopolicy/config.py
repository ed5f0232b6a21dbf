"""Experiment configuration: file schema, validation, derived defaults.

Config files are INI-style text with three sections. Only
``experiment.environment`` and ``experiment.algorithm`` are required;
evolution settings left out default from the parameter count n of the
derived network: population 6n, generations 3n, 3 evaluations per
individual, survivor rate 0.5, mutation rate 0.1. Unknown sections or keys
are hard errors so typos cannot silently skew a comparison.

    [experiment]
    environment = cartpole          ; cartpole | lander-discrete | lander-continuous
    algorithm = umda_c              ; umda_c | ga
    repetitions = 10
    master_seed = 0
    output_dir = runs

    [network]
    hidden_dims =                   ; comma-separated, empty for none
    hidden_activation = tanh        ; tanh | sigmoid
    output_activation = linear      ; linear | tanh (continuous tasks need tanh)

    [evolution]
    pop_size = 60
    generations = 30
    individual_evals = 3
    survivor_rate = 0.5
    mutation_rate = 0.1
    reevaluate_survivors = false
"""

from __future__ import annotations

import configparser
import io
import os
from dataclasses import dataclass, field
from pathlib import Path

from .envs import ENVIRONMENTS
from .evolution import ALGORITHMS, EvolutionConfig
from .network import HIDDEN_ACTIVATIONS, OUTPUT_ACTIVATIONS, NetworkSpec

OUTPUT_DIR_ENV_VAR = "EVOPOLICY_OUTPUT_DIR"

_SCHEMA = {
    "experiment": ("environment", "algorithm", "repetitions", "master_seed", "output_dir"),
    "network": ("hidden_dims", "hidden_activation", "output_activation"),
    "evolution": (
        "pop_size",
        "generations",
        "individual_evals",
        "survivor_rate",
        "mutation_rate",
        "reevaluate_survivors",
    ),
}


class ConfigError(ValueError):
    """Invalid or malformed experiment configuration."""


def _default_output_dir() -> Path:
    return Path(os.environ.get(OUTPUT_DIR_ENV_VAR, "runs"))


@dataclass
class ExperimentConfig:
    """One experiment: an environment, an algorithm, and every override.

    ``pop_size``/``generations``/activation fields left as None resolve to
    the environment-derived defaults in :meth:`network_spec` and
    :meth:`evolution_config`.
    """

    environment: str
    algorithm: str
    repetitions: int = 10
    master_seed: int = 0
    output_dir: Path = field(default_factory=_default_output_dir)
    hidden_dims: tuple[int, ...] = ()
    hidden_activation: str | None = None
    output_activation: str | None = None
    pop_size: int | None = None
    generations: int | None = None
    individual_evals: int = 3
    survivor_rate: float = 0.5
    mutation_rate: float = 0.1
    reevaluate_survivors: bool = False

    def __post_init__(self) -> None:
        self.output_dir = Path(self.output_dir)
        self.hidden_dims = tuple(self.hidden_dims)
        if self.environment not in ENVIRONMENTS:
            known = ", ".join(sorted(ENVIRONMENTS))
            raise ConfigError(
                f"experiment.environment: unknown environment {self.environment!r}; "
                f"registered: {known}"
            )
        if self.algorithm not in ALGORITHMS:
            raise ConfigError(
                f"experiment.algorithm: must be one of {', '.join(ALGORITHMS)}, "
                f"got {self.algorithm!r}"
            )
        if self.repetitions < 1:
            raise ConfigError(f"experiment.repetitions: must be >= 1, got {self.repetitions}")
        if not 0 <= self.master_seed < 2**64:
            raise ConfigError(
                f"experiment.master_seed: must be a 64-bit unsigned integer, got {self.master_seed}"
            )
        if any(h < 1 for h in self.hidden_dims):
            raise ConfigError(f"network.hidden_dims: sizes must be >= 1, got {self.hidden_dims}")
        if self.hidden_activation is not None and self.hidden_activation not in HIDDEN_ACTIVATIONS:
            raise ConfigError(
                f"network.hidden_activation: must be one of {', '.join(HIDDEN_ACTIVATIONS)}, "
                f"got {self.hidden_activation!r}"
            )
        if self.output_activation is not None and self.output_activation not in OUTPUT_ACTIVATIONS:
            raise ConfigError(
                f"network.output_activation: must be one of {', '.join(OUTPUT_ACTIVATIONS)}, "
                f"got {self.output_activation!r}"
            )
        if self.pop_size is not None and self.pop_size < 2:
            raise ConfigError(f"evolution.pop_size: must be >= 2, got {self.pop_size}")
        if self.generations is not None and self.generations < 1:
            raise ConfigError(f"evolution.generations: must be >= 1, got {self.generations}")
        if self.individual_evals < 1:
            raise ConfigError(
                f"evolution.individual_evals: must be >= 1, got {self.individual_evals}"
            )
        if not 0.0 < self.survivor_rate <= 1.0:
            raise ConfigError(
                f"evolution.survivor_rate: must be in (0, 1], got {self.survivor_rate}"
            )
        if self.mutation_rate < 0.0:
            raise ConfigError(f"evolution.mutation_rate: must be >= 0, got {self.mutation_rate}")
        # trigger the derived-value checks (survivor count, output activation)
        self.evolution_config()

    def network_spec(self) -> NetworkSpec:
        """Network architecture derived from the environment's interface."""
        env_cls = ENVIRONMENTS[self.environment]
        kind, size = env_cls.action_spec
        output_activation = self.output_activation or ("tanh" if kind == "continuous" else "linear")
        if kind == "continuous" and output_activation != "tanh":
            raise ConfigError(
                "network.output_activation: continuous-action environments need 'tanh' "
                f"to keep actions in [-1, 1], got {output_activation!r}"
            )
        return NetworkSpec(
            input_dim=env_cls.state_dim,
            output_dim=size,
            hidden_dims=self.hidden_dims,
            hidden_activation=self.hidden_activation or "tanh",
            output_activation=output_activation,
        )

    def evolution_config(self) -> EvolutionConfig:
        """Evolution settings with n-derived defaults filled in."""
        n = self.network_spec().param_count
        try:
            return EvolutionConfig(
                pop_size=self.pop_size if self.pop_size is not None else 6 * n,
                generations=self.generations if self.generations is not None else 3 * n,
                survivor_rate=self.survivor_rate,
                individual_evals=self.individual_evals,
                mutation_rate=self.mutation_rate,
                master_seed=self.master_seed,
                reevaluate_survivors=self.reevaluate_survivors,
            )
        except ValueError as err:
            raise ConfigError(f"evolution: {err}") from None


def _check_unknown(parser: configparser.ConfigParser) -> None:
    for section in parser.sections():
        if section not in _SCHEMA:
            raise ConfigError(
                f"unknown section [{section}]; expected one of "
                f"{', '.join(sorted(_SCHEMA))}"
            )
        for key in parser[section]:
            if key not in _SCHEMA[section]:
                raise ConfigError(
                    f"unknown key {section}.{key}; expected one of "
                    f"{', '.join(_SCHEMA[section])}"
                )


def _get(parser, section, key, convert, describe, default):
    if not parser.has_option(section, key):
        return default
    raw = parser.get(section, key).strip()
    if raw == "":
        return default
    try:
        return convert(raw)
    except (ValueError, TypeError):
        raise ConfigError(f"{section}.{key}: expected {describe}, got {raw!r}") from None


def _parse_bool(raw: str) -> bool:
    lowered = raw.lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ValueError(raw)


def _parse_dims(raw: str) -> tuple[int, ...]:
    return tuple(int(part.strip()) for part in raw.split(",") if part.strip())


def parse_config(text: str) -> ExperimentConfig:
    """Parse and validate experiment configuration text."""
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_string(text)
    except configparser.Error as err:
        raise ConfigError(f"malformed config file: {err}") from None
    _check_unknown(parser)
    for key in ("environment", "algorithm"):
        if not parser.has_option("experiment", key) or not parser.get("experiment", key).strip():
            raise ConfigError(f"experiment.{key}: required key is missing")
    return ExperimentConfig(
        environment=parser.get("experiment", "environment").strip(),
        algorithm=parser.get("experiment", "algorithm").strip(),
        repetitions=_get(parser, "experiment", "repetitions", int, "an integer", 10),
        master_seed=_get(parser, "experiment", "master_seed", int, "an integer", 0),
        output_dir=_get(parser, "experiment", "output_dir", Path, "a path", _default_output_dir()),
        hidden_dims=_get(parser, "network", "hidden_dims", _parse_dims, "comma-separated integers", ()),
        hidden_activation=_get(parser, "network", "hidden_activation", str, "an activation name", None),
        output_activation=_get(parser, "network", "output_activation", str, "an activation name", None),
        pop_size=_get(parser, "evolution", "pop_size", int, "an integer", None),
        generations=_get(parser, "evolution", "generations", int, "an integer", None),
        individual_evals=_get(parser, "evolution", "individual_evals", int, "an integer", 3),
        survivor_rate=_get(parser, "evolution", "survivor_rate", float, "a number", 0.5),
        mutation_rate=_get(parser, "evolution", "mutation_rate", float, "a number", 0.1),
        reevaluate_survivors=_get(
            parser, "evolution", "reevaluate_survivors", _parse_bool, "a boolean", False
        ),
    )


def load_config(path: Path | str) -> ExperimentConfig:
    """Load and validate an experiment config file."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as err:
        raise ConfigError(f"cannot read config file {path}: {err}") from None
    return parse_config(text)


def serialize_config(cfg: ExperimentConfig) -> str:
    """Render a config with every effective (resolved) value spelled out.

    Parsing the output again yields the identical effective configuration.
    """
    spec = cfg.network_spec()
    evo = cfg.evolution_config()
    parser = configparser.ConfigParser(interpolation=None)
    parser["experiment"] = {
        "environment": cfg.environment,
        "algorithm": cfg.algorithm,
        "repetitions": str(cfg.repetitions),
        "master_seed": str(cfg.master_seed),
        "output_dir": str(cfg.output_dir),
    }
    parser["network"] = {
        "hidden_dims": ", ".join(str(h) for h in spec.hidden_dims),
        "hidden_activation": spec.hidden_activation,
        "output_activation": spec.output_activation,
    }
    parser["evolution"] = {
        "pop_size": str(evo.pop_size),
        "generations": str(evo.generations),
        "individual_evals": str(evo.individual_evals),
        "survivor_rate": repr(evo.survivor_rate),
        "mutation_rate": repr(evo.mutation_rate),
        "reevaluate_survivors": str(evo.reevaluate_survivors).lower(),
    }
    buffer = io.StringIO()
    parser.write(buffer)
    return buffer.getvalue()
