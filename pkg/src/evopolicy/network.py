"""Feed-forward policy networks stored as flat parameter vectors."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

HIDDEN_ACTIVATIONS = ("tanh", "sigmoid")
OUTPUT_ACTIVATIONS = ("linear", "tanh")


@dataclass(frozen=True)
class NetworkSpec:
    """Dense feed-forward architecture with one bias per unit.

    ``hidden_dims`` is empty for the single-layer policies used by the
    built-in experiments, but arbitrary depths are supported. Discrete-action
    policies keep a linear output (the argmax rule is invariant under any
    monotone output activation); continuous-action policies use ``tanh`` so
    every output already lies in the [-1, 1] action range.
    """

    input_dim: int
    output_dim: int
    hidden_dims: tuple[int, ...] = ()
    hidden_activation: str = "tanh"
    output_activation: str = "linear"

    def __post_init__(self) -> None:
        object.__setattr__(self, "hidden_dims", tuple(self.hidden_dims))
        if self.input_dim < 1:
            raise ValueError(f"input_dim must be >= 1, got {self.input_dim}")
        if self.output_dim < 1:
            raise ValueError(f"output_dim must be >= 1, got {self.output_dim}")
        if any(h < 1 for h in self.hidden_dims):
            raise ValueError(f"hidden_dims must all be >= 1, got {self.hidden_dims}")
        if self.hidden_activation not in HIDDEN_ACTIVATIONS:
            raise ValueError(
                f"hidden_activation must be one of {HIDDEN_ACTIVATIONS}, "
                f"got {self.hidden_activation!r}"
            )
        if self.output_activation not in OUTPUT_ACTIVATIONS:
            raise ValueError(
                f"output_activation must be one of {OUTPUT_ACTIVATIONS}, "
                f"got {self.output_activation!r}"
            )

    @property
    def layer_dims(self) -> tuple[int, ...]:
        return (self.input_dim, *self.hidden_dims, self.output_dim)

    @property
    def param_count(self) -> int:
        """Total number of weights and biases: sum of (fan_in + 1) * fan_out."""
        dims = self.layer_dims
        return sum((fan_in + 1) * fan_out for fan_in, fan_out in zip(dims, dims[1:]))


def unflatten(params: np.ndarray, spec: NetworkSpec) -> list[tuple[np.ndarray, np.ndarray]]:
    """Split a flat parameter vector into per-layer (weights, biases) pairs.

    Layout: for each layer in order, the (fan_out, fan_in) weight matrix in
    row-major order (one row per output unit), then that layer's fan_out
    biases. ``flatten`` is the exact inverse.
    """
    params = np.asarray(params, dtype=float)
    if params.ndim != 1 or params.shape[0] != spec.param_count:
        raise ValueError(
            f"expected {spec.param_count} parameters for layers {spec.layer_dims}, "
            f"got shape {params.shape}"
        )
    layers = []
    offset = 0
    dims = spec.layer_dims
    for fan_in, fan_out in zip(dims, dims[1:]):
        weights = params[offset : offset + fan_in * fan_out].reshape(fan_out, fan_in)
        offset += fan_in * fan_out
        biases = params[offset : offset + fan_out]
        offset += fan_out
        layers.append((weights, biases))
    return layers


def flatten(layers: list[tuple[np.ndarray, np.ndarray]], spec: NetworkSpec) -> np.ndarray:
    """Pack per-layer (weights, biases) pairs back into one flat vector."""
    parts = []
    for weights, biases in layers:
        parts.append(np.asarray(weights, dtype=float).ravel())
        parts.append(np.asarray(biases, dtype=float).ravel())
    params = np.concatenate(parts) if parts else np.empty(0)
    if params.shape[0] != spec.param_count:
        raise ValueError(
            f"layers hold {params.shape[0]} parameters, spec expects {spec.param_count}"
        )
    return params


def _activate(values: np.ndarray, name: str) -> np.ndarray:
    if name == "tanh":
        return np.tanh(values)
    if name == "sigmoid":
        out = np.empty_like(values)
        positive = values >= 0
        out[positive] = 1.0 / (1.0 + np.exp(-values[positive]))
        exp_v = np.exp(values[~positive])
        out[~positive] = exp_v / (1.0 + exp_v)
        return out
    return values  # linear


def forward_layers(
    layers: list[tuple[np.ndarray, np.ndarray]], state: np.ndarray, spec: NetworkSpec
) -> np.ndarray:
    """Forward pass over pre-unflattened layers (hot path for rollouts)."""
    x = state
    for weights, biases in layers[:-1]:
        x = _activate(weights @ x + biases, spec.hidden_activation)
    weights, biases = layers[-1]
    return _activate(weights @ x + biases, spec.output_activation)


def forward(spec: NetworkSpec, params: np.ndarray, state: np.ndarray) -> np.ndarray:
    """Compute the network output for one state vector.

    Each unit computes activation(sum_j w_ij * x_j + b_i); hidden layers use
    ``spec.hidden_activation`` and the final layer ``spec.output_activation``.
    """
    state = np.asarray(state, dtype=float)
    if state.shape != (spec.input_dim,):
        raise ValueError(f"state must have shape ({spec.input_dim},), got {state.shape}")
    if not np.all(np.isfinite(state)):
        raise ValueError("state contains non-finite entries")
    return forward_layers(unflatten(params, spec), state, spec)


def select_discrete_action(output: np.ndarray) -> int:
    """Index of the largest output value; exact ties go to the lowest index."""
    output = np.asarray(output, dtype=float)
    if output.size == 0:
        raise ValueError("output vector is empty")
    if not np.all(np.isfinite(output)):
        raise ValueError("output contains non-finite entries")
    return int(np.argmax(output))


def select_continuous_action(output: np.ndarray) -> np.ndarray:
    """Pass tanh-activated outputs through unchanged as the action vector."""
    output = np.asarray(output, dtype=float)
    if output.size == 0:
        raise ValueError("output vector is empty")
    if not np.all(np.isfinite(output)):
        raise ValueError("output contains non-finite entries")
    if np.any(np.abs(output) > 1.0):
        raise ValueError(
            f"action components outside [-1, 1]: {output}; "
            "continuous policies need a tanh output layer"
        )
    return output
