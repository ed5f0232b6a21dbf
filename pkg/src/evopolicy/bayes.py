"""Bayesian signed-rank comparison of paired scores with a region of
practical equivalence (rope).

Given per-repetition score differences between two algorithms, the posterior
over (P(second better), P(practically equivalent), P(first better)) is
sampled with a Dirichlet-process construction: each Monte Carlo draw places
Dirichlet weights over the differences plus one prior pseudo-observation and
measures how much pairwise Walsh-average mass falls left of, inside, or right
of the rope interval.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np


class PosteriorTriple(NamedTuple):
    p_left: float
    p_rope: float
    p_right: float


@dataclass(frozen=True)
class RopeConfig:
    """Prior and sampling settings for the signed-rank comparison.

    ``rope_radius`` is the half-width of the practical-equivalence interval:
    differences whose pairwise midpoints land in [-rope, +rope] (closed on
    both ends) count as ties. ``prior_strength`` is the Dirichlet weight of
    the single pseudo-observation placed at ``prior_pseudo_observation``; the
    data points carry weight 1 each.
    """

    rope_radius: float = 0.1
    prior_strength: float = 0.5
    prior_pseudo_observation: float = 0.0
    mc_samples: int = 50_000

    def __post_init__(self) -> None:
        if self.rope_radius <= 0.0:
            raise ValueError(f"rope_radius must be positive, got {self.rope_radius}")
        if self.prior_strength <= 0.0:
            raise ValueError(f"prior_strength must be positive, got {self.prior_strength}")
        if self.mc_samples < 1000:
            raise ValueError(f"mc_samples must be >= 1000, got {self.mc_samples}")


def bayesian_signed_rank(
    diffs: np.ndarray, cfg: RopeConfig | None = None, rng: np.random.Generator | None = None
) -> np.ndarray:
    """Sample posterior probability triples from paired differences.

    ``diffs`` holds the per-repetition differences (first algorithm minus
    second). Returns an (mc_samples, 3) array whose rows (p_left, p_rope,
    p_right) sum to one; p_right is the probability mass on "first algorithm
    better", p_left on "second better".

    Each draw takes weights (w_0, w_1, ..., w_m) ~ Dirichlet(s, 1, ..., 1)
    over the augmented sample (z_0, z_1, ..., z_m), with z_0 the prior
    pseudo-observation and s its strength, and accumulates the weight
    2*w_i*w_j (w_i^2 on the diagonal) of every pair i <= j into the region
    holding the pair midpoint (z_i + z_j) / 2.
    """
    if cfg is None:
        cfg = RopeConfig()
    if rng is None:
        rng = np.random.default_rng()
    diffs = np.asarray(diffs, dtype=float)
    if diffs.ndim != 1 or diffs.shape[0] < 2:
        raise ValueError(f"need a vector of at least two paired differences, got shape {diffs.shape}")
    if not np.all(np.isfinite(diffs)):
        raise ValueError("differences contain non-finite entries")

    z = np.concatenate([[cfg.prior_pseudo_observation], diffs])
    midpoints = (z[:, None] + z[None, :]) / 2.0
    in_left = (midpoints < -cfg.rope_radius).astype(float)
    in_right = (midpoints > cfg.rope_radius).astype(float)
    in_rope = 1.0 - in_left - in_right

    alpha = np.concatenate([[cfg.prior_strength], np.ones(diffs.shape[0])])
    weights = rng.dirichlet(alpha, size=cfg.mc_samples)
    p_left = np.einsum("si,ij,sj->s", weights, in_left, weights)
    p_rope = np.einsum("si,ij,sj->s", weights, in_rope, weights)
    p_right = np.einsum("si,ij,sj->s", weights, in_right, weights)
    triples = np.stack([p_left, p_rope, p_right], axis=1)
    return triples / triples.sum(axis=1, keepdims=True)


def summarize(triples: np.ndarray) -> PosteriorTriple:
    """Component-wise mean of posterior triples (a single triple passes through)."""
    triples = np.atleast_2d(np.asarray(triples, dtype=float))
    if triples.size == 0:
        raise ValueError("no posterior samples to summarize")
    if triples.shape[1] != 3:
        raise ValueError(f"expected rows of (p_left, p_rope, p_right), got shape {triples.shape}")
    means = triples.mean(axis=0)
    return PosteriorTriple(float(means[0]), float(means[1]), float(means[2]))


# Triangle vertices of the 2-D simplex plot: "second algorithm better" at the
# origin, the rope at the apex, "first algorithm better" at (1, 0).
VERTEX_LEFT = np.array([0.0, 0.0])
VERTEX_ROPE = np.array([0.5, math.sqrt(3.0) / 2.0])
VERTEX_RIGHT = np.array([1.0, 0.0])


def simplex_coordinates(triples: np.ndarray) -> np.ndarray:
    """Map probability triples barycentrically into the plot triangle.

    Returns an (n, 2) array: point = p_left * V_left + p_rope * V_rope +
    p_right * V_right, so (1, 0, 0) lands on V_left and (1/3, 1/3, 1/3) on
    the centroid.
    """
    triples = np.atleast_2d(np.asarray(triples, dtype=float))
    if triples.shape[1] != 3:
        raise ValueError(f"expected rows of (p_left, p_rope, p_right), got shape {triples.shape}")
    vertices = np.stack([VERTEX_LEFT, VERTEX_ROPE, VERTEX_RIGHT])
    return triples @ vertices


def dominance_boundaries() -> np.ndarray:
    """The three segments separating the dominance regions of the triangle.

    Each region is the locus where one component of the triple is largest;
    the boundaries run from the centroid to the midpoint of each edge (where
    two components are equal and maximal). Returns a (3, 2, 2) array of
    segments as (start, end) point pairs.
    """
    centroid = simplex_coordinates(np.full(3, 1.0 / 3.0))[0]
    edge_midpoints = simplex_coordinates(
        np.array(
            [
                [0.5, 0.5, 0.0],  # left = rope
                [0.0, 0.5, 0.5],  # rope = right
                [0.5, 0.0, 0.5],  # left = right
            ]
        )
    )
    return np.stack([np.stack([centroid, end]) for end in edge_midpoints])
