"""Ripley's K and scaled L estimators for 1-D binary sequences.

L(t) = K(t) / (2t) reads as: 1 for independent points, above 1 for
attraction (clustering), below 1 for repulsion. A track that clusters at
the scale of the tested relation is a candidate for a distance-preserving
null model.

Positions are 1-indexed internally to match the usual estimator algebra;
the module boundary accepts ordinary 0-indexed sequences.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .tracks import BinarySequence

DEFAULT_SCALES = (10, 25, 50, 100, 250, 500)


@dataclass(frozen=True)
class ClusteringProfile:
    """Scaled L values across a grid of distances."""

    scales: tuple[int, ...]
    l_values: tuple[float, ...]
    lambda_hat: float

    def __post_init__(self) -> None:
        if len(self.scales) != len(self.l_values):
            raise ValueError("scales and l_values must have equal length")
        if not self.lambda_hat > 0:
            raise ValueError("lambda_hat must be positive")


def estimate_lambda(seq: BinarySequence) -> float:
    """Mean of the indicators (points per base pair)."""
    return float(seq.values.mean())


def pair_weight(i: int, j: int, n: int) -> float:
    """Edge-correction weight for a pair of 1-indexed coordinates.

    Equals 1 for any pair inside [1, n]; strictly between 0 and 1 when one
    coordinate lies outside.
    """
    if i == j:
        raise ValueError("pair weight is undefined for i == j")
    lo, hi = (i, j) if i < j else (j, i)
    return (min(hi, n) - max(lo, 1)) / (hi - lo)


def estimate_k(seq: BinarySequence, tau: int) -> float:
    """K estimator at distance ``tau``.

    Sums inverse pair weights over ordered point pairs within ``tau``
    (out-of-range indicators are zero), normalized by n * lambda_hat^2.
    Runs over point pairs, so cost scales with the points, not with
    n * tau.
    """
    n = len(seq)
    if not 1 <= tau < n:
        raise ValueError(f"tau must lie in [1, {n - 1}], got {tau}")
    positions = np.flatnonzero(seq.values).astype(np.int64) + 1
    m = positions.size
    if m < 2:
        raise ValueError("K undefined: need at least 2 points")
    lam = m / n
    total = 0.0
    for idx in range(m - 1):
        i = int(positions[idx])
        hi = int(np.searchsorted(positions, i + tau, side="right"))
        js = positions[idx + 1 : hi]
        if js.size == 0:
            continue
        w = (np.minimum(js, n) - max(i, 1)) / (js - i)
        assert np.all(w > 0)
        total += float((1.0 / w).sum())
    return 2.0 * total / (n * lam * lam)


def estimate_l(seq: BinarySequence, tau: int) -> float:
    """Scaled estimator L(tau) = K(tau) / (2 * tau)."""
    return estimate_k(seq, tau) / (2.0 * tau)


def estimate_l_profile(seq: BinarySequence, scales: Sequence[int]) -> ClusteringProfile:
    """L across a scale grid (duplicates evaluated as given, no dedup)."""
    l_values = tuple(estimate_l(seq, int(tau)) for tau in scales)
    return ClusteringProfile(
        scales=tuple(int(t) for t in scales),
        l_values=l_values,
        lambda_hat=estimate_lambda(seq),
    )
