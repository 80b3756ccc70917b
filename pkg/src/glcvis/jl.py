"""Dimension bounds for distance-preserving point mappings, plus empirical
verification with seeded random projections.

The bound implemented is: for m points and tolerance eps in (0, 1), any
dimension k > 8*ln(m)/eps^2 admits a linear map whose pairwise squared
distances all stay within a factor 1 +/- eps. Projecting far below that
bound (e.g. to 2-D) demonstrably corrupts distances, which is the reason
point-to-point scatter mappings of high-dimensional data cannot be trusted
for arbitrary point sets.

At the boundary case eps = 1 (outside the operational domain of this
module) low-dimensional distances are known to stay below sqrt(2) ~ 142% of
the original; they can still collapse to zero, so nothing is asserted about
a lower bound there.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .coords import mapping_distortion


class BoundsError(ValueError):
    pass


def _check_eps(eps: float) -> None:
    if not 0.0 < eps < 1.0:
        raise BoundsError(f"eps must be in (0, 1), got {eps}")


@dataclass(frozen=True)
class JlEstimate:
    m: int
    epsilon: float
    k_min: int

    def to_json(self) -> dict:
        return {"m": self.m, "epsilon": self.epsilon, "k_min": self.k_min}


def min_dimension(m: int, eps: float) -> JlEstimate:
    """Smallest integer dimension strictly greater than 8*ln(m)/eps^2."""
    if m < 1:
        raise BoundsError(f"point count must be >= 1, got {m}")
    _check_eps(eps)
    bound = 8.0 * math.log(m) / (eps * eps)
    return JlEstimate(m=m, epsilon=eps, k_min=int(math.floor(bound)) + 1)


def max_points(k: int, eps: float) -> int:
    """Largest m whose required dimension does not exceed k.

    Inverse of min_dimension up to integer rounding: min_dimension(m) <= k
    holds and fails for m + 1. Computed from exp(k*eps^2/8) and then nudged
    so the defining inequalities hold exactly in floating point.
    """
    if k < 1:
        raise BoundsError(f"dimension must be >= 1, got {k}")
    _check_eps(eps)
    m = max(1, int(math.floor(math.exp(k * eps * eps / 8.0))))
    while min_dimension(m + 1, eps).k_min <= k:
        m += 1
    while m > 1 and min_dimension(m, eps).k_min > k:
        m -= 1
    return m


@dataclass(frozen=True)
class ProjectionReport:
    """Outcome of seeded random-projection trials against the 1 +/- eps band."""

    m: int
    n: int
    epsilon: float
    k_requested: int
    k_used: int
    capped: bool  # requested dimension exceeded n; identity map used
    trials: int
    max_deviation_per_trial: tuple[float, ...]
    success: bool

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "n": self.n,
            "epsilon": self.epsilon,
            "k_requested": self.k_requested,
            "k_used": self.k_used,
            "capped": self.capped,
            "trials": self.trials,
            "max_deviation_per_trial": list(self.max_deviation_per_trial),
            "success": self.success,
        }


def verify_random_projection(
    points: Sequence[Sequence[float]] | np.ndarray,
    eps: float,
    trials: int = 20,
    seed: int = 0,
    k: int | None = None,
) -> ProjectionReport:
    """Empirically test whether a random linear map keeps all pairwise
    squared-distance ratios within [1 - eps, 1 + eps].

    The target dimension defaults to the computed minimum for len(points),
    capped at the input dimension (mapping to k >= n is the identity and
    trivially succeeds). Map entries are i.i.d. zero-mean Gaussians scaled
    by 1/sqrt(k); each trial's stream derives from (seed, trial), so runs
    are bit-reproducible.
    """
    X = np.asarray(points, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] < 2:
        raise BoundsError("need a 2-D matrix with at least two points")
    _check_eps(eps)
    if trials < 1:
        raise BoundsError("need at least one trial")
    m, n = X.shape
    k_requested = k if k is not None else min_dimension(m, eps).k_min
    if k_requested < 1:
        raise BoundsError("target dimension must be >= 1")
    capped = k_requested >= n
    k_used = min(k_requested, n)

    deviations: list[float] = []
    success = False
    if capped:
        report = mapping_distortion(X, X)
        deviations = [max(report.max_ratio - 1.0, 1.0 - report.min_ratio)]
        success = True
    else:
        for trial in range(trials):
            rng = np.random.default_rng([seed, trial])
            R = rng.standard_normal((n, k_used)) / math.sqrt(k_used)
            low = X @ R
            report = mapping_distortion(X, low)
            deviations.append(max(report.max_ratio - 1.0, 1.0 - report.min_ratio))
            if report.max_ratio <= 1.0 + eps and report.min_ratio >= 1.0 - eps:
                success = True
    return ProjectionReport(
        m=m,
        n=n,
        epsilon=eps,
        k_requested=k_requested,
        k_used=k_used,
        capped=capped,
        trials=trials if not capped else 1,
        max_deviation_per_trial=tuple(deviations),
        success=success,
    )
