"""Distribution metrics, symmetry verdicts, scaling fits and cycle diagnostics."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .lattice import Distribution

UNITARY_TOL = 1e-10
DENSITY_TOL = 1e-8


@dataclass(frozen=True)
class SymmetryVerdict:
    max_abs_diff: float
    total_variation: float
    tolerance: float

    @property
    def holds(self) -> bool:
        return self.max_abs_diff <= self.tolerance

    def line(self) -> str:
        return f"max_abs_diff={self.max_abs_diff:.17g} tol={self.tolerance:g} holds={str(self.holds).lower()}"


@dataclass(frozen=True)
class SweepPoint:
    value: float
    sigma: float
    sigma_ratio: float


def _same_topology(d1: Distribution, d2: Distribution) -> None:
    if d1.topology != d2.topology:
        raise ValueError(f"topology mismatch: {d1.topology} vs {d2.topology}")


def std_dev(d: Distribution) -> float:
    """Standard deviation of the signed line position."""
    if d.topology.is_cycle:
        raise ValueError("standard deviation is undefined on a cycle (no signed coordinate)")
    x = d.labels.astype(float)
    p = d.probs
    mean = float(np.dot(x, p))
    var = float(np.dot((x - mean) ** 2, p))
    return math.sqrt(max(var, 0.0))


def total_variation(d1: Distribution, d2: Distribution) -> float:
    _same_topology(d1, d2)
    return 0.5 * float(np.sum(np.abs(d1.probs - d2.probs)))


def symmetry_verdict(d1: Distribution, d2: Distribution, tol: float = UNITARY_TOL) -> SymmetryVerdict:
    _same_topology(d1, d2)
    diff = float(np.max(np.abs(d1.probs - d2.probs)))
    return SymmetryVerdict(diff, total_variation(d1, d2), float(tol))


def fit_scaling_exponent(points: Sequence[tuple[float, float]]) -> float:
    """Least-squares slope of ``log sigma`` against ``log n``."""
    if len(points) < 3:
        raise ValueError(f"need at least 3 (n, sigma) points, got {len(points)}")
    n = np.array([p[0] for p in points], dtype=float)
    s = np.array([p[1] for p in points], dtype=float)
    if np.any(n < 10):
        raise ValueError("all n must be >= 10")
    if np.any(s <= 0) or not np.all(np.isfinite(s)):
        raise ValueError("sigma values must be positive and finite")
    slope, _ = np.polyfit(np.log(n), np.log(s), 1)
    return float(slope)


def uniformity_deviation(d: Distribution) -> float:
    """``max_x |P(x) - 1/R|`` on a cycle of ``R`` sites."""
    if not d.topology.is_cycle:
        raise ValueError("uniformity deviation is defined on cycles only")
    return float(np.max(np.abs(d.probs - 1.0 / d.topology.sites)))


def time_average(ds: Sequence[Distribution]) -> Distribution:
    if not ds:
        raise ValueError("cannot average an empty list of distributions")
    topo = ds[0].topology
    for d in ds[1:]:
        _same_topology(ds[0], d)
    return Distribution(topo, np.mean([d.probs for d in ds], axis=0))
