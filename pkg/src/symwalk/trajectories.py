"""Kraus unravelings of a noisy walk: exact branch enumeration and Monte-Carlo sampling.

An unraveling fixes which Kraus operator acts after each step. The
enumerator carries every unnormalized branch ``(E_jn K) ... (E_j1 K)|psi0>``
without renormalizing, so a branch's squared norm is its probability. The
sampler instead draws one operator per step with probability equal to the
candidate's squared norm and renormalizes. Both must reproduce the
density-matrix evolution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence

import numpy as np

from ._backend import get_kernels
from .engine import WalkConfig, augment, evolve_density, step_ops, Symmetry
from .errors import BranchCapError
from .lattice import Distribution, new_pure, position_distribution

DEFAULT_BRANCH_CAP = 2**20
# branches held in memory at once during enumeration
_CHUNK = 4096


@dataclass(frozen=True)
class Unraveling:
    kraus_indices: tuple[int, ...]
    weight: float


@dataclass(eq=False)
class TrajectoryEstimate:
    distribution: Distribution
    samples: int
    std_error: np.ndarray
    seed: int


@dataclass(frozen=True)
class SymmetryReport:
    symmetry: str
    branches: int
    max_branch_discrepancy: float
    aggregate_discrepancy: float
    tolerance: float

    @property
    def holds(self) -> bool:
        return self.aggregate_discrepancy <= self.tolerance


def _channel_ops(config: WalkConfig) -> np.ndarray:
    ch = config.pipeline.channel
    if ch is None:
        return np.eye(2, dtype=complex)[None]
    return np.stack(ch.operators)


def branch_count(config: WalkConfig) -> int:
    return len(_channel_ops(config)) ** config.steps


def _check_cap(configs: Sequence[WalkConfig], cap: int) -> None:
    for c in configs:
        count = branch_count(c)
        if count > cap:
            raise BranchCapError(
                f"{count} branches ({len(_channel_ops(c))}^{c.steps}) exceed the cap of {cap}"
            )


def _iter_leaves(
    configs: Sequence[WalkConfig], backend=None
) -> Iterator[tuple[np.ndarray, list[np.ndarray]]]:
    """Enumerate all branches of several walks in lockstep.

    Yields ``(indices, batches)`` where ``indices`` is ``(B, n)`` Kraus
    choices and ``batches[i]`` the ``(B, 2, N)`` unnormalized final branch
    states of ``configs[i]`` for those choices. The walks must share step
    count, topology and channel operator count.
    """
    k = get_kernels(backend)
    first = configs[0]
    n = first.steps
    topo = first.topology
    kraus = [_channel_ops(c) for c in configs]
    m = len(kraus[0])
    if any(len(kr) != m or c.steps != n or c.topology != topo for c, kr in zip(configs, kraus)):
        raise ValueError("walks enumerated together must share steps, topology and Kraus count")
    ops = [[step_ops(c.step_pipeline(s)) for s in range(n)] for c in configs]

    def expand(step, idx, batches):
        if step == n:
            yield idx, batches
            return
        moved = [
            k.pure_step(b, o[step].coin, o[step].gate, o[step].direction, topo.is_cycle)
            for b, o in zip(batches, ops)
        ]
        size = idx.shape[0]
        if size * m <= _CHUNK:
            # breadth-first: branch j of parent i lands at j * size + i
            new_idx = np.concatenate(
                [np.hstack([idx, np.full((size, 1), j)]) for j in range(m)]
            )
            new_batches = [
                np.einsum("jab,ibx->jiax", kr, mv).reshape(m * size, 2, -1)
                for kr, mv in zip(kraus, moved)
            ]
            yield from expand(step + 1, new_idx, new_batches)
        else:
            for j in range(m):
                child_idx = np.hstack([idx, np.full((size, 1), j)])
                children = [np.einsum("ab,ibx->iax", kr[j], mv) for kr, mv in zip(kraus, moved)]
                yield from expand(step + 1, child_idx, children)

    start = [new_pure(c.initial, topo).amplitudes[None] for c in configs]
    yield from expand(0, np.zeros((1, 0), dtype=int), start)


def iter_unravelings(config: WalkConfig, cap: int = DEFAULT_BRANCH_CAP, backend=None) -> Iterator[Unraveling]:
    _check_cap([config], cap)
    for idx, (batch,) in _iter_leaves([config], backend):
        weights = np.sum(np.abs(batch) ** 2, axis=(1, 2))
        for row, w in zip(idx, weights):
            yield Unraveling(tuple(int(v) for v in row), float(w))


def enumerate_exact(config: WalkConfig, cap: int = DEFAULT_BRANCH_CAP, backend=None) -> Distribution:
    """Positional distribution as the weighted sum over every unraveling."""
    _check_cap([config], cap)
    partial = []
    for _, (batch,) in _iter_leaves([config], backend):
        partial.append(np.sum(np.abs(batch) ** 2, axis=(0, 1)))
    # compensated per-site summation over chunks: the result is independent of chunk order
    stacked = np.array(partial)
    probs = np.array([math.fsum(col) for col in stacked.T])
    return Distribution(config.topology, probs)


def sample_monte_carlo(
    config: WalkConfig,
    samples: int,
    seed: int,
    batch: int = 10_000,
    backend=None,
) -> TrajectoryEstimate:
    """Average of ``samples`` stochastic pure-state trajectories (PCG64 stream from ``seed``)."""
    if samples < 1:
        raise ValueError(f"samples must be >= 1, got {samples}")
    k = get_kernels(backend)
    topo = config.topology
    kraus = _channel_ops(config)
    ops = [step_ops(config.step_pipeline(s)) for s in range(config.steps)]
    rng = np.random.default_rng(seed)
    psi0 = new_pure(config.initial, topo).amplitudes
    # running mean and sum of squared deviations, merged per batch (Chan et al.)
    mean = np.zeros(topo.site_count)
    m2 = np.zeros(topo.site_count)
    done = 0
    while done < samples:
        size = min(batch, samples - done)
        psi = np.broadcast_to(psi0, (size, 2, topo.site_count)).copy()
        for o in ops:
            psi = k.pure_step(psi, o.coin, o.gate, o.direction, topo.is_cycle)
            cand = np.einsum("jab,ibx->jiax", kraus, psi)
            weights = np.sum(np.abs(cand) ** 2, axis=(2, 3))  # (m, size)
            cdf = np.cumsum(weights, axis=0)
            u = rng.random(size) * cdf[-1]
            choice = np.minimum(np.sum(cdf < u[None, :], axis=0), len(kraus) - 1)
            chosen = cand[choice, np.arange(size)]
            psi = chosen / np.sqrt(weights[choice, np.arange(size)])[:, None, None]
        probs = np.sum(np.abs(psi) ** 2, axis=1)
        b_mean = probs.mean(axis=0)
        b_m2 = np.sum((probs - b_mean) ** 2, axis=0)
        delta = b_mean - mean
        total = done + size
        mean = mean + delta * (size / total)
        m2 = m2 + b_m2 + delta**2 * (done * size / total)
        done = total
    if samples > 1:
        std_error = np.sqrt(m2 / (samples - 1) / samples)
    else:
        std_error = np.zeros_like(mean)
    return TrajectoryEstimate(Distribution(topo, mean), samples, std_error, seed)


def verify_symmetry_trajectorywise(
    config: WalkConfig,
    symmetry: Symmetry | str,
    tol: float = 1e-10,
    cap: int = DEFAULT_BRANCH_CAP,
    backend=None,
) -> SymmetryReport:
    """Compare each unraveling with and without the per-step symmetry.

    Branches are paired by their Kraus index sequence. The aggregate
    discrepancy is the largest site difference of the summed
    distributions, which is what the density evolution sees.
    """
    sym_cfg = augment(config, symmetry)
    _check_cap([config, sym_cfg], cap)
    max_branch = 0.0
    count = 0
    plain_parts, sym_parts = [], []
    for _, (a, b) in _iter_leaves([config, sym_cfg], backend):
        pa = np.sum(np.abs(a) ** 2, axis=1)
        pb = np.sum(np.abs(b) ** 2, axis=1)
        max_branch = max(max_branch, float(np.max(np.abs(pa - pb))))
        plain_parts.append(pa.sum(axis=0))
        sym_parts.append(pb.sum(axis=0))
        count += a.shape[0]
    plain = np.array([math.fsum(c) for c in np.array(plain_parts).T])
    sym = np.array([math.fsum(c) for c in np.array(sym_parts).T])
    label = symmetry if isinstance(symmetry, str) else symmetry.label
    return SymmetryReport(label, count, max_branch, float(np.max(np.abs(plain - sym))), tol)


def within_std_error(
    estimate: TrajectoryEstimate, exact: Distribution, k: float = 4.0, atol: float = 1e-15
) -> np.ndarray:
    """Per-site ``|estimate - exact| <= k * std_error + atol``.

    ``atol`` only absorbs floating-point summation error at sites where every
    trajectory gives the same value (zero sample variance).
    """
    diff = np.abs(estimate.distribution.probs - exact.probs)
    return diff <= k * estimate.std_error + atol


def compare_with_density(config: WalkConfig, backend=None) -> float:
    """Max site difference between exact enumeration and density evolution."""
    exact = enumerate_exact(config, backend=backend)
    dens = position_distribution(evolve_density(config, backend))
    return float(np.max(np.abs(exact.probs - dens.probs)))
