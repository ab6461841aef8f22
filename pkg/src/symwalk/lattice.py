"""Lattice topologies, walker states and positional distributions.

A state lives on ``coin (x) position``. Pure states are stored as a
``(2, site_count)`` complex table (row = coin basis index, column = site
index); density states as a square matrix of dimension ``2 * site_count``
with flat index ``coin * site_count + site``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

NORM_TOL = 1e-12
DENSITY_TOL = 1e-10


@dataclass(frozen=True)
class Topology:
    """Either a finite line ``-half_width..half_width`` or a cycle ``0..R-1``."""

    kind: str
    size: int

    def __post_init__(self):
        if self.kind == "line":
            if self.size < 1:
                raise ValueError(f"line half_width must be >= 1, got {self.size}")
        elif self.kind == "cycle":
            if self.size < 3:
                raise ValueError(f"cycle needs at least 3 sites, got {self.size}")
        else:
            raise ValueError(f"unknown topology kind {self.kind!r}")

    @classmethod
    def line(cls, half_width: int) -> "Topology":
        return cls("line", int(half_width))

    @classmethod
    def cycle(cls, sites: int) -> "Topology":
        return cls("cycle", int(sites))

    @classmethod
    def line_for(cls, steps: int, x0: int = 0) -> "Topology":
        """Smallest line on which an ``steps``-step walk from ``x0`` never reaches the boundary."""
        return cls.line(max(1, steps + abs(x0)))

    @property
    def is_cycle(self) -> bool:
        return self.kind == "cycle"

    @property
    def half_width(self) -> int:
        if self.is_cycle:
            raise AttributeError("a cycle has no half_width")
        return self.size

    @property
    def sites(self) -> int:
        if not self.is_cycle:
            raise AttributeError("a line has half_width, not a site count R")
        return self.size

    @property
    def site_count(self) -> int:
        return self.size if self.is_cycle else 2 * self.size + 1

    @property
    def labels(self) -> np.ndarray:
        """Site labels in storage order: signed positions on a line, 0..R-1 on a cycle."""
        if self.is_cycle:
            return np.arange(self.size)
        return np.arange(-self.size, self.size + 1)

    def index(self, x: int) -> int:
        """Storage column of site label ``x``; cycle labels are reduced mod R."""
        if self.is_cycle:
            return int(x) % self.size
        if not -self.size <= x <= self.size:
            raise ValueError(f"site {x} outside line [-{self.size}, {self.size}]")
        return int(x) + self.size


@dataclass(frozen=True)
class InitialState:
    """Product start state: coin amplitudes ``(a, b)`` at site ``x0``."""

    coin_amplitudes: tuple[complex, complex] = (1 / np.sqrt(2), 1j / np.sqrt(2))
    x0: int = 0

    def __post_init__(self):
        a, b = (complex(c) for c in self.coin_amplitudes)
        object.__setattr__(self, "coin_amplitudes", (a, b))
        norm = abs(a) ** 2 + abs(b) ** 2
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"coin amplitudes not normalized: |a|^2+|b|^2 = {norm!r}")

    @classmethod
    def symmetric(cls, x0: int = 0) -> "InitialState":
        """The left-right symmetric start (|0> + i|1>)/sqrt(2)."""
        return cls((1 / np.sqrt(2), 1j / np.sqrt(2)), x0)

    @classmethod
    def basis(cls, coin: int, x0: int = 0) -> "InitialState":
        if coin not in (0, 1):
            raise ValueError(f"coin basis index must be 0 or 1, got {coin}")
        return cls((1.0, 0.0) if coin == 0 else (0.0, 1.0), x0)


@dataclass(eq=False)
class PureState:
    topology: Topology
    amplitudes: np.ndarray

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex)
        if self.amplitudes.shape != (2, self.topology.site_count):
            raise ValueError(
                f"amplitudes shape {self.amplitudes.shape} does not match "
                f"(2, {self.topology.site_count})"
            )

    def norm(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def amplitude(self, coin: int, x: int) -> complex:
        return complex(self.amplitudes[coin, self.topology.index(x)])


@dataclass(eq=False)
class DensityState:
    topology: Topology
    matrix: np.ndarray

    def __post_init__(self):
        self.matrix = np.asarray(self.matrix, dtype=complex)
        dim = 2 * self.topology.site_count
        if self.matrix.shape != (dim, dim):
            raise ValueError(f"density matrix shape {self.matrix.shape} != ({dim}, {dim})")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def trace(self) -> complex:
        return complex(np.trace(self.matrix))

    def purity(self) -> float:
        # Tr(rho^2) = sum |rho_ij|^2 for Hermitian rho
        return float(np.sum(np.abs(self.matrix) ** 2))

    def check(self, tol: float = DENSITY_TOL) -> None:
        """Raise ``InvariantError`` unless Hermitian, unit trace and positive within ``tol``."""
        from .errors import InvariantError

        herm = np.max(np.abs(self.matrix - self.matrix.conj().T))
        if herm > tol:
            raise InvariantError(f"density matrix not Hermitian: max deviation {herm:.3e}")
        tr = self.trace()
        if abs(tr - 1.0) > tol:
            raise InvariantError(f"trace drifted to {tr!r}")
        lo = np.linalg.eigvalsh((self.matrix + self.matrix.conj().T) / 2).min()
        if lo < -tol:
            raise InvariantError(f"negative eigenvalue {lo:.3e}")

    def blocks(self) -> np.ndarray:
        """Coin-pair-major view ``(4, N, N)``: block ``2*c + d`` is ``<c, x| rho |d, y>``."""
        n = self.topology.site_count
        return self.matrix.reshape(2, n, 2, n).transpose(0, 2, 1, 3).reshape(4, n, n)

    @classmethod
    def from_blocks(cls, topology: Topology, blocks: np.ndarray) -> "DensityState":
        n = topology.site_count
        matrix = blocks.reshape(2, 2, n, n).transpose(0, 2, 1, 3).reshape(2 * n, 2 * n)
        return cls(topology, np.ascontiguousarray(matrix))


@dataclass(eq=False)
class Distribution:
    """Positional probabilities in storage order (see ``Topology.labels``)."""

    topology: Topology
    probs: np.ndarray

    def __post_init__(self):
        self.probs = np.asarray(self.probs, dtype=float)
        if self.probs.shape != (self.topology.site_count,):
            raise ValueError(
                f"probs shape {self.probs.shape} does not match ({self.topology.site_count},)"
            )

    @property
    def labels(self) -> np.ndarray:
        return self.topology.labels

    def total(self) -> float:
        return float(np.sum(self.probs))

    def __getitem__(self, x: int) -> float:
        return float(self.probs[self.topology.index(x)])

    def clamped(self) -> np.ndarray:
        """Probabilities with roundoff negatives set to zero, for reporting only."""
        return np.where(self.probs < 0.0, 0.0, self.probs)


State = Union[PureState, DensityState]


def new_pure(init: InitialState, topo: Topology) -> PureState:
    """Place the coin state of ``init`` at its start site."""
    col = topo.index(init.x0)
    amps = np.zeros((2, topo.site_count), dtype=complex)
    amps[:, col] = init.coin_amplitudes
    return PureState(topo, amps)


def to_density(psi: PureState) -> DensityState:
    vec = psi.amplitudes.reshape(-1)
    return DensityState(psi.topology, np.outer(vec, vec.conj()))


def position_distribution(state: State) -> Distribution:
    """Marginal over the coin: ``P(x) = sum_c <c, x| state |c, x>``."""
    if isinstance(state, PureState):
        probs = np.sum(np.abs(state.amplitudes) ** 2, axis=0)
    elif isinstance(state, DensityState):
        n = state.topology.site_count
        diag = np.real(np.diagonal(state.matrix))
        probs = diag[:n] + diag[n:]
    else:
        raise TypeError(f"expected PureState or DensityState, got {type(state).__name__}")
    return Distribution(state.topology, probs)
