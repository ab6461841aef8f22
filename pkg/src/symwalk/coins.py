"""SU(2) coins, their phase-decorated variants, and single-qubit symmetry gates."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

UNITARY_TOL = 1e-12

_TWO_PI = 2 * math.pi


def _wrap(angle: float) -> float:
    """Reduce an angle into (-pi, pi]."""
    a = math.remainder(angle, _TWO_PI)
    return math.pi if a == -math.pi else a


@dataclass(frozen=True)
class CoinParams:
    """Angles (radians) of ``B(xi, theta, zeta)``.

    On construction ``theta`` is folded into ``[0, pi/2]`` and ``xi``,
    ``zeta`` into ``(-pi, pi]``; the folding adjusts the phases so the coin
    matrix is unchanged.
    """

    xi: float = 0.0
    theta: float = math.pi / 4
    zeta: float = 0.0

    def __post_init__(self):
        xi, theta, zeta = float(self.xi), float(self.theta), float(self.zeta)
        if not all(math.isfinite(v) for v in (xi, theta, zeta)):
            raise ValueError(f"coin angles must be finite, got {(xi, theta, zeta)}")
        theta = math.fmod(theta, _TWO_PI)
        if theta < 0:
            theta += _TWO_PI
        if theta > math.pi:
            # B(theta) = B(theta - pi) with both phases advanced by pi
            theta -= math.pi
            xi += math.pi
            zeta += math.pi
        if theta > math.pi / 2:
            theta = math.pi - theta
            xi += math.pi
        object.__setattr__(self, "xi", _wrap(xi))
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "zeta", _wrap(zeta))

    @classmethod
    def degrees(cls, xi: float = 0.0, theta: float = 45.0, zeta: float = 0.0) -> "CoinParams":
        return cls(math.radians(xi), math.radians(theta), math.radians(zeta))


@dataclass(frozen=True, eq=False)
class CoinOp:
    matrix: np.ndarray
    params: CoinParams
    variant: Optional[tuple[int, float]] = None

    @property
    def label(self) -> str:
        p = self.params
        base = (
            f"B(xi={math.degrees(p.xi):g}, theta={math.degrees(p.theta):g}, "
            f"zeta={math.degrees(p.zeta):g})"
        )
        if self.variant is None:
            return base
        j, phi = self.variant
        return f"{base}^({j}) phi={math.degrees(phi):g}"


@dataclass(frozen=True, eq=False)
class GateOp:
    kind: str
    matrix: np.ndarray
    phi: Optional[float] = None


def expi(phi: float) -> complex:
    """``e^{i phi}``, exact at multiples of pi/2."""
    quarter = phi / (math.pi / 2)
    k = round(quarter)
    if abs(quarter - k) < 1e-15 * max(1.0, abs(quarter)):
        return (1, 1j, -1, -1j)[k % 4] + 0j
    return complex(math.cos(phi), math.sin(phi))


def coin_matrix(xi: float, theta: float, zeta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array(
        [
            [np.exp(1j * xi) * c, np.exp(1j * zeta) * s],
            [np.exp(-1j * zeta) * s, -np.exp(-1j * xi) * c],
        ],
        dtype=complex,
    )


def build_coin(params: CoinParams) -> CoinOp:
    """``[[e^{i xi} cos t, e^{i zeta} sin t], [e^{-i zeta} sin t, -e^{-i xi} cos t]]``."""
    return CoinOp(coin_matrix(params.xi, params.theta, params.zeta), params)


def hadamard() -> CoinOp:
    return build_coin(CoinParams(0.0, math.pi / 4, 0.0))


def variant_matrix(matrix: np.ndarray, j: int, phi: float) -> np.ndarray:
    """Entrywise phase decoration ``b_jk -> b_jk * e^{i m phi}``.

    ``m`` is the row index (j=1), the column index (j=2), the complemented
    row index (j=3) or the complemented column index (j=4).
    """
    idx = np.arange(2)
    if j == 1:
        exponent = idx[:, None] + 0 * idx[None, :]
    elif j == 2:
        exponent = 0 * idx[:, None] + idx[None, :]
    elif j == 3:
        exponent = (1 - idx)[:, None] + 0 * idx[None, :]
    elif j == 4:
        exponent = 0 * idx[:, None] + (1 - idx)[None, :]
    else:
        raise ValueError(f"variant index j must be 1..4, got {j}")
    phases = np.array([[expi(phi * e) for e in row] for row in exponent])
    return matrix * phases


def variant_coin(base: CoinOp, j: int, phi: float) -> CoinOp:
    """The symmetry-variant coin ``B^(j)`` at phase ``phi``.

    Decorating an existing variant is only allowed for the same ``j``; the
    phases then add. Mixing different ``j`` is rejected because it is not a
    known symmetry.
    """
    if j not in (1, 2, 3, 4):
        raise ValueError(f"variant index j must be 1..4, got {j}")
    total = float(phi)
    if base.variant is not None:
        j0, phi0 = base.variant
        if j0 != j:
            raise ValueError(f"coin is already a B^({j0}) variant; cannot apply B^({j})")
        total += phi0
    matrix = variant_matrix(build_coin(base.params).matrix, j, total)
    return CoinOp(matrix, base.params, (j, total))


def reflect_params(p: CoinParams) -> CoinParams:
    """Angular reflection: ``theta -> pi/2 - theta`` with ``xi -> -zeta`` and ``zeta -> -xi``."""
    return CoinParams(-p.zeta, math.pi / 2 - p.theta, -p.xi)


def reflect_coin(coin: CoinOp) -> CoinOp:
    if coin.variant is not None:
        raise ValueError("angular reflection is defined on undecorated coins only")
    return build_coin(reflect_params(coin.params))


_PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
_IDENTITY = np.eye(2, dtype=complex)


def gate(kind: str, phi: Optional[float] = None) -> GateOp:
    """Single-qubit gate by name: ``PhaseShift`` (needs ``phi``), ``PauliZ``, ``PauliX``, ``Identity``."""
    if kind == "PhaseShift":
        if phi is None:
            raise ValueError("PhaseShift needs an angle phi")
        return GateOp(kind, np.diag([1.0, expi(phi)]).astype(complex), float(phi))
    if kind == "PauliZ":
        return GateOp(kind, np.diag([1.0, -1.0]).astype(complex))
    if kind == "PauliX":
        return GateOp(kind, _PAULI_X.copy())
    if kind == "Identity":
        return GateOp(kind, _IDENTITY.copy())
    raise ValueError(f"unknown gate kind {kind!r}")


def is_unitary(m: np.ndarray, tol: float = UNITARY_TOL) -> bool:
    return bool(np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0]))) < tol)
