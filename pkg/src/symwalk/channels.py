"""Coin-space Kraus channels: phase flip, bit flip, generalized amplitude damping.

Channels act on the coin only. When applied to a walker density matrix the
lift ``E_j (x) I_position`` is done blockwise through a 4x4 superoperator;
the full-dimension Kraus matrices are never formed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import InvariantError
from .lattice import DensityState

COMPLETENESS_TOL = 1e-12

_I = np.eye(2, dtype=complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Z = np.diag([1.0, -1.0]).astype(complex)


@dataclass(frozen=True, eq=False)
class KrausChannel:
    operators: tuple
    label: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        ops = tuple(np.asarray(e, dtype=complex) for e in self.operators)
        if not ops or any(e.shape != (2, 2) for e in ops):
            raise ValueError("a coin channel needs one or more 2x2 Kraus operators")
        object.__setattr__(self, "operators", ops)
        dev = completeness_error(ops)
        if dev >= COMPLETENESS_TOL:
            raise InvariantError(f"Kraus completeness violated by {dev:.3e} for {self.label}")

    def __len__(self) -> int:
        return len(self.operators)

    def superoperator(self, after: np.ndarray | None = None) -> np.ndarray:
        """4x4 matrix acting on coin-pair blocks, optionally with a unitary ``after`` folded in first.

        Row/column index ``2c + d`` addresses ``<c| . |d>``; the result is
        ``sum_j kron(F_j, conj(F_j))`` with ``F_j = E_j @ after``.
        """
        total = np.zeros((4, 4), dtype=complex)
        for e in self.operators:
            f = e if after is None else e @ after
            total += np.kron(f, f.conj())
        return total

    def apply_qubit(self, rho: np.ndarray) -> np.ndarray:
        """The channel on a single 2x2 coin density matrix."""
        return sum(e @ rho @ e.conj().T for e in self.operators)

    @property
    def is_identity(self) -> bool:
        return bool(np.allclose(self.superoperator(), np.eye(4), atol=1e-14, rtol=0))


def completeness_error(operators: Sequence[np.ndarray]) -> float:
    s = sum(e.conj().T @ e for e in operators)
    return float(np.max(np.abs(s - _I)))


def _check_probability(name: str, p: float) -> float:
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {p}")
    return p


def phase_flip(p: float) -> KrausChannel:
    """``rho -> (1-p) rho + p Z rho Z``."""
    p = _check_probability("p", p)
    return KrausChannel((math.sqrt(1 - p) * _I, math.sqrt(p) * _Z), f"PhaseFlip({p:g})", {"p": p})


def bit_flip(p: float) -> KrausChannel:
    """``rho -> (1-p) rho + p X rho X``."""
    p = _check_probability("p", p)
    return KrausChannel((math.sqrt(1 - p) * _I, math.sqrt(p) * _X), f"BitFlip({p:g})", {"p": p})


def gad_channel(p: float, chi: float) -> KrausChannel:
    """Generalized amplitude damping with damping strength ``p`` and thermal weight ``chi``.

    ``chi = 1`` is zero temperature (plain amplitude damping towards |0>),
    ``chi = 1/2`` the infinite-temperature limit.
    """
    p = _check_probability("p", p)
    chi = float(chi)
    if not 0.5 <= chi <= 1.0:
        raise ValueError(f"chi must lie in [1/2, 1], got {chi}")
    return _gad(math.sqrt(1 - p), math.sqrt(p), chi, p)


def _gad(keep: float, decay: float, chi: float, p: float) -> KrausChannel:
    a, b = math.sqrt(chi), math.sqrt(1 - chi)
    ops = (
        a * np.array([[1, 0], [0, keep]], dtype=complex),
        a * np.array([[0, decay], [0, 0]], dtype=complex),
        b * np.array([[keep, 0], [0, 1]], dtype=complex),
        b * np.array([[0, 0], [decay, 0]], dtype=complex),
    )
    return KrausChannel(ops, f"GAD(p={p:g}, chi={chi:g})", {"p": p, "chi": chi})


@dataclass(frozen=True)
class GadPhysicalParams:
    """Coupling ``gamma0``, mean thermal occupation ``n_th`` and interaction time ``t``."""

    gamma0: float
    n_th: float
    t: float

    def __post_init__(self):
        if self.gamma0 < 0 or self.n_th < 0 or self.t < 0:
            raise ValueError(f"gamma0, n_th and t must be non-negative, got {self}")

    @property
    def rate(self) -> float:
        return self.gamma0 * (2 * self.n_th + 1)

    @property
    def p(self) -> float:
        # -expm1 keeps p accurate for small rate * t
        return -math.expm1(-self.rate * self.t)

    @property
    def chi(self) -> float:
        return 0.5 * (1 + 1 / (2 * self.n_th + 1))


def gad_from_physical(params: GadPhysicalParams) -> KrausChannel:
    # survival amplitude straight from the exponent: sqrt(1 - p) loses digits as p -> 1
    rt = params.rate * params.t
    return _gad(math.exp(-0.5 * rt), math.sqrt(params.p), params.chi, params.p)


@dataclass(frozen=True)
class DephasingPhysicalParams:
    hbar_omega: float
    gamma_t: float

    def __post_init__(self):
        if self.gamma_t < 0:
            raise ValueError(f"gamma_t must be non-negative, got {self.gamma_t}")


def dephasing_p(params: DephasingPhysicalParams) -> float:
    """Phase-flip level ``(1 - exp[-(hbar w)^2 gamma(t)]) / 2``, in ``[0, 1/2)``."""
    return -0.5 * math.expm1(-(params.hbar_omega**2) * params.gamma_t)


def phase_flip_from_physical(params: DephasingPhysicalParams) -> KrausChannel:
    return phase_flip(dephasing_p(params))


@dataclass(frozen=True)
class QubitBloch:
    """Single-qubit state as ``(<sigma_3>, <sigma_->)``.

    These follow the dissipative-dynamics convention, where ``<sigma_3> = -1``
    is the ground state. The walk's coin basis labels the levels the other way
    round (amplitude damping sends |1> to |0>), so :meth:`to_coin_matrix` and
    :meth:`from_coin_matrix` swap |0> and |1>.
    """

    s3: float
    s_minus: complex

    def __post_init__(self):
        s3, sm = float(self.s3), complex(self.s_minus)
        object.__setattr__(self, "s3", s3)
        object.__setattr__(self, "s_minus", sm)
        if not -1.0 - 1e-12 <= s3 <= 1.0 + 1e-12:
            raise ValueError(f"<sigma_3> must lie in [-1, 1], got {s3}")
        if abs(sm) > math.sqrt(max(0.0, 1 - s3 * s3)) / 2 + 1e-12:
            raise ValueError(f"|<sigma_->| = {abs(sm)} too large for <sigma_3> = {s3}")

    def to_matrix(self) -> np.ndarray:
        """``[[(1 + s3)/2, s_-], [s_+, (1 - s3)/2]]`` in the dissipative convention."""
        return np.array(
            [[(1 + self.s3) / 2, self.s_minus], [self.s_minus.conjugate(), (1 - self.s3) / 2]],
            dtype=complex,
        )

    def to_coin_matrix(self) -> np.ndarray:
        return _X @ self.to_matrix() @ _X

    @classmethod
    def from_matrix(cls, rho: np.ndarray) -> "QubitBloch":
        return cls(float((rho[0, 0] - rho[1, 1]).real), complex(rho[0, 1]))

    @classmethod
    def from_coin_matrix(cls, rho: np.ndarray) -> "QubitBloch":
        return cls.from_matrix(_X @ rho @ _X)


def gad_closed_form(rho0: QubitBloch, params: GadPhysicalParams) -> QubitBloch:
    """Analytic state after generalized amplitude damping for time ``t``."""
    decay = math.exp(-params.rate * params.t)
    a1 = decay * rho0.s3 - (1 - decay) / (2 * params.n_th + 1)
    a2 = math.exp(-0.5 * params.rate * params.t) * rho0.s_minus
    return QubitBloch(min(1.0, max(-1.0, a1)), a2)


def apply_channel(rho: DensityState, ch: KrausChannel) -> DensityState:
    """``rho -> sum_j (E_j (x) I) rho (E_j (x) I)^dagger``."""
    dev = completeness_error(ch.operators)
    if dev >= COMPLETENESS_TOL:
        raise InvariantError(f"Kraus completeness violated by {dev:.3e}")
    blocks = rho.blocks()
    n = rho.topology.site_count
    out = (ch.superoperator() @ blocks.reshape(4, -1)).reshape(4, n, n)
    return DensityState.from_blocks(rho.topology, out)
