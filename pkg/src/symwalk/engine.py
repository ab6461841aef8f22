"""Step pipeline and n-step evolution of pure and density states.

Every step applies, in this fixed order: the coin, the conditional shift,
the symmetry gates, and finally the noise channel. The shift moves coin
component |0> one site left and |1> one site right (``FORWARD``); ``REVERSE``
is its inverse and ``FLIP`` is ``X`` applied right after ``FORWARD``.
"""

from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from ._backend import get_kernels
from .channels import KrausChannel
from .coins import CoinOp, CoinParams, GateOp, build_coin, gate, reflect_coin, variant_coin
from .errors import InvariantError
from .lattice import (
    DENSITY_TOL,
    DensityState,
    Distribution,
    InitialState,
    PureState,
    Topology,
    new_pure,
    position_distribution,
    to_density,
)

_X = np.array([[0, 1], [1, 0]], dtype=complex)


class ShiftKind(enum.Enum):
    FORWARD = "forward"
    REVERSE = "reverse"
    FLIP = "flip"


@dataclass(frozen=True)
class StepPipeline:
    coin: CoinOp
    shift: ShiftKind = ShiftKind.FORWARD
    symmetry_gates: tuple[GateOp, ...] = ()
    parity_each_step: bool = False
    channel: Optional[KrausChannel] = None

    def without_channel(self) -> "StepPipeline":
        return replace(self, channel=None)


@dataclass(frozen=True)
class StepOverride:
    """Per-step replacement of the coin and/or shift (inhomogeneous walks)."""

    coin: Optional[CoinOp] = None
    shift: Optional[ShiftKind] = None


@dataclass(frozen=True)
class WalkConfig:
    topology: Topology
    initial: InitialState
    pipeline: StepPipeline
    steps: int
    per_step_overrides: Optional[tuple[Optional[StepOverride], ...]] = None
    seed: Optional[int] = None

    def __post_init__(self):
        if self.steps < 0:
            raise ValueError(f"steps must be >= 0, got {self.steps}")
        if not self.topology.is_cycle and self.topology.half_width < self.steps + abs(self.initial.x0):
            raise ValueError(
                f"line half_width {self.topology.half_width} cannot hold a {self.steps}-step "
                f"walk from x0={self.initial.x0}; use Topology.line_for"
            )
        if self.per_step_overrides is not None and len(self.per_step_overrides) != self.steps:
            raise ValueError("per_step_overrides must have one entry per step")

    def step_pipeline(self, k: int) -> StepPipeline:
        """Pipeline for step ``k`` (0-based) after applying any override."""
        if self.per_step_overrides is None or self.per_step_overrides[k] is None:
            return self.pipeline
        ov = self.per_step_overrides[k]
        return replace(
            self.pipeline,
            coin=ov.coin if ov.coin is not None else self.pipeline.coin,
            shift=ov.shift if ov.shift is not None else self.pipeline.shift,
        )


@dataclass(frozen=True)
class StepOps:
    """A step reduced to kernel inputs: ``gate . S(direction) . coin``."""

    coin: np.ndarray
    gate: Optional[np.ndarray]
    direction: int


def step_ops(pipeline: StepPipeline) -> StepOps:
    direction = -1 if pipeline.shift is ShiftKind.REVERSE else 1
    if pipeline.parity_each_step:
        direction = -direction
    after = None
    if pipeline.shift is ShiftKind.FLIP:
        after = _X.copy()
    for g in pipeline.symmetry_gates:
        after = g.matrix if after is None else g.matrix @ after
    return StepOps(pipeline.coin.matrix, after, direction)


def apply_shift(state, kind: ShiftKind, topo: Optional[Topology] = None, backend=None):
    """Apply one conditional shift to a pure or density state."""
    topo = topo or state.topology
    if topo != state.topology:
        raise ValueError("state does not live on the given topology")
    ops = step_ops(StepPipeline(coin=_identity_coin(), shift=kind))
    k = get_kernels(backend)
    eye = np.eye(2, dtype=complex)
    if isinstance(state, PureState):
        out = k.pure_step(state.amplitudes[None], eye, ops.gate, ops.direction, topo.is_cycle)
        return PureState(topo, out[0])
    chan = None if ops.gate is None else np.kron(ops.gate, ops.gate.conj())
    out = k.density_step(state.blocks(), np.eye(4, dtype=complex), chan, ops.direction, topo.is_cycle)
    return DensityState.from_blocks(topo, out)


def _identity_coin() -> CoinOp:
    return CoinOp(np.eye(2, dtype=complex), CoinParams())


def step_pure(psi: PureState, pipeline: StepPipeline, backend=None) -> PureState:
    if pipeline.channel is not None:
        raise ValueError("step_pure needs a pipeline without a channel; use evolve_density")
    ops = step_ops(pipeline)
    out = get_kernels(backend).pure_step(
        psi.amplitudes[None], ops.coin, ops.gate, ops.direction, psi.topology.is_cycle
    )
    return PureState(psi.topology, out[0])


def iter_pure(config: WalkConfig, backend=None):
    """Yield the pure state after steps 0, 1, ..., n."""
    if config.pipeline.channel is not None:
        raise ValueError("pure evolution needs a pipeline without a channel")
    k = get_kernels(backend)
    topo = config.topology
    psi = new_pure(config.initial, topo).amplitudes[None]
    yield PureState(topo, psi[0])
    homogeneous = step_ops(config.pipeline)
    for step in range(config.steps):
        pipe = config.step_pipeline(step)
        ops = homogeneous if pipe is config.pipeline else step_ops(pipe)
        psi = k.pure_step(psi, ops.coin, ops.gate, ops.direction, topo.is_cycle)
        yield PureState(topo, psi[0])


def evolve_pure(config: WalkConfig, backend=None) -> PureState:
    for psi in iter_pure(config, backend):
        pass
    norm = psi.norm()
    if abs(norm - 1.0) > 1e-12:
        raise InvariantError(f"norm drifted to {norm!r}")
    return psi


def _density_superops(pipe: StepPipeline):
    ops = step_ops(pipe)
    coin_super = np.kron(ops.coin, ops.coin.conj())
    if pipe.channel is not None:
        chan_super = pipe.channel.superoperator(after=ops.gate)
    elif ops.gate is not None:
        chan_super = np.kron(ops.gate, ops.gate.conj())
    else:
        chan_super = None
    return coin_super, chan_super, ops.direction


def iter_density_blocks(config: WalkConfig, backend=None):
    """Yield the coin-pair blocks ``(4, N, N)`` after steps 0, 1, ..., n."""
    k = get_kernels(backend)
    topo = config.topology
    blocks = to_density(new_pure(config.initial, topo)).blocks().copy()
    yield blocks
    homogeneous = _density_superops(config.pipeline)
    for step in range(config.steps):
        pipe = config.step_pipeline(step)
        coin_super, chan_super, direction = (
            homogeneous if pipe is config.pipeline else _density_superops(pipe)
        )
        blocks = k.density_step(blocks, coin_super, chan_super, direction, topo.is_cycle)
        yield blocks


def blocks_distribution(topo: Topology, blocks: np.ndarray) -> Distribution:
    return Distribution(topo, np.real(np.diagonal(blocks[0]) + np.diagonal(blocks[3])))


def evolve_density(config: WalkConfig, backend=None, check: bool = True) -> DensityState:
    """Kraus evolution ``rho -> sum_j (E_j K) rho (E_j K)^dagger`` per step."""
    for blocks in iter_density_blocks(config, backend):
        pass
    rho = DensityState.from_blocks(config.topology, blocks)
    if check:
        tr = rho.trace()
        if abs(tr - 1.0) > DENSITY_TOL:
            raise InvariantError(f"trace drifted to {tr!r} after {config.steps} steps")
    return rho


def distribution(config: WalkConfig, backend=None) -> Distribution:
    """Final positional distribution, by pure evolution when there is no channel."""
    if config.pipeline.channel is None:
        return position_distribution(evolve_pure(config, backend))
    return position_distribution(evolve_density(config, backend))


def distributions_over_time(config: WalkConfig, every: int = 1, start: int = 0, backend=None):
    """Distributions at steps ``start, start + every, ...`` up to n."""
    out = []
    if config.pipeline.channel is None:
        for k, psi in enumerate(iter_pure(config, backend)):
            if k >= start and (k - start) % every == 0:
                out.append(position_distribution(psi))
    else:
        for k, blocks in enumerate(iter_density_blocks(config, backend)):
            if k >= start and (k - start) % every == 0:
                out.append(blocks_distribution(config.topology, blocks))
    return out


def spatial_inversion(d: Distribution, about: int = 0) -> Distribution:
    """Mirror a distribution: ``x -> -x`` on a line, ``x -> (R - x) mod R`` on a cycle.

    On a line only inversion about the origin is supported, so the walk
    must have started at ``x0 = 0``.
    """
    if d.topology.is_cycle:
        r = d.topology.sites
        idx = (2 * about - np.arange(r)) % r
        return Distribution(d.topology, d.probs[idx])
    if about != 0:
        raise ValueError("spatial inversion on a line needs the walk to start at x0 = 0")
    return Distribution(d.topology, d.probs[::-1].copy())


# --- symmetry operations -----------------------------------------------------------


@dataclass(frozen=True)
class Symmetry:
    """A per-step augmentation applied uniformly to a walk.

    ``name`` is one of ``Z``, ``Phi``, ``X``, ``XZ``, ``ZX``, ``PRX``, ``PR``,
    ``RX``, ``R``, ``P``, ``B1``..``B4``. ``phi`` (radians) is used by
    ``Phi`` and ``Bj``. Operator strings read right to left, so ``XZ``
    applies ``Z`` first.
    """

    name: str
    phi: float = 0.0

    def __post_init__(self):
        if self.name not in _SYMMETRY_NAMES:
            raise ValueError(f"unknown symmetry {self.name!r}; expected one of {sorted(_SYMMETRY_NAMES)}")

    @property
    def label(self) -> str:
        if self.name in ("Phi", "B1", "B2", "B3", "B4"):
            return f"{self.name}({math.degrees(self.phi):g})"
        return self.name


_SYMMETRY_NAMES = {"Z", "Phi", "X", "XZ", "ZX", "PRX", "PR", "RX", "R", "P", "B1", "B2", "B3", "B4"}
_SYMMETRY_RE = re.compile(r"^\s*([A-Za-z]+\d?)\s*(?:\(\s*([-+0-9.eE]+)\s*\))?\s*$")


def parse_symmetry(text: str) -> Symmetry:
    """Parse ``"Z"``, ``"PRX"``, ``"Phi(90)"``, ``"B2(180)"``; angles in degrees."""
    m = _SYMMETRY_RE.match(text)
    if not m:
        raise ValueError(f"cannot parse symmetry {text!r}")
    name, deg = m.group(1), m.group(2)
    if name in ("Phi", "B1", "B2", "B3", "B4"):
        if deg is None:
            raise ValueError(f"symmetry {name} needs an angle, e.g. {name}(180)")
        return Symmetry(name, math.radians(float(deg)))
    if deg is not None:
        raise ValueError(f"symmetry {name} takes no angle")
    return Symmetry(name)


def _augment_pipeline(pipe: StepPipeline, sym: Symmetry) -> StepPipeline:
    name = sym.name
    if name.startswith("B"):
        return replace(pipe, coin=variant_coin(pipe.coin, int(name[1]), sym.phi))
    gates = list(pipe.symmetry_gates)
    coin = pipe.coin
    parity = pipe.parity_each_step
    for letter in reversed(name) if name != "Phi" else ["Phi"]:
        if letter == "Phi":
            gates.append(gate("PhaseShift", sym.phi))
        elif letter == "Z":
            gates.append(gate("PauliZ"))
        elif letter == "X":
            gates.append(gate("PauliX"))
        elif letter == "R":
            coin = reflect_coin(coin)
        elif letter == "P":
            parity = not parity
    return replace(pipe, coin=coin, symmetry_gates=tuple(gates), parity_each_step=parity)


def _augment_override(ov: Optional[StepOverride], sym: Symmetry) -> Optional[StepOverride]:
    if ov is None or ov.coin is None:
        return ov
    if sym.name.startswith("B"):
        return replace(ov, coin=variant_coin(ov.coin, int(sym.name[1]), sym.phi))
    if "R" in sym.name:
        return replace(ov, coin=reflect_coin(ov.coin))
    return ov


def augment(config: WalkConfig, sym: Symmetry | str) -> WalkConfig:
    """The same walk with ``sym`` applied at every step (overrides included)."""
    if isinstance(sym, str):
        sym = parse_symmetry(sym)
    overrides = config.per_step_overrides
    if overrides is not None:
        overrides = tuple(_augment_override(ov, sym) for ov in overrides)
    return replace(config, pipeline=_augment_pipeline(config.pipeline, sym), per_step_overrides=overrides)


def random_overrides(
    steps: int,
    seed: int,
    reverse_fraction: float = 0.0,
) -> tuple[StepOverride, ...]:
    """Random per-step SU(2) coins (and optionally reversed shifts) from a seeded PCG64 stream."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(steps):
        xi, zeta = rng.uniform(-math.pi, math.pi, size=2)
        theta = rng.uniform(0, math.pi / 2)
        shift = ShiftKind.REVERSE if rng.random() < reverse_fraction else ShiftKind.FORWARD
        out.append(StepOverride(build_coin(CoinParams(xi, theta, zeta)), shift))
    return tuple(out)


def make_config(
    steps: int,
    coin: CoinOp,
    *,
    topology: Optional[Topology] = None,
    initial: Optional[InitialState] = None,
    shift: ShiftKind = ShiftKind.FORWARD,
    channel: Optional[KrausChannel] = None,
    symmetries: Sequence[Symmetry | str] = (),
    overrides: Optional[Sequence[Optional[StepOverride]]] = None,
) -> WalkConfig:
    """Convenience constructor: symmetric start at 0 on a line just big enough."""
    initial = initial or InitialState.symmetric()
    topology = topology or Topology.line_for(steps, initial.x0)
    cfg = WalkConfig(
        topology,
        initial,
        StepPipeline(coin=coin, shift=shift, channel=channel),
        steps,
        tuple(overrides) if overrides is not None else None,
    )
    for sym in symmetries:
        cfg = augment(cfg, sym)
    return cfg
