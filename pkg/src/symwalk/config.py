"""JSON experiment configuration.

Angles are in degrees in the file and converted to radians here. Example::

    {
      "topology": {"kind": "line"},
      "initial": {"coin": [[0.7071067811865476, 0.0], [0.0, 0.7071067811865476]], "x0": 0},
      "coin": {"xi": 0, "theta": 60, "zeta": 0},
      "steps": 100,
      "shift": "forward",
      "symmetry": ["Z"],
      "channel": {"name": "phase_flip", "p": 0.1},
      "trajectories": {"mode": "exact", "samples": 1000, "seed": 0},
      "time_average": 0,
      "output": "walk.csv"
    }
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Any, Optional

from .channels import (
    DephasingPhysicalParams,
    GadPhysicalParams,
    KrausChannel,
    bit_flip,
    gad_channel,
    gad_from_physical,
    phase_flip,
    phase_flip_from_physical,
)
from .coins import CoinParams, build_coin
from .engine import ShiftKind, WalkConfig, make_config, parse_symmetry
from .lattice import InitialState, Topology

_SQRT_HALF = 1 / math.sqrt(2)


class ConfigError(ValueError):
    def __init__(self, field_name: str, message: str):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


def _number(value: Any, name: str, *, minimum: Optional[float] = None) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(name, f"expected a number, got {value!r}")
    v = float(value)
    if not math.isfinite(v):
        raise ConfigError(name, f"expected a finite number, got {value!r}")
    if minimum is not None and v < minimum:
        raise ConfigError(name, f"must be >= {minimum}, got {value!r}")
    return v


def _integer(value: Any, name: str, *, minimum: Optional[int] = None) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(name, f"expected an integer, got {value!r}")
    if minimum is not None and value < minimum:
        raise ConfigError(name, f"must be >= {minimum}, got {value!r}")
    return value


def _complex(value: Any, name: str) -> complex:
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return complex(_number(value[0], name + "[0]"), _number(value[1], name + "[1]"))
    if isinstance(value, str):
        try:
            return complex(value.replace(" ", ""))
        except ValueError:
            raise ConfigError(name, f"cannot parse complex number {value!r}") from None
    return complex(_number(value, name), 0.0)


def _mapping(value: Any, name: str) -> dict:
    if not isinstance(value, dict):
        raise ConfigError(name, f"expected an object, got {value!r}")
    return value


def _reject_unknown(obj: dict, allowed: set, name: str) -> None:
    extra = sorted(set(obj) - allowed)
    if extra:
        raise ConfigError(f"{name}.{extra[0]}" if name else extra[0], "unknown field")


@dataclass
class ExperimentConfig:
    topology: dict = field(default_factory=lambda: {"kind": "line"})
    coin_amplitudes: tuple = ((_SQRT_HALF, 0.0), (0.0, _SQRT_HALF))
    x0: int = 0
    coin: dict = field(default_factory=lambda: {"xi": 0.0, "theta": 45.0, "zeta": 0.0})
    steps: int = 100
    shift: str = "forward"
    symmetry: tuple = ()
    channel: Optional[dict] = None
    trajectories: dict = field(default_factory=lambda: {"mode": "exact", "samples": 1000, "seed": 0})
    time_average: int = 0
    output: Optional[str] = None
    golden: Optional[str] = None
    base_dir: Optional[Path] = field(default=None, compare=False, repr=False)

    # --- parsing ---------------------------------------------------------------------

    @classmethod
    def from_dict(cls, data: Any, base_dir: Optional[Path] = None) -> "ExperimentConfig":
        data = _mapping(data, "config")
        _reject_unknown(
            data,
            {"topology", "initial", "coin", "steps", "shift", "symmetry", "channel",
             "trajectories", "time_average", "output", "golden"},
            "",
        )
        cfg = cls(base_dir=base_dir)
        cfg.steps = _integer(data.get("steps", cfg.steps), "steps", minimum=0)

        topo = dict(_mapping(data.get("topology", cfg.topology), "topology"))
        _reject_unknown(topo, {"kind", "half_width", "sites"}, "topology")
        kind = topo.get("kind", "line")
        if kind == "line":
            if "half_width" in topo:
                topo["half_width"] = _integer(topo["half_width"], "topology.half_width", minimum=1)
        elif kind == "cycle":
            topo["sites"] = _integer(topo.get("sites", 101), "topology.sites", minimum=3)
        else:
            raise ConfigError("topology.kind", f"expected 'line' or 'cycle', got {kind!r}")
        topo["kind"] = kind
        cfg.topology = topo

        init = _mapping(data.get("initial", {}), "initial")
        _reject_unknown(init, {"coin", "x0"}, "initial")
        if "coin" in init:
            amps = init["coin"]
            if not isinstance(amps, (list, tuple)) or len(amps) != 2:
                raise ConfigError("initial.coin", "expected two complex amplitudes")
            pair = tuple(_complex(a, f"initial.coin[{i}]") for i, a in enumerate(amps))
            norm = sum(abs(a) ** 2 for a in pair)
            if abs(norm - 1.0) > 1e-12:
                raise ConfigError("initial.coin", f"amplitudes not normalized (|a|^2+|b|^2 = {norm!r})")
            cfg.coin_amplitudes = tuple((a.real, a.imag) for a in pair)
        cfg.x0 = _integer(init.get("x0", 0), "initial.x0")
        if kind == "line":
            hw = topo.get("half_width")
            if hw is not None and hw < cfg.steps + abs(cfg.x0):
                raise ConfigError(
                    "topology.half_width",
                    f"{hw} cannot hold {cfg.steps} steps from x0={cfg.x0} (need >= {cfg.steps + abs(cfg.x0)})",
                )

        coin = _mapping(data.get("coin", cfg.coin), "coin")
        _reject_unknown(coin, {"xi", "theta", "zeta"}, "coin")
        cfg.coin = {k: _number(coin.get(k, d), f"coin.{k}") for k, d in (("xi", 0.0), ("theta", 45.0), ("zeta", 0.0))}

        shift = data.get("shift", "forward")
        if shift not in {s.value for s in ShiftKind}:
            raise ConfigError("shift", f"expected forward, reverse or flip, got {shift!r}")
        cfg.shift = shift

        sym = data.get("symmetry", [])
        if isinstance(sym, str):
            sym = [sym]
        if not isinstance(sym, list):
            raise ConfigError("symmetry", "expected a list of symmetry names")
        for i, s in enumerate(sym):
            try:
                parse_symmetry(str(s))
            except ValueError as exc:
                raise ConfigError(f"symmetry[{i}]", str(exc)) from None
        cfg.symmetry = tuple(str(s) for s in sym)

        ch = data.get("channel")
        if ch is not None:
            ch = dict(_mapping(ch, "channel"))
            _build_channel(ch)  # validate
        cfg.channel = ch

        traj = dict(cfg.trajectories)
        traj.update(_mapping(data.get("trajectories", {}), "trajectories"))
        _reject_unknown(traj, {"mode", "samples", "seed"}, "trajectories")
        if traj["mode"] not in ("exact", "monte_carlo"):
            raise ConfigError("trajectories.mode", f"expected exact or monte_carlo, got {traj['mode']!r}")
        traj["samples"] = _integer(traj["samples"], "trajectories.samples", minimum=1)
        traj["seed"] = _integer(traj["seed"], "trajectories.seed", minimum=0)
        cfg.trajectories = traj

        cfg.time_average = _integer(data.get("time_average", 0), "time_average", minimum=0)
        if cfg.time_average > cfg.steps + 1:
            raise ConfigError("time_average", f"window {cfg.time_average} longer than the walk")
        for key in ("output", "golden"):
            v = data.get(key)
            if v is not None and not isinstance(v, str):
                raise ConfigError(key, f"expected a path string, got {v!r}")
            setattr(cfg, key, v)
        return cfg

    @classmethod
    def load(cls, path: str | Path) -> "ExperimentConfig":
        path = Path(path)
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ConfigError("config", f"invalid JSON at line {exc.lineno}: {exc.msg}") from None
        except OSError as exc:
            raise ConfigError("config", f"cannot read {path}: {exc.strerror}") from None
        return cls.from_dict(data, base_dir=path.parent)

    def to_dict(self) -> dict:
        d = {
            "topology": dict(self.topology),
            "initial": {"coin": [list(a) for a in self.coin_amplitudes], "x0": self.x0},
            "coin": dict(self.coin),
            "steps": self.steps,
            "shift": self.shift,
            "symmetry": list(self.symmetry),
            "channel": None if self.channel is None else dict(self.channel),
            "trajectories": dict(self.trajectories),
            "time_average": self.time_average,
            "output": self.output,
            "golden": self.golden,
        }
        return d

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def resolve(self, path: Optional[str]) -> Optional[Path]:
        if path is None:
            return None
        p = Path(path)
        if not p.is_absolute() and self.base_dir is not None:
            p = self.base_dir / p
        return p

    # --- building ---------------------------------------------------------------------

    def build_topology(self) -> Topology:
        if self.topology["kind"] == "cycle":
            return Topology.cycle(self.topology["sites"])
        hw = self.topology.get("half_width") or max(1, self.steps + abs(self.x0))
        return Topology.line(hw)

    def walk(self, with_symmetry: bool = True) -> WalkConfig:
        initial = InitialState(tuple(complex(*a) for a in self.coin_amplitudes), self.x0)
        params = CoinParams.degrees(self.coin["xi"], self.coin["theta"], self.coin["zeta"])
        channel = None if self.channel is None else _build_channel(self.channel)
        return make_config(
            self.steps,
            build_coin(params),
            topology=self.build_topology(),
            initial=initial,
            shift=ShiftKind(self.shift),
            channel=channel,
            symmetries=[parse_symmetry(s) for s in self.symmetry] if with_symmetry else (),
        )

    def with_updates(self, **changes) -> "ExperimentConfig":
        return replace(self, **changes)


def _build_channel(entry: dict) -> KrausChannel:
    name = entry.get("name")

    def num(key, minimum=None):
        if key not in entry:
            raise ConfigError(f"channel.{key}", f"required for channel {name!r}")
        return _number(entry[key], f"channel.{key}", minimum=minimum)

    def prob(key):
        v = num(key)
        if not 0.0 <= v <= 1.0:
            raise ConfigError(f"channel.{key}", f"must lie in [0, 1], got {v}")
        return v

    if name in ("phase_flip", "bit_flip"):
        _reject_unknown(entry, {"name", "p"}, "channel")
        return (phase_flip if name == "phase_flip" else bit_flip)(prob("p"))
    if name == "gad":
        if "p" in entry or "chi" in entry:
            _reject_unknown(entry, {"name", "p", "chi"}, "channel")
            chi = num("chi")
            if not 0.5 <= chi <= 1.0:
                raise ConfigError("channel.chi", f"must lie in [0.5, 1], got {chi}")
            return gad_channel(prob("p"), chi)
        _reject_unknown(entry, {"name", "gamma0", "n_th", "t"}, "channel")
        return gad_from_physical(GadPhysicalParams(num("gamma0", 0), num("n_th", 0), num("t", 0)))
    if name == "dephasing":
        _reject_unknown(entry, {"name", "hbar_omega", "gamma_t"}, "channel")
        return phase_flip_from_physical(DephasingPhysicalParams(num("hbar_omega"), num("gamma_t", 0)))
    raise ConfigError("channel.name", f"expected phase_flip, bit_flip, gad or dephasing, got {name!r}")
