"""Command-line experiment runner.

    symwalk run --config walk.json --out walk.csv
    symwalk symmetry-check --config walk.json --symmetry PRX --out check.csv
    symwalk sweep --config walk.json --param p --values 0.005,0.05,0.1,0.5
    symwalk trajectories --config walk.json --seed 7 --out mc.csv
    symwalk cycle --out cycle.csv

Exit codes: 0 success, 1 invalid configuration, 2 numerical invariant
violated, 3 a check failed (symmetry verdict false or golden mismatch).
"""

from __future__ import annotations

import argparse
import io
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import analysis
from ._backend import BACKEND
from .config import ConfigError, ExperimentConfig
from .engine import distribution, distributions_over_time
from .errors import BranchCapError, InvariantError, LatticeOverflowError
from .lattice import Distribution
from .trajectories import branch_count, enumerate_exact, sample_monte_carlo

EXIT_OK, EXIT_CONFIG, EXIT_INVARIANT, EXIT_CHECK = 0, 1, 2, 3
GOLDEN_RTOL = 1e-9

CYCLE_DEFAULTS = {"topology": {"kind": "cycle", "sites": 101}, "coin": {"theta": 30.0}, "steps": 5000}


# --- output helpers -------------------------------------------------------------------


def format_csv(d: Distribution, extra: Optional[tuple[str, np.ndarray]] = None) -> str:
    first = "site" if d.topology.is_cycle else "position"
    header = [first, "probability"] + ([extra[0]] if extra else [])
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    probs = d.clamped()
    for i, x in enumerate(d.labels):
        row = f"{int(x)},{probs[i]:.17g}"
        if extra:
            row += f",{extra[1][i]:.17g}"
        buf.write(row + "\n")
    return buf.getvalue()


def _write_text(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _suffixed(path: Path, suffix: str) -> Path:
    return path.with_name(f"{path.stem}_{suffix}{path.suffix or '.csv'}")


class _Report:
    """Metadata lines go to stdout, or to stderr when the CSV itself goes to stdout."""

    def __init__(self, csv_to_stdout: bool):
        self.stream = sys.stderr if csv_to_stdout else sys.stdout

    def __call__(self, key: str, value) -> None:
        if isinstance(value, float):
            value = f"{value:.17g}"
        print(f"{key}={value}", file=self.stream)


def _spread_metrics(d: Distribution) -> dict:
    if d.topology.is_cycle:
        return {"uniformity_deviation": analysis.uniformity_deviation(d)}
    return {"sigma": analysis.std_dev(d)}


def _final_and_average(cfg: ExperimentConfig, with_symmetry: bool = True):
    walk = cfg.walk(with_symmetry)
    if cfg.time_average <= 1:
        d = distribution(walk)
        return d, None
    ds = distributions_over_time(walk, start=cfg.steps - cfg.time_average + 1)
    return ds[-1], analysis.time_average(ds)


def _golden(cfg: ExperimentConfig, metrics: dict, regen: bool, report: _Report) -> int:
    path = cfg.resolve(cfg.golden)
    if regen:
        if path is None:
            raise ConfigError("golden", "--regen-golden needs a golden path in the config")
        _write_text(path, json.dumps(metrics, indent=2, sort_keys=True) + "\n")
        report("golden_written", str(path))
        return EXIT_OK
    if path is None or not path.exists():
        return EXIT_OK
    stored = json.loads(path.read_text(encoding="utf-8"))
    ok = True
    for key, want in stored.items():
        got = metrics.get(key)
        if isinstance(want, float) and isinstance(got, float):
            match = math.isclose(got, want, rel_tol=GOLDEN_RTOL, abs_tol=1e-15)
        else:
            match = got == want
        if not match:
            report(f"golden_mismatch.{key}", f"{got!r} (stored {want!r})")
            ok = False
    report("golden_match", str(ok).lower())
    return EXIT_OK if ok else EXIT_CHECK


# --- subcommands ----------------------------------------------------------------------


def _load(args) -> ExperimentConfig:
    if args.config is None:
        raise ConfigError("--config", "a config file is required for this command")
    return ExperimentConfig.load(args.config)


def _out_path(args, cfg: ExperimentConfig) -> Optional[Path]:
    if args.out is not None:
        return Path(args.out)
    return cfg.resolve(cfg.output)


def _common_metadata(report: _Report, cfg: ExperimentConfig, args) -> None:
    report("backend", BACKEND)
    report("topology", cfg.build_topology().kind)
    report("sites", cfg.build_topology().site_count)
    report("channel", "none" if cfg.channel is None else cfg.walk().pipeline.channel.label)


def cmd_run(args, cfg: Optional[ExperimentConfig] = None) -> int:
    cfg = cfg or _load(args)
    out = _out_path(args, cfg)
    report = _Report(out is None)
    final, avg = _final_and_average(cfg)
    d = avg if avg is not None else final
    text = format_csv(d)
    if out is None:
        sys.stdout.write(text)
    else:
        _write_text(out, text)
    _common_metadata(report, cfg, args)
    metrics = {"steps": cfg.steps, "probability_sum": d.total(), **_spread_metrics(d)}
    if avg is not None:
        metrics["time_average"] = cfg.time_average
    for k, v in metrics.items():
        report(k, v)
    return _golden(cfg, metrics, args.regen_golden, report)


def cmd_cycle(args) -> int:
    data: dict = {}
    base = None
    if args.config is not None:
        path = Path(args.config)
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError("config", str(exc)) from None
        base = path.parent
    if not isinstance(data, dict):
        raise ConfigError("config", "expected a JSON object")
    for key, value in CYCLE_DEFAULTS.items():
        data.setdefault(key, value)
    return cmd_run(args, ExperimentConfig.from_dict(data, base_dir=base))


def cmd_symmetry_check(args) -> int:
    cfg = _load(args)
    names = args.symmetry or list(cfg.symmetry)
    if not names:
        raise ConfigError("symmetry", "no symmetry given (use --symmetry or the config's symmetry list)")
    sym_cfg = ExperimentConfig.from_dict({**cfg.to_dict(), "symmetry": names}, cfg.base_dir)
    plain_final, plain_avg = _final_and_average(cfg, with_symmetry=False)
    sym_final, sym_avg = _final_and_average(sym_cfg)
    tol = args.tol
    if tol is None:
        tol = analysis.UNITARY_TOL if cfg.channel is None else analysis.DENSITY_TOL
    verdict = analysis.symmetry_verdict(plain_final, sym_final, tol)
    out = _out_path(args, cfg)
    report = _Report(False)
    if out is not None:
        _write_text(_suffixed(out, "plain"), format_csv(plain_final))
        _write_text(_suffixed(out, "sym"), format_csv(sym_final))
    _common_metadata(report, cfg, args)
    report("symmetry", "+".join(names))
    metrics = {
        "steps": cfg.steps,
        "max_abs_diff": verdict.max_abs_diff,
        "total_variation": verdict.total_variation,
        "holds": verdict.holds,
        **{f"plain_{k}": v for k, v in _spread_metrics(plain_final).items()},
        **{f"sym_{k}": v for k, v in _spread_metrics(sym_final).items()},
    }
    if plain_avg is not None:
        avg = analysis.symmetry_verdict(plain_avg, sym_avg, tol)
        metrics.update({
            "time_average": cfg.time_average,
            "avg_max_abs_diff": avg.max_abs_diff,
            "avg_total_variation": avg.total_variation,
            **{f"avg_plain_{k}": v for k, v in _spread_metrics(plain_avg).items()},
        })
    for k, v in metrics.items():
        if k != "holds":
            report(k, v)
    print(verdict.line())
    golden_rc = _golden(cfg, metrics, args.regen_golden, report)
    if not verdict.holds:
        return EXIT_CHECK
    return golden_rc


_SWEEP_PARAMS = {"p": "p", "theta": "theta", "θ": "theta", "n": "n"}


def _sweep_config(cfg: ExperimentConfig, param: str, value: float) -> ExperimentConfig:
    data = cfg.to_dict()
    if param == "p":
        ch = data["channel"]
        if ch is None or "p" not in ch:
            raise ConfigError("channel", "sweeping p needs a channel with a 'p' field")
        ch["p"] = value
    elif param == "theta":
        data["coin"]["theta"] = value
    else:
        if value != int(value):
            raise ConfigError("--values", f"n must be an integer, got {value!r}")
        data["steps"] = int(value)
        data["topology"].pop("half_width", None)
        data["time_average"] = 0
    return ExperimentConfig.from_dict(data, cfg.base_dir)


def _sweep_point(job) -> analysis.SweepPoint:
    cfg, param, value = job
    point_cfg = _sweep_config(cfg, param, value)
    sigma = analysis.std_dev(distribution(point_cfg.walk(with_symmetry=False)))
    if point_cfg.symmetry:
        sigma_sym = analysis.std_dev(distribution(point_cfg.walk()))
        ratio = sigma / sigma_sym if sigma_sym > 0 else math.nan
    else:
        ratio = 1.0
    return analysis.SweepPoint(value, sigma, ratio)


def _parse_values(text: Optional[str]) -> list[float]:
    if text is None or not text.strip():
        raise ConfigError("--values", "empty value list")
    out = []
    for item in text.split(","):
        try:
            v = float(item)
        except ValueError:
            raise ConfigError("--values", f"not a number: {item!r}") from None
        if not math.isfinite(v):
            raise ConfigError("--values", f"not finite: {item!r}")
        out.append(v)
    return out


def cmd_sweep(args) -> int:
    cfg = _load(args)
    if args.param not in _SWEEP_PARAMS:
        raise ConfigError("--param", f"expected p, theta or n, got {args.param!r}")
    param = _SWEEP_PARAMS[args.param]
    values = _parse_values(args.values)
    if cfg.topology["kind"] != "line":
        raise ConfigError("topology.kind", "sweep reports sigma, which needs a line")
    if args.symmetry:
        cfg = ExperimentConfig.from_dict({**cfg.to_dict(), "symmetry": args.symmetry}, cfg.base_dir)
    for v in values:  # validate every point before doing any work
        _sweep_config(cfg, param, v)
    jobs = [(cfg, param, v) for v in values]
    if args.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            points = list(pool.map(_sweep_point, jobs))
    else:
        points = [_sweep_point(j) for j in jobs]
    buf = io.StringIO()
    buf.write("value,sigma,sigma_ratio\n")
    for pt in points:
        buf.write(f"{pt.value!r},{pt.sigma:.17g},{pt.sigma_ratio:.17g}\n")
    out = _out_path(args, cfg)
    report = _Report(out is None)
    if out is None:
        sys.stdout.write(buf.getvalue())
    else:
        _write_text(out, buf.getvalue())
    report("backend", BACKEND)
    report("param", param)
    report("points", len(points))
    metrics = {"param": param, "values": values, "sigma": [pt.sigma for pt in points]}
    return _golden(cfg, metrics, args.regen_golden, report)


def cmd_trajectories(args) -> int:
    cfg = _load(args)
    walk = cfg.walk()
    if walk.pipeline.channel is None:
        raise ConfigError("channel", "trajectory unraveling needs a channel")
    traj = cfg.trajectories
    seed = args.seed if args.seed is not None else traj["seed"]
    if traj["mode"] == "exact":
        d = enumerate_exact(walk)
        text = format_csv(d)
        extra = {"branches": branch_count(walk)}
    else:
        est = sample_monte_carlo(walk, traj["samples"], seed)
        d = est.distribution
        text = format_csv(d, ("std_error", est.std_error))
        extra = {"samples": traj["samples"], "seed": seed}
    out = _out_path(args, cfg)
    report = _Report(out is None)
    if out is None:
        sys.stdout.write(text)
    else:
        _write_text(out, text)
    _common_metadata(report, cfg, args)
    report("mode", traj["mode"])
    for k, v in extra.items():
        report(k, v)
    dens = distribution(walk)
    metrics = {
        "steps": cfg.steps,
        "max_abs_diff_vs_density": float(np.max(np.abs(d.probs - dens.probs))),
        **_spread_metrics(d),
    }
    for k, v in metrics.items():
        report(k, v)
    return _golden(cfg, metrics, args.regen_golden, report)


# --- entry point ----------------------------------------------------------------------


def _u64(text: str) -> int:
    v = int(text)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError(f"seed must be an unsigned 64-bit integer, got {text}")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="symwalk", description="Discrete-time quantum walk experiments.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, config_required=True):
        p.add_argument("--config", required=config_required, help="JSON experiment file")
        p.add_argument("--seed", type=_u64, default=None)
        p.add_argument("--out", default=None, help="CSV output path (default: config output, else stdout)")
        p.add_argument("--tol", type=float, default=None)
        p.add_argument("--regen-golden", action="store_true", help="rewrite the golden metrics file")

    common(sub.add_parser("run", help="evolve a walk and write its distribution"))
    common(sub.add_parser("cycle", help="run with cycle defaults (R=101, theta=30, n=5000)"), False)
    p = sub.add_parser("symmetry-check", help="compare a walk with its symmetry-augmented twin")
    common(p)
    p.add_argument("--symmetry", action="append", default=None, help="e.g. Z, PRX, Phi(180), B2(45)")
    p = sub.add_parser("sweep", help="sigma as a function of p, theta or n")
    common(p)
    p.add_argument("--param", required=True)
    p.add_argument("--values", default=None, help="comma-separated values (theta in degrees)")
    p.add_argument("--symmetry", action="append", default=None)
    p.add_argument("--jobs", type=int, default=1)
    common(sub.add_parser("trajectories", help="exact or Monte-Carlo unraveling"))
    return parser


_COMMANDS = {
    "run": cmd_run,
    "cycle": cmd_cycle,
    "symmetry-check": cmd_symmetry_check,
    "sweep": cmd_sweep,
    "trajectories": cmd_trajectories,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (BranchCapError, LatticeOverflowError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InvariantError as exc:
        print(f"invariant violated: {exc}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
