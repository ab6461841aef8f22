"""Compare the compiled step kernels with the numpy fallback.

    python benchmarks/bench_kernels.py --sizes 21 101 201 --repeat 5
"""

import argparse
import timeit

import numpy as np

from symwalk import CoinParams, Topology, build_coin, make_config, phase_flip
from symwalk._backend import c_kernels, py_kernels
from symwalk.engine import evolve_density


def _inputs(n, rng):
    q, _ = np.linalg.qr(rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)))
    psi = rng.normal(size=(1, 2, n)) + 1j * rng.normal(size=(1, 2, n))
    blocks = rng.normal(size=(4, n, n)) + 1j * rng.normal(size=(4, n, n))
    chan = phase_flip(0.1).superoperator()
    return q, psi, blocks, np.kron(q, q.conj()), chan


def _best(fn, repeat, number):
    return min(timeit.repeat(fn, repeat=repeat, number=number)) / number


def bench_steps(sizes, repeat):
    rng = np.random.default_rng(0)
    rows = []
    for n in sizes:
        q, psi, blocks, coin_super, chan = _inputs(n, rng)
        for label, kernels in (("python", py_kernels), ("cython", c_kernels)):
            if kernels is None:
                continue
            pure = _best(lambda: kernels.pure_step(psi, q, None, 1, True), repeat, 200)
            dens = _best(lambda: kernels.density_step(blocks, coin_super, chan, 1, True), repeat, 20)
            rows.append((n, label, pure, dens))
    return rows


def bench_walk(steps, sites, repeat):
    coin = build_coin(CoinParams.degrees(0, 30, 0))
    cfg = make_config(steps, coin, topology=Topology.cycle(sites), channel=phase_flip(0.02))
    out = {}
    for label in ("python", "cython"):
        if label == "cython" and c_kernels is None:
            continue
        out[label] = _best(lambda: evolve_density(cfg, backend=label, check=False), repeat, 1)
    return out


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", type=int, nargs="+", default=[21, 101, 201])
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--walk-steps", type=int, default=1000)
    args = parser.parse_args()

    if c_kernels is None:
        print("compiled kernels not built; only the numpy fallback is timed")
    print(f"{'sites':>6} {'backend':>8} {'pure step':>12} {'density step':>14}")
    rows = bench_steps(args.sizes, args.repeat)
    for n, label, pure, dens in rows:
        print(f"{n:>6} {label:>8} {pure * 1e6:>10.2f}us {dens * 1e3:>12.3f}ms")
    by_size = {}
    for n, label, pure, dens in rows:
        by_size.setdefault(n, {})[label] = (pure, dens)
    for n, d in by_size.items():
        if "cython" in d:
            print(f"speedup at {n} sites: pure x{d['python'][0] / d['cython'][0]:.1f}, "
                  f"density x{d['python'][1] / d['cython'][1]:.1f}")

    walk = bench_walk(args.walk_steps, 101, max(1, args.repeat // 2))
    for label, t in walk.items():
        print(f"noisy cycle walk, 101 sites, {args.walk_steps} steps, {label}: {t:.3f}s")


if __name__ == "__main__":
    main()
