#!/usr/bin/env python3
"""Benchmark the Crank-Nicolson kernels: compiled extension vs fallback.

Times the twisted-boundary stepper (the more expensive of the two) and
the periodic-gauge stepper on a unit flux sweep.  Run from the repo
root after installing:

    python3 benchmarks/bench_cn.py [--nx 256 512 1024] [--steps 10000]
"""

import argparse
import time

import numpy as np

from abring._kernels import available_backends

TWO_PI = 2.0 * np.pi


def smoothstep(u):
    return u**3 * (10.0 + u * (-15.0 + 6.0 * u))


def time_run(fn, *args, repeats=3):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--nx", type=int, nargs="+", default=[256, 512, 1024])
    parser.add_argument("--steps", type=int, default=10_000)
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()

    backends = available_backends()
    print(f"backends: {', '.join(sorted(backends))}   steps per run: {args.steps}")
    header = f"{'kernel':<10} {'nx':>6} " + " ".join(f"{name:>12}" for name in sorted(backends))
    if len(backends) > 1:
        header += f" {'speedup':>9}"
    print(header)

    u = (np.arange(args.steps) + 0.5) / args.steps
    phi = smoothstep(u)
    dphi = 30.0 * u**2 * (1.0 - u) ** 2 / (args.steps * 1e-3)
    kappa = TWO_PI * phi / TWO_PI

    for nx in args.nx:
        dx = TWO_PI / nx
        x = np.arange(nx) * dx
        psi = np.exp(1j * x) / np.sqrt(TWO_PI)
        for kernel, call_args in (
            ("periodic", (psi, kappa, 1e-3, dx)),
            ("twisted", (psi, phi, dphi, 1e-3, dx)),
        ):
            times = {}
            for name in sorted(backends):
                fn = getattr(backends[name], f"run_{kernel}")
                times[name] = time_run(fn, *call_args, repeats=args.repeats)
            row = f"{kernel:<10} {nx:>6} " + " ".join(
                f"{times[name] * 1e3:>10.1f}ms" for name in sorted(backends)
            )
            if "cython" in times and "python" in times:
                row += f" {times['python'] / times['cython']:>8.1f}x"
            print(row)


if __name__ == "__main__":
    main()
