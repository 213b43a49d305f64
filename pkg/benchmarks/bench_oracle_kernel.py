"""Compiled versus numpy oracle kernel.

Times a full grid scan and a complete brute-force search on a few
entangled states with each backend, and checks that both backends return
the same answer.

    python benchmarks/bench_oracle_kernel.py [--states 5] [--grid 81] [--repeat 3]
"""
import argparse
import math
import time

import numpy as np

from gaussian_eof.cli import random_states
from gaussian_eof.oracle import OracleConfig, _kernel_c, brute_force_eof, get_kernel


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - start)
    return min(times), out


def _diff(a, b):
    """Largest difference over feasible nodes; inf if the backends disagree on feasibility."""
    fa, fb = np.isfinite(a), np.isfinite(b)
    if not np.array_equal(fa, fb):
        return math.inf
    return float(np.max(np.abs(a[fa] - b[fb]), initial=0.0))


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--states", type=int, default=5)
    parser.add_argument("--grid", type=int, default=81)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    if _kernel_c is None:
        raise SystemExit("compiled kernel not built; run `pip install -e . --no-build-isolation` first")

    states = list(random_states(args.states, 1, entangled_only=True))
    config = OracleConfig(grid_points_per_axis=args.grid)
    axis = np.exp(np.linspace(-math.log(config.log_range), math.log(config.log_range), args.grid))

    print(f"{args.states} states, {args.grid} points per axis, best of {args.repeat}")
    print(f"{'task':<18} {'compiled [s]':>13} {'python [s]':>12} {'speedup':>9} {'max |diff|':>11}")
    for task in ("scan_grid", "brute_force_eof"):
        totals = {}
        results = {}
        for name in ("compiled", "python"):
            k = get_kernel(name)
            totals[name] = 0.0
            results[name] = []
            for sf in states:
                if task == "scan_grid":
                    fn = lambda: k.scan_grid(sf.b1, sf.b2, sf.c, sf.d, axis, axis)[0]
                else:
                    fn = lambda: brute_force_eof(sf, config, backend=name).ef_nats
                t, out = best_of(fn, args.repeat if name == "compiled" else 1)
                totals[name] += t
                results[name].append(np.asarray(out, float))
        diff = max(_diff(a, b) for a, b in zip(results["compiled"], results["python"]))
        speedup = totals["python"] / totals["compiled"]
        print(f"{task:<18} {totals['compiled']:>13.4f} {totals['python']:>12.4f} {speedup:>8.1f}x {diff:>11.2e}")


if __name__ == "__main__":
    main()
