"""Benchmark the hot kernels under the numba backend and the pure
numpy/Python fallback (HOSTPAR_NO_NUMBA=1).

Run `python benchmarks/bench_kernels.py` to time both backends (each in a
fresh subprocess so the import-time backend choice is clean) and print a
comparison table, or `--single` to time only the currently active backend.
"""

import argparse
import json
import os
import subprocess
import sys
import time


def _time(fn, *args, repeat=3):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def run_single():
    import numpy as np

    from hostpar import _kernels as K
    from hostpar._accel import backend_name

    results = {"backend": backend_name()}

    out = np.empty((1000, 2))
    K.orbit_kernel(1, 1, 2.3, 2.2, 0.5, 0.5, 10, out)  # warm-up / JIT
    results["orbit_1e6_steps"] = _time(
        lambda: K.orbit_kernel(1, 1, 2.3, 2.2, 0.5, 0.5, 1_000_000, out))

    K.lyapunov_kernel(1, 1, 2.3, 2.2, 0.5, 0.5, 10, 10)
    results["lyapunov_2e5_steps"] = _time(
        lambda: K.lyapunov_kernel(1, 1, 2.3, 2.2, 0.5, 0.5, 1000, 200_000))

    xs = np.linspace(0.05, 1.4, 4096)
    ys = np.linspace(0.05, 2.9, 4096)
    K.orbit_final_batch(1, 0, 2.92, 1.9, xs[:8], ys[:8], 10)
    results["batch_4096x2000_steps"] = _time(
        lambda: K.orbit_final_batch(1, 0, 2.92, 1.9, xs, ys, 2000))

    rs = np.full(4096, 2.5)
    bs = np.linspace(0.9, 1.7, 4096)
    K.region_cells(1, 1, rs[:4], bs[:4])
    results["region_4096_cells"] = _time(lambda: K.region_cells(1, 1, rs, bs))

    K.coexistence_roots(1, 1, 2.5, 0.98)
    results["coexistence_roots_1000x"] = _time(
        lambda: [K.coexistence_roots(1, 1, 2.5, 0.98) for _ in range(1000)])

    return results


def run_comparison():
    rows = []
    for disable in ("0", "1"):
        env = dict(os.environ, HOSTPAR_NO_NUMBA=disable)
        proc = subprocess.run(
            [sys.executable, os.path.abspath(__file__), "--single", "--json"],
            env=env, capture_output=True, text=True, check=True)
        rows.append(json.loads(proc.stdout))
    keys = [k for k in rows[0] if k != "backend"]
    name_w = max(len(k) for k in keys)
    print(f"{'kernel':<{name_w}}  {rows[0]['backend']:>12}  "
          f"{rows[1]['backend']:>12}  {'speedup':>8}")
    for k in keys:
        a, b = rows[0][k], rows[1][k]
        print(f"{k:<{name_w}}  {a * 1e3:>10.2f}ms  {b * 1e3:>10.2f}ms  "
              f"{b / a:>7.1f}x")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--single", action="store_true",
                    help="time only the active backend")
    ap.add_argument("--json", action="store_true")
    args = ap.parse_args()
    if args.single:
        results = run_single()
        if args.json:
            print(json.dumps(results))
        else:
            for k, v in results.items():
                print(f"{k}: {v if isinstance(v, str) else f'{v * 1e3:.2f}ms'}")
    else:
        run_comparison()


if __name__ == "__main__":
    main()
