#!/usr/bin/env python3
"""Benchmark the compiled theta core against the pure-Python fallback.

Micro-benchmarks call both backend modules in-process; the end-to-end row
runs the dybe verification suite in subprocesses so that each run selects
its backend at import time (DYNELL_PURE_PYTHON=1 forces the fallback).

Usage: python benchmarks/bench_theta.py [--quick]
"""

import argparse
import os
import subprocess
import sys
import time

import numpy as np

from dynell import _theta_fallback as pyb

try:
    from dynell import _theta_core as cyb
except ImportError:
    cyb = None

TAU = 0.75j
N_TERMS = 12


def best_of(fn, reps=5, inner=1000):
    best = float("inf")
    for _ in range(reps):
        t0 = time.perf_counter()
        for _ in range(inner):
            fn()
        best = min(best, (time.perf_counter() - t0) / inner)
    return best


def micro_rows(quick: bool):
    norm_py = pyb.theta_norm(TAU, N_TERMS)
    z = 0.37 + 0.21j
    rng = np.random.default_rng(0)
    batch = rng.uniform(-2, 2, 2000 if quick else 20000) + 1j * rng.uniform(
        -2, 2, 2000 if quick else 20000
    )
    inner = 200 if quick else 1000

    rows = []
    for label, backend, norm in (
        ("python", pyb, norm_py),
        ("cython", cyb, cyb.theta_norm(TAU, N_TERMS) if cyb else None),
    ):
        if backend is None:
            continue
        t_eval = best_of(lambda: backend.theta_eval(z, TAU, N_TERMS, norm), inner=inner)
        t_der = best_of(
            lambda: backend.theta_derivs(z, 16, TAU, N_TERMS, norm), inner=inner // 2
        )
        t0 = time.perf_counter()
        backend.theta_many(batch, TAU, N_TERMS, norm)
        t_many = time.perf_counter() - t0
        rows.append((label, t_eval, t_der, t_many))
    return rows, len(batch)


def end_to_end(samples: int):
    code = (
        "import time; from dynell.report import VerificationConfig; "
        "from dynell.verify import run_suite; import dynell; "
        f"cfg = VerificationConfig(suites=('dybe',), samples={samples}); "
        "t0 = time.perf_counter(); run_suite(cfg); "
        "print(dynell.BACKEND, time.perf_counter() - t0)"
    )
    out = {}
    for env_extra in ({}, {"DYNELL_PURE_PYTHON": "1"}):
        env = dict(os.environ, **env_extra)
        res = subprocess.run(
            [sys.executable, "-c", code], env=env, capture_output=True, text=True
        )
        backend, seconds = res.stdout.split()
        out[backend] = float(seconds)
    return out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--quick", action="store_true")
    args = ap.parse_args()

    rows, batch_n = micro_rows(args.quick)
    print(f"{'backend':8s} {'theta_eval':>12s} {'theta_derivs(16)':>18s} "
          f"{'theta_many({})'.format(batch_n):>18s}")
    for label, t_eval, t_der, t_many in rows:
        print(f"{label:8s} {t_eval*1e6:10.2f} us {t_der*1e6:16.2f} us "
              f"{t_many*1e3:15.1f} ms")
    if len(rows) == 2:
        (_, pe, pd, pm), (_, ce, cd, cm) = rows
        print(f"{'speedup':8s} {pe/ce:10.1f} x  {pd/cd:15.1f} x  {pm/cm:14.1f} x")
    else:
        print("compiled core not built; only the fallback was timed")

    samples = 20 if args.quick else 100
    e2e = end_to_end(samples)
    print(f"\nend-to-end dybe suite ({samples} samples/family):")
    for backend, seconds in sorted(e2e.items()):
        print(f"  {backend:8s} {seconds:7.2f} s")
    if len(e2e) == 2 and "cython" in e2e:
        print(f"  speedup  {e2e['python']/e2e['cython']:7.1f} x")


if __name__ == "__main__":
    main()
