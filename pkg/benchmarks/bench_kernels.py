"""Timing comparison of the compiled kernels against the pure-Python fallback.

Runs each hot kernel on representative workloads and prints per-call timings
and the compiled/python speedup.  Usage:

    python3 benchmarks/bench_kernels.py [--repeats N]
"""

import argparse
import importlib
import time

import numpy as np

from hestonsvi._kernels import pykernels

KAPPA, THETA, SIGMA, RHO, V0 = 1.0, 0.04, 0.25, -0.5, 0.04


def _time(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def workloads():
    x = np.ascontiguousarray(np.linspace(-0.4, 0.4, 1001))
    us = np.linspace(0.01, 60.0, 2000)
    vols = np.linspace(0.05, 0.8, 2000)

    def svi(mod):
        return lambda: mod.svi_variance(x, 0.0375, 6.25, RHO)

    def closed(mod):
        return lambda: mod.asym_variance_closed(x, KAPPA, THETA, SIGMA, RHO)

    def pipeline(mod):
        return lambda: mod.asym_variance_pipeline(x, KAPPA, THETA, SIGMA, RHO)

    def cf(mod):
        def run():
            for u in us[:400]:
                mod.heston_cf(complex(u, -0.5), 10.0, KAPPA, THETA, SIGMA, RHO, V0)
        return run

    def integrand(mod):
        def run():
            for u in us:
                mod.lewis_integrand(u, 0.1, 1.0, KAPPA, THETA, SIGMA, RHO, V0)
        return run

    def bs(mod):
        def run():
            for v in vols:
                mod.bs_call(v, 0.1, 2.0)
        return run

    return [
        ("svi_variance (1001-pt grid)", svi),
        ("asym_variance_closed (1001-pt grid)", closed),
        ("asym_variance_pipeline (1001-pt grid)", pipeline),
        ("heston_cf (400 calls)", cf),
        ("lewis_integrand (2000 calls)", integrand),
        ("bs_call (2000 calls)", bs),
    ]


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=7,
                        help="timing repeats per kernel (best is kept)")
    args = parser.parse_args()

    try:
        ckernels = importlib.import_module("hestonsvi._kernels._ckernels")
    except ImportError:
        print("compiled extension not built; nothing to compare")
        return 1

    print(f"{'kernel':<40} {'python':>12} {'compiled':>12} {'speedup':>9}")
    print("-" * 75)
    for name, make in workloads():
        t_py = _time(make(pykernels), args.repeats)
        t_c = _time(make(ckernels), args.repeats)
        print(f"{name:<40} {t_py * 1e3:>10.3f}ms {t_c * 1e3:>10.3f}ms "
              f"{t_py / t_c:>8.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
