"""Compare the pure-numpy and compiled kernels on the hot paths.

Run as a script:

    python benchmarks/bench_kernels.py [--paths N] [--steps N]

Times counter-based uniform generation, inverse-normal transformation,
one full Monte Carlo pass, and a binomial lattice on both backends, and
checks that the uniform streams agree bit for bit.
"""

import argparse
import importlib
import math
import time

import numpy as np

from netval import kernels
from netval.kernels import _pure


def _load_compiled():
    try:
        return importlib.import_module("netval.kernels._core")
    except ImportError:
        return None


def _time(fn, repeats=5):
    best = math.inf
    for _ in range(repeats):
        started = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - started)
    return best


def _dm_args(count):
    return dict(
        seed=20200417, start=0, count=count,
        payoff_kind=kernels.PAYOFF_LOGNORMAL,
        pay_mean=100.0 * math.exp(0.05), pay_vol=0.2,
        pay_values=np.zeros(1), pay_cum=np.ones(1),
        strike_kind=kernels.STRIKE_CONSTANT, strike_value=100.0,
        strike_values=np.zeros(1), strike_cum=np.ones(1),
        pay_factor=math.exp(-0.05), strike_factor=math.exp(-0.05),
        shift=0.0,
    )


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--paths", type=int, default=1_000_000)
    parser.add_argument("--steps", type=int, default=2048)
    args = parser.parse_args()

    compiled = _load_compiled()
    backends = [("pure", _pure)]
    if compiled is not None:
        backends.append(("compiled", compiled))
    else:
        print("compiled backend not built; timing the pure backend only")
    print(f"active backend: {kernels.BACKEND}")
    print(f"paths: {args.paths:,}  lattice steps: {args.steps:,}\n")

    n = args.paths
    cases = [
        ("uniforms", lambda mod: mod.uniforms(20200417, 0, 0, n)),
        ("normal_ppf", None),  # filled in below, needs the uniforms
        ("dm_chunk", lambda mod: mod.dm_chunk(**_dm_args(n))),
        ("crr_price", lambda mod: mod.crr_price(100.0, 100.0, 0.05, 1.0, 0.2, args.steps)),
    ]
    u = _pure.uniforms(20200417, 0, 0, n)
    cases[1] = ("normal_ppf", lambda mod: mod.normal_ppf(u))

    header = f"{'kernel':<12}" + "".join(f"{name:>14}" for name, _ in backends)
    if compiled is not None:
        header += f"{'speedup':>10}"
    print(header)
    for label, call in cases:
        times = [_time(lambda mod=mod: call(mod)) for _, mod in backends]
        row = f"{label:<12}" + "".join(f"{t * 1e3:>12.1f}ms" for t in times)
        if compiled is not None:
            row += f"{times[0] / times[1]:>9.1f}x"
        print(row)

    if compiled is not None:
        same = np.array_equal(
            _pure.uniforms(7, 1, 123, 4096), compiled.uniforms(7, 1, 123, 4096)
        )
        print(f"\nuniform streams bit-identical across backends: {same}")


if __name__ == "__main__":
    main()
