"""Timing comparison for the hot distance/advection kernels.

Runs each kernel under the pure-numpy implementation and (when
available) the numba-compiled one, on inputs shaped like the real
workloads: packed coefficient blocks for the cross-distance kernels and
the truncated spectral basis for the advection term.  JIT compilation
happens in an untimed warmup pass, so the table reports steady-state
throughput only.

Usage:
    python3 benchmarks/bench_kernels.py [--repeat 50] [--seed 0]
"""

import argparse
import time

import numpy as np

from ges import backend, kernels
from ges.systems.nse import SpectralBasis


def time_call(fn, repeat):
    fn()  # warmup: triggers JIT compilation on the numba path
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def make_cases(rng):
    """(name, callable-factory) pairs sized like real ensembles."""
    # cross-distance blocks: 48 x 64 states over a 400-slot index union,
    # about what a deep pullback tier comparison packs together
    na, nb, slots = 48, 64, 400
    av = (rng.standard_normal((na, slots, 1))
          + 1j * rng.standard_normal((na, slots, 1)))
    bv = (rng.standard_normal((nb, slots, 1))
          + 1j * rng.standard_normal((nb, slots, 1)))
    qw = rng.uniform(0.5, 1.0, size=slots)
    ww = 2.0 ** (-np.abs(np.arange(slots) - slots // 2) / 40.0)

    basis = SpectralBasis(kmax=4)
    vals = (rng.standard_normal((basis.m, 3))
            + 1j * rng.standard_normal((basis.m, 3)))

    return [
        ("strong_cross", lambda: kernels.strong_cross(av, bv, qw)),
        ("weak_cross", lambda: kernels.weak_cross(av, bv, ww)),
        ("nse_bilinear", lambda: kernels.nse_bilinear(
            vals, basis.kvec, basis.pair_out, basis.pair_p, basis.pair_q)),
    ]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=50,
                    help="timed repetitions per kernel (best-of)")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    cases = make_cases(np.random.default_rng(args.seed))
    names = backend.available_backends()

    results = {}
    for name in names:
        prev = backend.set_backend(name)
        try:
            for case, fn in cases:
                results[(case, name)] = time_call(fn, args.repeat)
        finally:
            backend.set_backend(prev)

    print(f"{'kernel':<14}" + "".join(f"{n + ' (ms)':>14}" for n in names)
          + ("       speedup" if len(names) == 2 else ""))
    for case, _ in cases:
        row = f"{case:<14}"
        for name in names:
            row += f"{results[(case, name)] * 1e3:>14.3f}"
        if len(names) == 2:
            ratio = results[(case, names[1])] / results[(case, names[0])]
            row += f"{ratio:>13.1f}x"
        print(row)
    if "numba" not in names:
        print("numba is not importable here; numpy path only")


if __name__ == "__main__":
    main()
