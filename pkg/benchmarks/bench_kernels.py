"""Benchmark the numba kernels against their pure-numpy fallbacks.

Run: python benchmarks/bench_kernels.py
(The library picks the numba path by default; HQEC_NO_NUMBA=1 forces the
numpy path everywhere. This script times both implementations directly.)
"""

from __future__ import annotations

import time

import numpy as np

from hqec import _kernels as K
from hqec.protocol import run_transversal_t_protocol
from hqec.rng import SplitMix64


def timeit(fn, *args, repeat=7):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def bench_kernels():
    rng = np.random.default_rng(0)
    print(f"{'kernel':<16} {'size':>9} {'numpy':>12} {'numba':>12} {'speedup':>8}")
    for size in (1_000, 100_000, 2_000_000):
        arr = rng.integers(0, 2**63, size).astype(np.uint64)
        mask = np.uint64(0x0F0F12345678ABCD)
        keys = rng.integers(0, size // 4 + 1, size).astype(np.uint64)
        amps = (rng.normal(size=size) + 1j * rng.normal(size=size)).astype(np.complex128)

        cases = [
            ("popcount64", (K.popcount64_np, K.popcount64_nb), (arr,)),
            ("and_popcount64", (K.and_popcount64_np, K.and_popcount64_nb), (arr, mask)),
            ("coalesce64", (K.coalesce64_np, K.coalesce64_nb), (keys, amps, 1e-12)),
        ]
        for name, (f_np, f_nb), args in cases:
            f_nb(*args)  # JIT warmup
            t_np = timeit(f_np, *args)
            t_nb = timeit(f_nb, *args)
            print(f"{name:<16} {size:>9} {t_np * 1e3:>10.3f}ms {t_nb * 1e3:>10.3f}ms "
                  f"{t_np / t_nb:>7.2f}x")


def bench_protocol():
    # end-to-end: one transversal-T run on the 15-qubit block
    run_transversal_t_protocol((0.6, 0.8), (1, 1), SplitMix64(0))  # warmup
    t = timeit(lambda: run_transversal_t_protocol((0.6, 0.8), (1, 1), SplitMix64(0)), repeat=5)
    backend = "numba" if K.USE_NUMBA else "numpy"
    print(f"\ntransversal-T protocol run ({backend} path): {t * 1e3:.2f} ms")


if __name__ == "__main__":
    if not K._HAVE_NUMBA:
        print("numba not installed: only the numpy path is available")
    else:
        bench_kernels()
    bench_protocol()
