"""Benchmark the studentized-range CDF kernel: compiled vs numpy fallback.

Run:  python3 benchmarks/bench_srange.py [repeats]

Both paths evaluate the identical quadrature grid, so the reported numbers are
a pure kernel comparison; the max |difference| line confirms they agree.
"""

import statistics
import sys
import time

from twinplat import srange

GRID = [(q, a, df)
        for q in (0.5, 1.5, 2.5, 3.5, 4.5, 6.0)
        for a in (2, 3, 5, 10)
        for df in (5.0, 20.0, 98.0)]


# quadrature nodes depend only on df; build them once so the timed loops
# measure the kernel, not node generation
U_GRIDS = {df: srange._u_grid(df) for _, _, df in GRID}


def run_numpy():
    return [srange._cdf_kernel_numpy(q, a, *U_GRIDS[df]) for q, a, df in GRID]


def run_compiled():
    return [srange._cdf_kernel_jit(q, a, *U_GRIDS[df],
                                   srange._zx, srange._PHI_Z, srange._PHIW_Z)
            for q, a, df in GRID]


def timed(fn, repeats):
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times), statistics.median(times)


def main():
    repeats = int(sys.argv[1]) if len(sys.argv) > 1 else 20
    print(f"{len(GRID)} cdf evaluations per pass, {repeats} passes")

    np_best, np_med = timed(run_numpy, repeats)
    print(f"numpy fallback : best {np_best * 1e3:8.2f} ms   median {np_med * 1e3:8.2f} ms")

    if srange.backend() != "numba":
        print("compiled kernel unavailable (numba not importable or "
              "TWINPLAT_NO_NUMBA set); fallback numbers only")
        return

    run_compiled()  # JIT warm-up outside the timed region
    jit_best, jit_med = timed(run_compiled, repeats)
    print(f"numba compiled : best {jit_best * 1e3:8.2f} ms   median {jit_med * 1e3:8.2f} ms")
    print(f"speedup (median): {np_med / jit_med:.2f}x")

    worst = max(abs(a - b) for a, b in zip(run_numpy(), run_compiled()))
    print(f"max |numpy - numba| over the grid: {worst:.3e}")


if __name__ == "__main__":
    main()
