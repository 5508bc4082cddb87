"""Benchmark the numba-jitted Jacobi kernel against the pure-NumPy fallback.

Two workloads:
  * full eigen-decompositions across matrix orders, and
  * a verification-shaped run of many small PSD checks (the hot pattern of
    the equivalence suites).

Run:  python3 benchmarks/bench_eigen.py
The fallback path is what MISDPKIT_PURE_NUMPY=1 selects at import time.
"""

import time

import numpy as np

from misdpkit import _kernels


def batch(rng, n, count):
    mats = []
    for _ in range(count):
        a = rng.integers(-5, 6, (n, n)).astype(float)
        mats.append(np.tril(a) + np.tril(a, -1).T)
    return mats


def time_path(kernel, mats, reps):
    saved = _kernels.jacobi_cycle
    _kernels.jacobi_cycle = kernel
    try:
        t0 = time.perf_counter()
        for _ in range(reps):
            for a in mats:
                _kernels.jacobi_eigh(a, 1e-12, 100)
        return (time.perf_counter() - t0) / (reps * len(mats))
    finally:
        _kernels.jacobi_cycle = saved


def main():
    if not _kernels.HAVE_NUMBA:
        print("numba is not available; nothing to compare")
        return
    rng = np.random.default_rng(7)
    # warm up the JIT so compilation is excluded from the timings
    _kernels.jacobi_cycle_numba(np.eye(3), np.eye(3), 1.0, 1e-12, 10)

    print(f"{'order':>6} {'count':>6} {'numpy (us)':>12} {'numba (us)':>12} {'speedup':>8}")
    for n, count, reps in ((6, 200, 20), (12, 100, 10), (24, 50, 5), (48, 20, 3)):
        mats = batch(rng, n, count)
        t_np = time_path(_kernels.jacobi_cycle_numpy, mats, reps)
        t_nb = time_path(_kernels.jacobi_cycle_numba, mats, reps)
        print(f"{n:>6} {count:>6} {t_np * 1e6:>12.1f} {t_nb * 1e6:>12.1f} {t_np / t_nb:>8.1f}x")

    # verification-shaped workload: thousands of bordered 6x6 PSD checks
    mats = batch(rng, 6, 2000)
    t_np = time_path(_kernels.jacobi_cycle_numpy, mats, 1)
    t_nb = time_path(_kernels.jacobi_cycle_numba, mats, 1)
    print(f"\nsuite-shaped workload (2000 order-6 checks): "
          f"numpy {t_np * 2000 * 1e3:.0f} ms, numba {t_nb * 2000 * 1e3:.0f} ms, "
          f"{t_np / t_nb:.1f}x")


if __name__ == "__main__":
    main()
