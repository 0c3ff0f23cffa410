"""Kernel benchmark: numba JIT path vs the pure-numpy fallback.

Run as `python -m maxzonoid.bench [--sizes small|large]`.  Both paths
compute identical values (checked here); the table reports wall times
and the speedup of the active JIT path where available.
"""

import argparse
import time

import numpy as np

from . import _kernels


def _time(fn, *args, repeat=3):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def run(sizes="small"):
    rng = np.random.default_rng(0)
    if sizes == "small":
        cases = [(200, 2, 4096), (1000, 3, 20_000)]
        n_sim = 20_000
    else:
        cases = [(1000, 2, 65_536), (2000, 3, 100_000), (5000, 4, 100_000)]
        n_sim = 200_000

    rows = []
    for m, d, n in cases:
        atoms = rng.random((m, d)) * rng.random((m, 1))
        points = rng.random((n, d)) * 2.0
        if _kernels.HAS_NUMBA:
            _kernels.support_sum(atoms[:4], points[:4])  # compile outside timing
        t_np, ref = _time(_kernels.support_sum_numpy, atoms, points)
        t_jit, val = _time(_kernels.support_sum, atoms, points)
        assert np.allclose(ref, val, rtol=1e-12)
        rows.append((f"support_sum m={m} d={d} n={n}", t_np, t_jit))

        A = atoms / atoms.sum(axis=0)
        uniforms = rng.random((n_sim, m))
        if _kernels.HAS_NUMBA:
            _kernels.simulate_frechet(A, uniforms[:4])
        t_np, ref = _time(_kernels.simulate_frechet_numpy, A, uniforms)
        t_jit, val = _time(_kernels.simulate_frechet, A, uniforms)
        assert np.allclose(ref, val, rtol=1e-12)
        rows.append((f"simulate m={m} d={d} n={n_sim}", t_np, t_jit))

    backend = _kernels.backend_name()
    print(f"active backend: {backend}")
    width = max(len(r[0]) for r in rows)
    print(f"{'kernel':<{width}}  {'numpy':>9}  {backend:>9}  {'speedup':>8}")
    for name, t_np, t_jit in rows:
        print(
            f"{name:<{width}}  {t_np * 1e3:8.1f}ms  {t_jit * 1e3:8.1f}ms  "
            f"{t_np / t_jit:7.2f}x"
        )


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", choices=["small", "large"], default="small")
    args = parser.parse_args(argv)
    run(args.sizes)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
