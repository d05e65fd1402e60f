#!/usr/bin/env python3
"""Throughput comparison of the two right-hand-side kernels.

Times repeated derivative sweeps over a realistic hierarchy (7 modes,
truncation level 4, 330 ADOs by default) for the numba kernel and the
pure-numpy fallback, and reports evaluations/second plus the speedup.

Usage: python benchmarks/bench_rhs.py [--modes K] [--level L] [--repeat N]
"""

import argparse
import time

import numpy as np

from spinbloch import kernels
from spinbloch.hierarchy import build_hierarchy


def make_problem(n_modes, level, seed=7):
    rng = np.random.default_rng(seed)
    hier = build_hierarchy(n_modes, level)
    rho = np.ascontiguousarray(
        rng.standard_normal((hier.n_ado, 2, 2))
        + 1j * rng.standard_normal((hier.n_ado, 2, 2)))
    h = rng.standard_normal((2, 2))
    h_sys = np.ascontiguousarray((h + h.T) / 2 + 0j)
    s_op = np.ascontiguousarray(np.diag([1.0, -1.0]) + 0j)
    zeta = rng.standard_normal(n_modes) + 1j * np.abs(rng.standard_normal(n_modes))
    alpha = rng.standard_normal(n_modes) + 1j * rng.standard_normal(n_modes)
    args = (h_sys, s_op, zeta, alpha, np.conj(alpha),
            hier.nvec.astype(np.float64), hier.plus_idx, hier.minus_idx)
    return hier, rho, args


def bench(backend, rho, args, repeat):
    kernels.set_backend(backend)
    out = np.empty_like(rho)
    kernels.heom_rhs_kernel(rho, out, *args)  # warm-up / JIT compile
    t0 = time.perf_counter()
    for _ in range(repeat):
        kernels.heom_rhs_kernel(rho, out, *args)
    dt = time.perf_counter() - t0
    return repeat / dt


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--modes", type=int, default=7)
    ap.add_argument("--level", type=int, default=4)
    ap.add_argument("--repeat", type=int, default=200)
    ns = ap.parse_args()

    hier, rho, args = make_problem(ns.modes, ns.level)
    print(f"hierarchy: {ns.modes} modes, level {ns.level}, {hier.n_ado} ADOs, "
          f"{ns.repeat} sweeps per backend")

    rate_np = bench("numpy", rho, args, ns.repeat)
    print(f"numpy : {rate_np:10.1f} sweeps/s")
    try:
        rate_nb = bench("numba", rho, args, ns.repeat)
    except RuntimeError as exc:
        print(f"numba : unavailable ({exc})")
        return
    print(f"numba : {rate_nb:10.1f} sweeps/s   ({rate_nb / rate_np:.1f}x numpy)")


if __name__ == "__main__":
    main()
