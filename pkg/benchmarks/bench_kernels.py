"""Compare the compiled and NumPy kernels on the workloads the package runs.

    python benchmarks/bench_kernels.py [--repeat 5]
"""
import argparse
import time

import numpy as np

from levelset import HomogeneousPolynomial, QuadratureConfig, _kernels_py, kernels
from levelset.polycore import enumerate_degree
from levelset.quadrature import sphere_rule

try:
    from levelset import _kernels as _kernels_c
except ImportError:
    _kernels_c = None


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def workloads():
    rng = np.random.default_rng(0)
    quartic = HomogeneousPolynomial(2, 4, {(4, 0): 1.0, (2, 2): 0.5, (0, 4): 1.0})
    mc_pts = rng.uniform(-1.2, 1.2, (1_000_000, 2))
    yield ("poly_eval: quartic, 1e6 points (MC acceptance test)", "poly_eval",
           (mc_pts, quartic._exps, quartic._cvals))

    rule = sphere_rule(4)
    pts = np.ascontiguousarray(rule.orthant_points)
    w = rule.orthant_weights
    exps = np.array(enumerate_degree(4, 2) + enumerate_degree(4, 4), dtype=np.int64)
    yield (f"weighted sums: n=4, {pts.shape[0]} nodes x {len(exps)} monomials (one sign block)",
           "weighted_monomial_sums", (pts, w, exps))

    acc = mc_pts[np.sum(mc_pts ** 4, axis=1) <= 1]
    exps2 = np.array(enumerate_degree(2, 4) + enumerate_degree(2, 8), dtype=np.int64)
    yield (f"weighted sums: {acc.shape[0]} accepted MC points x {len(exps2)} monomials",
           "weighted_monomial_sums", (np.ascontiguousarray(acc), np.ones(acc.shape[0]), 2 * exps2))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    print(f"selected backend: {kernels.BACKEND}")
    if _kernels_c is None:
        print("compiled extension not built; only the NumPy fallback is timed")
    for label, name, call_args in workloads():
        t_py = best_of(lambda: getattr(_kernels_py, name)(*call_args), args.repeat)
        line = f"{label}\n    numpy  {1e3 * t_py:9.2f} ms"
        if _kernels_c is not None:
            t_c = best_of(lambda: getattr(_kernels_c, name)(*call_args), args.repeat)
            a = getattr(_kernels_py, name)(*call_args)
            b = getattr(_kernels_c, name)(*call_args)
            diff = float(np.max(np.abs(a - b)) / max(np.max(np.abs(a)), 1e-300))
            line += f"\n    cython {1e3 * t_c:9.2f} ms   speedup {t_py / t_c:5.1f}x   max rel diff {diff:.1e}"
        print(line)


if __name__ == "__main__":
    main()
