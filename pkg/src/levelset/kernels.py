"""Backend selection for the hot loops.

The compiled extension is used when it imports; setting the environment
variable ``LEVELSET_PURE_PYTHON=1`` forces the NumPy fallback.
"""
import os

import numpy as np

from . import _kernels_py

if os.environ.get("LEVELSET_PURE_PYTHON", "") not in ("", "0"):
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl
        BACKEND = "cython"
    except ImportError:
        _impl = _kernels_py
        BACKEND = "python"


def poly_eval(points, exps, coeffs):
    points = np.ascontiguousarray(points, dtype=np.float64)
    if points.ndim != 2:
        raise ValueError("points must be a 2-D array")
    return _impl.poly_eval(
        points,
        np.ascontiguousarray(exps, dtype=np.int64).reshape(-1, points.shape[1]),
        np.ascontiguousarray(coeffs, dtype=np.float64),
    )


def weighted_monomial_sums(points, weights, exps):
    points = np.ascontiguousarray(points, dtype=np.float64)
    if points.ndim != 2:
        raise ValueError("points must be a 2-D array")
    return _impl.weighted_monomial_sums(
        points,
        np.ascontiguousarray(weights, dtype=np.float64),
        np.ascontiguousarray(exps, dtype=np.int64).reshape(-1, points.shape[1]),
    )
