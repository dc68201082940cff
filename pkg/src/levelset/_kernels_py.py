"""NumPy fallback for the compiled kernels in ``_kernels.pyx``.

Same signatures, same arithmetic order per point (powers by repeated
multiplication, products left to right), so the two backends agree to a few
ulps and share the bit-exact sign symmetry of odd monomials.
"""
import numpy as np

_CHUNK = 1 << 15


def _power_table(points, maxdeg):
    # table[k, i, j] = points[i, j] ** k
    table = np.empty((maxdeg + 1,) + points.shape)
    table[0] = 1.0
    for k in range(1, maxdeg + 1):
        table[k] = table[k - 1] * points
    return table


def _monomials(points, exps):
    # (M, N) matrix of points ** exps, built left to right over coordinates
    maxdeg = int(exps.max()) if exps.size else 0
    table = _power_table(points, maxdeg)
    mono = np.ones((exps.shape[0], points.shape[0]))
    for j in range(points.shape[1]):
        mono = mono * table[exps[:, j], :, j]
    return mono


def poly_eval(points, exps, coeffs):
    """Evaluate ``sum_t coeffs[t] * x**exps[t]`` at every row of ``points``."""
    points = np.asarray(points, dtype=np.float64)
    exps = np.asarray(exps, dtype=np.int64)
    coeffs = np.asarray(coeffs, dtype=np.float64)
    out = np.zeros(points.shape[0])
    for start in range(0, points.shape[0], _CHUNK):
        block = points[start:start + _CHUNK]
        mono = _monomials(block, exps)
        acc = np.zeros(block.shape[0])
        for t in range(exps.shape[0]):
            acc = acc + coeffs[t] * mono[t]
        out[start:start + _CHUNK] = acc
    return out


def weighted_monomial_sums(points, weights, exps):
    """Return ``S[m] = sum_i weights[i] * points[i]**exps[m]`` for every row of ``exps``."""
    points = np.asarray(points, dtype=np.float64)
    weights = np.asarray(weights, dtype=np.float64)
    exps = np.asarray(exps, dtype=np.int64)
    out = np.zeros(exps.shape[0])
    for start in range(0, points.shape[0], _CHUNK):
        mono = _monomials(points[start:start + _CHUNK], exps)
        out = out + (weights[start:start + _CHUNK] * mono).sum(axis=1)
    return out
