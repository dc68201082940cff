"""Sign-symmetric quadrature rules on the unit sphere S^{n-1}.

A rule is stored as a positive-orthant rule (all coordinates strictly positive)
and expanded by the ``2**n`` coordinate sign flips. Integrals are accumulated
one sign block at a time and the block sums are then combined pairwise along
each sign axis. When the integrand is odd in some coordinate the paired block
sums are exact negatives, so the result is exactly zero rather than roundoff.

Orthant rules:

* ``n = 2``: offset uniform angles on the quarter circle (periodic trapezoid).
* ``n >= 3``: Gauss-Jacobi nodes in the last coordinate ``t`` for the weight
  ``(1 - t^2)^((n-3)/2)``, tensored with the ``S^{n-2}`` orthant rule scaled by
  ``sqrt(1 - t^2)``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from math import gamma, pi

import numpy as np
from scipy.special import roots_jacobi

DEFAULT_SPHERE_POINTS = {1: 2, 2: 4096, 3: 32768, 4: 262144}


def sphere_area(n: int) -> float:
    """Surface measure of S^{n-1} (2 for n = 1, 2*pi for n = 2, 4*pi for n = 3)."""
    return 2.0 * pi ** (n / 2) / gamma(n / 2)


def default_sphere_points(n: int) -> int:
    return DEFAULT_SPHERE_POINTS.get(n, 2 ** n * 8 ** (n - 1))


def resolution_for(n: int, budget: int) -> int:
    """Largest ``m`` with ``2**n * m**(n-1) <= budget`` (at least 1)."""
    if n == 1:
        return 1
    per_orthant = max(1, budget // 2 ** n)
    m = max(1, int(round(per_orthant ** (1.0 / (n - 1)))))
    while m > 1 and m ** (n - 1) > per_orthant:
        m -= 1
    while (m + 1) ** (n - 1) <= per_orthant:
        m += 1
    return m


@lru_cache(maxsize=32)
def _orthant_rule(n: int, m: int) -> tuple[np.ndarray, np.ndarray]:
    if n == 1:
        return np.ones((1, 1)), np.ones(1)
    if n == 2:
        step = 0.5 * pi / m
        phi = (np.arange(m) + 0.5) * step
        return np.column_stack([np.cos(phi), np.sin(phi)]), np.full(m, step)
    a = 0.5 * (n - 3)
    t, wt = roots_jacobi(2 * m, a, a)
    keep = t > 0
    t, wt = t[keep], wt[keep]
    sub_pts, sub_w = _orthant_rule(n - 1, m)
    s = np.sqrt((1.0 - t) * (1.0 + t))
    pts = np.concatenate(
        [
            (s[:, None, None] * sub_pts[None, :, :]).reshape(-1, n - 1),
            np.repeat(t, sub_pts.shape[0])[:, None],
        ],
        axis=1,
    )
    w = (wt[:, None] * sub_w[None, :]).ravel()
    return pts, w


@dataclass(frozen=True)
class SphereRule:
    n: int
    resolution: int
    orthant_points: np.ndarray
    orthant_weights: np.ndarray
    signs: np.ndarray

    @property
    def size(self) -> int:
        return self.orthant_points.shape[0] * self.signs.shape[0]

    def points(self) -> np.ndarray:
        """All nodes, block-major over sign patterns."""
        return np.concatenate([s * self.orthant_points for s in self.signs])

    def weights(self) -> np.ndarray:
        return np.tile(self.orthant_weights, self.signs.shape[0])

    def integrate(self, block_sums) -> np.ndarray:
        """Sum ``block_sums(points, weights) -> (M,)`` over all sign blocks.

        Block results are combined pairwise along each sign axis in a fixed
        order, which makes the total deterministic and keeps exact cancellation
        for integrands odd in any coordinate.
        """
        parts = [np.asarray(block_sums(s * self.orthant_points, self.orthant_weights), dtype=float)
                 for s in self.signs]
        acc = np.stack(parts).reshape((2,) * self.n + parts[0].shape)
        for _ in range(self.n):
            acc = acc[0] + acc[1]
        return acc


def sphere_rule(n: int, points: int | None = None) -> SphereRule:
    """Quadrature rule on S^{n-1} using at most ``points`` nodes."""
    if n < 1:
        raise ValueError("n must be >= 1")
    budget = default_sphere_points(n) if points is None else int(points)
    if budget < 1:
        raise ValueError("points must be >= 1")
    m = resolution_for(n, budget)
    pts, w = _orthant_rule(n, m)
    signs = np.array(list(itertools.product([1.0, -1.0], repeat=n)))
    return SphereRule(n, m, pts, w, signs)
