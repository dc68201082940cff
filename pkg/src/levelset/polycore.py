"""Multi-indices, graded ordering, and homogeneous polynomials.

Multi-indices are plain tuples of nonnegative ints. Within one total degree the
ordering is lexicographic with ``x_1`` most significant, so for ``n = 2``,
``d = 2`` the order is ``(2, 0), (1, 1), (0, 2)``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from math import comb
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import kernels
from .errors import ParseError

MultiIndex = tuple[int, ...]


def num_monomials(n: int, d: int) -> int:
    """Number of monomials of exact degree ``d`` in ``n`` variables."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if d < 0:
        return 0
    return comb(n + d - 1, d)


def dim_polynomials(n: int, d: int) -> int:
    """Dimension ``C(n + d, n)`` of the space of polynomials of degree at most ``d``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return comb(n + d, n)


@lru_cache(maxsize=None)
def _enumerate(n: int, d: int) -> tuple[MultiIndex, ...]:
    if n == 1:
        return ((d,),)
    out = []
    for first in range(d, -1, -1):
        out.extend((first,) + rest for rest in _enumerate(n - 1, d - first))
    return tuple(out)


def enumerate_degree(n: int, d: int) -> list[MultiIndex]:
    """All multi-indices of length ``n`` and total degree ``d`` in graded order.

    >>> enumerate_degree(2, 2)
    [(2, 0), (1, 1), (0, 2)]
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if d < 0:
        raise ValueError("d must be >= 0")
    return list(_enumerate(n, d))


def enumerate_upto(n: int, d: int) -> list[MultiIndex]:
    """Multi-indices of total degree ``0..d``, degree-major."""
    return [a for k in range(d + 1) for a in _enumerate(n, k)]


def degree(alpha: Sequence[int]) -> int:
    return int(sum(alpha))


def as_multi_index(alpha: Iterable, n: int | None = None) -> MultiIndex:
    """Validate and normalise ``alpha`` to a tuple of nonnegative ints."""
    try:
        out = tuple(int(a) for a in alpha)
        if any(float(a) != int(a) for a in alpha):
            raise ValueError
    except (TypeError, ValueError):
        raise ParseError(f"multi-index must be a list of integers, got {alpha!r}") from None
    if any(a < 0 for a in out):
        raise ParseError(f"multi-index entries must be nonnegative, got {out}")
    if n is not None and len(out) != n:
        raise ParseError(f"multi-index {out} has length {len(out)}, expected {n}")
    if not out:
        raise ParseError("multi-index must have length >= 1")
    return out


class GradedOrder:
    """Bijection between ``{alpha : |alpha| = d}`` and ``range(C(n+d-1, d))``."""

    def __init__(self, n: int, d: int):
        self.n = n
        self.d = d
        self.indices: tuple[MultiIndex, ...] = tuple(enumerate_degree(n, d))
        self._rank = {a: i for i, a in enumerate(self.indices)}

    def __len__(self):
        return len(self.indices)

    def __iter__(self):
        return iter(self.indices)

    def rank(self, alpha: Sequence[int]) -> int:
        try:
            return self._rank[tuple(alpha)]
        except KeyError:
            raise KeyError(f"{tuple(alpha)} is not a degree-{self.d} index in {self.n} variables") from None

    def unrank(self, i: int) -> MultiIndex:
        if not 0 <= i < len(self.indices):
            raise IndexError(i)
        return self.indices[i]

    def __repr__(self):
        return f"GradedOrder(n={self.n}, d={self.d})"


@dataclass(frozen=True)
class HomogeneousPolynomial:
    """Homogeneous polynomial stored as a sparse map from exponents to coefficients.

    Odd degree and indefinite forms are accepted here; recovery-side code
    enforces the conditions it needs.
    """

    n: int
    d: int
    coeffs: Mapping[MultiIndex, float] = field(default_factory=dict)

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ParseError(f"dimension must be a positive integer, got {self.n!r}")
        if int(self.d) != self.d or self.d < 0:
            raise ParseError(f"degree must be a nonnegative integer, got {self.d!r}")
        clean = {}
        for alpha, c in dict(self.coeffs).items():
            key = as_multi_index(alpha, self.n)
            if degree(key) != self.d:
                raise ParseError(f"term {key} has degree {degree(key)}, expected {self.d}")
            if key in clean:
                raise ParseError(f"duplicate term {key}")
            clean[key] = float(c)
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "d", int(self.d))
        object.__setattr__(self, "coeffs", clean)
        terms = sorted(clean, key=GradedOrder(self.n, self.d).rank)
        object.__setattr__(self, "_exps", np.array(terms, dtype=np.int64).reshape(-1, self.n))
        object.__setattr__(self, "_cvals", np.array([clean[t] for t in terms], dtype=np.float64))

    @classmethod
    def from_vector(cls, n: int, d: int, vector: Sequence[float]) -> "HomogeneousPolynomial":
        """Build from a dense coefficient vector in graded order."""
        order = GradedOrder(n, d)
        if len(vector) != len(order):
            raise ValueError(f"expected {len(order)} coefficients, got {len(vector)}")
        return cls(n, d, {a: float(c) for a, c in zip(order, vector)})

    @classmethod
    def from_quadratic_form(cls, Q) -> "HomogeneousPolynomial":
        """``x^T Q x`` for a symmetric matrix ``Q``."""
        Q = np.asarray(Q, dtype=float)
        n = Q.shape[0]
        Q = 0.5 * (Q + Q.T)
        coeffs = {}
        for i in range(n):
            for j in range(i, n):
                alpha = [0] * n
                alpha[i] += 1
                alpha[j] += 1
                coeffs[tuple(alpha)] = Q[i, i] if i == j else 2.0 * Q[i, j]
        return cls(n, 2, coeffs)

    def vector(self) -> np.ndarray:
        """Dense coefficient vector in graded order (absent terms are zero)."""
        order = GradedOrder(self.n, self.d)
        return np.array([self.coeffs.get(a, 0.0) for a in order])

    def evaluate(self, points) -> np.ndarray:
        """Vectorised evaluation at the rows of an ``(N, n)`` array."""
        pts = np.asarray(points, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[1] != self.n:
            raise ValueError(f"points must have shape (N, {self.n}), got {pts.shape}")
        if not self.coeffs:
            return np.zeros(pts.shape[0])
        return kernels.poly_eval(pts, self._exps, self._cvals)

    def __call__(self, x) -> float:
        x = np.asarray(x, dtype=np.float64)
        if x.shape != (self.n,):
            raise ValueError(f"expected a point of length {self.n}, got shape {x.shape}")
        return float(self.evaluate(x[None, :])[0])

    def __add__(self, other: "HomogeneousPolynomial") -> "HomogeneousPolynomial":
        if (self.n, self.d) != (other.n, other.d):
            raise ValueError("can only add polynomials of equal dimension and degree")
        out = dict(self.coeffs)
        for a, c in other.coeffs.items():
            out[a] = out.get(a, 0.0) + c
        return HomogeneousPolynomial(self.n, self.d, out)

    def scale(self, c: float) -> "HomogeneousPolynomial":
        return HomogeneousPolynomial(self.n, self.d, {a: c * v for a, v in self.coeffs.items()})

    @property
    def even_axes(self) -> tuple[int, ...]:
        """Coordinates ``i`` in which ``g`` is even (every term has even ``alpha_i``)."""
        return tuple(i for i in range(self.n) if all(a[i] % 2 == 0 for a in self.coeffs))

    # -- serialisation -------------------------------------------------
    def to_dict(self) -> dict:
        order = GradedOrder(self.n, self.d)
        terms = sorted(self.coeffs.items(), key=lambda kv: order.rank(kv[0]))
        return {"n": self.n, "d": self.d,
                "terms": [{"alpha": list(a), "c": c} for a, c in terms]}

    @classmethod
    def from_dict(cls, data: Mapping) -> "HomogeneousPolynomial":
        try:
            n, d, terms = data["n"], data["d"], data["terms"]
        except (KeyError, TypeError):
            raise ParseError("polynomial JSON needs keys 'n', 'd', 'terms'") from None
        if not isinstance(n, int) or not isinstance(d, int):
            raise ParseError("'n' and 'd' must be integers")
        coeffs = {}
        for term in terms:
            try:
                alpha, c = term["alpha"], term["c"]
            except (KeyError, TypeError):
                raise ParseError(f"bad term {term!r}: needs 'alpha' and 'c'") from None
            key = as_multi_index(alpha, n)
            if key in coeffs:
                raise ParseError(f"duplicate term {key}")
            if isinstance(c, bool) or not isinstance(c, (int, float)):
                raise ParseError(f"coefficient for {key} must be a number")
            coeffs[key] = float(c)
        return cls(n, d, coeffs)

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "HomogeneousPolynomial":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc}") from None
        return cls.from_dict(data)

    def __str__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for term in self.to_dict()["terms"]:
            mono = "*".join(f"x{i + 1}^{e}" if e > 1 else f"x{i + 1}"
                            for i, e in enumerate(term["alpha"]) if e)
            parts.append(f"{term['c']:g}" + (f"*{mono}" if mono else ""))
        return " + ".join(parts)


def evaluate(p: HomogeneousPolynomial, x) -> float:
    """Evaluate ``p`` at a single point."""
    return p(x)


def homogeneity_check(p, samples: int = 100, seed: int = 0,
                      rtol: float = 1e-12, atol: float = 1e-12) -> bool:
    """Check ``p(t x) == t**d p(x)`` at seeded random ``x`` and ``t`` in (0, 2]."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((samples, p.n))
    t = 2.0 * (1.0 - rng.random(samples))
    lhs = p.evaluate(t[:, None] * x)
    rhs = t ** p.d * p.evaluate(x)
    return bool(np.all(np.abs(lhs - rhs) <= rtol * np.abs(rhs) + atol))
