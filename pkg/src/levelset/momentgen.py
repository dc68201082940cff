"""Moments of the Lebesgue measure on G = {x : g(x) <= 1}.

Two engines compute ``lambda_alpha = int_G x^alpha dx``:

* radial quadrature: with ``x = r * theta`` and ``g(r theta) = r^d g(theta)``
  the radial integral is closed form, leaving

      lambda_alpha = 1/(n+|alpha|) * int_{S^{n-1}} theta^alpha g(theta)^(-(n+|alpha|)/d) dsigma

  which is evaluated with :mod:`levelset.quadrature`;
* Monte Carlo rejection sampling on the bounding box ``[-R, R]^n`` where
  ``R = m^(-1/d)`` and ``m`` is the minimum of ``g`` on the sphere.

Any object with attributes ``n``, ``d`` and a vectorised ``evaluate(points)``
that is positively homogeneous and nonnegative can stand in for ``g``.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from math import gamma
from typing import Iterable, Mapping, NamedTuple

import numpy as np
from scipy.optimize import minimize

from . import kernels
from .errors import DegenerateSampling, MissingMoment, NotCompact, ParseError
from .polycore import MultiIndex, as_multi_index, degree, enumerate_degree
from .quadrature import sphere_rule

PROVENANCES = ("radial-quadrature", "monte-carlo", "analytic", "external")
FEASIBILITY_TOL = 1e-9
NEAR_DEGENERATE_MIN = 1e-6
MIN_ACCEPTANCE = 1e-4
_MC_CHUNK = 1 << 17


@dataclass(frozen=True)
class QuadratureConfig:
    sphere_points: int | None = None  # None: per-dimension default
    mc_samples: int = 1_000_000
    seed: int = 42
    rtol: float = 1e-10
    atol: float = 1e-14

    def __post_init__(self):
        if self.sphere_points is not None and self.sphere_points < 1:
            raise ValueError("sphere_points must be >= 1")
        if self.mc_samples < 1:
            raise ValueError("mc_samples must be >= 1")
        if not (self.rtol > 0 and self.atol > 0):
            raise ValueError("tolerances must be positive")


@dataclass(frozen=True)
class CompactnessCertificate:
    m: float
    radius: float
    feasible: bool
    warnings: tuple[str, ...] = ()


class EuclideanNorm:
    """``f(x) = ||x||_2``: positively homogeneous of degree 1; G is the unit ball."""

    d = 1

    def __init__(self, n: int):
        self.n = int(n)

    def evaluate(self, points) -> np.ndarray:
        pts = np.asarray(points, dtype=float)
        return np.sqrt(np.sum(pts * pts, axis=1))

    def __repr__(self):
        return f"EuclideanNorm(n={self.n})"


class PositivelyHomogeneous:
    """Wrap a vectorised callable ``func(points) -> values`` with its degree."""

    def __init__(self, n: int, d: float, func):
        if d <= 0:
            raise ValueError("degree must be positive")
        self.n, self.d, self._func = int(n), float(d), func

    def evaluate(self, points) -> np.ndarray:
        return np.asarray(self._func(np.asarray(points, dtype=float)), dtype=float)


BUILTINS = {"euclidean-norm": EuclideanNorm}


def ball_moment(alpha: Iterable[int]) -> float:
    """Closed-form moment of the Euclidean unit ball."""
    alpha = tuple(alpha)
    if any(a % 2 for a in alpha):
        return 0.0
    n, k = len(alpha), sum(alpha)
    sphere = 2.0 * np.prod([gamma((a + 1) / 2) for a in alpha]) / gamma((n + k) / 2)
    return float(sphere / (n + k))


# -- moment containers ------------------------------------------------------

@dataclass(frozen=True)
class MomentVector:
    """Moments keyed by multi-index, with optional standard errors.

    ``zero_axes`` lists coordinates in which the underlying set is symmetric;
    absent moments that are odd in one of them read as exact zeros. Any other
    absent moment is missing.
    """

    n: int
    values: Mapping[MultiIndex, float]
    stderrs: Mapping[MultiIndex, float | None] = field(default_factory=dict)
    provenance: str = "external"
    zero_axes: tuple[int, ...] = ()

    def __post_init__(self):
        if self.provenance not in PROVENANCES:
            raise ParseError(f"unknown provenance {self.provenance!r}")
        vals = {as_multi_index(a, self.n): float(v) for a, v in self.values.items()}
        errs = {as_multi_index(a, self.n): (None if e is None else float(e))
                for a, e in self.stderrs.items()}
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "stderrs", errs)
        object.__setattr__(self, "zero_axes", tuple(sorted(set(int(i) for i in self.zero_axes))))
        if any(not 0 <= i < self.n for i in self.zero_axes):
            raise ParseError(f"zero_axes {self.zero_axes} out of range for n={self.n}")

    def _zero_by_symmetry(self, alpha) -> bool:
        return any(alpha[i] % 2 for i in self.zero_axes)

    def __contains__(self, alpha) -> bool:
        alpha = tuple(alpha)
        return alpha in self.values or (len(alpha) == self.n and self._zero_by_symmetry(alpha))

    def __getitem__(self, alpha) -> float:
        alpha = tuple(alpha)
        if alpha in self.values:
            return self.values[alpha]
        if len(alpha) == self.n and self._zero_by_symmetry(alpha):
            return 0.0
        raise MissingMoment([alpha])

    def __len__(self):
        return len(self.values)

    def stderr(self, alpha) -> float | None:
        return self.stderrs.get(tuple(alpha))

    def missing(self, indices: Iterable) -> list[MultiIndex]:
        return [tuple(a) for a in indices if tuple(a) not in self]

    def vector(self, indices: Iterable) -> np.ndarray:
        indices = [tuple(a) for a in indices]
        missing = self.missing(indices)
        if missing:
            raise MissingMoment(missing)
        return np.array([self[a] for a in indices])

    def orders(self) -> list[int]:
        return sorted({degree(a) for a in self.values})

    def without(self, *alphas) -> "MomentVector":
        drop = {tuple(a) for a in alphas}
        return MomentVector(self.n, {a: v for a, v in self.values.items() if a not in drop},
                            {a: e for a, e in self.stderrs.items() if a not in drop},
                            self.provenance, self.zero_axes)

    def _sorted_keys(self):
        return sorted(self.values, key=lambda a: (degree(a), tuple(-x for x in a)))

    def to_dict(self) -> dict:
        out = {"n": self.n,
               "moments": [{"alpha": list(a), "value": self.values[a],
                            "stderr": self.stderrs.get(a)} for a in self._sorted_keys()],
               "provenance": self.provenance}
        if self.zero_axes:
            out["zero_by_symmetry"] = list(self.zero_axes)
        return out

    def to_json(self) -> str:
        """JSON text with one moment per line."""
        data = self.to_dict()
        rows = ",\n  ".join(json.dumps(r) for r in data.pop("moments"))
        tail = "".join(f", {json.dumps(k)}: {json.dumps(v)}" for k, v in data.items() if k != "n")
        return f'{{"n": {self.n}, "moments": [\n  {rows}\n ]{tail}}}'

    @classmethod
    def from_dict(cls, data: Mapping) -> "MomentVector":
        try:
            n, rows = data["n"], data["moments"]
        except (KeyError, TypeError):
            raise ParseError("moment JSON needs keys 'n' and 'moments'") from None
        if not isinstance(n, int) or n < 1:
            raise ParseError("'n' must be a positive integer")
        values, errs = {}, {}
        for row in rows:
            try:
                alpha, value = as_multi_index(row["alpha"], n), row["value"]
            except (KeyError, TypeError):
                raise ParseError(f"bad moment row {row!r}") from None
            if alpha in values:
                raise ParseError(f"duplicate moment {alpha}")
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ParseError(f"moment value for {alpha} must be a number")
            values[alpha] = float(value)
            errs[alpha] = row.get("stderr")
        return cls(n, values, errs, data.get("provenance", "external"),
                   tuple(data.get("zero_by_symmetry", ())))

    @classmethod
    def from_json(cls, text: str) -> "MomentVector":
        try:
            return cls.from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc}") from None

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow([f"a{i + 1}" for i in range(self.n)] + ["value", "stderr"])
        for a in self._sorted_keys():
            e = self.stderrs.get(a)
            writer.writerow(list(a) + [repr(self.values[a]), "" if e is None else repr(e)])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, provenance: str = "external") -> "MomentVector":
        rows = list(csv.reader(io.StringIO(text)))
        if not rows:
            raise ParseError("empty CSV")
        n = len(rows[0]) - 2
        try:
            values = {tuple(int(x) for x in r[:n]): float(r[n]) for r in rows[1:]}
            errs = {tuple(int(x) for x in r[:n]): (float(r[n + 1]) if r[n + 1] else None)
                    for r in rows[1:]}
        except (ValueError, IndexError):
            raise ParseError("malformed moment CSV") from None
        return cls(n, values, errs, provenance)


# -- compactness ---------------------------------------------------------------

def min_on_sphere(f, cfg: QuadratureConfig | None = None, starts: int = 8) -> CompactnessCertificate:
    """Minimum of ``f`` on the unit sphere and the implied bounding radius of G.

    Dense sampling on a sphere rule picks the ``starts`` lowest nodes; each is
    refined by BFGS on ``y -> f(y / ||y||)``. Since ``f(x) >= ||x||^d * m``,
    every point of G satisfies ``||x|| <= m^(-1/d)``.
    """
    cfg = cfg or QuadratureConfig()
    n, d = f.n, f.d
    pts = sphere_rule(n, min(cfg.sphere_points or 4096, 4096)).points()
    vals = f.evaluate(pts)
    m = float(np.min(vals))
    if n > 1 and np.isfinite(m):
        def objective(y):
            r = np.linalg.norm(y)
            if r == 0:
                return np.inf
            return float(f.evaluate((y / r)[None, :])[0])

        for i in np.argsort(vals, kind="stable")[:starts]:
            res = minimize(objective, pts[i], method="BFGS", options={"gtol": 1e-12})
            if np.isfinite(res.fun) and res.fun < m:
                m = float(res.fun)
    notes = []
    feasible = bool(np.isfinite(m) and m > FEASIBILITY_TOL)
    radius = m ** (-1.0 / d) if feasible else np.inf
    if feasible and m < NEAR_DEGENERATE_MIN:
        notes.append(f"minimum on the unit sphere is {m:.3g}: level set is nearly unbounded, "
                     "expect poor conditioning")
    return CompactnessCertificate(m, radius, feasible, tuple(notes))


def _require_compact(f, cfg, certificate):
    cert = certificate if certificate is not None else min_on_sphere(f, cfg)
    if not cert.feasible:
        raise NotCompact(f"level set {{x : g(x) <= 1}} is not compact: "
                         f"min of g on the unit sphere is {cert.m:.6g} <= {FEASIBILITY_TOL:g}")
    return cert


def _indices_for(n: int, orders: Iterable[int]) -> list[MultiIndex]:
    return [a for k in sorted(set(int(o) for o in orders)) for a in enumerate_degree(n, k)]


# -- radial engine -------------------------------------------------------------

def _radial_integrals(f, alphas: list[MultiIndex], k: int, cfg: QuadratureConfig) -> np.ndarray:
    """``int_G x^alpha f(x)^k dx`` for every alpha, via the spherical form."""
    n, d = f.n, f.d
    rule = sphere_rule(n, cfg.sphere_points)
    exps = np.array(alphas, dtype=np.int64).reshape(-1, n)
    degs = exps.sum(axis=1)
    groups = [(int(s), np.flatnonzero(degs == s)) for s in np.unique(degs)]

    def block(points, weights):
        fv = f.evaluate(points)
        out = np.empty(len(alphas))
        for s, idx in groups:
            p = n + s + k * d
            # int_0^{f^{-1/d}} r^{p-1} dr = f^{-p/d} / p, times the f^k = r^{kd} f(theta)^k factor
            radial = np.power(fv, -p / d) / p
            if k:
                radial = radial * np.power(fv, k)
            out[idx] = kernels.weighted_monomial_sums(points, weights * radial, exps[idx])
        return out

    return rule.integrate(block)


def moment_radial(f, alpha, cfg: QuadratureConfig | None = None, certificate=None) -> float:
    cfg = cfg or QuadratureConfig()
    _require_compact(f, cfg, certificate)
    alpha = as_multi_index(alpha, f.n)
    return float(_radial_integrals(f, [alpha], 0, cfg)[0])


def moments_radial_upto(f, orders: Iterable[int], cfg: QuadratureConfig | None = None,
                        certificate=None) -> MomentVector:
    """All moments with ``|alpha|`` in ``orders`` from a single pass over the sphere nodes."""
    cfg = cfg or QuadratureConfig()
    _require_compact(f, cfg, certificate)
    alphas = _indices_for(f.n, orders)
    vals = _radial_integrals(f, alphas, 0, cfg)
    return MomentVector(f.n, dict(zip(alphas, vals.tolist())),
                        {a: None for a in alphas}, "radial-quadrature")


# -- Monte Carlo engine --------------------------------------------------------

class _MCSums(NamedTuple):
    volume: float
    accepted: int
    first: np.ndarray
    second: np.ndarray


def _mc_sums(f, exps: np.ndarray, weight_power: int, cfg: QuadratureConfig, radius: float) -> _MCSums:
    n = f.n
    rng = np.random.Generator(np.random.Philox(cfg.seed))
    first = np.zeros(exps.shape[0])
    second = np.zeros(exps.shape[0])
    accepted = 0
    remaining = cfg.mc_samples
    while remaining > 0:
        size = min(_MC_CHUNK, remaining)
        remaining -= size
        x = rng.uniform(-radius, radius, size=(size, n))
        fv = f.evaluate(x)
        mask = fv <= 1.0
        xa = np.ascontiguousarray(x[mask])
        accepted += xa.shape[0]
        if not xa.shape[0]:
            continue
        w = np.power(fv[mask], weight_power) if weight_power else np.ones(xa.shape[0])
        first += kernels.weighted_monomial_sums(xa, w, exps)
        second += kernels.weighted_monomial_sums(xa, w * w, 2 * exps)
    if accepted == 0 or accepted < MIN_ACCEPTANCE * cfg.mc_samples:
        raise DegenerateSampling(f"only {accepted} of {cfg.mc_samples} samples landed in G")
    return _MCSums((2.0 * radius) ** n, accepted, first, second)


def _mc_estimate(sums: _MCSums, N: int):
    mean = sums.volume * sums.first / N
    if N < 2:
        return mean, [None] * len(mean)
    var = (sums.volume ** 2 * sums.second / N - mean * mean) * N / (N - 1)
    return mean, np.sqrt(np.maximum(var, 0.0) / N).tolist()


def moments_mc(f, orders: Iterable[int], cfg: QuadratureConfig | None = None,
               certificate=None) -> MomentVector:
    """Rejection-sampling estimates with per-entry standard errors."""
    cfg = cfg or QuadratureConfig()
    cert = _require_compact(f, cfg, certificate)
    alphas = _indices_for(f.n, orders)
    exps = np.array(alphas, dtype=np.int64).reshape(-1, f.n)
    sums = _mc_sums(f, exps, 0, cfg, cert.radius)
    mean, err = _mc_estimate(sums, cfg.mc_samples)
    return MomentVector(f.n, dict(zip(alphas, mean.tolist())), dict(zip(alphas, err)), "monte-carlo")


# -- homogeneity identity ------------------------------------------------------

class LemmaCheck(NamedTuple):
    lhs: float
    rhs: float
    relerr: float


def lemma1_check(f, k: int, alpha, cfg: QuadratureConfig | None = None,
                 engine: str = "radial", certificate=None) -> LemmaCheck:
    """Compare ``int_G x^a f^k`` with ``(n+|a|)/(n+kd+|a|) * int_G x^a``.

    ``engine="radial"`` integrates both sides with the sphere rule;
    ``engine="mc"`` uses a common rejection sample for both.
    """
    cfg = cfg or QuadratureConfig()
    if k < 0:
        raise ValueError("k must be >= 0")
    cert = _require_compact(f, cfg, certificate)
    alpha = as_multi_index(alpha, f.n)
    n, d, s = f.n, f.d, degree(alpha)
    factor = (n + s) / (n + k * d + s)
    if k == 0:
        factor = 1.0
    if engine == "radial":
        lhs = float(_radial_integrals(f, [alpha], k, cfg)[0])
        base = float(_radial_integrals(f, [alpha], 0, cfg)[0])
    elif engine == "mc":
        exps = np.array([alpha], dtype=np.int64)
        lhs = float(_mc_estimate(_mc_sums(f, exps, k, cfg, cert.radius), cfg.mc_samples)[0][0])
        base = float(_mc_estimate(_mc_sums(f, exps, 0, cfg, cert.radius), cfg.mc_samples)[0][0])
    else:
        raise ValueError(f"unknown engine {engine!r}")
    rhs = factor * base
    relerr = abs(lhs - rhs) / max(abs(rhs), cfg.atol)
    return LemmaCheck(lhs, rhs, relerr)


def analytic_ball_moments(n: int, orders: Iterable[int]) -> MomentVector:
    """Exact moments of the unit ball (the level set of the Euclidean norm)."""
    alphas = _indices_for(n, orders)
    return MomentVector(n, {a: ball_moment(a) for a in alphas}, {}, "analytic",
                        zero_axes=tuple(range(n)))
