"""Recover the coefficients of a homogeneous ``g`` from moments of ``{g <= 1}``.

For every multi-index ``alpha`` the identity

    sum_{|beta| = d} g_beta * lambda_{alpha+beta} = (n+|alpha|)/(n+d+|alpha|) * lambda_alpha

holds. Taking ``alpha`` over all degree-``d`` indices gives the symmetric
system ``M_d(lambda) g = (n+d)/(n+2d) lambda^(d)``; any other family of indices
gives a (possibly rectangular) alternative system.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy import linalg

from .errors import MissingMoment, NotCompact, ParseError, SingularMatrix, UnderdeterminedFamily
from .momentgen import MomentVector, QuadratureConfig, min_on_sphere, moments_mc, moments_radial_upto
from .polycore import GradedOrder, HomogeneousPolynomial, MultiIndex, as_multi_index, degree

CONDITION_LIMIT = 1e12  # above: SingularMatrix unless forced
CONDITION_WARN = 1e8  # above: ill-conditioning warning only


@dataclass(frozen=True)
class MomentMatrix:
    n: int
    d: int
    order: GradedOrder
    entries: np.ndarray

    @property
    def size(self) -> int:
        return len(self.order)


@dataclass(frozen=True)
class IndexFamily:
    n: int
    d: int
    indices: tuple[MultiIndex, ...]

    def __post_init__(self):
        object.__setattr__(self, "indices", tuple(as_multi_index(a, self.n) for a in self.indices))

    @classmethod
    def theorem(cls, n: int, d: int) -> "IndexFamily":
        return cls(n, d, GradedOrder(n, d).indices)

    @classmethod
    def from_dict(cls, data) -> "IndexFamily":
        try:
            return cls(int(data["n"]), int(data["d"]), tuple(data["indices"]))
        except (KeyError, TypeError, ValueError):
            raise ParseError("family JSON needs keys 'n', 'd', 'indices'") from None

    @classmethod
    def from_json(cls, text: str) -> "IndexFamily":
        try:
            return cls.from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc}") from None

    def to_dict(self) -> dict:
        return {"n": self.n, "d": self.d, "indices": [list(a) for a in self.indices]}


@dataclass(frozen=True)
class RecoveryReport:
    polynomial: HomogeneousPolynomial
    residual: float
    condition: float
    method: str
    warnings: tuple[str, ...] = ()
    solver: str = ""

    @property
    def coefficients(self) -> np.ndarray:
        return self.polynomial.vector()

    def to_dict(self) -> dict:
        order = GradedOrder(self.polynomial.n, self.polynomial.d)
        return {
            "n": self.polynomial.n,
            "d": self.polynomial.d,
            "alphas": [list(a) for a in order],
            "coefficients": self.coefficients.tolist(),
            "residual": self.residual,
            "condition": self.condition if np.isfinite(self.condition) else None,
            "method": self.method,
            "solver": self.solver,
            "warnings": list(self.warnings),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def build_moment_matrix(moments: MomentVector, n: int, d: int) -> MomentMatrix:
    """``M[alpha, beta] = lambda_{alpha+beta}`` over degree-``d`` indices in graded order."""
    order = GradedOrder(n, d)
    idx = order.indices
    sums = {tuple(a + b for a, b in zip(al, be)) for al in idx for be in idx}
    missing = sorted(moments.missing(sums), key=lambda a: tuple(-x for x in a))
    if missing:
        raise MissingMoment(missing)
    size = len(idx)
    M = np.empty((size, size))
    for i, al in enumerate(idx):
        for j in range(i, size):
            M[i, j] = M[j, i] = moments[tuple(a + b for a, b in zip(al, idx[j]))]
    return MomentMatrix(n, d, order, M)


def condition_report(M: MomentMatrix | np.ndarray) -> float:
    """2-norm condition number of the symmetric moment matrix (``inf`` if not positive definite)."""
    A = M.entries if isinstance(M, MomentMatrix) else np.asarray(M, dtype=float)
    eig = linalg.eigvalsh(A)
    lo, hi = eig[0], np.max(np.abs(eig))
    if lo <= 0 or hi == 0:
        return float("inf")
    return float(hi / lo)


def _system_condition(A: np.ndarray) -> float:
    if not np.all(np.isfinite(A)):
        return float("inf")
    s = linalg.svdvals(A)
    return float("inf") if s[-1] == 0 else float(s[0] / s[-1])


def _check_condition(kappa: float, force: bool, what: str) -> list[str]:
    if kappa > CONDITION_LIMIT:
        msg = f"{what} condition number {kappa:.3g} exceeds {CONDITION_LIMIT:g}"
        if not force:
            raise SingularMatrix(msg, kappa)
        return [msg + "; solution may be inaccurate"]
    if kappa > CONDITION_WARN:
        return [f"{what} is ill-conditioned (condition number {kappa:.3g})"]
    return []


def _relative_residual(A, x, b) -> float:
    nb = np.linalg.norm(b)
    r = np.linalg.norm(A @ x - b)
    return float(r / nb) if nb > 0 else float(r)


def _require_even(d: int):
    if d < 2 or d % 2:
        raise ValueError(f"recovery needs an even degree d >= 2 (compact level set), got d={d}")


def recover_theorem(moments: MomentVector, n: int, d: int, force: bool = False) -> RecoveryReport:
    """Solve ``M_d(lambda) g = (n+d)/(n+2d) lambda^(d)`` by Cholesky factorisation."""
    _require_even(d)
    order = GradedOrder(n, d)
    missing = moments.missing(order.indices)
    try:
        M = build_moment_matrix(moments, n, d)
    except MissingMoment as exc:
        raise MissingMoment(missing + exc.missing) from None
    if missing:
        raise MissingMoment(missing)
    rhs = (n + d) / (n + 2 * d) * moments.vector(order.indices)
    kappa = condition_report(M)
    notes = _check_condition(kappa, force, "moment matrix")
    try:
        g = linalg.cho_solve(linalg.cho_factor(M.entries), rhs)
        solver = "cholesky"
    except linalg.LinAlgError:
        if not force:
            raise SingularMatrix("moment matrix is not positive definite", kappa) from None
        g = linalg.lstsq(M.entries, rhs)[0]
        solver = "lstsq"
        notes.append("Cholesky factorisation failed; used least squares")
    poly = HomogeneousPolynomial.from_vector(n, d, g)
    return RecoveryReport(poly, _relative_residual(M.entries, g, rhs), kappa,
                          "theorem", tuple(notes), solver)


def family_system(moments: MomentVector, fam: IndexFamily) -> tuple[np.ndarray, np.ndarray]:
    """Rows ``[lambda_{alpha+beta}]_beta`` and right-hand sides for each ``alpha`` in the family."""
    n, d = fam.n, fam.d
    betas = GradedOrder(n, d).indices
    needed = []
    for al in fam.indices:
        needed.append(al)
        needed.extend(tuple(a + b for a, b in zip(al, be)) for be in betas)
    missing = list(dict.fromkeys(moments.missing(needed)))
    if missing:
        raise MissingMoment(missing)
    A = np.array([[moments[tuple(a + b for a, b in zip(al, be))] for be in betas]
                  for al in fam.indices])
    rhs = np.array([(n + degree(al)) / (n + d + degree(al)) * moments[al] for al in fam.indices])
    return A, rhs


def _check_family_size(fam: IndexFamily):
    need = len(GradedOrder(fam.n, fam.d))
    if len(fam.indices) < need:
        raise UnderdeterminedFamily(
            f"family has {len(fam.indices)} indices but {need} coefficients are unknown")


def recover_family(moments: MomentVector, fam: IndexFamily | None = None,
                   n: int | None = None, d: int | None = None, force: bool = False) -> RecoveryReport:
    """Recover ``g`` from the equations generated by an index family.

    Square systems are solved by LU; taller ones in the least-squares sense.
    Defaults to the degree-``d`` family when ``fam`` is omitted.
    """
    if fam is None:
        if n is None or d is None:
            raise ValueError("give either a family or both n and d")
        fam = IndexFamily.theorem(n, d)
    _require_even(fam.d)
    _check_family_size(fam)
    A, rhs = family_system(moments, fam)
    kappa = _system_condition(A)
    notes = _check_condition(kappa, force, "family system")
    if A.shape[0] == A.shape[1] and np.isfinite(kappa):
        g = linalg.lu_solve(linalg.lu_factor(A), rhs)
        method, solver = "family", "lu"
    else:
        g = linalg.lstsq(A, rhs)[0]
        method, solver = ("family" if A.shape[0] == A.shape[1] else "least-squares"), "lstsq"
    poly = HomogeneousPolynomial.from_vector(fam.n, fam.d, g)
    return RecoveryReport(poly, _relative_residual(A, g, rhs), kappa, method, tuple(notes), solver)


def recover_least_squares(moments: MomentVector, fam: IndexFamily,
                          weights: Sequence[float] | None = None,
                          force: bool = False) -> RecoveryReport:
    """Weighted least-squares solve of the family system.

    ``weights`` holds one nonnegative weight per family index (typically the
    inverse noise level of that equation); rows are scaled by it.
    """
    _require_even(fam.d)
    _check_family_size(fam)
    A, rhs = family_system(moments, fam)
    if weights is not None:
        w = np.asarray(weights, dtype=float)
        if w.shape != (len(fam.indices),) or np.any(w < 0):
            raise ValueError("weights must be one nonnegative value per family index")
        Aw, bw = A * w[:, None], rhs * w
    else:
        Aw, bw = A, rhs
    kappa = _system_condition(Aw)
    notes = _check_condition(kappa, force, "least-squares system")
    g, *_ = linalg.lstsq(Aw, bw)
    poly = HomogeneousPolynomial.from_vector(fam.n, fam.d, g)
    return RecoveryReport(poly, _relative_residual(Aw, g, bw), kappa, "least-squares",
                          tuple(notes), "lstsq")


def roundtrip(p: HomogeneousPolynomial, cfg: QuadratureConfig | None = None,
              engine: str = "radial", force: bool = False) -> tuple[RecoveryReport, float]:
    """Forward moments of orders ``d`` and ``2d``, then recover; returns the max coefficient error."""
    cfg = cfg or QuadratureConfig()
    _require_even(p.d)
    cert = min_on_sphere(p, cfg)
    if not cert.feasible:
        raise NotCompact(f"level set of {p} is not compact (min on sphere {cert.m:.6g})")
    forward = {"radial": moments_radial_upto, "mc": moments_mc}[engine]
    moments = forward(p, [p.d, 2 * p.d], cfg, certificate=cert)
    report = recover_theorem(moments, p.n, p.d, force=force)
    if cert.warnings:
        report = RecoveryReport(report.polynomial, report.residual, report.condition,
                                report.method, cert.warnings + report.warnings, report.solver)
    err = float(np.max(np.abs(report.coefficients - p.vector())))
    return report, err
