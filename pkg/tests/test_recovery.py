import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from levelset import (HomogeneousPolynomial, MissingMoment, MomentVector, QuadratureConfig,
                      SingularMatrix, UnderdeterminedFamily, moments_radial_upto)
from levelset.polycore import enumerate_degree
from levelset.recovery import (IndexFamily, build_moment_matrix, condition_report, family_system,
                               recover_family, recover_least_squares, recover_theorem, roundtrip)

from oracles import random_spd

PI = math.pi
DISK_M = np.array([[PI / 8, 0, PI / 24], [0, PI / 24, 0], [PI / 24, 0, PI / 8]])


def symbolic_moments(n, orders):
    """Distinct placeholder value per index so matrix layouts can be read back."""
    idx = [a for k in orders for a in enumerate_degree(n, k)]
    return MomentVector(n, {a: float(i + 1) for i, a in enumerate(idx)}), idx


def test_disk_moment_matrix(disk_moments):
    M = build_moment_matrix(disk_moments, 2, 2)
    np.testing.assert_allclose(M.entries, DISK_M, rtol=1e-15, atol=0)
    assert M.order.indices == ((2, 0), (1, 1), (0, 2))


def test_symbolic_layout_d4():
    mv, _ = symbolic_moments(2, [8])
    M = build_moment_matrix(mv, 2, 4)
    assert M.entries[0, 0] == mv[(8, 0)]
    assert M.entries[0, 4] == mv[(4, 4)]
    assert M.entries[1, 3] == mv[(4, 4)]
    assert M.entries[4, 4] == mv[(0, 8)]
    assert np.array_equal(M.entries, M.entries.T)


def test_missing_moment_named(disk_moments):
    with pytest.raises(MissingMoment) as exc:
        build_moment_matrix(disk_moments.without((4, 0)), 2, 2)
    assert exc.value.missing == [(4, 0)]
    with pytest.raises(MissingMoment) as exc:
        recover_theorem(disk_moments.without((4, 0), (2, 0)), 2, 2)
    assert set(exc.value.missing) == {(4, 0), (2, 0)}


def test_recover_theorem_disk(disk_moments):
    rep = recover_theorem(disk_moments, 2, 2)
    assert np.max(np.abs(rep.coefficients - [1, 0, 1])) <= 1e-12
    assert rep.method == "theorem"
    assert rep.residual < 1e-14
    assert rep.condition == pytest.approx(4.0, rel=1e-12)


def test_recover_theorem_needs_even_degree(disk_moments):
    with pytest.raises(ValueError):
        recover_theorem(disk_moments, 2, 1)


def _cramer3(A, b):
    det = np.linalg.det
    D = det(A)
    out = []
    for k in range(3):
        Ak = A.copy()
        Ak[:, k] = b
        out.append(det(Ak) / D)
    return np.array(out)


def test_cramer_matches_factorisation(asymmetric):
    mv = moments_radial_upto(asymmetric, [2, 4])
    M = build_moment_matrix(mv, 2, 2).entries
    rhs = (2 + 2) / (2 + 4) * mv.vector(enumerate_degree(2, 2))
    rep = recover_theorem(mv, 2, 2)
    np.testing.assert_allclose(rep.coefficients, _cramer3(M, rhs), rtol=0, atol=1e-12)


def test_quartic_roundtrip(quartic):
    rep, err = roundtrip(quartic)
    assert err <= 1e-8
    np.testing.assert_allclose(rep.coefficients, [1, 0, 0, 0, 1], atol=1e-8)


@pytest.mark.parametrize("c", [0.5, 4.0])
def test_scaled_polynomial_recovered(quartic, c):
    rep, _ = roundtrip(quartic.scale(c))
    np.testing.assert_allclose(rep.coefficients, c * quartic.vector(), atol=1e-8 * c)


def test_roundtrip_examples(disk):
    assert roundtrip(disk)[1] <= 1e-10
    q = HomogeneousPolynomial(2, 4, {(4, 0): 1, (2, 2): 1, (0, 4): 1})
    assert roundtrip(q)[1] <= 1e-8


@pytest.mark.parametrize("seed", range(6))
def test_roundtrip_random_psd(seed):
    rng = np.random.default_rng(100 + seed)
    n = 2 + seed % 3
    p = HomogeneousPolynomial.from_quadratic_form(random_spd(rng, n))
    rep, err = roundtrip(p)
    assert err <= 1e-6
    assert rep.residual < 1e-10


def test_roundtrip_noncompact():
    from levelset import NotCompact
    with pytest.raises(NotCompact):
        roundtrip(HomogeneousPolynomial(2, 2, {(2, 0): 1, (0, 2): -1}))


# -- family systems ------------------------------------------------------------

def test_family_layout_d2():
    mv, _ = symbolic_moments(2, [0, 1, 2, 3])
    fam = IndexFamily(2, 2, [(0, 0), (1, 0), (0, 1)])
    A, rhs = family_system(mv, fam)
    lam = mv.__getitem__
    expected = [[lam((2, 0)), lam((1, 1)), lam((0, 2))],
                [lam((3, 0)), lam((2, 1)), lam((1, 2))],
                [lam((2, 1)), lam((1, 2)), lam((0, 3))]]
    assert A.tolist() == expected
    np.testing.assert_allclose(rhs, [2 / 4 * lam((0, 0)), 3 / 5 * lam((1, 0)), 3 / 5 * lam((0, 1))])


def test_family_layout_d4():
    mv, _ = symbolic_moments(2, range(7))
    fam = IndexFamily(2, 4, [(0, 0), (1, 0), (0, 1), (2, 0), (0, 2)])
    A, rhs = family_system(mv, fam)
    lam = mv.__getitem__
    assert A[0].tolist() == [lam(a) for a in enumerate_degree(2, 4)]
    assert A[1].tolist() == [lam(a) for a in [(5, 0), (4, 1), (3, 2), (2, 3), (1, 4)]]
    assert A[2].tolist() == [lam(a) for a in [(4, 1), (3, 2), (2, 3), (1, 4), (0, 5)]]
    assert A[3].tolist() == [lam(a) for a in [(6, 0), (5, 1), (4, 2), (3, 3), (2, 4)]]
    assert A[4].tolist() == [lam(a) for a in [(4, 2), (3, 3), (2, 4), (1, 5), (0, 6)]]
    n = 2
    factors = [n / (n + 4), (n + 1) / (n + 5), (n + 1) / (n + 5), (n + 2) / (n + 6), (n + 2) / (n + 6)]
    np.testing.assert_allclose(rhs, [f * lam(a) for f, a in zip(factors, fam.indices)])


def test_family_singular_for_disk(disk_moments):
    fam = IndexFamily(2, 2, [(0, 0), (1, 0), (0, 1)])
    A, _ = family_system(disk_moments, fam)
    assert np.all(A[1:] == 0)
    with pytest.raises(SingularMatrix):
        recover_family(disk_moments, fam)


def test_odd_degree_rows_vanish_for_any_even_form(asymmetric):
    # g(-x) = g(x) for even d, so every odd-order moment of G is zero
    mv = moments_radial_upto(asymmetric, [0, 1, 2, 3])
    A, rhs = family_system(mv, IndexFamily(2, 2, [(0, 0), (1, 0), (0, 1)]))
    assert np.all(A[1:] == 0) and np.all(rhs[1:] == 0)


def test_even_family_matches_theorem(asymmetric):
    mv = moments_radial_upto(asymmetric, [0, 2, 4])
    rep = recover_family(mv, IndexFamily(2, 2, [(0, 0), (2, 0), (0, 2)]))
    ref = recover_theorem(mv, 2, 2)
    assert rep.method == "family"
    np.testing.assert_allclose(rep.coefficients, ref.coefficients, atol=1e-8)
    np.testing.assert_allclose(rep.coefficients, [2, 1, 1], atol=1e-10)


def test_default_family_is_theorem(asymmetric):
    mv = moments_radial_upto(asymmetric, [2, 4])
    rep = recover_family(mv, n=2, d=2)
    ref = recover_theorem(mv, 2, 2)
    np.testing.assert_allclose(rep.coefficients, ref.coefficients, rtol=0, atol=1e-12)


def test_underdetermined_family(disk_moments):
    with pytest.raises(UnderdeterminedFamily):
        recover_family(disk_moments, IndexFamily(2, 2, [(0, 0), (2, 0)]))
    with pytest.raises(UnderdeterminedFamily):
        recover_least_squares(disk_moments, IndexFamily(2, 2, [(0, 0), (2, 0)]))


def test_family_missing_moment(disk_moments):
    with pytest.raises(MissingMoment) as exc:
        recover_family(disk_moments, IndexFamily(2, 2, [(0, 0), (2, 0), (3, 0)]))
    assert (5, 0) in exc.value.missing


def test_family_json():
    fam = IndexFamily.from_json('{"n": 2, "d": 2, "indices": [[0, 0], [1, 0], [0, 1]]}')
    assert fam.indices == ((0, 0), (1, 0), (0, 1))
    assert IndexFamily.from_dict(fam.to_dict()) == fam


# -- least squares -------------------------------------------------------------

def test_least_squares_square_matches_theorem(disk_moments):
    fam = IndexFamily.theorem(2, 2)
    ls = recover_least_squares(disk_moments, fam)
    th = recover_theorem(disk_moments, 2, 2)
    np.testing.assert_allclose(ls.coefficients, th.coefficients, rtol=0, atol=1e-12)
    assert ls.method == "least-squares"


def test_least_squares_noisy_overdetermined(disk_moments):
    rng = np.random.default_rng(2024)
    noisy = MomentVector(2, {a: v + 1e-6 * rng.standard_normal() for a, v in disk_moments.values.items()})
    fam = IndexFamily(2, 2, enumerate_degree(2, 0) + enumerate_degree(2, 2))
    rep = recover_least_squares(noisy, fam)
    assert np.max(np.abs(rep.coefficients - [1, 0, 1])) <= 1e-3
    rep_w = recover_least_squares(noisy, fam, weights=[1.0, 2.0, 2.0, 2.0])
    assert np.max(np.abs(rep_w.coefficients - [1, 0, 1])) <= 1e-3
    with pytest.raises(ValueError):
        recover_least_squares(noisy, fam, weights=[1.0, 2.0])


def test_overdetermined_family_flags_method(disk_moments):
    fam = IndexFamily(2, 2, enumerate_degree(2, 0) + enumerate_degree(2, 2))
    rep = recover_family(disk_moments, fam)
    assert rep.method == "least-squares"
    np.testing.assert_allclose(rep.coefficients, [1, 0, 1], atol=1e-12)


# -- conditioning --------------------------------------------------------------

def test_condition_disk(disk_moments):
    assert condition_report(build_moment_matrix(disk_moments, 2, 2)) == pytest.approx(4.0, rel=1e-12)
    np.testing.assert_allclose(np.linalg.eigvalsh(DISK_M), sorted([PI / 6, PI / 24, PI / 12]))


def test_condition_identity():
    assert condition_report(2.5 * np.eye(4)) == 1.0


def test_thin_ellipse_singular_policy():
    p = HomogeneousPolynomial(2, 2, {(2, 0): 1.0, (0, 2): 1e7})
    mv = moments_radial_upto(p, [2, 4])
    kappa = condition_report(build_moment_matrix(mv, 2, 2))
    assert kappa > 1e12
    with pytest.raises(SingularMatrix) as exc:
        recover_theorem(mv, 2, 2)
    assert exc.value.condition == kappa
    rep = recover_theorem(mv, 2, 2, force=True)
    assert rep.warnings
    np.testing.assert_allclose(rep.coefficients, [1, 0, 1e7], rtol=1e-6, atol=1e-6)


def test_moderately_thin_ellipse_warns_only():
    p = HomogeneousPolynomial(2, 2, {(2, 0): 1.0, (0, 2): 1e6})
    rep, err = roundtrip(p)
    assert rep.warnings
    assert err <= 1e-6 * 1e6


def test_report_json(disk_moments):
    import json
    rep = recover_theorem(disk_moments, 2, 2)
    data = json.loads(rep.to_json())
    assert data["alphas"] == [[2, 0], [1, 1], [0, 2]]
    assert data["method"] == "theorem"
    assert data["condition"] == pytest.approx(4.0)


# -- matrix invariants ---------------------------------------------------------

@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000), st.sampled_from([(2, 2), (3, 2), (2, 4), (4, 2)]))
def test_moment_matrix_symmetric_psd(seed, nd):
    n, d = nd
    rng = np.random.default_rng(seed)
    if d == 2:
        p = HomogeneousPolynomial.from_quadratic_form(random_spd(rng, n))
    else:
        q = [HomogeneousPolynomial.from_vector(2, 2, rng.standard_normal(3)) for _ in range(2)]
        terms = {}
        for h in q:
            c = h.vector()
            sq = np.convolve(c, c)   # (a x^2 + b xy + c y^2)^2 in graded order
            for a, v in zip(enumerate_degree(2, 4), sq):
                terms[a] = terms.get(a, 0.0) + v
        terms[(4, 0)] += 0.2
        terms[(0, 4)] += 0.2
        p = HomogeneousPolynomial(2, 4, terms)
    mv = moments_radial_upto(p, [2 * d], QuadratureConfig(sphere_points=8192 if n > 2 else None))
    M = build_moment_matrix(mv, n, d).entries
    assert np.array_equal(M, M.T)
    assert np.linalg.eigvalsh(M)[0] >= -1e-10 * np.linalg.norm(M, 2)
