import math

import numpy as np
import pytest
import scipy.linalg as sla
from hypothesis import given, settings, strategies as st

from radlie.errors import ContourError, PreconditionError
from radlie.spectral import (EXP, INV, LOG, Contour, auto_contour, exp_matrix, holo_calc,
                             horner_matrix, log_unipotent, polynomial, spectral_mapping_gap,
                             spectrum, submultiplicativity_check)

from conftest import E, rand_complex


def test_spectrum_examples():
    rep = spectrum(E(0, 1, 2))
    assert np.allclose(rep.eigenvalues, 0) and rep.spectral_radius == pytest.approx(0, abs=1e-12)
    assert spectrum(np.diag([3, -4])).spectral_radius == pytest.approx(4)
    rep = spectrum(np.diag([1, 2]) + E(0, 1, 2))
    assert sorted(rep.eigenvalues.real) == pytest.approx([1, 2])
    assert rep.spectral_radius == pytest.approx(2)


def test_auto_contour_examples():
    c = auto_contour(np.diag([1, 3]))
    assert c.center == pytest.approx(2) and c.radius == pytest.approx(1.5)
    assert auto_contour(np.zeros((2, 2))).radius >= 1e-3
    c = auto_contour(E(0, 1, 2))
    assert c.center == 0 and c.radius == pytest.approx(1e-3)


def test_contour_validation():
    with pytest.raises(ValueError):
        Contour(0, -1.0)
    with pytest.raises(ValueError):
        Contour(0, 1.0, nodes=48)


def test_holo_calc_examples():
    assert np.allclose(holo_calc(EXP, np.diag([0, 1])), np.diag([1, math.e]), atol=1e-12)
    assert np.allclose(holo_calc(polynomial([0, 0, 1]), E(0, 1, 2)), 0, atol=1e-12)
    assert np.allclose(holo_calc(EXP, E(0, 1, 2)), np.eye(2) + E(0, 1, 2), atol=1e-10)


def test_holo_calc_rejects_bad_contours():
    with pytest.raises(ContourError):
        holo_calc(EXP, np.diag([0, 5]), Contour(0, 1.0))
    with pytest.raises(ContourError):
        holo_calc(INV, np.diag([1, 2]), Contour(0, 3.0))
    with pytest.raises(ContourError):
        holo_calc(LOG, -np.eye(2), Contour(-1, 0.5))


def test_inverse_and_log_by_contour():
    a = np.diag([2.0, 3.0]) + E(0, 1, 2)
    inv = holo_calc(INV, a, Contour(2.5, 1.0))
    assert np.allclose(inv @ a, np.eye(2), atol=1e-9)
    log = holo_calc(LOG, a, Contour(2.5, 1.0))
    assert np.allclose(sla.expm(log), a, atol=1e-9)


def test_exp_cross_check_and_log_unipotent():
    a = np.array([[0.3, 1.0], [-0.2, 0.1]])
    assert np.allclose(exp_matrix(a, cross_check=True), sla.expm(a))
    n = E(0, 1, 3) + E(1, 2, 3)
    assert np.allclose(log_unipotent(np.eye(3) + n), n - n @ n / 2)
    with pytest.raises(PreconditionError):
        log_unipotent(np.diag([1, 2]))


def test_submultiplicativity_examples():
    res = submultiplicativity_check(E(0, 1, 2), E(0, 1, 2))
    assert res.holds and res.product_slack == pytest.approx(0, abs=1e-12)
    res = submultiplicativity_check(np.diag([1, 2]), np.diag([3, 4]))
    assert res.holds and res.product_slack == pytest.approx(0, abs=1e-12)
    with pytest.raises(PreconditionError):
        submultiplicativity_check(np.diag([1, 2]), np.eye(2) + E(0, 1, 2))


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 8), st.lists(st.floats(-2, 2), min_size=1, max_size=6), st.integers(0, 2**31))
def test_polynomial_contour_matches_horner(n, coeffs, seed):
    a = rand_complex(np.random.default_rng(seed), n, n) / math.sqrt(n)
    got = holo_calc(polynomial(coeffs), a)
    want = horner_matrix(coeffs, a)
    assert np.linalg.norm(got - want) <= 1e-9 * max(1.0, np.linalg.norm(want))


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 8), st.integers(0, 2**31))
def test_spectral_mapping_for_exp(n, seed):
    a = rand_complex(np.random.default_rng(seed), n, n) / math.sqrt(n)
    assert spectral_mapping_gap(np.exp, a, exp_matrix(a)) < 1e-7


def test_enclosing_circle_matches_brute_force(rng):
    from itertools import combinations

    from radlie.spectral import _circle_through, enclosing_circle

    for _ in range(40):
        pts = list(rand_complex(rng, int(rng.integers(1, 9))))
        c, r = enclosing_circle(pts)
        assert max(abs(p - c) for p in pts) <= r + 1e-12
        cands = [(p, 0.0) for p in pts]
        cands += [_circle_through(p, q) for p, q in combinations(pts, 2)]
        cands += [_circle_through(p, q, s) for p, q, s in combinations(pts, 3)]
        best = min(rad for cen, rad in cands
                   if all(abs(p - cen) <= rad + 1e-9 for p in pts))
        assert r == pytest.approx(best, rel=1e-9, abs=1e-12)


def test_auto_contour_ignores_eigenvalue_mean():
    a = np.diag([0, 0.1, 0.2, 0.3, 10]).astype(complex)
    c = auto_contour(a)
    assert c.center == pytest.approx(5.0) and c.radius == pytest.approx(7.5)
