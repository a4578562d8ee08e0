import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from radlie import numeric as nk
from radlie.errors import DimensionError
from radlie.numeric import DEFAULT_TOL, TolerancePolicy

from conftest import E, rand_complex


def test_tolerance_policy_rejects_nonpositive():
    with pytest.raises(ValueError):
        TolerancePolicy(spec_tol=0.0)
    with pytest.raises(ValueError):
        TolerancePolicy(residual_tol=float("nan"))


def test_as_matrix_shape_checks():
    with pytest.raises(DimensionError):
        nk.as_matrix(np.zeros((2, 3)))
    assert nk.as_matrix([[1, 2], [3, 4]]).dtype == complex


def test_commutator_and_power():
    a, b = E(0, 1, 2), E(1, 0, 2)
    assert np.allclose(nk.commutator(a, b), np.diag([1, -1]))
    assert np.allclose(nk.mpow(a, 2), 0)
    assert np.allclose(nk.mpow(a, 0), np.eye(2))


def test_jordan_block_clusters_to_one_eigenvalue():
    j = np.eye(6, k=1) + 2 * np.eye(6)
    p = np.random.default_rng(1).standard_normal((6, 6)) + 3 * np.eye(6)
    m = p @ j @ np.linalg.inv(p)
    clusters = nk.spectral_clusters(m)
    assert len(clusters) == 1
    assert clusters[0].multiplicity == 6
    assert abs(clusters[0].mean - 2) < 1e-9


def test_close_semisimple_eigenvalues_stay_apart():
    # distinct eigenvalues 0.01 apart with strong coupling are not a Jordan block
    t = np.triu(np.ones((4, 4)), 1) * 0.5 + np.diag([0.0, 0.01, 0.02, 0.03])
    clusters = nk.spectral_clusters(t)
    assert len(clusters) == 4


def test_two_defective_groups_are_separated():
    blocks = [np.eye(3, k=1) + 0.1 * np.eye(3), np.eye(3, k=1) + 0.102 * np.eye(3)]
    m = np.zeros((6, 6), dtype=complex)
    m[:3, :3], m[3:, 3:] = blocks
    q = np.linalg.qr(rand_complex(np.random.default_rng(2), 6, 6))[0]
    clusters = nk.spectral_clusters(q @ m @ q.conj().T)
    assert sorted(c.multiplicity for c in clusters) == [3, 3]
    assert sorted(round(c.mean.real, 6) for c in clusters) == [0.1, 0.102]


def test_spectral_radius_of_nilpotent_is_zero():
    assert nk.spectral_radius(np.eye(5, k=1)) == pytest.approx(0, abs=1e-12)
    assert nk.spectral_radius(np.diag([3, -4])) == pytest.approx(4)


def test_nullspace_and_rank():
    m = np.array([[1, 2], [2, 4]], dtype=complex)
    ns = nk.nullspace(m)
    assert ns.shape == (2, 1)
    assert np.allclose(m @ ns, 0)
    assert nk.numerical_rank(m) == 1


def test_span_basis_orthonormal_and_membership():
    vecs = [E(0, 1, 3), E(0, 1, 3) + E(1, 2, 3), 2 * E(1, 2, 3)]
    b = nk.span_basis(vecs)
    assert b.shape[0] == 2
    gram = np.einsum("iab,jab->ij", b.conj(), b)
    assert np.allclose(gram, np.eye(2))
    assert nk.is_member(b, E(1, 2, 3))
    assert not nk.is_member(b, E(2, 0, 3))


def test_intersection_and_complement():
    u = nk.span_basis([E(0, 0, 2), E(0, 1, 2)])
    v = nk.span_basis([E(0, 1, 2), E(1, 1, 2)])
    inter = nk.intersection(u, v)
    assert inter.shape[0] == 1 and nk.is_member(inter, E(0, 1, 2))
    comp = nk.orthogonal_complement(inter, u)
    assert comp.shape[0] == 1 and nk.is_member(comp, E(0, 0, 2))


def test_generalized_eigenspaces_cover_space(rng):
    m = np.diag([1, 1, 2]) + E(0, 1, 3)
    spaces = nk.generalized_eigenspaces(m)
    dims = sorted((round(lam.real), v.shape[1]) for lam, v in spaces)
    assert dims == [(1, 2), (2, 1)]
    v1 = nk.generalized_eigenspace(m, 1.0)
    assert np.allclose(np.linalg.matrix_power(m - np.eye(3), 3) @ v1, 0)


def test_set_and_multiset_distances():
    assert nk.spectrum_set_distance([1, 2], [2, 1, 1]) == 0
    assert nk.multiset_distance([1, 2], [2, 1.5]) == pytest.approx(0.5)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(-5, 5), min_size=1, max_size=7), st.integers(0, 2**31))
def test_diagonalizable_clusters_match_exact_multiset(values, seed):
    rng = np.random.default_rng(seed)
    n = len(values)
    q = np.linalg.qr(rand_complex(rng, n, n))[0]
    m = q @ np.diag(np.array(values, dtype=complex)) @ q.conj().T
    got = sorted((round(c.mean.real, 6), c.multiplicity) for c in nk.spectral_clusters(m))
    want = sorted((float(v), values.count(v)) for v in set(values))
    assert got == want


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 6), st.integers(0, 2**31))
def test_nilpotent_power_detects_strictly_triangular(n, seed):
    rng = np.random.default_rng(seed)
    m = np.triu(rand_complex(rng, n, n), 1)
    assert nk.is_nilpotent_power(m, DEFAULT_TOL.residual_tol)
    assert not nk.is_nilpotent_power(m + np.eye(n), DEFAULT_TOL.residual_tol)
