import numpy as np
import pytest

from radlie import numeric as nk
from radlie.errors import DimensionError, PreconditionError
from radlie.lie import (LieSubalgebra, cartan_subalgebra, center_lie, derived_series, normalizer,
                        is_ad_nilpotent_on, is_nilpotent_lie, is_solvable, make_lie_subalgebra,
                        minimal_vanishing_degree, nest_quotients, nilpotent_elements,
                        root_decomposition, solvable_radical)

from conftest import E


def lie(mats):
    return make_lie_subalgebra(mats)


def same_span(basis, mats):
    return nk.mutual_residual(basis, nk.span_basis(mats)) < 1e-10


SL2 = [E(0, 1, 2), E(1, 0, 2)]
BOREL2 = [E(0, 0, 2), E(1, 1, 2), E(0, 1, 2)]
HEIS = [E(0, 1, 3), E(0, 2, 3), E(1, 2, 3)]


def test_closure_examples():
    assert lie([E(0, 1, 2)]).dim == 1
    g = lie(SL2)
    assert g.dim == 3 and same_span(g.basis, SL2 + [np.diag([1, -1])])
    assert lie([E(0, 0, 2), E(0, 1, 2)]).dim == 2


def test_closure_dimension_cap():
    with pytest.raises(DimensionError):
        make_lie_subalgebra(SL2, max_dim=2)


def test_from_basis_checks_closure():
    with pytest.raises(PreconditionError):
        LieSubalgebra.from_basis(nk.span_basis(SL2))


def test_derived_series_and_solvability():
    assert [h.dim for h in derived_series(lie(BOREL2))] == [3, 1, 0]
    assert is_solvable(lie(BOREL2))
    assert not is_solvable(lie(SL2))
    assert is_solvable(lie([E(0, 0, 2), E(1, 1, 2)]))


def test_nilpotency_of_lie_algebras():
    assert is_nilpotent_lie(lie(HEIS))
    assert not is_nilpotent_lie(lie(BOREL2))
    assert is_nilpotent_lie(lie([E(0, 0, 2), E(1, 1, 2)]))


def test_solvable_radical_examples():
    assert solvable_radical(lie(SL2)).dim == 0
    assert solvable_radical(lie(BOREL2)).dim == 3
    r = solvable_radical(lie(SL2 + [np.eye(2)]))
    assert r.dim == 1 and same_span(r.basis, [np.eye(2)])


def test_solvable_radical_of_block_sum():
    # sl2 in the top-left block plus E34 in M_4
    emb = [np.pad(m, ((0, 2), (0, 2))) for m in SL2]
    r = solvable_radical(lie(emb + [E(2, 3, 4)]))
    assert same_span(r.basis, [E(2, 3, 4)])


def test_center():
    assert same_span(center_lie(lie(HEIS)), [E(0, 2, 3)])


def test_cartan_examples():
    # Cartan subalgebras are unique up to conjugacy; a random regular element
    # gives a unipotent conjugate of the diagonal
    g = lie(BOREL2)
    h = cartan_subalgebra(g, seed=0)
    assert h.dim == 2 and h.contains(np.eye(2))
    assert is_nilpotent_lie(h)
    assert nk.mutual_residual(normalizer(g, h.basis), h.basis) < 1e-10
    ab = lie([E(0, 0, 2), E(1, 1, 2)])
    assert cartan_subalgebra(ab, seed=0).dim == 2
    assert cartan_subalgebra(lie(HEIS), seed=0).dim == 3


def test_root_decomposition_borel():
    g = lie(BOREL2)
    h = cartan_subalgebra(g, seed=1)
    dec = root_decomposition(g, h, seed=1)
    assert len(dec.roots) == 1
    assert same_span(dec.roots[0].basis, [E(0, 1, 2)])
    assert same_span(dec.fitting_plus, [E(0, 1, 2)])
    # the root reads off h1 - h2 from the diagonal of x in h
    for x in h.basis:
        value = dec.roots[0].values @ h.coords(x)
        assert value == pytest.approx(x[0, 0] - x[1, 1])
    # ad I = 0, so the ad-nilpotent part holds the centre as well as E12
    assert dec.g0_is_subspace and same_span(dec.ad_nilpotent_part, [np.eye(2), E(0, 1, 2)])
    assert dec.g0_ideal_residual < 1e-10


def test_root_decomposition_of_abelian_and_diag_pair():
    ab = lie([E(0, 0, 2), E(1, 1, 2)])
    dec = root_decomposition(ab, cartan_subalgebra(ab, seed=0), seed=0)
    assert dec.roots == [] and dec.fitting_plus.shape[0] == 0
    g = lie([np.diag([1, -1]), E(0, 1, 2)])
    h = cartan_subalgebra(g, seed=0)
    dec = root_decomposition(g, h, seed=0)
    assert len(dec.roots) == 1 and same_span(dec.roots[0].basis, [E(0, 1, 2)])
    for x in h.basis:
        assert dec.roots[0].values @ h.coords(x) == pytest.approx(x[0, 0] - x[1, 1])


def test_non_solvable_g0_is_not_claimed():
    g = lie(SL2)
    dec = root_decomposition(g, cartan_subalgebra(g, seed=0), seed=0)
    assert dec.ad_nilpotent_part is None and not dec.g0_is_subspace
    assert len(dec.roots) == 2


def test_nest_quotients_heisenberg():
    nq = nest_quotients(lie(HEIS), E(0, 2, 3))
    assert nq.dims == (0, 2, 3)
    assert nq.image_dims() == [1, 0]


def test_nest_quotients_abelian():
    nq = nest_quotients(lie([E(0, 1, 2)]), E(0, 1, 2))
    assert nq.dims == (0, 1, 2) and nq.image_dims() == [0, 0]


def test_nest_quotients_requires_central_y():
    with pytest.raises(PreconditionError):
        nest_quotients(lie(HEIS), E(0, 1, 3))


def test_minimal_vanishing_degree_examples():
    assert minimal_vanishing_degree(lie([E(0, 1, 2)])) == 2
    assert minimal_vanishing_degree(lie(HEIS)) == 3
    with pytest.raises(PreconditionError):
        minimal_vanishing_degree(lie(BOREL2))


def test_minimal_vanishing_degree_conjugated(rng):
    p = rng.standard_normal((4, 4)) + 4 * np.eye(4)
    pinv = np.linalg.inv(p)
    mats = [p @ np.pad(m, ((0, 1), (0, 1))) @ pinv for m in HEIS]
    m = minimal_vanishing_degree(lie(mats))
    assert m == 3 and m <= 4


def test_ad_nilpotent_on_ideal():
    j = lie([E(0, 1, 2)])
    assert is_ad_nilpotent_on(E(0, 1, 2), j)
    assert not is_ad_nilpotent_on(np.diag([1, 0]), j)
    g = lie(HEIS)
    for x in g.basis:
        assert is_ad_nilpotent_on(x, g)


def test_nilpotent_elements():
    assert same_span(nilpotent_elements(lie(BOREL2)), [E(0, 1, 2)])
    assert nilpotent_elements(lie([E(0, 0, 3), E(1, 1, 3)])).shape[0] == 0
    borel3 = lie([E(i, j, 3) for i in range(3) for j in range(i, 3)])
    assert same_span(nilpotent_elements(borel3), [E(0, 1, 3), E(0, 2, 3), E(1, 2, 3)])
