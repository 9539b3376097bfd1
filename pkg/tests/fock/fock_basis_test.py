import numpy as np
import pytest

import covqed as cq
from covqed.fock import (FockBasis, LinOp, SectorSpec, commutator,
                         enumerate_basis, identity_op)


@pytest.fixture(scope='module')
def fermions():
    return FockBasis(SectorSpec(fermion_modes=['a', 'b', 'c']))


@pytest.fixture(scope='module')
def mixed():
    return FockBasis(SectorSpec(ghost_modes=[(1,), (-1,)], ghost_cutoff=2,
                                fermion_modes=['a', 'b']))


def test_dimension(mixed):
    assert mixed.dim == 3 ** 4 * 4
    assert mixed.occupations.shape == (6, mixed.dim)


def test_index_roundtrip(mixed):
    occupation = (1, 0, 2, 1, 0, 1)
    assert mixed.occupation(mixed.index(occupation)) == occupation


def test_vacuum(mixed):
    vac = mixed.vacuum()
    assert vac.amplitudes[0] == 1
    assert vac.physical_norm == pytest.approx(1.0)


def test_canonical_commutator_below_cutoff():
    basis = FockBasis(SectorSpec(photon_modes=['p'], photon_cutoff=3))
    a = basis.photon('p', 'lower')
    residual = commutator(a, a.dag()) - identity_op(basis.dim)
    assert np.allclose(residual.toarray()[:3, :3], 0)
    assert residual.toarray()[3, 3] == pytest.approx(-4)


def test_fermion_anticommutators(fermions):
    eye = np.eye(fermions.dim)
    for x in 'abc':
        for y in 'abc':
            bx = fermions.fermion_op(x, 'lower').toarray()
            by = fermions.fermion_op(y, 'raise').toarray()
            expected = eye if x == y else 0 * eye
            assert np.allclose(bx @ by + by @ bx, expected)
            bb = fermions.fermion_op(y, 'lower').toarray()
            assert np.allclose(bx @ bb + bb @ bx, 0)


def test_ghost_ladders_act_on_legs(mixed):
    q = mixed.spec.position('ghost', (1,), 'q')
    raised = mixed.a_R_star((1,)) @ mixed.vacuum()
    assert mixed.occupation(np.argmax(np.abs(raised.amplitudes)))[q] == 1
    assert np.allclose(mixed.a_Q((1,)).toarray(),
                       mixed.a_R_star((1,)).dag().toarray())


def test_bad_ladder_kind(mixed):
    with pytest.raises(KeyError) as exc:
        mixed.ladder(0, 'sideways')
    assert 'raise or lower' in str(exc.value)


def test_gauge_sector_flag(mixed):
    assert mixed.a_Q((-1,)).check_gauge_sector_only(mixed)
    assert not mixed.fermion_op('a', 'lower').check_gauge_sector_only(mixed)


def test_band_mask(mixed):
    mask = mixed.band_mask(1)
    assert not mask[0]
    assert mask[mixed.index((2, 0, 0, 0, 0, 0))]
    assert not mask[mixed.index((1, 1, 1, 1, 1, 1))]
    assert mixed.band_mask(2)[mixed.index((1, 0, 0, 0, 0, 0))]


def test_sizing_error_names_sector():
    spec = SectorSpec(ghost_modes=[(1,), (-1,)], ghost_cutoff=9,
                      fermion_modes=['a'], dimension_cap=1000)
    with pytest.raises(cq.SizingError) as exc:
        enumerate_basis(spec)
    assert 'ghost sector' in str(exc.value)
    assert '10000' in str(exc.value)


def test_linop_arithmetic(mixed):
    a = mixed.a_Q((1,))
    b = mixed.a_Q_star((1,))
    total = 2 * a + b - a / 2
    assert isinstance(total, LinOp)
    assert np.allclose(total.toarray(), 1.5 * a.toarray() + b.toarray())
    assert (a - a).is_zero()
