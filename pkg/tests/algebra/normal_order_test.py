import numpy as np

from covqed.algebra import (CURRENT, GHOST_ANN, GHOST_STAR, PHOTON_ANN,
                            PHOTON_CRE, OpPoly, OpSymbol, commutator,
                            matrix_image, mutated_table, normal_order)
from covqed.fock import FockBasis, SectorSpec

order = 4
mode = ((1, 0, 0), 1)
a = OpPoly.symbol(OpSymbol(PHOTON_ANN, mode), order)
ad = OpPoly.symbol(OpSymbol(PHOTON_CRE, mode), order)
b = OpPoly.symbol(OpSymbol(PHOTON_ANN, ((0, 1, 0), 2)), order)
q = OpPoly.symbol(OpSymbol(GHOST_ANN, (1,)), order)
q_star = OpPoly.symbol(OpSymbol(GHOST_STAR, (1,)), order)
j1 = OpPoly.symbol(OpSymbol(CURRENT, (1, 0)), order)
j2 = OpPoly.symbol(OpSymbol(CURRENT, (1, 1)), order)
one = OpPoly.scalar(1, order)


def test_canonical_pair():
    assert (commutator(a, ad) - one).is_zero()
    assert (a * ad - ad * a - one).is_zero()


def test_creation_first():
    product = a * ad
    monos = sorted(product.terms, key=len)
    assert monos[0] == ()
    assert [s.kind for s in monos[1]] == [PHOTON_CRE, PHOTON_ANN]


def test_distinct_modes_commute():
    assert commutator(b, ad).is_zero()


def test_ghost_pair_commutes():
    assert commutator(q, q_star).is_zero()
    assert commutator(q, a).is_zero()


def test_mutated_table():
    table = mutated_table()
    mq, mstar = q.with_table(table), q_star.with_table(table)
    assert (commutator(mq, mstar) - OpPoly.scalar(1, order, table)).is_zero()


def test_currents_keep_their_order():
    assert not commutator(j1, j2).is_zero()
    assert commutator(j1, a).is_zero()


def test_star():
    assert (a.star() - ad).is_zero()
    assert (q.star() - q_star).is_zero()
    assert ((a * ad).star() - a * ad).is_zero()
    assert (j1.star() - j1).is_zero()


def test_associativity():
    left = (a * ad) * (a + q_star)
    right = a * (ad * (a + q_star))
    assert (left - right).is_zero()


def test_normal_order_is_idempotent():
    p = normal_order(a.raw_product(ad).raw_product(a))
    assert (normal_order(p) - p).is_zero()
    assert len(p) == 2


def test_normal_order_matches_dense_ladders():
    basis = FockBasis(SectorSpec(photon_modes=[mode], photon_cutoff=4))
    raw = a.raw_product(ad).raw_product(ad)
    ordered = normal_order(raw)
    expected = ad * ad * a + ad * 2
    assert (ordered - expected).is_zero()
    low = [n for n in range(basis.dim) if basis.occupation(n)[0] <= 1]
    dense_raw = matrix_image(raw, basis, 1.0)[:, low]
    dense_ordered = matrix_image(ordered, basis, 1.0)[:, low]
    assert np.allclose(dense_raw, dense_ordered)
    assert np.abs(dense_raw).max() > 0
