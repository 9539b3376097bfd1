import numpy as np
import pytest
import sympy

from covqed import ConfigError
from covqed.algebra import L, Coefficient, unit_root


def test_root_of_unity_reduction():
    assert Coefficient.root(4, 4) == Coefficient.const(1, 4)
    assert Coefficient.root(2, 4) == Coefficient.const(-1, 4)
    assert Coefficient.root(5, 4).value == sympy.I


def test_sum_of_roots_vanishes():
    for order in (2, 4, 6, 8, 12):
        total = sum((Coefficient.root(p, order) for p in range(order)),
                    Coefficient(0, order))
        assert total.is_zero()


def test_imaginary_unit_is_a_root():
    difference = Coefficient.const(sympy.I, 4) - Coefficient.root(1, 4)
    assert difference.is_zero()
    eighth = Coefficient.const(sympy.I, 8) - Coefficient.root(2, 8)
    assert eighth.is_zero()


def test_radical_coefficients_canonical():
    # √2·ζ_8 = 1 + ζ_8²
    lhs = Coefficient.root(1, 8, sympy.sqrt(2))
    rhs = Coefficient.const(1, 8) + Coefficient.root(2, 8)
    assert (lhs - rhs).is_zero()
    assert hash(lhs) == hash(rhs)


def test_unsupported_order():
    with pytest.raises(ConfigError) as exc:
        unit_root(1, 10)
    assert 'exact checks need N' in str(exc.value)


def test_conjugate():
    assert Coefficient.root(1, 4).conjugate() == Coefficient.root(3, 4)
    value = Coefficient.root(1, 6, sympy.I + 2)
    assert value.conjugate().evaluate(1.0) == pytest.approx(
        np.conj(value.evaluate(1.0)))


def test_evaluate():
    assert Coefficient.root(1, 4).evaluate(1.0) == pytest.approx(1j)
    assert Coefficient.root(1, 6).evaluate(1.0) == pytest.approx(
        np.exp(1j * np.pi / 3))
    assert Coefficient.const(2 * sympy.pi / L, 4).evaluate(
        2 * np.pi) == pytest.approx(1.0)


def test_products_stay_canonical():
    zeta = Coefficient.root(1, 6)
    cube = zeta * zeta * zeta
    assert cube == Coefficient.const(-1, 6)
    assert (cube + 1).is_zero()
    assert (zeta * 3 - 3 * zeta).is_zero()


def test_vanishes_simplifies():
    odd = Coefficient.const(sympy.sqrt(L) ** 2 - L, 4)
    assert odd.vanishes()
    assert not Coefficient.const(sympy.sqrt(2), 4).vanishes()
