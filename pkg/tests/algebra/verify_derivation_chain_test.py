import numpy as np
import pytest
import sympy

import covqed as cq
from covqed.algebra import (ExactLattice, check_chi, mutated_table,
                            verify_derivation_chain)
from covqed.modes import build_lattice

chi = [sympy.Rational(1, 7), sympy.Rational(-2, 7), sympy.Rational(3, 7), 0]


@pytest.fixture(scope='module')
def line():
    return build_lattice(2 * np.pi, 4, 1)


def test_chain_holds(line):
    report = verify_derivation_chain(line, chi)
    assert [e.name for e in report] == ['summation_by_parts',
                                        'double_commutator', 'bch_terminates']
    assert report.passed


def test_chain_on_six_sites():
    lattice = build_lattice(3.0, 6, 1)
    values = [sympy.Rational(n, 5) for n in (1, 0, -3, 2, 2, -1)]
    assert verify_derivation_chain(lattice, values).passed


def test_corrupted_table_fails_double_commutator(line):
    report = verify_derivation_chain(line, chi, table=mutated_table())
    assert not report['double_commutator'].passed
    assert report['double_commutator'].residual != '0'
    assert report['summation_by_parts'].passed


def test_exact_frequencies(line):
    exact = ExactLattice(line)
    assert exact.modes == [(1,), (-1,)]
    value = exact.w((1,)).subs(cq.algebra.L, 2 * sympy.pi)
    assert sympy.simplify(value - 1) == 0


def test_check_chi_rejects_complex():
    with pytest.raises(cq.ConfigError) as exc:
        check_chi([1, sympy.I])
    assert 'real' in str(exc.value)
    assert check_chi(chi) == chi


def test_derivative_matrix_antisymmetric():
    for n in (4, 6):
        exact = ExactLattice(build_lattice(2 * np.pi, n, 1))
        for x in range(n):
            assert exact.d1[x][x].is_zero()
            for y in range(n):
                assert (exact.d1[x][y] + exact.d1[y][x]).is_zero()


def test_chain_for_constant_chi(line):
    report = verify_derivation_chain(line, [sympy.Rational(2, 3)] * 4)
    assert report.passed
    assert report['summation_by_parts'].terms == 0


@pytest.fixture(scope='module')
def cube():
    return build_lattice(2 * np.pi, 4, 3)


def cube_chi():
    return [sympy.Rational((5 * s) % 7 - 3, 7) for s in range(64)]


def test_chain_in_three_dimensions(cube):
    report = verify_derivation_chain(cube, cube_chi(), shell=1)
    failed = [(e.name, e.residual) for e in report if not e.passed]
    assert failed == []


def test_corrupted_table_in_three_dimensions(cube):
    report = verify_derivation_chain(cube, cube_chi(), shell=1,
                                     table=mutated_table())
    assert report['summation_by_parts'].passed
    assert not report['double_commutator'].passed
