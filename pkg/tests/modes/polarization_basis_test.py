import numpy as np
import pytest
import sympy

import covqed as cq
from covqed.modes import build_lattice, polarization_basis, transverse_pair


def test_orthonormal_triad():
    box = build_lattice(2 * np.pi, 4, 3)
    basis = polarization_basis(box.momenta)
    for k, (e1, e2) in zip(box.momenta, basis.vectors):
        khat = k / np.linalg.norm(k)
        assert np.dot(e1, e2) == pytest.approx(0, abs=1e-12)
        assert np.dot(e1, k) == pytest.approx(0, abs=1e-12)
        assert np.dot(e2, k) == pytest.approx(0, abs=1e-12)
        assert np.linalg.norm(e1) == pytest.approx(1)
        assert np.allclose(np.cross(e1, e2), khat)


def test_exact_pair():
    first, second = transverse_pair([1, 1, 0], sqrt=sympy.sqrt)
    assert sympy.simplify(sum(a * b for a, b in zip(first, second))) == 0
    assert sympy.simplify(sum(a * a for a in second)) == 1
    assert sympy.simplify(first[0] + first[1]) == 0


def test_one_dimension_is_empty():
    basis = polarization_basis([[1.0], [-1.0]])
    assert basis.vectors.shape == (2, 0, 1)
    assert len(basis) == 0


def test_zero_momentum():
    with pytest.raises(cq.ConfigError) as exc:
        polarization_basis([[0.0, 0.0, 0.0]])
    assert 'nonzero' in str(exc.value)
