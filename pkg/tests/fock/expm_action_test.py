import numpy as np
import pytest
import scipy.linalg
import scipy.sparse as sp

import covqed as cq
from covqed.fock import (FockBasis, LinOp, Metric, SectorSpec, StateVec,
                         expm_action, guard_band_check, guarded_residual)

rng = np.random.RandomState(3)


@pytest.fixture(scope='module')
def basis():
    return FockBasis(SectorSpec(ghost_modes=[(1,)], ghost_cutoff=6))


def test_matches_dense_exponential():
    dense = 0.3 * (rng.randn(12, 12) + 1j * rng.randn(12, 12))
    psi = rng.randn(12) + 0j
    out = expm_action(LinOp(sp.csr_matrix(dense)), psi, tol=1e-12)
    assert np.allclose(out.amplitudes, scipy.linalg.expm(dense) @ psi,
                       atol=1e-10)
    assert out.residual <= 1e-12


def test_zero_generator_copies():
    psi = np.arange(4, dtype=complex)
    out = expm_action(LinOp(sp.csr_matrix((4, 4))), psi)
    assert np.array_equal(out.amplitudes, psi)
    out.amplitudes[0] = 7
    assert psi[0] == 0


def test_eta_unitary(basis):
    eta = Metric(basis)
    k = (1,)
    C = basis.a_Q(k) + basis.a_Q_star(k)
    xi = expm_action(C * -0.2j, basis.vacuum(eta))
    assert xi.physical_norm == pytest.approx(1.0, abs=1e-12)


def test_bad_tolerance():
    with pytest.raises(cq.ConfigError) as exc:
        expm_action(LinOp(sp.identity(2)), np.ones(2), tol=0)
    assert 'tolerance' in str(exc.value)


def test_non_convergence_carries_residual():
    dense = 3 * (rng.randn(10, 10) + 1j * rng.randn(10, 10))
    with pytest.raises(cq.NumericalError) as exc:
        expm_action(LinOp(sp.csr_matrix(dense)), rng.randn(10), tol=1e-30,
                    max_steps=4)
    assert exc.value.residual > 0
    assert 'did not reach' in str(exc.value)


def test_guard_band_leakage(basis):
    eta = Metric(basis)
    assert guard_band_check(basis, basis.vacuum(eta), 2) == 0
    edge = StateVec(basis.basis_state((5, 5)).amplitudes, eta)
    assert guard_band_check(basis, edge, 2) == pytest.approx(1.0)
    assert guard_band_check(basis, edge, 1) == 0


def test_guard_band_needs_positive_width(basis):
    with pytest.raises(cq.ConfigError) as exc:
        guard_band_check(basis, basis.vacuum(), 0)
    assert 'g >= 1' in str(exc.value)


def test_guarded_residual_hides_cutoff_edge():
    basis = FockBasis(SectorSpec(photon_modes=['p'], photon_cutoff=3))
    a = basis.photon('p', 'lower')
    defect = LinOp(a.matrix @ a.dag().matrix - a.dag().matrix @ a.matrix
                   - sp.identity(4))
    assert guarded_residual(defect, basis, 1) == 0
    assert guarded_residual(defect, basis, 0) == pytest.approx(4.0)


def test_residual_bounds_error_against_dense(basis):
    eta = Metric(basis)
    k = (1,)
    C = (basis.a_Q(k) + basis.a_Q_star(k)) * -1.5j
    psi = basis.vacuum(eta)
    out = expm_action(C, psi, tol=1e-12)
    exact = scipy.linalg.expm(C.toarray()) @ psi.amplitudes
    error = np.linalg.norm(out.amplitudes - exact) / np.linalg.norm(exact)
    assert out.residual <= 1e-12
    assert error <= out.residual + 1e-12
