import numpy as np
import pytest

import covqed as cq
from covqed.qed import (ModelConfig, build_reference_state,
                        constraint_residual, expectation)


def test_state_is_physical(state, fields):
    assert state.residual <= 1e-10
    assert constraint_residual(fields, state.vector) == pytest.approx(
        state.residual)
    assert state.vector.physical_norm == pytest.approx(1.0)


def test_divergence_is_nonzero(state):
    assert np.linalg.norm(state.divergence) > 1e-6
    assert state.divergence.shape == (4,)


def test_ghost_field_vanishes(state, fields):
    assert np.max(np.abs(expectation(state, fields.G))) < 1e-10


def test_density_carries_charge(state, fields):
    total = fields.lattice.cell * np.sum(state.density)
    assert total == pytest.approx(0.01)


def test_plane_wave_is_premise_failure(model, fields, hamiltonian):
    recipe = {'momenta': [[1], [0]], 'amplitude': 0.0}
    with pytest.raises(cq.PremiseError) as exc:
        build_reference_state(model, recipe, fields, hamiltonian)
    assert 'div j' in str(exc.value)


def test_free_theory_is_premise_failure():
    model = ModelConfig(2 * np.pi, 4, 1, charge=0.0)
    with pytest.raises(cq.PremiseError) as exc:
        build_reference_state(model, {'momenta': [[0], [1]]})
    assert 'e = 0' in str(exc.value)


def test_recipe_needs_two_momenta(model, fields, hamiltonian):
    with pytest.raises(cq.ConfigError) as exc:
        build_reference_state(model, {'momenta': [[0]]}, fields, hamiltonian)
    assert 'two momenta' in str(exc.value)


def test_truncation_shows_in_residual():
    strong = ModelConfig(2 * np.pi, 4, 1, ghost_cutoff=3, mass=0.5,
                         charge=2.0)
    with pytest.raises(cq.PhysicalityError) as exc:
        build_reference_state(strong, {'momenta': [[0], [1]],
                                       'amplitude': 0.1})
    assert 'constraint residual' in str(exc.value)
