import numpy as np
import pytest

from covqed.modes import make_chi
from covqed.qed import (ModelConfig, build_fields, build_hamiltonian,
                        build_reference_state)

recipe = {'momenta': [[0], [1]], 'amplitude': 0.1, 'phase': np.pi / 2}


@pytest.fixture(scope='session')
def model():
    return ModelConfig(2 * np.pi, 4, 1, ghost_cutoff=4, charge=0.04)


@pytest.fixture(scope='session')
def fields(model):
    return build_fields(model)


@pytest.fixture(scope='session')
def hamiltonian(fields, model):
    return build_hamiltonian(fields, model)


@pytest.fixture(scope='session')
def state(model, fields, hamiltonian):
    return build_reference_state(model, recipe, fields, hamiltonian)


@pytest.fixture(scope='session')
def chi0(fields, state):
    return make_chi(fields.lattice, 'self_tuned', field=state.divergence,
                    scale=1.0)
