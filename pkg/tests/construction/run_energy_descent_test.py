import csv

import numpy as np
import pytest

import covqed as cq
from covqed.construction import (CSV_COLUMNS, DescentConfig,
                                 run_energy_descent)
from covqed.qed import ModelConfig

recipe = {'momenta': [[0], [1]], 'amplitude': 0.1, 'phase': np.pi / 2}


@pytest.fixture(scope='module')
def report(model, fields, hamiltonian):
    descent = DescentConfig(f=[0, 10, 20, 40], workers=2)
    return run_energy_descent(model, descent, recipe, fields, hamiltonian)


def test_descent_law(report):
    held = {k: v for k, v in report.flags.items() if k != 'below_vacuum'}
    assert all(held.values())
    assert report.passed == report.flags['below_vacuum']
    assert report.slope == pytest.approx(report.slope_predicted, rel=1e-6)
    assert report.slope_predicted < 0
    assert report.breakdown is None


def test_points_in_order(report):
    assert [p.f for p in report.points] == [0, 10, 20, 40]
    assert report.points[0].E_direct == pytest.approx(report.reference.energy)
    energies = [p.E_direct for p in report.points]
    assert energies == sorted(energies, reverse=True)


def test_invariants(report):
    for p in report.points:
        assert p.norm_drift < 1e-10
        assert p.charge_drift < 1e-10
        assert p.omega_residual <= (report.reference.residual
                                + report.config.omega_drift)


def test_summary(report):
    summary = report.summary()
    assert summary['valid_points'] == 4
    assert summary['flags']['energy_shift_identity']
    assert summary['divergence_norm'] > 0


def test_csv(report, tmp_path):
    fn = str(tmp_path / 'sweep.csv')
    report.write_csv(fn)
    with open(fn) as src:
        rows = list(csv.reader(src))
    assert tuple(rows[0]) == CSV_COLUMNS
    assert len(rows) == 5
    assert rows[1][-1] == '1'


def test_single_point_is_insufficient(model, fields, hamiltonian):
    report = run_energy_descent(model, DescentConfig(f=[0]), recipe, fields,
                                hamiltonian)
    assert not report.passed
    assert not report.flags['enough_valid_points']


def test_free_theory_premise():
    model = ModelConfig(2 * np.pi, 4, 1, charge=0.0)
    with pytest.raises(cq.PremiseError) as exc:
        run_energy_descent(model, DescentConfig(), recipe)
    assert 'div j' in str(exc.value)


def test_automatic_grid(model, fields, hamiltonian):
    descent = DescentConfig(points=3, first_shift_fraction=0.01)
    report = run_energy_descent(model, descent, recipe, fields, hamiltonian)
    assert len(report.points) == 3
    assert report.points[0].f == 0
    assert report.flags['linear_fit']
    assert report.flags['energy_shift_identity']


def test_constraint_drift_breaks_sweep(model, fields, hamiltonian):
    descent = DescentConfig(f=[0, 10, 20, 40], omega_drift=-1.0)
    report = run_energy_descent(model, descent, recipe, fields, hamiltonian)
    assert report.breakdown == 0
    assert not report.valid
    assert not report.passed


def test_fit_tolerance_gates(model, fields, hamiltonian):
    descent = DescentConfig(f=[0, 10, 20, 40], fit_tolerance=-1.0)
    report = run_energy_descent(model, descent, recipe, fields, hamiltonian)
    assert report.fit_residual is not None
    assert not report.flags['linear_fit']
    assert not report.passed
