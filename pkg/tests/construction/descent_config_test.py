import pytest

import covqed as cq
from covqed.construction import DescentConfig, SweepPoint


def test_automatic_grid():
    config = DescentConfig(points=4, first_shift_fraction=0.1)
    assert config.grid(2.0, 0.5) == pytest.approx([0, 0.6, 1.2, 2.4])


def test_explicit_grid():
    config = DescentConfig(f=[0, 1, 3])
    assert config.grid(5.0, 1.0) == [0.0, 1.0, 3.0]


def test_grid_must_start_at_zero():
    with pytest.raises(cq.ConfigError) as exc:
        DescentConfig(f=[0.5, 1.0])
    assert 'start at 0' in str(exc.value)


def test_grid_must_ascend():
    with pytest.raises(cq.ConfigError) as exc:
        DescentConfig(f=[0, 2, 1])
    assert 'strictly ascending' in str(exc.value)


def test_automatic_grid_needs_two_points():
    with pytest.raises(cq.ConfigError) as exc:
        DescentConfig(points=1)
    assert 'points >= 2' in str(exc.value)


def test_from_dict_defaults():
    config = DescentConfig.from_dict({'workers': 0})
    assert config.workers == 1
    assert config.chi == {'kind': 'self_tuned'}


def test_default_first_shift():
    config = DescentConfig(points=3)
    assert config.grid(-3.0, 2.0) == pytest.approx([0, 0.02, 0.04])


def _point(leakage=0.0, omega=0.0):
    return SweepPoint(1.0, 0.0, 0.0, leakage, omega, 0.0, 0.0, True)


def test_broken_by_leakage():
    config = DescentConfig(leakage_threshold=1e-10)
    assert not config.broken(_point(leakage=1e-11), 0.0)
    assert config.broken(_point(leakage=1e-9), 0.0)


def test_broken_by_constraint_drift():
    config = DescentConfig(omega_drift=1e-9)
    assert not config.broken(_point(omega=1.5e-9), 1e-9)
    assert config.broken(_point(omega=3e-9), 1e-9)
