import pytest

import covqed as cq
from covqed.fock import SectorSpec

spec = SectorSpec(photon_modes=[((1, 0, 0), 1)], photon_cutoff=2,
                  ghost_modes=[(1, 0, 0)], ghost_cutoff=3,
                  fermion_modes=['a', 'b'])


def test_ordering():
    sectors = [(m.sector, m.leg) for m in spec.modes]
    assert sectors == [('photon', None), ('ghost', 'q'), ('ghost', 'r'),
                       ('fermion', None), ('fermion', None)]
    assert spec.dims == [3, 4, 4, 2, 2]


def test_sector_dimensions():
    assert spec.sector_dimensions() == {'photon': 3, 'ghost': 16,
                                        'fermion': 4}


def test_position():
    assert spec.position('ghost', (1, 0, 0), 'r') == 2
    assert spec.position('fermion', 'b') == 4


def test_unknown_mode():
    with pytest.raises(KeyError) as exc:
        spec.position('ghost', (0, 1, 0), 'q')
    assert 'unknown mode' in str(exc.value)


def test_cutoff_below_one():
    with pytest.raises(cq.ConfigError) as exc:
        SectorSpec(ghost_modes=[(1,)], ghost_cutoff=0)
    assert 'cutoffs' in str(exc.value)
