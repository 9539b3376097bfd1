import json
import os

import pytest
import sympy

import covqed as cq
from covqed.config import (LIMITATION, REPORT_SCHEMA, RunConfig, RunManifest,
                           read_report, render_report, write_report)

DEFAULT = cq._get_data('default.json')

ENTRIES = [{'name': 'gauss_law', 'residual': 3.1e-15, 'guard_band': 2,
            'passed': True},
           {'name': 'ampere_law', 'residual': 0.25, 'guard_band': 2,
            'passed': False}]

DESCENT_BODY = {'summary': {'valid_points': 2, 'slope_fitted': -1.0},
                'points': [{'f': 0.0, 'E_direct': 1.0, 'E_predicted': 1.0,
                            'valid': True},
                           {'f': 1.0, 'E_direct': 0.5, 'E_predicted': 0.5,
                            'valid': False}]}


def test_blocks_merge_defaults():
    config = RunConfig(model={'charge': 0.1})
    assert config.model['charge'] == 0.1
    assert config.model['ghost_cutoff'] == 2
    assert config.tolerances['bch_guard_band'] == 3
    assert config.descent['chi'] == {'kind': 'self_tuned'}


def test_unknown_key():
    with pytest.raises(cq.ConfigError) as exc:
        RunConfig(model={'coupling': 0.1})
    assert 'unknown keys' in str(exc.value)
    assert 'coupling' in str(exc.value)


def test_wrong_type():
    with pytest.raises(cq.ConfigError) as exc:
        RunConfig(model={'N': 'four'})
    assert 'model.N has type str' in str(exc.value)


def test_bool_is_not_an_integer():
    with pytest.raises(cq.ConfigError) as exc:
        RunConfig(descent={'points': True})
    assert 'descent.points has type bool' in str(exc.value)


def test_seed_type():
    with pytest.raises(cq.ConfigError) as exc:
        RunConfig(seed=1.5)
    assert 'seed' in str(exc.value)


def test_missing_file(tmp_path):
    with pytest.raises(cq.ConfigError) as exc:
        RunConfig.from_config(str(tmp_path / 'absent.json'))
    assert 'not found' in str(exc.value)


def test_not_json(tmp_path):
    fn = tmp_path / 'broken.json'
    fn.write_text('{"model": ')
    with pytest.raises(cq.ConfigError) as exc:
        RunConfig.from_config(str(fn))
    assert 'not JSON' in str(exc.value)


def test_unknown_top_level(tmp_path):
    fn = tmp_path / 'extra.json'
    fn.write_text(json.dumps({'model': {}, 'plots': True}))
    with pytest.raises(cq.ConfigError) as exc:
        RunConfig.from_config(str(fn))
    assert 'plots' in str(exc.value)


def test_shipped_default():
    config = RunConfig.from_config(DEFAULT)
    model = config.model_config()
    assert model.charge == 0.25
    assert model.ghost_cutoff == 8
    assert config.descent_config().workers == 2
    assert config.seed == 0


def test_overrides_skip_none():
    config = RunConfig.from_config(DEFAULT, output=None, seed=5)
    assert config.seed == 5
    assert config.output == 'covqed-out'


def test_write_then_read(tmp_path):
    config = RunConfig.from_config(DEFAULT, seed=3)
    fn = str(tmp_path / 'copy.json')
    config.write_config(fn)
    again = RunConfig.from_config(fn)
    assert again.config_hash() == config.config_hash()
    assert again.model == config.model


def test_hash_tracks_assignments():
    config = RunConfig()
    before = config.config_hash()
    assert RunConfig().config_hash() == before
    config.seed = 11
    assert config.config_hash() != before


def test_symbolic_chi_is_seeded():
    config = RunConfig(seed=4)
    lattice = config.symbolic_lattice()
    chi = config.symbolic_chi(lattice)
    assert len(chi) == lattice.n_sites
    assert all(isinstance(v, sympy.Rational) for v in chi)
    assert all(7 % v.q == 0 for v in chi)
    assert chi == RunConfig(seed=4).symbolic_chi(lattice)


def test_symbolic_chi_denominator():
    config = RunConfig(symbolic={'chi_denominator': 0})
    with pytest.raises(cq.ConfigError):
        config.symbolic_chi(config.symbolic_lattice())


def test_manifest(monkeypatch):
    monkeypatch.setenv('SOURCE_DATE_EPOCH', '1700000000')
    config = RunConfig()
    manifest = RunManifest(config)
    manifest.finish()
    dic = manifest.to_dict()
    assert dic['version'] == cq.__ver__
    assert dic['config_hash'] == config.config_hash()
    assert dic['limitation'] == LIMITATION
    assert dic['timestamps'] == {'started': 1700000000.0,
                                 'finished': 1700000000.0}
    assert 'eta' in dic['conventions']['inner_product']


def test_reports_are_reproducible(monkeypatch, tmp_path):
    monkeypatch.setenv('SOURCE_DATE_EPOCH', '1700000000')
    texts = []
    for name in ('a', 'b'):
        fn = os.path.join(str(tmp_path), name, 'conformance.json')
        write_report(fn, 'conformance', ENTRIES, False,
                     RunManifest(RunConfig(seed=2)))
        with open(fn) as src:
            texts.append(src.read())
    assert texts[0] == texts[1]


def test_read_report(tmp_path):
    fn = str(tmp_path / 'identities.json')
    write_report(fn, 'identities', ENTRIES[:1], True,
                 RunManifest(RunConfig()))
    doc = read_report(fn)
    assert doc['schema'] == REPORT_SCHEMA
    assert doc['passed'] is True
    assert doc['body'][0]['name'] == 'gauss_law'


def test_read_report_schema(tmp_path):
    fn = tmp_path / 'old.json'
    fn.write_text(json.dumps({'schema': 'covqed-report/0'}))
    with pytest.raises(cq.ConfigError) as exc:
        read_report(str(fn))
    assert 'schema' in str(exc.value)


def test_render_entries():
    doc = {'kind': 'conformance', 'passed': False, 'body': ENTRIES,
           'manifest': RunManifest(RunConfig()).to_dict()}
    text = render_report(doc)
    lines = text.splitlines()
    assert lines[0] == 'conformance report: FAIL'
    assert 'ampere_law' in text
    assert '2.500e-01' in text
    assert lines[-1] == 'Limitation: ' + LIMITATION


def test_render_descent():
    doc = {'kind': 'descent', 'passed': True, 'body': DESCENT_BODY,
           'manifest': RunManifest(RunConfig()).to_dict()}
    text = render_report(doc)
    assert text.startswith('descent report: PASS')
    assert 'valid_points' in text
    assert 'INVALID' in text
