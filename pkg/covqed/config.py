"""
:mod:`covqed.config` reads, validates and writes run configurations (JSON
key-value trees) and writes the JSON reports every subcommand emits, each
with an embedded :class:`RunManifest`.
"""

import hashlib
import json
import os
import random
import time
from copy import deepcopy
from inspect import signature
from logging import getLogger
from pprint import PrettyPrinter

import sympy

import covqed as cq

REPORT_SCHEMA = 'covqed-report/1'

LIMITATION = ('The f → ∞ divergence of ⟨ξ|H|ξ⟩ '
              'is certified only as (a) the exact symbolic termination of '
              'the BCH series and (b) the finite-truncation linear descent '
              'law up to the reported breakdown f*; no claim is made beyond '
              'f*.')

CONVENTIONS = {
    'plane_waves': 'phi_k(x) = exp(i k.x) / sqrt(V), one factor per mode',
    'density_transform': 'j0(k) = a^d sum_x j0(x) exp(-i k.x) / sqrt(V)',
    'derivative': 'i*kappa(k), kappa = k with Nyquist components zeroed',
    'fermions': ('free Dirac spinors in the Dirac basis, modes (p, helicity, '
                 'particle/antiparticle), E_p = sqrt(kappa_p^2 + m^2); '
                 'j_mu = e :psi^+ alpha_mu psi:'),
    'inner_product': 'physical metric <phi|eta|psi>, eta swaps ghost legs',
}

_NUM = (int, float)
_OPT_INT = (int, type(None))
_OPT_LIST = (list, type(None))

SCHEMA = {
    'model': {
        'L': _NUM, 'N': int, 'd': int, 'photon_cutoff': int,
        'ghost_cutoff': int, 'fermions': bool, 'mass': _NUM,
        'charge': _NUM, 'gamma': _NUM, 'normal_order': bool,
        'dimension_cap': int, 'gauge_shell': _OPT_INT,
        'gauge_momenta': _OPT_LIST, 'fermion_momenta': _OPT_LIST,
        'antiparticles': bool},
    'state': {'momenta': list, 'amplitude': _NUM, 'phase': _NUM,
              'helicity': _OPT_INT},
    'descent': {
        'f': _OPT_LIST, 'points': int, 'first_shift_fraction': _NUM,
        'chi': dict, 'expm_tol': _NUM, 'guard_band': int,
        'leakage_threshold': _NUM, 'rtol': _NUM, 'atol': _NUM,
        'min_valid_points': int, 'workers': int, 'omega_drift': _NUM,
        'fit_tolerance': _NUM},
    'tolerances': {'conformance': _NUM, 'physical': _NUM,
                   'guard_band': int, 'bch_guard_band': int},
    'symbolic': {'L': _NUM, 'N': int, 'd': int, 'chi_denominator': int,
                 'samples': int, 'gauge_shell': _OPT_INT},
}

DEFAULTS = {
    'model': {
        'L': 6.283185307179586, 'N': 4, 'd': 1, 'photon_cutoff': 1,
        'ghost_cutoff': 2, 'fermions': True, 'mass': 0.0, 'charge': 0.0,
        'gamma': 1.0, 'normal_order': True, 'dimension_cap': 2 ** 20,
        'gauge_shell': None, 'gauge_momenta': None, 'fermion_momenta': None,
        'antiparticles': True},
    'state': {'momenta': [[0], [1]], 'amplitude': 0.1,
              'phase': 1.5707963267948966, 'helicity': None},
    'descent': {
        'f': None, 'points': 8, 'first_shift_fraction': 0.01,
        'chi': {'kind': 'self_tuned'}, 'expm_tol': 1e-12, 'guard_band': 2,
        'leakage_threshold': 1e-9, 'rtol': 1e-6, 'atol': 1e-9,
        'min_valid_points': 3, 'workers': 1, 'omega_drift': 1e-9,
        'fit_tolerance': 1e-6},
    'tolerances': {'conformance': 1e-10, 'physical': 1e-10,
                   'guard_band': 2, 'bch_guard_band': 3},
    'symbolic': {'L': 6.283185307179586, 'N': 4, 'd': 1,
                 'chi_denominator': 7, 'samples': 100, 'gauge_shell': None},
}


def _check_block(name, block, schema):
    if not isinstance(block, dict):
        raise cq.ConfigError('config block %r must be an object' % name)
    unknown = sorted(set(block) - set(schema))
    if unknown:
        raise cq.ConfigError('unknown keys in %r: %s'
                             % (name, ', '.join(unknown)))
    for key, value in block.items():
        types = schema[key]
        ok = isinstance(value, types)
        if isinstance(value, bool) and bool not in (
                types if isinstance(types, tuple) else (types,)):
            ok = False
        if not ok:
            raise cq.ConfigError('%s.%s has type %s' % (
                name, key, type(value).__name__))


class RunConfig:
    """Validated run configuration.

    Attributes mirror the top-level blocks; every assignment to one of them
    is kept in ``_config`` so the configuration can be written back.

    .. automethod:: __repr__
    .. automethod:: __setattr__
    """

    def __init__(self, model=None, state=None, descent=None,
                 tolerances=None, symbolic=None, output='covqed-out', seed=0):
        """
        :param model: Lattice, sectors and couplings
        :param state: Reference-state recipe
        :param descent: f-sweep parameters
        :param tolerances: Conformance and physicality tolerances
        :param symbolic: Lattice of the exact identity checks
        :param output: Directory receiving reports
        :param seed: Seed of every randomized check
        """
        self._kwargs = list(signature(RunConfig).parameters.keys())
        self._config = {}
        self._log = getLogger(__name__)
        blocks = {'model': model, 'state': state, 'descent': descent,
                  'tolerances': tolerances, 'symbolic': symbolic}
        for name, block in blocks.items():
            block = {} if block is None else block
            _check_block(name, block, SCHEMA[name])
            merged = deepcopy(DEFAULTS[name])
            merged.update(block)
            self.__setattr__(name, merged)
        if not isinstance(output, str):
            raise cq.ConfigError('output must be a directory name')
        if isinstance(seed, bool) or not isinstance(seed, int):
            raise cq.ConfigError('seed must be an integer')
        self.output = output
        self.seed = seed

    def __repr__(self):
        """Indicates RunConfig and pretty prints the _config dictionary"""
        return 'RunConfig\n' + PrettyPrinter().pformat(self._config)

    def __setattr__(self, key, value):
        """
        Redefined to keep an updated version of the configuration saved for
        :meth:`write_config` and :meth:`config_hash`.
        """
        if '_config' in self.__dict__ and key in self._kwargs:
            self._log.debug('Setting configuration attribute %s', key)
            self._config[key] = value
        super().__setattr__(key, value)

    def write_config(self, fn):
        """Write the configuration as JSON.

        :param fn: The filename to be written, will overwrite previous file
        """
        with open(fn, 'w') as out:
            json.dump(self._config, out, indent=2, sort_keys=True)

    def from_config(fn, **kwargs):
        """
        Build a :class:`RunConfig` from a JSON file.

        :param fn: The filename containing the configuration
        :param kwargs: Top-level values overriding the content of fn
        :raises ConfigError: on a missing or malformed file, unknown keys or
            ill-typed values
        :returns: A :class:`RunConfig`
        """
        try:
            with open(fn, 'r') as src:
                dic = json.load(src)
        except FileNotFoundError:
            raise cq.ConfigError('config file %s not found' % fn)
        except json.JSONDecodeError as err:
            raise cq.ConfigError('config file %s is not JSON: %s' % (fn, err))
        if not isinstance(dic, dict):
            raise cq.ConfigError('config file %s must hold an object' % fn)
        dic.update({k: v for k, v in kwargs.items() if v is not None})
        unknown = sorted(set(dic) - set(signature(RunConfig).parameters))
        if unknown:
            raise cq.ConfigError('unknown top-level keys: %s'
                                 % ', '.join(unknown))
        return RunConfig(**dic)

    def config_hash(self):
        text = json.dumps(self._config, sort_keys=True)
        return hashlib.sha256(text.encode('utf-8')).hexdigest()

    def model_config(self, **overrides):
        from covqed.qed import ModelConfig
        block = dict(self.model)
        block.update(overrides)
        return ModelConfig.from_dict(block)

    def descent_config(self):
        from covqed.construction import DescentConfig
        return DescentConfig.from_dict(self.descent)

    def symbolic_lattice(self):
        return cq.build_lattice(self.symbolic['L'], self.symbolic['N'],
                                self.symbolic['d'])

    def symbolic_chi(self, lattice):
        """Seeded exact rational χ with denominator ``chi_denominator``."""
        rng = random.Random(self.seed)
        den = self.symbolic['chi_denominator']
        if den < 1:
            raise cq.ConfigError('chi_denominator must be >= 1')
        return [sympy.Rational(rng.randint(-den, den), den)
                for _ in range(lattice.n_sites)]


def _clock():
    """Wall time, pinned by ``SOURCE_DATE_EPOCH`` when it is set."""
    pinned = os.environ.get('SOURCE_DATE_EPOCH')
    return float(pinned) if pinned else time.time()


class RunManifest:
    """Provenance embedded in every report.

    With ``SOURCE_DATE_EPOCH`` set, reports of identical configurations and
    seeds are byte-identical.
    """

    def __init__(self, config):
        self.config_hash = config.config_hash()
        self.version = cq.__ver__
        self.conventions = dict(CONVENTIONS)
        self.limitation = LIMITATION
        self.seed = config.seed
        self.started = _clock()
        self.finished = None

    def __repr__(self):
        return 'RunManifest\n' + PrettyPrinter().pformat(self.to_dict())

    def finish(self):
        self.finished = _clock()

    def to_dict(self):
        return {
            'config_hash': self.config_hash,
            'version': self.version,
            'conventions': self.conventions,
            'limitation': self.limitation,
            'seed': self.seed,
            'timestamps': {'started': self.started,
                           'finished': self.finished},
        }


def write_report(fn, kind, body, passed, manifest):
    """Write a JSON report of one subcommand with its manifest."""
    log = getLogger(__name__)
    manifest.finish()
    doc = {'schema': REPORT_SCHEMA, 'kind': kind, 'passed': bool(passed),
           'manifest': manifest.to_dict(), 'body': body}
    folder = os.path.dirname(fn)
    if folder:
        os.makedirs(folder, exist_ok=True)
    with open(fn, 'w') as out:
        json.dump(doc, out, indent=2, sort_keys=True, default=_jsonable)
    log.info('Wrote %s report to %s', kind, fn)
    return doc


def _jsonable(value):
    if hasattr(value, 'tolist'):
        return value.tolist()
    if isinstance(value, complex):
        return [value.real, value.imag]
    raise TypeError('cannot serialize %r' % (value,))


def read_report(fn):
    try:
        with open(fn, 'r') as src:
            doc = json.load(src)
    except FileNotFoundError:
        raise cq.ConfigError('report %s not found' % fn)
    except json.JSONDecodeError as err:
        raise cq.ConfigError('report %s is not JSON: %s' % (fn, err))
    if doc.get('schema') != REPORT_SCHEMA:
        raise cq.ConfigError('report %s has schema %r, expected %r'
                             % (fn, doc.get('schema'), REPORT_SCHEMA))
    return doc


def render_report(doc):
    """Human-readable text of a report document."""
    lines = ['%s report: %s' % (doc['kind'],
                                'PASS' if doc['passed'] else 'FAIL')]
    manifest = doc['manifest']
    lines.append('version %s, config %s, seed %s' % (
        manifest['version'], manifest['config_hash'][:12], manifest['seed']))
    body = doc['body']
    if isinstance(body, dict) and 'summary' in body:
        for key, value in sorted(body['summary'].items()):
            lines.append('  %-22s %s' % (key, value))
        for point in body.get('points', []):
            lines.append('  f=%-12.6g E=%-16.10g predicted=%-16.10g %s' % (
                point['f'], point['E_direct'], point['E_predicted'],
                'valid' if point['valid'] else 'INVALID'))
    else:
        for entry in body:
            status = 'ok' if entry['passed'] else 'FAIL'
            detail = entry.get('residual')
            if isinstance(detail, float):
                detail = '%.3e' % detail
            lines.append('  %-4s %-32s %s' % (status, entry['name'], detail))
    lines.append('Limitation: ' + manifest['limitation'])
    return '\n'.join(lines)
