"""
:mod:`covqed.__exec__` provides the ``covqed`` command line tool:

* ``verify-identities``: exact checks of the commutator chain
* ``conformance``: representation checks of the truncated Fock model
* ``descent``: the energy sweep over the gauge-function scale f
* ``report``: re-render an existing JSON report as text

Exit codes: 0 pass, 1 falsified identity or numerical failure, 2
configuration or sizing error, 3 unmet descent premise.
"""

import argparse
import logging
import os

import covqed as cq
from covqed import algebra, construction, qed
from covqed.config import (RunConfig, RunManifest, read_report,
                           render_report, write_report)
from covqed.modes import make_chi

EXIT_PASS = 0
EXIT_FALSIFIED = 1
EXIT_CONFIG = 2
EXIT_PREMISE = 3

parser = argparse.ArgumentParser(add_help=False)
parser.add_argument('-d', '--debug', help="Print lots of debugging statements",
                    action="store_const", dest="loglevel", const=logging.DEBUG,
                    default=logging.WARNING)
parser.add_argument('-v', '--verbose', help="Be verbose",
                    action="store_const", dest="loglevel", const=logging.INFO)
parser.add_argument('-q', '--quiet', action='store_true',
                    help='Only log errors and print no summary.')


def _build_parser():
    top = argparse.ArgumentParser(prog='covqed')
    sub = top.add_subparsers(dest='command')
    sub.required = True
    for name, helptext in [
            ('verify-identities', 'Exact commutator-chain checks.'),
            ('conformance', 'Operator identities in the truncated model.'),
            ('descent', 'Sweep the energy of the transformed state in f.')]:
        cmd = sub.add_parser(name, help=helptext, parents=[parser])
        cmd.add_argument('-c', '--config', type=str,
                         default=cq._get_data('default.json'),
                         help='The JSON run configuration file.')
        cmd.add_argument('-o', '--out', type=str, default=None,
                         help='Directory receiving the reports.')
        cmd.add_argument('-s', '--seed', type=int, default=None,
                         help='Seed of the randomized checks.')
        if name == 'verify-identities':
            cmd.add_argument('--mutate-table', action='store_true',
                             help=argparse.SUPPRESS)
        if name == 'conformance':
            cmd.add_argument('--drop-term', action='append', default=[],
                             help=argparse.SUPPRESS)
    rep = sub.add_parser('report', help='Render a JSON report as text.',
                         parents=[parser])
    rep.add_argument('report', type=str, help='The JSON report file.')
    return top


def verify_identities(args, config):
    """Exact commutator chain and the auxiliary identities."""
    log = logging.getLogger(__name__)
    lattice = config.symbolic_lattice()
    chi = config.symbolic_chi(lattice)
    shell = config.symbolic['gauge_shell']
    table = algebra.mutated_table() if args.mutate_table else None
    if table is not None:
        log.warning('Using a deliberately corrupted rewrite table')
    log.info('Symbolic lattice N=%d d=%d', lattice.sites_per_axis,
             lattice.dimension)
    proof = algebra.verify_derivation_chain(lattice, chi, shell, table)
    proof.extend(algebra.identity_suite(
        lattice, chi, shell, table, samples=config.symbolic['samples'],
        seed=config.seed))
    for entry in proof:
        if not entry.passed:
            log.error('Identity %s is falsified: %s', entry.name,
                      entry.residual)
    return 'identities', proof.to_dict(), proof.passed


def conformance(args, config):
    """Heisenberg forms, canonical commutators and guard-banded BCH
    residuals on the Fock model."""
    log = logging.getLogger(__name__)
    model = config.model_config()
    fields = qed.build_fields(model)
    log.info('Fock basis of dimension %d', fields.basis.dim)
    H = qed.build_hamiltonian(fields, model, drop=args.drop_term)
    tol = config.tolerances
    state = None
    if model.fermions and model.charge != 0:
        state = qed.build_reference_state(model, config.state, fields, H,
                                          tol['physical'],
                                          config.descent['expm_tol'],
                                          config.descent['guard_band'])
    d = model.lattice.dimension
    chi = make_chi(model.lattice, 'fourier_mode', mode=[1] + [0] * (d - 1))
    report = qed.conformance_suite(fields, H, chi, tol['conformance'],
                                   tol['guard_band'], state)
    bch = construction.bch_numeric_check(
        construction.build_C(fields, chi), H, fields, chi,
        tol['bch_guard_band'], tol['conformance'])
    # flagged residuals never pass
    bound = -1.0 if bch.flagged else None
    report.add('bch_first', bch.first, bch.guard_band, bound)
    report.add('bch_second', bch.second, bch.guard_band, bound)
    for entry in report:
        if not entry.passed:
            log.error('Conformance check %s fails: residual %.3e',
                      entry.name, entry.residual)
    return 'conformance', report.to_dict(), report.passed


def descent(args, config):
    """Energy sweep of the transformed reference state."""
    log = logging.getLogger(__name__)
    model = config.model_config()
    sweep = config.descent_config()
    tol = config.tolerances
    if not model.fermions or model.charge == 0:
        raise cq.PremiseError('the interacting sector is absent (e = 0 or no '
                              'fermions), so <div j> vanishes identically')
    fields = qed.build_fields(model)
    log.info('Fock basis of dimension %d', fields.basis.dim)
    H = qed.build_hamiltonian(fields, model)
    report = construction.run_energy_descent(model, sweep, config.state,
                                             fields, H, tol['physical'])
    body = report.to_dict()
    csv_fn = os.path.join(config.output, 'descent.csv')
    os.makedirs(config.output, exist_ok=True)
    report.write_csv(csv_fn)
    if not report.passed:
        failed = sorted(k for k, v in report.flags.items() if not v)
        log.error('Descent invariants fail: %s', ', '.join(failed))
    return 'descent', body, report.passed


COMMANDS = {'verify-identities': verify_identities,
            'conformance': conformance,
            'descent': descent}


def main(argv=None):
    """Run one ``covqed`` subcommand and return its exit code."""
    args = _build_parser().parse_args(argv)
    level = logging.ERROR if args.quiet else args.loglevel
    logging.basicConfig(level=level)
    log = logging.getLogger(__name__)

    try:
        if args.command == 'report':
            doc = read_report(args.report)
            if not args.quiet:
                print(render_report(doc))
            return EXIT_PASS if doc['passed'] else EXIT_FALSIFIED
        config = RunConfig.from_config(args.config, output=args.out,
                                       seed=args.seed)
        manifest = RunManifest(config)
        kind, body, passed = COMMANDS[args.command](args, config)
    except (cq.ConfigError, cq.SizingError) as err:
        log.error('%s: %s', type(err).__name__, err)
        return EXIT_CONFIG
    except cq.PremiseError as err:
        log.error('Premise <div j(x)> != 0 unmet: %s', err)
        return EXIT_PREMISE
    except (cq.NumericalError, cq.PhysicalityError) as err:
        log.error('%s: %s', type(err).__name__, err)
        return EXIT_FALSIFIED

    fn = os.path.join(config.output, kind + '.json')
    doc = write_report(fn, kind, body, passed, manifest)
    if not args.quiet:
        print(render_report(doc))
    return EXIT_PASS if passed else EXIT_FALSIFIED
