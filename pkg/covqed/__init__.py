"""
`covqed` is a desk-scale workbench for the energy of physical states of QED
in a covariant gauge. It checks the operator identities of the construction
exactly, realizes the construction in a truncated Fock space, and sweeps the
energy of the transformed state against the scale of the gauge function.

The main procedural entry points are:

* :func:`~.algebra.verify_derivation_chain` (exact identities)
* :func:`~.qed.conformance_suite` (representation conformance)
* :func:`~.construction.run_energy_descent` (the energy sweep)

The command line tool is ``covqed`` (:func:`.__exec__.main`).
"""

import os
import logging

__title__ = 'covqed'
__ver__ = '0.3.1'

# Add logging (defaults to null, but can be picked up by any logger)
logging.getLogger(__name__).addHandler(logging.NullHandler())

# Identify location of covqed installation
_ROOT = os.path.abspath(os.path.dirname(__file__))


def _get_data(fn):
    """Shipped configurations are sourced from the covqed installation

    :param fn: The data file name to retrieve from the `covqed` installation.
    """
    return os.path.join(_ROOT, 'data', fn)


class CovQEDError(Exception):
    """Base class of every error raised on purpose by covqed."""


class ConfigError(CovQEDError):
    """Invalid configuration: rejected before any computation starts."""


class SizingError(CovQEDError):
    """The Fock basis would exceed the configured dimension cap."""


class NumericalError(CovQEDError):
    """A numerical routine failed to converge.

    :param residual: The last residual estimate reached.
    """

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class PhysicalityError(CovQEDError):
    """A state was not physical enough for the requested reduction."""


class PremiseError(CovQEDError):
    """The reference state does not satisfy <v|div j(x)|v> != 0."""


from .modes import LatticeSpec, ScalarField, build_lattice, make_chi
from .fock import SectorSpec, FockBasis, LinOp, Metric
from .config import RunConfig, RunManifest
