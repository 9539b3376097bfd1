"""
:mod:`covqed.fock` is the finite-dimensional representation layer: an
occupation basis over truncated boson modes (transverse photons and the two
legs of each ghost doublet) and two-level fermion modes, sparse ladder
operators, the swap metric η that defines the physical inner product, the
action of a matrix exponential on a state, and the guard-band diagnostics
that bound truncation artifacts.

Ghost doublets: for each gauge momentum k there is a q-leg and an r-leg with
a common cutoff, and

* a_Q(k) = lower(q_k),  a_Q*(k) = raise(r_k),
* a_R(k) = lower(r_k),  a_R*(k) = raise(q_k).

η swaps the q and r occupations of every doublet, so η·A†·η maps the matrix
of a_Q(k) onto the matrix of a_Q*(k): the star of the ghost algebra is the
physical adjoint.
"""

from collections import namedtuple
from functools import reduce
from logging import getLogger

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import expm_multiply

import covqed as cq

Mode = namedtuple('Mode', ['sector', 'label', 'leg', 'cutoff'])

_FERMION = 'fermion'
_PHOTON = 'photon'
_GHOST = 'ghost'


class SectorSpec:
    """Which modes exist and how far each boson mode is truncated.

    The global ordering is photons, then ghost legs (q then r for each
    momentum), then fermions. The first mode is the most significant digit
    of a basis index.
    """

    def __init__(self, photon_modes=(), photon_cutoff=1, ghost_modes=(),
                 ghost_cutoff=1, fermion_modes=(), dimension_cap=2 ** 20):
        """
        :param photon_modes: Labels of transverse photon modes, e.g. (k, n)
        :param photon_cutoff: Highest photon occupation kept
        :param ghost_modes: Labels (momenta) of ghost doublets
        :param ghost_cutoff: Highest occupation kept on each leg; an integer,
            or a (q, r) pair (the metric needs both equal)
        :param fermion_modes: Labels of fermion modes
        :param dimension_cap: Largest basis dimension allowed
        """
        if np.ndim(ghost_cutoff) == 0:
            ghost_cutoff = (ghost_cutoff, ghost_cutoff)
        self.photon_cutoff = int(photon_cutoff)
        self.ghost_cutoff = tuple(int(c) for c in ghost_cutoff)
        if self.photon_cutoff < 1 or min(self.ghost_cutoff) < 1:
            raise cq.ConfigError('boson cutoffs must be >= 1')
        self.photon_modes = tuple(photon_modes)
        self.ghost_modes = tuple(ghost_modes)
        self.fermion_modes = tuple(fermion_modes)
        self.dimension_cap = int(dimension_cap)
        modes = [Mode(_PHOTON, label, None, self.photon_cutoff)
                 for label in self.photon_modes]
        for label in self.ghost_modes:
            modes.append(Mode(_GHOST, label, 'q', self.ghost_cutoff[0]))
            modes.append(Mode(_GHOST, label, 'r', self.ghost_cutoff[1]))
        modes += [Mode(_FERMION, label, None, 1)
                  for label in self.fermion_modes]
        self.modes = tuple(modes)
        self._position = {(m.sector, m.label, m.leg): i
                          for i, m in enumerate(self.modes)}

    def __repr__(self):
        return ('SectorSpec(photons=%d@%d, ghosts=%d@%s, fermions=%d)'
                % (len(self.photon_modes), self.photon_cutoff,
                   len(self.ghost_modes), self.ghost_cutoff,
                   len(self.fermion_modes)))

    @property
    def dims(self):
        return [m.cutoff + 1 for m in self.modes]

    def sector_dimensions(self):
        """Dimension contributed by each sector."""
        out = {_PHOTON: 1, _GHOST: 1, _FERMION: 1}
        for m in self.modes:
            out[m.sector] *= m.cutoff + 1
        return out

    def position(self, sector, label, leg=None):
        """Index of a mode in the global ordering.

        :raises KeyError: on a mode missing from every sector
        """
        key = (sector, label, leg)
        if key not in self._position:
            raise KeyError('unknown mode %s %r%s'
                           % (sector, label, ' ' + leg if leg else ''))
        return self._position[key]


class LinOp:
    """Sparse complex operator on an enumerated basis.

    Arithmetic returns new LinOps; the flags describe the operator and are
    verified on demand with :meth:`check_eta_self_adjoint` and
    :meth:`check_gauge_sector_only`.
    """

    __array_priority__ = 20

    def __init__(self, matrix, eta_self_adjoint=False,
                 gauge_sector_only=False):
        self.matrix = sp.csr_matrix(matrix, dtype=complex)
        self.eta_self_adjoint = eta_self_adjoint
        self.gauge_sector_only = gauge_sector_only

    def __repr__(self):
        return 'LinOp(dim=%d, nnz=%d)' % (self.shape[0], self.matrix.nnz)

    @property
    def shape(self):
        return self.matrix.shape

    def __add__(self, other):
        if isinstance(other, LinOp):
            return LinOp(self.matrix + other.matrix)
        if other == 0:
            return self
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, LinOp):
            return LinOp(self.matrix - other.matrix)
        if other == 0:
            return self
        return NotImplemented

    def __rsub__(self, other):
        if other == 0:
            return -self
        return NotImplemented

    def __neg__(self):
        return LinOp(-self.matrix)

    def __mul__(self, scale):
        if isinstance(scale, LinOp):
            return NotImplemented
        return LinOp(self.matrix * scale)

    __rmul__ = __mul__

    def __truediv__(self, scale):
        return LinOp(self.matrix / scale)

    def __matmul__(self, other):
        if isinstance(other, LinOp):
            return LinOp(self.matrix @ other.matrix)
        if isinstance(other, StateVec):
            return StateVec(self.matrix @ other.amplitudes, other.metric)
        return self.matrix @ other

    def dag(self):
        return LinOp(self.matrix.conj().T)

    def toarray(self):
        return self.matrix.toarray()

    def is_zero(self, atol=0.0):
        data = self.matrix.data
        return data.size == 0 or np.max(np.abs(data)) <= atol

    def check_eta_self_adjoint(self, metric, atol=1e-12):
        return (metric.adjoint(self) - self).is_zero(atol)

    def check_gauge_sector_only(self, basis, atol=1e-12):
        """True when the operator commutes with every photon and fermion
        ladder matrix of `basis`."""
        for mode in basis.spec.modes:
            if mode.sector == _GHOST:
                continue
            lower = basis.mode_operator(mode, 'lower')
            for op in (lower, lower.dag()):
                if not commutator(self, op).is_zero(atol):
                    return False
        return True


def commutator(a, b):
    """[a, b] for LinOps."""
    return LinOp(a.matrix @ b.matrix - b.matrix @ a.matrix)


def zero_op(dim):
    return LinOp(sp.csr_matrix((dim, dim), dtype=complex))


def identity_op(dim):
    return LinOp(sp.identity(dim, dtype=complex, format='csr'))


def _lower(cutoff):
    entries = np.sqrt(np.arange(1, cutoff + 1))
    return sp.diags(entries, 1, shape=(cutoff + 1, cutoff + 1),
                    dtype=complex, format='csr')


_PARITY = sp.diags([1.0, -1.0], 0, format='csr', dtype=complex)


class FockBasis:
    """Occupation basis of a :class:`SectorSpec`, with index maps.

    Basis index ↔ occupation vector is the C-order mixed-radix map over
    :attr:`dims`.
    """

    def __init__(self, spec):
        self._log = getLogger(__name__)
        self.spec = spec
        self.dims = spec.dims
        self.dim = int(np.prod(self.dims, dtype=np.int64)) if self.dims else 1
        if self.dim > spec.dimension_cap:
            sectors = spec.sector_dimensions()
            worst = max(sectors, key=sectors.get)
            raise cq.SizingError(
                'basis dimension %d exceeds the cap %d; the %s sector alone '
                'contributes %d' % (self.dim, spec.dimension_cap, worst,
                                    sectors[worst]))
        if self.dims:
            self.occupations = np.array(
                np.unravel_index(np.arange(self.dim), self.dims),
                dtype=np.int32)
        else:
            self.occupations = np.zeros((0, 1), dtype=np.int32)
        self._cache = {}
        self._log.info('Fock basis of dimension %d over %d modes', self.dim,
                       len(self.dims))

    def __repr__(self):
        return 'FockBasis(dim=%d, %r)' % (self.dim, self.spec)

    def index(self, occupation):
        """Basis index of an occupation vector."""
        return int(np.ravel_multi_index(tuple(occupation), self.dims))

    def occupation(self, index):
        return tuple(int(n) for n in self.occupations[:, index])

    def basis_state(self, occupation, metric=None):
        vec = np.zeros(self.dim, dtype=complex)
        vec[self.index(occupation)] = 1.0
        return StateVec(vec, metric)

    def vacuum(self, metric=None):
        return self.basis_state([0] * len(self.dims), metric)

    def mode_operator(self, mode, kind):
        """Ladder operator (``'raise'`` or ``'lower'``) for a :class:`Mode`."""
        return self.ladder(self.spec.modes.index(mode), kind)

    def ladder(self, position, kind):
        """Ladder operator on the mode at `position` in the global ordering.

        Boson modes get √(m+1) elements truncated at the cutoff; fermion
        modes carry the parity string of every lower-indexed fermion mode.
        """
        if kind not in ('raise', 'lower'):
            raise KeyError('ladder kind must be raise or lower, got %r'
                           % (kind,))
        key = (position, kind)
        if key not in self._cache:
            if not 0 <= position < len(self.dims):
                raise KeyError('unknown mode position %r' % (position,))
            mode = self.spec.modes[position]
            op = _lower(mode.cutoff)
            if kind == 'raise':
                op = op.T.tocsr()
            factors = []
            for i, dim in enumerate(self.dims):
                if i == position:
                    factors.append(op)
                elif (mode.sector == _FERMION and i < position
                      and self.spec.modes[i].sector == _FERMION):
                    factors.append(_PARITY)
                else:
                    factors.append(sp.identity(dim, dtype=complex,
                                               format='csr'))
            matrix = reduce(lambda x, y: sp.kron(x, y, format='csr'),
                            factors)
            self._cache[key] = LinOp(
                matrix, gauge_sector_only=mode.sector != _FERMION)
        return self._cache[key]

    def photon(self, label, kind):
        return self.ladder(self.spec.position(_PHOTON, label), kind)

    def fermion_op(self, label, kind):
        return self.ladder(self.spec.position(_FERMION, label), kind)

    def a_Q(self, k):
        return self.ladder(self.spec.position(_GHOST, k, 'q'), 'lower')

    def a_Q_star(self, k):
        return self.ladder(self.spec.position(_GHOST, k, 'r'), 'raise')

    def a_R(self, k):
        return self.ladder(self.spec.position(_GHOST, k, 'r'), 'lower')

    def a_R_star(self, k):
        return self.ladder(self.spec.position(_GHOST, k, 'q'), 'raise')

    def number(self, position):
        return LinOp(sp.diags(self.occupations[position].astype(complex), 0,
                              format='csr'))

    def band_mask(self, g):
        """States with some boson occupation above cutoff − g."""
        mask = np.zeros(self.dim, dtype=bool)
        for i, mode in enumerate(self.spec.modes):
            if mode.sector != _FERMION:
                mask |= self.occupations[i] > mode.cutoff - g
        return mask

    def guarded_mask(self, g):
        """States at least g levels below every boson cutoff."""
        return ~self.band_mask(g)


def enumerate_basis(spec):
    """Enumerate the occupation basis of `spec`.

    :raises SizingError: when the dimension exceeds ``spec.dimension_cap``
    """
    return FockBasis(spec)


class Metric:
    """The swap metric η: exchanges q and r occupations of every doublet.

    η is a permutation matrix, so η² = 1 and η = η†; the vacuum is fixed.
    """

    def __init__(self, basis):
        spec = basis.spec
        if spec.ghost_modes and spec.ghost_cutoff[0] != spec.ghost_cutoff[1]:
            raise cq.ConfigError('ghost legs need equal cutoffs for the '
                                 'metric, got q=%d r=%d' % spec.ghost_cutoff)
        self.basis = basis
        swapped = basis.occupations.copy()
        for label in spec.ghost_modes:
            q = spec.position(_GHOST, label, 'q')
            r = spec.position(_GHOST, label, 'r')
            swapped[[q, r]] = swapped[[r, q]]
        if basis.dims:
            self.perm = np.ravel_multi_index(tuple(swapped), basis.dims)
        else:
            self.perm = np.zeros(1, dtype=int)
        dim = basis.dim
        self.matrix = sp.csr_matrix(
            (np.ones(dim, dtype=complex), (np.arange(dim), self.perm)),
            shape=(dim, dim))

    def apply(self, amplitudes):
        return np.asarray(amplitudes)[self.perm]

    def inner(self, phi, psi):
        """⟨φ|η|ψ⟩."""
        phi = getattr(phi, 'amplitudes', phi)
        psi = getattr(psi, 'amplitudes', psi)
        return np.vdot(phi, self.apply(psi))

    def expectation(self, op, psi):
        """⟨ψ|η A|ψ⟩ for a LinOp or sparse matrix A."""
        psi = getattr(psi, 'amplitudes', psi)
        matrix = getattr(op, 'matrix', op)
        return np.vdot(self.apply(psi), matrix @ psi)

    def adjoint(self, op):
        """Physical adjoint η·A†·η."""
        return LinOp(self.matrix @ op.matrix.conj().T @ self.matrix)


def metric(basis):
    """Swap metric of `basis` (see :class:`Metric`)."""
    return Metric(basis)


def phys_inner(metric_, phi, psi):
    return metric_.inner(phi, psi)


def phys_adjoint(metric_, op):
    return metric_.adjoint(op)


class StateVec:
    """Amplitudes on the basis, with a cached physical norm ⟨ψ|η|ψ⟩.

    Without a metric the representation inner product is used.
    """

    def __init__(self, amplitudes, metric=None):
        self.amplitudes = np.asarray(amplitudes, dtype=complex)
        self.metric = metric
        self._norm = None
        self.leakage = None
        self.residual = None
        self.valid = True

    def __repr__(self):
        return 'StateVec(dim=%d, physical_norm=%.12g)' % (
            len(self.amplitudes), self.physical_norm)

    @property
    def physical_norm(self):
        if self._norm is None:
            if self.metric is None:
                self._norm = float(np.vdot(self.amplitudes, self.amplitudes)
                                   .real)
            else:
                self._norm = float(self.metric.inner(self, self).real)
        return self._norm

    def normalized(self):
        norm = self.physical_norm
        if not norm > 0:
            raise cq.PhysicalityError('state has non-positive physical norm '
                                      '%g' % norm)
        return StateVec(self.amplitudes / np.sqrt(norm), self.metric)

    def expectation(self, op):
        if self.metric is None:
            matrix = getattr(op, 'matrix', op)
            return np.vdot(self.amplitudes, matrix @ self.amplitudes)
        return self.metric.expectation(op, self)


def _exp_steps(matrix, vec, steps):
    scaled = matrix / steps
    for _ in range(steps):
        vec = expm_multiply(scaled, vec)
    return vec


def expm_action(A, psi, tol=1e-12, max_steps=64):
    """e^{A}ψ with an a posteriori residual estimate.

    The exponential action is computed with ``scipy.sparse.linalg.
    expm_multiply`` over s and 2s equal substeps; the relative difference of
    the two results is the residual estimate. s doubles until the estimate
    drops below `tol`.

    ``expm_multiply`` picks its own Taylor degree for double precision, so
    both results are already truncation-free to about machine epsilon times
    ‖A‖ and the number of steps. The estimate therefore bounds the rounding
    accumulated along the substeps, and the error against the exact e^{A}ψ
    stays within estimate + `tol` (checked against a dense ``expm``). It
    does not detect a wrong generator.

    :param A: LinOp or sparse matrix
    :param psi: StateVec or amplitude array
    :raises NumericalError: when `max_steps` is reached first
    """
    if not tol > 0:
        raise cq.ConfigError('expm tolerance must be positive')
    matrix = sp.csr_matrix(getattr(A, 'matrix', A), dtype=complex)
    metric_ = getattr(psi, 'metric', None)
    vec = np.asarray(getattr(psi, 'amplitudes', psi), dtype=complex)
    if matrix.nnz == 0 or not np.any(matrix.data):
        return StateVec(vec.copy(), metric_)
    log = getLogger(__name__)
    steps = 1
    current = _exp_steps(matrix, vec, steps)
    while True:
        refined = _exp_steps(matrix, vec, 2 * steps)
        scale = max(np.linalg.norm(refined), np.finfo(float).tiny)
        residual = np.linalg.norm(refined - current) / scale
        log.debug('expm_action with %d substeps: residual %.3e', 2 * steps,
                  residual)
        if residual <= tol:
            out = StateVec(refined, metric_)
            out.residual = residual
            return out
        steps *= 2
        if 2 * steps > max_steps:
            raise cq.NumericalError('expm_action did not reach tol %g '
                                    '(residual %.3e)' % (tol, residual),
                                    residual)
        current = refined


def guard_band_check(basis, psi, g, metric_=None):
    """Weight of `psi` on states with an occupation above cutoff − g.

    Ghost legs are weighed with the physical pairing |ψ_i|·|ψ_η(i)|, every
    other sector with the ordinary weight |ψ_i|².
    """
    if g < 1:
        raise cq.ConfigError('guard band needs g >= 1, got %r' % (g,))
    metric_ = metric_ or getattr(psi, 'metric', None)
    amps = np.asarray(getattr(psi, 'amplitudes', psi))
    mask = basis.band_mask(g)
    paired = amps if metric_ is None else metric_.apply(amps)
    return float(np.sum(np.abs(amps[mask]) * np.abs(paired[mask])))


def guarded_residual(op, basis, g):
    """Largest |entry| of `op` restricted to guard-banded columns.

    With g = 0 the whole matrix is inspected.
    """
    matrix = getattr(op, 'matrix', op)
    if g > 0:
        keep = basis.guarded_mask(g)
        matrix = sp.csc_matrix(matrix)[:, np.flatnonzero(keep)]
    data = sp.csr_matrix(matrix).data
    return float(np.max(np.abs(data))) if data.size else 0.0
