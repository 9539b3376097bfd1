"""
:mod:`covqed.qed` assembles the lattice fields and the covariant-gauge
Hamiltonian on a truncated Fock space, runs the conformance suite that ties
the representation to the Heisenberg forms of Maxwell's equations, and
builds physical reference states carrying a nonzero ⟨∇·j⟩.

Every field is a :class:`MomentumField`, F(x) = Σ_k F̃(k) φ_k(x). Field
content (k runs over the gauge momenta, w = |κ(k)|):

* G(x)   = i Σ √w [a_Q φ_k − a_Q* φ_k*]
* E_L(x) = i Σ (κ/√w) [a_Q φ_k − a_Q* φ_k*],  E_T from the photon modes
* A⁰(x)  = Σ (1/2√w) [a_R φ_k + a_R* φ_k*]
* A_L(x) = Σ (κ/2w^{3/2}) [a_R φ_k + a_R* φ_k*],  A_T from the photon modes

The fermion field is built from free Dirac spinors (:mod:`covqed.dirac`),
ψ̃(p) = Σ_s b(p,s) u(p,s) + d†(−p,s) v(−p,s), with the lattice momentum κ in
place of p. The currents are the vacuum-subtracted bilinears
j₀(k) = (e/√V) Σ_p :ψ̃†(p) ψ̃(p+k): and j_i(k) the same with α_i inserted.
"""

import cmath
from collections import namedtuple
from collections.abc import Sequence
from functools import reduce
from logging import getLogger
from pprint import PrettyPrinter

import numpy as np
import scipy.sparse as sp
from scipy.linalg import eigh, null_space

import covqed as cq
from covqed.dirac import PARTICLE, DiracAlgebra, energy, mode_labels
from covqed.fock import (LinOp, SectorSpec, commutator, enumerate_basis,
                         guard_band_check, guarded_residual, metric,
                         zero_op)
from covqed.modes import build_lattice, polarization_basis

HAMILTONIAN_TERMS = ('electric', 'magnetic', 'G_div_A', 'A0_div_E',
                     'gauge_fixing', 'charge_coupling', 'current_coupling',
                     'fermion')


class ModelConfig:
    """Lattice, sectors and couplings of one model.

    .. automethod:: __repr__
    """

    def __init__(self, L, N, d, photon_cutoff=1, ghost_cutoff=2,
                 fermions=True, mass=0.0, charge=0.0, gamma=1.0,
                 normal_order=True, dimension_cap=2 ** 20, gauge_shell=None,
                 gauge_momenta=None, fermion_momenta=None,
                 antiparticles=True):
        """
        :param L: Box length
        :param N: Sites per axis
        :param d: Dimension (1 or 3)
        :param photon_cutoff: Occupation cutoff of each photon mode
        :param ghost_cutoff: Occupation cutoff of each ghost leg
        :param fermions: Whether the fermion sector is present
        :param mass: Fermion mass m ≥ 0
        :param charge: Coupling e
        :param gamma: Gauge parameter γ
        :param normal_order: Subtract the bare vacuum energy from H
        :param dimension_cap: Largest allowed basis dimension
        :param gauge_shell: Optional |n|² bound on the gauge momenta
        :param gauge_momenta: Optional explicit gauge momenta, closed under
            k → −k and with κ ≠ 0
        :param fermion_momenta: Optional fermion momenta; all lattice
            momenta by default
        :param antiparticles: Keep the antiparticle branch
        """
        if not mass >= 0:
            raise cq.ConfigError('mass must be >= 0, got %r' % (mass,))
        self.lattice = build_lattice(L, N, d)
        self.mass = float(mass)
        self.charge = float(charge)
        self.gamma = float(gamma)
        self.normal_order = bool(normal_order)
        self.gauge_shell = gauge_shell
        self.fermions = bool(fermions)
        self.antiparticles = bool(antiparticles)
        self.dirac = DiracAlgebra(self.lattice.dimension)
        if gauge_momenta is None:
            self.gauge = self.lattice.gauge_modes(gauge_shell)
        elif gauge_shell is not None:
            raise cq.ConfigError('gauge_momenta and gauge_shell cannot be '
                                 'combined')
        else:
            self.gauge = self._explicit_gauge(gauge_momenta)
        ghosts = [_label(n) for n in self.lattice.mode_index[self.gauge]]
        photons = ([(n, pol) for n in ghosts for pol in (1, 2)]
                   if self.lattice.dimension == 3 else [])
        if fermion_momenta is None:
            momenta = [_label(n) for n in self.lattice.all_modes]
        else:
            momenta = self._explicit_momenta(fermion_momenta)
        fermion_modes = (mode_labels(momenta, self.dirac.spins,
                                     self.antiparticles)
                         if fermions else [])
        self.sectors = SectorSpec(photons, photon_cutoff, ghosts,
                                  ghost_cutoff, fermion_modes, dimension_cap)

    def __repr__(self):
        """Indicates ModelConfig and pretty prints its parameters"""
        return 'ModelConfig\n' + PrettyPrinter().pformat({
            'lattice': (self.lattice.box_length, self.lattice.sites_per_axis,
                        self.lattice.dimension),
            'sectors': repr(self.sectors),
            'mass': self.mass, 'charge': self.charge, 'gamma': self.gamma})

    @classmethod
    def from_dict(cls, block):
        """Build from the ``model`` block of a run configuration."""
        return cls(**block)

    def with_gamma(self, gamma):
        out = object.__new__(ModelConfig)
        out.__dict__.update(self.__dict__)
        out.gamma = float(gamma)
        return out

    def _vector(self, n, what):
        n = np.atleast_1d(n)
        if n.shape != (self.lattice.dimension,):
            raise cq.ConfigError('%s %r needs %d components'
                                 % (what, n.tolist(), self.lattice.dimension))
        return n

    def _explicit_gauge(self, momenta):
        lat = self.lattice
        chosen = set()
        for n in momenta:
            n = self._vector(n, 'gauge momentum')
            try:
                i = lat.index_of(n)
            except KeyError:
                raise cq.ConfigError('gauge momentum %r is zero'
                                     % (n.tolist(),))
            if not np.linalg.norm(lat.kappa[i]) > 0:
                raise cq.ConfigError('gauge momentum %r has kappa = 0'
                                     % (n.tolist(),))
            chosen.add(i)
        missing = [lat.mode_index[i].tolist() for i in sorted(chosen)
                   if lat.partner(i) not in chosen]
        if missing:
            raise cq.ConfigError('gauge momenta must be closed under k -> -k;'
                                 ' missing the partners of %s' % (missing,))
        return np.array(sorted(chosen), dtype=int)

    def _explicit_momenta(self, momenta):
        out = []
        for n in momenta:
            key = self.lattice.wrap(self._vector(n, 'fermion momentum'))
            if key not in out:
                out.append(key)
        if not out:
            raise cq.ConfigError('fermion_momenta must not be empty')
        return out


def _label(n):
    return tuple(int(c) for c in n)


def _wave(lattice, n):
    """e^{ik·x}/√V for an arbitrary integer momentum n."""
    k = lattice.unit * np.asarray(n, dtype=float)
    return np.exp(1j * (lattice.sites @ k)) / np.sqrt(lattice.volume)


class MomentumField(Sequence):
    """Site-indexed operator field held by its momentum components,
    F(x) = Σ_k F̃(k) φ_k(x).

    Indexing by site builds the LinOp F(x); derivatives, projections and
    lattice sums act on the components.
    """

    def __init__(self, lattice, dim, components=None):
        self.lattice = lattice
        self.dim = dim
        self.components = {}
        for n, op in (components or {}).items():
            self.add(n, op)

    def __repr__(self):
        return 'MomentumField(%d components, dim %d)' % (
            len(self.components), self.dim)

    def __len__(self):
        return self.lattice.n_sites

    def __getitem__(self, x):
        if isinstance(x, slice):
            return [self[i] for i in range(*x.indices(len(self)))]
        if not -len(self) <= x < len(self):
            raise IndexError('site %r out of range' % (x,))
        mat = sp.csr_matrix((self.dim, self.dim), dtype=complex)
        for n, op in self.components.items():
            mat = mat + _wave(self.lattice, n)[x] * op.matrix
        return LinOp(mat)

    def add(self, n, op):
        """Accumulate `op` on the component at momentum `n` (wrapped)."""
        key = self.lattice.wrap(n)
        if key in self.components:
            op = self.components[key] + op
        self.components[key] = op
        return self

    def component(self, n):
        key = self.lattice.wrap(n)
        return self.components.get(key) or zero_op(self.dim)

    def _derived(self, pairs):
        return MomentumField(self.lattice, self.dim, dict(pairs))

    def __add__(self, other):
        out = self._derived(self.components.items())
        for n, op in other.components.items():
            out.add(n, op)
        return out

    def __sub__(self, other):
        return self + other * -1

    def __mul__(self, scale):
        return self._derived((n, op * scale)
                             for n, op in self.components.items())

    __rmul__ = __mul__

    def derivative(self, axis):
        """∂_axis F: each component times iκ_axis(k)."""
        out = {}
        for n, op in self.components.items():
            c = self.lattice.kappa_of(n)[axis]
            if c != 0:
                out[n] = op * (1j * c)
        return self._derived(out.items())

    def restricted(self, momenta):
        """The field keeping only the components at `momenta`."""
        keep = {self.lattice.wrap(n) for n in momenta}
        return self._derived((n, op) for n, op in self.components.items()
                             if n in keep)

    def commutator(self, op):
        """[op, F(x)] as a field."""
        return self._derived((n, commutator(op, c))
                             for n, c in self.components.items())

    def lattice_sum(self, other):
        """a^d Σₓ F(x) G(x) = Σ_k F̃(k) G̃(−k)."""
        mat = sp.csr_matrix((self.dim, self.dim), dtype=complex)
        for n, op in self.components.items():
            partner = self.lattice.wrap(np.negative(n))
            if partner in other.components:
                mat = mat + op.matrix @ other.components[partner].matrix
        return LinOp(mat)

    def integrate(self, values):
        """a^d Σₓ F(x) f(x) for a c-number field f."""
        values = np.asarray(values)
        lat = self.lattice
        mat = sp.csr_matrix((self.dim, self.dim), dtype=complex)
        for n, op in self.components.items():
            weight = lat.cell * np.sum(_wave(lat, n) * values)
            if weight != 0:
                mat = mat + weight * op.matrix
        return LinOp(mat)

    def expectation(self, vec):
        """⟨F(x)⟩ at every site."""
        out = np.zeros(len(self), dtype=complex)
        for n, op in self.components.items():
            out += vec.expectation(op) * _wave(self.lattice, n)
        return out


def _empty(lattice, dim):
    return MomentumField(lattice, dim)


FieldSet = namedtuple('FieldSet', [
    'config', 'lattice', 'basis', 'metric', 'gauge', 'kappa', 'w', 'G', 'E',
    'B', 'A', 'A0', 'psi', 'j0', 'j', 'j0_k', 'j_k', 'Omega', 'energies',
    'kinetic'])
FieldSet.__doc__ = """Operator fields of one model.

Scalar fields are :class:`MomentumField`; vector fields are lists of them
over components and ``psi`` is a list over spinor components. ``j0_k``,
``j_k`` and ``Omega`` are keyed by gauge momentum label, ``energies`` by
fermion mode label, and ``kinetic`` is the normal-ordered Dirac energy.
"""


def build_fields(config):
    """Build every field operator of `config` on its Fock basis.

    :raises SizingError: when the basis exceeds the dimension cap
    """
    log = getLogger(__name__)
    lat = config.lattice
    basis = enumerate_basis(config.sectors)
    eta = metric(basis)
    dim, d = basis.dim, lat.dimension
    gauge = list(config.sectors.ghost_modes)
    kappa = {n: lat.kappa_of(n) for n in gauge}
    w = {n: float(np.linalg.norm(kappa[n])) for n in gauge}
    pols = polarization_basis([kappa[n] for n in gauge]).vectors \
        if gauge else np.zeros((0, 0, d))

    G, A0 = _empty(lat, dim), _empty(lat, dim)
    E = [_empty(lat, dim) for _ in range(d)]
    A = [_empty(lat, dim) for _ in range(d)]
    for m, n in enumerate(gauge):
        minus = lat.wrap(np.negative(n))
        root = np.sqrt(w[n])
        aQ, aQs = basis.a_Q(n), basis.a_Q_star(n)
        aR, aRs = basis.a_R(n), basis.a_R_star(n)
        # φ_k* = φ_{-k}
        G.add(n, aQ * (1j * root)).add(minus, aQs * (-1j * root))
        A0.add(n, aR / (2 * root)).add(minus, aRs / (2 * root))
        for i in range(d):
            c = kappa[n][i]
            if c == 0:
                continue
            E[i].add(n, aQ * (1j * c / root)).add(minus,
                                                  aQs * (-1j * c / root))
            A[i].add(n, aR * (c / (2 * root ** 3))).add(
                minus, aRs * (c / (2 * root ** 3)))
        for pol in range(pols.shape[1]):
            ann = basis.photon((n, pol + 1), 'lower')
            cre = basis.photon((n, pol + 1), 'raise')
            for i in range(d):
                eps = pols[m, pol, i]
                if eps == 0:
                    continue
                E[i].add(n, ann * (1j * eps * root / np.sqrt(2))).add(
                    minus, cre * (-1j * eps * root / np.sqrt(2)))
                A[i].add(n, ann * (eps / (np.sqrt(2) * root))).add(
                    minus, cre * (eps / (np.sqrt(2) * root)))
    B = curl(A)

    psi, j0, j, energies, kinetic = _fermion_fields(config, basis)
    j0_k = {n: j0.component(n) for n in gauge}
    j_k = {n: [j[i].component(n) for i in range(d)] for n in gauge}
    Omega = {n: basis.a_Q(n) + j0_k[n] / (2 * w[n] ** 1.5) for n in gauge}
    log.info('Built fields on %d sites over %d gauge momenta (dim %d)',
             lat.n_sites, len(gauge), dim)
    return FieldSet(config, lat, basis, eta, gauge, kappa, w, G, E, B, A,
                    A0, psi, j0, j, j0_k, j_k, Omega, energies, kinetic)


def curl(vector):
    """∇×F of a three-component field; the zero field in one dimension."""
    if len(vector) == 1:
        return [_empty(vector[0].lattice, vector[0].dim)]
    out = []
    for (j1, c1), (j2, c2) in [((1, 2), (2, 1)), ((2, 0), (0, 2)),
                               ((0, 1), (1, 0))]:
        out.append(vector[c1].derivative(j1) - vector[c2].derivative(j2))
    return out


def _fermion_fields(config, basis):
    """Spinor components of ψ, the currents j₀ and j, the mode energies and
    the normal-ordered Dirac Hamiltonian."""
    lat, dirac = config.lattice, config.dirac
    dim, d = basis.dim, lat.dimension
    labels = list(config.sectors.fermion_modes)
    psi = [_empty(lat, dim) for _ in range(dirac.components)]
    energies = {}
    for label in labels:
        n, s, branch = label
        kap = lat.kappa_of(n)
        energies[label] = energy(kap, config.mass)
        if branch == PARTICLE:
            spinor = dirac.uspinor(kap, s, config.mass)
            op, target = basis.fermion_op(label, 'lower'), n
        else:
            spinor = dirac.vspinor(kap, s, config.mass)
            op = basis.fermion_op(label, 'raise')
            target = lat.wrap(np.negative(n))
        for a, c in enumerate(spinor):
            if c != 0:
                psi[a].add(target, op * c)

    scale = config.charge / np.sqrt(lat.volume)
    eye = np.eye(dirac.components)
    all_k = [_label(n) for n in lat.all_modes]
    j0 = _empty(lat, dim)
    j = [_empty(lat, dim) for _ in range(d)]
    if labels:
        for k in all_k:
            rho = _bilinear(psi, lambda p: eye, k, dim, normal=True)
            if rho is not None:
                j0.add(k, rho * scale)
            for i in range(d):
                flow = _bilinear(psi, lambda p: dirac.alpha[i], k, dim,
                                 normal=True)
                if flow is not None:
                    j[i].add(k, flow * scale)
    kinetic = _bilinear(
        psi, lambda p: dirac.hamiltonian(lat.kappa_of(p), config.mass),
        (0,) * d, dim, normal=True) if labels else None
    return psi, j0, j, energies, kinetic or zero_op(dim)


def _bilinear(psi, vertex, k, dim, normal):
    """Σ_p ψ̃†(p)·M(p)·ψ̃(p+k), vacuum expectation removed when `normal`."""
    lattice = psi[0].lattice
    mat = None
    for p in set().union(*(f.components for f in psi)):
        q = lattice.wrap(np.add(p, k))
        m = vertex(p)
        for a, row in enumerate(m):
            left = psi[a].components.get(p)
            if left is None:
                continue
            left = left.dag().matrix
            for b, c in enumerate(row):
                right = psi[b].components.get(q)
                if c == 0 or right is None:
                    continue
                term = c * (left @ right.matrix)
                mat = term if mat is None else mat + term
    if mat is None:
        return None
    mat = sp.csr_matrix(mat)
    if normal:
        mat = mat - mat[0, 0] * sp.identity(dim, dtype=complex, format='csr')
    return LinOp(mat)


def divergence(fields, vector):
    """Spectral divergence of a vector field."""
    return reduce(lambda a, b: a + b,
                  [vector[i].derivative(i) for i in range(len(vector))])


def gradient(fields, scalar):
    return [scalar.derivative(i) for i in range(fields.lattice.dimension)]


def gauge_current(fields):
    """The current restricted to the gauge momenta, P_g j(x); the part of j
    that couples to A."""
    return [component.restricted(fields.gauge) for component in fields.j]


def projected_density(fields):
    """j₀ restricted to the gauge momenta, P_g j₀(x)."""
    return fields.j0.restricted(fields.gauge)


class Hamiltonian(LinOp):
    """H = H₀ + H_I, keeping both parts and the subtracted vacuum energy."""

    def __init__(self, free, interaction, vacuum_energy=0.0):
        super().__init__(free.matrix + interaction.matrix,
                         eta_self_adjoint=True)
        self.free = free
        self.interaction = interaction
        self.vacuum_energy = vacuum_energy


def build_hamiltonian(fields, config, drop=()):
    """Lattice sum a^d Σₓ of the covariant-gauge energy density.

    H₀ = ½E² + ½|∇×A|² + G ∇·A − A⁰ ∇·E − ½(1−γ)G² plus the Dirac energy
    ψ†(α·κ + βm)ψ, and H_I = j₀A⁰ − j·A. With ``config.normal_order`` the
    bare Fock vacuum is shifted to energy 0.

    :param drop: names from :data:`HAMILTONIAN_TERMS` to leave out; exists
        to corrupt H on purpose
    """
    unknown = set(drop) - set(HAMILTONIAN_TERMS)
    if unknown:
        raise cq.ConfigError('unknown Hamiltonian terms %s'
                             % sorted(unknown))
    log = getLogger(__name__)
    dim, d = fields.basis.dim, fields.lattice.dimension
    free = zero_op(dim)
    inter = zero_op(dim)
    G = fields.G
    if 'electric' not in drop:
        for i in range(d):
            free = free + 0.5 * fields.E[i].lattice_sum(fields.E[i])
    if 'magnetic' not in drop and d == 3:
        for i in range(d):
            free = free + 0.5 * fields.B[i].lattice_sum(fields.B[i])
    if 'G_div_A' not in drop:
        free = free + G.lattice_sum(divergence(fields, fields.A))
    if 'A0_div_E' not in drop:
        free = free - fields.A0.lattice_sum(divergence(fields, fields.E))
    if 'gauge_fixing' not in drop and config.gamma != 1:
        free = free - 0.5 * (1 - config.gamma) * G.lattice_sum(G)
    if 'fermion' not in drop:
        free = free + fields.kinetic
    if 'charge_coupling' not in drop:
        inter = inter + fields.j0.lattice_sum(fields.A0)
    if 'current_coupling' not in drop:
        for i in range(d):
            inter = inter - fields.j[i].lattice_sum(fields.A[i])
    free, inter = free.matrix, inter.matrix
    vacuum = 0.0
    if config.normal_order:
        vacuum = complex(free[0, 0] + inter[0, 0]).real
        free = free - vacuum * sp.identity(dim, dtype=complex, format='csr')
    log.debug('Hamiltonian with %d nonzeros, vacuum shift %.6g',
              free.nnz + inter.nnz, vacuum)
    return Hamiltonian(LinOp(free), LinOp(inter), vacuum)


ConformanceEntry = namedtuple('ConformanceEntry',
                              ['name', 'residual', 'guard_band', 'passed'])


class ConformanceReport:
    """Residual norms of the operator identities, one entry per check."""

    def __init__(self, tolerance):
        self.tolerance = tolerance
        self.entries = []

    def __repr__(self):
        return 'ConformanceReport(%d/%d passed)' % (
            sum(e.passed for e in self.entries), len(self.entries))

    def __iter__(self):
        return iter(self.entries)

    def __getitem__(self, name):
        for entry in self.entries:
            if entry.name == name:
                return entry
        raise KeyError('no conformance check named %r' % (name,))

    @property
    def passed(self):
        return all(e.passed for e in self.entries)

    def add(self, name, residual, guard_band, tolerance=None):
        tol = self.tolerance if tolerance is None else tolerance
        entry = ConformanceEntry(name, float(residual), guard_band,
                                 bool(residual <= tol))
        getLogger(__name__).debug('%s: residual %.3e (g=%d)', name, residual,
                                  guard_band)
        self.entries.append(entry)
        return entry

    def to_dict(self):
        return [dict(e._asdict()) for e in self.entries]


def _delta_g(fields, x, y):
    """Σ over gauge momenta of φ_k(x)φ_k*(y)."""
    lat = fields.lattice
    return sum(_wave(lat, n)[x] * np.conj(_wave(lat, n)[y])
               for n in fields.gauge)


def _field_residual(field, basis, g):
    return max([guarded_residual(field[x], basis, g)
                for x in range(len(field))] or [0.0])


def conformance_suite(fields, H, chi=None, tolerance=1e-10, g=2,
                      state=None, pairs=None):
    """Residuals of the Heisenberg forms and the canonical commutators.

    Operator residuals are largest absolute matrix entries over the
    columns at least `g` levels below every boson cutoff.

    :param chi: real gauge function for the [Ω(k), C] check
    :param state: physical state for the γ-independence check
    :param pairs: site pairs (x, y) for the local commutators; all pairs
        by default
    """
    basis, lat = fields.basis, fields.lattice
    n_sites, d = lat.n_sites, lat.dimension
    dim = basis.dim
    report = ConformanceReport(tolerance)
    pairs = pairs or [(x, y) for x in range(n_sites) for y in range(n_sites)]

    grad_g = gradient(fields, fields.G)
    curl_b = curl(fields.B)
    ampere = 0.0
    current = gauge_current(fields)
    for i in range(d):
        lhs = fields.E[i].commutator(H) * 1j
        ampere = max(ampere, _field_residual(
            lhs - (curl_b[i] - current[i] - grad_g[i]), basis, g))
    report.add('heisenberg_ampere', ampere, g)

    lhs = fields.G.commutator(H) * 1j
    gauss = _field_residual(lhs + divergence(fields, fields.E)
                            - projected_density(fields), basis, g)
    report.add('heisenberg_gauss', gauss, g)

    ge, je, a0g, ae = 0.0, 0.0, 0.0, 0.0
    eye = sp.identity(dim, dtype=complex, format='csr')
    for x, y in pairs:
        delta = _delta_g(fields, x, y)
        G_y = fields.G[y]
        E_y = [fields.E[jj][y] for jj in range(d)]
        a0g = max(a0g, guarded_residual(
            commutator(fields.A0[x], G_y) + LinOp(1j * delta * eye),
            basis, g))
        G_x = fields.G[x]
        for i in range(d):
            ge = max(ge, guarded_residual(commutator(G_x, E_y[i]), basis, g))
            j_x, A_x = fields.j[i][x], fields.A[i][x]
            for jj in range(d):
                je = max(je, guarded_residual(commutator(j_x, E_y[jj]),
                                              basis, 0))
                target = commutator(A_x, E_y[jj])
                if i == jj:
                    target = target + LinOp(1j * delta * eye)
                ae = max(ae, guarded_residual(target, basis, g))
    report.add('[G,E]', ge, g)
    report.add('[j,E]', je, 0)
    report.add('[A0,G]', a0g, g)
    report.add('[A,Pi]', ae, g)

    if chi is not None:
        from covqed.construction import build_C
        C = build_C(fields, chi)
        omega_c = max([guarded_residual(commutator(op, C), basis, 0)
                       for op in fields.Omega.values()] or [0.0])
        report.add('[Omega,C]', omega_c, 0)

    herm = (fields.metric.adjoint(H) - H)
    report.add('eta_self_adjoint_H', guarded_residual(herm, basis, 0), 0)

    if state is not None:
        shift = -0.5 * state.vector.expectation(
            fields.G.lattice_sum(fields.G))
        report.add('gamma_independence', abs(shift), 0)
    return report


class PhysicalState:
    """A reference state satisfying Ω(k)|v⟩ = 0.

    :attr:`divergence` holds D(x) = ⟨v|∇·j(x)|v⟩ and :attr:`density`
    ⟨v|j₀(x)|v⟩, both with the physical metric.
    """

    def __init__(self, vector, residual, divergence, density, energy,
                 leakage, recipe):
        self.vector = vector
        self.residual = residual
        self.divergence = divergence
        self.density = density
        self.energy = energy
        self.leakage = leakage
        self.recipe = recipe

    def __repr__(self):
        return 'PhysicalState\n' + PrettyPrinter().pformat({
            'energy': self.energy, 'residual': self.residual,
            'divergence_norm': float(np.linalg.norm(self.divergence)),
            'leakage': self.leakage})


def constraint_residual(fields, vector):
    """max_k ‖Ω(k)ψ‖ in the representation norm."""
    amps = getattr(vector, 'amplitudes', vector)
    return max([float(np.linalg.norm(op.matrix @ amps))
                for op in fields.Omega.values()] or [0.0])


def _wavepacket(fields, recipe):
    basis, lat = fields.basis, fields.lattice
    spins = fields.config.dirac.spins
    momenta = [lat.wrap(np.atleast_1d(p)) for p in recipe['momenta']]
    if len(momenta) != 2:
        raise cq.ConfigError('state recipe needs exactly two momenta')
    s = recipe.get('helicity')
    s = spins[0] if s is None else s
    if s not in spins:
        raise cq.ConfigError('helicity %r is not one of %s' % (s, spins))
    b = float(recipe.get('amplitude', 0.1))
    if not 0 <= b <= 1:
        raise cq.ConfigError('state amplitude must lie in [0, 1], got %r'
                             % (b,))
    phase = cmath.exp(1j * float(recipe.get('phase', 0.0)))
    amps = np.zeros(basis.dim, dtype=complex)
    for p, c in zip(momenta, (np.sqrt(1 - b * b), b * phase)):
        occupation = [0] * len(basis.dims)
        try:
            occupation[basis.spec.position('fermion', (p, s, PARTICLE))] = 1
        except KeyError:
            raise cq.ConfigError('state momentum %r is not a fermion mode of '
                                 'the model' % (list(p),))
        amps[basis.index(occupation)] += c
    norm = np.linalg.norm(amps)
    return amps / norm if norm > 0 else amps


def dressing_generator(fields):
    """−Σ_k a_R*(k) j₀(k) / 2w^{3/2}, the exponent of the physical dressing."""
    basis = fields.basis
    out = zero_op(basis.dim)
    for n in fields.gauge:
        out = out - (basis.a_R_star(n) @ fields.j0_k[n]) / (
            2 * fields.w[n] ** 1.5)
    return out


def build_reference_state(config, recipe, fields=None, H=None,
                          tolerance=1e-10, expm_tol=1e-12, guard_band=2):
    """Dressed two-momentum fermion wavepacket in the photon and ghost vacua.

    v = exp(−Σ_k a_R*(k) j₀(k)/2w^{3/2}) · (wavepacket ⊗ vacua), normalized
    with the physical metric, so that Ω(k)v = 0 up to truncation.

    :param recipe: ``{'momenta': [p1, p2], 'amplitude': b, 'phase': θ,
        'helicity': s}``; the wavepacket is √(1−b²)|p1, s⟩ + b e^{iθ}|p2, s⟩
        in the particle branch
    :raises PremiseError: when ⟨∇·j⟩ vanishes identically
    :raises PhysicalityError: when the constraint residual exceeds
        `tolerance`
    """
    log = getLogger(__name__)
    if not config.fermions or config.charge == 0:
        raise cq.PremiseError('the interacting sector is absent (e = 0 or no '
                              'fermions), so <div j> vanishes identically')
    fields = fields or build_fields(config)
    H = H or build_hamiltonian(fields, config)
    basis, eta = fields.basis, fields.metric
    packet = _wavepacket(fields, recipe)
    vec = cq.fock.expm_action(dressing_generator(fields),
                              cq.fock.StateVec(packet, eta), tol=expm_tol)
    vec = vec.normalized()
    residual = constraint_residual(fields, vec)
    D = divergence(fields, gauge_current(fields)).expectation(vec).real
    rho = fields.j0.expectation(vec).real
    energy_ = float(vec.expectation(H).real)
    leakage = guard_band_check(basis, vec, guard_band, eta)
    vec.leakage = leakage
    state = PhysicalState(vec, residual, D, rho, energy_, leakage, recipe)
    log.info('Reference state: E=%.6g residual=%.3e |D|=%.3e leakage=%.3e',
             energy_, residual, np.linalg.norm(D), leakage)
    if not np.linalg.norm(D) > tolerance:
        raise cq.PremiseError('the reference state has <div j(x)> = 0 at '
                              'every site; the descent premise is unmet')
    if residual > tolerance:
        raise cq.PhysicalityError('constraint residual %.3e exceeds %.3e'
                                  % (residual, tolerance))
    return state


def expectation(state, target):
    """Physical-metric expectation of a LinOp, or of a field (a
    :class:`MomentumField` or a list of them) as an array."""
    vec = getattr(state, 'vector', state)
    if isinstance(target, MomentumField):
        return target.expectation(vec)
    if isinstance(target, (list, tuple)):
        return np.array([expectation(vec, t) for t in target])
    return vec.expectation(target)


def continuity_divergence(fields, H, state):
    """−i⟨[H, j₀(x)]⟩ projected on the gauge momenta, the divergence of
    ⟨j⟩ predicted by charge conservation."""
    values = -1j * fields.j0.commutator(H).expectation(
        getattr(state, 'vector', state))
    return np.real(fields.lattice.project(values, fields.config.gauge))


def total_charge(fields):
    """a^d Σₓ j₀(x)."""
    return fields.j0.integrate(np.ones(fields.lattice.n_sites))


def physical_spectrum(fields, H, tolerance=1e-8):
    """Eigenvalues of H on the physical subspace of a small basis.

    The subspace is the common null space of the Ω(k) (singular values
    below `tolerance`), with its zero-norm directions divided out: the Gram
    matrix of η on the null space is diagonalized and only directions with
    a positive physical norm are kept.

    :raises SizingError: above dimension 512
    :raises PhysicalityError: when no positive-norm physical state remains
    """
    log = getLogger(__name__)
    dim = fields.basis.dim
    if dim > 512:
        raise cq.SizingError('dense eigenvalue diagnostic needs dimension '
                             '<= 512, got %d' % dim)
    if fields.Omega:
        stack = np.vstack([op.toarray() for op in fields.Omega.values()])
        null = null_space(stack, rcond=tolerance)
    else:
        null = np.eye(dim, dtype=complex)
    eta = fields.metric.matrix.toarray()
    gram_vals, gram_vecs = eigh(null.conj().T @ eta @ null)
    if np.any(gram_vals < -tolerance):
        log.warning('physical subspace has negative-norm directions (%.3e)',
                    np.min(gram_vals))
    keep = gram_vals > tolerance
    if not np.any(keep):
        raise cq.PhysicalityError('no physical state of positive norm within '
                                  'tolerance %g' % tolerance)
    frame = null @ gram_vecs[:, keep] / np.sqrt(gram_vals[keep])
    reduced = frame.conj().T @ eta @ H.toarray() @ frame
    reduced = 0.5 * (reduced + reduced.conj().T)
    log.debug('physical subspace of dimension %d', frame.shape[1])
    return eigh(reduced, eigvals_only=True)


def lowest_physical_eigenvalue(fields, H, tolerance=1e-8):
    """Smallest eigenvalue of H on the physical subspace (see
    :func:`physical_spectrum`)."""
    return float(physical_spectrum(fields, H, tolerance)[0])
