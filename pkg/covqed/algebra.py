"""
:mod:`covqed.algebra` is an exact normal-ordering engine over abstract mode
operators. It checks the commutator identities behind the energy descent
without any truncation.

Coefficients are exact: fully expanded sympy expressions over integers,
rationals, radicals, the imaginary unit, π and the positive box-length symbol
``L``. Powers of the primitive N-th root of unity ζ = e^{2πi/N} enter in
radical form. Only N in {2, 4, 6, 8, 12} is supported: there the real and
imaginary parts of ζ are square roots of integers, so two coefficients are
equal exactly when their expansions are.

Monomials are kept normal-ordered: current symbols first (in their original
relative order, they are never reordered among themselves), then creation
kinds, then annihilation kinds, each group sorted by (kind, label).
"""

import operator
import random
from collections import namedtuple
from functools import lru_cache, reduce
from logging import getLogger

import numpy as np
import sympy

import covqed as cq
from covqed.modes import transverse_pair

L = sympy.Symbol('L', positive=True)

PHOTON_ANN = 'photon_ann'
PHOTON_CRE = 'photon_cre'
GHOST_ANN = 'ghostQ_ann'
GHOST_STAR = 'ghostQ_star'
CURRENT = 'current'

_RANK = {PHOTON_CRE: (1, 0), GHOST_STAR: (1, 1),
         PHOTON_ANN: (2, 0), GHOST_ANN: (2, 1)}
_STAR = {PHOTON_ANN: PHOTON_CRE, PHOTON_CRE: PHOTON_ANN,
         GHOST_ANN: GHOST_STAR, GHOST_STAR: GHOST_ANN, CURRENT: CURRENT}


class OpSymbol(namedtuple('OpSymbol', ['kind', 'label'])):
    """An abstract mode operator.

    Photon labels are ``(n, polarization)``, ghost labels the integer
    momentum ``n``, current labels ``(mu, site)``. ``ghostQ_star`` is a
    symbol of its own, not the adjoint of ``ghostQ_ann``.
    """

    __slots__ = ()

    def __str__(self):
        return '%s%s' % (self.kind, self.label)

    @property
    def key(self):
        if self.kind == CURRENT:
            return (0,)
        return _RANK[self.kind] + (self.label,)

    def star(self):
        return OpSymbol(_STAR[self.kind], self.label)


def _zero_like(value):
    if isinstance(value, Coefficient):
        return Coefficient(0, value.order)
    return value.zero()


EXACT_ORDERS = (1, 2, 4, 6, 8, 12)


@lru_cache(maxsize=None)
def unit_root(power, order):
    """ζ_N^power in radicals, expanded to real part plus i·imaginary part."""
    if order not in EXACT_ORDERS:
        raise cq.ConfigError('exact checks need N in %s, got %d'
                             % (EXACT_ORDERS[1:], order))
    angle = 2 * sympy.pi * sympy.Rational(power % order, order)
    return sympy.expand(sympy.cos(angle) + sympy.I * sympy.sin(angle))


class Coefficient:
    """Exact complex number over integers, radicals, π and L.

    Powers of ζ_N are written in radicals on construction (ζ_4 = i,
    ζ_8 = (1 + i)/√2, ...) and every value is kept fully expanded, so the
    imaginary unit and the radicals of prime powers are the only algebraic
    atoms; two coefficients are equal exactly when their expansions are.
    """

    __slots__ = ('value', 'order')

    def __init__(self, value=0, order=1):
        self.order = int(order)
        self.value = sympy.expand(sympy.sympify(value))

    @classmethod
    def const(cls, value, order):
        return cls(value, order)

    @classmethod
    def root(cls, power, order, scale=1):
        """scale·ζ^power."""
        return cls(sympy.sympify(scale) * unit_root(power, order), order)

    def __repr__(self):
        return 'Coefficient(%s)' % self

    def __str__(self):
        return str(self.value)

    def __eq__(self, other):
        if not isinstance(other, Coefficient):
            other = Coefficient.const(other, self.order)
        return (self - other).vanishes()

    def __hash__(self):
        return hash(self.value)

    def _coerce(self, other):
        if isinstance(other, Coefficient):
            return other
        return Coefficient.const(other, self.order)

    def __add__(self, other):
        if isinstance(other, OpPoly):
            return NotImplemented
        return Coefficient(self.value + self._coerce(other).value, self.order)

    __radd__ = __add__

    def __neg__(self):
        return Coefficient(-self.value, self.order)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, OpPoly):
            return NotImplemented
        return Coefficient(self.value * self._coerce(other).value, self.order)

    __rmul__ = __mul__

    def conjugate(self):
        return Coefficient(sympy.conjugate(self.value), self.order)

    def is_zero(self):
        return self.value == 0

    def vanishes(self):
        """Zero test that falls back to sympy simplification."""
        return self.is_zero() or sympy.simplify(self.value) == 0

    def evaluate(self, box_length):
        """Complex value at L = `box_length`."""
        return complex(sympy.N(self.value.subs(L, box_length), 30))


class RewriteTable:
    """Commutator value [A, B] for every ordered symbol pair.

    The canonical content is [a_n(k), a_m†(q)] = δₙₘδ_kq; every other
    pair, the ghost pair [a_Q(k), a_Q*(q)] included, commutes. `overrides`
    maps a kind pair to a scalar s meaning [A, B] = s·δ(label_A, label_B);
    it exists to inject deliberate mutations.
    """

    def __init__(self, overrides=None):
        self.rules = {(PHOTON_ANN, PHOTON_CRE): 1}
        self.rules.update(overrides or {})

    def __repr__(self):
        return 'RewriteTable(%r)' % (self.rules,)

    def value(self, a, b, order):
        """[a, b] as a Coefficient, or None when the pair commutes."""
        if a.label != b.label:
            return None
        if (a.kind, b.kind) in self.rules:
            scale = self.rules[(a.kind, b.kind)]
        elif (b.kind, a.kind) in self.rules:
            scale = -sympy.sympify(self.rules[(b.kind, a.kind)])
        else:
            return None
        return Coefficient.const(scale, order)


CANONICAL_TABLE = RewriteTable()


class OpPoly:
    """Finite sum of exact coefficients times monomials of :class:`OpSymbol`.

    Arithmetic results are normal-ordered with the polynomial's
    :class:`RewriteTable`; the zero polynomial has no terms.
    """

    def __init__(self, terms=None, order=1, table=None):
        self.order = order
        self.table = table or CANONICAL_TABLE
        self.terms = {}
        for mono, coef in (terms or {}).items():
            if not coef.is_zero():
                self.terms[tuple(mono)] = coef

    @classmethod
    def symbol(cls, sym, order, table=None, coef=1):
        return cls({(sym,): Coefficient.const(coef, order)}, order, table)

    @classmethod
    def scalar(cls, value, order, table=None):
        if not isinstance(value, Coefficient):
            value = Coefficient.const(value, order)
        return cls({(): value}, order, table)

    def zero(self):
        return OpPoly({}, self.order, self.table)

    def __repr__(self):
        return 'OpPoly(%d terms)' % len(self.terms)

    def __str__(self):
        if not self.terms:
            return '0'
        return ' + '.join('[%s]%s' % (c, ''.join(' ' + str(s) for s in m))
                          for m, c in sorted(self.terms.items(),
                                             key=lambda t: str(t[0])))

    def __len__(self):
        return len(self.terms)

    def _merge(self, other, sign):
        merged = dict(self.terms)
        for mono, coef in other.terms.items():
            coef = coef if sign > 0 else -coef
            merged[mono] = merged[mono] + coef if mono in merged else coef
        return OpPoly(merged, self.order, self.table)

    def __add__(self, other):
        if not isinstance(other, OpPoly):
            if other == 0:
                return self
            other = OpPoly.scalar(other, self.order, self.table)
        return self._merge(other, 1)

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, OpPoly):
            other = OpPoly.scalar(other, self.order, self.table)
        return self._merge(other, -1)

    def __neg__(self):
        return self.scale(-1)

    def scale(self, value):
        if not isinstance(value, Coefficient):
            value = Coefficient.const(value, self.order)
        return OpPoly({m: c * value for m, c in self.terms.items()},
                      self.order, self.table)

    def __rmul__(self, value):
        return self.scale(value)

    def raw_product(self, other):
        """Concatenated product, not yet normal-ordered."""
        out = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                mono = m1 + m2
                coef = c1 * c2
                out[mono] = out[mono] + coef if mono in out else coef
        return OpPoly(out, self.order, self.table)

    def __mul__(self, other):
        if isinstance(other, OpPoly):
            return normal_order(self.raw_product(other))
        return self.scale(other)

    def is_zero(self):
        return all(c.vanishes() for c in self.terms.values())

    def symbols(self):
        return {s for mono in self.terms for s in mono}

    def star(self):
        """Formal star: conjugate coefficients, reverse monomials and swap
        a ↔ a†, a_Q ↔ a_Q*. Currents are self-starred."""
        out = {}
        for mono, coef in self.terms.items():
            rev = tuple(s.star() for s in reversed(mono))
            conj = coef.conjugate()
            out[rev] = out[rev] + conj if rev in out else conj
        return normal_order(OpPoly(out, self.order, self.table))

    def with_table(self, table):
        return OpPoly(self.terms, self.order, table)


def normal_order(p):
    """Canonical normal-ordered form of `p` under its rewrite table.

    Adjacent symbols out of order are swapped, A·B = B·A + [A, B]; the
    commutator is a scalar, so each swap yields at most one shorter term.
    """
    out = {}
    work = list(p.terms.items())
    while work:
        mono, coef = work.pop()
        for i in range(len(mono) - 1):
            a, b = mono[i], mono[i + 1]
            if a.key > b.key:
                work.append((mono[:i] + (b, a) + mono[i + 2:], coef))
                value = p.table.value(a, b, p.order)
                if value is not None:
                    work.append((mono[:i] + mono[i + 2:], coef * value))
                break
        else:
            out[mono] = out[mono] + coef if mono in out else coef
    return OpPoly(out, p.order, p.table)


def commutator(p, q):
    """Normal-ordered [p, q]."""
    return normal_order(p.raw_product(q) - q.raw_product(p))


class ExactLattice:
    """Exact counterparts of the :class:`~covqed.modes.LatticeSpec` data.

    Gauge momenta are the integer vectors n with κ ≠ 0; ``nk`` is n with its
    Nyquist components zeroed, so κ = (2π/L)·nk and w = (2π/L)|nk|.
    """

    def __init__(self, lattice, shell=None):
        self.lattice = lattice
        self.N = lattice.sites_per_axis
        self.d = lattice.dimension
        self.order = self.N
        self.sites = [tuple(int(c) for c in m) for m in lattice.site_index]
        self.modes = [tuple(int(c) for c in lattice.mode_index[i])
                      for i in lattice.gauge_modes(shell)]
        self.unit = 2 * sympy.pi / L
        self.cell = (L / self.N) ** self.d
        self.inv_sqrt_volume = L ** sympy.Rational(-self.d, 2)
        half = self.N // 2
        self._nk = {n: tuple(0 if abs(c) == half else c for c in n)
                    for n in self.modes}
        freqs = [c if c <= half else c - self.N for c in range(self.N)]
        freqs = [half if c == -half else c for c in freqs]
        self.d1 = [[self._derivative_entry(x - y, freqs)
                    for y in range(self.N)] for x in range(self.N)]

    def _derivative_entry(self, offset, freqs):
        """Σ_f (i·2πf/L)·ζ^{f·offset}/N, Nyquist frequency excluded."""
        half = self.N // 2
        entry = Coefficient(0, self.order)
        for f in freqs:
            if f == 0 or abs(f) == half:
                continue
            entry = entry + Coefficient.root(f * offset, self.order,
                                             sympy.I * self.unit * f / self.N)
        return entry

    def nk(self, n):
        return self._nk[n]

    def kappa(self, n):
        return [self.unit * c for c in self._nk[n]]

    def sqrt_w(self, n):
        """√w = √(2π/L)·(nk²)^{1/4}."""
        square = sum(c * c for c in self._nk[n])
        return (sympy.sqrt(2) * sympy.sqrt(sympy.pi) / sympy.sqrt(L)
                * sympy.root(square, 4))

    def w(self, n):
        return self.sqrt_w(n) ** 2

    def plane_wave(self, n, site, conjugate=False):
        """φ_k(x) or φ_k*(x) as a Coefficient."""
        power = sum(a * b for a, b in zip(n, site))
        return Coefficient.root(-power if conjugate else power, self.order,
                                self.inv_sqrt_volume)

    def polarizations(self, n):
        if self.d == 1:
            return []
        k = [sympy.Integer(c) for c in self._nk[n]]
        return list(transverse_pair(k, sqrt=sympy.sqrt))

    def derivative(self, values, axis):
        """Exact spectral derivative along `axis` of a site-indexed list of
        Coefficients or OpPolys."""
        out = []
        for x in self.sites:
            terms = []
            for t in range(self.N):
                y = list(x)
                y[axis] = t
                entry = self.d1[x[axis]][t]
                if entry.is_zero():
                    continue
                source = values[self.site_number(y)]
                terms.append(entry * source if isinstance(source, Coefficient)
                             else source.scale(entry))
            out.append(reduce(operator.add, terms, _zero_like(values[0])))
        return out

    def site_number(self, m):
        return int(np.ravel_multi_index(tuple(m), self.lattice.shape))

    def grad(self, values):
        return [self.derivative(values, i) for i in range(self.d)]

    def div(self, vector):
        parts = [self.derivative(vector[i], i) for i in range(self.d)]
        return [reduce(operator.add, column) for column in zip(*parts)]

    def curl(self, vector, zero):
        if self.d == 1:
            return [[zero for _ in self.sites]]

        def d(j, comp):
            return self.derivative(vector[comp], j)

        pairs = [((1, 2), (2, 1)), ((2, 0), (0, 2)), ((0, 1), (1, 0))]
        return [[a - b for a, b in zip(d(*plus), d(*minus))]
                for plus, minus in pairs]


SymbolicFields = namedtuple('SymbolicFields', [
    'exact', 'G', 'E', 'B', 'j0', 'j', 'Omega', 'C', 'chi', 'table'])


def _photon(n, pol, kind):
    return OpSymbol(kind, (n, pol))


def build_symbolic_fields(lattice, chi=None, shell=None, table=None):
    """Mode expansions of G, E, B, Ω and C as site-indexed OpPolys.

    :param lattice: :class:`~covqed.modes.LatticeSpec`
    :param chi: exact real values of χ per site (ints, rationals or sympy
        numbers); None builds no generator
    :param shell: optional |n|² bound on the gauge momenta
    :param table: rewrite table, canonical by default
    """
    log = getLogger(__name__)
    ex = ExactLattice(lattice, shell)
    order = ex.order
    table = table or CANONICAL_TABLE
    zero = OpPoly({}, order, table)
    i_unit = sympy.I

    def term(sym, coef):
        return OpPoly({(sym,): coef}, order, table)

    G, E, A = [], [[] for _ in range(ex.d)], [[] for _ in range(ex.d)]
    for x in ex.sites:
        g_x = zero
        e_x = [zero] * ex.d
        a_x = [zero] * ex.d
        for n in ex.modes:
            phi = ex.plane_wave(n, x)
            phi_c = ex.plane_wave(n, x, conjugate=True)
            q = term(OpSymbol(GHOST_ANN, n), phi)
            q_star = term(OpSymbol(GHOST_STAR, n), phi_c)
            ghost = (q - q_star).scale(i_unit)
            g_x = g_x + ghost.scale(ex.sqrt_w(n))
            kappa = ex.kappa(n)
            for i in range(ex.d):
                e_x[i] = e_x[i] + ghost.scale(kappa[i] / ex.sqrt_w(n))
            for pol, eps in enumerate(ex.polarizations(n), 1):
                ann = term(_photon(n, pol, PHOTON_ANN), phi)
                cre = term(_photon(n, pol, PHOTON_CRE), phi_c)
                e_amp = i_unit * ex.sqrt_w(n) / sympy.sqrt(2)
                a_amp = 1 / (sympy.sqrt(2) * ex.sqrt_w(n))
                for i in range(ex.d):
                    if eps[i] == 0:
                        continue
                    e_x[i] = e_x[i] + (ann - cre).scale(e_amp * eps[i])
                    a_x[i] = a_x[i] + (ann + cre).scale(a_amp * eps[i])
        G.append(g_x)
        for i in range(ex.d):
            E[i].append(e_x[i])
            A[i].append(a_x[i])
    B = ex.curl(A, zero)

    j0 = [term(OpSymbol(CURRENT, (0, s)), Coefficient.const(1, order))
          for s in range(len(ex.sites))]
    j = [[term(OpSymbol(CURRENT, (i + 1, s)), Coefficient.const(1, order))
          for s in range(len(ex.sites))] for i in range(ex.d)]

    Omega = {}
    for n in ex.modes:
        density = reduce(operator.add, [
            j0[s].scale(ex.plane_wave(n, x, conjugate=True) * ex.cell)
            for s, x in enumerate(ex.sites)])
        Omega[n] = (term(OpSymbol(GHOST_ANN, n), Coefficient.const(1, order))
                    + density.scale(1 / (2 * ex.w(n) * ex.sqrt_w(n))))

    C = None
    chi_exact = None
    if chi is not None:
        chi_exact = [Coefficient.const(sympy.nsimplify(c), order)
                     for c in chi]
        grad_chi = ex.grad(chi_exact)
        C = reduce(operator.add, [
            E[i][s].scale(grad_chi[i][s] * ex.cell)
            for i in range(ex.d) for s in range(len(ex.sites))], zero)
        C = normal_order(C)
    log.debug('Symbolic fields on %d sites, %d gauge momenta', len(ex.sites),
              len(ex.modes))
    return SymbolicFields(ex, G, E, B, j0, j, Omega, C, chi_exact, table)


IdentityResult = namedtuple('IdentityResult',
                            ['name', 'passed', 'terms', 'residual'])


class ProofReport:
    """Ordered list of :class:`IdentityResult` entries."""

    def __init__(self, entries=()):
        self.entries = list(entries)

    def __repr__(self):
        return 'ProofReport(%d/%d passed)' % (
            sum(e.passed for e in self.entries), len(self.entries))

    def __iter__(self):
        return iter(self.entries)

    def __getitem__(self, name):
        for entry in self.entries:
            if entry.name == name:
                return entry
        raise KeyError('no identity named %r' % (name,))

    @property
    def passed(self):
        return all(e.passed for e in self.entries)

    def add(self, name, residual, terms=None):
        passed = residual.is_zero()
        entry = IdentityResult(name, passed,
                               len(residual) if terms is None else terms,
                               str(residual))
        log = getLogger(__name__)
        if passed:
            log.debug('identity %s holds (%d terms)', name, entry.terms)
        else:
            log.debug('identity %s FAILS: %s', name, entry.residual)
        self.entries.append(entry)
        return entry

    def extend(self, other):
        self.entries.extend(other.entries)

    def to_dict(self):
        return [dict(e._asdict()) for e in self.entries]


def _lattice_sum(exact, fields, weights, zero):
    """a^d Σₓ Σᵢ fields[i][x]·weights[i][x]."""
    terms = [fields[i][s].scale(weights[i][s] * exact.cell)
             for i in range(len(fields)) for s in range(len(exact.sites))
             if not weights[i][s].is_zero()]
    return normal_order(reduce(operator.add, terms, zero))


def descent_commutator(fields):
    """[iC, H] as fixed by the Heisenberg form of Gauss's law:
    −a^d Σₓ (∇×B − j − ∇G)·∇χ."""
    ex = fields.exact
    zero = OpPoly({}, ex.order, fields.table)
    grad_g = ex.grad(fields.G)
    curl_b = ex.curl(fields.B, zero)
    grad_chi = ex.grad(fields.chi)
    rhs = []
    for i in range(ex.d):
        rhs.append([c - jj - g for c, jj, g in
                    zip(curl_b[i], fields.j[i], grad_g[i])])
    return -_lattice_sum(ex, rhs, grad_chi, zero)


def reduced_commutator(fields):
    """−a^d Σₓ χ(∇·j + ∇²G), the summation-by-parts form."""
    ex = fields.exact
    zero = OpPoly({}, ex.order, fields.table)
    div_j = ex.div(fields.j)
    lap_g = ex.div(ex.grad(fields.G))
    body = [[a + b for a, b in zip(div_j, lap_g)]]
    return -_lattice_sum(ex, body, [fields.chi], zero)


def _i_times(p):
    return p.scale(sympy.I)


def verify_derivation_chain(lattice, chi, shell=None, table=None):
    """Check the commutator chain that truncates the BCH series.

    With [iC, H] taken from the Heisenberg form of Gauss's law:

    * ``summation_by_parts``: it equals −a^d Σₓ χ(∇·j + ∇²G);
    * ``double_commutator``: [iC, [iC, H]] = 0 from the rewrite table;
    * ``bch_terminates``: the third nested commutator vanishes as well, so
      e^{iC} H e^{−iC} = H + [iC, H].

    :return: :class:`ProofReport`; nonzero residuals are recorded verbatim
    """
    fields = build_symbolic_fields(lattice, chi, shell, table)
    report = ProofReport()
    first = descent_commutator(fields)
    reduced = reduced_commutator(fields)
    report.add('summation_by_parts', first - reduced, terms=len(first))
    iC = _i_times(fields.C)
    second = commutator(iC, reduced)
    report.add('double_commutator', second, terms=len(reduced))
    third = commutator(iC, commutator(iC, first))
    report.add('bch_terminates', third, terms=len(first))
    return report


def _random_poly(rng, symbols, order, table, max_terms=3, max_degree=3):
    terms = {}
    for _ in range(rng.randint(1, max_terms)):
        mono = tuple(rng.choice(symbols)
                     for _ in range(rng.randint(0, max_degree)))
        coef = Coefficient.root(rng.randrange(order), order,
                                rng.randint(-3, 3))
        terms[mono] = terms[mono] + coef if mono in terms else coef
    return OpPoly(terms, order, table)


def _sample_symbols(fields):
    syms = sorted({s for p in fields.E[0] for m in p.terms for s in m})
    syms += [OpSymbol(CURRENT, (0, 0)), OpSymbol(CURRENT, (1, 0))]
    return syms


def identity_suite(lattice, chi, shell=None, table=None, samples=100,
                   seed=0):
    """Auxiliary commutators, star consistency and algebraic sanity checks.

    Site pairs for the local commutators are drawn with `seed`; the
    confluence and Jacobi checks use `samples` random polynomial triples.
    """
    fields = build_symbolic_fields(lattice, chi, shell, table)
    ex = fields.exact
    rng = random.Random(seed)
    report = ProofReport()
    n_sites = len(ex.sites)
    pairs = [(rng.randrange(n_sites), rng.randrange(n_sites))
             for _ in range(min(4, n_sites * n_sites))]
    for x, y in pairs:
        for i in range(ex.d):
            report.add('[G(%d),E_%d(%d)]' % (x, i + 1, y),
                       commutator(fields.G[x], fields.E[i][y]))
            for k in range(ex.d):
                report.add('[j_%d(%d),E_%d(%d)]' % (i + 1, x, k + 1, y),
                           commutator(fields.j[i][x], fields.E[k][y]))
    for n, omega in sorted(fields.Omega.items()):
        report.add('[Omega%s,C]' % (n,), commutator(omega, fields.C))
        for i in range(ex.d):
            report.add('[Omega%s,E_%d(0)]' % (n, i + 1),
                       commutator(omega, fields.E[i][0]))
    for i in range(ex.d):
        for s in range(n_sites):
            report.add('star E_%d(%d)' % (i + 1, s),
                       fields.E[i][s].star() - fields.E[i][s])
    for s in range(n_sites):
        report.add('star G(%d)' % s, fields.G[s].star() - fields.G[s])
    report.add('star C', fields.C.star() - fields.C)
    if ex.d == 3:
        photons = [s for s in fields.C.symbols()
                   if s.kind in (PHOTON_ANN, PHOTON_CRE)]
        report.add('C has no photon symbols',
                   OpPoly.scalar(len(photons), ex.order, fields.table))

    symbols = _sample_symbols(fields)
    zero = OpPoly({}, ex.order, fields.table)
    confluence, jacobi = zero, zero
    for _ in range(samples):
        a, b, c = (_random_poly(rng, symbols, ex.order, fields.table)
                   for _ in range(3))
        confluence = confluence + ((a * b) * c - a * (b * c))
        jacobi = jacobi + (commutator(a, commutator(b, c))
                           + commutator(b, commutator(c, a))
                           + commutator(c, commutator(a, b)))
    report.add('confluence', confluence)
    report.add('jacobi', jacobi)
    return report


def matrix_image(p, basis, box_length):
    """Dense matrix of `p` in a Fock representation.

    Photon symbols map to the photon ladders of `basis`, ghost symbols to
    a_Q and a_Q*. Current symbols have no representation here.

    :raises KeyError: on a current symbol or a mode missing from `basis`
    """
    dim = basis.dim
    out = np.zeros((dim, dim), dtype=complex)
    for mono, coef in p.terms.items():
        mat = np.eye(dim, dtype=complex)
        for sym in mono:
            mat = mat @ _symbol_matrix(sym, basis)
        out += coef.evaluate(box_length) * mat
    return out


def _symbol_matrix(sym, basis):
    if sym.kind == PHOTON_ANN:
        return basis.photon(sym.label, 'lower').toarray()
    if sym.kind == PHOTON_CRE:
        return basis.photon(sym.label, 'raise').toarray()
    if sym.kind == GHOST_ANN:
        return basis.a_Q(sym.label).toarray()
    if sym.kind == GHOST_STAR:
        return basis.a_Q_star(sym.label).toarray()
    raise KeyError('no matrix representation for %s' % (sym,))


def mutated_table(kind_pair=(GHOST_ANN, GHOST_STAR), value=1):
    """Rewrite table with one deliberately wrong rule, e.g. [a_Q, a_Q*] = 1."""
    return RewriteTable({tuple(kind_pair): value})


def check_chi(chi):
    """Exact χ values must be real."""
    for value in chi:
        if sympy.im(sympy.nsimplify(value)) != 0:
            raise cq.ConfigError('chi must be real, got %r' % (value,))
    return chi
