"""
:mod:`covqed.construction` runs the energy-descent construction: the
generator C = a^d Σₓ E·∇χ, the η-unitary U = e^{−iC}, the transformed state
ξ = U v, and the sweep of E(f) = ⟨ξ_f|H|ξ_f⟩ against the predicted law
E(0) − f·a^d Σₓ D(x)² for χ = f·D.
"""

import csv
from collections import namedtuple
from logging import getLogger
from pprint import PrettyPrinter
from threading import Lock, Thread

import numpy as np

import covqed as cq
from covqed.fock import (LinOp, commutator, expm_action, guard_band_check,
                         guarded_residual)
from covqed.modes import ScalarField, make_chi, spectral_grad
from covqed.qed import (build_fields, build_hamiltonian, build_reference_state,
                        constraint_residual, divergence, expectation,
                        gauge_current, gradient, total_charge)

CSV_COLUMNS = ('f', 'E_direct', 'E_predicted', 'leakage', 'omega_residual',
               'valid')


class DescentConfig:
    """Parameters of one f-sweep.

    .. automethod:: __repr__
    """

    def __init__(self, f=None, points=8, first_shift_fraction=0.01,
                 chi=None, expm_tol=1e-12, guard_band=2,
                 leakage_threshold=1e-9, rtol=1e-6, atol=1e-9,
                 min_valid_points=3, workers=1, omega_drift=1e-9,
                 fit_tolerance=1e-6):
        """
        :param f: Ascending list of scales starting at 0, or None for the
            automatic geometric grid
        :param points: Grid size when `f` is None
        :param first_shift_fraction: First grid step shifts the energy by
            this fraction of |⟨v|H|v⟩| + 1
        :param chi: None or ``{'kind': 'self_tuned'}`` for χ = f·D, or a
            :func:`~covqed.modes.make_chi` recipe scaled by f
        :param expm_tol: Tolerance of the exponential action
        :param guard_band: Levels below each cutoff counted as leakage
        :param leakage_threshold: Largest leakage of a valid point
        :param rtol: Relative tolerance of the energy-shift identity and slope
        :param atol: Absolute tolerance of the energy-shift identity
        :param min_valid_points: Fewest valid points for a passing sweep
        :param workers: Threads sharing the sweep
        :param omega_drift: Largest growth of the constraint residual over
            the reference before the sweep counts as broken down
        :param fit_tolerance: Largest relative residual of the linear fit
        """
        if f is not None:
            f = [float(v) for v in f]
            if not f or f[0] != 0:
                raise cq.ConfigError('f list must start at 0')
            if any(b <= a for a, b in zip(f, f[1:])):
                raise cq.ConfigError('f list must be strictly ascending')
        if points < 2 and f is None:
            raise cq.ConfigError('automatic f grid needs points >= 2')
        self.f = f
        self.points = int(points)
        self.first_shift_fraction = float(first_shift_fraction)
        self.chi = dict(chi or {'kind': 'self_tuned'})
        self.expm_tol = float(expm_tol)
        self.guard_band = int(guard_band)
        self.leakage_threshold = float(leakage_threshold)
        self.rtol = float(rtol)
        self.atol = float(atol)
        self.min_valid_points = int(min_valid_points)
        self.workers = max(1, int(workers))
        self.omega_drift = float(omega_drift)
        self.fit_tolerance = float(fit_tolerance)

    def __repr__(self):
        """Indicates DescentConfig and pretty prints its parameters"""
        return 'DescentConfig\n' + PrettyPrinter().pformat(self.__dict__)

    @classmethod
    def from_dict(cls, block):
        return cls(**block)

    def grid(self, energy, shift_rate):
        """f values: the explicit list, or {0, f₁, 2f₁, 4f₁, …} with
        f₁·shift_rate = first_shift_fraction·(|energy| + 1)."""
        if self.f is not None:
            return list(self.f)
        f1 = self.first_shift_fraction * (abs(energy) + 1.0) / shift_rate
        return [0.0] + [f1 * 2 ** i for i in range(self.points - 1)]

    def broken(self, point, reference_residual):
        """True when a sweep point leaks past the guard band or lets the
        constraint residual drift above the reference."""
        return (point.leakage > self.leakage_threshold
                or point.omega_residual
                > reference_residual + self.omega_drift)


def _chi_values(chi):
    if isinstance(chi, ScalarField):
        if not chi.is_real:
            raise cq.ConfigError('chi must be real')
        return chi.values
    values = np.asarray(chi)
    if np.iscomplexobj(values) and np.any(values.imag):
        raise cq.ConfigError('chi must be real')
    return np.real(values).astype(float)


def build_C(fields, chi):
    """C = a^d Σₓ Σᵢ E_i(x)(∇χ)_i(x).

    The transverse photon part cancels by summation by parts, so C lives in
    the ghost sector.

    :raises ConfigError: on a non-real χ
    """
    values = _chi_values(chi)
    lat = fields.lattice
    grad = spectral_grad(lat, values)
    mat = fields.E[0].integrate(grad[0]).matrix
    for i in range(1, lat.dimension):
        mat = mat + fields.E[i].integrate(grad[i]).matrix
    return LinOp(mat, eta_self_adjoint=True, gauge_sector_only=True)


def apply_U(C, state, tol=1e-12, basis=None, guard_band=2,
            leakage_threshold=None):
    """ξ = e^{−iC} v.

    When `basis` is given the guard-band leakage of ξ is recorded, and ξ is
    flagged invalid (``ξ.valid = False``) above `leakage_threshold`.
    """
    vec = getattr(state, 'vector', state)
    xi = expm_action(C * -1j, vec, tol=tol)
    xi.valid = True
    if basis is not None:
        xi.leakage = guard_band_check(basis, xi, guard_band, xi.metric)
        if leakage_threshold is not None and xi.leakage > leakage_threshold:
            getLogger(__name__).warning('leakage %.3e above threshold %.3e',
                                        xi.leakage, leakage_threshold)
            xi.valid = False
    return xi


def predicted_energy(state, chi, fields, tolerance=1e-10):
    """⟨v|H|v⟩ − a^d Σₓ χ(x) D(x).

    The dropped term pairs χ with ⟨G⟩, which must vanish on a physical
    state.

    :raises PhysicalityError: when max |⟨G(x)⟩| exceeds `tolerance`
    """
    g = np.abs(expectation(state, fields.G))
    if g.size and np.max(g) > tolerance:
        raise cq.PhysicalityError('<G(x)> reaches %.3e, above %.3e; the state '
                                  'is not physical enough to drop the G term'
                                  % (np.max(g), tolerance))
    values = _chi_values(chi)
    return state.energy - fields.lattice.cell * float(
        np.sum(values * state.divergence))


BCHResiduals = namedtuple('BCHResiduals', ['first', 'second', 'guard_band',
                                           'flagged', 'passed'])


def bch_numeric_check(C, H, fields, chi, g=3, tolerance=1e-10):
    """Guard-banded residuals of [iC, H] + a^d Σₓ χ(∇·j + ∇²G) and of
    [iC, [iC, H]].

    With g < 2 the residuals include cutoff-edge artifacts; such reports
    carry ``flagged=True`` and never pass.
    """
    basis = fields.basis
    values = _chi_values(chi)
    div_j = divergence(fields, gauge_current(fields))
    lap_g = divergence(fields, gradient(fields, fields.G))
    iC = C * 1j
    first_op = commutator(iC, H) + (div_j + lap_g).integrate(values)
    second_op = commutator(iC, commutator(iC, H))
    first = guarded_residual(first_op, basis, g)
    second = guarded_residual(second_op, basis, g)
    flagged = g < 2
    if flagged:
        getLogger(__name__).warning('BCH check with guard band %d includes '
                                    'truncation artifacts', g)
    passed = not flagged and first <= tolerance and second <= tolerance
    return BCHResiduals(first, second, g, flagged, passed)


SweepPoint = namedtuple('SweepPoint', [
    'f', 'E_direct', 'E_predicted', 'leakage', 'omega_residual',
    'norm_drift', 'charge_drift', 'valid'])


class DescentReport:
    """Per-f sweep results plus the fitted descent law.

    .. automethod:: __repr__
    """

    def __init__(self, points, reference, slope_predicted, config, chi=None):
        self._log = getLogger(__name__)
        self.chi = chi
        self.points = sorted(points, key=lambda p: p.f)
        self.reference = reference
        self.slope_predicted = slope_predicted
        self.config = config
        self.breakdown = next((p.f for p in self.points
                               if config.broken(p, reference.residual)),
                              None)
        self.slope = None
        self.intercept = None
        self.fit_residual = None
        self.flags = {}
        self._evaluate()

    def __repr__(self):
        """Indicates DescentReport and pretty prints its summary"""
        return 'DescentReport\n' + PrettyPrinter().pformat(self.summary())

    @property
    def valid(self):
        return [p for p in self.points if p.valid]

    def _evaluate(self):
        cfg = self.config
        valid = self.valid
        for p in self.points:
            if not p.valid:
                self._log.warning('f=%.6g excluded from the fit (leakage '
                                  '%.3e, constraint residual %.3e)', p.f,
                                  p.leakage, p.omega_residual)
        f = np.array([p.f for p in valid])
        e = np.array([p.E_direct for p in valid])
        enough = len(valid) >= max(cfg.min_valid_points, 2)
        if enough:
            self.slope, self.intercept = (float(c) for c in np.polyfit(f, e, 1))
            line = self.intercept + self.slope * f
            scale = max(np.max(np.abs(e)), cfg.atol)
            self.fit_residual = float(np.max(np.abs(e - line)) / scale)
        identity = all(abs(p.E_direct - p.E_predicted)
                       <= cfg.rtol * abs(p.E_predicted) + cfg.atol
                       for p in valid)
        slope_ok = (self.slope is not None and abs(self.slope
                    - self.slope_predicted)
                    <= cfg.rtol * abs(self.slope_predicted))
        self.flags = {
            'enough_valid_points': bool(enough),
            'linear_fit': bool(self.fit_residual is not None
                               and self.fit_residual <= cfg.fit_tolerance),
            'energy_shift_identity': bool(enough and identity),
            'slope_matches': bool(slope_ok),
            'slope_negative': bool(self.slope_predicted < 0),
            'monotone_decreasing': bool(enough and np.all(np.diff(e) < 0)),
            'physicality_preserved': all(
                p.omega_residual
                <= self.reference.residual + cfg.omega_drift
                for p in valid),
            'norm_preserved': all(p.norm_drift <= 1e-10 for p in valid),
            'charge_conserved': all(p.charge_drift <= 1e-10 for p in valid),
            'below_vacuum': any(p.E_direct < 0 for p in valid),
        }

    @property
    def passed(self):
        """Every flag holds, reaching below the vacuum included."""
        return all(self.flags.values())

    def summary(self):
        return {
            'reference_energy': self.reference.energy,
            'reference_residual': self.reference.residual,
            'divergence_norm': float(np.linalg.norm(
                self.reference.divergence)),
            'slope': self.slope,
            'slope_predicted': self.slope_predicted,
            'intercept': self.intercept,
            'fit_residual': self.fit_residual,
            'breakdown_f': self.breakdown,
            'valid_points': len(self.valid),
            'flags': dict(self.flags),
            'passed': self.passed,
        }

    def to_dict(self):
        return {'summary': self.summary(),
                'points': [dict(p._asdict()) for p in self.points]}

    def write_csv(self, fn):
        """Write the E(f) table with the :data:`CSV_COLUMNS` columns."""
        with open(fn, 'w', newline='') as f:
            writer = csv.writer(f)
            writer.writerow(CSV_COLUMNS)
            for p in self.points:
                writer.writerow(['%.17g' % p.f, '%.17g' % p.E_direct,
                                 '%.17g' % p.E_predicted, '%.6e' % p.leakage,
                                 '%.6e' % p.omega_residual, int(p.valid)])
        self._log.info('Wrote %d sweep rows to %s', len(self.points), fn)


def _base_chi(fields, state, recipe):
    kind = recipe.get('kind', 'self_tuned')
    params = {k: v for k, v in recipe.items() if k != 'kind'}
    if kind == 'self_tuned':
        return make_chi(fields.lattice, 'self_tuned', field=state.divergence,
                        scale=1.0)
    return make_chi(fields.lattice, kind, **params)


def run_energy_descent(model, descent, recipe, fields=None, H=None,
                       tolerance=1e-10):
    """Sweep f and compare ⟨ξ_f|H|ξ_f⟩ with the predicted descent law.

    :param model: :class:`~covqed.qed.ModelConfig`
    :param descent: :class:`DescentConfig`
    :param recipe: reference-state recipe for
        :func:`~covqed.qed.build_reference_state`
    :raises PremiseError: when ⟨∇·j⟩ vanishes on the reference state
    """
    log = getLogger(__name__)
    if not model.fermions or model.charge == 0:
        raise cq.PremiseError('the interacting sector is absent (e = 0 or no '
                              'fermions), so <div j> vanishes identically')
    fields = fields or build_fields(model)
    H = H or build_hamiltonian(fields, model)
    state = build_reference_state(model, recipe, fields, H, tolerance,
                                  descent.expm_tol, descent.guard_band)
    chi0 = _base_chi(fields, state, descent.chi)
    C0 = build_C(fields, chi0)
    rate = fields.lattice.cell * float(np.sum(chi0.values
                                              * state.divergence))
    shift_rate = fields.lattice.cell * float(np.sum(state.divergence ** 2))
    f_values = descent.grid(state.energy, abs(rate) or shift_rate)
    charge = total_charge(fields)
    q0 = expectation(state, charge).real
    eta = fields.metric

    results = {}
    errors = []
    lock = Lock()

    def work(chunk):
        try:
            _sweep(chunk)
        except cq.CovQEDError as err:
            with lock:
                errors.append(err)

    def _sweep(chunk):
        for f in chunk:
            xi = apply_U(C0 * f, state, descent.expm_tol, fields.basis,
                         descent.guard_band, descent.leakage_threshold)
            energy = float(xi.expectation(H).real)
            predicted = predicted_energy(state, chi0 * f, fields, tolerance)
            point = SweepPoint(
                f, energy, predicted, xi.leakage,
                constraint_residual(fields, xi),
                abs(eta.inner(xi, xi).real - 1),
                abs(xi.expectation(charge).real - q0), xi.valid)
            log.debug('f=%.6g E=%.12g predicted=%.12g leakage=%.3e', f,
                      energy, predicted, xi.leakage)
            with lock:
                results[f] = point

    chunks = [f_values[i::descent.workers] for i in range(descent.workers)]
    threads = [Thread(target=work, args=(chunk,)) for chunk in chunks if chunk]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    if errors:
        raise errors[0]
    if len(results) != len(f_values):
        raise cq.NumericalError('%d of %d sweep points failed'
                                % (len(f_values) - len(results),
                                   len(f_values)))

    breakdown = None
    points = []
    for f in f_values:
        p = results[f]
        if breakdown is None and descent.broken(p, state.residual):
            breakdown = f
        if breakdown is not None and p.valid:
            p = p._replace(valid=False)
        points.append(p)
    report = DescentReport(points, state, -rate, descent, chi0)
    log.info('Descent: slope %s vs predicted %.6g, %d valid points',
             report.slope, -rate, len(report.valid))
    return report
