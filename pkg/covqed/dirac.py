"""
:mod:`covqed.dirac` holds the free Dirac spinors of the fermion sector, in
the Dirac basis.

* d = 1: α = σ_x, β = σ_z; two components and one spin state, labelled 0.
* d = 3: α_i = [[0, σ_i], [σ_i, 0]], β = diag(1, 1, −1, −1); spin states
  are labelled by their helicity s = ±1 along p̂ (p̂ = ẑ at p = 0).

With h(p) = α·p + βm and E = √(p² + m²), the unit spinors satisfy

* h(p) u(p, s) = E u(p, s),
* h(−p) v(p, s) = −E v(p, s), with v built on χ_{−s},

so at fixed p the columns u(p, s) and v(−p, s) form an orthonormal basis.
Mode labels are (n, s, c): the integer momentum, the spin label and c = +1
for a particle (b) or −1 for an antiparticle (d).
"""

import numpy as np

import covqed as cq

SIGMA = (np.array([[0, 1], [1, 0]], dtype=complex),
         np.array([[0, -1j], [1j, 0]], dtype=complex),
         np.array([[1, 0], [0, -1]], dtype=complex))

PARTICLE = 1
ANTIPARTICLE = -1


class DiracAlgebra:
    """α and β of the Dirac basis in `d` dimensions.

    .. automethod:: __repr__
    """

    def __init__(self, d):
        if d == 1:
            self.alpha = (SIGMA[0],)
            self.beta = SIGMA[2]
            self.spins = (0,)
        elif d == 3:
            zero = np.zeros((2, 2), dtype=complex)
            self.alpha = tuple(np.block([[zero, s], [s, zero]])
                               for s in SIGMA)
            self.beta = np.diag([1, 1, -1, -1]).astype(complex)
            self.spins = (1, -1)
        else:
            raise cq.ConfigError('dimension must be 1 or 3, got %r' % (d,))
        self.dimension = d
        self.components = self.beta.shape[0]

    def __repr__(self):
        """Indicates DiracAlgebra with its dimension and spinor size"""
        return 'DiracAlgebra(d=%d, components=%d)' % (self.dimension,
                                                      self.components)

    def hamiltonian(self, p, mass):
        """h(p) = α·p + βm."""
        out = mass * self.beta
        for a, c in zip(self.alpha, p):
            out = out + c * a
        return out

    def helicity_operator(self, p):
        """Σ·p̂ with Σ = diag(σ, σ); only defined for d = 3."""
        if self.dimension != 3:
            raise cq.ConfigError('helicity needs d = 3')
        small = _sigma_dot(_direction(p))
        zero = np.zeros((2, 2), dtype=complex)
        return np.block([[small, zero], [zero, small]])

    def uspinor(self, p, s, mass):
        return uspinor(p, s, mass, self.dimension)

    def vspinor(self, p, s, mass):
        return vspinor(p, s, mass, self.dimension)


def energy(p, mass):
    p = np.asarray(p, dtype=float)
    return float(np.sqrt(p @ p + mass ** 2))


def _direction(p):
    p = np.asarray(p, dtype=float)
    norm = np.linalg.norm(p)
    return p / norm if norm > 0 else np.array([0.0, 0.0, 1.0])


def _sigma_dot(p):
    return sum(c * s for c, s in zip(p, SIGMA))


def helicity_state(p, s):
    """Two-spinor χ_s with (σ·p̂)χ_s = s·χ_s."""
    if s not in (1, -1):
        raise cq.ConfigError('helicity must be +1 or -1, got %r' % (s,))
    x, y, z = _direction(p)
    theta = np.arccos(np.clip(z, -1.0, 1.0))
    phi = np.arctan2(y, x)
    if s == 1:
        return np.array([np.cos(theta / 2),
                         np.exp(1j * phi) * np.sin(theta / 2)])
    return np.array([-np.exp(-1j * phi) * np.sin(theta / 2),
                     np.cos(theta / 2)])


def _two_spinor(p, s, d):
    if d == 1:
        if s != 0:
            raise cq.ConfigError('the spin label in d = 1 is 0, got %r'
                                 % (s,))
        return np.ones(1, dtype=complex), np.array([[p[0]]], dtype=complex)
    return helicity_state(p, s), _sigma_dot(p)


def uspinor(p, s, mass, d):
    """Positive-energy unit spinor of momentum `p` and spin label `s`.

    u = √((E+m)/2E)·[χ_s; (σ·p)χ_s/(E+m)]; at E = 0 the upper component
    alone.
    """
    p = np.asarray(p, dtype=float)
    chi, sdot = _two_spinor(p, s, d)
    e = energy(p, mass)
    if e == 0:
        return np.concatenate([chi, np.zeros_like(chi)])
    norm = np.sqrt((e + mass) / (2 * e))
    return norm * np.concatenate([chi, sdot @ chi / (e + mass)])


def vspinor(p, s, mass, d):
    """Negative-energy unit spinor of the antiparticle with momentum `p`.

    v = √((E+m)/2E)·[(σ·p)η/(E+m); η] with η = χ_{−s}; at E = 0 the lower
    component alone.
    """
    p = np.asarray(p, dtype=float)
    eta, sdot = _two_spinor(p, -s if d == 3 else s, d)
    e = energy(p, mass)
    if e == 0:
        return np.concatenate([np.zeros_like(eta), eta])
    norm = np.sqrt((e + mass) / (2 * e))
    return norm * np.concatenate([sdot @ eta / (e + mass), eta])


def mode_labels(momenta, spins, antiparticles=True):
    """(n, s, c) labels: every particle mode, then every antiparticle."""
    branches = (PARTICLE, ANTIPARTICLE) if antiparticles else (PARTICLE,)
    return [(tuple(n), s, c) for c in branches for n in momenta
            for s in spins]
