"""
:mod:`covqed.modes` holds the periodic lattice, its momentum set, the exact
spectral differential operators, transverse polarization pairs and the gauge
functions χ used to build the generator C.

Conventions (recorded in every report manifest):

* plane waves are normalized per mode, φ_k(x) = e^{ik·x}/√V;
* the lattice transform is f̃(k) = a^d Σₓ f(x) e^{−ik·x}/√V, so that
  Parseval reads a^d Σₓ |f|² = Σ_k |f̃|²;
* first derivatives multiply f̃(k) by iκ(k), where κ is k with every Nyquist
  component set to zero. Summation by parts and div∘curl = 0 then hold to
  rounding; the Laplacian is div∘grad.
"""

from logging import getLogger
from pprint import PrettyPrinter

import numpy as np

import covqed as cq


class LatticeSpec:
    """Periodic cubic box of side L with N sites per axis in d dimensions.

    Immutable after construction. Momenta are stored as integer vectors n
    with components in (−N/2, N/2]; the physical momentum is k = 2πn/L.

    .. automethod:: __repr__
    """

    def __init__(self, L, N, d):
        """Build the lattice and enumerate sites and momenta.

        :param L: Box length (natural units), strictly positive
        :param N: Sites per axis, an even integer ≥ 2
        :param d: Dimension, 1 or 3
        """
        if isinstance(N, bool) or not isinstance(N, (int, np.integer)):
            raise cq.ConfigError('sites_per_axis must be an integer, got %r'
                                 % (N,))
        if N < 2 or N % 2:
            raise cq.ConfigError('sites_per_axis must be even and >= 2, '
                                 'got %d' % N)
        if not L > 0:
            raise cq.ConfigError('box_length must be positive, got %r' % (L,))
        if d not in (1, 3):
            raise cq.ConfigError('dimension must be 1 or 3, got %r' % (d,))
        self.box_length = float(L)
        self.sites_per_axis = int(N)
        self.dimension = int(d)
        self.spacing = self.box_length / self.sites_per_axis
        self.volume = self.box_length ** self.dimension
        self.shape = (self.sites_per_axis,) * self.dimension
        self.n_sites = self.sites_per_axis ** self.dimension
        self.cell = self.spacing ** self.dimension

        # Site m (integer vector) sits at x = a·m, C order over the grid
        self.site_index = np.indices(self.shape).reshape(self.dimension, -1).T
        self.sites = self.spacing * self.site_index

        # All lattice momenta, in the flat order of numpy.fft.fftn
        freq = np.rint(np.fft.fftfreq(N) * N).astype(int)
        freq[freq == -N // 2] = N // 2
        grids = np.meshgrid(*([freq] * self.dimension), indexing='ij')
        self.all_modes = np.stack([g.reshape(-1) for g in grids], axis=1)
        nonzero = np.any(self.all_modes != 0, axis=1)
        self._fft_slot = np.flatnonzero(nonzero)
        self.mode_index = self.all_modes[nonzero]
        self.unit = 2 * np.pi / self.box_length
        self.momenta = self.unit * self.mode_index
        nyquist = np.abs(self.mode_index) == N // 2
        self.kappa = np.where(nyquist, 0.0, self.momenta)
        self._lookup = {tuple(n): i for i, n in enumerate(self.mode_index)}
        self._log = getLogger(__name__)
        self._log.debug('Lattice L=%g N=%d d=%d with %d momenta',
                        self.box_length, N, d, len(self.mode_index))

    def __repr__(self):
        """Indicates LatticeSpec and pretty prints its parameters"""
        return 'LatticeSpec\n' + PrettyPrinter().pformat({
            'box_length': self.box_length,
            'sites_per_axis': self.sites_per_axis,
            'dimension': self.dimension,
            'momenta': len(self.mode_index)})

    def wrap(self, n):
        """Fold an integer vector back into (−N/2, N/2]^d."""
        N = self.sites_per_axis
        n = (np.asarray(n, dtype=int) + N // 2 - 1) % N - N // 2 + 1
        return tuple(int(c) for c in n)

    def index_of(self, n):
        """Position of integer momentum `n` in :attr:`mode_index`.

        :raises KeyError: if `n` is zero or not a lattice momentum
        """
        key = self.wrap(n)
        if key not in self._lookup:
            raise KeyError('unknown momentum %r' % (n,))
        return self._lookup[key]

    def kappa_of(self, n):
        """κ for an arbitrary integer momentum, zero included."""
        n = np.array(self.wrap(n))
        return np.where(np.abs(n) == self.sites_per_axis // 2, 0.0,
                        self.unit * n)

    def partner(self, i):
        """Index of −k for the momentum at index `i`."""
        return self.index_of(-self.mode_index[i])

    def gauge_modes(self, shell=None):
        """Indices of the momenta carrying gauge degrees of freedom.

        These are the momenta with κ ≠ 0, optionally restricted to
        |n|² ≤ `shell`. The set is closed under k → −k.
        """
        keep = np.linalg.norm(self.kappa, axis=1) > 0
        if shell is not None:
            keep &= np.sum(self.mode_index ** 2, axis=1) <= shell
        return np.flatnonzero(keep)

    def plane_wave(self, i):
        """φ_k(x) = e^{ik·x}/√V on every site, for the momentum at index i."""
        phase = self.sites @ self.momenta[i]
        return np.exp(1j * phase) / np.sqrt(self.volume)

    def transform(self, values):
        """Lattice transform over all N^d momenta, in fftn order."""
        grid = np.asarray(values).reshape(self.shape)
        return self.cell / np.sqrt(self.volume) * np.fft.fftn(grid).reshape(-1)

    def inverse_transform(self, coefficients):
        grid = np.asarray(coefficients).reshape(self.shape)
        return (np.sqrt(self.volume) / self.cell
                * np.fft.ifftn(grid).reshape(-1))

    def project(self, values, modes):
        """Keep only the Fourier components at the momentum indices `modes`."""
        values = np.asarray(values)
        coefficients = self.transform(values)
        mask = np.zeros(self.n_sites, dtype=bool)
        mask[self._fft_slot[np.asarray(modes, dtype=int)]] = True
        out = self.inverse_transform(np.where(mask, coefficients, 0))
        return out.real if np.isrealobj(values) else out

    def multiplier(self, axis):
        """iκ_axis on the fftn grid (zero at k = 0 and at Nyquist)."""
        mult = np.zeros(self.n_sites, dtype=complex)
        mult[self._fft_slot] = 1j * self.kappa[:, axis]
        return mult

    def _apply(self, values, mult):
        grid = np.asarray(values).reshape(self.shape)
        out = np.fft.ifftn(mult.reshape(self.shape) * np.fft.fftn(grid))
        return out.reshape(-1)


class ScalarField:
    """Complex value per lattice site, with a reality flag.

    When `is_real` is set the stored imaginary parts are exactly zero.
    """

    def __init__(self, lattice, values, is_real=None):
        values = np.asarray(values)
        if values.shape != (lattice.n_sites,):
            raise cq.ConfigError('field has shape %r, lattice needs (%d,)'
                                 % (values.shape, lattice.n_sites))
        if is_real is None:
            is_real = np.isrealobj(values) or not np.any(values.imag)
        if is_real:
            if np.iscomplexobj(values) and np.any(values.imag):
                raise cq.ConfigError('field flagged real has imaginary parts')
            values = np.real(values).astype(float)
        self.lattice = lattice
        self.values = values
        self.is_real = bool(is_real)

    def __repr__(self):
        return 'ScalarField(real=%s, norm=%.3e)' % (
            self.is_real, np.linalg.norm(self.values))

    def __mul__(self, scale):
        return ScalarField(self.lattice, self.values * scale,
                           self.is_real and np.isrealobj(scale))

    __rmul__ = __mul__

    def integral(self, other=None):
        """a^d Σₓ f(x)·g(x) (bilinear, no conjugation)."""
        if other is None:
            return self.lattice.cell * np.sum(self.values)
        values = getattr(other, 'values', other)
        return self.lattice.cell * np.sum(self.values * values)


def build_lattice(L, N, d):
    """Build the :class:`LatticeSpec` for a box of side L with N sites per axis.

    :raises ConfigError: on odd or too small N, nonpositive L, or d ∉ {1, 3}
    """
    return LatticeSpec(L, N, d)


def _real_if(values, source):
    return np.real(values) if np.isrealobj(source) else values


def spectral_grad(lattice, f):
    """Gradient of a scalar field, shape (d, sites)."""
    values = getattr(f, 'values', f)
    return np.array([_real_if(lattice._apply(values, lattice.multiplier(j)),
                              values) for j in range(lattice.dimension)])


def spectral_div(lattice, v):
    """Divergence of a vector field of shape (d, sites)."""
    v = np.asarray(v)
    return sum(_real_if(lattice._apply(v[j], lattice.multiplier(j)), v)
               for j in range(lattice.dimension))


def spectral_curl(lattice, v):
    """Curl of a vector field; in one dimension there is no curl and the
    zero field is returned."""
    v = np.asarray(v)
    if lattice.dimension == 1:
        return np.zeros_like(v)

    def d(j, comp):
        return _real_if(lattice._apply(v[comp], lattice.multiplier(j)), v)

    return np.array([d(1, 2) - d(2, 1), d(2, 0) - d(0, 2), d(0, 1) - d(1, 0)])


def spectral_laplacian(lattice, f):
    return spectral_div(lattice, spectral_grad(lattice, f))


def transverse_pair(k, sqrt=np.sqrt):
    """Orthonormal transverse pair (ε¹, ε²) for a nonzero 3-vector k.

    ε² is k × ê normalized, with ê the coordinate axis of smallest |k_i|
    (first such axis on ties); ε¹ = ε² × k̂ completes a right-handed triad.
    Only ring operations and `sqrt` are used, so exact number types work.
    """
    k = list(k)
    axis = min(range(3), key=lambda i: abs(k[i]))
    e = [0, 0, 0]
    e[axis] = 1
    u = _cross(k, e)
    second = [c / sqrt(_dot(u, u)) for c in u]
    khat = [c / sqrt(_dot(k, k)) for c in k]
    first = _cross(second, khat)
    return first, second


def _cross(u, v):
    return [u[1] * v[2] - u[2] * v[1],
            u[2] * v[0] - u[0] * v[2],
            u[0] * v[1] - u[1] * v[0]]


def _dot(u, v):
    return sum(a * b for a, b in zip(u, v))


class PolarizationBasis:
    """Two real transverse unit vectors per momentum.

    :attr:`vectors` has shape (momenta, 2, 3); in one dimension there are no
    transverse directions and the shape is (momenta, 0, 1).
    """

    def __init__(self, momenta):
        momenta = np.asarray(momenta, dtype=float)
        if momenta.ndim != 2:
            raise cq.ConfigError('momenta must be a (count, d) array')
        if np.any(np.linalg.norm(momenta, axis=1) == 0):
            raise cq.ConfigError('polarizations need nonzero momenta')
        if momenta.shape[1] == 1:
            self.vectors = np.zeros((len(momenta), 0, 1))
        else:
            self.vectors = np.array([transverse_pair(k) for k in momenta])

    def __len__(self):
        return self.vectors.shape[1]


def polarization_basis(momenta):
    """Deterministic transverse pair for each momentum (empty in 1D)."""
    return PolarizationBasis(momenta)


def make_chi(lattice, kind, **params):
    """Build a real gauge function χ.

    :param kind: ``'fourier_mode'`` (params `mode`, integer vector, and
        `amplitude`), ``'gaussian_bump'`` (`center` in box coordinates,
        `width`, `amplitude`) or ``'self_tuned'`` (`field`, the divergence
        expectation, and `scale` f ≥ 0)
    :return: :class:`ScalarField` flagged real
    """
    if kind == 'fourier_mode':
        n = np.atleast_1d(np.asarray(params['mode'], dtype=float))
        k0 = lattice.unit * n
        values = params.get('amplitude', 1.0) * np.cos(lattice.sites @ k0)
    elif kind == 'gaussian_bump':
        center = np.atleast_1d(np.asarray(params.get(
            'center', [lattice.box_length / 2] * lattice.dimension)))
        width = params.get('width', lattice.box_length / 8)
        L = lattice.box_length
        delta = lattice.sites - center
        delta -= L * np.round(delta / L)
        values = params.get('amplitude', 1.0) * np.exp(
            -np.sum(delta ** 2, axis=1) / (2 * width ** 2))
    elif kind == 'self_tuned':
        scale = params.get('scale', 0.0)
        if scale < 0:
            raise cq.ConfigError('self_tuned scale must be >= 0, got %r'
                                 % (scale,))
        field = params['field']
        if isinstance(field, ScalarField):
            if not field.is_real:
                raise cq.ConfigError('self_tuned chi needs a real field')
            values = field.values
        else:
            values = np.asarray(field)
            if np.iscomplexobj(values) and np.any(values.imag):
                raise cq.ConfigError('self_tuned chi needs a real field')
            values = np.real(values)
        values = scale * values
    else:
        raise cq.ConfigError('unknown chi kind %r' % (kind,))
    return ScalarField(lattice, np.asarray(values, dtype=float), True)
