# -*- coding: utf-8 -*-

r"""Liouville-Weyl fractional operators on a truncated periodic grid.

A trajectory :math:`u: [-T, T] \to \mathbb{R}^n` is sampled at :math:`t_k = -T + k\,dt`
with :math:`dt = 2T/N`. The left and right derivatives and integrals of order
:math:`0 < \alpha < 1` act as Fourier multipliers on the discrete transform of the
samples, using the principal branch

.. math::

    (\pm i w)^{\alpha} = |w|^{\alpha} \exp(\pm i\, \mathrm{sgn}(w)\, \alpha \pi / 2)

on the frequencies :math:`w_k = \pi k / T`. The zero mode and the unpaired Nyquist mode
are set to zero by every multiplier, so real signals are mapped to real signals.

:func:`marchaud_left_oracle` evaluates the left derivative directly in the time domain
through the Marchaud difference quotient and serves as an independent check of
:func:`left_frac_derivative`.
"""

import enum
import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional, Tuple, Union

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.signal import fftconvolve
from scipy.special import gamma, roots_legendre, zeta

from .constants import (
    DECAY_RTOL, EXTENSIONS, EXTENSION_PERIODIC, EXTENSION_ZERO, GAUSS_ORDER, MARCHAUD_M_QUAD, MEAN_RTOL,
    NEAR_FIELD_CELLS, NEAR_FIELD_FLOOR,
)
from .exceptions import DimensionError, DomainTruncationError, InvalidInputError, SingularModeError

__all__ = [
    'Side',
    'Grid',
    'GridSignal',
    'FracOrder',
    'as_order',
    'grid_times',
    'grid_frequencies',
    'left_frac_derivative',
    'right_frac_derivative',
    'left_frac_integral',
    'right_frac_integral',
    'composed_operator',
    'spectral_derivative',
    'apply_symbol',
    'composed_symbol',
    'reflect',
    'marchaud_left_oracle',
]

logger = logging.getLogger(__name__)


class Side(enum.Enum):
    """Side of a Liouville-Weyl operator."""

    #: Integrates over :math:`(-\infty, t]`
    Left = enum.auto()
    #: Integrates over :math:`[t, \infty)`
    Right = enum.auto()


def _is_power_of_two(value: int) -> bool:
    return value >= 2 and (value & (value - 1)) == 0


@dataclass(frozen=True)
class Grid:
    """Metadata of a uniform grid on :math:`[-T, T)` carrying :math:`\\mathbb{R}^n` samples."""

    #: The half width T of the domain
    half_width: float
    #: The number N of samples, a power of two
    num_points: int
    #: The dimension n of the trajectory
    dim: int = 1

    def __post_init__(self) -> None:  # noqa: D105
        if not np.isfinite(self.half_width) or self.half_width <= 0:
            raise InvalidInputError(f'half width must be positive and finite, got {self.half_width}')
        if not isinstance(self.num_points, (int, np.integer)) or not _is_power_of_two(int(self.num_points)):
            raise InvalidInputError(f'number of points must be a power of two, got {self.num_points}')
        if not isinstance(self.dim, (int, np.integer)) or self.dim < 1:
            raise InvalidInputError(f'dimension must be a positive integer, got {self.dim}')

    @property
    def dt(self) -> float:
        """Get the grid spacing."""
        return 2.0 * self.half_width / self.num_points

    @property
    def times(self) -> np.ndarray:
        """Get the (read-only) sample times."""
        return grid_times(float(self.half_width), int(self.num_points))

    @property
    def frequencies(self) -> np.ndarray:
        """Get the (read-only) angular frequencies in transform order."""
        return grid_frequencies(float(self.half_width), int(self.num_points))

    def with_dim(self, dim: int) -> 'Grid':
        """Get the same grid carrying samples of another dimension."""
        return Grid(self.half_width, self.num_points, dim)

    def check_compatible(self, other: 'Grid') -> None:
        """Raise a :class:`DimensionError` unless both grids match exactly."""
        if (self.half_width, self.num_points, self.dim) != (other.half_width, other.num_points, other.dim):
            raise DimensionError(
                f'grid mismatch: (T={self.half_width}, N={self.num_points}, n={self.dim}) '
                f'vs (T={other.half_width}, N={other.num_points}, n={other.dim})',
            )


@lru_cache(maxsize=32)
def grid_times(half_width: float, num_points: int) -> np.ndarray:
    """Get the sample times :math:`t_k = -T + k\\,dt`."""
    times = -half_width + np.arange(num_points) * (2.0 * half_width / num_points)
    times.setflags(write=False)
    return times


@lru_cache(maxsize=32)
def grid_frequencies(half_width: float, num_points: int) -> np.ndarray:
    """Get the angular frequencies :math:`w_k = \\pi k / T` in transform order."""
    frequencies = 2.0 * np.pi * np.fft.fftfreq(num_points, d=2.0 * half_width / num_points)
    frequencies.setflags(write=False)
    return frequencies


@dataclass(frozen=True, eq=False)
class GridSignal:
    """A sampled trajectory :math:`u: [-T, T] \\to \\mathbb{R}^n`.

    Row k of :attr:`values` holds :math:`u(t_k)`. The samples are copied on construction
    and kept read-only.
    """

    #: The half width T of the domain
    half_width: float
    #: The number N of samples
    num_points: int
    #: The dimension n
    dim: int
    #: The N x n array of samples
    values: np.ndarray

    def __post_init__(self) -> None:  # noqa: D105
        grid = Grid(self.half_width, self.num_points, self.dim)
        values = np.array(self.values, dtype=float)
        if values.ndim == 1 and grid.dim == 1:
            values = values.reshape(-1, 1)
        if values.shape != (grid.num_points, grid.dim):
            raise DimensionError(f'expected samples of shape {(grid.num_points, grid.dim)}, got {values.shape}')
        if not np.all(np.isfinite(values)):
            raise InvalidInputError('signal contains non-finite samples')
        values.setflags(write=False)
        object.__setattr__(self, 'half_width', float(self.half_width))
        object.__setattr__(self, 'num_points', int(self.num_points))
        object.__setattr__(self, 'dim', int(self.dim))
        object.__setattr__(self, 'values', values)

    @classmethod
    def on_grid(cls, grid: Grid, values: np.ndarray) -> 'GridSignal':
        """Wrap samples on the given grid."""
        return cls(grid.half_width, grid.num_points, grid.dim, values)

    @classmethod
    def zeros(cls, grid: Grid) -> 'GridSignal':
        """Get the zero trajectory on the given grid."""
        return cls.on_grid(grid, np.zeros((grid.num_points, grid.dim)))

    @classmethod
    def from_function(
        cls,
        func: Callable[[np.ndarray], np.ndarray],
        half_width: float,
        num_points: int,
        dim: Optional[int] = None,
    ) -> 'GridSignal':
        """Sample a vectorized function of time on the grid.

        :param func: Maps an array of N times to an array of shape (N,) or (N, n)
        :param half_width: The half width T of the domain
        :param num_points: The number N of samples
        :param dim: The dimension n. If none, inferred from the output of ``func``.
        """
        times = grid_times(float(half_width), int(num_points))
        values = np.asarray(func(times), dtype=float)
        if values.ndim == 1:
            values = values.reshape(-1, 1)
        if dim is None:
            dim = values.shape[1]
        return cls(half_width, num_points, dim, values)

    @property
    def grid(self) -> Grid:
        """Get the grid metadata."""
        return Grid(self.half_width, self.num_points, self.dim)

    @property
    def dt(self) -> float:
        """Get the grid spacing."""
        return 2.0 * self.half_width / self.num_points

    @property
    def times(self) -> np.ndarray:
        """Get the sample times."""
        return grid_times(self.half_width, self.num_points)

    def with_values(self, values: np.ndarray) -> 'GridSignal':
        """Get a signal on the same grid with other samples."""
        return GridSignal(self.half_width, self.num_points, self.dim, values)

    def check_compatible(self, other: 'GridSignal') -> None:
        """Raise a :class:`DimensionError` unless both signals live on the same grid."""
        self.grid.check_compatible(other.grid)

    def __add__(self, other: 'GridSignal') -> 'GridSignal':  # noqa: D105
        self.check_compatible(other)
        return self.with_values(self.values + other.values)

    def __sub__(self, other: 'GridSignal') -> 'GridSignal':  # noqa: D105
        self.check_compatible(other)
        return self.with_values(self.values - other.values)

    def __mul__(self, scalar: float) -> 'GridSignal':  # noqa: D105
        return self.with_values(float(scalar) * self.values)

    __rmul__ = __mul__

    def __neg__(self) -> 'GridSignal':  # noqa: D105
        return self.with_values(-self.values)

    def __repr__(self) -> str:  # noqa: D105
        return f'GridSignal(T={self.half_width}, N={self.num_points}, n={self.dim})'


@dataclass(frozen=True)
class FracOrder:
    """An order :math:`0 < \\alpha < 1` of a fractional operator."""

    alpha: float

    def __post_init__(self) -> None:  # noqa: D105
        if not np.isfinite(self.alpha) or not 0.0 < self.alpha < 1.0:
            raise InvalidInputError(f'fractional order must lie in (0, 1), got {self.alpha}')
        object.__setattr__(self, 'alpha', float(self.alpha))


OrderLike = Union[FracOrder, float]


def as_order(a: OrderLike, allow_unit: bool = False) -> float:
    """Get the float value of an order, validating it.

    :param a: An order or its value
    :param allow_unit: Whether :math:`\\alpha = 1` is accepted, which is only meaningful for
     the composed operator
    """
    if isinstance(a, FracOrder):
        return a.alpha
    alpha = float(a)
    if allow_unit and alpha == 1.0:
        return alpha
    return FracOrder(alpha).alpha


@lru_cache(maxsize=128)
def _multiplier(half_width: float, num_points: int, exponent: float, phase: float) -> np.ndarray:
    """Build :math:`|w|^{e} \\exp(i\\, \\mathrm{sgn}(w)\\, \\phi)` with the zero and Nyquist modes removed."""
    w = grid_frequencies(half_width, num_points)
    symbol = np.zeros(num_points, dtype=complex)
    active = w != 0.0
    symbol[active] = np.abs(w[active]) ** exponent * np.exp(1j * np.sign(w[active]) * phase)
    symbol[num_points // 2] = 0.0
    symbol.setflags(write=False)
    return symbol


def composed_symbol(half_width: float, num_points: int, alpha: float) -> np.ndarray:
    """Get the real symbol :math:`|w|^{2\\alpha}` of the composed operator, Nyquist mode removed."""
    return _composed_symbol(float(half_width), int(num_points), float(alpha))


@lru_cache(maxsize=64)
def _composed_symbol(half_width: float, num_points: int, alpha: float) -> np.ndarray:
    symbol = np.abs(grid_frequencies(half_width, num_points)) ** (2.0 * alpha)
    symbol[num_points // 2] = 0.0
    symbol.setflags(write=False)
    return symbol


def apply_symbol(values: np.ndarray, symbol: np.ndarray) -> np.ndarray:
    """Apply a Fourier multiplier along the time axis (the second to last one)."""
    transformed = np.fft.fft(values, axis=-2)
    return np.real(np.fft.ifft(symbol[:, None] * transformed, axis=-2))


def _frac_symbol(u: GridSignal, alpha: float, side: Side, inverse: bool) -> np.ndarray:
    sign = 1.0 if side is Side.Left else -1.0
    if inverse:
        sign = -sign
        exponent = -alpha
    else:
        exponent = alpha
    return _multiplier(u.half_width, u.num_points, exponent, sign * alpha * np.pi / 2.0)


def _check_mean(u: GridSignal, mean_rtol: float) -> None:
    scale = float(np.max(np.abs(u.values))) if u.values.size else 0.0
    mean = np.abs(u.values.mean(axis=0))
    if np.any(mean > mean_rtol * scale):
        raise SingularModeError(
            f'fractional integral of a signal with mean {mean.max():.3e} '
            f'(tolerance {mean_rtol * scale:.3e}); the symbol is singular at w = 0',
        )


def left_frac_derivative(u: GridSignal, a: OrderLike) -> GridSignal:
    """Apply the left Liouville-Weyl derivative, symbol :math:`(iw)^{\\alpha}`."""
    alpha = as_order(a)
    return u.with_values(apply_symbol(u.values, _frac_symbol(u, alpha, Side.Left, inverse=False)))


def right_frac_derivative(u: GridSignal, a: OrderLike) -> GridSignal:
    """Apply the right Liouville-Weyl derivative, symbol :math:`(-iw)^{\\alpha}`."""
    alpha = as_order(a)
    return u.with_values(apply_symbol(u.values, _frac_symbol(u, alpha, Side.Right, inverse=False)))


def left_frac_integral(u: GridSignal, a: OrderLike, mean_rtol: float = MEAN_RTOL) -> GridSignal:
    """Apply the left Liouville-Weyl integral, symbol :math:`(iw)^{-\\alpha}`.

    :raises SingularModeError: if the mean of any coordinate exceeds ``mean_rtol`` times
     the sup norm of the signal
    """
    alpha = as_order(a)
    _check_mean(u, mean_rtol)
    return u.with_values(apply_symbol(u.values, _frac_symbol(u, alpha, Side.Left, inverse=True)))


def right_frac_integral(u: GridSignal, a: OrderLike, mean_rtol: float = MEAN_RTOL) -> GridSignal:
    """Apply the right Liouville-Weyl integral, symbol :math:`(-iw)^{-\\alpha}`.

    :raises SingularModeError: if the mean of any coordinate exceeds ``mean_rtol`` times
     the sup norm of the signal
    """
    alpha = as_order(a)
    _check_mean(u, mean_rtol)
    return u.with_values(apply_symbol(u.values, _frac_symbol(u, alpha, Side.Right, inverse=True)))


def composed_operator(u: GridSignal, a: OrderLike) -> GridSignal:
    """Apply the right derivative after the left derivative, symbol :math:`|w|^{2\\alpha}`.

    The order :math:`\\alpha = 1` is accepted, in which case this is :math:`-u''`.
    """
    alpha = as_order(a, allow_unit=True)
    return u.with_values(apply_symbol(u.values, composed_symbol(u.half_width, u.num_points, alpha)))


def spectral_derivative(u: GridSignal, order: int = 1) -> GridSignal:
    """Differentiate a band-limited signal with the symbol :math:`(iw)^k`, Nyquist mode removed."""
    if order < 0:
        raise InvalidInputError(f'derivative order must be nonnegative, got {order}')
    w = grid_frequencies(u.half_width, u.num_points)
    symbol = (1j * w) ** order
    if order:
        symbol[u.num_points // 2] = 0.0
    return u.with_values(apply_symbol(u.values, symbol))


def reflect(u: GridSignal) -> GridSignal:
    """Get :math:`t \\mapsto u(-t)`; node k maps to node :math:`(-k) \\bmod N`."""
    index = (-np.arange(u.num_points)) % u.num_points
    return u.with_values(u.values[index])


def _near_field_nodes(xi_c: float, xi_min: float, panels: int) -> Tuple[np.ndarray, np.ndarray]:
    """Get Gauss-Legendre nodes and weights on geometrically graded panels of :math:`(\\xi_{min}, \\xi_c]`."""
    edges = np.geomspace(xi_min, xi_c, panels + 1)
    x, w = roots_legendre(GAUSS_ORDER)
    left, right = edges[:-1, None], edges[1:, None]
    half = 0.5 * (right - left)
    nodes = (left + right) / 2.0 + half * x[None, :]
    weights = half * w[None, :]
    return nodes.ravel(), weights.ravel()


def _periodic_kernel(num_points: int, first: int, alpha: float, dt: float) -> np.ndarray:
    """Fold the trapezoid weights :math:`dt\\,(j\\,dt)^{-1-\\alpha}`, :math:`j \\geq` ``first``, modulo N.

    Each residue class is summed to infinity with the Hurwitz zeta function.
    """
    residues = np.arange(num_points)
    start = residues + num_points * np.ceil((first - residues) / num_points).clip(min=0)
    kernel = dt ** (-alpha) * num_points ** (-1.0 - alpha) * zeta(1.0 + alpha, start / num_points)
    kernel[first % num_points] -= 0.5 * dt ** (-alpha) * first ** (-1.0 - alpha)
    return kernel


def marchaud_left_oracle(
    u: GridSignal,
    a: OrderLike,
    xi_max: Optional[float] = None,
    m_quad: int = MARCHAUD_M_QUAD,
    extension: str = EXTENSION_ZERO,
    decay_rtol: float = DECAY_RTOL,
) -> GridSignal:
    r"""Evaluate the left derivative in the time domain through its Marchaud form.

    .. math::

        D^{\alpha} u(x) = \frac{\alpha}{\Gamma(1-\alpha)}
            \int_0^{\infty} \frac{u(x) - u(x - \xi)}{\xi^{1 + \alpha}} \,\mathrm{d}\xi

    The integral is split at :math:`\xi_c = \min(64\,dt, T, \xi_{max})`. The near field uses
    ``m_quad`` Gauss-Legendre nodes on panels graded geometrically towards zero, with
    :math:`u` interpolated by a cubic spline and the innermost gap closed with the first
    order Taylor term. The far field uses the grid nodes :math:`j\,dt \leq \xi_{max}` with
    trapezoid weights, evaluated as a convolution, and the :math:`u(x)` part of the
    integrand is integrated exactly to infinity.

    :param u: A signal that decays at the boundary
    :param a: The order
    :param xi_max: Memory length. Defaults to 2T for the zero extension (exact, as every
     shift beyond it leaves the domain) and to infinity for the periodic extension.
    :param m_quad: Number of near-field quadrature nodes
    :param extension: Either ``'zero'`` (u vanishes outside the domain) or ``'periodic'``
     (the extension seen by the discrete transform)
    :param decay_rtol: Boundary samples must lie below this fraction of the sup norm
    :raises DomainTruncationError: if the signal does not decay at the boundary
    """
    alpha = as_order(a)
    if extension not in EXTENSIONS:
        raise InvalidInputError(f'unknown extension {extension!r}, expected one of {sorted(EXTENSIONS)}')
    if m_quad < GAUSS_ORDER:
        raise InvalidInputError(f'need at least {GAUSS_ORDER} quadrature nodes, got {m_quad}')

    values = u.values
    scale = float(np.max(np.abs(values)))
    boundary = float(max(np.max(np.abs(values[0])), np.max(np.abs(values[-1]))))
    if boundary > decay_rtol * scale:
        raise DomainTruncationError(
            f'signal does not decay at the boundary: {boundary:.3e} > {decay_rtol * scale:.3e}',
        )
    if scale == 0.0:
        return u.with_values(np.zeros_like(values))

    dt, n_points = u.dt, u.num_points
    if xi_max is None:
        xi_max = 2.0 * u.half_width if extension == EXTENSION_ZERO else np.inf
    elif xi_max <= 0:
        raise InvalidInputError(f'xi_max must be positive, got {xi_max}')

    xi_c = min(NEAR_FIELD_CELLS * dt, u.half_width, xi_max)
    xi_min = NEAR_FIELD_FLOOR * dt
    nodes, weights = _near_field_nodes(xi_c, xi_min, max(1, m_quad // GAUSS_ORDER))
    times = u.times

    if extension == EXTENSION_PERIODIC:
        closed = np.vstack([values, values[:1]])
        spline = CubicSpline(np.append(times, u.half_width), closed, axis=0, bc_type='periodic')
        shifted = (times[:, None] - nodes[None, :] + u.half_width) % (2.0 * u.half_width) - u.half_width
    else:
        pad = int(np.ceil(xi_c / dt)) + 4
        padded_times = times[0] + dt * np.arange(-pad, n_points + pad)
        padded = np.vstack([np.zeros((pad, u.dim)), values, np.zeros((pad, u.dim))])
        spline = CubicSpline(padded_times, padded, axis=0)
        shifted = times[:, None] - nodes[None, :]

    # (N, m, n) differences against the (m,) singular weights
    differences = values[:, None, :] - spline(shifted)
    near = np.einsum('kmi,m->ki', differences, weights * nodes ** (-1.0 - alpha))
    near += spline(times, 1) * xi_min ** (1.0 - alpha) / (1.0 - alpha)

    local = values * xi_c ** (-alpha) / alpha

    first = int(round(xi_c / dt))
    if extension == EXTENSION_PERIODIC and np.isinf(xi_max):
        kernel = _periodic_kernel(n_points, first, alpha, dt)
        far = np.real(np.fft.ifft(np.fft.fft(kernel)[:, None] * np.fft.fft(values, axis=0), axis=0))
    else:
        last = int(np.floor(xi_max / dt + 1e-9))
        far = np.zeros_like(values)
        if last > first:
            j = np.arange(last + 1)
            weights_far = np.zeros(last + 1)
            weights_far[first:] = dt * (j[first:] * dt) ** (-1.0 - alpha)
            weights_far[first] *= 0.5
            weights_far[last] *= 0.5
            if extension == EXTENSION_PERIODIC:
                folded = np.zeros(n_points)
                np.add.at(folded, j % n_points, weights_far)
                far = np.real(np.fft.ifft(np.fft.fft(folded)[:, None] * np.fft.fft(values, axis=0), axis=0))
            else:
                far = fftconvolve(values, weights_far[:, None], mode='full', axes=0)[:n_points]
        if np.isfinite(xi_max) and extension == EXTENSION_ZERO and last * dt < 2.0 * u.half_width:
            logger.debug('Marchaud memory truncated at %.3g < 2T', last * dt)

    result = alpha / gamma(1.0 - alpha) * (near + local - far)
    return u.with_values(result)
