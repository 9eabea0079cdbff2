# -*- coding: utf-8 -*-

r"""Discrete norms, inner products and embedding constants for :math:`H^{\alpha}` and :math:`X^{\alpha}`.

Time-domain integrals use the (periodic) trapezoidal rule :math:`dt \sum_k`; the fractional
seminorm is evaluated through the discrete Plancherel identity, normalized so that it
coincides with the trapezoidal :math:`L^2` norm of the left derivative.
"""

import logging
from dataclasses import dataclass
from typing import TYPE_CHECKING, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
from dataclasses_json import dataclass_json
from scipy.integrate import quad

from .constants import TAG_L
from .exceptions import DimensionError, EmbeddingError, HypothesisViolationError, InvalidInputError
from .fracops import FracOrder, Grid, GridSignal, apply_symbol, as_order, composed_symbol

if TYPE_CHECKING:
    from .problem import MatrixField  # noqa: F401

__all__ = [
    'NormReport',
    'l2_norm',
    'sup_norm',
    'h_alpha_seminorm',
    'h_alpha_norm',
    'x_alpha_inner',
    'x_alpha_norm',
    'norm_report',
    'sobolev_constant',
    'sobolev_constant_quadrature',
    'smallest_eigenvalue',
    'embedding_constant_Ce',
    'lq_interpolation_check',
    'tail_mass',
    'tail_mass_profile',
    'sample_sphere',
]

logger = logging.getLogger(__name__)

OrderLike = Union[FracOrder, float]


@dataclass_json
@dataclass
class NormReport:
    """All the norms of a signal."""

    l2_norm: float
    sup_norm: float
    h_alpha_seminorm: float
    h_alpha_norm: float
    x_alpha_norm: float


def l2_norm(u: GridSignal) -> float:
    """Get the trapezoidal :math:`L^2` norm."""
    return float(np.sqrt(u.dt * np.sum(u.values ** 2)))


def sup_norm(u: GridSignal) -> float:
    """Get the largest Euclidean norm of a sample."""
    return float(np.max(np.linalg.norm(u.values, axis=1)))


def _seminorm_squared(values: np.ndarray, half_width: float, num_points: int, alpha: float) -> float:
    dt = 2.0 * half_width / num_points
    transformed = np.fft.fft(values, axis=0)
    symbol = composed_symbol(half_width, num_points, alpha)
    return float(dt / num_points * np.sum(symbol[:, None] * np.abs(transformed) ** 2))


def h_alpha_seminorm(u: GridSignal, a: OrderLike) -> float:
    """Get :math:`\\| |w|^{\\alpha} \\hat u \\|_{L^2}` by the discrete Plancherel identity."""
    alpha = as_order(a)
    return float(np.sqrt(_seminorm_squared(u.values, u.half_width, u.num_points, alpha)))


def h_alpha_norm(u: GridSignal, a: OrderLike) -> float:
    """Get :math:`(\\|u\\|_{L^2}^2 + |u|_{\\alpha}^2)^{1/2}`."""
    return float(np.hypot(l2_norm(u), h_alpha_seminorm(u, a)))


def _matrix_samples(field: 'MatrixField', grid: Grid) -> np.ndarray:
    samples = field.on_grid(grid)
    if samples.shape[1:] != (grid.dim, grid.dim):
        raise DimensionError(f'matrix field has dimension {samples.shape[1]}, signal has {grid.dim}')
    field.validate(grid)
    return samples


def x_alpha_inner(u: GridSignal, v: GridSignal, field: 'MatrixField', a: OrderLike) -> float:
    """Get :math:`\\int (D^{\\alpha} u, D^{\\alpha} v) + (L(t) u, v)\\,dt`.

    :raises HypothesisViolationError: if a sample of the matrix field is asymmetric or not
     positive definite
    """
    u.check_compatible(v)
    alpha = as_order(a)
    samples = _matrix_samples(field, u.grid)
    symbol = composed_symbol(u.half_width, u.num_points, alpha)
    fractional = np.sum(apply_symbol(u.values, symbol) * v.values)
    potential = np.einsum('kij,kj,ki->', samples, u.values, v.values)
    return float(u.dt * (fractional + potential))


def x_alpha_norm(u: GridSignal, field: 'MatrixField', a: OrderLike) -> float:
    """Get the norm induced by :func:`x_alpha_inner`."""
    return float(np.sqrt(max(x_alpha_inner(u, u, field, a), 0.0)))


def norm_report(u: GridSignal, field: 'MatrixField', a: OrderLike) -> NormReport:
    """Collect all norms of a signal."""
    l2 = l2_norm(u)
    semi = h_alpha_seminorm(u, a)
    return NormReport(
        l2_norm=l2,
        sup_norm=sup_norm(u),
        h_alpha_seminorm=semi,
        h_alpha_norm=float(np.hypot(l2, semi)),
        x_alpha_norm=x_alpha_norm(u, field, a),
    )


def _check_embedding(alpha: float) -> None:
    if not 0.5 < alpha <= 1.0:
        raise EmbeddingError(f'bounded embedding of H^alpha needs alpha > 1/2, got {alpha}')


def sobolev_constant(a: OrderLike, override: Optional[float] = None) -> float:
    r"""Get :math:`C_{\alpha}` with :math:`\|u\|_{\infty} \leq C_{\alpha} \|u\|_{H^{\alpha}}`.

    This is the Fourier inversion constant

    .. math::

        C_{\alpha} = \left( \frac{1}{2\pi} \int_{\mathbb{R}} \frac{dw}{1 + |w|^{2\alpha}} \right)^{1/2}
                   = \left( \frac{1/p}{\sin(\pi/p)} \right)^{1/2}, \qquad p = 2\alpha.

    :param a: The order. The value 1 is accepted as a boundary case.
    :param override: A user-supplied constant returned instead, after validation
    :raises EmbeddingError: if :math:`\alpha \leq 1/2`
    """
    alpha = as_order(a, allow_unit=True)
    _check_embedding(alpha)
    if override is not None:
        if not np.isfinite(override) or override <= 0:
            raise InvalidInputError(f'Sobolev constant override must be positive, got {override}')
        return float(override)
    p = 2.0 * alpha
    return float(np.sqrt((1.0 / p) / np.sin(np.pi / p)))


def sobolev_constant_quadrature(a: OrderLike) -> float:
    """Get :math:`C_{\\alpha}` by adaptive quadrature of its defining integral."""
    alpha = as_order(a, allow_unit=True)
    _check_embedding(alpha)
    value, _ = quad(lambda w: 1.0 / (1.0 + w ** (2.0 * alpha)), 0.0, np.inf, epsabs=1e-13, epsrel=1e-13, limit=200)
    return float(np.sqrt(value / np.pi))


def smallest_eigenvalue(field: 'MatrixField', grid: Grid) -> float:
    """Get the smallest eigenvalue of the matrix field over the grid nodes."""
    return float(np.min(field.smallest_eigenvalues(grid)))


def embedding_constant_Ce(field: 'MatrixField', grid: Union[Grid, GridSignal]) -> float:  # noqa: N802
    """Get :math:`C_e = \\max(1, 1/l_{min})^{1/2}` with :math:`\\|u\\|_{H^{\\alpha}} \\leq C_e \\|u\\|_{X^{\\alpha}}`.

    :raises HypothesisViolationError: if the smallest eigenvalue is not positive
    """
    if isinstance(grid, GridSignal):
        grid = grid.grid
    l_min = smallest_eigenvalue(field, grid)
    if not l_min > 0:
        raise HypothesisViolationError(f'matrix field is not positive definite (smallest eigenvalue {l_min})', TAG_L)
    return float(np.sqrt(max(1.0, 1.0 / l_min)))


def lq_interpolation_check(u: GridSignal, q: float) -> Tuple[float, float]:
    """Get both sides of :math:`\\int |u|^q \\leq \\|u\\|_{\\infty}^{q-2} \\|u\\|_{L^2}^2`."""
    if not q >= 2:
        raise InvalidInputError(f'exponent must be at least 2, got {q}')
    magnitudes = np.linalg.norm(u.values, axis=1)
    lhs = float(u.dt * np.sum(magnitudes ** q))
    rhs = float(np.max(magnitudes) ** (q - 2) * u.dt * np.sum(magnitudes ** 2))
    return lhs, rhs


def tail_mass(u: GridSignal, radius: float) -> float:
    """Get :math:`\\int_{|t| > R} |u|^2\\,dt`."""
    outside = np.abs(u.times) > radius
    return float(u.dt * np.sum(u.values[outside] ** 2))


def tail_mass_profile(signals: Iterable[GridSignal], radii: Sequence[float]) -> np.ndarray:
    """Get the largest tail mass over a family of signals for each radius."""
    masses = np.array([[tail_mass(u, radius) for radius in radii] for u in signals])
    if masses.size == 0:
        return np.zeros(len(radii))
    return masses.max(axis=0)


def sample_sphere(
    field: 'MatrixField',
    grid: Grid,
    a: OrderLike,
    count: int,
    radius: float = 1.0,
    seed: int = 42,
    window: Optional[float] = None,
) -> List[GridSignal]:
    """Draw random smooth signals scaled to a sphere of :math:`X^{\\alpha}`.

    White noise is smoothed by :math:`(1 + |w|^{2\\alpha})^{-1}` and localized by a Gaussian
    window, then rescaled to the given norm.

    :param field: The matrix field defining the norm
    :param grid: The grid
    :param a: The order
    :param count: The number of samples
    :param radius: The norm of every sample
    :param seed: Seed of the random generator
    :param window: Width of the Gaussian window, defaults to a quarter of the half width
    """
    alpha = as_order(a)
    rng = np.random.default_rng(seed)
    symbol = composed_symbol(grid.half_width, grid.num_points, alpha)
    width = grid.half_width / 4.0 if window is None else window
    envelope = np.exp(-(grid.times / width) ** 2)[:, None]
    rv = []
    for _ in range(count):
        noise = rng.standard_normal((grid.num_points, grid.dim))
        smooth = apply_symbol(noise, 1.0 / (1.0 + symbol)) * envelope
        u = GridSignal.on_grid(grid, smooth)
        rv.append(u * (radius / x_alpha_norm(u, field, alpha)))
    return rv
