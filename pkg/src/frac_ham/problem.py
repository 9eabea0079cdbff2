# -*- coding: utf-8 -*-

r"""Problem data :math:`(\alpha, L, W, f)`, builtin families and the hypothesis audit.

The solved system is

.. math::

    -{}_tD_{\infty}^{\alpha}({}_{-\infty}D_t^{\alpha} u) - L(t) u + \nabla W(t, u) = f(t)

where :math:`L` is a coercive symmetric matrix field, :math:`W` a superquadratic potential
and :math:`f` a small square-integrable forcing term.

Evaluators are vectorized: a matrix field maps an array of K times to K matrices, and a
potential maps K times and K points of :math:`\mathbb{R}^n` to K values (or gradients).
"""

import logging
from dataclasses import dataclass, field, replace
from typing import Any, Callable, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from dataclasses_json import dataclass_json
from scipy.special import ndtri
from scipy.stats import qmc

from .constants import (
    AUDIT_RADII, DEFAULT_SAMPLE_BUDGET, DEFAULT_SEED, SMALL_RADII, TAG_D, TAG_GRADIENT, TAG_L, TAG_SCALING, TAG_W0,
    TAG_W1, TAG_W2, TAG_W3, TAG_WF,
)
from .exceptions import (
    AdmissibilityError, DimensionError, EmbeddingError, HypothesisViolationError, InvalidInputError,
    SuperquadraticityError,
)
from .fracops import FracOrder, Grid, GridSignal
from .spaces import embedding_constant_Ce, l2_norm, smallest_eigenvalue, sobolev_constant

__all__ = [
    'MatrixField',
    'Potential',
    'ProblemSpec',
    'ConstantsReport',
    'HypothesisCheck',
    'HypothesisReport',
    'identity_matrix_field',
    'coercive_quadratic_matrix_field',
    'diagonal_matrix_field',
    'constant_matrix_field',
    'builtin_homogeneous_potential',
    'mixed_power_potential',
    'homogeneous_potential',
    'zero_forcing',
    'gaussian_forcing',
    'MATRIX_FIELDS',
    'POTENTIALS',
    'sphere_directions',
    'constants_report',
    'require_admissible',
    'audit_hypotheses',
]

logger = logging.getLogger(__name__)

TimeFunction = Callable[[np.ndarray], np.ndarray]
PointFunction = Callable[[np.ndarray, np.ndarray], np.ndarray]


@dataclass(frozen=True, eq=False)
class MatrixField:
    """A symmetric matrix field :math:`L(t)` with its coercivity floor :math:`l(t)`."""

    #: Maps K times to a K x n x n array of matrices
    evaluator: TimeFunction
    #: Maps K times to the K values of l(t), with (L(t)x, x) >= l(t)|x|^2
    coercivity_floor: TimeFunction
    #: The dimension n
    dim: int
    #: A label for reports
    name: str = 'custom'
    #: Set when every L(t) is diagonal, which shortcuts the eigenvalue computation
    diagonal: bool = False
    _cache: Dict[Any, np.ndarray] = field(default_factory=dict, repr=False)

    def __call__(self, t: float) -> np.ndarray:
        """Evaluate the matrix at a single time."""
        return np.asarray(self.evaluator(np.array([float(t)])), dtype=float)[0]

    def on_grid(self, grid: Grid) -> np.ndarray:
        """Get the (read-only) N x n x n array of samples at the grid nodes."""
        key = ('samples', grid.half_width, grid.num_points)
        if key not in self._cache:
            samples = np.asarray(self.evaluator(grid.times), dtype=float)
            if samples.shape != (grid.num_points, self.dim, self.dim):
                raise DimensionError(
                    f'matrix field {self.name} returned shape {samples.shape}, '
                    f'expected {(grid.num_points, self.dim, self.dim)}',
                )
            if not np.all(np.isfinite(samples)):
                raise InvalidInputError(f'matrix field {self.name} returned non-finite entries')
            samples.setflags(write=False)
            self._cache[key] = samples
        return self._cache[key]

    def smallest_eigenvalues(self, grid: Grid) -> np.ndarray:
        """Get the smallest eigenvalue of each node's matrix."""
        key = ('eigenvalues', grid.half_width, grid.num_points)
        if key not in self._cache:
            samples = self.on_grid(grid)
            if self.diagonal:
                values = np.min(np.diagonal(samples, axis1=1, axis2=2), axis=1)
            else:
                values = np.linalg.eigvalsh(0.5 * (samples + np.swapaxes(samples, 1, 2)))[:, 0]
            values.setflags(write=False)
            self._cache[key] = values
        return self._cache[key]

    def asymmetry(self, grid: Grid) -> float:
        """Get the largest entry of :math:`L - L^T` relative to the largest entry of :math:`L`."""
        samples = self.on_grid(grid)
        scale = max(1.0, float(np.max(np.abs(samples))))
        return float(np.max(np.abs(samples - np.swapaxes(samples, 1, 2)))) / scale

    def validate(self, grid: Grid) -> None:
        """Check symmetry and positive definiteness on the grid.

        :raises HypothesisViolationError: on the first violation, tagged ``(L)``
        """
        if self.asymmetry(grid) > 1e-12:
            raise HypothesisViolationError(f'matrix field {self.name} is not symmetric', TAG_L)
        l_min = float(np.min(self.smallest_eigenvalues(grid)))
        if not l_min > 0:
            raise HypothesisViolationError(
                f'matrix field {self.name} is not positive definite (smallest eigenvalue {l_min:.3e})', TAG_L,
            )

    def apply(self, grid: Grid, values: np.ndarray) -> np.ndarray:
        """Multiply samples (optionally batched along leading axes) by :math:`L(t_k)` node by node."""
        return np.einsum('kij,...kj->...ki', self.on_grid(grid), values)


@dataclass(frozen=True, eq=False)
class Potential:
    """A potential :math:`W(t, x)` with its gradient, exponent and envelope."""

    #: Maps (K times, K x n points) to K values
    value: PointFunction
    #: Maps (K times, K x n points) to K x n gradients
    gradient: PointFunction
    #: The superquadratic exponent, strictly above 2
    mu: float
    #: Maps K x n points to K nonnegative values dominating |W| + |grad W|
    envelope: Callable[[np.ndarray], np.ndarray]
    #: A label for reports
    name: str = 'custom'

    def __post_init__(self) -> None:  # noqa: D105
        if not np.isfinite(self.mu) or self.mu <= 2.0:
            raise SuperquadraticityError(f'potential {self.name} needs mu > 2, got {self.mu}')

    def evaluate(self, times: np.ndarray, points: np.ndarray) -> np.ndarray:
        """Evaluate on arbitrary leading shapes; times broadcast against the points."""
        flat_times, flat_points, shape = _flatten(times, points)
        return np.asarray(self.value(flat_times, flat_points)).reshape(shape)

    def evaluate_gradient(self, times: np.ndarray, points: np.ndarray) -> np.ndarray:
        """Evaluate the gradient on arbitrary leading shapes."""
        flat_times, flat_points, shape = _flatten(times, points)
        return np.asarray(self.gradient(flat_times, flat_points)).reshape(shape + flat_points.shape[-1:])


def _flatten(times: np.ndarray, points: np.ndarray) -> Tuple[np.ndarray, np.ndarray, Tuple[int, ...]]:
    """Broadcast times against the leading axes of the points and flatten both."""
    points = np.asarray(points, dtype=float)
    n = points.shape[-1]
    shape = np.broadcast_shapes(np.shape(times), points.shape[:-1])
    flat_times = np.broadcast_to(times, shape).reshape(-1)
    flat_points = np.broadcast_to(points, shape + (n,)).reshape(-1, n)
    return flat_times, flat_points, shape


@dataclass(frozen=True, eq=False)
class ProblemSpec:
    """The data of the forced fractional Hamiltonian system."""

    #: The order, which must exceed 1/2
    alpha: FracOrder
    matrix_field: MatrixField
    potential: Potential
    #: Samples of f, which also fix the grid
    forcing: GridSignal
    #: Replaces the Sobolev constant in every derived quantity
    c_alpha_override: Optional[float] = None

    def __post_init__(self) -> None:  # noqa: D105
        if not isinstance(self.alpha, FracOrder):
            object.__setattr__(self, 'alpha', FracOrder(float(self.alpha)))
        if self.alpha.alpha <= 0.5:
            raise EmbeddingError(f'the system needs alpha > 1/2, got {self.alpha.alpha}')
        if self.matrix_field.dim != self.forcing.dim:
            raise DimensionError(
                f'matrix field has dimension {self.matrix_field.dim}, forcing has {self.forcing.dim}',
            )

    @property
    def grid(self) -> Grid:
        """Get the grid of the problem."""
        return self.forcing.grid

    @property
    def dim(self) -> int:
        """Get the dimension n."""
        return self.forcing.dim

    def zeros(self) -> GridSignal:
        """Get the zero trajectory on the problem grid."""
        return GridSignal.zeros(self.grid)

    def check_signal(self, u: GridSignal) -> None:
        """Raise a :class:`DimensionError` unless the signal lives on the problem grid."""
        self.grid.check_compatible(u.grid)

    def with_forcing(self, forcing: GridSignal) -> 'ProblemSpec':
        """Get the same problem with another forcing term."""
        self.grid.check_compatible(forcing.grid)
        return replace(self, forcing=forcing)

    @property
    def is_unforced(self) -> bool:
        """Check whether the forcing vanishes identically."""
        return not np.any(self.forcing.values)


@dataclass_json
@dataclass
class ConstantsReport:
    """The scalar constants of the mountain-pass geometry."""

    alpha: float
    c_alpha: float
    c_e: float
    #: Largest value of the envelope on the unit sphere
    M: float  # noqa: N815
    #: Smallest value of W on the unit sphere over t in [0, 1]
    m: float
    rho: float
    beta: float
    f_l2_norm: float
    mu: float
    l_min: float
    #: The (Wf) budget 1/(2 C_alpha^2 C_e^2) - M available to the forcing norm
    wf_budget: float
    admissible: bool


@dataclass_json
@dataclass
class HypothesisCheck:
    """The outcome of one numerical hypothesis check."""

    tag: str
    name: str
    passed: bool
    value: float
    threshold: float
    detail: str = ''


@dataclass_json
@dataclass
class HypothesisReport:
    """The outcome of :func:`audit_hypotheses`."""

    checks: List[HypothesisCheck]
    constants: Optional[ConstantsReport]
    #: Empirical bound d on |grad W(t, x)| / |x| for |x| <= 1
    d_estimate: float
    solver_ready: bool

    def failed_tags(self) -> List[str]:
        """Get the sorted unique tags of the failing checks."""
        return sorted({check.tag for check in self.checks if not check.passed})


"""Matrix fields"""


def _identity_stack(times: np.ndarray, dim: int) -> np.ndarray:
    return np.broadcast_to(np.eye(dim), (len(times), dim, dim)).copy()


def identity_matrix_field(dim: int, scale: float = 1.0) -> MatrixField:
    """Get :math:`L(t) = s\\,\\mathrm{Id}`; it has no growth at infinity."""
    return MatrixField(
        evaluator=lambda t: scale * _identity_stack(t, dim),
        coercivity_floor=lambda t: np.full(len(t), float(scale)),
        dim=dim,
        name='identity',
        diagonal=True,
    )


def coercive_quadratic_matrix_field(dim: int, scale: float = 1.0, growth: float = 1.0) -> MatrixField:
    """Get :math:`L(t) = s (1 + g t^2)\\,\\mathrm{Id}`."""
    def floor(t: np.ndarray) -> np.ndarray:
        return scale * (1.0 + growth * np.asarray(t) ** 2)

    return MatrixField(
        evaluator=lambda t: floor(t)[:, None, None] * _identity_stack(t, dim),
        coercivity_floor=floor,
        dim=dim,
        name='coercive_quadratic',
        diagonal=True,
    )


def diagonal_matrix_field(scales: Sequence[float], growths: Sequence[float]) -> MatrixField:
    """Get :math:`L(t) = \\mathrm{diag}(s_i (1 + g_i t^2))`."""
    scales_ = np.asarray(scales, dtype=float)
    growths_ = np.asarray(growths, dtype=float)
    if scales_.shape != growths_.shape or scales_.ndim != 1:
        raise InvalidInputError('scales and growths must be sequences of the same length')

    def entries(t: np.ndarray) -> np.ndarray:
        return scales_[None, :] * (1.0 + growths_[None, :] * np.asarray(t)[:, None] ** 2)

    def evaluator(t: np.ndarray) -> np.ndarray:
        d = entries(t)
        return d[:, :, None] * np.eye(len(scales_))[None, :, :]

    return MatrixField(
        evaluator=evaluator,
        coercivity_floor=lambda t: entries(t).min(axis=1),
        dim=len(scales_),
        name='diagonal',
        diagonal=True,
    )


def constant_matrix_field(matrix: Sequence[Sequence[float]]) -> MatrixField:
    """Get a time-independent matrix field; its floor is the smallest eigenvalue."""
    matrix_ = np.asarray(matrix, dtype=float)
    if matrix_.ndim != 2 or matrix_.shape[0] != matrix_.shape[1]:
        raise InvalidInputError(f'expected a square matrix, got shape {matrix_.shape}')
    floor = float(np.linalg.eigvalsh(0.5 * (matrix_ + matrix_.T))[0])
    return MatrixField(
        evaluator=lambda t: np.broadcast_to(matrix_, (len(t),) + matrix_.shape).copy(),
        coercivity_floor=lambda t: np.full(len(t), floor),
        dim=matrix_.shape[0],
        name='constant',
    )


#: Matrix field builders by name; each takes the dimension first
MATRIX_FIELDS: Mapping[str, Callable[..., MatrixField]] = {
    'identity': identity_matrix_field,
    'coercive_quadratic': coercive_quadratic_matrix_field,
    'diagonal': lambda dim, **kwargs: diagonal_matrix_field(**kwargs),
    'constant': lambda dim, **kwargs: constant_matrix_field(**kwargs),
}

"""Potentials"""


def builtin_homogeneous_potential(
    a_func: TimeFunction,
    mu: float,
    a_sup: Optional[float] = None,
    sample_times: Optional[np.ndarray] = None,
) -> Potential:
    r"""Get :math:`W(t, x) = a(t) |x|^{\mu}` with its envelope.

    The envelope :math:`\overline{W}(x) = (\sup a)(|x|^{\mu} + \mu |x|^{\mu - 1})` dominates
    :math:`|W| + |\nabla W|`.

    :param a_func: A bounded, positive, vectorized amplitude
    :param mu: The exponent, strictly above 2
    :param a_sup: The supremum of the amplitude. If none, it is estimated on ``sample_times``.
    :param sample_times: Times used to validate the amplitude, defaults to 4001 points on [-100, 100]
    :raises SuperquadraticityError: if mu is not above 2
    """
    if not np.isfinite(mu) or mu <= 2.0:
        raise SuperquadraticityError(f'homogeneous potential needs mu > 2, got {mu}')
    if sample_times is None:
        sample_times = np.linspace(-100.0, 100.0, 4001)
    amplitudes = np.asarray(a_func(sample_times), dtype=float)
    if not np.all(np.isfinite(amplitudes)) or np.min(amplitudes) <= 0:
        raise InvalidInputError('the amplitude of a homogeneous potential must be positive and bounded')
    if a_sup is None:
        a_sup = float(np.max(amplitudes))

    def value(t: np.ndarray, x: np.ndarray) -> np.ndarray:
        return a_func(t) * np.linalg.norm(x, axis=-1) ** mu

    def gradient(t: np.ndarray, x: np.ndarray) -> np.ndarray:
        r = np.linalg.norm(x, axis=-1)
        return (mu * a_func(t) * r ** (mu - 2.0))[:, None] * x

    def envelope(x: np.ndarray) -> np.ndarray:
        r = np.linalg.norm(x, axis=-1)
        return a_sup * (r ** mu + mu * r ** (mu - 1.0))

    return Potential(value=value, gradient=gradient, mu=float(mu), envelope=envelope, name='homogeneous')


def homogeneous_potential(amplitude: float = 1.0, mu: float = 4.0, modulation: float = 0.0) -> Potential:
    """Get :math:`W = a(t)|x|^{\\mu}` with :math:`a(t) = A (1 + m\\, t^2/(1 + t^2))`."""
    if amplitude <= 0 or modulation <= -1.0:
        raise InvalidInputError('amplitude must be positive and modulation above -1')

    def a_func(t: np.ndarray) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        return amplitude * (1.0 + modulation * t ** 2 / (1.0 + t ** 2))

    return builtin_homogeneous_potential(a_func, mu, a_sup=amplitude * max(1.0, 1.0 + modulation))


def mixed_power_potential(
    amplitudes: Sequence[float] = (1.0, 1.0),
    mus: Sequence[float] = (3.0, 4.0),
) -> Potential:
    """Get :math:`W = \\sum_i a_i |x|^{\\mu_i}`; the exponent is the smallest :math:`\\mu_i`."""
    amplitudes_ = np.asarray(amplitudes, dtype=float)
    mus_ = np.asarray(mus, dtype=float)
    if amplitudes_.shape != mus_.shape or amplitudes_.ndim != 1 or not len(mus_):
        raise InvalidInputError('amplitudes and exponents must be sequences of the same length')
    if np.any(amplitudes_ <= 0):
        raise InvalidInputError('amplitudes must be positive')
    mu = float(np.min(mus_))
    if mu <= 2.0:
        raise SuperquadraticityError(f'mixed power potential needs every exponent above 2, got {mu}')

    def value(t: np.ndarray, x: np.ndarray) -> np.ndarray:
        r = np.linalg.norm(x, axis=-1)[:, None]
        return np.sum(amplitudes_ * r ** mus_, axis=1)

    def gradient(t: np.ndarray, x: np.ndarray) -> np.ndarray:
        r = np.linalg.norm(x, axis=-1)[:, None]
        return np.sum(amplitudes_ * mus_ * r ** (mus_ - 2.0), axis=1)[:, None] * x

    def envelope(x: np.ndarray) -> np.ndarray:
        r = np.linalg.norm(x, axis=-1)[:, None]
        return np.sum(amplitudes_ * (r ** mus_ + mus_ * r ** (mus_ - 1.0)), axis=1)

    return Potential(value=value, gradient=gradient, mu=mu, envelope=envelope, name='mixed_power')


#: Potential builders by name
POTENTIALS: Mapping[str, Callable[..., Potential]] = {
    'homogeneous': homogeneous_potential,
    'mixed_power': mixed_power_potential,
}

"""Forcing terms"""


def zero_forcing(grid: Grid) -> GridSignal:
    """Get :math:`f \\equiv 0`."""
    return GridSignal.zeros(grid)


def gaussian_forcing(
    grid: Grid,
    norm: float,
    direction: Optional[Sequence[float]] = None,
    width: float = 1.0,
    center: float = 0.0,
) -> GridSignal:
    """Get :math:`f(t) = \\varepsilon \\exp(-((t - c)/w)^2)\\,e` scaled to the given :math:`L^2` norm.

    :param grid: The grid
    :param norm: The :math:`L^2` norm of the result
    :param direction: The vector e, defaults to the first axis
    :param width: The width w
    :param center: The center c
    """
    e = np.zeros(grid.dim) if direction is None else np.asarray(direction, dtype=float)
    if direction is None:
        e[0] = 1.0
    if e.shape != (grid.dim,) or not np.any(e):
        raise InvalidInputError(f'forcing direction must be a nonzero vector of length {grid.dim}')
    if width <= 0 or norm < 0:
        raise InvalidInputError('forcing width must be positive and its norm nonnegative')
    profile = np.exp(-((grid.times - center) / width) ** 2)[:, None] * (e / np.linalg.norm(e))[None, :]
    f = GridSignal.on_grid(grid, profile)
    return f * (norm / l2_norm(f))


"""Constants and audit"""


def sphere_directions(dim: int, count: int, seed: int = DEFAULT_SEED) -> np.ndarray:
    """Get reproducible, well spread unit vectors of :math:`\\mathbb{R}^n`.

    Scrambled Sobol points are mapped through the inverse normal distribution function and
    normalized; the signed coordinate axes are appended.
    """
    if dim == 1:
        return np.array([[1.0], [-1.0]])
    axes = np.vstack([np.eye(dim), -np.eye(dim)])
    if count <= 0:
        return axes
    sampler = qmc.Sobol(d=dim, scramble=True, seed=seed)
    points = sampler.random_base2(m=int(np.ceil(np.log2(count))))[:count]
    gaussian = ndtri(np.clip(points, 1e-12, 1.0 - 1e-12))
    directions = gaussian / np.linalg.norm(gaussian, axis=1, keepdims=True)
    return np.vstack([directions, axes])


def constants_report(
    p: ProblemSpec,
    sample_budget: int = DEFAULT_SAMPLE_BUDGET,
    seed: int = DEFAULT_SEED,
) -> ConstantsReport:
    """Compute the constants of the mountain-pass geometry.

    An inadmissible forcing term is reported through ``admissible`` and a nonpositive
    ``beta``, not raised.

    :raises HypothesisViolationError: if the matrix field is not positive definite
    """
    grid = p.grid
    c_alpha = sobolev_constant(p.alpha, override=p.c_alpha_override)
    l_min = smallest_eigenvalue(p.matrix_field, grid)
    c_e = embedding_constant_Ce(p.matrix_field, grid)

    directions = sphere_directions(p.dim, sample_budget, seed=seed)
    big_m = float(np.max(p.potential.envelope(directions)))
    times = np.linspace(0.0, 1.0, max(2, sample_budget))
    small_m = float(np.min(p.potential.evaluate(times[:, None], directions[None, :, :])))

    f_l2 = l2_norm(p.forcing)
    barrier = 1.0 / (2.0 * c_alpha ** 2 * c_e ** 2)
    budget = barrier - big_m
    return ConstantsReport(
        alpha=p.alpha.alpha,
        c_alpha=c_alpha,
        c_e=c_e,
        M=big_m,
        m=small_m,
        rho=1.0 / (c_alpha * c_e),
        beta=budget - f_l2,
        f_l2_norm=f_l2,
        mu=p.potential.mu,
        l_min=l_min,
        wf_budget=budget,
        admissible=bool(big_m < barrier and f_l2 < budget),
    )


def require_admissible(report: ConstantsReport) -> None:
    """Raise an :class:`AdmissibilityError` unless the forcing fits the (Wf) budget."""
    if not report.admissible:
        raise AdmissibilityError(
            f'forcing norm {report.f_l2_norm:.6g} does not fit the budget {report.wf_budget:.6g} '
            f'(M = {report.M:.6g}, beta = {report.beta:.6g})',
        )


def _check(tag: str, name: str, passed: bool, value: float, threshold: float, detail: str = '') -> HypothesisCheck:
    check = HypothesisCheck(
        tag=tag, name=name, passed=bool(passed), value=float(value), threshold=float(threshold), detail=detail,
    )
    if not check.passed:
        logger.info('hypothesis check %s %s failed: %s (threshold %s) %s', tag, name, value, threshold, detail)
    return check


def _audit_matrix_field(p: ProblemSpec) -> List[HypothesisCheck]:
    grid = p.grid
    field_ = p.matrix_field
    times = grid.times
    asymmetry = field_.asymmetry(grid)
    eigenvalues = field_.smallest_eigenvalues(grid)
    floor = np.asarray(field_.coercivity_floor(times), dtype=float)
    coercive = (floor > 0) & (eigenvalues >= floor * (1.0 - 1e-12) - 1e-14)

    outer = np.abs(times) > grid.half_width / 4.0
    right = floor[outer & (times > 0)]
    left = floor[outer & (times < 0)][::-1]
    monotone = bool(np.all(np.diff(right) >= -1e-12 * np.abs(right[1:])) and
                    np.all(np.diff(left) >= -1e-12 * np.abs(left[1:])))
    ends = np.asarray(field_.coercivity_floor(np.array([-grid.half_width, 0.0, grid.half_width])), dtype=float)
    growth = float(min(ends[0], ends[2]) / ends[1]) if ends[1] > 0 else 0.0

    return [
        _check(TAG_L, 'symmetry', asymmetry <= 1e-12, asymmetry, 1e-12),
        _check(
            TAG_L, 'coercivity', bool(np.all(coercive)), float(np.mean(coercive)), 1.0,
            detail=f'smallest eigenvalue {float(np.min(eigenvalues)):.6g}',
        ),
        _check(
            TAG_L, 'growth', monotone and growth >= 10.0, growth, 10.0,
            detail='l(t) monotone outside [-T/4, T/4]' if monotone else 'l(t) not monotone outside [-T/4, T/4]',
        ),
    ]


def _audit_potential(p: ProblemSpec, sample_budget: int, seed: int) -> List[HypothesisCheck]:
    potential = p.potential
    times = p.grid.times
    directions = sphere_directions(p.dim, sample_budget, seed=seed)
    rv = []

    zero = np.zeros((len(times), p.dim))
    at_zero = max(
        float(np.max(np.abs(potential.evaluate(times, zero)))),
        float(np.max(np.abs(potential.evaluate_gradient(times, zero)))),
    )
    rv.append(_check(TAG_W0, 'vanishes at zero', at_zero <= 1e-12, at_zero, 1e-12))

    ratios: Dict[float, float] = {}
    for radius in AUDIT_RADII:
        x = np.broadcast_to(radius * directions[None, :, :], (len(times),) + directions.shape)
        w = potential.evaluate(times[:, None], x)
        g = potential.evaluate_gradient(times[:, None], x)
        pairing = np.sum(x * g, axis=-1)
        envelope = potential.envelope(x.reshape(-1, p.dim)).reshape(w.shape)
        g_norm = np.linalg.norm(g, axis=-1)
        ratios[radius] = float(np.max(g_norm) / radius)

        margin = float(np.min((pairing - potential.mu * w) / np.maximum(1.0, potential.mu * np.abs(w))))
        rv.append(_check(
            TAG_W1, f'superquadratic at r={radius:g}', margin >= -1e-10 and bool(np.all(w > 0)), margin, -1e-10,
            detail=f'min W = {float(np.min(w)):.3e}',
        ))
        domination = float(np.min((envelope - np.abs(w) - g_norm) / np.maximum(1.0, envelope)))
        rv.append(_check(
            TAG_W3, f'envelope at r={radius:g}', domination >= -1e-12 and bool(np.all(envelope >= 0)),
            domination, -1e-12,
        ))

        unit = potential.evaluate(times[:, None], directions[None, :, :])
        scaled = w / (unit * radius ** potential.mu)
        if radius >= 1.0:
            worst = float(np.min(scaled))
            rv.append(_check(TAG_SCALING, f'scaling at r={radius:g}', worst >= 1.0 - 1e-10, worst, 1.0 - 1e-10))
        if radius <= 1.0:
            worst = float(np.max(scaled))
            rv.append(_check(TAG_SCALING, f'scaling at r={radius:g}', worst <= 1.0 + 1e-10, worst, 1.0 + 1e-10))

        rv.append(_gradient_check(potential, times, x, radius))

    small = [ratios[radius] for radius in SMALL_RADII]
    decreasing = all(b < a for a, b in zip(small, small[1:]))
    rv.append(_check(
        TAG_W2, 'little-o at zero', decreasing, small[-1], small[0],
        detail='ratios ' + ', '.join(f'{r:.3e}' for r in small),
    ))
    return rv


def _gradient_check(potential: Potential, times: np.ndarray, x: np.ndarray, radius: float) -> HypothesisCheck:
    """Compare the gradient with central differences with a step relative to the radius."""
    step = 1e-5 * radius
    t = np.broadcast_to(times[:, None], x.shape[:-1])
    approx = np.zeros_like(x)
    for i in range(x.shape[-1]):
        shift = np.zeros(x.shape[-1])
        shift[i] = step
        approx[..., i] = (potential.evaluate(t, x + shift) - potential.evaluate(t, x - shift)) / (2.0 * step)
    exact = potential.evaluate_gradient(t, x)
    scale = np.maximum(np.linalg.norm(exact, axis=-1), 1e-300)
    error = float(np.max(np.linalg.norm(approx - exact, axis=-1) / scale))
    return _check(TAG_GRADIENT, f'finite differences at r={radius:g}', error <= 1e-6, error, 1e-6)


def _d_estimate(p: ProblemSpec, sample_budget: int, seed: int) -> float:
    directions = sphere_directions(p.dim, sample_budget, seed=seed)
    times = p.grid.times
    worst = 0.0
    for radius in AUDIT_RADII:
        if radius > 1.0:
            continue
        g = p.potential.evaluate_gradient(times[:, None], radius * directions[None, :, :])
        worst = max(worst, float(np.max(np.linalg.norm(g, axis=-1))) / radius)
    return worst


def audit_hypotheses(
    p: ProblemSpec,
    sample_budget: int = DEFAULT_SAMPLE_BUDGET,
    seed: int = DEFAULT_SEED,
) -> HypothesisReport:
    """Check the structural hypotheses on sampled times and points.

    Violations are reported, never raised. The problem is marked solver-ready when every
    check passes.
    """
    checks = _audit_matrix_field(p)
    checks.extend(_audit_potential(p, sample_budget, seed))

    d = _d_estimate(p, sample_budget, seed)
    checks.append(_check(TAG_D, 'bounded growth on the unit ball', bool(np.isfinite(d)), d, np.inf))

    constants: Optional[ConstantsReport]
    try:
        constants = constants_report(p, sample_budget=sample_budget, seed=seed)
    except HypothesisViolationError as e:
        logger.warning('constants unavailable: %s', e)
        constants = None
        checks.append(_check(TAG_WF, 'forcing budget', False, np.nan, np.nan, detail=str(e)))
    else:
        checks.append(_check(
            TAG_WF, 'forcing budget', constants.admissible, constants.f_l2_norm, constants.wf_budget,
            detail=f'M = {constants.M:.6g}, beta = {constants.beta:.6g}',
        ))

    return HypothesisReport(
        checks=checks,
        constants=constants,
        d_estimate=d,
        solver_ready=all(check.passed for check in checks),
    )
