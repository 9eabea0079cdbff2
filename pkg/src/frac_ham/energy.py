# -*- coding: utf-8 -*-

r"""The action functional, its derivative and gradients.

.. math::

    I(u) = \frac{1}{2}\|u\|_{X^{\alpha}}^2 - \int W(t, u)\,dt + \int (f, u)\,dt

Its :math:`L^2` gradient is :math:`r(u) = A u + L u - \nabla W(t, u) + f` where
:math:`A` is the composed operator with symbol :math:`|w|^{2\alpha}`, so that
:math:`I'(u)v = \int (r(u), v)\,dt`. The strong residual of the system is :math:`-r(u)`.

:class:`EnergyFunctional` works on raw sample arrays (with optional leading batch axes)
for the solvers; the module-level functions take and return :class:`GridSignal`.
"""

import logging
from dataclasses import dataclass
from typing import List, Optional

import numpy as np
from dataclasses_json import dataclass_json

from .constants import DEFAULT_PRECOND_FLOOR, DEFAULT_SEED
from .exceptions import InvalidInputError
from .fracops import GridSignal, apply_symbol, composed_symbol
from .problem import ConstantsReport, ProblemSpec, constants_report
from .spaces import l2_norm, sample_sphere, sup_norm

__all__ = [
    'EnergyReport',
    'BarrierChain',
    'EnergyFunctional',
    'action',
    'directional_derivative',
    'self_pairing',
    'riesz_gradient',
    'strong_residual',
    'energy_report',
    'barrier_chain',
    'sphere_barrier',
]

logger = logging.getLogger(__name__)

#: Relative step of the central difference of the gradient of W
HESSIAN_STEP = 1e-5


@dataclass_json
@dataclass
class EnergyReport:
    """Diagnostics of a candidate critical point."""

    action_value: float
    x_alpha_norm: float
    #: X^alpha norm of the preconditioned gradient
    gradient_x_norm: float
    strong_residual_l2: float
    #: Dual norm of the derivative in the preconditioner metric
    gradient_dual_norm: float = 0.0


class EnergyFunctional:
    """The action of a problem, evaluated on sample arrays.

    :param problem: The problem
    :param precond_floor: Lower bound of the shift in the preconditioner
     :math:`|w|^{2\\alpha} + \\lambda_0` with :math:`\\lambda_0 = \\max(\\text{floor}, l_{min})`
    """

    def __init__(self, problem: ProblemSpec, precond_floor: float = DEFAULT_PRECOND_FLOOR) -> None:
        if not precond_floor > 0:
            raise InvalidInputError(f'preconditioner floor must be positive, got {precond_floor}')
        self.problem = problem
        grid = problem.grid
        self.grid = grid
        self.dt = grid.dt
        self.times = grid.times
        problem.matrix_field.validate(grid)
        self.matrices = problem.matrix_field.on_grid(grid)
        self.symbol = composed_symbol(grid.half_width, grid.num_points, problem.alpha.alpha)
        self.shift = max(float(precond_floor), float(np.min(problem.matrix_field.smallest_eigenvalues(grid))))
        self.preconditioner = self.symbol + self.shift
        self.forcing = problem.forcing.values

    def signal(self, values: np.ndarray) -> GridSignal:
        """Wrap samples as a signal on the problem grid."""
        return GridSignal.on_grid(self.grid, values)

    def operator(self, values: np.ndarray) -> np.ndarray:
        """Apply :math:`A + L(t)`."""
        return apply_symbol(values, self.symbol) + np.einsum('kij,...kj->...ki', self.matrices, values)

    def inner(self, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        """Get the :math:`X^{\\alpha}` inner product (batched over leading axes)."""
        return self.dt * np.sum(self.operator(u) * v, axis=(-2, -1))

    def norm(self, u: np.ndarray) -> np.ndarray:
        """Get the :math:`X^{\\alpha}` norm."""
        return np.sqrt(np.maximum(self.inner(u, u), 0.0))

    def potential_integral(self, u: np.ndarray) -> np.ndarray:
        """Get :math:`\\int W(t, u)\\,dt`."""
        return self.dt * np.sum(self.problem.potential.evaluate(self.times, u), axis=-1)

    def forcing_pairing(self, u: np.ndarray) -> np.ndarray:
        """Get :math:`\\int (f, u)\\,dt`."""
        return self.dt * np.sum(self.forcing * u, axis=(-2, -1))

    def action(self, u: np.ndarray) -> np.ndarray:
        """Get :math:`I(u)`."""
        return 0.5 * self.inner(u, u) - self.potential_integral(u) + self.forcing_pairing(u)

    def l2_gradient(self, u: np.ndarray) -> np.ndarray:
        """Get :math:`A u + L u - \\nabla W(t, u) + f`."""
        return self.operator(u) - self.problem.potential.evaluate_gradient(self.times, u) + self.forcing

    def hessian_product(self, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        """Apply the second derivative of the action at u to v.

        The potential part is a central difference of the gradient of W with a step
        relative to the largest sample of u.
        """
        scale = float(np.max(np.abs(v)))
        if scale == 0.0:
            return np.zeros_like(v)
        step = HESSIAN_STEP * max(1.0, float(np.max(np.abs(u)))) / scale
        gradient = self.problem.potential.evaluate_gradient
        curvature = (gradient(self.times, u + step * v) - gradient(self.times, u - step * v)) / (2.0 * step)
        return self.operator(v) - curvature

    def pairing(self, r: np.ndarray, v: np.ndarray) -> np.ndarray:
        """Get the trapezoidal :math:`L^2` pairing."""
        return self.dt * np.sum(r * v, axis=(-2, -1))

    def precondition(self, r: np.ndarray) -> np.ndarray:
        """Solve :math:`(|w|^{2\\alpha} + \\lambda_0) g = r` in the transform domain."""
        return apply_symbol(r, 1.0 / self.preconditioner)

    def gradient(self, u: np.ndarray) -> np.ndarray:
        """Get the preconditioned gradient."""
        return self.precondition(self.l2_gradient(u))

    def preconditioner_inner(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Get the inner product induced by the preconditioner."""
        return self.pairing(apply_symbol(a, self.preconditioner), b)

    def report(self, u: np.ndarray) -> EnergyReport:
        """Collect the diagnostics of a candidate critical point."""
        r = self.l2_gradient(u)
        g = self.precondition(r)
        return EnergyReport(
            action_value=float(self.action(u)),
            x_alpha_norm=float(self.norm(u)),
            gradient_x_norm=float(self.norm(g)),
            strong_residual_l2=float(np.sqrt(self.pairing(r, r))),
            gradient_dual_norm=float(np.sqrt(max(float(self.pairing(r, g)), 0.0))),
        )


def _functional(u: GridSignal, p: ProblemSpec, precond_floor: float = DEFAULT_PRECOND_FLOOR) -> EnergyFunctional:
    p.check_signal(u)
    return EnergyFunctional(p, precond_floor=precond_floor)


def action(u: GridSignal, p: ProblemSpec) -> float:
    """Get :math:`I(u)` by trapezoidal quadrature."""
    return float(_functional(u, p).action(u.values))


def directional_derivative(u: GridSignal, v: GridSignal, p: ProblemSpec) -> float:
    """Get :math:`I'(u)v = \\int (D^{\\alpha}u, D^{\\alpha}v) + (Lu, v) - (\\nabla W(t, u), v) + (f, v)\\,dt`."""
    u.check_compatible(v)
    energy = _functional(u, p)
    return float(energy.pairing(energy.l2_gradient(u.values), v.values))


def self_pairing(u: GridSignal, p: ProblemSpec) -> float:
    """Get :math:`I'(u)u = \\|u\\|_{X^{\\alpha}}^2 - \\int (\\nabla W(t, u), u)\\,dt + \\int (f, u)\\,dt`."""
    energy = _functional(u, p)
    gradient = p.potential.evaluate_gradient(energy.times, u.values)
    values = u.values
    return float(energy.inner(values, values) - energy.pairing(gradient, values) + energy.forcing_pairing(values))


def riesz_gradient(u: GridSignal, p: ProblemSpec, precond_floor: float = DEFAULT_PRECOND_FLOOR) -> GridSignal:
    """Get the representer of :math:`I'(u)` in the preconditioner metric.

    :raises InvalidInputError: if the preconditioner floor is not positive
    """
    energy = _functional(u, p, precond_floor=precond_floor)
    return u.with_values(energy.gradient(u.values))


def strong_residual(u: GridSignal, p: ProblemSpec) -> GridSignal:
    """Get :math:`-A u - L(t) u + \\nabla W(t, u) - f`, which vanishes at a solution."""
    energy = _functional(u, p)
    return u.with_values(-energy.l2_gradient(u.values))


def energy_report(u: GridSignal, p: ProblemSpec, precond_floor: float = DEFAULT_PRECOND_FLOOR) -> EnergyReport:
    """Collect :math:`I(u)`, norms of u and of its gradient, and the strong residual."""
    return _functional(u, p, precond_floor=precond_floor).report(u.values)


@dataclass_json
@dataclass
class BarrierChain:
    """The lower bounds of the action on a sphere, link by link.

    ``action >= quadratic - potential - forcing_bound`` always holds; the potential bound
    ``M * l2_norm^2`` is valid when ``sup_norm <= 1``.
    """

    action: float
    quadratic: float
    potential: float
    potential_bound: float
    forcing: float
    forcing_bound: float
    sup_norm: float
    l2_norm: float
    lower_bound: float
    beta: float


def barrier_chain(u: GridSignal, p: ProblemSpec, constants: Optional[ConstantsReport] = None) -> BarrierChain:
    """Evaluate the chain of lower bounds of :math:`I(u)` used for the mountain-pass barrier."""
    if constants is None:
        constants = constants_report(p)
    energy = _functional(u, p)
    quadratic = 0.5 * float(energy.inner(u.values, u.values))
    potential = float(energy.potential_integral(u.values))
    forcing = float(energy.forcing_pairing(u.values))
    l2 = l2_norm(u)
    potential_bound = constants.M * l2 ** 2
    forcing_bound = constants.f_l2_norm * l2
    return BarrierChain(
        action=quadratic - potential + forcing,
        quadratic=quadratic,
        potential=potential,
        potential_bound=potential_bound,
        forcing=forcing,
        forcing_bound=forcing_bound,
        sup_norm=sup_norm(u),
        l2_norm=l2,
        lower_bound=quadratic - potential_bound - forcing_bound,
        beta=constants.beta,
    )


def sphere_barrier(
    p: ProblemSpec,
    count: int = 50,
    seed: int = DEFAULT_SEED,
    constants: Optional[ConstantsReport] = None,
) -> List[BarrierChain]:
    """Evaluate :func:`barrier_chain` on random signals of norm :math:`\\rho`."""
    if constants is None:
        constants = constants_report(p)
    samples = sample_sphere(p.matrix_field, p.grid, p.alpha, count, radius=constants.rho, seed=seed)
    chains = [barrier_chain(u, p, constants) for u in samples]
    worst = min(chain.action for chain in chains) if chains else np.nan
    logger.info(
        'smallest action on the sphere of radius %.6g: %.6g (beta = %.6g)', constants.rho, worst, constants.beta,
    )
    return chains
