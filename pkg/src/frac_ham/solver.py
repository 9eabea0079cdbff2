# -*- coding: utf-8 -*-

"""Critical-point finders for the action functional.

Two branches look for two different critical points:

1. :func:`ekeland_minimize` minimizes the action over the closed ball of radius
   :math:`\\rho` with projected, preconditioned gradient descent. Its value is :math:`c_1 \\leq 0`.
2. :func:`mountain_pass` deforms a path from the origin to a low endpoint built by
   :func:`build_endpoint` and refines its highest node into a saddle point of value
   :math:`c \\geq \\beta`.

:func:`solve_two` runs both and certifies that the two points are distinct.
"""

import logging
from collections import deque
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from dataclasses_json import dataclass_json
from scipy.optimize import brentq, minimize_scalar
from scipy.sparse.linalg import LinearOperator, minres
from tqdm import tqdm

from .constants import (
    DEFAULT_ARMIJO_C, DEFAULT_DEFORM_ITERS, DEFAULT_DISTINCT_TOL, DEFAULT_GRAD_TOL, DEFAULT_MAX_ITERS,
    DEFAULT_PATH_POINTS, DEFAULT_PRECOND_FLOOR, DEFAULT_REPARAM_EVERY, DEFAULT_RESID_TOL, DEFAULT_SEED,
    DEFAULT_STEP_SHRINK, MAX_RAY_SCALE, PS_WINDOW, TIE_TOL,
)
from .energy import EnergyFunctional, EnergyReport
from .exceptions import (
    AdmissibilityError, GeometryViolationError, InvalidInputError, NonConvergenceError, SuperquadraticityError,
)
from .fracops import GridSignal
from .problem import ConstantsReport, ProblemSpec, constants_report, require_admissible

__all__ = [
    'SolverConfig',
    'TraceRecord',
    'BranchResult',
    'SolutionPair',
    'ekeland_minimize',
    'build_endpoint',
    'bump_profile',
    'mountain_pass',
    'solve_two',
]

logger = logging.getLogger(__name__)

#: Backtracking gives up after this many reductions
MAX_SHRINKS = 60
#: Bounds of the Barzilai-Borwein step
MIN_STEP, MAX_STEP = 1e-8, 1e8
#: Bracket expansions allowed on a ray
MAX_BRACKET = 60
#: Largest ridge step relative to the norm of the point
TRUST_FRACTION = 0.1
#: Newton steps are tried once the gradient norm falls below this fraction of the point norm
NEWTON_SWITCH = 1e-2
#: Relative tolerance and iteration budget of each MINRES solve
NEWTON_RTOL = 1e-10
NEWTON_MAXITER = 1000
#: Halvings of a Newton step before it is rejected
NEWTON_BACKTRACKS = 10
#: Relative action increase tolerated between certified iterates
ROUNDOFF = 1e-13

EKELAND = 'ekeland'
MOUNTAIN = 'mountain_pass'


@dataclass_json
@dataclass
class SolverConfig:
    """Tolerances and budgets of the critical-point finders."""

    #: Required X^alpha norm of the gradient at a certified point
    grad_tol: float = DEFAULT_GRAD_TOL
    #: Required L^2 norm of the strong residual at a certified point
    resid_tol: float = DEFAULT_RESID_TOL
    #: Iteration budget of each branch
    max_iters: int = DEFAULT_MAX_ITERS
    #: Number of nodes of the mountain-pass path
    path_points: int = DEFAULT_PATH_POINTS
    #: Sufficient decrease constant of the Armijo rule
    armijo_c: float = DEFAULT_ARMIJO_C
    #: Backtracking factor
    step_shrink: float = DEFAULT_STEP_SHRINK
    #: Separation above which the two critical points count as distinct
    distinct_tol: float = DEFAULT_DISTINCT_TOL
    seed: int = DEFAULT_SEED
    #: Lower bound of the preconditioner shift
    precond_floor: float = DEFAULT_PRECOND_FLOOR
    #: Iterations of node-wise path deformation before the ridge refinement
    deform_iters: int = DEFAULT_DEFORM_ITERS
    #: Equal-arclength reparametrization period of the path
    reparam_every: int = DEFAULT_REPARAM_EVERY

    def __post_init__(self) -> None:  # noqa: D105
        for name in ('grad_tol', 'resid_tol', 'distinct_tol', 'precond_floor'):
            value = getattr(self, name)
            if not np.isfinite(value) or value <= 0:
                raise InvalidInputError(f'{name} must be positive, got {value}')
        if self.max_iters < 1:
            raise InvalidInputError(f'max_iters must be positive, got {self.max_iters}')
        if self.path_points < 8:
            raise InvalidInputError(f'path_points must be at least 8, got {self.path_points}')
        if not 0 < self.armijo_c < 1 or not 0 < self.step_shrink < 1:
            raise InvalidInputError('armijo_c and step_shrink must lie in (0, 1)')
        if self.deform_iters < 0 or self.reparam_every < 1:
            raise InvalidInputError('deform_iters must be nonnegative and reparam_every positive')


@dataclass_json
@dataclass
class TraceRecord:
    """One iteration of a branch."""

    branch: str
    phase: str
    iteration: int
    action: float
    gradient_x_norm: float
    x_alpha_norm: float
    step: float


@dataclass
class BranchResult:
    """The output of one branch with its convergence diagnostics."""

    signal: GridSignal
    report: EnergyReport
    iterations: int
    #: Largest pairwise X^alpha distance among the last iterates
    ps_spread: float
    trace: List[TraceRecord] = field(default_factory=list)
    #: Set when the Ekeland minimizer sits on the sphere of radius rho
    on_boundary: bool = False
    #: The final path of the mountain-pass branch
    path: Optional[np.ndarray] = None


@dataclass
class SolutionPair:
    """The two critical points and their certificate."""

    u_ekeland: GridSignal
    u_mountain: GridSignal
    report_ekeland: EnergyReport
    report_mountain: EnergyReport
    c1: float
    c: float
    distinct: bool
    separation: float
    constants: ConstantsReport
    ekeland: BranchResult
    mountain: BranchResult
    #: Slack of the a priori lower bound of the action at each output
    apriori_slack_ekeland: float = 0.0
    apriori_slack_mountain: float = 0.0
    warnings: List[str] = field(default_factory=list)

    def summary(self) -> Dict[str, Any]:
        """Get a JSON-serializable summary."""
        return {
            'c1': self.c1,
            'c': self.c,
            'beta': self.constants.beta,
            'distinct': self.distinct,
            'separation': self.separation,
            'constants': self.constants.to_dict(),
            'ekeland': _branch_summary(self.ekeland, self.apriori_slack_ekeland),
            'mountain_pass': _branch_summary(self.mountain, self.apriori_slack_mountain),
            'warnings': list(self.warnings),
        }


def _branch_summary(result: BranchResult, slack: float) -> Dict[str, Any]:
    return {
        'report': result.report.to_dict(),
        'iterations': result.iterations,
        'ps_spread': result.ps_spread,
        'on_boundary': result.on_boundary,
        'apriori_slack': slack,
    }


def _iterate(n: int, use_tqdm: bool, desc: str):
    if use_tqdm:
        return tqdm(range(n), desc=desc, leave=False)
    return range(n)


def _ps_spread(energy: EnergyFunctional, window: Sequence[np.ndarray]) -> float:
    """Get the largest pairwise distance among the trailing iterates."""
    if len(window) < 2:
        return 0.0
    stack = np.stack(list(window))
    return float(np.max(energy.norm(stack[:, None] - stack[None, :])))


def _check_ps(energy: EnergyFunctional, window: Sequence[np.ndarray], cfg: SolverConfig, rho: float,
              branch: str) -> float:
    spread = _ps_spread(energy, window)
    if spread > 10.0 * cfg.grad_tol * rho:
        logger.warning('%s: last %d iterates spread %.3e > %.3e', branch, len(window), spread,
                       10.0 * cfg.grad_tol * rho)
    return spread


def _bb_step(energy: EnergyFunctional, s: np.ndarray, dr: np.ndarray, fallback: float) -> float:
    """Get the Barzilai-Borwein step in the preconditioner metric."""
    sy = float(energy.pairing(s, dr))
    if sy <= 0:
        return fallback
    ss = float(energy.preconditioner_inner(s, s))
    return float(np.clip(ss / sy, MIN_STEP, MAX_STEP))


def _newton_direction(energy: EnergyFunctional, u: np.ndarray, r: np.ndarray) -> np.ndarray:
    """Solve the linearized equation at u with MINRES, preconditioned by the spectral metric.

    The second derivative is symmetric but indefinite at a saddle point, and possibly
    singular along a symmetry of the problem.
    """
    shape = u.shape
    size = u.size
    hessian = LinearOperator(
        (size, size),
        matvec=lambda v: energy.hessian_product(u, v.reshape(shape)).reshape(-1),
        dtype=float,
    )
    preconditioner = LinearOperator(
        (size, size),
        matvec=lambda v: energy.precondition(v.reshape(shape)).reshape(-1),
        dtype=float,
    )
    delta, info = minres(hessian, -r.reshape(-1), M=preconditioner, rtol=NEWTON_RTOL, maxiter=NEWTON_MAXITER)
    if info:
        logger.debug('minres stopped with code %d', info)
    return delta.reshape(shape)


def _newton_step(
    energy: EnergyFunctional,
    u: np.ndarray,
    r: np.ndarray,
    g_norm: float,
) -> Optional[Tuple[np.ndarray, np.ndarray]]:
    """Take a damped Newton step that reduces the gradient norm.

    :returns: The new point and its gradient, or None if no step length reduces the norm
    """
    delta = _newton_direction(energy, u, r)
    t = 1.0
    for _ in range(NEWTON_BACKTRACKS):
        candidate = u + t * delta
        new_r = energy.l2_gradient(candidate)
        if float(energy.norm(energy.precondition(new_r))) <= (1.0 - 1e-4 * t) * g_norm:
            return candidate, new_r
        t *= 0.5
    return None


def _polish(
    energy: EnergyFunctional,
    u: np.ndarray,
    cfg: SolverConfig,
    window: deque,
    records: List[TraceRecord],
    trace: bool,
    branch: str,
    iteration: int,
    rho: Optional[float] = None,
) -> np.ndarray:
    """Continue a converged branch with Newton steps as long as they keep the tolerances.

    Each accepted iterate joins the window, so that the trailing iterates are all
    certified points.
    """
    value = float(energy.action(u))
    for k in range(1, PS_WINDOW + 1):
        r = energy.l2_gradient(u)
        if not np.any(r):
            break
        candidate = u + _newton_direction(energy, u, r)
        if rho is not None:
            candidate = _project(energy, candidate, rho)
        report = energy.report(candidate)
        if report.gradient_x_norm > cfg.grad_tol or report.strong_residual_l2 > cfg.resid_tol:
            break
        if branch == EKELAND and report.action_value > value + ROUNDOFF * max(1.0, abs(value)):
            break
        u, value = candidate, report.action_value
        window.append(u)
        if trace:
            records.append(TraceRecord(
                branch, 'polish', iteration + k, value, report.gradient_x_norm, report.x_alpha_norm, 1.0,
            ))
    return u


"""Ekeland branch"""


def _ekeland_start(energy: EnergyFunctional, rho: float) -> np.ndarray:
    """Get :math:`-s P^{-1} f`, with s minimizing the action on the segment inside the ball."""
    zero = np.zeros_like(energy.forcing)
    if not np.any(energy.forcing):
        return zero
    direction = -energy.precondition(energy.forcing)
    s_max = rho / float(energy.norm(direction))
    result = minimize_scalar(
        lambda s: float(energy.action(s * direction)),
        bounds=(0.0, s_max),
        method='bounded',
        options={'xatol': 1e-10 * s_max},
    )
    start = result.x * direction
    if float(energy.action(start)) > 0.0:
        return zero
    return _project(energy, start, rho)


def _project(energy: EnergyFunctional, u: np.ndarray, rho: float) -> np.ndarray:
    norm = float(energy.norm(u))
    if norm > rho:
        return u * (rho / norm)
    return u


def _ekeland(
    energy: EnergyFunctional,
    constants: ConstantsReport,
    cfg: SolverConfig,
    trace: bool = False,
    use_tqdm: bool = False,
) -> BranchResult:
    rho = constants.rho
    u = _ekeland_start(energy, rho)
    value = float(energy.action(u))
    r = energy.l2_gradient(u)
    g = energy.precondition(r)
    step = 1.0
    window: deque = deque(maxlen=PS_WINDOW)
    records: List[TraceRecord] = []

    for iteration in _iterate(cfg.max_iters, use_tqdm, 'Ekeland descent'):
        norm_u = float(energy.norm(u))
        g_norm = float(energy.norm(g))
        residual = float(np.sqrt(energy.pairing(r, r)))
        window.append(u)
        if trace:
            records.append(TraceRecord(EKELAND, 'descent', iteration, value, g_norm, norm_u, step))
        logger.debug('ekeland %d: I = %.12g, |g| = %.3e, |u| = %.6g', iteration, value, g_norm, norm_u)

        if g_norm <= cfg.grad_tol and residual <= cfg.resid_tol:
            u = _polish(energy, u, cfg, window, records, trace, EKELAND, iteration, rho=rho)
            return _ekeland_result(energy, u, iteration, window, cfg, rho, records, on_boundary=False)

        if norm_u >= rho * (1.0 - 1e-9):
            radial = float(energy.inner(g, u))
            if radial < 0:
                tangential = g - radial / norm_u ** 2 * u
                if float(energy.norm(tangential)) <= cfg.grad_tol:
                    logger.warning('ekeland minimizer sits on the sphere of radius %.6g', rho)
                    return _ekeland_result(energy, u, iteration, window, cfg, rho, records, on_boundary=True)

        trial = step
        for _ in range(MAX_SHRINKS):
            candidate = _project(energy, u - trial * g, rho)
            slope = float(energy.pairing(r, candidate - u))
            candidate_value = float(energy.action(candidate))
            if slope < 0 and candidate_value <= value + cfg.armijo_c * slope:
                break
            trial *= cfg.step_shrink
        else:
            raise NonConvergenceError(
                f'line search failed at iteration {iteration} (|g| = {g_norm:.3e})',
                branch=EKELAND,
                best=energy.signal(u),
                report=energy.report(u),
                trace=records,
            )

        new_r = energy.l2_gradient(candidate)
        step = _bb_step(energy, candidate - u, new_r - r, fallback=1.0)
        u, value, r = candidate, candidate_value, new_r
        g = energy.precondition(r)

    raise NonConvergenceError(
        f'ekeland descent did not converge in {cfg.max_iters} iterations',
        branch=EKELAND,
        best=energy.signal(u),
        report=energy.report(u),
        trace=records,
    )


def _ekeland_result(energy, u, iteration, window, cfg, rho, records, on_boundary) -> BranchResult:
    return BranchResult(
        signal=energy.signal(u),
        report=energy.report(u),
        iterations=iteration,
        ps_spread=_check_ps(energy, window, cfg, rho, EKELAND),
        trace=records,
        on_boundary=on_boundary,
    )


def _prepare(p: ProblemSpec, cfg: SolverConfig, constants: Optional[ConstantsReport]):
    if constants is None:
        constants = constants_report(p, seed=cfg.seed)
    require_admissible(constants)
    return EnergyFunctional(p, precond_floor=cfg.precond_floor), constants


def ekeland_minimize(
    p: ProblemSpec,
    cfg: SolverConfig,
    constants: Optional[ConstantsReport] = None,
    trace: bool = False,
) -> Tuple[GridSignal, EnergyReport]:
    """Minimize the action over the closed ball of radius :math:`\\rho`.

    :raises AdmissibilityError: if the forcing term does not fit the (Wf) budget
    :raises NonConvergenceError: if the iteration budget is exhausted
    """
    energy, constants = _prepare(p, cfg, constants)
    result = _ekeland(energy, constants, cfg, trace=trace)
    return result.signal, result.report


"""Endpoint"""


def _smooth_step(s: np.ndarray) -> np.ndarray:
    """Get a smooth function rising from 0 (s <= 0) to 1 (s >= 1)."""
    s = np.asarray(s, dtype=float)
    with np.errstate(divide='ignore', over='ignore'):
        left = np.where(s > 0, np.exp(-1.0 / np.where(s > 0, s, 1.0)), 0.0)
        right = np.where(s < 1, np.exp(-1.0 / np.where(s < 1, 1.0 - s, 1.0)), 0.0)
    return left / (left + right)


def bump_profile(times: np.ndarray) -> np.ndarray:
    """Get a smooth bump equal to 1 on [0, 1] and vanishing outside (-1, 2)."""
    return _smooth_step(times + 1.0) * _smooth_step(2.0 - times)


def _endpoint_direction(p: ProblemSpec, seed: int) -> np.ndarray:
    mean = p.forcing.values.sum(axis=0) * p.grid.dt
    norm = float(np.linalg.norm(mean))
    if norm > 1e-14:
        return -mean / norm
    direction = np.random.default_rng(seed).standard_normal(p.dim)
    return direction / np.linalg.norm(direction)


def build_endpoint(
    p: ProblemSpec,
    cfg: SolverConfig,
    constants: Optional[ConstantsReport] = None,
) -> GridSignal:
    """Scale a unit bump until the action is nonpositive outside the ball of radius :math:`\\rho`.

    The bump points against the mean of the forcing term, or along a seeded random
    direction when that mean vanishes.

    :raises SuperquadraticityError: if the action stays positive up to the largest scale
    """
    energy, constants = _prepare(p, cfg, constants)
    if p.grid.half_width < 2.0:
        raise InvalidInputError(f'the endpoint bump needs T >= 2, got {p.grid.half_width}')
    profile = bump_profile(p.grid.times)[:, None] * _endpoint_direction(p, cfg.seed)[None, :]

    sigma = 1.0
    while sigma <= MAX_RAY_SCALE:
        candidate = sigma * profile
        value = float(energy.action(candidate))
        if value <= 0.0 and float(energy.norm(candidate)) > constants.rho:
            logger.info('endpoint at scale %g with action %.6g', sigma, value)
            return energy.signal(candidate)
        sigma *= 2.0
    raise SuperquadraticityError(f'the action stays positive along the ray up to scale {MAX_RAY_SCALE:g}')


"""Mountain pass branch"""


def _max_node(energies: np.ndarray) -> int:
    """Get the lowest index among the nodes tied with the maximum."""
    return int(np.flatnonzero(energies >= np.max(energies) - TIE_TOL)[0])


def _p_norm(energy: EnergyFunctional, values: np.ndarray) -> np.ndarray:
    return np.sqrt(np.maximum(energy.preconditioner_inner(values, values), 0.0))


def _reparametrize(energy: EnergyFunctional, path: np.ndarray) -> np.ndarray:
    """Redistribute the interior nodes at equal arclength in the preconditioner metric."""
    lengths = _p_norm(energy, path[1:] - path[:-1])
    arclength = np.concatenate([[0.0], np.cumsum(lengths)])
    targets = np.linspace(0.0, arclength[-1], len(path))
    index = np.clip(np.searchsorted(arclength, targets, side='right') - 1, 0, len(path) - 2)
    weight = (targets - arclength[index]) / np.where(lengths[index] > 0, lengths[index], 1.0)
    weight = np.clip(weight, 0.0, 1.0)[:, None, None]
    rv = (1.0 - weight) * path[index] + weight * path[index + 1]
    rv[0], rv[-1] = path[0], path[-1]
    return rv


def _tangent(energy: EnergyFunctional, path: np.ndarray, j: int) -> np.ndarray:
    tangent = path[j + 1] - path[j - 1]
    return tangent / float(_p_norm(energy, tangent))


def _deform(
    energy: EnergyFunctional,
    path: np.ndarray,
    constants: ConstantsReport,
    cfg: SolverConfig,
    records: List[TraceRecord],
    trace: bool,
    use_tqdm: bool,
) -> Tuple[np.ndarray, int, int]:
    """Lower the path maximum node by node with steps orthogonal to the path.

    :returns: The path, the index of its highest node and the number of iterations
    """
    energies = np.asarray(energy.action(path), dtype=float)
    initial = None
    step = 1.0
    iteration = 0
    for iteration in _iterate(cfg.deform_iters, use_tqdm, 'Path deformation'):
        j = _max_node(energies)
        if j in (0, len(path) - 1):
            raise GeometryViolationError(f'path maximum {energies[j]:.6g} sits at an endpoint')
        node = path[j]
        g = energy.gradient(node)
        tangent = _tangent(energy, path, j)
        orthogonal = g - float(energy.preconditioner_inner(g, tangent)) * tangent
        size = float(_p_norm(energy, orthogonal))
        if initial is None:
            initial = size
        target = max(cfg.grad_tol, 1e-2 * initial)
        if trace:
            records.append(TraceRecord(MOUNTAIN, 'deform', iteration, float(energies[j]), size,
                                       float(energy.norm(node)), step))
        if energies[j] < constants.beta - 1e-8 and size > target:
            raise GeometryViolationError(
                f'path maximum {energies[j]:.6g} fell below beta = {constants.beta:.6g} with gradient {size:.3e}; '
                f'the discretization is probably too coarse',
            )
        if size <= target:
            return path, j, iteration

        # a node moves at most half the distance between its neighbours
        spacing = 0.5 * float(_p_norm(energy, path[j + 1] - path[j - 1]))
        trial = min(step, spacing / size)
        for _ in range(MAX_SHRINKS):
            candidate = node - trial * orthogonal
            candidate_value = float(energy.action(candidate))
            if candidate_value <= energies[j] - cfg.armijo_c * trial * size ** 2:
                break
            trial *= cfg.step_shrink
        else:
            logger.debug('deformation stalled at iteration %d', iteration)
            return path, j, iteration
        path[j] = candidate
        energies[j] = candidate_value
        step = min(trial / cfg.step_shrink, MAX_STEP)

        if (iteration + 1) % cfg.reparam_every == 0:
            path = _reparametrize(energy, path)
            energies = np.asarray(energy.action(path), dtype=float)

    return path, _max_node(energies), iteration


def _ray_max(energy: EnergyFunctional, v: np.ndarray) -> Optional[np.ndarray]:
    """Get the maximizer of the action on the ray through ``v``, bracketing scales around 1."""
    def slope(s: float) -> float:
        return float(energy.pairing(energy.l2_gradient(s * v), v))

    lo = hi = 1.0
    if slope(1.0) >= 0.0:
        for _ in range(MAX_BRACKET):
            hi *= 2.0
            if slope(hi) < 0.0:
                break
            lo = hi
        else:
            return None
    else:
        for _ in range(MAX_BRACKET):
            lo *= 0.5
            if slope(lo) > 0.0:
                break
            hi = lo
        else:
            return None
    s = brentq(slope, lo, hi, xtol=1e-15 * hi, rtol=4 * np.finfo(float).eps, maxiter=200)
    return s * v


def _ridge_search(
    energy: EnergyFunctional,
    point: np.ndarray,
    g: np.ndarray,
    value: float,
    step: float,
    cfg: SolverConfig,
) -> Optional[Tuple[np.ndarray, float, float]]:
    """Move against the part of the gradient orthogonal to the ray and return to the ray maximum.

    :returns: The new point, its action and the accepted step, or None if the search fails
    """
    norm = float(_p_norm(energy, point))
    tau = point / norm
    orthogonal = g - float(energy.preconditioner_inner(g, tau)) * tau
    size = float(energy.preconditioner_inner(orthogonal, orthogonal))
    if not size > 0:
        return None
    slack = 1e-13 * max(1.0, abs(value))
    trial = min(step, TRUST_FRACTION * norm / np.sqrt(size))
    for _ in range(MAX_SHRINKS):
        candidate = _ray_max(energy, point - trial * orthogonal)
        if candidate is not None:
            candidate_value = float(energy.action(candidate))
            if candidate_value <= value - cfg.armijo_c * trial * size + slack:
                return candidate, candidate_value, trial
        trial *= cfg.step_shrink
    return None


def _refine(
    energy: EnergyFunctional,
    node: np.ndarray,
    cfg: SolverConfig,
    budget: int,
    records: List[TraceRecord],
    trace: bool,
    use_tqdm: bool,
    rho: float,
) -> BranchResult:
    """Descend along the maxima of the action on rays, then converge with Newton steps.

    Newton steps are tried once the gradient is small relative to the point. A rejected
    Newton step tightens that threshold and the descent goes on.
    """
    point = _ray_max(energy, node)
    if point is None:
        raise GeometryViolationError('the action has no maximum on the ray through the highest node')

    value = float(energy.action(point))
    r = energy.l2_gradient(point)
    step = 1.0
    switch = NEWTON_SWITCH
    phase = 'ridge'
    window: deque = deque(maxlen=PS_WINDOW)
    for iteration in _iterate(budget, use_tqdm, 'Ridge refinement'):
        g = energy.precondition(r)
        g_norm = float(energy.norm(g))
        residual = float(np.sqrt(energy.pairing(r, r)))
        point_norm = float(energy.norm(point))
        window.append(point)
        if trace:
            records.append(TraceRecord(MOUNTAIN, phase, iteration, value, g_norm, point_norm, step))
        logger.debug('%s %d: I = %.12g, |g| = %.3e', phase, iteration, value, g_norm)
        if g_norm <= cfg.grad_tol and residual <= cfg.resid_tol:
            point = _polish(energy, point, cfg, window, records, trace, MOUNTAIN, iteration)
            return BranchResult(
                signal=energy.signal(point),
                report=energy.report(point),
                iterations=iteration,
                ps_spread=_check_ps(energy, window, cfg, rho, MOUNTAIN),
                trace=records,
            )

        searched = None
        if g_norm > switch * max(1.0, point_norm):
            searched = _ridge_search(energy, point, g, value, step, cfg)
        if searched is not None:
            candidate, value, trial = searched
            new_r = energy.l2_gradient(candidate)
            step = _bb_step(energy, candidate - point, new_r - r, fallback=trial)
            point, r = candidate, new_r
            phase = 'ridge'
            continue

        accepted = _newton_step(energy, point, r, g_norm)
        if accepted is not None:
            point, r = accepted
            value = float(energy.action(point))
            phase = 'newton'
            continue
        if g_norm > switch * max(1.0, point_norm):
            raise NonConvergenceError(
                f'ridge line search failed at iteration {iteration} (|g| = {g_norm:.3e})',
                branch=MOUNTAIN,
                best=energy.signal(point),
                report=energy.report(point),
                trace=records,
            )
        switch *= 0.1
        logger.debug('newton step rejected at iteration %d, switching below %.1e', iteration, switch)

    raise NonConvergenceError(
        f'mountain pass did not converge in {budget} ridge iterations',
        branch=MOUNTAIN,
        best=energy.signal(point),
        report=energy.report(point),
        trace=records,
    )


def _mountain_pass(
    energy: EnergyFunctional,
    e: np.ndarray,
    constants: ConstantsReport,
    cfg: SolverConfig,
    trace: bool = False,
    use_tqdm: bool = False,
) -> BranchResult:
    if not constants.beta > 0:
        raise AdmissibilityError(f'mountain pass needs beta > 0, got {constants.beta:.6g}')
    if float(energy.action(e)) > 0.0 or float(energy.norm(e)) <= constants.rho:
        raise InvalidInputError('the endpoint must have nonpositive action and lie outside the ball of radius rho')

    s = np.linspace(0.0, 1.0, cfg.path_points)
    path = s[:, None, None] * e[None, :, :]
    records: List[TraceRecord] = []
    path, j, used = _deform(energy, path, constants, cfg, records, trace, use_tqdm)
    logger.info('path deformed in %d iterations, highest node %d', used, j)

    result = _refine(energy, path[j], cfg, max(1, cfg.max_iters - used), records, trace, use_tqdm, constants.rho)
    path[j] = result.signal.values
    result.path = path
    result.iterations += used
    return result


def _below_barrier(result: BranchResult, constants: ConstantsReport) -> Optional[str]:
    if result.report.action_value < constants.beta:
        return f'mountain pass value {result.report.action_value:.6g} is below beta = {constants.beta:.6g}'
    return None


def mountain_pass(
    p: ProblemSpec,
    e: GridSignal,
    cfg: SolverConfig,
    constants: Optional[ConstantsReport] = None,
    trace: bool = False,
) -> Tuple[GridSignal, EnergyReport]:
    """Find a saddle point by deforming the segment from the origin to ``e``.

    :raises GeometryViolationError: if the path loses the mountain-pass geometry
    :raises NonConvergenceError: if the iteration budget is exhausted
    """
    p.check_signal(e)
    energy, constants = _prepare(p, cfg, constants)
    result = _mountain_pass(energy, e.values, constants, cfg, trace=trace)
    warning = _below_barrier(result, constants)
    if warning is not None:
        logger.warning(warning)
    return result.signal, result.report


"""Both branches"""


def _apriori_slack(energy: EnergyFunctional, u: np.ndarray, constants: ConstantsReport) -> float:
    """Get :math:`I(u) - (1/2 - 1/\\mu)\\|u\\|^2 + C_e (1 - 1/\\mu) \\|f\\| \\|u\\|`."""
    norm = float(energy.norm(u))
    mu = constants.mu
    bound = (0.5 - 1.0 / mu) * norm ** 2 - constants.c_e * (1.0 - 1.0 / mu) * constants.f_l2_norm * norm
    return float(energy.action(u)) - bound


def solve_two(
    p: ProblemSpec,
    cfg: SolverConfig,
    constants: Optional[ConstantsReport] = None,
    trace: bool = False,
    use_tqdm: bool = False,
    callback: Optional[Callable[[str, BranchResult], None]] = None,
) -> SolutionPair:
    """Find the Ekeland minimizer and the mountain-pass point and compare them.

    :param p: An admissible problem
    :param cfg: The solver configuration
    :param constants: Precomputed constants of the problem
    :param trace: Whether to record the iterations
    :param use_tqdm: Whether to show progress bars
    :param callback: Called with the branch name and its result as soon as it finishes
    :raises AdmissibilityError: if the forcing term does not fit the (Wf) budget
    """
    energy, constants = _prepare(p, cfg, constants)

    logger.info('running the Ekeland branch (rho = %.6g)', constants.rho)
    ekeland = _ekeland(energy, constants, cfg, trace=trace, use_tqdm=use_tqdm)
    if callback is not None:
        callback(EKELAND, ekeland)

    logger.info('running the mountain pass branch (beta = %.6g)', constants.beta)
    e = build_endpoint(p, cfg, constants=constants)
    mountain = _mountain_pass(energy, e.values, constants, cfg, trace=trace, use_tqdm=use_tqdm)
    if callback is not None:
        callback(MOUNTAIN, mountain)

    separation = float(energy.norm(ekeland.signal.values - mountain.signal.values))
    distinct = separation > cfg.distinct_tol
    warnings = []
    if not distinct and not p.is_unforced:
        warnings.append(f'the two critical points coincide (separation {separation:.3e})')
    if ekeland.on_boundary:
        warnings.append('the Ekeland minimizer sits on the boundary of the ball')
    below = _below_barrier(mountain, constants)
    if below is not None:
        warnings.append(below)

    slacks = []
    for name, result in ((EKELAND, ekeland), (MOUNTAIN, mountain)):
        slack = _apriori_slack(energy, result.signal.values, constants)
        slacks.append(slack)
        if slack < -1e-8 * max(1.0, abs(result.report.action_value)):
            warnings.append(f'{name}: a priori lower bound violated by {-slack:.3e}')
        if result.ps_spread > 10.0 * cfg.grad_tol * constants.rho:
            warnings.append(f'{name}: trailing iterates spread {result.ps_spread:.3e}')
    for warning in warnings:
        logger.warning(warning)

    return SolutionPair(
        u_ekeland=ekeland.signal,
        u_mountain=mountain.signal,
        report_ekeland=ekeland.report,
        report_mountain=mountain.report,
        c1=ekeland.report.action_value,
        c=mountain.report.action_value,
        distinct=distinct,
        separation=separation,
        constants=constants,
        ekeland=ekeland,
        mountain=mountain,
        apriori_slack_ekeland=slacks[0],
        apriori_slack_mountain=slacks[1],
        warnings=warnings,
    )
