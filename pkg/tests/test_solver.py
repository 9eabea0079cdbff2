# -*- coding: utf-8 -*-

"""Tests for the critical-point finders."""

import dataclasses
import unittest

import numpy as np

from frac_ham.config import build_problem, load_run_config
from frac_ham.energy import EnergyFunctional, action, energy_report
from frac_ham.exceptions import AdmissibilityError, InvalidInputError, NonConvergenceError
from frac_ham.fracops import Grid, GridSignal
from frac_ham.problem import ProblemSpec, constants_report, gaussian_forcing, zero_forcing
from frac_ham.resources import B0_PATH
from frac_ham.solver import (
    EKELAND, MOUNTAIN, BranchResult, SolverConfig, _below_barrier, _deform, _max_node, _p_norm, _reparametrize,
    bump_profile, build_endpoint, ekeland_minimize, mountain_pass, solve_two,
)
from frac_ham.spaces import x_alpha_norm
from tests.cases import ProblemMixin
from tests.constants import SLOW


class TestSolverConfig(unittest.TestCase):
    """Test the validation of the solver configuration."""

    def test_defaults(self):
        """Test the default tolerances."""
        cfg = SolverConfig()
        self.assertEqual(1e-6, cfg.grad_tol)
        self.assertEqual(1e-4, cfg.resid_tol)
        self.assertEqual(64, cfg.path_points)
        self.assertEqual(cfg, SolverConfig.from_dict(cfg.to_dict()))

    def test_invalid(self):
        """Test that out-of-range values are rejected."""
        for kwargs in (
            dict(grad_tol=0.0),
            dict(resid_tol=-1.0),
            dict(max_iters=0),
            dict(path_points=4),
            dict(armijo_c=1.0),
            dict(step_shrink=0.0),
            dict(precond_floor=float('nan')),
            dict(reparam_every=0),
        ):
            with self.subTest(**kwargs), self.assertRaises(InvalidInputError):
                SolverConfig(**kwargs)


class TestBump(unittest.TestCase):
    """Test the smooth bump used for the endpoint."""

    def test_profile(self):
        """Test that the bump is one on the unit interval and vanishes outside (-1, 2)."""
        t = np.linspace(-3.0, 4.0, 701)
        values = bump_profile(t)
        self.assertTrue(np.all(np.isfinite(values)))
        self.assertTrue(np.allclose(1.0, values[(t >= 0.0) & (t <= 1.0)]))
        self.assertFalse(np.any(values[(t <= -1.0) | (t >= 2.0)]))
        self.assertTrue(np.all((values >= 0.0) & (values <= 1.0)))


class TestEkeland(ProblemMixin):
    """Test the minimization over the ball."""

    def test_forced(self):
        """Test that the minimizer is an interior critical point with nonpositive action."""
        constants = constants_report(self.problem)
        u, report = ekeland_minimize(self.problem, self.solver_config, constants=constants)
        self.assertLess(report.action_value, 0.0)
        self.assertLess(report.x_alpha_norm, constants.rho)
        self.assertLessEqual(report.gradient_x_norm, self.solver_config.grad_tol)
        self.assertLessEqual(report.strong_residual_l2, self.solver_config.resid_tol)
        self.assertAlmostEqual(report.action_value, action(u, self.problem), places=12)

    def test_unforced(self):
        """Test that the origin is returned without forcing."""
        u, report = ekeland_minimize(self.unforced, self.solver_config)
        self.assertFalse(np.any(u.values))
        self.assertEqual(0.0, report.action_value)

    def test_deterministic(self):
        """Test that two runs give identical profiles."""
        u, _ = ekeland_minimize(self.problem, self.solver_config)
        v, _ = ekeland_minimize(self.problem, self.solver_config)
        self.assertTrue(np.array_equal(u.values, v.values))

    def test_not_admissible(self):
        """Test that an oversized forcing term is rejected."""
        with self.assertRaises(AdmissibilityError):
            ekeland_minimize(self.make_problem(1.5), self.solver_config)

    def test_budget(self):
        """Test that an exhausted budget raises with the best iterate."""
        cfg = SolverConfig(max_iters=1)
        with self.assertRaises(NonConvergenceError) as cm:
            ekeland_minimize(self.problem, cfg, trace=True)
        self.assertEqual(EKELAND, cm.exception.branch)
        self.assertIsNotNone(cm.exception.best)
        self.assertIsNotNone(cm.exception.report)
        self.assertEqual(1, len(cm.exception.trace))
        self.assertLessEqual(cm.exception.report.action_value, 0.0)


class TestEndpoint(ProblemMixin):
    """Test the construction of the endpoint."""

    def test_endpoint(self):
        """Test that the endpoint lies outside the ball with nonpositive action."""
        constants = constants_report(self.problem)
        e = build_endpoint(self.problem, self.solver_config, constants=constants)
        self.assertLessEqual(action(e, self.problem), 0.0)
        self.assertGreater(x_alpha_norm(e, self.matrix_field, self.alpha), constants.rho)
        # against the mean of the forcing term
        self.assertLess(float(np.sum(e.values[:, 0])), 0.0)
        self.assertFalse(np.any(e.values[:, 1]))

    def test_ray(self):
        """Test that the action decreases along the ray beyond the endpoint."""
        e = build_endpoint(self.problem, self.solver_config)
        values = [action(s * e, self.problem) for s in np.linspace(1.0, 4.0, 100)]
        self.assertTrue(np.all(np.diff(values) < 0.0))

    def test_unforced_direction(self):
        """Test that a seeded random direction is used without forcing."""
        e = build_endpoint(self.unforced, self.solver_config)
        again = build_endpoint(self.unforced, self.solver_config)
        self.assertTrue(np.array_equal(e.values, again.values))
        self.assertLessEqual(action(e, self.unforced), 0.0)

    def test_short_domain(self):
        """Test that the bump does not fit on a short domain."""
        grid = Grid(1.5, 64, self.dim)
        short = ProblemSpec(self.alpha, self.matrix_field, self.potential, zero_forcing(grid))
        with self.assertRaises(InvalidInputError):
            build_endpoint(short, self.solver_config)


class TestMountainPass(ProblemMixin):
    """Test the mountain-pass branch and the pair of solutions."""

    def test_mountain_pass(self):
        """Test that the saddle point lies above the barrier."""
        constants = constants_report(self.problem)
        e = build_endpoint(self.problem, self.solver_config, constants=constants)
        u, report = mountain_pass(self.problem, e, self.solver_config, constants=constants)
        self.assertGreaterEqual(report.action_value, constants.beta)
        self.assertGreater(report.x_alpha_norm, constants.rho)
        self.assertLessEqual(report.gradient_x_norm, self.solver_config.grad_tol)
        self.assertLessEqual(report.strong_residual_l2, self.solver_config.resid_tol)
        self.assertAlmostEqual(report.action_value, action(u, self.problem), places=12)

    def test_bad_endpoint(self):
        """Test that an endpoint inside the ball is rejected."""
        constants = constants_report(self.problem)
        e = build_endpoint(self.problem, self.solver_config, constants=constants)
        inside = e * (0.5 * constants.rho / x_alpha_norm(e, self.matrix_field, self.alpha))
        with self.assertRaises(InvalidInputError):
            mountain_pass(self.problem, inside, self.solver_config, constants=constants)

    def test_deform_trust_radius(self):
        """Test that one deformation step moves only the highest node, by at most half its neighbour spacing."""
        constants = constants_report(self.problem)
        energy = EnergyFunctional(self.problem, precond_floor=self.solver_config.precond_floor)
        e = build_endpoint(self.problem, self.solver_config, constants=constants)
        s = np.linspace(0.0, 1.0, self.solver_config.path_points)
        before = s[:, None, None] * e.values[None, :, :]
        j = _max_node(np.asarray(energy.action(before)))
        cfg = SolverConfig(deform_iters=1)
        after, _, _ = _deform(energy, before.copy(), constants, cfg, [], False, False)
        moved = np.flatnonzero(np.any(after != before, axis=(1, 2)))
        self.assertEqual([j], moved.tolist())
        distance = float(_p_norm(energy, after[j] - before[j]))
        spacing = float(_p_norm(energy, before[j + 1] - before[j - 1]))
        self.assertGreater(distance, 0.0)
        self.assertLessEqual(distance, 0.5 * spacing * (1.0 + 1e-12))

    def test_reparametrize(self):
        """Test that reparametrization keeps the endpoints and equalizes the segments."""
        energy = EnergyFunctional(self.problem)
        s = np.linspace(0.0, 1.0, 9) ** 3
        e = build_endpoint(self.problem, self.solver_config).values
        path = s[:, None, None] * e[None, :, :]
        rv = _reparametrize(energy, path)
        self.assertTrue(np.array_equal(path[0], rv[0]))
        self.assertTrue(np.array_equal(path[-1], rv[-1]))
        lengths = _p_norm(energy, rv[1:] - rv[:-1])
        self.assertTrue(np.allclose(lengths[0], lengths, rtol=1e-10))

    def test_below_barrier(self):
        """Test the warning for a saddle value under the barrier."""
        constants = constants_report(self.problem)
        zero = GridSignal.zeros(self.grid)
        result = BranchResult(signal=zero, report=energy_report(zero, self.problem), iterations=0, ps_spread=0.0)
        self.assertIn('below beta', _below_barrier(result, constants))
        self.assertIsNone(_below_barrier(result, dataclasses.replace(constants, beta=0.0)))

    def test_solve_two(self):
        """Test that the two critical points are distinct and summarized."""
        finished = []
        pair = solve_two(self.problem, self.solver_config, trace=True,
                         callback=lambda name, result: finished.append(name))
        self.assertEqual([EKELAND, MOUNTAIN], finished)
        self.assertLessEqual(pair.c1, 0.0)
        self.assertGreaterEqual(pair.c, pair.constants.beta)
        self.assertTrue(pair.distinct)
        self.assertGreater(pair.separation, self.solver_config.distinct_tol)
        self.assertGreaterEqual(pair.apriori_slack_ekeland, -1e-8)
        self.assertGreaterEqual(pair.apriori_slack_mountain, -1e-8)
        self.assertTrue(pair.ekeland.trace)
        self.assertTrue(pair.mountain.trace)
        self.assertIsNotNone(pair.mountain.path)
        self.assertEqual((self.solver_config.path_points, self.num_points, self.dim), pair.mountain.path.shape)
        self.assertEqual([], pair.warnings)

        # distinct solutions straddle the barrier
        self.assertLess(pair.c1, pair.constants.beta)
        self.assertLessEqual(pair.constants.beta, pair.c)

        rho = pair.constants.rho
        actions = np.array([record.action for record in pair.ekeland.trace])
        self.assertTrue(np.all(np.diff(actions) <= 1e-12 * np.maximum(1.0, np.abs(actions[1:]))))
        norms = np.array([record.x_alpha_norm for record in pair.ekeland.trace])
        self.assertTrue(np.all(norms <= rho * (1.0 + 1e-12)))
        self.assertIn('deform', {record.phase for record in pair.mountain.trace})

        for result in (pair.ekeland, pair.mountain):
            self.assertLessEqual(result.ps_spread, 10.0 * self.solver_config.grad_tol * rho)

        e = build_endpoint(self.problem, self.solver_config, constants=pair.constants)
        self.assertFalse(np.any(pair.mountain.path[0]))
        self.assertTrue(np.array_equal(e.values, pair.mountain.path[-1]))
        energies = np.asarray(EnergyFunctional(self.problem).action(pair.mountain.path))
        self.assertTrue(np.all(np.isfinite(energies)))
        self.assertNotIn(int(np.argmax(energies)), (0, len(energies) - 1))

        summary = pair.summary()
        for key in ('c1', 'c', 'beta', 'distinct', 'separation', 'constants', 'ekeland', 'mountain_pass', 'warnings'):
            self.assertIn(key, summary)
        self.assertEqual(pair.c, summary['mountain_pass']['report']['action_value'])

    def test_unforced(self):
        """Test that without forcing the minimizer is the origin and the saddle point is not."""
        pair = solve_two(self.unforced, self.solver_config)
        self.assertEqual(0.0, pair.c1)
        self.assertTrue(pair.distinct)
        self.assertGreaterEqual(pair.c, pair.constants.beta)
        report = energy_report(pair.u_mountain, self.unforced)
        self.assertLessEqual(report.gradient_x_norm, self.solver_config.grad_tol)

    def test_budget(self):
        """Test that an exhausted budget of the second branch names that branch."""
        cfg = SolverConfig(max_iters=2, deform_iters=1)
        e = build_endpoint(self.problem, cfg)
        with self.assertRaises(NonConvergenceError) as cm:
            mountain_pass(self.problem, e, cfg)
        self.assertEqual(MOUNTAIN, cm.exception.branch)
        self.assertIsNotNone(cm.exception.best)


class TestStability(ProblemMixin):
    """Test that the critical values are stable under refinement of the discretization."""

    def _solve(self, half_width: float, num_points: int, path_points: int):
        grid = Grid(half_width, num_points, self.dim)
        p = ProblemSpec(self.alpha, self.matrix_field, self.potential, zero_forcing(grid))
        p = p.with_forcing(gaussian_forcing(grid, self.budget_fraction * self.budget))
        return solve_two(p, SolverConfig(path_points=path_points))

    def test_refinement(self):
        """Test doubling the grid and the path and widening the domain."""
        coarse = self._solve(self.half_width, self.num_points, 64)
        variants = {
            'fine': self._solve(self.half_width, 2 * self.num_points, 128),
            'wide': self._solve(1.5 * self.half_width, 3 * self.num_points // 2, 64),
        }
        for name, pair in variants.items():
            with self.subTest(variant=name):
                self.assertLessEqual(abs(pair.c - coarse.c), 1e-4)
                self.assertLessEqual(abs(pair.c1 - coarse.c1), 1e-4)


@unittest.skipUnless(SLOW, 'set FRAC_HAM_SLOW to run the benchmark')
class TestBenchmark(unittest.TestCase):
    """Test the bundled benchmark on its full grid."""

    def test_benchmark(self):
        """Test the benchmark run."""
        cfg = load_run_config(B0_PATH)
        p = build_problem(cfg)
        pair = solve_two(p, cfg.solver)
        self.assertLessEqual(pair.c1, 0.0)
        self.assertLess(0.0, pair.constants.beta)
        self.assertLessEqual(pair.constants.beta, pair.c)
        self.assertTrue(pair.distinct)
        for report in (pair.report_ekeland, pair.report_mountain):
            self.assertLessEqual(report.gradient_x_norm, cfg.solver.grad_tol)
            self.assertLessEqual(report.strong_residual_l2, cfg.solver.resid_tol)

    def test_refinement(self):
        """Test that refining the benchmark grid and path or widening its domain keeps both values."""
        cfg = load_run_config(B0_PATH)
        base = solve_two(build_problem(cfg), cfg.solver)
        variants = {
            'fine': dataclasses.replace(
                cfg, num_points=2 * cfg.num_points, solver=dataclasses.replace(cfg.solver, path_points=128),
            ),
            'wide': dataclasses.replace(cfg, half_width=1.5 * cfg.half_width, num_points=3 * cfg.num_points // 2),
        }
        for name, variant in variants.items():
            pair = solve_two(build_problem(variant), variant.solver)
            with self.subTest(variant=name):
                self.assertLessEqual(abs(pair.c - base.c), 1e-4)
                self.assertLessEqual(abs(pair.c1 - base.c1), 1e-4)
