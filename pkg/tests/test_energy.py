# -*- coding: utf-8 -*-

"""Tests for the action functional and its derivatives."""

import unittest

import numpy as np

from frac_ham.energy import (
    EnergyFunctional, action, barrier_chain, directional_derivative, energy_report, riesz_gradient, self_pairing,
    sphere_barrier, strong_residual,
)
from frac_ham.exceptions import DimensionError, HypothesisViolationError, InvalidInputError
from frac_ham.fracops import Grid, apply_symbol
from frac_ham.problem import (
    ProblemSpec, coercive_quadratic_matrix_field, constant_matrix_field, constants_report, gaussian_forcing,
    homogeneous_potential, identity_matrix_field, zero_forcing,
)
from frac_ham.spaces import l2_norm, x_alpha_norm
from tests.cases import ProblemMixin
from tests.utils import random_signal, zero_potential

STEPS = (1e-2, 5e-3, 2.5e-3)


class TestDerivative(unittest.TestCase):
    """Test the derivative of the action against finite differences."""

    def setUp(self):
        """Set up a problem with a quartic potential and a forcing term."""
        self.grid = Grid(8.0, 128, 2)
        self.problem = ProblemSpec(
            0.75,
            coercive_quadratic_matrix_field(2),
            homogeneous_potential(1.0, 4.0),
            gaussian_forcing(self.grid, 0.1, direction=[1.0, 1.0]),
        )

    def _pair(self, seed: int):
        v = random_signal(self.grid, seed=2 * seed + 1, cutoff=8, window=2.0)
        u = random_signal(self.grid, seed=2 * seed, cutoff=8, window=2.0) + 0.5 * v
        return u, v

    def test_richardson(self):
        """Test that central differences converge with order two on random pairs."""
        for seed in range(20):
            u, v = self._pair(seed)
            exact = directional_derivative(u, v, self.problem)
            errors = []
            for h in STEPS:
                approx = (action(u + h * v, self.problem) - action(u - h * v, self.problem)) / (2.0 * h)
                errors.append(abs(approx - exact))
            slopes = np.log2(np.array(errors[:-1]) / np.array(errors[1:]))
            with self.subTest(seed=seed):
                self.assertTrue(np.all(np.abs(slopes - 2.0) <= 0.1), msg=f'slopes {slopes}, errors {errors}')

    def test_self_pairing(self):
        """Test the closed form of the derivative in the direction of the point."""
        for seed in range(5):
            u, _ = self._pair(seed)
            expected = directional_derivative(u, u, self.problem)
            self.assertLess(abs(self_pairing(u, self.problem) - expected), 1e-10 * max(1.0, abs(expected)))

    def test_linearity(self):
        """Test that the derivative is linear in the direction."""
        u, v = self._pair(0)
        _, w = self._pair(1)
        lhs = directional_derivative(u, v + 2.0 * w, self.problem)
        rhs = directional_derivative(u, v, self.problem) + 2.0 * directional_derivative(u, w, self.problem)
        self.assertAlmostEqual(lhs, rhs, places=10)

    def test_grid_mismatch(self):
        """Test that signals on another grid are rejected."""
        u = random_signal(Grid(8.0, 256, 2))
        with self.assertRaises(DimensionError):
            action(u, self.problem)
        v, _ = self._pair(0)
        with self.assertRaises(DimensionError):
            directional_derivative(v, u, self.problem)


class TestGradient(unittest.TestCase):
    """Test gradients and residuals on linear and manufactured problems."""

    def setUp(self):
        """Set up a grid."""
        self.grid = Grid(8.0, 128, 2)

    def test_linear_riesz(self):
        """Test that the gradient of a quadratic action with a matched shift is the identity."""
        p = ProblemSpec(0.75, identity_matrix_field(2, scale=2.0), zero_potential(), zero_forcing(self.grid))
        u = random_signal(self.grid, seed=5, window=2.0)
        g = riesz_gradient(u, p)
        self.assertTrue(np.allclose(u.values, g.values, rtol=0.0, atol=1e-12 * np.max(np.abs(u.values))))
        self.assertAlmostEqual(x_alpha_norm(u, p.matrix_field, 0.75) ** 2, self_pairing(u, p), places=10)

    def test_bad_floor(self):
        """Test that the preconditioner floor must be positive."""
        p = ProblemSpec(0.75, identity_matrix_field(2), zero_potential(), zero_forcing(self.grid))
        with self.assertRaises(InvalidInputError):
            riesz_gradient(p.zeros(), p, precond_floor=0.0)

    def test_indefinite(self):
        """Test that an indefinite matrix field is rejected."""
        p = ProblemSpec(
            0.75, constant_matrix_field([[1.0, 0.0], [0.0, -1.0]]), zero_potential(), zero_forcing(self.grid),
        )
        with self.assertRaises(HypothesisViolationError):
            action(p.zeros(), p)

    def test_zero(self):
        """Test the report of the zero trajectory without forcing."""
        p = ProblemSpec(0.75, coercive_quadratic_matrix_field(2), homogeneous_potential(), zero_forcing(self.grid))
        report = energy_report(p.zeros(), p)
        self.assertEqual(0.0, report.action_value)
        self.assertEqual(0.0, report.strong_residual_l2)
        self.assertEqual(0.0, report.gradient_x_norm)

    def test_manufactured(self):
        """Test that the residual vanishes for the forcing matched to a chosen trajectory."""
        unforced = ProblemSpec(
            0.75, coercive_quadratic_matrix_field(2), homogeneous_potential(0.1, 4.0), zero_forcing(self.grid),
        )
        u = random_signal(self.grid, seed=9, cutoff=8, window=2.0)
        forcing = u.with_values(-EnergyFunctional(unforced).l2_gradient(u.values))
        p = unforced.with_forcing(forcing)
        self.assertLessEqual(l2_norm(strong_residual(u, p)), 1e-10)
        report = energy_report(u, p)
        self.assertLessEqual(report.strong_residual_l2, 1e-10)
        self.assertLessEqual(report.gradient_x_norm, 1e-10)

    def test_residual_sign(self):
        """Test that the strong residual is the negative of the L2 gradient."""
        p = ProblemSpec(0.75, coercive_quadratic_matrix_field(2), homogeneous_potential(), zero_forcing(self.grid))
        u = random_signal(self.grid, seed=2, window=2.0)
        v = random_signal(self.grid, seed=3, window=2.0)
        pairing = u.dt * np.sum(strong_residual(u, p).values * v.values)
        self.assertAlmostEqual(-directional_derivative(u, v, p), pairing, places=10)


class TestBatched(ProblemMixin):
    """Test the array interface used by the solvers."""

    def test_batched_action(self):
        """Test that leading axes are evaluated independently."""
        energy = EnergyFunctional(self.problem)
        u = random_signal(self.grid, seed=1, window=3.0)
        v = random_signal(self.grid, seed=2, window=3.0)
        batch = np.stack([u.values, v.values])
        values = energy.action(batch)
        self.assertEqual((2,), values.shape)
        self.assertAlmostEqual(action(u, self.problem), values[0], places=12)
        self.assertAlmostEqual(action(v, self.problem), values[1], places=12)

    def test_preconditioner(self):
        """Test that the preconditioner is inverted exactly."""
        energy = EnergyFunctional(self.problem)
        r = random_signal(self.grid, seed=4, window=3.0).values
        g = energy.precondition(r)
        self.assertAlmostEqual(1.0, energy.shift)
        self.assertTrue(np.allclose(r, apply_symbol(g, energy.preconditioner), rtol=0.0, atol=1e-12))
        self.assertAlmostEqual(float(energy.pairing(r, g)), float(energy.preconditioner_inner(g, g)), places=12)

    def test_hessian_product(self):
        """Test the second derivative against differences of the gradient and for symmetry."""
        energy = EnergyFunctional(self.problem)
        u = random_signal(self.grid, seed=5, window=3.0).values
        v = random_signal(self.grid, seed=6, window=3.0).values
        w = random_signal(self.grid, seed=7, window=3.0).values
        hv = energy.hessian_product(u, v)
        h = 1e-4
        approx = (energy.l2_gradient(u + h * v) - energy.l2_gradient(u - h * v)) / (2.0 * h)
        self.assertLess(float(np.max(np.abs(hv - approx))), 1e-6 * float(np.max(np.abs(hv))))
        vhw = float(energy.pairing(v, energy.hessian_product(u, w)))
        whv = float(energy.pairing(w, hv))
        self.assertLess(abs(vhw - whv), 1e-8 * max(1.0, abs(vhw)))
        self.assertFalse(np.any(energy.hessian_product(u, np.zeros_like(u))))


class TestBarrier(ProblemMixin):
    """Test the mountain-pass barrier on the sphere of radius rho."""

    def test_sphere(self):
        """Test that the action on the sphere stays above beta."""
        constants = constants_report(self.problem)
        self.assertGreater(constants.beta, 0.0)
        chains = sphere_barrier(self.problem, count=50, constants=constants)
        self.assertEqual(50, len(chains))
        self.assertGreaterEqual(min(chain.action for chain in chains), constants.beta - 1e-8)

    def test_chain(self):
        """Test the links of the chain of lower bounds."""
        constants = constants_report(self.problem)
        for chain in sphere_barrier(self.problem, count=10, seed=3, constants=constants):
            self.assertAlmostEqual(0.5 * constants.rho ** 2, chain.quadratic, places=10)
            self.assertGreaterEqual(chain.action, chain.quadratic - chain.potential - chain.forcing_bound - 1e-12)
            self.assertLessEqual(abs(chain.forcing), chain.forcing_bound + 1e-12)
            if chain.sup_norm <= 1.0:
                self.assertLessEqual(chain.potential, chain.potential_bound + 1e-12)

    def test_single_chain(self):
        """Test the chain of a single signal."""
        u = random_signal(self.grid, seed=11, window=3.0)
        chain = barrier_chain(u, self.problem)
        self.assertAlmostEqual(action(u, self.problem), chain.action, places=10)
        self.assertEqual(chain.beta, constants_report(self.problem).beta)
