# -*- coding: utf-8 -*-

"""Spectral critical-point solver for perturbed fractional Hamiltonian systems.

The package discretizes the Liouville-Weyl variational framework on a truncated periodic
grid and looks for two critical points of the action functional: a minimizer in a small
ball around the origin and a mountain-pass point.
"""

from .version import get_version  # noqa: F401
