# -*- coding: utf-8 -*-

"""Utilities for testing frac_ham."""

from typing import Optional, Sequence

import numpy as np

from frac_ham.fracops import Grid, GridSignal
from frac_ham.problem import Potential


def gaussian_signal(
    half_width: float,
    num_points: int,
    width: float = 1.0,
    center: float = 0.0,
    direction: Optional[Sequence[float]] = None,
) -> GridSignal:
    """Make :math:`\\exp(-((t - c)/w)^2)` along a direction (scalar if none)."""
    def func(t):
        profile = np.exp(-((t - center) / width) ** 2)
        if direction is None:
            return profile
        return profile[:, None] * np.asarray(direction, dtype=float)[None, :]

    return GridSignal.from_function(func, half_width, num_points)


def single_mode(half_width: float, num_points: int, k: int, phase: float = 0.0) -> GridSignal:
    """Make :math:`\\cos(\\pi k t / T + \\varphi)`, which is exactly a grid mode."""
    return GridSignal.from_function(
        lambda t: np.cos(np.pi * k * t / half_width + phase),
        half_width,
        num_points,
    )


def random_signal(grid: Grid, seed: int = 0, cutoff: int = 16, window: Optional[float] = None) -> GridSignal:
    """Make a random band-limited signal with frequencies up to ``cutoff`` modes.

    If a window is given, the signal is also multiplied by a Gaussian of that width.
    """
    rng = np.random.default_rng(seed)
    coefficients = np.zeros((grid.num_points // 2 + 1, grid.dim), dtype=complex)
    coefficients[1:cutoff + 1] = rng.standard_normal((cutoff, grid.dim)) + 1j * rng.standard_normal((cutoff, grid.dim))
    values = np.fft.irfft(coefficients, n=grid.num_points, axis=0) * grid.num_points / cutoff
    if window is not None:
        values = values * np.exp(-(grid.times / window) ** 2)[:, None]
    return GridSignal.on_grid(grid, values)


def zero_potential() -> Potential:
    """Make :math:`W \\equiv 0` (with a nominal exponent) for the linear tests."""
    return Potential(
        value=lambda t, x: np.zeros(len(x)),
        gradient=lambda t, x: np.zeros_like(x),
        mu=4.0,
        envelope=lambda x: np.zeros(len(x)),
        name='zero',
    )
