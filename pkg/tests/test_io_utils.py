# -*- coding: utf-8 -*-

"""Tests for reading and writing profiles, traces and reports."""

import numpy as np
import pandas as pd

from frac_ham.exceptions import DimensionError, InvalidInputError
from frac_ham.fracops import Grid
from frac_ham.io_utils import read_json, read_signal, signal_to_df, write_json, write_signal, write_trace
from frac_ham.solver import EKELAND, TraceRecord
from tests.cases import TemporaryDirectoryMixin
from tests.utils import random_signal


class TestSignals(TemporaryDirectoryMixin):
    """Test reading and writing profiles."""

    def setUp(self):
        """Set up a random profile."""
        super().setUp()
        self.grid = Grid(12.0, 256, 2)
        self.u = random_signal(self.grid, seed=3, window=3.0)

    def test_columns(self):
        """Test the header of a profile."""
        df = signal_to_df(self.u)
        self.assertEqual(['t', 'u_1', 'u_2'], list(df.columns))
        self.assertEqual(-12.0, df['t'].iloc[0])

    def test_bit_stable(self):
        """Test that a profile read back is identical to the one written."""
        path = self.path('u.csv')
        write_signal(self.u, path)
        v = read_signal(path, grid=self.grid)
        self.assertTrue(np.array_equal(self.u.values, v.values))

        inferred = read_signal(path)
        self.assertEqual(self.grid, inferred.grid)
        self.assertTrue(np.array_equal(self.u.values, inferred.values))

    def test_grid_mismatch(self):
        """Test that profiles on other grids are rejected."""
        path = self.path('u.csv')
        write_signal(self.u, path)
        for grid in (Grid(12.0, 128, 2), Grid(12.0, 256, 3), Grid(10.0, 256, 2)):
            with self.subTest(grid=grid), self.assertRaises(DimensionError):
                read_signal(path, grid=grid)

    def test_malformed(self):
        """Test files that are not profiles."""
        cases = {
            'header.csv': 'time,x\n0,1\n1,2\n',
            'single.csv': 't\n0\n1\n',
            'text.csv': 't,u_1\n-1,a\n0,b\n',
            'short.csv': 't,u_1\n-1,0\n',
            'empty.csv': '',
        }
        for name, content in cases.items():
            with open(self.path(name), 'w') as file:
                file.write(content)
            with self.subTest(name=name), self.assertRaises(InvalidInputError):
                read_signal(self.path(name))
        with self.assertRaises(InvalidInputError):
            read_signal(self.path('missing.csv'))

    def test_times_mismatch(self):
        """Test a profile whose times do not lie on the grid."""
        df = signal_to_df(self.u)
        df.loc[3, 't'] += 0.01
        df.to_csv(self.path('u.csv'), index=False)
        with self.assertRaises(DimensionError):
            read_signal(self.path('u.csv'), grid=self.grid)


class TestReports(TemporaryDirectoryMixin):
    """Test traces and JSON reports."""

    def test_trace(self):
        """Test the columns and rows of a trace."""
        records = [
            TraceRecord(EKELAND, 'descent', 0, -0.1, 1e-2, 0.3, 1.0),
            TraceRecord(EKELAND, 'descent', 1, -0.2, 1e-4, 0.31, 0.5),
        ]
        write_trace(records, self.path('trace.csv'))
        df = pd.read_csv(self.path('trace.csv'))
        self.assertEqual(
            ['branch', 'phase', 'iteration', 'action', 'gradient_x_norm', 'x_alpha_norm', 'step'],
            list(df.columns),
        )
        self.assertEqual([0, 1], df['iteration'].tolist())
        self.assertEqual(-0.2, df['action'].iloc[1])

    def test_empty_trace(self):
        """Test that an empty trace still has a header."""
        write_trace([], self.path('trace.csv'))
        with open(self.path('trace.csv')) as file:
            self.assertEqual('branch,phase,iteration,action,gradient_x_norm,x_alpha_norm,step', file.read().strip())

    def test_json(self):
        """Test that reports are written with sorted keys into new directories."""
        path = self.path('nested/summary.json')
        write_json({'c': 1.5, 'beta': 0.25, 'distinct': True}, path)
        self.assertEqual({'c': 1.5, 'beta': 0.25, 'distinct': True}, read_json(path))
        with open(path) as file:
            text = file.read()
        self.assertLess(text.index('beta'), text.index('distinct'))
