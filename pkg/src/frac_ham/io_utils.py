# -*- coding: utf-8 -*-

"""Reading and writing of solution profiles, traces and reports.

Profiles are comma-separated with a header ``t,u_1,...,u_n``. Floats are written in their
shortest round-trip representation, so a profile read back is bit-identical.
"""

import json
import logging
import os
from dataclasses import fields
from typing import Any, Iterable, Mapping, Optional

import numpy as np
import pandas as pd

from .exceptions import DimensionError, InvalidInputError
from .fracops import Grid, GridSignal

__all__ = [
    'signal_to_df',
    'write_signal',
    'read_signal',
    'write_trace',
    'write_json',
    'read_json',
]

logger = logging.getLogger(__name__)


def signal_to_df(u: GridSignal, prefix: str = 'u') -> pd.DataFrame:
    """Get a data frame with the sample times and one column per coordinate."""
    df = pd.DataFrame(u.values, columns=[f'{prefix}_{i + 1}' for i in range(u.dim)])
    df.insert(0, 't', u.times)
    return df


def write_signal(u: GridSignal, path: str, prefix: str = 'u') -> None:
    """Write a signal as CSV."""
    signal_to_df(u, prefix=prefix).to_csv(path, index=False)
    logger.debug('wrote %s', path)


def read_signal(path: str, grid: Optional[Grid] = None) -> GridSignal:
    """Read a signal written by :func:`write_signal`.

    :param path: The CSV file
    :param grid: The grid the samples must live on. If none, it is inferred from the times.
    :raises InvalidInputError: if the file is not a well-formed profile
    :raises DimensionError: if the samples do not match the grid
    """
    try:
        df = pd.read_csv(path, float_precision='round_trip')
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise InvalidInputError(f'can not read profile {path}: {e}') from e

    if len(df.columns) < 2 or df.columns[0] != 't':
        raise InvalidInputError(f'{path}: expected a header t,u_1,...,u_n, got {",".join(map(str, df.columns))}')
    try:
        table = df.to_numpy(dtype=float)
    except ValueError as e:
        raise InvalidInputError(f'{path}: non-numeric samples') from e
    if len(table) < 2:
        raise InvalidInputError(f'{path}: too few samples')
    times, values = table[:, 0], table[:, 1:]

    if grid is None:
        try:
            grid = Grid(float(-times[0]), len(times), values.shape[1])
        except InvalidInputError as e:
            raise InvalidInputError(f'{path}: the times do not form a grid: {e}') from e
    elif (len(times), values.shape[1]) != (grid.num_points, grid.dim):
        raise DimensionError(
            f'{path}: {len(times)} samples of dimension {values.shape[1]}, '
            f'expected {grid.num_points} of dimension {grid.dim}',
        )
    if not np.allclose(times, grid.times, rtol=0.0, atol=1e-9 * grid.half_width):
        raise DimensionError(f'{path}: sample times do not match the grid on [-{grid.half_width}, {grid.half_width})')
    return GridSignal.on_grid(grid, values)


def write_trace(records: Iterable[Any], path: str) -> None:
    """Write iteration records (dataclasses with ``to_dict``) as CSV."""
    from .solver import TraceRecord

    rows = [record.to_dict() for record in records]
    columns = [f.name for f in fields(TraceRecord)]
    pd.DataFrame(rows, columns=columns).to_csv(path, index=False)
    logger.debug('wrote %d trace rows to %s', len(rows), path)


def write_json(data: Mapping[str, Any], path: str) -> None:
    """Write a JSON document with sorted keys."""
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, 'w') as file:
        json.dump(data, file, indent=2, sort_keys=True)


def read_json(path: str) -> Mapping[str, Any]:
    """Read a JSON document."""
    with open(path) as file:
        return json.load(file)
