# -*- coding: utf-8 -*-

"""Bundled run configurations.

- ``b0.ini`` is the two-dimensional benchmark with a Gaussian forcing at half of the
  admissible budget.
- ``b0_unperturbed.ini`` is the same problem without forcing.
"""

import os

__all__ = [
    'dir_path',
    'B0_PATH',
    'B0_UNPERTURBED_PATH',
    'get_resource_path',
]

dir_path = os.path.dirname(os.path.realpath(__file__))

B0_PATH = os.path.join(dir_path, 'b0.ini')
B0_UNPERTURBED_PATH = os.path.join(dir_path, 'b0_unperturbed.ini')


def get_resource_path(name: str) -> str:
    """Get the path of a bundled configuration by its name, with or without the ``.ini`` suffix."""
    if not name.endswith('.ini'):
        name = f'{name}.ini'
    path = os.path.join(dir_path, name)
    if not os.path.exists(path):
        raise FileNotFoundError(f'no bundled configuration {name}')
    return path
