# -*- coding: utf-8 -*-

"""Software version of frac_ham."""

__all__ = [
    'VERSION',
    'get_version',
]

VERSION = '0.1.0-dev'


def get_version() -> str:
    """Get the current frac_ham version string."""
    return VERSION
