# -*- coding: utf-8 -*-

"""Constants for frac_ham."""

import os

__all__ = [
    'dir_path',
    'CONFIG_FILE_PATHS',
]

dir_path = os.path.dirname(os.path.realpath(__file__))

#: Where the global configuration is looked up
CONFIG_FILE_PATHS = [
    os.path.join(os.path.expanduser('~'), '.config', 'frac_ham.ini'),
    os.path.join(os.path.expanduser('~'), '.config', 'frac_ham', 'config.ini'),
]

#: Environment variable that turns on the expensive benchmark tests
SLOW_TESTS_ENV = 'FRAC_HAM_SLOW'

"""Fractional operators"""

#: Integrals refuse signals whose mean exceeds this fraction of the sup norm
MEAN_RTOL = 1e-8
#: The Marchaud oracle requires boundary values below this fraction of the sup norm
DECAY_RTOL = 1e-6
#: Default number of Gauss nodes in the near field of the Marchaud oracle
MARCHAUD_M_QUAD = 400
#: Points per Gauss-Legendre panel
GAUSS_ORDER = 8
#: Near field of the Marchaud oracle, in grid cells
NEAR_FIELD_CELLS = 64
#: Smallest near-field panel edge, in grid cells
NEAR_FIELD_FLOOR = 1e-6

EXTENSION_ZERO = 'zero'
EXTENSION_PERIODIC = 'periodic'
EXTENSIONS = {EXTENSION_ZERO, EXTENSION_PERIODIC}

"""Hypothesis tags"""

TAG_L = '(L)'
TAG_W0 = '(W0)'
TAG_GRADIENT = '(Wgrad)'
TAG_W1 = '(W1)'
TAG_W2 = '(W2)'
TAG_W3 = '(W3)'
TAG_SCALING = '(Wscale)'
TAG_D = '(d)'
TAG_WF = '(Wf)'

#: Sphere radii sampled by the audit
AUDIT_RADII = (1e-4, 1e-3, 1e-2, 1.0, 10.0)
#: Radii where the ratio |grad W|/|x| must decrease towards zero
SMALL_RADII = (1e-2, 1e-3, 1e-4)

"""Solver defaults"""

DEFAULT_SEED = 42
DEFAULT_SAMPLE_BUDGET = 64
DEFAULT_GRAD_TOL = 1e-6
DEFAULT_RESID_TOL = 1e-4
DEFAULT_MAX_ITERS = 20000
DEFAULT_PATH_POINTS = 64
DEFAULT_ARMIJO_C = 1e-4
DEFAULT_STEP_SHRINK = 0.5
DEFAULT_DISTINCT_TOL = 1e-3
DEFAULT_PRECOND_FLOOR = 1e-2
DEFAULT_DEFORM_ITERS = 500
DEFAULT_REPARAM_EVERY = 5

#: Nodes sharing the path maximum within this tolerance are tied
TIE_TOL = 1e-12
#: Number of trailing iterates inspected by the Palais-Smale diagnostic
PS_WINDOW = 10
#: Largest scaling tried when building the mountain-pass endpoint
MAX_RAY_SCALE = 2.0 ** 60

"""Output files"""

SUMMARY_FILE = 'summary.json'
CONSTANTS_FILE = 'constants.json'
HYPOTHESES_FILE = 'hypotheses.json'
EKELAND_FILE = 'u_ekeland.csv'
MOUNTAIN_FILE = 'u_mountain.csv'
EKELAND_TRACE_FILE = 'trace_ekeland.csv'
MOUNTAIN_TRACE_FILE = 'trace_mp.csv'

STATUS_OK = 'OK'
STATUS_FAILED = 'FAILED'

"""Exit codes"""

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_HYPOTHESIS = 3
EXIT_NONCONVERGENCE = 4
