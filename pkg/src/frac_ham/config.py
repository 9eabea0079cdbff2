# -*- coding: utf-8 -*-

"""Configurations for frac_ham.

There are two layers:

- :class:`FracHamConfig` holds user-wide settings read by :mod:`easy_config` from
  ``~/.config/frac_ham.ini`` and ``FRAC_HAM_*`` environment variables.
- :class:`RunConfig` describes one problem and its solver settings. It is read from an INI
  file with the sections ``[problem]``, ``[problem.matrix]``, ``[problem.potential]``,
  ``[problem.forcing]``, ``[solver]`` and ``[outputs]``. Values are JSON literals; anything
  that is not valid JSON is taken as a bare string.

.. code-block:: ini

    [problem]
    alpha = 0.75
    n = 2
    half_width = 20
    num_points = 512

    [problem.matrix]
    name = coercive_quadratic

    [problem.potential]
    name = homogeneous
    amplitude = 0.1
    mu = 4

    [problem.forcing]
    name = gaussian
    budget_fraction = 0.5
    direction = [1, 0]
"""

import configparser
import json
import logging
import os
from dataclasses import dataclass, field, fields
from typing import Any, Dict, Mapping, Optional

from dataclasses_json import dataclass_json
from easy_config import EasyConfig

from .constants import CONFIG_FILE_PATHS, DEFAULT_SAMPLE_BUDGET, DEFAULT_SEED
from .exceptions import ConfigError, DimensionError, HypothesisViolationError, InvalidInputError
from .fracops import Grid
from .problem import (
    MATRIX_FIELDS, POTENTIALS, ProblemSpec, constants_report, gaussian_forcing, zero_forcing,
)
from .solver import SolverConfig
from .spaces import sup_norm

__all__ = [
    'FracHamConfig',
    'Selector',
    'RunConfig',
    'parse_run_config',
    'load_run_config',
    'build_problem',
]

logger = logging.getLogger(__name__)

PROBLEM = 'problem'
MATRIX = 'problem.matrix'
POTENTIAL = 'problem.potential'
FORCING = 'problem.forcing'
SOLVER = 'solver'
OUTPUTS = 'outputs'

#: Parameters accepted by each builtin, by section
SELECTOR_KEYS: Mapping[str, Mapping[str, frozenset]] = {
    MATRIX: {
        'identity': frozenset({'scale'}),
        'coercive_quadratic': frozenset({'scale', 'growth'}),
        'diagonal': frozenset({'scales', 'growths'}),
        'constant': frozenset({'matrix'}),
    },
    POTENTIAL: {
        'homogeneous': frozenset({'amplitude', 'mu', 'modulation'}),
        'mixed_power': frozenset({'amplitudes', 'mus'}),
    },
    FORCING: {
        'zero': frozenset(),
        'gaussian': frozenset({'direction', 'width', 'center', 'amplitude', 'budget_fraction'}),
        'file': frozenset({'path'}),
    },
}

PROBLEM_KEYS = ('alpha', 'n', 'half_width', 'num_points')
OUTPUT_KEYS = frozenset({'directory', 'trace'})


@dataclass_json
class FracHamConfig(EasyConfig):
    """User-wide configuration for frac_ham."""

    NAME = 'frac_ham'
    FILES = CONFIG_FILE_PATHS

    #: Seed used when a run configuration does not set one
    SEED: int = DEFAULT_SEED
    #: Number of sphere directions sampled by the hypothesis audit
    SAMPLE_BUDGET: int = DEFAULT_SAMPLE_BUDGET
    #: Replaces the Sobolev constant C_alpha everywhere
    C_ALPHA_OVERRIDE: Optional[float] = None
    #: Show progress bars in the solver loops
    USE_TQDM: bool = False

    def __post_init__(self) -> None:  # noqa: D105
        if self.SAMPLE_BUDGET < 1:
            raise ValueError(f'SAMPLE_BUDGET must be positive, got {self.SAMPLE_BUDGET}')
        if self.C_ALPHA_OVERRIDE is not None and self.C_ALPHA_OVERRIDE <= 0:
            raise ValueError(f'C_ALPHA_OVERRIDE must be positive, got {self.C_ALPHA_OVERRIDE}')


@dataclass
class Selector:
    """A builtin family chosen by name, with its parameters."""

    name: str
    params: Dict[str, Any] = field(default_factory=dict)


@dataclass
class RunConfig:
    """The declarative form of one run."""

    alpha: float
    n: int
    half_width: float
    num_points: int
    matrix: Selector
    potential: Selector
    forcing: Selector = field(default_factory=lambda: Selector('zero'))
    solver: SolverConfig = field(default_factory=SolverConfig)
    #: Where the CLI writes its artifacts
    directory: Optional[str] = None
    #: Write iteration traces
    trace: bool = False
    #: Directory against which relative sample file paths are resolved
    base_directory: str = '.'

    @property
    def grid(self) -> Grid:
        """Get the grid of the run."""
        return Grid(self.half_width, self.num_points, self.n)


def _locate(text: str, section: str, key: Optional[str] = None) -> Optional[int]:
    """Get the 1-based line of a key (or of a section header) in INI text."""
    current = None
    for number, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if stripped.startswith('[') and stripped.endswith(']'):
            current = stripped[1:-1].strip()
            if key is None and current == section:
                return number
            continue
        if key is not None and current == section:
            name = stripped.split('=', 1)[0].split(':', 1)[0].strip()
            if name == key:
                return number
    return None


def _parse_value(raw: str) -> Any:
    try:
        return json.loads(raw)
    except ValueError:
        return raw.strip()


class _Section:
    """Typed access to the values of one section, with error locations."""

    def __init__(self, text: str, name: str, values: Mapping[str, str]) -> None:
        self.text = text
        self.name = name
        self.values = {key: _parse_value(value) for key, value in values.items()}

    def error(self, message: str, key: Optional[str] = None) -> ConfigError:
        return ConfigError(message, section=self.name, key=key, line=_locate(self.text, self.name, key))

    def check_keys(self, allowed) -> None:
        for key in self.values:
            if key not in allowed:
                raise self.error(f'unknown key (expected one of {", ".join(sorted(allowed))})', key)

    def require(self, key: str) -> Any:
        if key not in self.values:
            raise self.error(f'missing key {key}')
        return self.values[key]

    def number(self, key: str, integer: bool = False) -> Any:
        value = self.require(key)
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise self.error(f'expected a number, got {value!r}', key)
        if integer:
            if isinstance(value, float) and not value.is_integer():
                raise self.error(f'expected an integer, got {value!r}', key)
            return int(value)
        return float(value)


def _selector(text: str, parser: configparser.ConfigParser, name: str, required: bool = True) -> Selector:
    if not parser.has_section(name):
        if required:
            raise ConfigError('missing section', section=name)
        return Selector('zero')
    section = _Section(text, name, parser[name])
    choice = section.require('name')
    builtins = SELECTOR_KEYS[name]
    if not isinstance(choice, str) or choice not in builtins:
        raise section.error(f'unknown builtin {choice!r} (expected one of {", ".join(sorted(builtins))})', 'name')
    section.check_keys(builtins[choice] | {'name'})
    params = {key: value for key, value in section.values.items() if key != 'name'}
    return Selector(choice, params)


def _solver(
    text: str,
    parser: configparser.ConfigParser,
    seed: Optional[int],
    default_seed: int,
) -> SolverConfig:
    kwargs: Dict[str, Any] = {'seed': default_seed}
    if parser.has_section(SOLVER):
        section = _Section(text, SOLVER, parser[SOLVER])
        types = {f.name: f.type for f in fields(SolverConfig)}
        section.check_keys(set(types))
        for key in section.values:
            kwargs[key] = section.number(key, integer=types[key] is int)
    if seed is not None:
        kwargs['seed'] = seed
    try:
        return SolverConfig(**kwargs)
    except InvalidInputError as e:
        raise ConfigError(str(e), section=SOLVER, line=_locate(text, SOLVER)) from e


def parse_run_config(
    text: str,
    base_directory: str = '.',
    seed: Optional[int] = None,
    default_seed: int = DEFAULT_SEED,
) -> RunConfig:
    """Parse the INI text of a run.

    :param text: The INI text
    :param base_directory: Directory against which relative sample file paths are resolved
    :param seed: Overrides ``solver.seed``
    :param default_seed: The seed used when ``solver.seed`` is not set
    :raises ConfigError: on malformed text, unknown sections or keys and ill-typed values
    """
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    try:
        parser.read_string(text)
    except configparser.MissingSectionHeaderError as e:
        raise ConfigError('missing section header', line=e.lineno) from e
    except configparser.DuplicateSectionError as e:
        raise ConfigError('duplicate section', section=e.section, line=e.lineno) from e
    except configparser.DuplicateOptionError as e:
        raise ConfigError('duplicate key', section=e.section, key=e.option, line=e.lineno) from e
    except configparser.ParsingError as e:
        line = e.errors[0][0] if e.errors else None
        raise ConfigError('malformed line', line=line) from e

    known = {PROBLEM, MATRIX, POTENTIAL, FORCING, SOLVER, OUTPUTS}
    for name in parser.sections():
        if name not in known:
            raise ConfigError('unknown section', section=name, line=_locate(text, name))
    if not parser.has_section(PROBLEM):
        raise ConfigError('missing section', section=PROBLEM)

    problem = _Section(text, PROBLEM, parser[PROBLEM])
    problem.check_keys(PROBLEM_KEYS)

    directory, trace = None, False
    if parser.has_section(OUTPUTS):
        outputs = _Section(text, OUTPUTS, parser[OUTPUTS])
        outputs.check_keys(OUTPUT_KEYS)
        if 'directory' in outputs.values:
            directory = str(outputs.values['directory'])
        if 'trace' in outputs.values:
            trace = outputs.values['trace']
            if not isinstance(trace, bool):
                raise outputs.error(f'expected true or false, got {trace!r}', 'trace')

    return RunConfig(
        alpha=problem.number('alpha'),
        n=problem.number('n', integer=True),
        half_width=problem.number('half_width'),
        num_points=problem.number('num_points', integer=True),
        matrix=_selector(text, parser, MATRIX),
        potential=_selector(text, parser, POTENTIAL),
        forcing=_selector(text, parser, FORCING, required=False),
        solver=_solver(text, parser, seed, default_seed),
        directory=directory,
        trace=trace,
        base_directory=base_directory,
    )


def load_run_config(path: str, seed: Optional[int] = None, default_seed: int = DEFAULT_SEED) -> RunConfig:
    """Read and parse the run configuration at the given path."""
    try:
        with open(path) as file:
            text = file.read()
    except OSError as e:
        raise ConfigError(f'can not read {path}: {e}') from e
    return parse_run_config(
        text,
        base_directory=os.path.dirname(os.path.abspath(path)),
        seed=seed,
        default_seed=default_seed,
    )


def _forcing(cfg: RunConfig, grid: Grid, unforced: ProblemSpec, sample_budget: int):
    params = dict(cfg.forcing.params)
    if cfg.forcing.name == 'zero':
        return zero_forcing(grid)

    if cfg.forcing.name == 'file':
        from .io_utils import read_signal

        if 'path' not in params:
            raise ConfigError('missing key path', section=FORCING)
        path = params['path']
        if not os.path.isabs(path):
            path = os.path.join(cfg.base_directory, path)
        return read_signal(path, grid=grid)

    amplitude = params.pop('amplitude', None)
    fraction = params.pop('budget_fraction', None)
    if (amplitude is None) == (fraction is None):
        raise ConfigError('exactly one of amplitude and budget_fraction is needed', section=FORCING)
    if fraction is not None:
        budget = constants_report(unforced, sample_budget=sample_budget, seed=cfg.solver.seed).wf_budget
        logger.info('forcing at %.3g of the budget %.6g', fraction, budget)
        return gaussian_forcing(grid, float(fraction) * max(budget, 0.0), **params)
    unit = gaussian_forcing(grid, 1.0, **params)
    return unit * (float(amplitude) / sup_norm(unit))


def build_problem(
    cfg: RunConfig,
    c_alpha_override: Optional[float] = None,
    sample_budget: int = DEFAULT_SAMPLE_BUDGET,
) -> ProblemSpec:
    """Build the problem described by a run configuration.

    Hypothesis violations of the data (for example a potential that is not superquadratic)
    propagate as :class:`HypothesisViolationError`; everything else that the builtins reject
    becomes a :class:`ConfigError`.
    """
    section = PROBLEM
    try:
        grid = cfg.grid
        section = MATRIX
        matrix_field = MATRIX_FIELDS[cfg.matrix.name](cfg.n, **cfg.matrix.params)
        section = POTENTIAL
        potential = POTENTIALS[cfg.potential.name](**cfg.potential.params)
        section = PROBLEM
        unforced = ProblemSpec(
            alpha=cfg.alpha,
            matrix_field=matrix_field,
            potential=potential,
            forcing=zero_forcing(grid),
            c_alpha_override=c_alpha_override,
        )
        section = FORCING
        return unforced.with_forcing(_forcing(cfg, grid, unforced, sample_budget))
    except HypothesisViolationError:
        raise
    except (InvalidInputError, DimensionError, TypeError, ValueError) as e:
        if isinstance(e, ConfigError):
            raise
        raise ConfigError(str(e), section=section) from e
