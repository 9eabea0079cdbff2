# -*- coding: utf-8 -*-

"""A command line application for frac_ham.

Run with ``python -m frac_ham`` or simply as ``frac-ham``.

Exit codes are 0 on success, 2 on configuration errors, 3 when the problem violates a
hypothesis and 4 when a solver does not converge.
"""

import json
import logging
import os
import sys
from contextlib import contextmanager
from typing import Any, Dict, Mapping, Optional

import click

from .config import FracHamConfig, RunConfig, build_problem, load_run_config
from .constants import (
    CONSTANTS_FILE, EKELAND_FILE, EKELAND_TRACE_FILE, EXIT_CONFIG, EXIT_HYPOTHESIS, EXIT_NONCONVERGENCE,
    HYPOTHESES_FILE, MOUNTAIN_FILE, MOUNTAIN_TRACE_FILE, STATUS_FAILED, STATUS_OK, SUMMARY_FILE,
)
from .energy import energy_report
from .exceptions import (
    ConfigError, DimensionError, EmbeddingError, GeometryViolationError, HypothesisViolationError,
    InvalidInputError, NonConvergenceError,
)
from .io_utils import read_signal, write_json, write_signal, write_trace
from .problem import HypothesisReport, audit_hypotheses, constants_report
from .solver import EKELAND, MOUNTAIN, BranchResult, solve_two
from .version import get_version

logger = logging.getLogger('frac_ham')


def _set_logging_level(level: int) -> None:
    logging.basicConfig(level=level, format="%(asctime)s - %(levelname)s - %(name)s - %(message)s", datefmt='%H:%M:%S')
    logging.getLogger('frac_ham').setLevel(level)


def _set_debug_param(debug: int) -> None:
    if debug == 1:
        _set_logging_level(logging.INFO)
        logger.info('Logging at logging.INFO')
    elif debug >= 2:
        _set_logging_level(logging.DEBUG)
        logger.info('Logging at logging.DEBUG')


def _echo_json(data: Mapping[str, Any]) -> None:
    click.echo(json.dumps(data, indent=2, sort_keys=True))


@contextmanager
def _exit_codes():
    """Turn the errors of a run into exit codes."""
    try:
        yield
    except (ConfigError, DimensionError, InvalidInputError) as e:
        click.secho(f'configuration error: {e}', fg='red', err=True)
        sys.exit(EXIT_CONFIG)
    except (HypothesisViolationError, EmbeddingError) as e:
        click.secho(f'hypothesis violated: {e}', fg='red', err=True)
        sys.exit(EXIT_HYPOTHESIS)
    except (NonConvergenceError, GeometryViolationError) as e:
        click.secho(f'solver failed: {e}', fg='red', err=True)
        sys.exit(EXIT_NONCONVERGENCE)


def _load(config_path: str, seed: Optional[int]):
    settings = FracHamConfig.load()
    cfg = load_run_config(config_path, seed=seed, default_seed=settings.SEED)
    p = build_problem(cfg, c_alpha_override=settings.C_ALPHA_OVERRIDE, sample_budget=settings.SAMPLE_BUDGET)
    return settings, cfg, p


def _output_directory(cfg: RunConfig, out: Optional[str]) -> str:
    directory = out or cfg.directory or os.getcwd()
    os.makedirs(directory, exist_ok=True)
    return directory


_main_help = f"""frac_ham v{get_version()} Command Line Interface on {sys.executable}

Two solutions of forced fractional Hamiltonian systems.
"""

config_option = click.option(
    '-c', '--config', 'config_path', required=True,
    type=click.Path(exists=True, dir_okay=False), help='Run configuration (INI)',
)
seed_option = click.option('--seed', type=int, help='Overrides the seed of the run configuration')
debug_option = click.option('-v', '--debug', count=True, help="Turn on debugging. More v's, more debugging")
out_option = click.option('-o', '--out', type=click.Path(file_okay=False), help='Output directory')


@click.group(help=_main_help)
@click.version_option()
def main():
    """Run the frac_ham command line interface."""


@main.command()
@config_option
@seed_option
@out_option
@debug_option
def constants(config_path: str, seed: Optional[int], out: Optional[str], debug: int):
    """Print the constants of the mountain-pass geometry."""
    _set_debug_param(debug)
    with _exit_codes():
        settings, cfg, p = _load(config_path, seed)
        report = constants_report(p, sample_budget=settings.SAMPLE_BUDGET, seed=cfg.solver.seed).to_dict()
        _echo_json(report)
        if out is not None:
            write_json(report, os.path.join(_output_directory(cfg, out), CONSTANTS_FILE))


@main.command()
@config_option
@seed_option
@out_option
@debug_option
def check(config_path: str, seed: Optional[int], out: Optional[str], debug: int):
    """Audit the hypotheses; exit with 0 iff the problem is solver-ready."""
    _set_debug_param(debug)
    with _exit_codes():
        settings, cfg, p = _load(config_path, seed)
        report = audit_hypotheses(p, sample_budget=settings.SAMPLE_BUDGET, seed=cfg.solver.seed)
        _echo_json(report.to_dict())
        if out is not None:
            write_json(report.to_dict(), os.path.join(_output_directory(cfg, out), HYPOTHESES_FILE))

    if not report.solver_ready:
        _echo_failed_checks(report)
        sys.exit(EXIT_HYPOTHESIS)


def _echo_failed_checks(report: HypothesisReport) -> None:
    for check_ in report.checks:
        if not check_.passed:
            click.secho(f'{check_.tag} {check_.name}: {check_.value} vs {check_.threshold} {check_.detail}',
                        fg='red', err=True)


def _write_branch(directory: str, name: str, result: BranchResult, trace: bool) -> None:
    write_signal(result.signal, os.path.join(directory, EKELAND_FILE if name == EKELAND else MOUNTAIN_FILE))
    if trace:
        path = EKELAND_TRACE_FILE if name == EKELAND else MOUNTAIN_TRACE_FILE
        write_trace(result.trace, os.path.join(directory, path))


def _failure_summary(
    directory: str,
    error: Exception,
    finished: Dict[str, BranchResult],
    trace: bool,
    constants_: Optional[Dict[str, Any]],
) -> Dict[str, Any]:
    summary: Dict[str, Any] = {
        'status': STATUS_FAILED,
        'error': str(error),
        'constants': constants_,
    }
    for name, result in finished.items():
        summary[name] = {'report': result.report.to_dict(), 'iterations': result.iterations}
    if isinstance(error, NonConvergenceError) and error.best is not None:
        write_signal(error.best, os.path.join(directory, EKELAND_FILE if error.branch == EKELAND else MOUNTAIN_FILE))
        summary[error.branch] = {'report': error.report.to_dict() if error.report is not None else None}
        if trace:
            path = EKELAND_TRACE_FILE if error.branch == EKELAND else MOUNTAIN_TRACE_FILE
            write_trace(error.trace, os.path.join(directory, path))
    summary['failed_branch'] = getattr(error, 'branch', MOUNTAIN)
    return summary


@main.command()
@config_option
@seed_option
@out_option
@click.option('--trace', is_flag=True, help='Write the iteration traces')
@debug_option
def solve(config_path: str, seed: Optional[int], out: Optional[str], trace: bool, debug: int):
    """Find the two critical points and write the profiles and a summary."""
    _set_debug_param(debug)
    with _exit_codes():
        settings, cfg, p = _load(config_path, seed)
        directory = _output_directory(cfg, out)
        trace = trace or cfg.trace
        audit = audit_hypotheses(p, sample_budget=settings.SAMPLE_BUDGET, seed=cfg.solver.seed)
        if not audit.solver_ready:
            write_json(audit.to_dict(), os.path.join(directory, HYPOTHESES_FILE))
            _echo_failed_checks(audit)
            click.secho(f'not solving: failed checks {", ".join(audit.failed_tags())}', fg='red', err=True)
            sys.exit(EXIT_HYPOTHESIS)
        report = audit.constants

        finished: Dict[str, BranchResult] = {}

        def _on_branch(name: str, result: BranchResult) -> None:
            finished[name] = result
            _write_branch(directory, name, result, trace)

        try:
            pair = solve_two(p, cfg.solver, constants=report, trace=trace, use_tqdm=settings.USE_TQDM,
                             callback=_on_branch)
        except (NonConvergenceError, GeometryViolationError) as e:
            summary = _failure_summary(directory, e, finished, trace, report.to_dict())
            write_json(summary, os.path.join(directory, SUMMARY_FILE))
            raise

        summary = pair.summary()
        summary['status'] = STATUS_OK
        write_json(summary, os.path.join(directory, SUMMARY_FILE))
        click.echo(
            f'c1 = {pair.c1:.10g}, beta = {pair.constants.beta:.10g}, c = {pair.c:.10g}, '
            f'distinct = {pair.distinct} (separation {pair.separation:.6g})',
        )
        click.echo(f'wrote results to {directory}')


@main.command()
@config_option
@click.argument('solution', type=click.Path(exists=True, dir_okay=False))
@seed_option
@debug_option
def residual(config_path: str, solution: str, seed: Optional[int], debug: int):
    """Recompute the action, gradient and residual of a profile."""
    _set_debug_param(debug)
    with _exit_codes():
        _, cfg, p = _load(config_path, seed)
        u = read_signal(solution, grid=p.grid)
        report = energy_report(u, p, precond_floor=cfg.solver.precond_floor)
        _echo_json(report.to_dict())


if __name__ == '__main__':
    main()
