# -*- coding: utf-8 -*-

"""Exceptions raised by frac_ham."""

from typing import Any, List, Optional

__all__ = [
    'FracHamError',
    'DimensionError',
    'InvalidInputError',
    'SingularModeError',
    'DomainTruncationError',
    'EmbeddingError',
    'HypothesisViolationError',
    'SuperquadraticityError',
    'AdmissibilityError',
    'NonConvergenceError',
    'GeometryViolationError',
    'ConfigError',
]


class FracHamError(Exception):
    """Base class for all errors raised by frac_ham."""


class DimensionError(FracHamError, ValueError):
    """Raised when grid metadata (half width, number of points, dimension) do not match."""


class InvalidInputError(FracHamError, ValueError):
    """Raised on non-finite samples or out-of-range parameters."""


class SingularModeError(FracHamError, ValueError):
    """Raised when a fractional integral is applied to a signal with a non-negligible mean."""


class DomainTruncationError(FracHamError, ValueError):
    """Raised when a signal does not decay at the boundary of the truncated domain."""


class EmbeddingError(FracHamError, ValueError):
    """Raised when the fractional order is too small for the embedding into bounded functions."""


class HypothesisViolationError(FracHamError):
    """Raised when problem data violate one of the structural hypotheses."""

    def __init__(self, message: str, tag: str) -> None:
        super().__init__(message)
        self.tag = tag

    def __str__(self) -> str:  # noqa: D105
        return f'{self.tag} {super().__str__()}'


class SuperquadraticityError(HypothesisViolationError):
    """Raised when a potential is not superquadratic."""

    def __init__(self, message: str) -> None:
        super().__init__(message, tag='(W1)')


class AdmissibilityError(HypothesisViolationError):
    """Raised when the forcing term is too large for the mountain-pass geometry."""

    def __init__(self, message: str) -> None:
        super().__init__(message, tag='(Wf)')


class NonConvergenceError(FracHamError, RuntimeError):
    """Raised when an iterative solver exhausts its budget.

    The best iterate found so far, its energy report and the iteration trace are kept so
    that callers can still write partial results.
    """

    def __init__(
        self,
        message: str,
        branch: str,
        best: Optional[Any] = None,
        report: Optional[Any] = None,
        trace: Optional[List[Any]] = None,
    ) -> None:
        super().__init__(message)
        self.branch = branch
        self.best = best
        self.report = report
        self.trace = trace if trace is not None else []


class GeometryViolationError(FracHamError, RuntimeError):
    """Raised when a discrete path loses the mountain-pass geometry."""


class ConfigError(FracHamError, ValueError):
    """Raised on malformed run configurations."""

    def __init__(
        self,
        message: str,
        section: Optional[str] = None,
        key: Optional[str] = None,
        line: Optional[int] = None,
    ) -> None:
        super().__init__(message)
        self.section = section
        self.key = key
        self.line = line

    def __str__(self) -> str:  # noqa: D105
        where = []
        if self.section is not None:
            where.append(f'[{self.section}]')
        if self.key is not None:
            where.append(self.key)
        if self.line is not None:
            where.append(f'line {self.line}')
        message = super().__str__()
        if not where:
            return message
        return f'{" ".join(where)}: {message}'
