"""Exception hierarchy shared by all ptsem modules."""

from __future__ import annotations


class PtsemError(Exception):
    """Base class for all errors raised by this package."""


class InputError(PtsemError):
    """Malformed argument: arity mismatch, domain mismatch, bad range."""


class DomainError(PtsemError):
    """Reference to a variable, relation, or constant that does not exist."""


class DegenerateTeamError(PtsemError):
    """Operation undefined on a team with zero total weight."""


class FormulaSyntaxError(PtsemError):
    """Concrete-syntax error with source position."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{line}:{column}: {message}")
        self.line = line
        self.column = column


class UnsupportedSugarError(PtsemError):
    """Shorthand whose expansion is not defined (e.g. a non-literal guard)."""


class NoPathError(PtsemError):
    """No translation into the requested target logic exists."""


class FragmentError(PtsemError):
    """Sentence falls outside the fragment a procedure can decide."""


class ConfigurationError(PtsemError):
    """Missing or inconsistent run configuration."""


class StrategyError(PtsemError):
    """Checker strategy not applicable to the given formula."""
