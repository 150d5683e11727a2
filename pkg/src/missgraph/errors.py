"""Exception hierarchy shared across the package.

Every error raised by the library derives from :class:`MissgraphError` so the
CLI can map failures onto stable exit codes; pipeline stages tag exceptions
with the stage name they escaped from (see :func:`stage`).
"""

from __future__ import annotations

from contextlib import contextmanager


class MissgraphError(Exception):
    """Base class for all package errors."""

    stage: str | None = None


class ConfigError(MissgraphError):
    """Invalid configuration: bad flag values, malformed spec files."""


class ParseError(MissgraphError):
    """Input data could not be parsed (bad CSV shape, non-numeric cells)."""


class SchemaError(ParseError):
    """Header or schema-file problems (duplicate names, unknown categories)."""


class NumericError(MissgraphError):
    """A numerical precondition failed during estimation."""


class ContractError(NumericError):
    """An operation was called with arguments violating its contract."""


class DegenerateColumnError(NumericError):
    """A column is constant where variation is required."""

    def __init__(self, column: str, detail: str = ""):
        self.column = column
        msg = f"column {column!r} is constant"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class UnimputableColumnError(NumericError):
    """A column has missing cells but no observed entries to draw from."""

    def __init__(self, column: str):
        self.column = column
        super().__init__(
            f"column {column!r} has missing entries but no observed values"
        )


class ConvergenceError(MissgraphError):
    """An iterative solver exhausted its iteration budget."""

    def __init__(self, message: str, residual: float | None = None):
        self.residual = residual
        if residual is not None:
            message = f"{message} (residual {residual:.3e})"
        super().__init__(message)


# CLI exit codes: 0 ok, 2 config, 3 parse, 4 numeric, 5 convergence.
EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_PARSE = 3
EXIT_NUMERIC = 4
EXIT_CONVERGENCE = 5


def exit_code_for(exc: BaseException) -> int:
    """Map an exception to the CLI exit code of its error family."""
    if isinstance(exc, ConfigError):
        return EXIT_CONFIG
    if isinstance(exc, ParseError):
        return EXIT_PARSE
    if isinstance(exc, ConvergenceError):
        return EXIT_CONVERGENCE
    if isinstance(exc, NumericError):
        return EXIT_NUMERIC
    return 1


def error_kind(exc: BaseException) -> str:
    """Short family name used in the CLI's machine-parsable error line."""
    return {
        EXIT_CONFIG: "config",
        EXIT_PARSE: "parse",
        EXIT_NUMERIC: "numeric",
        EXIT_CONVERGENCE: "convergence",
    }.get(exit_code_for(exc), "error")


@contextmanager
def stage(name: str):
    """Tag any escaping package error with the pipeline stage it came from."""
    try:
        yield
    except MissgraphError as exc:
        if exc.stage is None:
            exc.stage = name
        raise
