"""Exception types shared across the package.

Every domain failure raises a subclass of :class:`SitefoldError`; the CLI maps
these to exit status 2 and the HTTP service maps them to 4xx responses.
"""

from __future__ import annotations


class SitefoldError(Exception):
    """Base class for all domain errors."""


class ParseError(SitefoldError):
    """Malformed IR or schema text."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)


class UndeclaredGuardError(SitefoldError):
    """A program guard references a variable missing from the vocabulary."""


class DuplicateVariableError(SitefoldError):
    """Two vocabulary entries share the same (category, name) pair."""


class UnknownVariableError(SitefoldError):
    """A binding or token names a variable outside the vocabulary."""


class AmbiguousTokenError(SitefoldError):
    """An unqualified token matches several categorized variables."""

    def __init__(self, token: str, candidates: list[str]):
        self.token = token
        self.candidates = candidates
        super().__init__(f"token {token!r} is ambiguous: {', '.join(candidates)}")


class InconsistentAssignmentError(SitefoldError):
    """Closure derived both true and false for one variable."""

    def __init__(self, message: str, conflicts: list[str] | None = None):
        self.conflicts = conflicts or []
        super().__init__(message)


class IncompleteAssignmentError(SitefoldError):
    """Total evaluation was asked to run with unbound guard variables."""


class SchemaError(SitefoldError):
    """Invalid site schema (cycle, dangling edge, duplicate label, ...)."""


class RegionError(SitefoldError):
    """Invalid region table or unresolvable map point."""


class CrossReferenceError(SitefoldError):
    """A cascade step emitted a token the cross-reference map cannot place."""
