from __future__ import annotations


class DeltakitError(Exception):
    """Base class for every error the toolkit raises on purpose."""

    exit_code = 1


class FormulaSyntaxError(DeltakitError):
    exit_code = 2

    def __init__(self, message: str, *, line: int, column: int) -> None:
        super().__init__(f"{message} (line {line}, column {column})")
        self.message = message
        self.line = line
        self.column = column


class LexicalError(FormulaSyntaxError):
    """Unexpected character in the input text."""


class GrammarError(FormulaSyntaxError):
    """Tokens are fine but do not form a formula."""


class ArityError(FormulaSyntaxError):
    """Wrong number of arguments to d(...)."""


class UnknownSymbolError(FormulaSyntaxError):
    """An identifier that is not a variable of the language."""


class ResourceLimitError(DeltakitError):
    exit_code = 3

    def __init__(self, message: str, *, kind: str) -> None:
        super().__init__(message)
        self.kind = kind


class HullRepairError(ResourceLimitError):
    def __init__(self, message: str) -> None:
        super().__init__(message, kind="hull-repair")


class InconsistentInputError(DeltakitError):
    exit_code = 4


class MalformedSchemeError(DeltakitError):
    exit_code = 1


class PreconditionError(DeltakitError):
    exit_code = 1


class TowerDivisionError(DeltakitError, ZeroDivisionError):
    exit_code = 1
