"""Exception hierarchy shared by the engine modules."""

from __future__ import annotations


class ExconError(Exception):
    """Base class for every error raised by the engine."""


class CatalogError(ExconError):
    """Schema-level problem: duplicate or unknown names, cycles, dangling references."""


class DuplicateNameError(CatalogError):
    pass


class UnknownNameError(CatalogError):
    pass


class CycleError(CatalogError):
    pass


class InUseError(CatalogError):
    """Refused removal of something still referenced."""


class DomainValueError(ExconError):
    """A value does not conform to its column's value domain."""


class StoreError(ExconError):
    """Row/session level problem unrelated to constraint semantics."""


class ConstraintRejected(ExconError):
    """An add or delete request refused by the registry.

    ``message`` is the user-facing text, byte-exact.
    """

    def __init__(self, message: str, check: str | None = None):
        super().__init__(message)
        self.message = message
        self.check = check


class SaveRejected(ExconError):
    """A save cancelled by the before-update pipeline or the totality check."""

    def __init__(self, outcome):
        super().__init__(outcome.violation.message)
        self.outcome = outcome

    @property
    def message(self) -> str:
        return self.outcome.violation.message


class ParseError(ExconError):
    """One or more syntax errors; ``errors`` holds (line, column, text) triples."""

    def __init__(self, errors: list[tuple[int, int, str]]):
        self.errors = list(errors)
        super().__init__("\n".join(f"{ln}:{col}: {msg}" for ln, col, msg in self.errors))
