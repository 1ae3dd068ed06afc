"""Exception hierarchy shared by the trend modules."""

from __future__ import annotations


class TrendError(Exception):
    """Base class for every error raised by this package."""


class SchemaError(TrendError):
    """A declaration list does not form a valid schema."""

    def __init__(self, message: str, decl: object = None):
        super().__init__(message)
        self.decl = decl


class DuplicateName(SchemaError):
    pass


class DanglingReference(SchemaError):
    """A constraint mentions an element that was never declared."""

    def __init__(self, name: str, decl: object = None, message: str | None = None):
        super().__init__(message or f"undeclared element {name!r}", decl)
        self.name = name


class ArityMismatch(SchemaError):
    pass


class InvalidConstraint(SchemaError):
    pass


class UnknownRole(TrendError):
    pass


class UnknownRelationship(TrendError):
    pass


class UnknownElement(TrendError):
    pass


class KindMismatch(TrendError):
    pass


class NotMandatory(TrendError):
    pass


class IllFormedState(TrendError):
    """A temporal state breaks one of its structural invariants."""


class UnknownName(TrendError):
    pass


class ParseError(TrendError):
    """Raised by the text parser; carries every diagnostic found."""

    def __init__(self, diagnostics: list):
        self.diagnostics = list(diagnostics)
        first = self.diagnostics[0] if self.diagnostics else None
        super().__init__(str(first) if first else "parse error")
