"""Exception hierarchy.

Input/validation problems derive from :class:`InputError` (CLI exit code 2);
everything else raised by the library derives from :class:`DomainError`
(CLI exit code 1).
"""

from __future__ import annotations


class EvcorefError(Exception):
    """Base class for all library errors."""


class InputError(EvcorefError):
    """Malformed or inconsistent input files."""


class DomainError(EvcorefError):
    """Well-formed input that violates a domain contract."""


class EmptyIdentifier(InputError):
    pass


class ParseError(InputError):
    def __init__(self, message: str, source: str = "<string>", line: int | None = None,
                 column: int | None = None):
        self.source = source
        self.line = line
        self.column = column
        where = source
        if line is not None:
            where += f":{line}"
            if column is not None:
                where += f":{column}"
        super().__init__(f"{where}: {message}")


class SchemaError(InputError):
    def __init__(self, path: str, field: str, message: str):
        self.path = path
        self.field = field
        super().__init__(f"{path}: {field}: {message}")


class DuplicateMentionId(InputError):
    pass


class GoldUniverseMismatch(InputError):
    pass


class DuplicateProfile(InputError):
    pass


class UnknownRoleReference(InputError):
    pass


class UnknownRole(InputError):
    def __init__(self, rule_id: str, role: str, message: str | None = None):
        self.rule_id = rule_id
        self.role = role
        super().__init__(message or f"rule {rule_id}: unknown role {role!r}")


class EmptyConjunction(InputError):
    pass


class MissingLemma(InputError):
    pass


class UnknownEventType(DomainError):
    pass


class UniverseMismatch(DomainError):
    pass


class TooFewMentions(DomainError):
    pass


class TopicMismatch(DomainError):
    pass


class NoEdge(DomainError):
    pass


class UnknownEventTypeWarning(UserWarning):
    """An event's type has no profile; the event is skipped."""


class LegacyRuleWarning(UserWarning):
    """A verbatim-transcribed rule references a role its profile lacks."""
