"""Exception hierarchy.

Everything deriving from :class:`InputError` is caused by bad user data or
configuration; the CLI maps those to exit status 2.
"""

from __future__ import annotations


class CrosswashError(Exception):
    """Base class for all package errors."""


class InputError(CrosswashError, ValueError):
    """Invalid input data or configuration."""


class ParseError(InputError):
    def __init__(self, path, line: int, column: str | None, text: str, reason: str):
        self.path = str(path)
        self.line = line
        self.column = column
        self.text = text
        self.reason = reason
        where = f"{self.path}:{line}"
        if column:
            where += f" column {column!r}"
        super().__init__(f"{where}: {reason} (got {text!r})")


class ValidationError(InputError):
    pass


class OutOfRangeLevel(ValidationError):
    pass


class DuplicateCode(ValidationError):
    def __init__(self, code: str, where: str = ""):
        self.code = code
        suffix = f" in {where}" if where else ""
        super().__init__(f"duplicate activity code {code!r}{suffix}")


class MissingAttribute(ValidationError):
    def __init__(self, code: str):
        self.code = code
        super().__init__(f"no Link/Contribution attributes for activity {code!r}")


class MissingValue(ValidationError):
    def __init__(self, code: str, criterion: str):
        self.code = code
        self.criterion = criterion
        super().__init__(f"activity {code!r} has no value for criterion {criterion!r}")


class CriteriaMismatch(ValidationError):
    pass
