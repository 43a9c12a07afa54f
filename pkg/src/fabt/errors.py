"""Exception types raised across the toolkit."""
from __future__ import annotations


class FabtError(Exception):
    pass


class TypeCheckError(FabtError):
    """A source term (or context) is ill-typed.

    ``path`` lists the child positions from the root to the offending subterm.
    """

    def __init__(self, msg: str, path=(), expected=None, actual=None):
        self.msg = msg
        self.path = tuple(path)
        self.expected = expected
        self.actual = actual
        where = "/".join(self.path) or "<root>"
        super().__init__(f"{msg} at {where}")


class ScopeError(FabtError):
    def __init__(self, msg: str, names=()):
        self.names = tuple(sorted(names))
        super().__init__(msg)


class StuckError(FabtError):
    """Evaluation reached a non-value with no applicable rule (ill-typed source)."""


class ParseError(FabtError):
    def __init__(self, msg: str, line: int, col: int, expected=()):
        self.line = line
        self.col = col
        self.expected = tuple(sorted(set(expected)))
        exp = f" (expected one of: {', '.join(self.expected)})" if self.expected else ""
        super().__init__(f"{line}:{col}: {msg}{exp}")
