"""Exception types shared across the package."""

from __future__ import annotations


class SidlError(Exception):
    pass


class ParseError(SidlError):
    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.message = message
        self.line = line
        self.column = column
        where = f" at line {line}, column {column}" if line else ""
        super().__init__(f"{message}{where}")


class InstantiationError(SidlError):
    """A comparison, negation, or effect argument was not ground."""


class DivisionByZero(SidlError):
    pass


class DepthExceeded(SidlError):
    """Proof exceeded the fixed depth limit (runaway recursion)."""


class GameInitError(SidlError):
    def __init__(self, code: str, detail: str):
        self.code = code
        super().__init__(f"{code}: {detail}")


class CommandError(SidlError):
    """Rejected player command; ``code`` is the wire-level error code."""

    def __init__(self, code: str, detail: str = ""):
        self.code = code
        self.detail = detail
        super().__init__(f"{code}: {detail}" if detail else code)


class MalformedLog(SidlError):
    pass


class DivergenceError(SidlError):
    def __init__(self, chronon: int, field: str, detail: str = ""):
        self.chronon = chronon
        self.field = field
        super().__init__(
            f"replay diverged at chronon {chronon} ({field})"
            + (f": {detail}" if detail else "")
        )
