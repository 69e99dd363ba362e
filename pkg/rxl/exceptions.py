"""Exception hierarchy shared by the language, the engine and the concepts."""
from enum import Enum
from typing import Optional


class RxlError(Exception):
    """Base exception for toolkit errors."""

    def __init__(
        self,
        message: str,
        exit_code: int = 1,
        details: dict = None
    ):
        self.message = message
        self.exit_code = exit_code
        self.details = details or {}
        super().__init__(self.message)


class RuntimeErrorKind(str, Enum):
    """Categories of RXL evaluation failures."""
    UNDEFINED_VARIABLE = "UndefinedVariable"
    NOT_CALLABLE = "NotCallable"
    BAD_MEMBER_TARGET = "BadMemberTarget"
    DIVISION_TYPES = "DivisionTypes"  # operand types unsupported by an operator


def _position(line: Optional[int], column: Optional[int]) -> str:
    if line is None:
        return ""
    return f" at {line}:{column}"


class RxlSyntaxError(RxlError):
    """Exception raised when source text does not parse."""

    def __init__(self, message: str, line: int, column: int, details: dict = None):
        super().__init__(
            message=f"Syntax error{_position(line, column)}: {message}",
            details={"line": line, "column": column, **(details or {})}
        )
        self.line = line
        self.column = column


class RxlRuntimeError(RxlError):
    """Exception raised when evaluation fails."""

    def __init__(
        self,
        kind: RuntimeErrorKind,
        message: str,
        line: Optional[int] = None,
        column: Optional[int] = None,
        details: dict = None
    ):
        super().__init__(
            message=f"{kind.value}{_position(line, column)}: {message}",
            details={"kind": kind.value, "line": line, "column": column, **(details or {})}
        )
        self.kind = kind
        self.line = line
        self.column = column


class RewriteError(RxlError):
    """Exception raised when a program cannot be instrumented."""

    def __init__(self, message: str, details: dict = None):
        super().__init__(message=f"Rewrite error: {message}", details=details)


class UsageError(RxlError):
    """Exception raised for invalid command-line usage."""

    def __init__(self, message: str, details: dict = None):
        super().__init__(message=f"Usage error: {message}", exit_code=2, details=details)


class AssertionFailed(RxlError):
    """Exception raised by the ``assert`` built-in."""

    def __init__(self, message: str, details: dict = None):
        super().__init__(message=f"Assertion failed: {message}", details=details)
