"""Shared exception types."""

from __future__ import annotations


class InvalidInput(ValueError):
    """Raised when an argument violates a documented precondition."""


class NetworkFormatError(InvalidInput):
    """Raised on a malformed network document; carries the offending line."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ConditioningSetTooLarge(RuntimeError):
    """Raised when a conditional test would allocate too many count cells."""


class FamilyTooLarge(RuntimeError):
    """Raised when a child/parent-set count table would exceed the cell budget."""


class BudgetExceeded(RuntimeError):
    """Raised when a parent-set enumeration would exceed the subset budget."""


class PipelineStageError(RuntimeError):
    """Wraps a failure inside a named pipeline stage."""

    def __init__(self, stage: str, cause: BaseException):
        self.stage = stage
        self.cause = cause
        super().__init__(f"stage '{stage}' failed: {cause}")
