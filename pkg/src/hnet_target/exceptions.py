# hnet_target/exceptions.py

from __future__ import annotations

from typing import Any, Dict, Optional


# ---------------------------------------------------------------------------
# Base exceptions
# ---------------------------------------------------------------------------


class HNetError(Exception):
    """Base exception for all hnet_target errors."""


class ShapeError(HNetError):
    """
    Raised when an array does not have the shape an operation needs.

    Attributes:
        expected: Human-readable description of the expected shape.
        actual: The shape that was received.
    """

    def __init__(self, message: str, *, expected: str = "", actual: Any = None) -> None:
        self.expected = expected
        self.actual = actual
        self.message = message
        super().__init__(self.__str__())

    def __str__(self) -> str:
        base = self.message
        if self.expected:
            base += f" (expected {self.expected}, got {self.actual!r})"
        return base


class ConfigurationError(HNetError):
    """
    Raised for invalid experiment / dataset / training configuration.

    Attributes:
        details: Optional structured details (e.g. pydantic error list).
    """

    def __init__(
        self,
        message: str,
        *,
        details: Optional[Dict[str, Any]] = None,
    ) -> None:
        self.message = message
        self.details = details or {}
        super().__init__(message)
