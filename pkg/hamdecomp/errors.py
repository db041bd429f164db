#!/usr/bin/env python
"""Custom exceptions for hamdecomp.

Every error raised by the library derives from :class:`HamDecompError`, which
carries an optional context string rendered on a second line. Search budget
exhaustion is never an exception; it is reported as
:attr:`hamdecomp.hamilton.SearchStatus.INDETERMINATE`.
"""

from typing import Any, Dict, Optional


class HamDecompError(Exception):
    """Base exception for hamdecomp errors.

    Args:
        message: The error message.
        context: Optional additional context about the error.

    Attributes:
        message: The error message.
        context: Additional context information.
    """

    def __init__(self, message: str, context: Optional[str] = None):
        """Initialize the HamDecompError.

        Args:
            message: The error message.
            context: Optional additional context about the error.
        """
        self.message = message
        self.context = context
        super().__init__(self.message)

    def __str__(self) -> str:
        """Return string representation of the error.

        Returns:
            Formatted error message with optional context.
        """
        if self.context:
            return f"{self.message}\nContext: {self.context}"
        return self.message


class GraphError(HamDecompError):
    """Invalid graph construction or operation (loops, underflow, bad vertex)."""


class GraphParseError(GraphError):
    """Malformed edge-list input.

    Args:
        message: What is wrong with the line.
        line_number: 1-based line number in the input.
    """

    def __init__(self, message: str, line_number: int):
        self.line_number = line_number
        super().__init__(message, context=f"line {line_number}")


class DegreeError(GraphError):
    """A degree precondition does not hold at some vertex."""

    def __init__(self, message: str, vertex: Optional[int] = None):
        self.vertex = vertex
        super().__init__(message, context=None if vertex is None else f"vertex {vertex}")


class InfeasibleError(HamDecompError):
    """A requested structure (k-factor, perfect matching) does not exist.

    Args:
        message: Description of the infeasibility.
        witness: JSON-friendly certificate of infeasibility.
    """

    def __init__(self, message: str, witness: Optional[Dict[str, Any]] = None):
        self.witness = witness or {}
        super().__init__(message, context=str(self.witness) if self.witness else None)


class StageFailure(HamDecompError):
    """A pipeline stage could not complete.

    Args:
        stage: Stage name (``split``, ``expander``, ``almost-decompose``, ...).
        message: What went wrong.
        detail: JSON-friendly data describing the failure.
    """

    def __init__(self, stage: str, message: str, detail: Optional[Dict[str, Any]] = None):
        self.stage = stage
        self.detail = detail or {}
        super().__init__(message, context=f"stage {stage}")


class ConfigError(HamDecompError):
    """Invalid configuration values or configuration file."""
