#!/usr/bin/env python3
"""
Error Handling Utilities for Qudit GME
======================================

Exception hierarchy, exit-code mapping and the decorator used by the CLI
commands to turn domain errors into logged messages and process exit codes.
"""

import logging
import traceback
import functools
from typing import Any, Callable, Iterable, Optional

import click


EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VALIDATION = 2
EXIT_ORACLE = 3


class QuditError(Exception):
    """Base class for all domain errors."""

    exit_code = EXIT_VALIDATION


class ValidationError(QuditError):
    """Custom exception for validation errors.

    ``failures`` lists the individual checks that did not pass, e.g.
    ``["hermiticity", "trace"]``.
    """

    def __init__(self, message: str, failures: Optional[Iterable[str]] = None):
        super().__init__(message)
        self.failures = list(failures or [])


class DimensionMismatchError(QuditError):
    """Probe vectors, subsets or matrices disagree on local dimensions."""


class CapacityError(QuditError):
    """A configured size cap would be exceeded."""


class BracketError(QuditError):
    """Bisection endpoints have the same detection status."""


class UsageError(QuditError):
    """Invalid combination of command-line arguments."""

    exit_code = EXIT_USAGE


class OracleCheckFailure(QuditError):
    """Reduced and brute-force evaluators disagree beyond tolerance."""

    exit_code = EXIT_ORACLE


class ErrorHandler:
    """Centralized error handling for the command-line surface."""

    def __init__(self):
        self.logger = logging.getLogger(__name__)

    def handle_exception(self, func: Callable) -> Callable:
        """Decorator turning domain exceptions into exit codes."""
        @functools.wraps(func)
        def wrapper(*args, **kwargs):
            try:
                return func(*args, **kwargs)
            except QuditError as e:
                self.log_error(func.__name__, e)
                self.show_error_to_user(str(e), type(e).__name__)
                return e.exit_code
        return wrapper

    def log_error(self, function_name: str, exception: Exception):
        """Log error with detailed information."""
        error_msg = f"Error in {function_name}: {str(exception)}"
        self.logger.error(error_msg)
        self.logger.debug(f"Traceback: {traceback.format_exc()}")

    def show_error_to_user(self, message: str, title: str = "Error"):
        """Show error message to user on stderr."""
        click.echo(f"ERROR - {title}: {message}", err=True)


def validate_input(value: Any, field_name: str, required: bool = True,
                   minimum: Optional[float] = None) -> None:
    """Validate input values."""
    if required and (value is None or value == ""):
        raise UsageError(f"{field_name} is required.")

    if isinstance(value, str) and len(value.strip()) == 0:
        raise UsageError(f"{field_name} cannot be empty.")

    if minimum is not None and isinstance(value, (int, float)) and value < minimum:
        raise UsageError(f"{field_name} must be at least {minimum}.")


# Global error handler instance
error_handler = ErrorHandler()


def handle_errors(func: Callable) -> Callable:
    """Convenience decorator for general error handling."""
    return error_handler.handle_exception(func)
