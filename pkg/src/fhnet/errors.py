"""Exception types shared across the package."""
from __future__ import annotations


class FhnetError(Exception):
    """Base class for all package-specific errors."""


class ValidationError(FhnetError):
    """A parameter, partition table, or config entry violates its contract."""


class SolverError(FhnetError):
    """An iterative linear solve failed to converge within its budget."""

    def __init__(self, message: str, residual: float | None = None,
                 iterations: int | None = None):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class BlowUpError(FhnetError):
    """The state left the finite / guarded range during time stepping."""

    def __init__(self, message: str, step: int | None = None,
                 time: float | None = None):
        super().__init__(message)
        self.step = step
        self.time = time
