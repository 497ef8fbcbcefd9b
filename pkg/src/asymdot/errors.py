"""Exception hierarchy shared by the solver, observables and CLI."""

from __future__ import annotations


class AsymDotError(Exception):
    """Base class for all package errors."""


class DomainError(AsymDotError, ValueError):
    """An input lies outside the range where the model is defined."""


class ConfigurationError(AsymDotError, ValueError):
    """A numerical or run configuration is invalid (grid size, presets, flags)."""


class SolverError(AsymDotError, RuntimeError):
    """The eigensolver failed to converge."""

    def __init__(self, message: str, n_points: int, iterations: int | None = None):
        super().__init__(f"{message} (grid points={n_points}, iterations={iterations})")
        self.n_points = n_points
        self.iterations = iterations


class InfeasibleDesignError(AsymDotError):
    """No parameter choice satisfies the design constraints.

    ``violations`` lists the rules that failed, in the order encountered.
    """

    def __init__(self, message: str, violations: list[str] | None = None):
        super().__init__(message)
        self.violations = list(violations or [])
