"""Exception taxonomy shared by every solver module.

All library errors derive from :class:`OptomechError` so callers can catch one
base class.  The CLI maps :class:`ConfigValidationError` to exit code 2 and
every other :class:`OptomechError` to exit code 3.
"""

from __future__ import annotations


class OptomechError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInputError(OptomechError, ValueError):
    """A physical parameter is out of its valid domain (e.g. d=0)."""


class ConfigurationError(OptomechError):
    """Objects were combined inconsistently (grid mismatch, aperture too small)."""


class NumericalFailureError(OptomechError):
    """An iterative solver failed to converge or a root bracket was lost.

    Carries a human-readable ``report`` describing the residual or the
    suspect interval so the failure can be diagnosed from the message alone.
    """

    def __init__(self, message: str, report: str | None = None):
        super().__init__(message if report is None else f"{message}\n{report}")
        self.report = report


class InfeasibleError(OptomechError):
    """A design target cannot be met by any parameter value (no solution)."""


class ConfigValidationError(OptomechError):
    """Raised by config parsing with the full list of collected errors."""

    def __init__(self, errors: list[str]):
        self.errors = list(errors)
        super().__init__("invalid configuration:\n" + "\n".join(f"  - {e}" for e in self.errors))
