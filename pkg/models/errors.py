"""Exception hierarchy shared by the algebra, simulation and protocol models."""
from __future__ import annotations

from typing import Any


class MerminError(Exception):
    """Base class for every domain error raised by the models package."""

    code = "mermin_error"

    def __init__(self, message: str, **details: Any):
        super().__init__(message)
        self.message = message
        self.details = details

    def to_dict(self) -> dict:
        """Machine-readable form used by the CLI error channel."""
        payload = {"error": self.code, "message": self.message}
        if self.details:
            payload["details"] = self.details
        return payload


class MalformedSystemError(MerminError):
    code = "malformed_system"


class DomainError(MerminError):
    code = "domain_error"


class InvalidRetractionError(MerminError):
    code = "invalid_retraction"


class ResourceBoundError(MerminError):
    """Raised when an enumeration or state vector would exceed its configured bound."""

    code = "resource_bound"

    def __init__(self, message: str, *, bound: int, requested: int | None = None, partial: Any = None):
        super().__init__(message, bound=bound, requested=requested, partial=partial)
        self.bound = bound
        self.requested = requested
        self.partial = partial


class ArityError(MerminError):
    code = "arity_error"


class BasisError(MerminError):
    code = "basis_error"


class NotAWitnessError(MerminError):
    code = "not_a_witness"


class ScenarioConstraintError(MerminError):
    """A scenario row whose phase sum is not a classical point."""

    code = "scenario_constraint"

    def __init__(self, message: str, *, rows: list[int]):
        super().__init__(message, rows=list(rows))
        self.rows = list(rows)


class InvalidInputError(MerminError):
    code = "invalid_input"


class ConfigError(MerminError):
    code = "config_error"
