"""
Error hierarchy for the waveguide cavity package.

Every error knows the process exit code the CLI should use and can render
itself as a JSON-ready dict:
- 2: invalid configuration or a method used outside its validity domain
- 3: numerical failure (non-finite state, overflow, root bracketing)
- 4: cross-method tolerance failure reported by ``compare``
"""

from __future__ import annotations

from typing import Any


class CavityError(Exception):
    """Base class for all package errors."""

    exit_code = 1
    kind = "error"

    def __init__(self, message: str, **details: Any):
        super().__init__(message)
        self.message = message
        self.details = details

    def to_dict(self) -> dict[str, Any]:
        payload: dict[str, Any] = {"error": self.kind, "message": self.message}
        if self.details:
            payload["details"] = {k: _jsonable(v) for k, v in self.details.items()}
        return payload


class ConfigurationError(CavityError, ValueError):
    """Invalid parameters, unknown presets, malformed config documents."""

    exit_code = 2
    kind = "configuration"


class MethodValidityError(CavityError, ValueError):
    """A solution method was requested outside the regime where it is valid."""

    exit_code = 2
    kind = "method_validity"


class NumericalFailure(CavityError, RuntimeError):
    """The numerics produced a non-finite or otherwise unusable result."""

    exit_code = 3
    kind = "numerical"


class NumericalRangeError(NumericalFailure):
    """Transfer-matrix entries exceeded the configured norm bound."""

    kind = "numerical_range"


class RootFindingError(NumericalFailure):
    """A pole branch could not be bracketed or refined."""

    kind = "root_finding"


class DegenerateParametersError(NumericalFailure):
    """The cubic main-pole selection is ambiguous for these parameters."""

    kind = "degenerate_parameters"


class ToleranceFailure(CavityError):
    """Cross-method distances exceeded the regime tolerance."""

    exit_code = 4
    kind = "tolerance"


def _jsonable(value: Any) -> Any:
    if isinstance(value, (str, int, float, bool)) or value is None:
        return value
    if isinstance(value, complex):
        return [value.real, value.imag]
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    return str(value)


__all__ = [
    "CavityError",
    "ConfigurationError",
    "MethodValidityError",
    "NumericalFailure",
    "NumericalRangeError",
    "RootFindingError",
    "DegenerateParametersError",
    "ToleranceFailure",
]
