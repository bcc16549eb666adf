"""Exception types shared across the engine, CLI and service.

Every error carries a stable ``code`` string; the service uses it verbatim in
wire-level error bodies and the CLI uses it to pick exit codes, so codes are
part of the public contract and must not be renamed casually.
"""

from __future__ import annotations

__all__ = [
    "SimError",
    "DomainError",
    "ShapeError",
    "InvalidRotationError",
    "ModelError",
    "ParseError",
    "ModelValidationError",
    "UnknownModelError",
    "UnsupportedModelError",
    "WrongModeError",
    "UnknownCommandError",
    "UnknownBranchError",
    "InfeasibleBranchError",
    "UnknownSessionError",
    "StaleRevisionError",
]


class SimError(Exception):
    """Base class for all errors raised by this package."""

    code = "error"


class DomainError(SimError, ValueError):
    """A numeric argument is outside the function's domain (non-finite, wrong range)."""

    code = "domain_error"


class ShapeError(SimError, ValueError):
    """An array argument has the wrong shape or length for the model at hand."""

    code = "shape_error"


class InvalidRotationError(DomainError):
    """A matrix offered as a rotation fails orthonormality at the input tolerance."""

    code = "invalid_rotation"


class ModelError(SimError, ValueError):
    """Base class for model-document problems."""

    code = "model_error"


class ParseError(ModelError):
    """The model document is not syntactically valid JSON."""

    code = "model_parse_error"


class ModelValidationError(ModelError):
    """The model document parsed but violates the schema; message names the field."""

    code = "model_invalid"


class UnknownModelError(SimError, LookupError):
    """No model with the requested name exists in the catalog."""

    code = "unknown_model"


class UnsupportedModelError(SimError, ValueError):
    """The model is valid but outside what the closed-form solvers support."""

    code = "unsupported_model"


class WrongModeError(SimError, RuntimeError):
    """The command is not legal in the session's current mode."""

    code = "wrong_mode"


class UnknownCommandError(SimError, ValueError):
    """The command type is not part of the session vocabulary."""

    code = "unknown_command"


class UnknownBranchError(SimError, LookupError):
    """No solution in the current set carries the requested branch label."""

    code = "unknown_branch"


class InfeasibleBranchError(SimError, ValueError):
    """The requested branch exists but violates joint limits."""

    code = "infeasible_branch"


class UnknownSessionError(SimError, LookupError):
    """No live session with the requested id."""

    code = "unknown_session"


class StaleRevisionError(SimError, RuntimeError):
    """The command's expected_revision does not match the session's revision."""

    code = "stale_revision"
