"""Request bodies for the HTTP API.

Commands form a discriminated union on ``type``; unknown fields are rejected
so client typos surface as 400s instead of silently ignored options. Value
validation beyond shape (limits, modes, branch names) stays in the engine,
which knows the error codes.
"""

from __future__ import annotations

from typing import Annotated, Any, Literal, Union

from pydantic import BaseModel, ConfigDict, Field


class _Command(BaseModel):
    model_config = ConfigDict(extra="forbid")

    # optimistic concurrency: reject unless the session is at this revision
    expected_revision: int | None = None


class SetMode(_Command):
    type: Literal["set_mode"]
    mode: str


class SetJoint(_Command):
    type: Literal["set_joint"]
    joint: int
    value: float


class RequestIK(_Command):
    type: Literal["request_ik"]
    target: list[float] = Field(min_length=3, max_length=3)
    branch: str | None = None
    duration: float = 1.0


class ChooseBranch(_Command):
    type: Literal["choose_branch"]
    branch: str
    duration: float = 1.0


class ValidateMatrices(_Command):
    type: Literal["validate_matrices"]
    matrices: list[Any]
    mode: Literal["factors", "product"] = "factors"
    tolerance: float | None = None


class Reset(_Command):
    type: Literal["reset"]


Command = Annotated[
    Union[SetMode, SetJoint, RequestIK, ChooseBranch, ValidateMatrices, Reset],
    Field(discriminator="type"),
]


class CreateSession(BaseModel):
    model_config = ConfigDict(extra="forbid", protected_namespaces=())

    model: str


def to_session_command(command: _Command) -> dict[str, Any]:
    """Engine-facing dict; absent optionals stay absent so engine defaults apply."""
    return command.model_dump(exclude={"expected_revision"}, exclude_none=True)
