"""Forward kinematics and the matrix-checking teaching mode.

A joint's transform is its fixed origin offset followed by its motion about or
along its own axis. ``fk_chain`` returns the running prefix products base to
tool; ``fk_pose`` is the last chain entry decomposed, computed through the
same path so the two can never disagree.

``validate_matrices`` grades hand-built matrices against the engine's. Wrong
math never raises: structural problems (bad scale factor, non-zero perspective
row, non-orthonormal rotation block) come back as graded failures with a
reason code. Only malformed input (wrong count, not 4x4) raises.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DomainError, ShapeError
from .model import JointKind, JointSpec, RobotModel, as_joint_vector
from .transforms import (
    Pose,
    compose,
    homogeneous_from,
    pose_from,
    rotation_about,
    rotation_defect,
    translation,
)

__all__ = [
    "DEFAULT_VALIDATE_TOL",
    "STRUCTURE_TOL",
    "MatrixDiff",
    "joint_transform",
    "fk_chain",
    "fk_pose",
    "expected_matrices",
    "validate_matrices",
]

# Grading tolerance for hand-typed matrices; loose because students round.
DEFAULT_VALIDATE_TOL = 1e-3
# Structural checks (bottom row, rotation block) are stricter than grading.
STRUCTURE_TOL = 1e-6


def joint_transform(joint: JointSpec, value: float) -> np.ndarray:
    """Transform contributed by one joint at the given value: origin then motion."""
    v = float(value)
    if not np.isfinite(v):
        raise DomainError(f"joint {joint.name!r} value must be finite")
    if joint.kind is JointKind.REVOLUTE:
        motion = homogeneous_from(rotation_about(joint.axis, v))
    else:
        motion = translation(v * joint.axis)
    return compose(joint.origin, motion)


def fk_chain(model: RobotModel, q) -> tuple[np.ndarray, ...]:
    """Base-frame transforms of every joint frame plus the tool frame.

    Entry k is the pose of joint k's frame (after its motion); the last entry
    appends the tool offset, so the tuple has dof + 1 transforms.
    """
    values = as_joint_vector(model, q)
    frames: list[np.ndarray] = []
    running = None
    for joint, value in zip(model.joints, values):
        step = joint_transform(joint, value)
        running = step if running is None else compose(running, step)
        frames.append(running)
    frames.append(compose(running, model.tool_offset))
    return tuple(frames)


def fk_pose(model: RobotModel, q) -> Pose:
    """Tool pose in the base frame."""
    return pose_from(fk_chain(model, q)[-1])


def expected_matrices(model: RobotModel, q, mode: str = "factors") -> tuple[np.ndarray, ...]:
    """Engine-side reference for validation: per-joint factors or the full product."""
    if mode == "factors":
        values = as_joint_vector(model, q)
        return tuple(joint_transform(j, v) for j, v in zip(model.joints, values))
    if mode == "product":
        return (fk_chain(model, q)[-1],)
    raise DomainError(f"unknown validation mode {mode!r}")


@dataclass(frozen=True)
class MatrixDiff:
    """Grade for one submitted matrix against the engine's reference."""

    index: int
    diff: np.ndarray
    max_abs_error: float
    passed: bool
    reason: str | None


def _structural_reason(m: np.ndarray, tol: float) -> str | None:
    """First structural defect of a submitted transform, or None if well formed.

    The bottom row is typed, not computed, so rounding never touches it: the
    scale and perspective checks are hard gates. Rounding every entry by up to
    ``tol`` can push the rotation block's orthonormality defect to about
    ``6 * tol``, so that gate scales with the grading tolerance.
    """
    if not np.all(np.isfinite(m)):
        return "not_finite"
    if abs(float(m[3, 3]) - 1.0) > STRUCTURE_TOL:
        return "scale_factor_not_one"
    if np.max(np.abs(m[3, :3])) > STRUCTURE_TOL:
        return "perspective_not_zero"
    if rotation_defect(m[:3, :3]) > max(STRUCTURE_TOL, 7.0 * tol):
        return "rotation_not_orthonormal"
    return None


def validate_matrices(
    model: RobotModel,
    q,
    matrices: Sequence,
    mode: str = "factors",
    tolerance: float = DEFAULT_VALIDATE_TOL,
) -> tuple[MatrixDiff, ...]:
    """Grade submitted homogeneous transforms entry by entry.

    ``mode`` "factors" expects one matrix per joint; "product" expects the
    single base-to-tool transform (tool offset included). A matrix passes when
    it is structurally sound and every entry is within ``tolerance`` of the
    engine's value.
    """
    tol = float(tolerance)
    if not np.isfinite(tol) or tol < 0.0:
        raise DomainError(f"tolerance must be a non-negative number, got {tolerance!r}")
    expected = expected_matrices(model, q, mode)
    if len(matrices) != len(expected):
        raise ShapeError(
            f"mode {mode!r} expects {len(expected)} matrices for model "
            f"{model.name!r}, got {len(matrices)}"
        )
    out: list[MatrixDiff] = []
    for index, (submitted, reference) in enumerate(zip(matrices, expected)):
        try:
            m = np.asarray(submitted, dtype=float)
        except (TypeError, ValueError):
            raise ShapeError(f"matrix {index} is not numeric") from None
        if m.shape != (4, 4):
            raise ShapeError(f"matrix {index} has shape {m.shape}, expected (4, 4)")
        reason = _structural_reason(m, tol)
        with np.errstate(invalid="ignore"):
            diff = np.abs(m - reference)
        finite = np.isfinite(diff)
        max_err = float(np.max(diff[finite])) if np.any(finite) else float("inf")
        if not np.all(finite):
            max_err = float("inf")
        diff.flags.writeable = False
        passed = reason is None and max_err <= tol
        out.append(MatrixDiff(index=index, diff=diff, max_abs_error=max_err, passed=passed,
                              reason=reason))
    return tuple(out)
