"""Rigid-body transform algebra: axis rotations and 4x4 homogeneous transforms.

Conventions used throughout the engine:

* Row-major matrices acting on column vectors, so in ``compose(a, b)`` the
  right-hand transform is applied first when mapping a point.
* Angles are radians everywhere; degrees exist only at the CLI boundary.
* Euler angles follow the z-y-x convention, ``rot_z(a) @ rot_y(b) @ rot_x(g)``,
  with the middle angle kept in [-pi/2, pi/2].
* The bottom row of a homogeneous transform is assigned, never computed, so
  every transform built here carries a bit-exact [0, 0, 0, 1] row.

Constructors return read-only float64 arrays and every function is pure, which
makes the values safe to share across sessions and threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DomainError, InvalidRotationError, ShapeError

__all__ = [
    "ROTATION_INPUT_TOL",
    "ROTATION_OUTPUT_TOL",
    "IDENTITY3",
    "IDENTITY4",
    "ZERO3",
    "EulerZYX",
    "Pose",
    "as_vec3",
    "rot_x",
    "rot_y",
    "rot_z",
    "rotation_about",
    "rotation_from_euler_zyx",
    "euler_zyx_from",
    "translation",
    "homogeneous_from",
    "compose",
    "invert",
    "apply",
    "rotation_of",
    "translation_of",
    "pose_from",
    "rotation_defect",
    "is_rotation",
    "ensure_rotation",
]

# Hand-typed matrices (validation mode, CLI input) get the loose tolerance;
# engine-built rotations are held to the tight one.
ROTATION_INPUT_TOL = 1e-6
ROTATION_OUTPUT_TOL = 1e-9

_GIMBAL_TOL = 1e-9


def _frozen(array: np.ndarray) -> np.ndarray:
    array.flags.writeable = False
    return array


IDENTITY3 = _frozen(np.eye(3))
IDENTITY4 = _frozen(np.eye(4))
ZERO3 = _frozen(np.zeros(3))


def as_vec3(value, what: str = "vector") -> np.ndarray:
    """Coerce to a read-only finite float64 3-vector."""
    v = np.array(value, dtype=float, copy=True)
    if v.shape != (3,):
        raise ShapeError(f"{what} must have 3 components, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise DomainError(f"{what} must be finite")
    return _frozen(v)


def _finite_angle(angle: float) -> float:
    angle = float(angle)
    if not math.isfinite(angle):
        raise DomainError(f"angle must be finite, got {angle}")
    return angle


def rot_x(angle: float) -> np.ndarray:
    """Rotation about the x axis; positive turns y toward z."""
    a = _finite_angle(angle)
    c, s = math.cos(a), math.sin(a)
    return _frozen(np.array([
        [1.0, 0.0, 0.0],
        [0.0, c, -s],
        [0.0, s, c],
    ]))


def rot_y(angle: float) -> np.ndarray:
    """Rotation about the y axis; positive turns z toward x."""
    a = _finite_angle(angle)
    c, s = math.cos(a), math.sin(a)
    return _frozen(np.array([
        [c, 0.0, s],
        [0.0, 1.0, 0.0],
        [-s, 0.0, c],
    ]))


def rot_z(angle: float) -> np.ndarray:
    """Rotation about the z axis; positive turns x toward y."""
    a = _finite_angle(angle)
    c, s = math.cos(a), math.sin(a)
    return _frozen(np.array([
        [c, -s, 0.0],
        [s, c, 0.0],
        [0.0, 0.0, 1.0],
    ]))


def rotation_about(axis, angle: float) -> np.ndarray:
    """Rotation about an arbitrary unit axis, right-hand rule (Rodrigues form)."""
    a = as_vec3(axis, "axis")
    norm = float(np.linalg.norm(a))
    if abs(norm - 1.0) > ROTATION_OUTPUT_TOL:
        raise DomainError(f"axis not unit (norm {norm:.12g})")
    ang = _finite_angle(angle)
    x, y, z = (float(a[0]), float(a[1]), float(a[2]))
    c, s = math.cos(ang), math.sin(ang)
    t = 1.0 - c
    return _frozen(np.array([
        [t * x * x + c, t * x * y - s * z, t * x * z + s * y],
        [t * x * y + s * z, t * y * y + c, t * y * z - s * x],
        [t * x * z - s * y, t * y * z + s * x, t * z * z + c],
    ]))


def rotation_from_euler_zyx(alpha: float, beta: float, gamma: float) -> np.ndarray:
    """Compose z-y-x euler angles into a rotation: rot_z @ rot_y @ rot_x."""
    return _frozen(rot_z(alpha) @ rot_y(beta) @ rot_x(gamma))


class EulerZYX(NamedTuple):
    """z-y-x euler angles in radians plus a gimbal-singularity flag."""

    alpha: float
    beta: float
    gamma: float
    singular: bool = False


def euler_zyx_from(rotation) -> EulerZYX:
    """Extract z-y-x euler angles, beta in [-pi/2, pi/2].

    At the gimbal singularity (cos beta below 1e-9) only the sum or difference
    of alpha and gamma is determined; the convention here zeroes gamma, folds
    everything into alpha, and sets the singular flag.
    """
    r = _as_rotation(rotation)
    ensure_rotation(r, tol=ROTATION_INPUT_TOL)
    cos_beta = math.hypot(float(r[0, 0]), float(r[1, 0]))
    if cos_beta < _GIMBAL_TOL:
        if float(r[2, 0]) < 0.0:
            beta = math.pi / 2.0
            alpha = math.atan2(float(r[1, 2]), float(r[1, 1]))
        else:
            beta = -math.pi / 2.0
            alpha = math.atan2(-float(r[1, 2]), float(r[1, 1]))
        return EulerZYX(alpha, beta, 0.0, True)
    alpha = math.atan2(float(r[1, 0]), float(r[0, 0]))
    beta = math.atan2(-float(r[2, 0]), cos_beta)
    gamma = math.atan2(float(r[2, 1]), float(r[2, 2]))
    return EulerZYX(alpha, beta, gamma, False)


def translation(offset) -> np.ndarray:
    """Homogeneous transform that translates by ``offset``."""
    t = np.eye(4)
    t[:3, 3] = as_vec3(offset, "translation")
    return _frozen(t)


def homogeneous_from(rotation, position=ZERO3) -> np.ndarray:
    """Assemble a homogeneous transform from a rotation block and a position.

    The rotation is checked at the input tolerance (1e-6); the perspective row
    and scale factor are set outright, so the result's bottom row is exact.
    """
    r = _as_rotation(rotation)
    ensure_rotation(r, tol=ROTATION_INPUT_TOL)
    t = np.eye(4)
    t[:3, :3] = r
    t[:3, 3] = as_vec3(position, "position")
    return _frozen(t)


def compose(*transforms) -> np.ndarray:
    """Chain homogeneous transforms; the rightmost is applied to points first.

    Inputs are trusted to be valid transforms (shape is still checked); the
    bottom row of the product is reassigned, keeping it bit-exact.
    """
    if not transforms:
        return IDENTITY4
    mats = [_as_transform(t) for t in transforms]
    out = mats[0]
    for m in mats[1:]:
        out = out @ m
    if out is mats[0]:
        out = out.copy()
    out[3, :] = (0.0, 0.0, 0.0, 1.0)
    return _frozen(out)


def invert(transform) -> np.ndarray:
    """Closed-form inverse: transpose the rotation block, counter-rotate the position."""
    m = _as_transform(transform)
    rt = m[:3, :3].T
    out = np.eye(4)
    out[:3, :3] = rt
    out[:3, 3] = -(rt @ m[:3, 3])
    return _frozen(out)


def apply(transform, point) -> np.ndarray:
    """Map a 3-point through a homogeneous transform."""
    m = _as_transform(transform)
    p = as_vec3(point, "point")
    return _frozen(m[:3, :3] @ p + m[:3, 3])


def rotation_of(transform) -> np.ndarray:
    """The 3x3 rotation block, as a read-only copy."""
    return _frozen(_as_transform(transform)[:3, :3].copy())


def translation_of(transform) -> np.ndarray:
    """The position column, as a read-only copy."""
    return _frozen(_as_transform(transform)[:3, 3].copy())


@dataclass(frozen=True, eq=False)
class Pose:
    """Position plus orientation of a frame, with the orientation also as euler angles."""

    position: np.ndarray
    rotation: np.ndarray
    euler_zyx: EulerZYX


def pose_from(transform) -> Pose:
    """Decompose a homogeneous transform into a Pose."""
    m = _as_transform(transform)
    r = _frozen(m[:3, :3].copy())
    return Pose(_frozen(m[:3, 3].copy()), r, euler_zyx_from(r))


def rotation_defect(rotation) -> float:
    """How far a matrix is from a proper rotation: orthonormality and det residuals."""
    r = _as_rotation(rotation)
    ortho = float(np.max(np.abs(r.T @ r - np.eye(3))))
    det = abs(float(np.linalg.det(r)) - 1.0)
    return max(ortho, det)


def is_rotation(rotation, tol: float = ROTATION_OUTPUT_TOL) -> bool:
    """Whether the matrix is a proper rotation within ``tol``."""
    r = np.asarray(rotation, dtype=float)
    if r.shape != (3, 3) or not np.all(np.isfinite(r)):
        return False
    return rotation_defect(r) <= tol


def ensure_rotation(rotation, tol: float = ROTATION_INPUT_TOL, what: str = "rotation") -> None:
    """Raise InvalidRotationError unless the matrix is a proper rotation within ``tol``."""
    r = _as_rotation(rotation)
    if not np.all(np.isfinite(r)):
        raise InvalidRotationError(f"{what} must be finite")
    defect = rotation_defect(r)
    if defect > tol:
        raise InvalidRotationError(
            f"{what} is not orthonormal within {tol:g} (defect {defect:.3g})"
        )


def _as_rotation(value) -> np.ndarray:
    r = np.asarray(value, dtype=float)
    if r.shape != (3, 3):
        raise ShapeError(f"expected a 3x3 rotation, got shape {r.shape}")
    return r


def _as_transform(value) -> np.ndarray:
    m = np.asarray(value, dtype=float)
    if m.shape != (4, 4):
        raise ShapeError(f"expected a 4x4 transform, got shape {m.shape}")
    return m
