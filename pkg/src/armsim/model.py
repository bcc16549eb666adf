"""Robot model documents: schema, validation, and the in-memory model type.

A model document is strict JSON: unknown fields are rejected anywhere in the
tree and validation messages name the offending field. The in-memory model
keeps the raw numbers alongside the derived transforms so that
``load_model(serialize_model(m))`` reproduces ``m`` exactly.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import Any, Mapping

import numpy as np

from .errors import DomainError, ModelValidationError, ParseError, ShapeError
from .transforms import as_vec3, compose, rotation_from_euler_zyx, homogeneous_from

__all__ = [
    "JointKind",
    "Family",
    "SolverFamily",
    "JointSpec",
    "IKBinding",
    "RobotModel",
    "load_model",
    "serialize_model",
    "as_joint_vector",
    "clamp",
    "DEFAULT_PRISMATIC_STROKE",
]

# Stroke used when a prismatic joint's document omits limits.
DEFAULT_PRISMATIC_STROKE = 0.5


class JointKind(str, Enum):
    REVOLUTE = "revolute"
    PRISMATIC = "prismatic"


class Family(str, Enum):
    """Workspace family tag carried by a model."""

    CARTESIAN = "cartesian"
    CYLINDRICAL = "cylindrical"
    SPHERICAL = "spherical"
    SCARA = "scara"
    ARTICULATED = "articulated"
    CUSTOM = "custom"


class SolverFamily(str, Enum):
    """Families the closed-form inverse solvers understand."""

    CARTESIAN = "cartesian"
    CYLINDRICAL = "cylindrical"
    SPHERICAL = "spherical"
    SCARA = "scara"
    ARTICULATED = "articulated"


# Joint-kind pattern each solver family expects among its bound joints.
_BINDING_KIND_PATTERNS: dict[SolverFamily, tuple[JointKind, ...]] = {
    SolverFamily.CYLINDRICAL: (JointKind.REVOLUTE, JointKind.PRISMATIC, JointKind.PRISMATIC),
    SolverFamily.SPHERICAL: (JointKind.REVOLUTE, JointKind.REVOLUTE, JointKind.PRISMATIC),
    SolverFamily.SCARA: (JointKind.REVOLUTE, JointKind.REVOLUTE, JointKind.PRISMATIC),
}


@dataclass(frozen=True, eq=False)
class JointSpec:
    """One joint: motion axis, fixed origin offset from the previous frame, limits."""

    name: str
    kind: JointKind
    axis: np.ndarray
    origin_xyz: np.ndarray
    origin_rpy: np.ndarray
    origin: np.ndarray  # 4x4 transform derived from origin_xyz/origin_rpy
    limits: tuple[float, float]
    home: float


@dataclass(frozen=True, eq=False)
class IKBinding:
    """Which chain prefix the inverse solver controls, and with which geometry."""

    family: SolverFamily
    joint_names: tuple[str, ...]
    indices: tuple[int, ...]


@dataclass(frozen=True, eq=False)
class RobotModel:
    """A validated serial manipulator: joints root to tip, plus the tool offset."""

    name: str
    family: Family
    joints: tuple[JointSpec, ...]
    tool_xyz: np.ndarray
    tool_rpy: np.ndarray
    tool_offset: np.ndarray
    ik_binding: IKBinding | None

    @property
    def dof(self) -> int:
        return len(self.joints)

    @cached_property
    def home_q(self) -> np.ndarray:
        q = np.array([j.home for j in self.joints], dtype=float)
        q.flags.writeable = False
        return q

    @cached_property
    def lower(self) -> np.ndarray:
        lo = np.array([j.limits[0] for j in self.joints], dtype=float)
        lo.flags.writeable = False
        return lo

    @cached_property
    def upper(self) -> np.ndarray:
        hi = np.array([j.limits[1] for j in self.joints], dtype=float)
        hi.flags.writeable = False
        return hi

    def joint_index(self, name: str) -> int:
        for i, j in enumerate(self.joints):
            if j.name == name:
                return i
        raise ModelValidationError(f"no joint named {name!r}")


def _fail(path: str, message: str) -> ModelValidationError:
    return ModelValidationError(f"{path}: {message}")


def _require_mapping(value: Any, path: str) -> Mapping[str, Any]:
    if not isinstance(value, Mapping):
        raise _fail(path, f"expected an object, got {type(value).__name__}")
    return value


def _reject_unknown(doc: Mapping[str, Any], allowed: set[str], path: str) -> None:
    unknown = sorted(set(doc) - allowed)
    if unknown:
        raise _fail(path, f"unknown field(s) {', '.join(unknown)}")


def _require_str(doc: Mapping[str, Any], key: str, path: str) -> str:
    if key not in doc:
        raise _fail(path, f"missing required field {key!r}")
    value = doc[key]
    if not isinstance(value, str) or not value:
        raise _fail(f"{path}.{key}", "expected a non-empty string")
    return value


def _number_list(value: Any, n: int, path: str) -> list[float]:
    if not isinstance(value, (list, tuple)) or len(value) != n:
        raise _fail(path, f"expected a list of {n} numbers")
    out = []
    for i, x in enumerate(value):
        if isinstance(x, bool) or not isinstance(x, (int, float)):
            raise _fail(f"{path}[{i}]", "expected a number")
        if not math.isfinite(x):
            raise _fail(f"{path}[{i}]", "must be finite")
        out.append(float(x))
    return out


def _number(value: Any, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise _fail(path, "expected a number")
    if not math.isfinite(value):
        raise _fail(path, "must be finite")
    return float(value)


def _parse_offset(doc: Any, path: str) -> tuple[np.ndarray, np.ndarray]:
    """Parse an {xyz, rpy_zyx} block, both parts optional."""
    mapping = _require_mapping(doc, path)
    _reject_unknown(mapping, {"xyz", "rpy_zyx"}, path)
    xyz = _number_list(mapping.get("xyz", [0.0, 0.0, 0.0]), 3, f"{path}.xyz")
    rpy = _number_list(mapping.get("rpy_zyx", [0.0, 0.0, 0.0]), 3, f"{path}.rpy_zyx")
    return as_vec3(xyz), as_vec3(rpy)


def _offset_transform(xyz: np.ndarray, rpy: np.ndarray) -> np.ndarray:
    return homogeneous_from(rotation_from_euler_zyx(*rpy), xyz)


def _parse_joint(doc: Any, index: int) -> JointSpec:
    path = f"joints[{index}]"
    mapping = _require_mapping(doc, path)
    _reject_unknown(mapping, {"name", "kind", "axis", "origin", "limits", "home"}, path)
    name = _require_str(mapping, "name", path)
    kind_raw = _require_str(mapping, "kind", path)
    try:
        kind = JointKind(kind_raw)
    except ValueError:
        raise _fail(f"{path}.kind", f"unknown joint kind {kind_raw!r}") from None

    axis_list = _number_list(mapping.get("axis"), 3, f"{path}.axis") if "axis" in mapping \
        else None
    if axis_list is None:
        raise _fail(path, "missing required field 'axis'")
    axis = as_vec3(axis_list)
    norm = float(np.linalg.norm(axis))
    if abs(norm - 1.0) > 1e-9:
        raise _fail(f"{path}.axis", f"axis not unit (norm {norm:.12g})")

    if "origin" in mapping:
        origin_xyz, origin_rpy = _parse_offset(mapping["origin"], f"{path}.origin")
    else:
        origin_xyz, origin_rpy = as_vec3([0.0, 0.0, 0.0]), as_vec3([0.0, 0.0, 0.0])

    if "limits" in mapping:
        lo, hi = _number_list(mapping["limits"], 2, f"{path}.limits")
        if lo > hi:
            raise _fail(f"{path}.limits", f"min {lo:g} exceeds max {hi:g}")
    elif kind is JointKind.REVOLUTE:
        lo, hi = -math.pi, math.pi
    else:
        lo, hi = 0.0, DEFAULT_PRISMATIC_STROKE

    if "home" in mapping:
        home = _number(mapping["home"], f"{path}.home")
        if not (lo <= home <= hi):
            raise _fail(f"{path}.home", f"home {home:g} outside limits [{lo:g}, {hi:g}]")
    else:
        home = min(max(0.0, lo), hi)

    return JointSpec(
        name=name,
        kind=kind,
        axis=axis,
        origin_xyz=origin_xyz,
        origin_rpy=origin_rpy,
        origin=_offset_transform(origin_xyz, origin_rpy),
        limits=(lo, hi),
        home=home,
    )


def _parse_binding(doc: Any, joints: tuple[JointSpec, ...]) -> IKBinding:
    path = "ik_binding"
    mapping = _require_mapping(doc, path)
    _reject_unknown(mapping, {"family", "joints"}, path)
    family_raw = _require_str(mapping, "family", path)
    try:
        family = SolverFamily(family_raw)
    except ValueError:
        raise _fail(f"{path}.family", f"unknown solver family {family_raw!r}") from None

    names_raw = mapping.get("joints")
    if not isinstance(names_raw, (list, tuple)) or not names_raw:
        raise _fail(f"{path}.joints", "expected a non-empty list of joint names")
    names: list[str] = []
    indices: list[int] = []
    by_name = {j.name: i for i, j in enumerate(joints)}
    for k, raw in enumerate(names_raw):
        if not isinstance(raw, str):
            raise _fail(f"{path}.joints[{k}]", "expected a joint name")
        if raw not in by_name:
            raise _fail(f"{path}.joints[{k}]", f"no joint named {raw!r}")
        if raw in names:
            raise _fail(f"{path}.joints[{k}]", f"joint {raw!r} listed twice")
        names.append(raw)
        indices.append(by_name[raw])

    if tuple(indices) != tuple(range(len(indices))):
        raise _fail(f"{path}.joints", "bound joints must be the chain prefix, in chain order")

    count = len(indices)
    if family is SolverFamily.CARTESIAN:
        if not 1 <= count <= 3:
            raise _fail(f"{path}.joints", f"cartesian binding takes 1 to 3 joints, got {count}")
        bad = [joints[i].name for i in indices if joints[i].kind is not JointKind.PRISMATIC]
        if bad:
            raise _fail(f"{path}.joints", f"cartesian binding requires prismatic joints; {bad[0]!r} is not")
    elif family is SolverFamily.ARTICULATED:
        if count not in (2, 3):
            raise _fail(f"{path}.joints", f"articulated binding takes 2 or 3 joints, got {count}")
        bad = [joints[i].name for i in indices if joints[i].kind is not JointKind.REVOLUTE]
        if bad:
            raise _fail(f"{path}.joints", f"articulated binding requires revolute joints; {bad[0]!r} is not")
    else:
        pattern = _BINDING_KIND_PATTERNS[family]
        if count != 3:
            raise _fail(f"{path}.joints", f"{family.value} binding takes exactly 3 joints, got {count}")
        for slot, (idx, want) in enumerate(zip(indices, pattern)):
            if joints[idx].kind is not want:
                raise _fail(
                    f"{path}.joints[{slot}]",
                    f"{family.value} binding expects a {want.value} joint here",
                )

    return IKBinding(family=family, joint_names=tuple(names), indices=tuple(indices))


def _check_family_signature(family: Family, joints: tuple[JointSpec, ...]) -> None:
    """The family tag must agree with the kind sequence of the leading joints."""
    if family is Family.CUSTOM:
        return
    kinds = tuple(j.kind for j in joints)
    r, p = JointKind.REVOLUTE, JointKind.PRISMATIC
    expectations: dict[Family, tuple[JointKind, ...]] = {
        Family.CARTESIAN: (p,) * min(3, len(kinds)),
        Family.CYLINDRICAL: (r, p, p),
        Family.SPHERICAL: (r, r, p),
        Family.SCARA: (r, r, p),
        Family.ARTICULATED: (r,) * min(3, len(kinds)),
    }
    want = expectations[family]
    if len(kinds) < len(want) or kinds[: len(want)] != want:
        got = "".join("R" if k is r else "P" for k in kinds)
        want_s = "".join("R" if k is r else "P" for k in want)
        raise _fail(
            "family",
            f"family {family.value!r} expects leading joints {want_s}, document has {got}",
        )


def load_model(document: str | bytes | Mapping[str, Any]) -> RobotModel:
    """Parse and validate a model document (JSON text or an already-parsed mapping)."""
    if isinstance(document, (str, bytes)):
        try:
            doc = json.loads(document)
        except json.JSONDecodeError as exc:
            raise ParseError(f"model document is not valid JSON: {exc}") from exc
    else:
        doc = document
    mapping = _require_mapping(doc, "document")
    _reject_unknown(mapping, {"name", "family", "tool_offset", "joints", "ik_binding"}, "document")

    name = _require_str(mapping, "name", "document")
    family_raw = mapping.get("family", Family.CUSTOM.value)
    if not isinstance(family_raw, str):
        raise _fail("family", "expected a string")
    try:
        family = Family(family_raw)
    except ValueError:
        raise _fail("family", f"unknown family {family_raw!r}") from None

    joints_raw = mapping.get("joints")
    if not isinstance(joints_raw, (list, tuple)) or not joints_raw:
        raise _fail("joints", "expected a non-empty list of joints")
    joints = tuple(_parse_joint(j, i) for i, j in enumerate(joints_raw))
    seen: set[str] = set()
    for i, j in enumerate(joints):
        if j.name in seen:
            raise _fail(f"joints[{i}].name", f"duplicate joint name {j.name!r}")
        seen.add(j.name)

    if "tool_offset" in mapping:
        tool_xyz, tool_rpy = _parse_offset(mapping["tool_offset"], "tool_offset")
    else:
        tool_xyz, tool_rpy = as_vec3([0.0, 0.0, 0.0]), as_vec3([0.0, 0.0, 0.0])

    _check_family_signature(family, joints)

    binding = _parse_binding(mapping["ik_binding"], joints) if "ik_binding" in mapping else None

    return RobotModel(
        name=name,
        family=family,
        joints=joints,
        tool_xyz=tool_xyz,
        tool_rpy=tool_rpy,
        tool_offset=_offset_transform(tool_xyz, tool_rpy),
        ik_binding=binding,
    )


def serialize_model(model: RobotModel) -> dict[str, Any]:
    """Canonical document for a model; load_model(serialize_model(m)) == m exactly."""
    doc: dict[str, Any] = {
        "name": model.name,
        "family": model.family.value,
        "tool_offset": {
            "xyz": [float(x) for x in model.tool_xyz],
            "rpy_zyx": [float(x) for x in model.tool_rpy],
        },
        "joints": [
            {
                "name": j.name,
                "kind": j.kind.value,
                "axis": [float(x) for x in j.axis],
                "origin": {
                    "xyz": [float(x) for x in j.origin_xyz],
                    "rpy_zyx": [float(x) for x in j.origin_rpy],
                },
                "limits": [j.limits[0], j.limits[1]],
                "home": j.home,
            }
            for j in model.joints
        ],
    }
    if model.ik_binding is not None:
        doc["ik_binding"] = {
            "family": model.ik_binding.family.value,
            "joints": list(model.ik_binding.joint_names),
        }
    return doc


def as_joint_vector(model: RobotModel, values) -> np.ndarray:
    """Coerce to a read-only float64 vector with one entry per joint."""
    q = np.array(values, dtype=float, copy=True)
    if q.shape != (model.dof,):
        raise ShapeError(
            f"model {model.name!r} has {model.dof} joints, got joint vector of shape {q.shape}"
        )
    if not np.all(np.isfinite(q)):
        raise DomainError("joint values must be finite")
    q.flags.writeable = False
    return q


def clamp(model: RobotModel, values) -> tuple[np.ndarray, tuple[bool, ...]]:
    """Clamp a joint vector into limits; flags mark the entries that moved."""
    q = as_joint_vector(model, values)
    clamped = np.minimum(np.maximum(q, model.lower), model.upper)
    flags = tuple(bool(a != b) for a, b in zip(q, clamped))
    clamped.flags.writeable = False
    return clamped, flags
