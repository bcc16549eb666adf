"""Closed-form inverse kinematics, at most three controlled joints.

The solver controls the joints named by the model's ik_binding (a chain
prefix); any further joints are held at their current values. The point being
placed is the tool tip when the binding covers the whole chain, otherwise the
frame of the first joint past the binding (the wrist point).

Solver parameters (link lengths, reference angles, axis senses) are not read
from the document. They are extracted numerically by probing forward
kinematics at a reference posture (bound joints zeroed), then checked against
the family's normal form: axis directions, shoulder on the waist axis,
in-plane links. A model that fails its normal form raises
UnsupportedModelError instead of being mis-solved.

Workspace semantics: prismatic strokes are geometry, so a target outside them
is unreachable and yields no solutions. Revolute limits are feasibility, so
out-of-limit branches are still returned, flagged infeasible with a reason.
``reachable`` evaluates the same workspace by closed-form membership, not by
running the solver, which gives the engine two independent routes that must
agree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DomainError, UnsupportedModelError
from .fk import fk_chain
from .model import IKBinding, JointKind, RobotModel, SolverFamily, as_joint_vector
from .transforms import as_vec3, compose

__all__ = [
    "BOUNDARY_TOL",
    "IKTarget",
    "IKSolution",
    "IKSolutionSet",
    "wrap_pi",
    "make_target",
    "constrained_point",
    "solve_ik",
    "reachable",
]

# Slack accepted at workspace boundaries (metres / joint units); targets this
# far outside are snapped onto the boundary so FK round-trips stay clean.
BOUNDARY_TOL = 1e-9
# Normal-form validation of extracted axis directions and in-plane checks.
AXIS_TOL = 1e-9
# Radial distance under which an azimuth (or planar base angle) is undefined.
SINGULAR_TOL = 1e-9
# Two branches closer than this in joint space are the same configuration.
DEDUPE_TOL = 1e-9
# Every returned solution is pushed back through FK as a self-check.
VERIFY_TOL = 1e-6

_TWO_PI = 2.0 * math.pi


def wrap_pi(angle: float) -> float:
    """Wrap an angle into (-pi, pi]."""
    y = math.fmod(angle + math.pi, _TWO_PI)
    if y < 0.0:
        y += _TWO_PI
    y -= math.pi
    if y == -math.pi:
        y = math.pi
    return y


@dataclass(frozen=True, eq=False)
class IKTarget:
    """A cartesian target for the constrained point."""

    position: np.ndarray
    frame: str  # "tool" when the binding covers every joint, else "wrist"


@dataclass(frozen=True, eq=False)
class IKSolution:
    """One branch: values for the bound joints plus feasibility against limits."""

    q_partial: np.ndarray
    branch: str
    feasible: bool
    infeasibility_reason: str | None
    singular: bool


@dataclass(frozen=True, eq=False)
class IKSolutionSet:
    """Every distinct branch reaching the target, nearest to current first.

    ``reachable`` reflects workspace geometry only; a set can be reachable
    while every branch is infeasible against revolute limits.
    """

    target: IKTarget
    reachable: bool
    solutions: tuple[IKSolution, ...]


def _require_binding(model: RobotModel) -> IKBinding:
    if model.ik_binding is None:
        raise UnsupportedModelError(
            f"model {model.name!r} has no ik_binding; inverse kinematics is unavailable"
        )
    return model.ik_binding


def make_target(model: RobotModel, target) -> IKTarget:
    """Coerce a 3-point (or pass an IKTarget through) for this model's binding."""
    binding = _require_binding(model)
    if isinstance(target, IKTarget):
        return target
    frame = "tool" if len(binding.indices) == model.dof else "wrist"
    return IKTarget(position=as_vec3(target, "target"), frame=frame)


def constrained_point(model: RobotModel, q) -> np.ndarray:
    """Position the solver controls, at the given configuration.

    The tool tip for a full binding; for a partial binding of k joints, the
    origin of chain frame k (the wrist point the excess joints hang from).
    """
    binding = _require_binding(model)
    chain = fk_chain(model, q)
    return chain[len(binding.indices)][:3, 3]


# --- geometry extraction ----------------------------------------------------

_Z = np.array([0.0, 0.0, 1.0])


@dataclass(frozen=True, eq=False)
class _CartesianGeo:
    axes: tuple[np.ndarray, ...]
    base: np.ndarray
    strokes: tuple[tuple[float, float], ...]


@dataclass(frozen=True, eq=False)
class _CylindricalGeo:
    center_xy: np.ndarray
    s1: float
    phi0: float
    r0: float
    z0: float
    s2: float
    stroke_lift: tuple[float, float]
    stroke_reach: tuple[float, float]


@dataclass(frozen=True, eq=False)
class _SphericalGeo:
    shoulder: np.ndarray
    s1: float
    phi0: float
    psi0: float
    s2: float
    e3: float
    radius0: float
    stroke: tuple[float, float]


@dataclass(frozen=True, eq=False)
class _ScaraGeo:
    center_xy: np.ndarray
    s1: float
    psi1_0: float
    l1: float
    s2: float
    delta0: float
    l2: float
    s3: float
    z0: float
    stroke: tuple[float, float]


@dataclass(frozen=True, eq=False)
class _Articulated3Geo:
    shoulder: np.ndarray
    s1: float
    phi0: float
    psi1_0: float
    l1: float
    s2: float
    delta0: float
    l2: float
    s3: float


@dataclass(frozen=True, eq=False)
class _Planar2Geo:
    shoulder: np.ndarray
    normal: np.ndarray
    u_dir: np.ndarray
    v_dir: np.ndarray
    plane_offset: float
    psi1_0: float
    l1: float
    s2: float
    delta0: float
    l2: float


def _unsupported(model: RobotModel, why: str) -> UnsupportedModelError:
    return UnsupportedModelError(f"model {model.name!r} outside solver normal form: {why}")


def _motion_frames(model: RobotModel, chain: tuple[np.ndarray, ...], count: int):
    """World frame each of the first ``count`` joints moves in (origin applied,
    motion not yet)."""
    frames = []
    for i in range(count):
        origin = model.joints[i].origin
        frames.append(origin if i == 0 else compose(chain[i - 1], origin))
    return frames


def _world_axis(frame: np.ndarray, axis: np.ndarray) -> np.ndarray:
    return frame[:3, :3] @ axis


def _vertical_sense(model: RobotModel, axis: np.ndarray, what: str) -> float:
    if abs(abs(float(axis[2])) - 1.0) > AXIS_TOL or np.max(np.abs(axis[:2])) > AXIS_TOL:
        raise _unsupported(model, f"{what} axis must be vertical, got {np.round(axis, 6)}")
    return 1.0 if axis[2] > 0 else -1.0


def _horizontal_unit(model: RobotModel, axis: np.ndarray, what: str) -> np.ndarray:
    if abs(float(axis[2])) > AXIS_TOL:
        raise _unsupported(model, f"{what} axis must be horizontal, got {np.round(axis, 6)}")
    return axis


def _extract_cartesian(model: RobotModel, binding: IKBinding, chain) -> _CartesianGeo:
    k = len(binding.indices)
    frames = _motion_frames(model, chain, k)
    axes = tuple(_world_axis(frames[i], model.joints[i].axis) for i in range(k))
    for i in range(k):
        for j in range(i + 1, k):
            if abs(float(axes[i] @ axes[j])) > AXIS_TOL:
                raise _unsupported(
                    model,
                    f"cartesian axes {model.joints[i].name!r} and "
                    f"{model.joints[j].name!r} are not orthogonal",
                )
    base = chain[k][:3, 3].copy()
    strokes = tuple(model.joints[i].limits for i in range(k))
    return _CartesianGeo(axes=axes, base=base, strokes=strokes)


def _extract_cylindrical(model: RobotModel, binding: IKBinding, chain) -> _CylindricalGeo:
    frames = _motion_frames(model, chain, 3)
    a1 = _world_axis(frames[0], model.joints[0].axis)
    s1 = _vertical_sense(model, a1, "waist")
    center = frames[0][:3, 3]
    a2 = _world_axis(frames[1], model.joints[1].axis)
    s2 = _vertical_sense(model, a2, "lift")
    a3 = _horizontal_unit(model, _world_axis(frames[2], model.joints[2].axis), "reach")
    w0 = chain[3][:3, 3]
    radial = w0 - center
    r0 = float(radial[:2] @ a3[:2])
    lateral = radial[:2] - r0 * a3[:2]
    if np.max(np.abs(lateral)) > AXIS_TOL:
        raise _unsupported(model, "wrist point is off the reach axis at reference posture")
    lo3, hi3 = model.joints[2].limits
    if r0 + lo3 < -BOUNDARY_TOL:
        raise _unsupported(model, "reach stroke crosses the waist axis")
    return _CylindricalGeo(
        center_xy=center[:2].copy(),
        s1=s1,
        phi0=math.atan2(float(a3[1]), float(a3[0])),
        r0=r0,
        z0=float(w0[2]),
        s2=s2,
        stroke_lift=model.joints[1].limits,
        stroke_reach=(lo3, hi3),
    )


def _extract_spherical(model: RobotModel, binding: IKBinding, chain) -> _SphericalGeo:
    frames = _motion_frames(model, chain, 3)
    a1 = _world_axis(frames[0], model.joints[0].axis)
    s1 = _vertical_sense(model, a1, "waist")
    center = frames[0][:3, 3]
    shoulder = frames[1][:3, 3]
    if np.max(np.abs(shoulder[:2] - center[:2])) > AXIS_TOL:
        raise _unsupported(model, "shoulder must sit on the waist axis")
    a2 = _horizontal_unit(model, _world_axis(frames[1], model.joints[1].axis), "elevation")
    w0 = chain[3][:3, 3]
    m0 = w0 - shoulder
    radius0 = float(np.linalg.norm(m0))
    if radius0 <= AXIS_TOL:
        raise _unsupported(model, "wrist point coincides with the shoulder at reference posture")
    horiz = math.hypot(float(m0[0]), float(m0[1]))
    if horiz <= AXIS_TOL:
        raise _unsupported(model, "reference posture points straight up; azimuth undefined")
    u_dir = np.array([m0[0] / horiz, m0[1] / horiz, 0.0])
    if abs(float(a2 @ u_dir)) > AXIS_TOL:
        raise _unsupported(model, "elevation axis must be normal to the arm plane")
    plane_normal = np.array([u_dir[1], -u_dir[0], 0.0])  # u x z
    s2 = 1.0 if float(a2 @ plane_normal) > 0 else -1.0
    m_unit = m0 / radius0
    a3 = _world_axis(frames[2], model.joints[2].axis)
    dot = float(a3 @ m_unit)
    if abs(abs(dot) - 1.0) > AXIS_TOL:
        raise _unsupported(model, "extension axis must run along the arm")
    e3 = 1.0 if dot > 0 else -1.0
    lo3, hi3 = model.joints[2].limits
    if radius0 + min(e3 * lo3, e3 * hi3) < -BOUNDARY_TOL:
        raise _unsupported(model, "extension stroke crosses the shoulder")
    return _SphericalGeo(
        shoulder=shoulder.copy(),
        s1=s1,
        phi0=math.atan2(float(u_dir[1]), float(u_dir[0])),
        psi0=math.atan2(float(m0[2]), horiz),
        s2=s2,
        e3=e3,
        radius0=radius0,
        stroke=(lo3, hi3),
    )


def _extract_scara(model: RobotModel, binding: IKBinding, chain) -> _ScaraGeo:
    frames = _motion_frames(model, chain, 3)
    a1 = _world_axis(frames[0], model.joints[0].axis)
    s1 = _vertical_sense(model, a1, "shoulder")
    a2 = _world_axis(frames[1], model.joints[1].axis)
    s2 = _vertical_sense(model, a2, "elbow")
    a3 = _world_axis(frames[2], model.joints[2].axis)
    s3 = _vertical_sense(model, a3, "plunge")
    center = frames[0][:3, 3]
    elbow = frames[1][:3, 3]
    link1 = elbow[:2] - center[:2]
    l1 = float(np.linalg.norm(link1))
    if l1 <= AXIS_TOL:
        raise _unsupported(model, "elbow axis coincides with the shoulder axis")
    w0 = chain[3][:3, 3]
    link2 = w0[:2] - elbow[:2]
    l2 = float(np.linalg.norm(link2))
    if l2 <= AXIS_TOL:
        raise _unsupported(model, "wrist point sits on the elbow axis")
    psi1_0 = math.atan2(float(link1[1]), float(link1[0]))
    psi2_0 = math.atan2(float(link2[1]), float(link2[0]))
    return _ScaraGeo(
        center_xy=center[:2].copy(),
        s1=s1,
        psi1_0=psi1_0,
        l1=l1,
        s2=s2,
        delta0=wrap_pi(psi2_0 - psi1_0),
        l2=l2,
        s3=s3,
        z0=float(w0[2]),
        stroke=model.joints[2].limits,
    )


def _extract_articulated3(model: RobotModel, binding: IKBinding, chain) -> _Articulated3Geo:
    frames = _motion_frames(model, chain, 3)
    a1 = _world_axis(frames[0], model.joints[0].axis)
    s1 = _vertical_sense(model, a1, "waist")
    center = frames[0][:3, 3]
    shoulder = frames[1][:3, 3]
    if np.max(np.abs(shoulder[:2] - center[:2])) > AXIS_TOL:
        raise _unsupported(model, "shoulder must sit on the waist axis")
    a2 = _horizontal_unit(model, _world_axis(frames[1], model.joints[1].axis), "shoulder")
    a3 = _horizontal_unit(model, _world_axis(frames[2], model.joints[2].axis), "elbow")
    if np.max(np.abs(np.cross(a2, a3))) > AXIS_TOL:
        raise _unsupported(model, "shoulder and elbow axes must be parallel")
    elbow = frames[2][:3, 3]
    w0 = chain[3][:3, 3]
    arm = elbow - shoulder
    horiz = math.hypot(float(arm[0]), float(arm[1]))
    if horiz <= AXIS_TOL:
        arm2 = w0 - shoulder
        horiz = math.hypot(float(arm2[0]), float(arm2[1]))
        if horiz <= AXIS_TOL:
            raise _unsupported(model, "reference posture is vertical; arm plane undefined")
        u_dir = np.array([arm2[0] / horiz, arm2[1] / horiz, 0.0])
    else:
        u_dir = np.array([arm[0] / horiz, arm[1] / horiz, 0.0])
    plane_normal = np.array([u_dir[1], -u_dir[0], 0.0])  # u x z
    if abs(float(a2 @ u_dir)) > AXIS_TOL:
        raise _unsupported(model, "shoulder axis must be normal to the arm plane")
    link1 = elbow - shoulder
    link2 = w0 - elbow
    if abs(float(link1 @ plane_normal)) > AXIS_TOL or abs(float(link2 @ plane_normal)) > AXIS_TOL:
        raise _unsupported(model, "links leave the arm plane at reference posture")
    u1, v1 = float(link1 @ u_dir), float(link1[2])
    u2, v2 = float(link2 @ u_dir), float(link2[2])
    l1 = math.hypot(u1, v1)
    l2 = math.hypot(u2, v2)
    if l1 <= AXIS_TOL or l2 <= AXIS_TOL:
        raise _unsupported(model, "degenerate zero-length link")
    psi1_0 = math.atan2(v1, u1)
    psi2_0 = math.atan2(v2, u2)
    s2 = 1.0 if float(a2 @ plane_normal) > 0 else -1.0
    s3 = 1.0 if float(a3 @ plane_normal) > 0 else -1.0
    return _Articulated3Geo(
        shoulder=shoulder.copy(),
        s1=s1,
        phi0=math.atan2(float(u_dir[1]), float(u_dir[0])),
        psi1_0=psi1_0,
        l1=l1,
        s2=s2,
        delta0=wrap_pi(psi2_0 - psi1_0),
        l2=l2,
        s3=s3,
    )


def _extract_planar2(model: RobotModel, binding: IKBinding, chain) -> _Planar2Geo:
    frames = _motion_frames(model, chain, 2)
    a1 = _world_axis(frames[0], model.joints[0].axis)
    a2 = _world_axis(frames[1], model.joints[1].axis)
    if np.max(np.abs(np.cross(a1, a2))) > AXIS_TOL:
        raise _unsupported(model, "both revolute axes must be parallel for a planar arm")
    normal = a1 / float(np.linalg.norm(a1))
    shoulder = frames[0][:3, 3]
    elbow = frames[1][:3, 3]
    w0 = chain[2][:3, 3]
    link1 = elbow - shoulder
    in_plane1 = link1 - float(link1 @ normal) * normal
    l1 = float(np.linalg.norm(in_plane1))
    if l1 <= AXIS_TOL:
        raise _unsupported(model, "elbow axis coincides with the shoulder axis")
    u_dir = in_plane1 / l1
    v_dir = np.cross(normal, u_dir)
    link2 = w0 - elbow
    u2, v2 = float(link2 @ u_dir), float(link2 @ v_dir)
    l2 = math.hypot(u2, v2)
    if l2 <= AXIS_TOL:
        raise _unsupported(model, "wrist point sits on the elbow axis")
    psi1_0 = math.atan2(float(in_plane1 @ v_dir), float(in_plane1 @ u_dir))
    s2 = 1.0 if float(a2 @ normal) > 0 else -1.0
    return _Planar2Geo(
        shoulder=shoulder.copy(),
        normal=normal,
        u_dir=u_dir,
        v_dir=v_dir,
        plane_offset=float((w0 - shoulder) @ normal),
        psi1_0=psi1_0,
        l1=l1,
        s2=s2,
        delta0=wrap_pi(math.atan2(v2, u2) - psi1_0),
        l2=l2,
    )


@lru_cache(maxsize=512)
def _cached_geometry(model: RobotModel, first_excess_value: float | None):
    binding = _require_binding(model)
    k = len(binding.indices)
    q_ref = np.zeros(model.dof)
    if first_excess_value is not None:
        q_ref[k] = first_excess_value
    chain = fk_chain(model, q_ref)
    if binding.family is SolverFamily.CARTESIAN:
        return _extract_cartesian(model, binding, chain)
    if binding.family is SolverFamily.CYLINDRICAL:
        return _extract_cylindrical(model, binding, chain)
    if binding.family is SolverFamily.SPHERICAL:
        return _extract_spherical(model, binding, chain)
    if binding.family is SolverFamily.SCARA:
        return _extract_scara(model, binding, chain)
    if k == 2:
        return _extract_planar2(model, binding, chain)
    return _extract_articulated3(model, binding, chain)


def _geometry(model: RobotModel, current: np.ndarray):
    binding = _require_binding(model)
    k = len(binding.indices)
    marker = None
    # the constrained frame includes the first excess joint's own motion, so
    # its value shifts the probe when that joint is prismatic
    if k < model.dof and model.joints[k].kind is JointKind.PRISMATIC:
        marker = float(current[k])
    return _cached_geometry(model, marker)


# --- planar two-link core ---------------------------------------------------


def _stroke_value(value: float, stroke: tuple[float, float]) -> float | None:
    """Snap a prismatic value into its stroke, or None when out of reach."""
    lo, hi = stroke
    if value < lo - BOUNDARY_TOL or value > hi + BOUNDARY_TOL:
        return None
    return min(max(value, lo), hi)


def _planar_two_link(u: float, v: float, l1: float, l2: float):
    """Shoulder angle and interior bend placing an l1-l2 linkage tip at (u, v).

    Returns a list of (psi1, gamma, inner_singular) triples. psi1 is the
    absolute angle of link 1 in the plane, the tip sits at angle psi1 + gamma.
    Distance is compared against the annulus with BOUNDARY_TOL slack, then the
    cosine is clamped, so membership and solvability coincide exactly.
    A target on the inner disc centre of an l1 == l2 arm has a free shoulder
    angle; that single fold comes back flagged inner_singular with psi1 None.
    """
    d2 = u * u + v * v
    d = math.sqrt(d2)
    if d > l1 + l2 + BOUNDARY_TOL:
        return []
    if d < abs(l1 - l2) - BOUNDARY_TOL:
        return []
    if d <= SINGULAR_TOL and abs(l1 - l2) <= BOUNDARY_TOL:
        return [(None, math.pi, True)]
    cos_gamma = (d2 - l1 * l1 - l2 * l2) / (2.0 * l1 * l2)
    cos_gamma = min(1.0, max(-1.0, cos_gamma))
    gamma = math.acos(cos_gamma)
    base = math.atan2(v, u)
    spread = math.atan2(l2 * math.sin(gamma), l1 + l2 * cos_gamma)
    down = (wrap_pi(base - spread), gamma, False)
    if gamma <= DEDUPE_TOL or gamma >= math.pi - DEDUPE_TOL:
        return [down]
    up = (wrap_pi(base + spread), -gamma, False)
    return [down, up]


# --- per-family solvers -----------------------------------------------------


@dataclass(frozen=True)
class _Raw:
    values: tuple[float, ...]
    branch: str
    singular: bool


def _solve_cartesian(geo: _CartesianGeo, target: np.ndarray, current: np.ndarray):
    delta = target - geo.base
    values = []
    residual = delta.copy()
    for axis, stroke in zip(geo.axes, geo.strokes):
        raw = float(axis @ delta)
        snapped = _stroke_value(raw, stroke)
        if snapped is None:
            return []
        values.append(snapped)
        residual = residual - raw * axis
    if float(np.linalg.norm(residual)) > BOUNDARY_TOL:
        return []
    return [_Raw(tuple(values), "direct", False)]


def _solve_cylindrical(geo: _CylindricalGeo, target: np.ndarray, current: np.ndarray):
    rel_x = float(target[0] - geo.center_xy[0])
    rel_y = float(target[1] - geo.center_xy[1])
    rho = math.hypot(rel_x, rel_y)
    q3 = _stroke_value(rho - geo.r0, geo.stroke_reach)
    if q3 is None:
        return []
    q2 = _stroke_value(geo.s2 * (float(target[2]) - geo.z0), geo.stroke_lift)
    if q2 is None:
        return []
    if rho <= SINGULAR_TOL:
        return [_Raw((float(current[0]), q2, q3), "direct", True)]
    q1 = geo.s1 * wrap_pi(math.atan2(rel_y, rel_x) - geo.phi0)
    return [_Raw((q1, q2, q3), "direct", False)]


def _solve_spherical(geo: _SphericalGeo, target: np.ndarray, current: np.ndarray):
    m = target - geo.shoulder
    radius = float(np.linalg.norm(m))
    q3 = _stroke_value(geo.e3 * (radius - geo.radius0), geo.stroke)
    if q3 is None:
        return []
    if radius <= SINGULAR_TOL:
        # target at the shoulder: every aim works, keep the current aim
        return [_Raw((float(current[0]), float(current[1]), q3), "shoulder_front", True)]
    horiz = math.hypot(float(m[0]), float(m[1]))
    psi = math.atan2(float(m[2]), horiz)
    if horiz <= SINGULAR_TOL:
        # straight up or down: azimuth free, elevation fully determined
        q2 = geo.s2 * wrap_pi(psi - geo.psi0)
        return [_Raw((float(current[0]), q2, q3), "shoulder_front", True)]
    phi = math.atan2(float(m[1]), float(m[0]))
    front = _Raw(
        (geo.s1 * wrap_pi(phi - geo.phi0), geo.s2 * wrap_pi(psi - geo.psi0), q3),
        "shoulder_front",
        False,
    )
    back = _Raw(
        (
            geo.s1 * wrap_pi(phi + math.pi - geo.phi0),
            geo.s2 * wrap_pi(math.pi - psi - geo.psi0),
            q3,
        ),
        "shoulder_back",
        False,
    )
    return [front, back]


def _solve_scara(geo: _ScaraGeo, target: np.ndarray, current: np.ndarray):
    q3 = _stroke_value(geo.s3 * (float(target[2]) - geo.z0), geo.stroke)
    if q3 is None:
        return []
    u = float(target[0] - geo.center_xy[0])
    v = float(target[1] - geo.center_xy[1])
    out = []
    for psi1, gamma, inner_singular in _planar_two_link(u, v, geo.l1, geo.l2):
        label = "elbow_down" if gamma >= 0 else "elbow_up"
        if inner_singular:
            q1 = float(current[0])
        else:
            q1 = geo.s1 * wrap_pi(psi1 - geo.psi1_0)
        q2 = geo.s2 * wrap_pi(gamma - geo.delta0)
        out.append(_Raw((q1, q2, q3), label, inner_singular))
    return out


def _solve_articulated3(geo: _Articulated3Geo, target: np.ndarray, current: np.ndarray):
    rel = target - geo.shoulder
    rho = math.hypot(float(rel[0]), float(rel[1]))
    v = float(rel[2])
    if rho <= SINGULAR_TOL:
        plans = [(None, 0.0, "shoulder_front", True)]
    else:
        phi = math.atan2(float(rel[1]), float(rel[0]))
        plans = [
            (geo.s1 * wrap_pi(phi - geo.phi0), rho, "shoulder_front", False),
            (geo.s1 * wrap_pi(phi + math.pi - geo.phi0), -rho, "shoulder_back", False),
        ]
    out = []
    for q1, u, prefix, az_singular in plans:
        for psi1, gamma, inner_singular in _planar_two_link(u, v, geo.l1, geo.l2):
            label = prefix + ("_elbow_down" if gamma >= 0 else "_elbow_up")
            singular = az_singular or inner_singular
            if inner_singular:
                q1v = float(current[0])
                q2 = float(current[1])
            else:
                q1v = float(current[0]) if q1 is None else q1
                q2 = geo.s2 * wrap_pi(psi1 - geo.psi1_0)
            q3 = geo.s3 * wrap_pi(gamma - geo.delta0)
            out.append(_Raw((q1v, q2, q3), label, singular))
    return out


def _solve_planar2(geo: _Planar2Geo, target: np.ndarray, current: np.ndarray):
    rel = target - geo.shoulder
    off_plane = float(rel @ geo.normal) - geo.plane_offset
    if abs(off_plane) > BOUNDARY_TOL:
        return []
    u = float(rel @ geo.u_dir)
    v = float(rel @ geo.v_dir)
    out = []
    for psi1, gamma, inner_singular in _planar_two_link(u, v, geo.l1, geo.l2):
        label = "elbow_down" if gamma >= 0 else "elbow_up"
        q1 = float(current[0]) if inner_singular else wrap_pi(psi1 - geo.psi1_0)
        q2 = geo.s2 * wrap_pi(gamma - geo.delta0)
        out.append(_Raw((q1, q2), label, inner_singular))
    return out


_SOLVERS = {
    _CartesianGeo: _solve_cartesian,
    _CylindricalGeo: _solve_cylindrical,
    _SphericalGeo: _solve_spherical,
    _ScaraGeo: _solve_scara,
    _Articulated3Geo: _solve_articulated3,
    _Planar2Geo: _solve_planar2,
}


# --- public entry points ----------------------------------------------------


def solve_ik(model: RobotModel, current_q, target) -> IKSolutionSet:
    """Every branch placing the constrained point at the target.

    Excess joints stay at their ``current_q`` values; branches are sorted by
    joint-space distance from the current bound values (ties by label), and
    each one is verified through forward kinematics before being returned.
    """
    binding = _require_binding(model)
    current = as_joint_vector(model, current_q)
    tgt = make_target(model, target)
    geo = _geometry(model, current)
    k = len(binding.indices)
    raws = _SOLVERS[type(geo)](geo, tgt.position, current[:k])

    deduped: list[_Raw] = []
    for raw in raws:
        if any(
            max(abs(a - b) for a, b in zip(raw.values, kept.values)) <= DEDUPE_TOL
            for kept in deduped
        ):
            continue
        deduped.append(raw)

    solutions = []
    for raw in deduped:
        reasons = []
        for slot, value in enumerate(raw.values):
            joint = model.joints[binding.indices[slot]]
            lo, hi = joint.limits
            if joint.kind is JointKind.REVOLUTE and not (lo <= value <= hi):
                reasons.append(f"q[{joint.name}]={value:.6g} outside [{lo:.6g}, {hi:.6g}]")
        _verify(model, current, raw, tgt.position, k)
        q_partial = np.array(raw.values, dtype=float)
        q_partial.flags.writeable = False
        solutions.append(
            IKSolution(
                q_partial=q_partial,
                branch=raw.branch,
                feasible=not reasons,
                infeasibility_reason="; ".join(reasons) if reasons else None,
                singular=raw.singular,
            )
        )

    reference = current[:k]
    solutions.sort(
        key=lambda s: (float(np.linalg.norm(s.q_partial - reference)), s.branch)
    )
    return IKSolutionSet(target=tgt, reachable=bool(solutions), solutions=tuple(solutions))


def _verify(model: RobotModel, current: np.ndarray, raw: _Raw, target: np.ndarray, k: int):
    q_full = np.array(current, dtype=float)
    q_full[:k] = raw.values
    reached = constrained_point(model, q_full)
    err = float(np.linalg.norm(reached - target))
    if err > VERIFY_TOL:
        raise UnsupportedModelError(
            f"model {model.name!r}: branch {raw.branch!r} failed the internal forward "
            f"check by {err:.3g}; geometry outside the solver normal form"
        )


def reachable(model: RobotModel, target, current_q=None) -> bool:
    """Closed-form workspace membership for the constrained point.

    Prismatic strokes bound the workspace; revolute limits do not. Extra
    joints past the binding default to home. This is an independent route
    from solve_ik: membership is evaluated analytically per family, with the
    same boundary slack, so the two always agree.
    """
    _require_binding(model)
    if current_q is None:
        current = model.home_q
    else:
        current = as_joint_vector(model, current_q)
    tgt = make_target(model, target)
    geo = _geometry(model, current)
    return _MEMBERSHIP[type(geo)](geo, tgt.position)


def _within(value: float, stroke: tuple[float, float]) -> bool:
    return stroke[0] - BOUNDARY_TOL <= value <= stroke[1] + BOUNDARY_TOL


def _member_cartesian(geo: _CartesianGeo, t: np.ndarray) -> bool:
    delta = t - geo.base
    residual = delta.copy()
    for axis, stroke in zip(geo.axes, geo.strokes):
        coord = float(axis @ delta)
        if not _within(coord, stroke):
            return False
        residual = residual - coord * axis
    return float(np.linalg.norm(residual)) <= BOUNDARY_TOL


def _member_cylindrical(geo: _CylindricalGeo, t: np.ndarray) -> bool:
    rho = math.hypot(float(t[0] - geo.center_xy[0]), float(t[1] - geo.center_xy[1]))
    return _within(rho - geo.r0, geo.stroke_reach) and _within(
        geo.s2 * (float(t[2]) - geo.z0), geo.stroke_lift
    )


def _member_spherical(geo: _SphericalGeo, t: np.ndarray) -> bool:
    radius = float(np.linalg.norm(t - geo.shoulder))
    return _within(geo.e3 * (radius - geo.radius0), geo.stroke)


def _member_annulus(d: float, l1: float, l2: float) -> bool:
    return abs(l1 - l2) - BOUNDARY_TOL <= d <= l1 + l2 + BOUNDARY_TOL


def _member_scara(geo: _ScaraGeo, t: np.ndarray) -> bool:
    d = math.hypot(float(t[0] - geo.center_xy[0]), float(t[1] - geo.center_xy[1]))
    return _member_annulus(d, geo.l1, geo.l2) and _within(
        geo.s3 * (float(t[2]) - geo.z0), geo.stroke
    )


def _member_articulated3(geo: _Articulated3Geo, t: np.ndarray) -> bool:
    return _member_annulus(float(np.linalg.norm(t - geo.shoulder)), geo.l1, geo.l2)


def _member_planar2(geo: _Planar2Geo, t: np.ndarray) -> bool:
    rel = t - geo.shoulder
    if abs(float(rel @ geo.normal) - geo.plane_offset) > BOUNDARY_TOL:
        return False
    d = math.hypot(float(rel @ geo.u_dir), float(rel @ geo.v_dir))
    return _member_annulus(d, geo.l1, geo.l2)


_MEMBERSHIP = {
    _CartesianGeo: _member_cartesian,
    _CylindricalGeo: _member_cylindrical,
    _SphericalGeo: _member_spherical,
    _ScaraGeo: _member_scara,
    _Articulated3Geo: _member_articulated3,
    _Planar2Geo: _member_planar2,
}
