"""Wire schema: one canonical JSON rendering of engine values.

The CLI's ``--format json`` output and the HTTP/WS service both go through
these functions, so a recorded CLI transcript doubles as an API contract
fixture. Numbers stay IEEE doubles end to end (json round-trips Python floats
shortest-form); matrices travel as flat row-major lists of 16 reals.
"""

from __future__ import annotations

import json
from typing import Any

import numpy as np

from .fk import MatrixDiff, fk_chain
from .ik import IKSolution, IKSolutionSet, IKTarget
from .model import RobotModel
from .session import SessionState
from .transforms import Pose

__all__ = [
    "frame_to_wire",
    "frames_to_wire",
    "pose_to_wire",
    "target_to_wire",
    "solution_to_wire",
    "solution_set_to_wire",
    "diff_to_wire",
    "model_summary",
    "state_event",
    "to_json",
]


def frame_to_wire(matrix: np.ndarray) -> list[float]:
    """4x4 transform as 16 floats, row major."""
    return [float(x) for x in np.asarray(matrix, dtype=float).reshape(16)]


def frames_to_wire(frames) -> list[list[float]]:
    return [frame_to_wire(m) for m in frames]


def _vec(values) -> list[float]:
    return [float(x) for x in values]


def pose_to_wire(pose: Pose) -> dict[str, Any]:
    return {
        "position": _vec(pose.position),
        "rotation": [float(x) for x in pose.rotation.reshape(9)],
        "euler_zyx": {
            "alpha": float(pose.euler_zyx.alpha),
            "beta": float(pose.euler_zyx.beta),
            "gamma": float(pose.euler_zyx.gamma),
            "singular": pose.euler_zyx.singular,
        },
    }


def target_to_wire(target: IKTarget) -> dict[str, Any]:
    return {"position": _vec(target.position), "frame": target.frame}


def solution_to_wire(model: RobotModel, current_q, solution: IKSolution) -> dict[str, Any]:
    """One branch, with the frame chain of its configuration so clients can
    draw the ghost without doing kinematics themselves. Joints beyond the
    binding keep their current values."""
    full = np.array(current_q, dtype=float)
    full[: len(solution.q_partial)] = solution.q_partial
    return {
        "branch": solution.branch,
        "q_partial": _vec(solution.q_partial),
        "feasible": solution.feasible,
        "infeasibility_reason": solution.infeasibility_reason,
        "singular": solution.singular,
        "frames": frames_to_wire(fk_chain(model, full)),
    }


def solution_set_to_wire(model: RobotModel, current_q, solutions: IKSolutionSet) -> dict[str, Any]:
    return {
        "target": target_to_wire(solutions.target),
        "reachable": solutions.reachable,
        "solutions": [solution_to_wire(model, current_q, s) for s in solutions.solutions],
    }


def diff_to_wire(diff: MatrixDiff) -> dict[str, Any]:
    return {
        "index": diff.index,
        "diff": frame_to_wire(diff.diff),
        "max_abs_error": float(diff.max_abs_error),
        "passed": diff.passed,
        "reason": diff.reason,
    }


def model_summary(model: RobotModel) -> dict[str, Any]:
    return {
        "name": model.name,
        "family": model.family.value,
        "dof": model.dof,
        "joints": [
            {
                "name": j.name,
                "kind": j.kind.value,
                "axis": _vec(j.axis),
                "origin_xyz": _vec(j.origin_xyz),
                "origin_rpy": _vec(j.origin_rpy),
                "limits": [float(j.limits[0]), float(j.limits[1])],
                "home": float(j.home),
            }
            for j in model.joints
        ],
        "tool_xyz": _vec(model.tool_xyz),
        "tool_rpy": _vec(model.tool_rpy),
        "ik_binding": None if model.ik_binding is None else {
            "family": model.ik_binding.family.value,
            "joints": list(model.ik_binding.joint_names),
        },
    }


def state_event(
    state: SessionState,
    clamped_flags: tuple[bool, ...] | None = None,
    diffs: tuple[MatrixDiff, ...] | None = None,
) -> dict[str, Any]:
    """Full state snapshot as streamed to clients.

    frames are always the live fk_chain of the session's q; command-specific
    extras (clamped_flags, diffs) appear only on the event for that command.
    """
    event: dict[str, Any] = {
        "session_id": state.session_id,
        "revision": state.revision,
        "mode": state.mode.value,
        "model": state.model.name,
        "q": _vec(state.q),
        "frames": frames_to_wire(fk_chain(state.model, state.q)),
        "animating": state.animation is not None,
    }
    if state.target is not None:
        event["target"] = target_to_wire(state.target)
    if state.last_solutions is not None:
        event["solutions"] = solution_set_to_wire(state.model, state.q, state.last_solutions)
    if clamped_flags is not None:
        event["clamped_flags"] = list(clamped_flags)
    if diffs is not None:
        event["diffs"] = [diff_to_wire(d) for d in diffs]
    return event


def to_json(payload: Any) -> str:
    """Stable rendering used for goldens: sorted keys, two-space indent."""
    return json.dumps(payload, indent=2, sort_keys=True, allow_nan=False) + "\n"
