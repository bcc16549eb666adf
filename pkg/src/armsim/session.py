"""Teaching-session state machine.

A session wraps one robot model with the screens a student walks through:
a menu, a direct-kinematics screen (sliders), an inverse-kinematics screen
(targets, branches, animation), and a matrix-validation screen reachable from
inverse kinematics. Transitions form a fixed graph; everything else is a
command that either yields a new immutable state or raises a typed error
leaving the old state intact.

Sessions are event-sourced: states are frozen values, commands are plain JSON
dicts, and replaying a command log over the same model reproduces the exact
state bit for bit (rejected commands change nothing and replay skips them the
same way a live session would).
"""

from __future__ import annotations

import json
import math
import uuid
from dataclasses import dataclass, replace
from enum import Enum
from typing import Any, Iterable, Mapping

import numpy as np

from .errors import (
    DomainError,
    InfeasibleBranchError,
    ShapeError,
    SimError,
    UnknownBranchError,
    UnknownCommandError,
    WrongModeError,
)
from .fk import DEFAULT_VALIDATE_TOL, MatrixDiff, validate_matrices
from .ik import IKSolution, IKSolutionSet, IKTarget, solve_ik
from .model import RobotModel

__all__ = [
    "Mode",
    "TRANSITIONS",
    "DEFAULT_ANIMATION_SECONDS",
    "Trajectory",
    "SessionState",
    "StepResult",
    "create_session",
    "apply",
    "replay",
    "fingerprint",
    "dump_command_log",
    "parse_command_log",
]

DEFAULT_ANIMATION_SECONDS = 1.0


class Mode(str, Enum):
    MENU = "menu"
    DIRECT_KINEMATICS = "direct_kinematics"
    INVERSE_KINEMATICS = "inverse_kinematics"
    VALIDATE = "validate"


# The fixed screen graph. No self-edges: re-entering the current mode is a
# rejected transition, not a quiet no-op.
TRANSITIONS: frozenset[tuple[Mode, Mode]] = frozenset({
    (Mode.MENU, Mode.DIRECT_KINEMATICS),
    (Mode.DIRECT_KINEMATICS, Mode.MENU),
    (Mode.DIRECT_KINEMATICS, Mode.INVERSE_KINEMATICS),
    (Mode.INVERSE_KINEMATICS, Mode.DIRECT_KINEMATICS),
    (Mode.INVERSE_KINEMATICS, Mode.VALIDATE),
    (Mode.VALIDATE, Mode.INVERSE_KINEMATICS),
})


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Linear joint-space move from q_start to q_end over a fixed duration."""

    q_start: np.ndarray
    q_end: np.ndarray
    duration: float
    elapsed: float

    def sample(self, elapsed: float) -> np.ndarray:
        fraction = min(1.0, max(0.0, elapsed / self.duration))
        q = self.q_start + fraction * (self.q_end - self.q_start)
        q.flags.writeable = False
        return q

    @property
    def done(self) -> bool:
        return self.elapsed >= self.duration


@dataclass(frozen=True, eq=False)
class SessionState:
    """Complete immutable session snapshot. revision increases by exactly one
    per accepted state-changing command."""

    session_id: str
    model: RobotModel
    mode: Mode
    q: np.ndarray
    target: IKTarget | None
    last_solutions: IKSolutionSet | None
    animation: Trajectory | None
    revision: int


@dataclass(frozen=True, eq=False)
class StepResult:
    """Outcome of one accepted command."""

    state: SessionState
    changed: bool
    clamped_flags: tuple[bool, ...] | None = None
    diffs: tuple[MatrixDiff, ...] | None = None


def create_session(model: RobotModel, session_id: str | None = None) -> SessionState:
    """Fresh session at the model's home configuration, revision 1."""
    return SessionState(
        session_id=session_id if session_id is not None else uuid.uuid4().hex,
        model=model,
        mode=Mode.DIRECT_KINEMATICS,
        q=model.home_q,
        target=None,
        last_solutions=None,
        animation=None,
        revision=1,
    )


def _require_mode(state: SessionState, wanted: Mode, command: str) -> None:
    if state.mode is not wanted:
        raise WrongModeError(
            f"{command} requires mode {wanted.value!r}, session is in {state.mode.value!r}"
        )


def _float_field(cmd: Mapping[str, Any], key: str, default: float | None = None) -> float:
    if key not in cmd:
        if default is None:
            raise DomainError(f"command is missing field {key!r}")
        return default
    value = cmd[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise DomainError(f"field {key!r} must be a number")
    value = float(value)
    if not math.isfinite(value):
        raise DomainError(f"field {key!r} must be finite")
    return value


def _check_fields(cmd: Mapping[str, Any], allowed: set[str]) -> None:
    extras = sorted(set(cmd) - allowed - {"type", "expected_revision"})
    if extras:
        raise UnknownCommandError(f"unexpected field(s) {', '.join(extras)}")


def apply(state: SessionState, command: Mapping[str, Any]) -> StepResult:
    """Apply one command dict; returns the new state or raises a typed error."""
    if not isinstance(command, Mapping):
        raise UnknownCommandError("command must be an object")
    kind = command.get("type")
    handler = _HANDLERS.get(kind)
    if handler is None:
        raise UnknownCommandError(f"unknown command type {kind!r}")
    return handler(state, command)


def _bump(state: SessionState, **changes) -> SessionState:
    return replace(state, revision=state.revision + 1, **changes)


def _cmd_set_mode(state: SessionState, cmd: Mapping[str, Any]) -> StepResult:
    _check_fields(cmd, {"mode"})
    raw = cmd.get("mode")
    try:
        wanted = Mode(raw)
    except ValueError:
        raise DomainError(f"unknown mode {raw!r}") from None
    if (state.mode, wanted) not in TRANSITIONS:
        raise WrongModeError(
            f"no transition from {state.mode.value!r} to {wanted.value!r}"
        )
    # leaving a screen abandons any running move
    return StepResult(state=_bump(state, mode=wanted, animation=None), changed=True)


def _cmd_set_joint(state: SessionState, cmd: Mapping[str, Any]) -> StepResult:
    _check_fields(cmd, {"joint", "value"})
    _require_mode(state, Mode.DIRECT_KINEMATICS, "set_joint")
    raw_index = cmd.get("joint")
    if isinstance(raw_index, bool) or not isinstance(raw_index, int):
        raise DomainError("field 'joint' must be an integer index")
    if not 0 <= raw_index < state.model.dof:
        raise ShapeError(
            f"joint index {raw_index} out of range for model "
            f"{state.model.name!r} with {state.model.dof} joints"
        )
    value = _float_field(cmd, "value")
    lo, hi = state.model.joints[raw_index].limits
    clamped_value = min(max(value, lo), hi)
    flags = tuple(
        i == raw_index and clamped_value != value for i in range(state.model.dof)
    )
    q = np.array(state.q, dtype=float)
    q[raw_index] = clamped_value
    q.flags.writeable = False
    return StepResult(state=_bump(state, q=q), changed=True, clamped_flags=flags)


def _select_branch(
    solutions: IKSolutionSet, branch: str | None, command: str
) -> IKSolution | None:
    if branch is not None:
        for sol in solutions.solutions:
            if sol.branch == branch:
                if not sol.feasible:
                    raise InfeasibleBranchError(
                        f"branch {branch!r} violates joint limits: "
                        f"{sol.infeasibility_reason}"
                    )
                return sol
        known = ", ".join(s.branch for s in solutions.solutions) or "none"
        raise UnknownBranchError(
            f"{command}: no branch {branch!r} in the current solution set ({known})"
        )
    for sol in solutions.solutions:
        if sol.feasible:
            return sol
    return None


def _animate_to(state: SessionState, solution: IKSolution, duration: float) -> Trajectory:
    q_end = np.array(state.q, dtype=float)
    q_end[: len(solution.q_partial)] = solution.q_partial
    q_end.flags.writeable = False
    return Trajectory(q_start=state.q, q_end=q_end, duration=duration, elapsed=0.0)


def _cmd_request_ik(state: SessionState, cmd: Mapping[str, Any]) -> StepResult:
    _check_fields(cmd, {"target", "branch", "duration"})
    _require_mode(state, Mode.INVERSE_KINEMATICS, "request_ik")
    if "target" not in cmd:
        raise DomainError("command is missing field 'target'")
    branch = cmd.get("branch")
    if branch is not None and not isinstance(branch, str):
        raise DomainError("field 'branch' must be a string")
    duration = _float_field(cmd, "duration", DEFAULT_ANIMATION_SECONDS)
    if duration <= 0.0:
        raise DomainError(f"field 'duration' must be positive, got {duration:g}")
    solutions = solve_ik(state.model, state.q, cmd["target"])
    chosen = _select_branch(solutions, branch, "request_ik")
    animation = _animate_to(state, chosen, duration) if chosen is not None else None
    new_state = _bump(
        state,
        target=solutions.target,
        last_solutions=solutions,
        animation=animation,
    )
    return StepResult(state=new_state, changed=True)


def _cmd_choose_branch(state: SessionState, cmd: Mapping[str, Any]) -> StepResult:
    _check_fields(cmd, {"branch", "duration"})
    _require_mode(state, Mode.INVERSE_KINEMATICS, "choose_branch")
    branch = cmd.get("branch")
    if not isinstance(branch, str):
        raise DomainError("field 'branch' must be a string")
    duration = _float_field(cmd, "duration", DEFAULT_ANIMATION_SECONDS)
    if duration <= 0.0:
        raise DomainError(f"field 'duration' must be positive, got {duration:g}")
    if state.last_solutions is None:
        raise UnknownBranchError("choose_branch: no solution set in this session yet")
    chosen = _select_branch(state.last_solutions, branch, "choose_branch")
    animation = _animate_to(state, chosen, duration)
    return StepResult(state=_bump(state, animation=animation), changed=True)


def _cmd_validate_matrices(state: SessionState, cmd: Mapping[str, Any]) -> StepResult:
    _check_fields(cmd, {"matrices", "mode", "tolerance"})
    _require_mode(state, Mode.VALIDATE, "validate_matrices")
    matrices = cmd.get("matrices")
    if not isinstance(matrices, (list, tuple)):
        raise DomainError("field 'matrices' must be a list of 4x4 matrices")
    mode = cmd.get("mode", "factors")
    if mode not in ("factors", "product"):
        raise DomainError(f"field 'mode' must be 'factors' or 'product', got {mode!r}")
    tolerance = _float_field(cmd, "tolerance", DEFAULT_VALIDATE_TOL)
    diffs = validate_matrices(state.model, state.q, matrices, mode=mode, tolerance=tolerance)
    return StepResult(state=_bump(state), changed=True, diffs=diffs)


def _cmd_reset(state: SessionState, cmd: Mapping[str, Any]) -> StepResult:
    _check_fields(cmd, set())
    return StepResult(
        state=_bump(
            state,
            q=state.model.home_q,
            target=None,
            last_solutions=None,
            animation=None,
        ),
        changed=True,
    )


def _cmd_tick(state: SessionState, cmd: Mapping[str, Any]) -> StepResult:
    _check_fields(cmd, {"dt"})
    dt = _float_field(cmd, "dt")
    if dt < 0.0:
        raise DomainError(f"field 'dt' must be non-negative, got {dt:g}")
    if state.animation is None:
        return StepResult(state=state, changed=False)
    elapsed = state.animation.elapsed + dt
    if elapsed >= state.animation.duration:
        return StepResult(
            state=_bump(state, q=state.animation.q_end, animation=None), changed=True
        )
    moved = replace(state.animation, elapsed=elapsed)
    return StepResult(
        state=_bump(state, q=moved.sample(elapsed), animation=moved), changed=True
    )


_HANDLERS = {
    "set_mode": _cmd_set_mode,
    "set_joint": _cmd_set_joint,
    "request_ik": _cmd_request_ik,
    "choose_branch": _cmd_choose_branch,
    "validate_matrices": _cmd_validate_matrices,
    "reset": _cmd_reset,
    "tick": _cmd_tick,
}


def replay(
    model: RobotModel, commands: Iterable[Mapping[str, Any]], session_id: str = "replay"
) -> SessionState:
    """Run a command log from scratch; rejected commands are skipped exactly as
    a live session would leave them without effect."""
    state = create_session(model, session_id=session_id)
    for command in commands:
        try:
            state = apply(state, command).state
        except SimError:
            continue
    return state


def fingerprint(state: SessionState) -> dict[str, Any]:
    """Canonical primitive rendering of a state for exact (bit-level) comparison."""
    def vec(a) -> list[float]:
        return [float(x) for x in a]

    out: dict[str, Any] = {
        "session_id": state.session_id,
        "model": state.model.name,
        "mode": state.mode.value,
        "q": vec(state.q),
        "revision": state.revision,
        "target": None if state.target is None else {
            "position": vec(state.target.position),
            "frame": state.target.frame,
        },
        "animation": None if state.animation is None else {
            "q_start": vec(state.animation.q_start),
            "q_end": vec(state.animation.q_end),
            "duration": state.animation.duration,
            "elapsed": state.animation.elapsed,
        },
    }
    if state.last_solutions is None:
        out["solutions"] = None
    else:
        out["solutions"] = {
            "reachable": state.last_solutions.reachable,
            "branches": [
                {
                    "branch": s.branch,
                    "q_partial": vec(s.q_partial),
                    "feasible": s.feasible,
                    "singular": s.singular,
                    "infeasibility_reason": s.infeasibility_reason,
                }
                for s in state.last_solutions.solutions
            ],
        }
    return out


def dump_command_log(commands: Iterable[Mapping[str, Any]]) -> str:
    """One JSON object per line, stable key order."""
    return "\n".join(json.dumps(c, sort_keys=True) for c in commands) + "\n"


def parse_command_log(text: str) -> list[dict[str, Any]]:
    out = []
    for line_no, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        try:
            cmd = json.loads(line)
        except json.JSONDecodeError as exc:
            raise DomainError(f"command log line {line_no} is not valid JSON: {exc}") from exc
        if not isinstance(cmd, dict):
            raise DomainError(f"command log line {line_no} must be an object")
        out.append(cmd)
    return out
