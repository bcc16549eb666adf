"""Command-line front door: catalog listing, FK/IK evaluation, matrix
validation, and launching the network service.

Exit codes: 0 success (for ik: at least one feasible branch; for validate:
every matrix passed), 1 usage error, 2 validation or parse error, 3 target
unreachable or no feasible branch.

Numbers print with a fixed 9-decimal format so transcripts are goldens.
``--format json`` emits the same wire schema the service speaks, radians and
all; ``--degrees`` only converts at the boundary (revolute inputs, and angle
outputs in text mode).
"""

from __future__ import annotations

import json
import math
import sys

import click

from . import wire
from .catalog import builtin_catalog, get_model, load_models_dir
from .errors import ParseError, SimError
from .fk import DEFAULT_VALIDATE_TOL, fk_chain, fk_pose, validate_matrices
from .ik import solve_ik
from .model import JointKind, RobotModel, as_joint_vector


def _fmt(values) -> str:
    # + 0.0 folds negative zero into plain zero for display
    return " ".join(f"{float(v) + 0.0:.9f}" for v in values)


def _parse_floats(text: str, what: str) -> list[float]:
    out = []
    for part in text.split(","):
        part = part.strip()
        try:
            value = float(part)
        except ValueError:
            raise ParseError(f"{what}: {part!r} is not a number") from None
        if not math.isfinite(value):
            raise ParseError(f"{what}: {part!r} is not finite")
        out.append(value)
    return out


def _joints_arg(model: RobotModel, text: str, degrees: bool):
    values = _parse_floats(text, "--joints")
    # convert only when the count is right; otherwise let as_joint_vector
    # raise its shape error on the raw values
    if degrees and len(values) == model.dof:
        values = [
            v * math.pi / 180.0 if j.kind is JointKind.REVOLUTE else v
            for j, v in zip(model.joints, values)
        ]
    return as_joint_vector(model, values)


@click.group()
def cli() -> None:
    """Robot kinematics engine and teaching simulator."""


@cli.group()
def models() -> None:
    """Model catalog."""


@models.command("list")
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text")
def models_list(fmt: str) -> None:
    """List built-in models with family and joint count."""
    catalog = builtin_catalog()
    if fmt == "json":
        click.echo(wire.to_json([wire.model_summary(m) for m in catalog]), nl=False)
        return
    click.echo(f"{'name':<18} {'family':<12} {'dof':>3}")
    for model in catalog:
        click.echo(f"{model.name:<18} {model.family.value:<12} {model.dof:>3}")


@cli.command()
@click.option("--model", "model_name", required=True)
@click.option("--joints", required=True, help="comma-separated joint values")
@click.option("--degrees", is_flag=True, help="revolute joints given in degrees")
@click.option("--chain", is_flag=True, help="print every chain frame, not just the pose")
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text")
def fk(model_name: str, joints: str, degrees: bool, chain: bool, fmt: str) -> None:
    """Forward kinematics for one joint vector."""
    model = get_model(model_name)
    q = _joints_arg(model, joints, degrees)
    pose = fk_pose(model, q)
    if fmt == "json":
        payload = {"model": model.name, "q": [float(v) for v in q], "pose": wire.pose_to_wire(pose)}
        if chain:
            payload["frames"] = wire.frames_to_wire(fk_chain(model, q))
        click.echo(wire.to_json(payload), nl=False)
        return
    click.echo(f"model: {model.name}")
    click.echo(f"q: {_fmt(q)}")
    click.echo(f"position: {_fmt(pose.position)}")
    euler = pose.euler_zyx
    angles = (euler.alpha, euler.beta, euler.gamma)
    if degrees:
        angles = tuple(a * 180.0 / math.pi for a in angles)
    suffix = " (singular)" if euler.singular else ""
    click.echo(f"euler_zyx: {_fmt(angles)}{suffix}")
    if chain:
        for index, frame in enumerate(fk_chain(model, q)):
            click.echo(f"frame {index}:")
            for row in frame:
                click.echo(f"  {_fmt(row)}")


@cli.command()
@click.option("--model", "model_name", required=True)
@click.option("--target", required=True, help="target point x,y,z")
@click.option("--current", default=None, help="current joint values (defaults to home)")
@click.option("--all", "show_all", is_flag=True, help="include infeasible branches")
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text")
@click.pass_context
def ik(ctx, model_name: str, target: str, current: str | None, show_all: bool, fmt: str) -> None:
    """Inverse kinematics: every branch reaching the target point."""
    model = get_model(model_name)
    point = _parse_floats(target, "--target")
    current_q = model.home_q if current is None else as_joint_vector(
        model, _parse_floats(current, "--current")
    )
    result = solve_ik(model, current_q, point)
    feasible = [s for s in result.solutions if s.feasible]
    if fmt == "json":
        click.echo(wire.to_json(wire.solution_set_to_wire(model, current_q, result)), nl=False)
    else:
        click.echo(f"model: {model.name}")
        click.echo(f"target: {_fmt(result.target.position)}")
        click.echo(f"frame: {result.target.frame}")
        click.echo(f"reachable: {'yes' if result.reachable else 'no'}")
        shown = result.solutions if show_all else feasible
        for index, sol in enumerate(shown, start=1):
            line = f"[{index}] {sol.branch}: q = {_fmt(sol.q_partial)}"
            if sol.singular:
                line += " singular"
            if not sol.feasible:
                line += f" infeasible ({sol.infeasibility_reason})"
            click.echo(line)
        if not result.reachable:
            click.echo("unreachable: target outside the workspace")
        elif not feasible:
            click.echo("no feasible branch within joint limits")
    if not feasible:
        ctx.exit(3)


@cli.command()
@click.option("--model", "model_name", required=True)
@click.option("--joints", required=True, help="comma-separated joint values")
@click.option("--matrices", "matrices_file", required=True,
              type=click.Path(exists=True, dir_okay=False),
              help="JSON file: list of 4x4 row-major matrices")
@click.option("--mode", type=click.Choice(["factors", "product"]), default="factors")
@click.option("--tolerance", type=float, default=DEFAULT_VALIDATE_TOL, show_default=True)
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text")
@click.pass_context
def validate(ctx, model_name: str, joints: str, matrices_file: str, mode: str,
             tolerance: float, fmt: str) -> None:
    """Grade hand-computed transform matrices against the engine."""
    model = get_model(model_name)
    q = _joints_arg(model, joints, degrees=False)
    try:
        with open(matrices_file, encoding="utf-8") as handle:
            matrices = json.load(handle)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{matrices_file}: not valid JSON ({exc})") from exc
    if not isinstance(matrices, list):
        raise ParseError(f"{matrices_file}: expected a JSON list of matrices")
    diffs = validate_matrices(model, q, matrices, mode=mode, tolerance=tolerance)
    all_passed = all(d.passed for d in diffs)
    if fmt == "json":
        payload = {
            "model": model.name,
            "q": [float(v) for v in q],
            "mode": mode,
            "tolerance": tolerance,
            "all_passed": all_passed,
            "diffs": [wire.diff_to_wire(d) for d in diffs],
        }
        click.echo(wire.to_json(payload), nl=False)
    else:
        click.echo(f"model: {model.name}")
        click.echo(f"q: {_fmt(q)}")
        click.echo(f"mode: {mode}")
        click.echo(f"tolerance: {tolerance:.9f}")
        passed_count = 0
        for diff in diffs:
            verdict = "pass" if diff.passed else "FAIL"
            line = f"matrix {diff.index}: {verdict} (max error {diff.max_abs_error:.9f}"
            if diff.reason is not None:
                line += f", {diff.reason}"
            line += ")"
            click.echo(line)
            passed_count += diff.passed
        click.echo(f"passed {passed_count} of {len(diffs)}")
    if not all_passed:
        ctx.exit(2)


@cli.command()
@click.option("--host", envvar="ARMSIM_HOST", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
@click.option("--models", "models_dir", default=None,
              type=click.Path(exists=True, file_okay=False),
              help="directory of extra model JSON files")
@click.option("--ui", "ui_dir", default=None,
              type=click.Path(exists=True, file_okay=False),
              help="static files for the browser client, served at /")
def serve(host: str, port: int, models_dir: str | None, ui_dir: str | None) -> None:
    """Run the HTTP/WebSocket service."""
    import uvicorn

    from .service import create_app

    if models_dir is not None:
        load_models_dir(models_dir)   # fail fast on bad files
    uvicorn.run(create_app(models_dir=models_dir, ui_dir=ui_dir), host=host, port=port)


def main(argv: list[str] | None = None) -> int:
    """Entry point with explicit exit-code mapping (no click auto-exit)."""
    try:
        # non-standalone click hands ctx.exit(code) back as the return value
        rv = cli.main(args=argv, prog_name="armsim", standalone_mode=False)
    except click.UsageError as exc:
        click.echo(f"usage error: {exc.format_message()}", err=True)
        return 1
    except click.ClickException as exc:
        exc.show()
        return 1
    except click.exceptions.Abort:
        return 1
    except SimError as exc:
        click.echo(f"error [{exc.code}]: {exc}", err=True)
        return 2
    return rv if isinstance(rv, int) else 0


if __name__ == "__main__":
    sys.exit(main())
