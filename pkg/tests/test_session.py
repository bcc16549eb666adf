"""Session state machine: mode graph, commands, animation, replay."""

import math

import numpy as np
import pytest

from armsim.catalog import get_model
from armsim.errors import (
    DomainError,
    InfeasibleBranchError,
    ShapeError,
    SimError,
    UnknownBranchError,
    UnknownCommandError,
    WrongModeError,
)
from armsim.fk import expected_matrices, fk_pose
from armsim.session import (
    Mode,
    TRANSITIONS,
    apply,
    create_session,
    dump_command_log,
    fingerprint,
    parse_command_log,
    replay,
)


@pytest.fixture
def planar():
    return create_session(get_model("planar_rr"), session_id="t-planar")


@pytest.fixture
def arm():
    return create_session(get_model("articulated_rrr"), session_id="t-arm")


def to_ik(state):
    return apply(state, {"type": "set_mode", "mode": "inverse_kinematics"}).state


# --- creation ---------------------------------------------------------------

def test_new_session_is_at_home_in_direct_kinematics(arm):
    assert arm.mode is Mode.DIRECT_KINEMATICS
    assert arm.revision == 1
    assert arm.q.tobytes() == arm.model.home_q.tobytes()
    assert arm.target is None
    assert arm.last_solutions is None
    assert arm.animation is None
    assert arm.session_id == "t-arm"


def test_default_session_ids_are_unique():
    model = get_model("planar_rr")
    a = create_session(model)
    b = create_session(model)
    assert a.session_id != b.session_id


# --- mode graph -------------------------------------------------------------

def test_every_declared_transition_is_usable(arm):
    for src, dst in sorted(TRANSITIONS, key=lambda e: (e[0].value, e[1].value)):
        state = arm
        # walk to src first
        path = {
            Mode.DIRECT_KINEMATICS: [],
            Mode.MENU: ["menu"],
            Mode.INVERSE_KINEMATICS: ["inverse_kinematics"],
            Mode.VALIDATE: ["inverse_kinematics", "validate"],
        }[src]
        for step in path:
            state = apply(state, {"type": "set_mode", "mode": step}).state
        assert state.mode is src
        before = state.revision
        state = apply(state, {"type": "set_mode", "mode": dst.value}).state
        assert state.mode is dst
        assert state.revision == before + 1


@pytest.mark.parametrize("src_path,dst", [
    ([], "validate"),                            # dk -> validate skips ik
    (["menu"], "inverse_kinematics"),            # menu -> ik
    (["menu"], "validate"),
    (["inverse_kinematics", "validate"], "menu"),
    (["inverse_kinematics", "validate"], "direct_kinematics"),
])
def test_missing_edges_are_rejected(arm, src_path, dst):
    state = arm
    for step in src_path:
        state = apply(state, {"type": "set_mode", "mode": step}).state
    with pytest.raises(WrongModeError):
        apply(state, {"type": "set_mode", "mode": dst})
    assert state.revision == len(src_path) + 1


@pytest.mark.parametrize("mode", ["menu", "direct_kinematics", "inverse_kinematics", "validate"])
def test_mode_graph_has_no_self_edges(arm, mode):
    state = arm
    walk = {
        "direct_kinematics": [],
        "menu": ["menu"],
        "inverse_kinematics": ["inverse_kinematics"],
        "validate": ["inverse_kinematics", "validate"],
    }[mode]
    for step in walk:
        state = apply(state, {"type": "set_mode", "mode": step}).state
    before = state.revision
    with pytest.raises(WrongModeError):
        apply(state, {"type": "set_mode", "mode": mode})
    assert state.revision == before


def test_unknown_mode_name_is_a_domain_error(arm):
    with pytest.raises(DomainError):
        apply(arm, {"type": "set_mode", "mode": "teleport"})


def test_unknown_command_type_is_rejected(arm):
    with pytest.raises(UnknownCommandError):
        apply(arm, {"type": "warp_drive"})
    with pytest.raises(UnknownCommandError):
        apply(arm, {"no_type": 1})


def test_unexpected_fields_are_rejected(arm):
    with pytest.raises(UnknownCommandError):
        apply(arm, {"type": "reset", "hard": True})


# --- set_joint --------------------------------------------------------------

def test_set_joint_updates_one_entry(arm):
    step = apply(arm, {"type": "set_joint", "joint": 1, "value": 0.75})
    assert step.changed
    assert step.state.revision == 2
    assert step.state.q[1] == 0.75
    assert step.state.q[0] == arm.q[0]
    assert step.clamped_flags == (False, False, False)
    # original state untouched
    assert arm.q[1] == arm.model.home_q[1]


def test_set_joint_clamps_and_flags(arm):
    hi = arm.model.joints[1].limits[1]
    step = apply(arm, {"type": "set_joint", "joint": 1, "value": hi + 10.0})
    assert step.state.q[1] == hi
    assert step.clamped_flags == (False, True, False)


def test_set_joint_needs_direct_kinematics_mode(arm):
    state = to_ik(arm)
    with pytest.raises(WrongModeError):
        apply(state, {"type": "set_joint", "joint": 0, "value": 0.1})


def test_set_joint_index_out_of_range(arm):
    with pytest.raises(ShapeError):
        apply(arm, {"type": "set_joint", "joint": 3, "value": 0.0})
    with pytest.raises(ShapeError):
        apply(arm, {"type": "set_joint", "joint": -1, "value": 0.0})


def test_set_joint_rejects_non_numeric_value(arm):
    with pytest.raises(DomainError):
        apply(arm, {"type": "set_joint", "joint": 0, "value": "big"})
    with pytest.raises(DomainError):
        apply(arm, {"type": "set_joint", "joint": 0, "value": True})
    with pytest.raises(DomainError):
        apply(arm, {"type": "set_joint", "joint": 0, "value": math.nan})
    with pytest.raises(DomainError):
        apply(arm, {"type": "set_joint", "joint": 0})


# --- request_ik / choose_branch --------------------------------------------

def test_request_ik_picks_nearest_feasible_and_animates(planar):
    state = to_ik(planar)
    step = apply(state, {"type": "request_ik", "target": [1.0, 1.0, 0.0]})
    st = step.state
    assert st.last_solutions is not None
    assert st.last_solutions.reachable
    assert [s.branch for s in st.last_solutions.solutions] == ["elbow_down", "elbow_up"]
    assert st.animation is not None
    assert st.animation.q_start.tobytes() == state.q.tobytes()
    assert np.allclose(st.animation.q_end, [0.0, math.pi / 2], atol=1e-12)
    assert st.animation.elapsed == 0.0


def test_request_ik_explicit_branch(planar):
    state = to_ik(planar)
    step = apply(
        state, {"type": "request_ik", "target": [1.0, 1.0, 0.0], "branch": "elbow_up"}
    )
    assert np.allclose(step.state.animation.q_end, [math.pi / 2, -math.pi / 2], atol=1e-12)


def test_request_ik_unknown_branch(planar):
    state = to_ik(planar)
    with pytest.raises(UnknownBranchError):
        apply(state, {"type": "request_ik", "target": [1.0, 1.0, 0.0], "branch": "sideways"})
    assert state.last_solutions is None


def test_request_ik_unreachable_target_is_recorded_without_animation(planar):
    state = to_ik(planar)
    step = apply(state, {"type": "request_ik", "target": [3.0, 0.0, 0.0]})
    st = step.state
    assert st.revision == state.revision + 1
    assert not st.last_solutions.reachable
    assert st.last_solutions.solutions == ()
    assert st.animation is None
    assert st.q.tobytes() == state.q.tobytes()


def test_request_ik_infeasible_branch_named_explicitly():
    state = to_ik(create_session(get_model("scara_ykx1000"), session_id="t-scara"))
    target = [0.101, 0.0, 0.25]
    probe = apply(state, {"type": "request_ik", "target": target}).state
    assert probe.last_solutions.reachable
    assert probe.last_solutions.solutions
    assert not any(s.feasible for s in probe.last_solutions.solutions)
    assert probe.animation is None
    branch = probe.last_solutions.solutions[0].branch
    with pytest.raises(InfeasibleBranchError):
        apply(state, {"type": "request_ik", "target": target, "branch": branch})


def test_request_ik_needs_ik_mode(planar):
    with pytest.raises(WrongModeError):
        apply(planar, {"type": "request_ik", "target": [1.0, 1.0, 0.0]})


def test_request_ik_validates_duration(planar):
    state = to_ik(planar)
    with pytest.raises(DomainError):
        apply(state, {"type": "request_ik", "target": [1.0, 1.0, 0.0], "duration": 0.0})
    with pytest.raises(DomainError):
        apply(state, {"type": "request_ik", "target": [1.0, 1.0, 0.0], "duration": -2.0})


def test_choose_branch_switches_to_the_other_solution(planar):
    state = to_ik(planar)
    state = apply(state, {"type": "request_ik", "target": [1.0, 1.0, 0.0]}).state
    state = apply(state, {"type": "tick", "dt": 1.0}).state     # land on elbow_down
    step = apply(state, {"type": "choose_branch", "branch": "elbow_up", "duration": 0.5})
    anim = step.state.animation
    assert anim.q_start.tobytes() == state.q.tobytes()
    assert np.allclose(anim.q_end, [math.pi / 2, -math.pi / 2], atol=1e-12)
    assert anim.duration == 0.5


def test_choose_branch_without_any_solution_set(planar):
    state = to_ik(planar)
    with pytest.raises(UnknownBranchError):
        apply(state, {"type": "choose_branch", "branch": "elbow_up"})


# --- animation and tick -----------------------------------------------------

def test_tick_without_animation_is_accepted_but_changes_nothing(arm):
    step = apply(arm, {"type": "tick", "dt": 0.033})
    assert not step.changed
    assert step.state is arm
    assert step.state.revision == arm.revision


def test_tick_interpolates_linearly(planar):
    state = to_ik(planar)
    state = apply(state, {"type": "request_ik", "target": [1.0, 1.0, 0.0]}).state
    q_start = np.array(state.animation.q_start)
    q_end = np.array(state.animation.q_end)
    step = apply(state, {"type": "tick", "dt": 0.25})
    st = step.state
    assert step.changed
    assert st.animation is not None
    assert st.animation.elapsed == 0.25
    assert np.allclose(st.q, q_start + 0.25 * (q_end - q_start), atol=1e-15)


def test_final_tick_lands_exactly_on_the_goal(planar):
    state = to_ik(planar)
    state = apply(state, {"type": "request_ik", "target": [1.0, 1.0, 0.0]}).state
    goal = state.animation.q_end
    for dt in (0.3, 0.3, 0.5):
        state = apply(state, {"type": "tick", "dt": dt}).state
    assert state.animation is None
    assert state.q.tobytes() == goal.tobytes()
    # a later tick idles again
    assert not apply(state, {"type": "tick", "dt": 0.1}).changed


def test_overshooting_tick_still_lands_exactly(planar):
    state = to_ik(planar)
    state = apply(state, {"type": "request_ik", "target": [1.0, 1.0, 0.0]}).state
    goal = state.animation.q_end
    state = apply(state, {"type": "tick", "dt": 99.0}).state
    assert state.animation is None
    assert state.q.tobytes() == goal.tobytes()


def test_negative_dt_is_rejected(planar):
    with pytest.raises(DomainError):
        apply(planar, {"type": "tick", "dt": -0.1})


def test_leaving_the_screen_abandons_the_move(planar):
    state = to_ik(planar)
    state = apply(state, {"type": "request_ik", "target": [1.0, 1.0, 0.0]}).state
    state = apply(state, {"type": "tick", "dt": 0.4}).state
    mid_q = state.q
    state = apply(state, {"type": "set_mode", "mode": "direct_kinematics"}).state
    assert state.animation is None
    assert state.q.tobytes() == mid_q.tobytes()     # freezes where it was


def test_new_request_restarts_from_the_current_pose(planar):
    state = to_ik(planar)
    state = apply(state, {"type": "request_ik", "target": [1.0, 1.0, 0.0]}).state
    state = apply(state, {"type": "tick", "dt": 0.5}).state
    mid_q = state.q
    state = apply(state, {"type": "request_ik", "target": [0.5, -0.5, 0.0]}).state
    assert state.animation.q_start.tobytes() == mid_q.tobytes()
    assert state.animation.elapsed == 0.0


# --- validate_matrices ------------------------------------------------------

def test_validate_matrices_runs_only_in_validate_mode(arm):
    with pytest.raises(WrongModeError):
        apply(arm, {"type": "validate_matrices", "matrices": []})


def test_validate_matrices_grades_against_the_current_pose(arm):
    state = to_ik(arm)
    state = apply(state, {"type": "set_mode", "mode": "validate"}).state
    good = [m.tolist() for m in expected_matrices(state.model, state.q)]
    step = apply(state, {"type": "validate_matrices", "matrices": good})
    assert step.diffs is not None
    assert len(step.diffs) == state.model.dof
    assert all(d.passed for d in step.diffs)
    assert step.state.revision == state.revision + 1

    bad = [[row[:] for row in m] for m in good]
    bad[0][0][3] += 0.25
    step2 = apply(state, {"type": "validate_matrices", "matrices": bad})
    assert not step2.diffs[0].passed
    assert step2.diffs[0].max_abs_error == pytest.approx(0.25)


def test_validate_matrices_product_mode(arm):
    state = to_ik(arm)
    state = apply(state, {"type": "set_mode", "mode": "validate"}).state
    product = fk_pose(state.model, state.q)
    prod = np.eye(4)
    prod[:3, :3] = product.rotation
    prod[:3, 3] = product.position
    step = apply(
        state,
        {"type": "validate_matrices", "matrices": [prod.tolist()], "mode": "product"},
    )
    assert len(step.diffs) == 1
    assert step.diffs[0].passed


def test_validate_matrices_rejects_bad_mode_and_tolerance(arm):
    state = to_ik(arm)
    state = apply(state, {"type": "set_mode", "mode": "validate"}).state
    with pytest.raises(DomainError):
        apply(state, {"type": "validate_matrices", "matrices": [], "mode": "loose"})
    with pytest.raises(DomainError):
        apply(state, {"type": "validate_matrices", "matrices": [], "tolerance": "tight"})


# --- reset ------------------------------------------------------------------

def test_reset_restores_home_but_keeps_the_mode(planar):
    state = to_ik(planar)
    state = apply(state, {"type": "request_ik", "target": [1.0, 1.0, 0.0]}).state
    state = apply(state, {"type": "tick", "dt": 0.3}).state
    before = state.revision
    state = apply(state, {"type": "reset"}).state
    assert state.mode is Mode.INVERSE_KINEMATICS
    assert state.q.tobytes() == state.model.home_q.tobytes()
    assert state.target is None
    assert state.last_solutions is None
    assert state.animation is None
    assert state.revision == before + 1


# --- revision discipline ----------------------------------------------------

def test_every_accepted_change_bumps_by_exactly_one(planar):
    script = [
        {"type": "tick", "dt": 0.05},                                   # idle: no bump
        {"type": "set_mode", "mode": "inverse_kinematics"},
        {"type": "request_ik", "target": [1.0, 1.0, 0.0]},
        {"type": "tick", "dt": 0.25},
        {"type": "choose_branch", "branch": "elbow_up"},
        {"type": "tick", "dt": 2.0},
        {"type": "set_mode", "mode": "validate"},
        {"type": "reset"},
        {"type": "set_mode", "mode": "inverse_kinematics"},
    ]
    state = planar
    for cmd in script:
        step = apply(state, cmd)
        expected = state.revision + (1 if step.changed else 0)
        assert step.state.revision == expected
        state = step.state
    assert state.revision == 1 + 8


def test_rejected_commands_never_touch_the_state(planar):
    state = to_ik(planar)
    state = apply(state, {"type": "request_ik", "target": [1.0, 1.0, 0.0]}).state
    fp = fingerprint(state)
    for cmd in [
        {"type": "set_joint", "joint": 0, "value": 0.3},            # wrong mode
        {"type": "request_ik", "target": [1.0, 1.0, 0.0], "branch": "nope"},
        {"type": "set_mode", "mode": "inverse_kinematics"},         # self edge
        {"type": "tick", "dt": -1.0},
        {"type": "bogus"},
    ]:
        with pytest.raises(SimError):
            apply(state, cmd)
        assert fingerprint(state) == fp


# --- replay -----------------------------------------------------------------

SCRIPT = [
    {"type": "set_joint", "joint": 0, "value": 0.4},
    {"type": "set_mode", "mode": "inverse_kinematics"},
    {"type": "request_ik", "target": [1.0, 1.0, 0.0]},
    {"type": "tick", "dt": 0.2},
    {"type": "choose_branch", "branch": "elbow_up", "duration": 0.5},
    {"type": "tick", "dt": 0.2},
    {"type": "set_joint", "joint": 1, "value": 9.9},   # rejected: wrong mode
    {"type": "tick", "dt": 0.7},
    {"type": "set_mode", "mode": "validate"},
    {"type": "set_mode", "mode": "inverse_kinematics"},
    {"type": "request_ik", "target": [0.25, -1.1, 0.0], "branch": "elbow_down"},
    {"type": "tick", "dt": 3.0},
]


def test_replay_reproduces_a_live_session_bit_for_bit():
    model = get_model("planar_rr")
    live = create_session(model, session_id="twin")
    for cmd in SCRIPT:
        try:
            live = apply(live, cmd).state
        except SimError:
            pass
    replayed = replay(model, SCRIPT, session_id="twin")
    assert fingerprint(replayed) == fingerprint(live)
    assert replayed.q.tobytes() == live.q.tobytes()


def test_replay_is_deterministic_across_runs():
    model = get_model("planar_rr")
    a = fingerprint(replay(model, SCRIPT))
    b = fingerprint(replay(model, SCRIPT))
    assert a == b


def test_command_log_round_trip():
    text = dump_command_log(SCRIPT)
    assert parse_command_log(text) == SCRIPT
    # blank lines are tolerated, garbage is not
    assert parse_command_log("\n" + text + "\n") == SCRIPT
    with pytest.raises(DomainError):
        parse_command_log("{not json}")
    with pytest.raises(DomainError):
        parse_command_log("[1, 2, 3]")
