"""Forward kinematics tests.

Position expectations are hand-derived from the catalog geometry and frozen
here. Structural invariants (rigid link lengths, bit-exact bottom rows,
determinism) are checked across random configurations.
"""

from __future__ import annotations

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from armsim.catalog import get_model
from armsim.errors import DomainError, ShapeError
from armsim.fk import (
    expected_matrices,
    fk_chain,
    fk_pose,
    joint_transform,
    validate_matrices,
)
from armsim.transforms import compose, rotation_about, homogeneous_from, translation


def random_q(model, rng):
    return rng.uniform(model.lower, model.upper)


class TestJointTransform:
    def test_revolute_is_origin_then_rotation(self):
        j = get_model("articulated_rrr").joints[0]  # waist, z axis, origin at z=0.2
        t = joint_transform(j, 0.7)
        assert_array_equal(
            t, compose(j.origin, homogeneous_from(rotation_about(j.axis, 0.7)))
        )
        # rotation happens about the joint's own frame, after the offset
        assert_allclose(t[:3, 3], [0.0, 0.0, 0.2], atol=0)

    def test_prismatic_is_origin_then_slide(self):
        j = get_model("cartesian_ppp").joints[0]  # x rail at z=0.1
        t = joint_transform(j, 0.3)
        assert_array_equal(t, compose(j.origin, translation([0.3, 0.0, 0.0])))
        assert_allclose(t[:3, 3], [0.3, 0.0, 0.1], atol=0)

    def test_zero_value_is_pure_origin(self):
        for model_name in ("articulated_rrr", "cartesian_ppp"):
            for j in get_model(model_name).joints:
                assert_array_equal(joint_transform(j, 0.0), j.origin)

    def test_non_finite_value_rejected(self):
        j = get_model("articulated_rrr").joints[0]
        with pytest.raises(DomainError):
            joint_transform(j, math.nan)


class TestFkPose:
    def test_articulated_home(self):
        pose = fk_pose(get_model("articulated_rrr"), [0.0, 0.0, 0.0])
        assert_allclose(pose.position, [0.55, 0.0, 0.2], atol=1e-12)
        assert_allclose(tuple(pose.euler_zyx)[:3], (0.0, 0.0, 0.0), atol=1e-12)

    def test_articulated_waist_quarter_turn(self):
        pose = fk_pose(get_model("articulated_rrr"), [math.pi / 2.0, 0.0, 0.0])
        assert_allclose(pose.position, [0.0, 0.55, 0.2], atol=1e-12)
        assert pose.euler_zyx.alpha == pytest.approx(math.pi / 2.0)

    def test_articulated_shoulder_straight_up(self):
        # shoulder axis is -y, so +pi/2 tilts the arm up to +z; the pose is
        # gimbal singular and must be flagged, not mangled
        pose = fk_pose(get_model("articulated_rrr"), [0.0, math.pi / 2.0, 0.0])
        assert_allclose(pose.position, [0.0, 0.0, 0.75], atol=1e-12)
        assert pose.euler_zyx.singular

    def test_cartesian_moves_along_axes(self):
        m = get_model("cartesian_ppp")
        base = fk_pose(m, [0.0, 0.0, 0.0]).position
        moved = fk_pose(m, [0.1, 0.2, 0.3]).position
        assert_allclose(moved - base, [0.1, 0.2, 0.3], atol=1e-12)
        assert_array_equal(fk_pose(m, [0.1, 0.2, 0.3]).rotation, np.eye(3))

    def test_cylindrical_home(self):
        pose = fk_pose(get_model("cylindrical_rpp"), get_model("cylindrical_rpp").home_q)
        assert_allclose(pose.position, [0.35, 0.0, 0.45], atol=1e-12)

    def test_spherical_home(self):
        pose = fk_pose(get_model("spherical_rrp"), get_model("spherical_rrp").home_q)
        assert_allclose(pose.position, [0.35, 0.0, 0.25], atol=1e-12)

    def test_scara_home(self):
        pose = fk_pose(get_model("scara_rrp"), get_model("scara_rrp").home_q)
        assert_allclose(pose.position, [0.55, 0.0, 0.2], atol=1e-12)

    def test_planar_elbow_bend(self):
        pose = fk_pose(get_model("planar_rr"), [0.0, math.pi / 2.0])
        assert_allclose(pose.position, [1.0, 1.0, 0.0], atol=1e-12)

    def test_wrong_length_vector(self):
        with pytest.raises(ShapeError):
            fk_pose(get_model("articulated_rrr"), [0.0, 0.0])


class TestFkChain:
    @pytest.mark.parametrize("name", ["articulated_rrr", "scara_ykx1000", "wyvernclaws5"])
    def test_chain_length_is_dof_plus_tool(self, name):
        m = get_model(name)
        assert len(fk_chain(m, m.home_q)) == m.dof + 1

    def test_chain_prefix_consistency(self):
        m = get_model("wyvernclaws5")
        rng = np.random.default_rng(3)
        q = random_q(m, rng)
        chain = fk_chain(m, q)
        running = None
        for k, joint in enumerate(m.joints):
            step = joint_transform(joint, q[k])
            running = step if running is None else compose(running, step)
            assert_array_equal(chain[k], running)
        assert_array_equal(chain[-1], compose(running, m.tool_offset))

    def test_pose_equals_last_chain_entry(self):
        m = get_model("articulated_rrr")
        rng = np.random.default_rng(5)
        for _ in range(20):
            q = random_q(m, rng)
            assert_array_equal(fk_pose(m, q).position, fk_chain(m, q)[-1][:3, 3])

    def test_link_lengths_are_rigid(self):
        # Distance between consecutive revolute frames never depends on q.
        m = get_model("articulated_rrr")
        rng = np.random.default_rng(9)
        expected = [np.linalg.norm(j.origin_xyz) for j in m.joints]
        for _ in range(50):
            chain = fk_chain(m, random_q(m, rng))
            prev = np.zeros(3)
            for k, want in enumerate(expected):
                got = np.linalg.norm(chain[k][:3, 3] - prev)
                assert got == pytest.approx(want, abs=1e-12)
                prev = chain[k][:3, 3]

    def test_prismatic_link_length_follows_value(self):
        m = get_model("cartesian_ppp")
        for v in (0.0, 0.2, 0.5):
            chain = fk_chain(m, [v, 0.0, 0.0])
            # first frame sits at origin offset (0,0,0.1) plus v along x
            assert np.linalg.norm(chain[0][:3, 3]) == pytest.approx(math.hypot(v, 0.1), abs=1e-12)

    def test_bottom_rows_bit_exact(self):
        bottom = np.array([0.0, 0.0, 0.0, 1.0]).tobytes()
        rng = np.random.default_rng(13)
        for name in ("articulated_rrr", "scara_rrp", "cylindrical_rpp", "wyvernclaws4"):
            m = get_model(name)
            for _ in range(10):
                for t in fk_chain(m, random_q(m, rng)):
                    assert t[3, :].tobytes() == bottom

    def test_deterministic_bit_identical(self):
        m = get_model("wyvernclaws5")
        q = [0.3, -0.5, 1.1, 0.4, -2.0]
        first = fk_chain(m, q)
        second = fk_chain(m, q)
        for a, b in zip(first, second):
            assert a.tobytes() == b.tobytes()

    def test_orientation_composes_joint_rotations(self):
        m = get_model("planar_rr")
        q = [0.4, 0.9]
        chain = fk_chain(m, q)
        assert_allclose(chain[-1][:3, :3], rotation_about([0, 0, 1], 1.3), atol=1e-12)


class TestValidateMatrices:
    def setup_method(self):
        self.model = get_model("articulated_rrr")
        self.q = [0.7, 0.3, -0.4]
        self.factors = [np.array(t) for t in expected_matrices(self.model, self.q)]

    def test_correct_factors_pass_exactly(self):
        diffs = validate_matrices(self.model, self.q, self.factors)
        assert all(d.passed for d in diffs)
        assert all(d.max_abs_error == 0.0 for d in diffs)
        assert all(d.reason is None for d in diffs)

    def test_identity_submissions_fail_on_moved_joints(self):
        # a student who leaves the prefilled identity matrices untouched
        diffs = validate_matrices(self.model, self.q, [np.eye(4)] * 3)
        assert not any(d.passed for d in diffs)
        assert all(d.reason is None for d in diffs)
        assert diffs[0].max_abs_error == pytest.approx(
            max(abs(math.cos(0.7) - 1.0), abs(math.sin(0.7))) + 0.0, abs=1e-12
        )

    def test_swapped_sine_signs_give_two_sine_error(self):
        # using the opposite rotation direction stays orthonormal; the grade
        # catches it with a max error of 2|sin(angle)|
        wrong = [f.copy() for f in self.factors]
        wrong[0][:3, :3] = rotation_about([0, 0, 1], -0.7)
        diffs = validate_matrices(self.model, self.q, wrong)
        assert not diffs[0].passed
        assert diffs[0].reason is None
        assert diffs[0].max_abs_error == pytest.approx(2.0 * math.sin(0.7), abs=1e-12)

    def test_scale_factor_reason(self):
        wrong = [f.copy() for f in self.factors]
        wrong[1][3, 3] = 2.0
        diffs = validate_matrices(self.model, self.q, wrong)
        assert not diffs[1].passed
        assert diffs[1].reason == "scale_factor_not_one"

    def test_perspective_reason(self):
        wrong = [f.copy() for f in self.factors]
        wrong[2][3, 0] = 0.25
        diffs = validate_matrices(self.model, self.q, wrong)
        assert diffs[2].reason == "perspective_not_zero"

    def test_non_orthonormal_reason(self):
        wrong = [f.copy() for f in self.factors]
        wrong[0][:3, :3] *= 1.1
        diffs = validate_matrices(self.model, self.q, wrong)
        assert diffs[0].reason == "rotation_not_orthonormal"

    def test_non_finite_reason(self):
        wrong = [f.copy() for f in self.factors]
        wrong[0][0, 0] = math.nan
        diffs = validate_matrices(self.model, self.q, wrong)
        assert diffs[0].reason == "not_finite"
        assert not diffs[0].passed

    def test_rounded_entries_pass_default_tolerance(self):
        rounded = [np.round(f, 3) for f in self.factors]
        diffs = validate_matrices(self.model, self.q, rounded)
        assert all(d.passed for d in diffs), [d.reason for d in diffs]

    def test_tolerance_is_respected(self):
        wrong = [f.copy() for f in self.factors]
        wrong[0][0, 3] += 5e-4
        assert validate_matrices(self.model, self.q, wrong)[0].passed
        assert not validate_matrices(self.model, self.q, wrong, tolerance=1e-4)[0].passed

    def test_product_mode_includes_tool_offset(self):
        m = get_model("scara_rrp")
        q = [0.2, -0.5, 0.1]
        full = fk_chain(m, q)[-1]
        assert validate_matrices(m, q, [np.array(full)], mode="product")[0].passed
        without_tool = fk_chain(m, q)[-2]
        diff = validate_matrices(m, q, [np.array(without_tool)], mode="product")[0]
        assert not diff.passed
        # scara tool drops 5 cm; forgetting it shows up as exactly that error
        assert diff.max_abs_error == pytest.approx(0.05, abs=1e-12)

    def test_wrong_count_is_shape_error(self):
        with pytest.raises(ShapeError):
            validate_matrices(self.model, self.q, self.factors[:2])

    def test_wrong_shape_is_shape_error(self):
        with pytest.raises(ShapeError):
            validate_matrices(self.model, self.q, [np.eye(3)] + self.factors[1:])

    def test_non_numeric_is_shape_error(self):
        with pytest.raises(ShapeError):
            validate_matrices(self.model, self.q, [[["x"] * 4] * 4] + self.factors[1:])

    def test_unknown_mode_rejected(self):
        with pytest.raises(DomainError):
            expected_matrices(self.model, self.q, mode="sideways")

    def test_diff_matrices_are_read_only(self):
        d = validate_matrices(self.model, self.q, self.factors)[0]
        with pytest.raises(ValueError):
            d.diff[0, 0] = 1.0
