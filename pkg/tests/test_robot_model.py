"""Tests for robot kinematics and the wheel-level plant."""

import math

import numpy as np
import pytest
from pydantic import ValidationError

from swarmpath.robot.model import (
    BodyVelocity,
    ControlVector,
    DynState,
    Pose,
    RobotParams,
    body_to_wheels,
    lateral_force,
    pose_step,
    state_derivative,
    system_matrices,
    wheel_traction,
    wheels_to_body,
)

# ---------------------------------------------------------------------------
# Parameters
# ---------------------------------------------------------------------------


class TestRobotParams:
    def test_defaults(self, params):
        assert params.mass_m == 0.9
        assert params.inertia_J == 0.001
        assert params.friction_F == 0.01
        assert params.wheel_radius_r == 0.021
        assert params.wheel_base_D == 0.145
        assert params.voltage_max_U == 12.0

    def test_no_load_speed(self, params):
        assert params.no_load_speed == pytest.approx(1200.0)

    @pytest.mark.parametrize("field", ["mass_m", "inertia_J", "wheel_radius_r", "wheel_base_D"])
    def test_non_positive_rejected(self, field):
        with pytest.raises(ValidationError):
            RobotParams(**{field: 0.0})

    def test_unknown_field_rejected(self):
        with pytest.raises(ValidationError):
            RobotParams(wheel_count=3)


# ---------------------------------------------------------------------------
# Kinematics
# ---------------------------------------------------------------------------


class TestWheelsToBody:
    def test_equal_wheels_drive_straight(self, params):
        body = wheels_to_body(10.0, 10.0, params)
        assert body.v == pytest.approx(0.21)
        assert body.omega == pytest.approx(0.0)

    def test_opposite_wheels_spin_in_place(self, params):
        body = wheels_to_body(-10.0, 10.0, params)
        assert body.v == pytest.approx(0.0)
        assert body.omega == pytest.approx(0.42 / 0.145)

    def test_right_faster_turns_counter_clockwise(self, params):
        assert wheels_to_body(1.0, 2.0, params).omega > 0

    def test_inverse_of_body_to_wheels(self, params):
        rng = np.random.default_rng(0)
        for v, omega in rng.uniform(-1, 1, size=(50, 2)):
            wheels = body_to_wheels(v, omega, params)
            body = wheels_to_body(wheels.omega_L, wheels.omega_R, params)
            assert body.v == pytest.approx(v, abs=1e-12)
            assert body.omega == pytest.approx(omega, abs=1e-12)

    def test_tangential_speeds(self, params):
        wheels = body_to_wheels(0.2, 1.0, params)
        assert wheels.v_L == pytest.approx(0.2 - 0.0725)
        assert wheels.v_R == pytest.approx(0.2 + 0.0725)


class TestPoseStep:
    def test_straight_line(self):
        pose = pose_step(Pose(0.0, 0.0, 0.0), BodyVelocity(1.0, 0.0), 2.0)
        assert (pose.x, pose.y, pose.theta) == pytest.approx((2.0, 0.0, 0.0))

    def test_quarter_circle(self):
        pose = pose_step(Pose(0.0, 0.0, 0.0), BodyVelocity(1.0, math.pi / 2), 1.0)
        assert pose.x == pytest.approx(2 / math.pi, abs=1e-6)
        assert pose.y == pytest.approx(2 / math.pi, abs=1e-6)
        assert pose.theta == pytest.approx(math.pi / 2)

    def test_heading_not_wrapped(self):
        pose = pose_step(Pose(0.0, 0.0, 3.0), BodyVelocity(0.0, 1.0), 1.0)
        assert pose.theta == pytest.approx(4.0)

    @pytest.mark.parametrize("dt", [0.0, -0.1])
    def test_non_positive_dt_rejected(self, dt):
        with pytest.raises(ValueError):
            pose_step(Pose(0.0, 0.0, 0.0), BodyVelocity(1.0, 0.0), dt)


class TestCorneringForces:
    def test_lateral_force(self, params):
        assert lateral_force(0.2, 1.0, params) == pytest.approx(0.09)

    def test_straight_driving_has_no_lateral_force(self, params):
        assert lateral_force(0.2, 0.0, params) == 0.0

    def test_traction_magnitude(self):
        assert wheel_traction(3.0, 4.0) == pytest.approx(5.0)


# ---------------------------------------------------------------------------
# Plant
# ---------------------------------------------------------------------------


class TestStateDerivative:
    def test_rest_without_input_stays_at_rest(self, params):
        derivative = state_derivative(DynState(), ControlVector(), params)
        assert derivative.as_array() == pytest.approx(np.zeros(4))

    def test_voltage_accelerates_wheel(self, params):
        derivative = state_derivative(DynState(), ControlVector(U_L=1.0), params)
        assert derivative.omega_L == pytest.approx(1.0 / params.inertia_J)
        assert derivative.omega_R == 0.0

    def test_friction_decelerates_wheel(self, params):
        derivative = state_derivative(DynState(omega_R=10.0), ControlVector(), params)
        assert derivative.omega_R == pytest.approx(-10.0 * params.friction_F / params.inertia_J)

    def test_load_forces(self, params):
        derivative = state_derivative(DynState(), ControlVector(F_L=0.5, F_R=0.5), params)
        assert derivative.v == pytest.approx(1.0 / params.mass_m)
        assert derivative.omega == pytest.approx(0.0)
        assert derivative.omega_L == pytest.approx(-params.wheel_radius_r * 0.5 / params.inertia_J)

    def test_right_force_spins_counter_clockwise(self, params):
        derivative = state_derivative(DynState(), ControlVector(F_R=0.1), params)
        assert derivative.omega > 0

    def test_linear_in_state_and_input(self, params):
        rng = np.random.default_rng(1)
        x1, x2 = (DynState(*rng.normal(size=4)) for _ in range(2))
        u1, u2 = (ControlVector(*rng.normal(size=4)) for _ in range(2))
        combined = state_derivative(
            DynState.from_array(2 * x1.as_array() + x2.as_array()),
            ControlVector(*(2 * u1.as_array() + u2.as_array())),
            params,
        )
        expected = (
            2 * state_derivative(x1, u1, params).as_array()
            + state_derivative(x2, u2, params).as_array()
        )
        assert combined.as_array() == pytest.approx(expected)

    def test_matrices_read_only(self, params):
        a, b = system_matrices(params)
        with pytest.raises(ValueError):
            a[0, 0] = 1.0
        with pytest.raises(ValueError):
            b[0, 0] = 1.0
