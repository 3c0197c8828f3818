import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from navsim.geo import principal_radii
from navsim.scenarios import (
    Scenario,
    ScenarioKind,
    angular_rate,
    angular_rate_dot,
    imu_increments,
    increment_table,
    specific_force,
    specific_force_dot,
    truth_state,
)
from navsim.updates import frame_rates

LAT30 = float(np.deg2rad(30.0))


def scenario_a(duration=3600.0, dt=0.02):
    return Scenario(
        kind=ScenarioKind.CONST_EAST, lat0=LAT30, duration=duration, dt=dt
    )


def scenario_b(duration=7200.0, dt=0.02, substeps=100):
    return Scenario(
        kind=ScenarioKind.SINE_EAST,
        lat0=LAT30,
        duration=duration,
        dt=dt,
        accel_amplitude=10.0,
        accel_omega=0.02 * math.pi,
        substeps=substeps,
    )


class TestTruthState:
    def test_initial_state(self):
        s = scenario_a()
        st = truth_state(s, 0.0)
        assert_allclose(st.v, [0.0, 0.0, 500.0])
        assert st.p.lon == 0.0 and st.p.lat == LAT30 and st.p.h == 0.0
        assert_allclose(st.c_bn, np.eye(3))

    def test_const_east_longitude_closed_form(self):
        s = scenario_a()
        st = truth_state(s, 3600.0)
        _, r_e = principal_radii(LAT30)
        assert st.p.lon == pytest.approx(
            500.0 * 3600.0 / (r_e * np.cos(LAT30)), rel=1e-14
        )
        assert st.p.lon == pytest.approx(0.32559993456277975, rel=1e-13)
        assert st.p.lat == LAT30 and st.p.h == 0.0

    def test_sine_east_periodicity(self):
        s = scenario_b()
        period = 2.0 * np.pi / s.accel_omega
        st = truth_state(s, period)
        assert st.v[2] == pytest.approx(500.0, abs=1e-9)
        peak = truth_state(s, period / 2.0)
        assert peak.v[2] == pytest.approx(
            500.0 + 2.0 * s.accel_amplitude / s.accel_omega, rel=1e-12
        )

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            truth_state(scenario_a(), 3600.02 + 1.0)

    def test_velocity_rate_equation_residual_const(self):
        # FD of the truth velocity against the rate equation; the constant
        # case has v-dot identically zero
        s = scenario_a()
        eps = 0.25
        for t in (100.0, 1000.0, 3000.0):
            ts = [t - 2 * eps, t - eps, t + eps, t + 2 * eps]
            vs = np.array([truth_state(s, x).v for x in ts])
            vdot_fd = (vs[0] - 8 * vs[1] + 8 * vs[2] - vs[3]) / (12 * eps)
            st = truth_state(s, t)
            rates = frame_rates(st, s.model)
            rhs = (
                specific_force(s, t)
                - np.cross(2 * rates.omega_ie + rates.omega_en, st.v)
                + rates.g
            )
            assert np.max(np.abs(vdot_fd - rhs)) <= 1e-12

    def test_velocity_rate_equation_residual_sine(self):
        # FD-limited tolerance: the 5-point stencil of a 500 m/s state
        # cannot resolve below ~1e-8 (see repository notes)
        s = scenario_b(duration=600.0)
        eps = 0.25
        for t in (50.0, 333.0):
            ts = [t - 2 * eps, t - eps, t + eps, t + 2 * eps]
            vs = np.array([truth_state(s, x).v for x in ts])
            vdot_fd = (vs[0] - 8 * vs[1] + 8 * vs[2] - vs[3]) / (12 * eps)
            st = truth_state(s, t)
            rates = frame_rates(st, s.model)
            rhs = (
                specific_force(s, t)
                - np.cross(2 * rates.omega_ie + rates.omega_en, st.v)
                + rates.g
            )
            assert np.max(np.abs(vdot_fd - rhs)) <= 5e-8

    @pytest.mark.parametrize("mk", [scenario_a, scenario_b])
    def test_position_rate_equation_residual(self, mk):
        from navsim.geo import curvature_matrix

        s = mk(duration=600.0)
        eps = 0.05
        for t in (37.0, 400.0):
            ps = [truth_state(s, x).p.as_array() for x in
                  (t - 2 * eps, t - eps, t + eps, t + 2 * eps)]
            pdot_fd = (ps[0] - 8 * ps[1] + 8 * ps[2] - ps[3]) / (12 * eps)
            st = truth_state(s, t)
            pdot = curvature_matrix(st.p, s.model) @ st.v
            # atol covers stencil roundoff on the identically-zero
            # latitude/height rates
            assert_allclose(pdot_fd, pdot, rtol=1e-10, atol=5e-16)


class TestImuIncrements:
    def test_const_east_symmetry(self):
        s = scenario_a()
        imu = imu_increments(s, 100.0)
        assert_allclose(imu.dtheta1, imu.dtheta2, rtol=0, atol=0)
        assert_allclose(imu.dv1, imu.dv2, rtol=0, atol=0)

    def test_const_east_gyro_magnitude(self):
        # |dtheta_i| = |w_in| * dt/2 with |w_in| about 1.6e-4 rad/s
        s = scenario_a()
        imu = imu_increments(s, 0.0)
        assert np.linalg.norm(imu.dtheta1) == pytest.approx(
            1.6e-4 * 0.01, rel=0.05
        )

    def test_const_east_accel_matches_rate_equation(self):
        s = scenario_a()
        imu = imu_increments(s, 0.0)
        st = truth_state(s, 0.0)
        rates = frame_rates(st, s.model)
        f = np.cross(2 * rates.omega_ie + rates.omega_en, st.v) - rates.g
        assert_allclose(imu.dv1, 0.5 * s.dt * f, rtol=1e-12)

    def test_sine_quadrature_self_convergence(self):
        # doubling the sub-step count moves increments by < 1e-14 relative
        s1 = scenario_b(duration=10.0, substeps=100)
        s2 = scenario_b(duration=10.0, substeps=200)
        for t_k in (0.0, 5.0):
            a = imu_increments(s1, t_k)
            b = imu_increments(s2, t_k)
            for name in ("dtheta1", "dtheta2", "dv1", "dv2"):
                x, y = getattr(a, name), getattr(b, name)
                assert np.max(np.abs(x - y)) <= 1e-14 * max(1.0, np.max(np.abs(x)))

    def test_half_intervals_concatenate(self):
        # two half-interval integrals equal the full-interval integral of
        # the same quadrature
        s = scenario_b(duration=10.0)
        imu = imu_increments(s, 2.0)
        full = Scenario(
            kind=ScenarioKind.SINE_EAST,
            lat0=LAT30,
            duration=10.0,
            dt=2 * s.dt,
            accel_amplitude=10.0,
            accel_omega=0.02 * math.pi,
            substeps=200,
        )
        # one half-interval of the doubled scenario spans a full dt here
        whole = imu_increments(full, 2.0)
        assert_allclose(
            imu.dtheta1 + imu.dtheta2, whole.dtheta1, rtol=1e-12, atol=1e-20
        )
        assert_allclose(imu.dv1 + imu.dv2, whole.dv1, rtol=1e-12, atol=1e-18)

    def test_table_matches_per_call(self):
        s = scenario_b(duration=20.0)
        dth, dv = increment_table(s)
        for k in (0, 13, 499, 999):
            imu = imu_increments(s, k * s.dt)
            assert_allclose(dth[k, 0], imu.dtheta1, rtol=1e-13, atol=1e-22)
            assert_allclose(dth[k, 1], imu.dtheta2, rtol=1e-13, atol=1e-22)
            assert_allclose(dv[k, 0], imu.dv1, rtol=1e-13, atol=1e-18)
            assert_allclose(dv[k, 1], imu.dv2, rtol=1e-13, atol=1e-18)

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            imu_increments(scenario_a(duration=1.0), 1.0)


class TestAnalyticDerivatives:
    @pytest.mark.parametrize("mk", [scenario_a, scenario_b])
    def test_rate_derivative(self, mk):
        s = mk(duration=600.0)
        eps = 1e-3
        for t in (10.0, 123.0):
            fd = (angular_rate(s, t + eps) - angular_rate(s, t - eps)) / (2 * eps)
            assert_allclose(angular_rate_dot(s, t), fd, rtol=1e-6, atol=1e-16)

    @pytest.mark.parametrize("mk", [scenario_a, scenario_b])
    def test_force_derivative(self, mk):
        s = mk(duration=600.0)
        eps = 1e-3
        for t in (10.0, 123.0):
            fd = (specific_force(s, t + eps) - specific_force(s, t - eps)) / (2 * eps)
            assert_allclose(specific_force_dot(s, t), fd, rtol=1e-6, atol=5e-7)


class TestScenarioValidation:
    def test_duration_must_be_multiple(self):
        with pytest.raises(ValueError):
            Scenario(kind=ScenarioKind.CONST_EAST, lat0=LAT30, duration=1.01, dt=0.02)

    def test_sine_needs_omega(self):
        with pytest.raises(ValueError):
            Scenario(
                kind=ScenarioKind.SINE_EAST,
                lat0=LAT30,
                duration=1.0,
                dt=0.02,
                accel_amplitude=10.0,
                accel_omega=0.0,
            )

    def test_substeps_positive(self):
        with pytest.raises(ValueError):
            Scenario(
                kind=ScenarioKind.CONST_EAST, lat0=LAT30, duration=1.0, dt=0.02,
                substeps=0,
            )
