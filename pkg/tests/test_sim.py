"""Impedance-control simulation, damping design, and trace I/O."""

import numpy as np
import pytest

from geostiff import robot, sim, stiffness as st
from geostiff.connection import Frame
from geostiff.errors import (
    DimensionMismatch,
    IntegrationDiverged,
    NegativeEigenvalue,
    NonPositiveDefinite,
    ValidationError,
)

Q0_IIWA = np.array([0.0, 0.5, 0.0, -1.2, 0.0, 0.8, 0.0])


def body_controller(with_correction=True, zeta=1.0, rate=1000.0,
                    k_t=1000.0, k_r=100.0):
    return sim.ControllerConfig(
        task_hessian=st.TaskStiffness.diagonal(k_t, k_r, Frame.BODY),
        damping_ratio=zeta,
        frame=Frame.BODY,
        with_correction=with_correction,
        rate=rate,
    )


class TestControllerConfig:
    def test_rejects_bad_damping_ratio(self):
        with pytest.raises(ValidationError):
            body_controller(zeta=0.0)
        with pytest.raises(ValidationError):
            body_controller(zeta=2.5)

    def test_rejects_bad_rate(self):
        with pytest.raises(ValidationError):
            body_controller(rate=50.0)

    def test_rejects_frame_mismatch(self):
        hessian = st.TaskStiffness.diagonal(100.0, 10.0, Frame.HYBRID)
        with pytest.raises(ValidationError):
            sim.ControllerConfig(hessian, 1.0, Frame.BODY, True, 1000.0)


class TestSampledPaths:
    def test_interpolation_and_clamping(self):
        path = sim.JointPath([0.0, 1.0], [[0.0, 0.0], [2.0, 4.0]])
        assert np.abs(path.evaluate(0.5) - [1.0, 2.0]).max() < 1e-15
        assert np.array_equal(path.evaluate(5.0), [2.0, 4.0])
        assert np.array_equal(path.evaluate(-1.0), [0.0, 0.0])

    def test_rejects_nonincreasing_times(self):
        with pytest.raises(ValidationError):
            sim.JointPath([0.0, 0.0], [[0.0], [1.0]])

    def test_rejects_nonfinite_samples(self):
        with pytest.raises(ValidationError):
            sim.JointPath([0.0, 1.0], [[0.0], [np.inf]])

    def test_wrench_profile_needs_six_columns(self):
        with pytest.raises(DimensionMismatch):
            sim.WrenchProfile([0.0, 1.0], np.zeros((2, 5)))

    def test_ramp_profile(self):
        ramp = sim.WrenchProfile.ramp(10.0, [0, 0, 0, 0, 0, 10.0])
        assert np.array_equal(ramp.evaluate(0.0), np.zeros(6))
        assert np.abs(ramp.evaluate(5.0) - [0, 0, 0, 0, 0, 5.0]).max() < 1e-12

    def test_csv_round_trip(self, tmp_path):
        path = sim.JointPath([0.0, 0.5, 1.0], [[0.1, 0.2], [0.3, 0.4], [0.5, 0.6]])
        file = tmp_path / "traj.csv"
        path.to_csv(file, "q")
        again = sim.JointPath.from_csv(file)
        assert np.array_equal(again.times, path.times)
        assert np.array_equal(again.values, path.values)

    def test_csv_header_validated(self, tmp_path):
        file = tmp_path / "bad.csv"
        file.write_text("t,x1,x2\n0,0,0\n1,1,1\n", encoding="utf-8")
        with pytest.raises(ValidationError):
            sim.JointPath.from_csv(file)


class TestDesignDamping:
    def test_scalar_critically_damped(self):
        b = sim.design_damping([[8.0]], [[2.0]], 1.0)
        assert b[0, 0] == pytest.approx(8.0, rel=1e-12)

    def test_zero_stiffness_gives_zero_damping(self):
        b = sim.design_damping(np.zeros((3, 3)), np.eye(3), 1.0)
        assert np.abs(b).max() < 1e-12

    def test_iiwa7_damping_spd(self, iiwa7):
        m = robot.mass_matrix(iiwa7, np.zeros(7))
        k = np.diag([50.0, 40.0, 30.0, 20.0, 10.0, 5.0, 2.0])
        b = sim.design_damping(k, m, 0.7)
        assert np.abs(b - b.T).max() < 1e-9
        assert np.min(np.linalg.eigvalsh(b)) > 0.0

    def test_matches_generalized_eigenproblem_oracle(self, iiwa7, rng):
        # in the modal coordinates of (K, M) the design is diagonal with
        # entries 2 zeta sqrt(k_i) m-normalized; reconstruct independently
        m = robot.mass_matrix(iiwa7, rng.uniform(-1, 1, 7))
        a = rng.normal(size=(7, 7))
        k = a @ a.T
        zeta = 0.6
        b = sim.design_damping(k, m, zeta)
        mv, mvec = np.linalg.eigh(m)
        m_isqrt = (mvec / np.sqrt(mv)) @ mvec.T
        kv, kvec = np.linalg.eigh(m_isqrt @ k @ m_isqrt)
        b_tilde = m_isqrt @ b @ m_isqrt
        modal = kvec.T @ b_tilde @ kvec
        assert np.abs(np.diag(modal) - 2 * zeta * np.sqrt(kv)).max() < 1e-9
        assert np.abs(modal - np.diag(np.diag(modal))).max() < 1e-9

    def test_rejects_indefinite_stiffness(self):
        with pytest.raises(NegativeEigenvalue):
            sim.design_damping(np.diag([1.0, -1.0]), np.eye(2), 1.0)

    def test_rejects_indefinite_inertia(self):
        with pytest.raises(NonPositiveDefinite):
            sim.design_damping(np.eye(2), np.diag([1.0, 0.0]), 1.0)


class TestSimulate:
    def test_equilibrium_is_fixed_point(self, iiwa7):
        trajectory = sim.JointPath.constant(Q0_IIWA, 1.0)
        trace = sim.simulate(iiwa7, body_controller(), trajectory,
                             sim.WrenchProfile.zero(1.0), 1.0)
        assert np.abs(trace.q - Q0_IIWA).max() <= 1e-12
        assert np.abs(trace.qdot).max() <= 1e-12

    def test_energy_decays_from_offset(self, iiwa7):
        controller = body_controller(zeta=1.0)
        trajectory = sim.JointPath.constant(Q0_IIWA, 2.0)
        trace = sim.simulate(iiwa7, controller, trajectory,
                             sim.WrenchProfile.zero(2.0), 2.0,
                             q_init=Q0_IIWA + 0.05)
        energy = np.empty(len(trace.t))
        for i in range(len(trace.t)):
            kin = robot.full_kinematics(iiwa7, trace.q[i], Frame.BODY)
            k = st.assemble_joint_stiffness(
                kin.jacobian, kin.derivative, controller.task_hessian.hessian,
                np.zeros(6), Frame.BODY, True)
            dq = trace.q[i] - Q0_IIWA
            energy[i] = (0.5 * trace.qdot[i] @ kin.mass @ trace.qdot[i]
                         + 0.5 * dq @ k @ dq)
        assert np.max(np.diff(energy)) <= 1e-6
        assert energy[-1] < 0.01 * energy[0]

    def test_deterministic(self, iiwa7):
        trajectory = sim.JointPath.constant(Q0_IIWA, 0.5)
        wrench = sim.WrenchProfile.ramp(0.5, [0, 0, 0, 0, -2.0, 0])
        a = sim.simulate(iiwa7, body_controller(), trajectory, wrench, 0.5)
        b = sim.simulate(iiwa7, body_controller(), trajectory, wrench, 0.5)
        assert np.array_equal(a.q, b.q)
        assert np.array_equal(a.qdot, b.qdot)
        assert np.array_equal(a.tau, b.tau)

    def test_divergence_detected(self, anthro3r):
        # drive the fixed-step integrator unstable: very stiff gains at a
        # low controller rate with almost no damping
        controller = sim.ControllerConfig(
            st.TaskStiffness.diagonal(1e8, 1e6, Frame.BODY),
            0.001, Frame.BODY, True, 100.0)
        q0 = np.array([0.0, 0.5, 0.5])
        trajectory = sim.JointPath.constant(q0, 10.0)
        with pytest.raises(IntegrationDiverged):
            sim.simulate(anthro3r, controller, trajectory,
                         sim.WrenchProfile.zero(10.0), 10.0, q_init=q0 + 0.01)

    def test_corrected_run_logs_symmetric_stiffness(self, iiwa7):
        trajectory = sim.JointPath.constant(Q0_IIWA, 1.0)
        wrench = sim.WrenchProfile.ramp(1.0, [0, 0, 0, 0, -5.0, 0])
        trace = sim.simulate(iiwa7, body_controller(True), trajectory, wrench, 1.0)
        ratio = trace.sigma_max_asym / np.maximum(trace.sigma_max_sym, 1e-12)
        assert ratio.max() <= 1e-9

    def test_uncorrected_run_logs_asymmetry(self, iiwa7):
        trajectory = sim.JointPath.constant(Q0_IIWA, 1.0)
        wrench = sim.WrenchProfile.ramp(1.0, [0, 0, 0, 0, -5.0, 0])
        trace = sim.simulate(iiwa7, body_controller(False), trajectory, wrench, 1.0)
        assert trace.sigma_max_asym.max() > 0.5

    def test_duration_must_be_positive(self, iiwa7):
        with pytest.raises(ValidationError):
            sim.simulate(iiwa7, body_controller(),
                         sim.JointPath.constant(Q0_IIWA, 1.0),
                         sim.WrenchProfile.zero(1.0), 0.0)

    def test_trace_csv_round_trip(self, iiwa7, tmp_path):
        trajectory = sim.JointPath.constant(Q0_IIWA, 0.1)
        trace = sim.simulate(iiwa7, body_controller(), trajectory,
                             sim.WrenchProfile.zero(0.1), 0.1)
        out = tmp_path / "trace.csv"
        trace.to_csv(out)
        lines = out.read_text(encoding="utf-8").splitlines()
        header = lines[0].split(",")
        assert header[0] == "t"
        assert header[-2:] == ["sigma_max_sym", "sigma_max_asym"]
        assert len(lines) == 1 + len(trace.t)
        # full round trip precision through %.17g
        row = np.array([float(x) for x in lines[1].split(",")])
        assert row[1:8] == pytest.approx(trace.q[0], abs=0.0)


class TestSemicircleTrajectory:
    def test_tracks_arc_in_base_plane(self, iiwa7):
        traj = sim.semicircle_trajectory(iiwa7, Q0_IIWA, 10.0, radius=0.1,
                                         samples=41)
        start = robot.forward_kinematics(iiwa7, traj.values[0]).translation
        center = start - np.array([0.1, 0.0, 0.0])
        for qs, ang in zip(traj.values, np.linspace(0, np.pi, 41)):
            p = robot.forward_kinematics(iiwa7, qs).translation
            target = center + 0.1 * np.array([np.cos(ang), np.sin(ang), 0.0])
            assert np.linalg.norm(p - target) < 1e-7

    def test_unreachable_arc_fails(self, iiwa7):
        with pytest.raises(ValidationError):
            sim.semicircle_trajectory(iiwa7, Q0_IIWA, 10.0, radius=5.0,
                                      samples=11, max_iters=20)
