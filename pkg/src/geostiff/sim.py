"""Joint-space impedance-control simulation with stiffness diagnostics.

The plant is M(q) qdd = tau + J^T F_ext (gravity and Coriolis terms are
assumed perfectly compensated), integrated with fixed-step semi-implicit
Euler at the controller rate.  The controller is tau = K (q0 - q) - B qdot,
with K the (optionally corrected) joint-space stiffness recomputed every
step and B designed by double diagonalization of (K, M).

Wrench profiles are expressed in the hybrid convention: force along base
axes, moment about the end-effector origin in base axes.  They are converted
to the configured frame with the current forward-kinematics pose.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from . import robot as robot_mod
from . import stiffness as st
from .connection import Frame
from .errors import (
    DimensionMismatch,
    IntegrationDiverged,
    NegativeEigenvalue,
    NonPositiveDefinite,
    ValidationError,
)

DIVERGENCE_SPEED = 1e3  # rad/s


@dataclass(frozen=True)
class ControllerConfig:
    task_hessian: st.TaskStiffness
    damping_ratio: float
    frame: Frame
    with_correction: bool
    rate: float  # Hz

    def __post_init__(self):
        if not 0.0 < self.damping_ratio <= 2.0:
            raise ValidationError("damping_ratio must be in (0, 2]")
        if not 100.0 <= self.rate <= 10000.0:
            raise ValidationError("rate must be in [100, 10000] Hz")
        if self.task_hessian.frame != self.frame:
            raise ValidationError("task_hessian frame must match controller frame")


class _SampledPath:
    """Time-sampled vector path with linear interpolation and end clamping."""

    def __init__(self, times, values):
        times = np.asarray(times, dtype=float)
        values = np.asarray(values, dtype=float)
        if times.ndim != 1 or values.ndim != 2 or len(times) != len(values):
            raise DimensionMismatch("times and samples must have matching lengths")
        if np.any(np.diff(times) <= 0):
            raise ValidationError("sample times must be strictly increasing")
        if not np.all(np.isfinite(values)):
            raise ValidationError("samples must be finite")
        self.times = times
        self.values = values

    def evaluate(self, t) -> np.ndarray:
        """Interpolated sample at time t; t may also be an array of times."""
        out = np.stack([
            np.interp(t, self.times, self.values[:, c])
            for c in range(self.values.shape[1])
        ], axis=-1)
        return out

    @classmethod
    def from_csv(cls, path, prefix: str):
        with open(path, "r", encoding="utf-8", newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            rows = [[float(x) for x in row] for row in reader if row]
        if not header or header[0] != "t":
            raise ValidationError(f"{path}: first column must be 't'")
        for c, name in enumerate(header[1:], start=1):
            if name != f"{prefix}{c}":
                raise ValidationError(f"{path}: expected column {prefix}{c}, got {name}")
        data = np.asarray(rows, dtype=float)
        return cls(data[:, 0], data[:, 1:])

    def to_csv(self, path, prefix: str):
        header = ["t"] + [f"{prefix}{c + 1}" for c in range(self.values.shape[1])]
        _write_csv(path, header, np.column_stack([self.times, self.values]))


class WrenchProfile(_SampledPath):
    """Time series of external wrenches, columns F1..F6."""

    def __init__(self, times, wrenches):
        super().__init__(times, wrenches)
        if self.values.shape[1] != 6:
            raise DimensionMismatch("wrench samples must have 6 components")

    @classmethod
    def from_csv(cls, path, prefix: str = "F"):
        return super().from_csv(path, prefix)

    @staticmethod
    def zero(duration: float) -> "WrenchProfile":
        return WrenchProfile([0.0, duration], np.zeros((2, 6)))

    @staticmethod
    def ramp(duration: float, final_wrench) -> "WrenchProfile":
        """Linear ramp from zero to final_wrench over the full duration."""
        return WrenchProfile([0.0, duration], np.vstack([np.zeros(6), final_wrench]))


class JointPath(_SampledPath):
    """Time series of equilibrium joint configurations, columns q1..qn."""

    @classmethod
    def from_csv(cls, path, prefix: str = "q"):
        return super().from_csv(path, prefix)

    @staticmethod
    def constant(q, duration: float) -> "JointPath":
        q = np.asarray(q, dtype=float)
        return JointPath([0.0, duration], np.vstack([q, q]))


@dataclass(frozen=True)
class SimTrace:
    t: np.ndarray
    q: np.ndarray
    qdot: np.ndarray
    tau: np.ndarray
    f_ext: np.ndarray
    sigma_max_sym: np.ndarray
    sigma_max_asym: np.ndarray

    def to_csv(self, path):
        n = self.q.shape[1]
        header = (
            ["t"]
            + [f"q{i + 1}" for i in range(n)]
            + [f"qd{i + 1}" for i in range(n)]
            + [f"tau{i + 1}" for i in range(n)]
            + [f"F{i + 1}" for i in range(6)]
            + ["sigma_max_sym", "sigma_max_asym"]
        )
        data = np.column_stack([
            self.t, self.q, self.qdot, self.tau, self.f_ext,
            self.sigma_max_sym, self.sigma_max_asym,
        ])
        _write_csv(path, header, data)


def _write_csv(path, header, data):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in data:
            fh.write(",".join(f"{x:.17g}" for x in row) + "\n")


def design_damping(k_joint, m_inertia, damping_ratio: float) -> np.ndarray:
    """Double-diagonalization damping: B = 2 zeta M^1/2 (M^-1/2 K M^-1/2)^1/2 M^1/2.

    K must be symmetric PSD (small negative eigenvalues down to -1e-9 are
    clamped to zero); M must be SPD.
    """
    k = np.asarray(k_joint, dtype=float)
    m = np.asarray(m_inertia, dtype=float)
    if k.shape != m.shape or k.ndim != 2 or k.shape[0] != k.shape[1]:
        raise DimensionMismatch("stiffness and inertia must be square and same size")
    k = 0.5 * (k + k.T)
    k_min = np.min(np.linalg.eigvalsh(k))
    if k_min < -1e-9:
        raise NegativeEigenvalue(
            f"stiffness has negative eigenvalue {k_min:.3e}"
        )
    m_vals, m_vecs = np.linalg.eigh(0.5 * (m + m.T))
    if np.min(m_vals) <= 0:
        raise NonPositiveDefinite("inertia matrix must be positive definite")
    m_sqrt = (m_vecs * np.sqrt(m_vals)) @ m_vecs.T
    m_isqrt = (m_vecs / np.sqrt(m_vals)) @ m_vecs.T
    k_tilde = m_isqrt @ k @ m_isqrt
    k_vals, k_vecs = np.linalg.eigh(0.5 * (k_tilde + k_tilde.T))
    k_vals = np.clip(k_vals, 0.0, None)
    root = (k_vecs * np.sqrt(k_vals)) @ k_vecs.T
    b = 2.0 * damping_ratio * m_sqrt @ root @ m_sqrt
    return 0.5 * (b + b.T)


def _wrench_in_frame(f_hybrid, rotation, frame: Frame) -> np.ndarray:
    if frame == Frame.HYBRID:
        return f_hybrid
    out = np.empty(6)
    out[:3] = rotation.T @ f_hybrid[:3]
    out[3:] = rotation.T @ f_hybrid[3:]
    return out


def simulate(model, controller: ControllerConfig, q0_trajectory: JointPath,
             wrench: WrenchProfile, duration: float, q_init=None) -> SimTrace:
    """Run the impedance-control simulation and log stiffness diagnostics.

    The state starts at rest at q_init (default: the trajectory's first
    sample, so the run begins at equilibrium).
    """
    if duration <= 0:
        raise ValidationError("duration must be positive")
    n = model.n
    if q0_trajectory.values.shape[1] != n:
        raise DimensionMismatch(
            f"trajectory has {q0_trajectory.values.shape[1]} columns, model has {n} joints"
        )
    dt = 1.0 / controller.rate
    steps = int(round(duration * controller.rate))
    frame = controller.frame

    times = np.arange(steps) * dt
    q0_samples = q0_trajectory.evaluate(times)
    f_samples = wrench.evaluate(times)

    if q_init is None:
        q = q0_samples[0].copy()
    else:
        q = np.asarray(q_init, dtype=float).copy()
        if q.shape != (n,):
            raise DimensionMismatch(f"q_init must have {n} components")
    qd = np.zeros(n)
    out_t = np.empty(steps)
    out_q = np.empty((steps, n))
    out_qd = np.empty((steps, n))
    out_tau = np.empty((steps, n))
    out_f = np.empty((steps, 6))
    out_sym = np.empty(steps)
    out_asym = np.empty(steps)

    for k in range(steps):
        t = times[k]
        kin = robot_mod.full_kinematics(model, q, frame)
        f_hybrid = f_samples[k]
        f = _wrench_in_frame(f_hybrid, kin.rotation, frame)
        k_joint = st.assemble_joint_stiffness(
            kin.jacobian, kin.derivative, controller.task_hessian.hessian,
            f, frame, controller.with_correction,
        )
        report = st.symmetry_report(k_joint)
        b = design_damping(0.5 * (k_joint + k_joint.T), kin.mass, controller.damping_ratio)
        tau = k_joint @ (q0_samples[k] - q) - b @ qd

        out_t[k] = t
        out_q[k] = q
        out_qd[k] = qd
        out_tau[k] = tau
        out_f[k] = f_hybrid
        out_sym[k] = report.sigma_max_sym
        out_asym[k] = report.sigma_max_asym

        qdd = np.linalg.solve(kin.mass, tau + kin.jacobian.T @ f)
        qd = qd + dt * qdd
        q = q + dt * qd
        if np.linalg.norm(qd) > DIVERGENCE_SPEED:
            raise IntegrationDiverged(
                f"joint speed {np.linalg.norm(qd):.1f} rad/s at t={t:.3f} s"
            )

    return SimTrace(out_t, out_q, out_qd, out_tau, out_f, out_sym, out_asym)


def semicircle_trajectory(model, q_start, duration: float, radius: float = 0.1,
                          samples: int = 201, damping: float = 0.01,
                          max_iters: int = 200, tol: float = 1e-8) -> JointPath:
    """Equilibrium trajectory wiping a semicircular arc with the end-effector.

    The arc lies in the base x-y plane through the starting end-effector
    position; joint samples come from damped-least-squares inverse kinematics
    seeded with the previous sample.
    """
    q = np.asarray(q_start, dtype=float).copy()
    p_start = robot_mod.forward_kinematics(model, q).translation
    center = p_start - np.array([radius, 0.0, 0.0])
    angles = np.linspace(0.0, np.pi, samples)
    times = np.linspace(0.0, duration, samples)
    qs = np.empty((samples, model.n))
    lam2 = damping * damping
    for s, ang in enumerate(angles):
        target = center + radius * np.array([np.cos(ang), np.sin(ang), 0.0])
        for _ in range(max_iters):
            pose = robot_mod.forward_kinematics(model, q)
            err = target - pose.translation
            if np.linalg.norm(err) < tol:
                break
            jp = robot_mod.jacobian(model, q, Frame.HYBRID)[:3]
            q = q + jp.T @ np.linalg.solve(jp @ jp.T + lam2 * np.eye(3), err)
        else:
            raise ValidationError(
                f"inverse kinematics did not converge at sample {s}"
            )
        qs[s] = q
    return JointPath(times, qs)
