"""Joint-space stiffness with Christoffel correction, and symmetry diagnostics.

The joint stiffness is assembled in the d(tau)/dq layout: entry (i, j) is the
sensitivity of torque i to joint displacement j, so the kinematic term has
columns dJ^T/dq_j * F and the task-space term is the sandwich J^T (K + GF) J.
With the correction the result is symmetric; without it, external moments
make it asymmetric.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import robot as robot_mod
from .connection import Frame, correction_matrix
from .errors import DimensionMismatch, FrameMismatch, NotSquare


@dataclass(frozen=True)
class TaskStiffness:
    """Designed task-space spring: symmetric 6x6 Hessian of the potential."""

    hessian: np.ndarray
    frame: Frame

    def __post_init__(self):
        h = np.asarray(self.hessian, dtype=float)
        if h.shape != (6, 6):
            raise DimensionMismatch(f"task stiffness must be 6x6, got {h.shape}")
        if np.linalg.norm(h - h.T) > 1e-9 * max(1.0, np.linalg.norm(h)):
            raise DimensionMismatch("task stiffness must be symmetric")
        object.__setattr__(self, "hessian", h)

    @staticmethod
    def diagonal(k_translation: float, k_rotation: float, frame: Frame) -> "TaskStiffness":
        """Block-diagonal spring diag(k_t I3, k_r I3)."""
        h = np.diag([k_translation] * 3 + [k_rotation] * 3).astype(float)
        return TaskStiffness(h, frame)


@dataclass(frozen=True)
class JointStiffness:
    matrix: np.ndarray
    with_correction: bool
    frame: Frame
    wrench_snapshot: np.ndarray


@dataclass(frozen=True)
class SymmetryReport:
    sigma_max_sym: float
    sigma_max_asym: float
    asym_ratio: float


def task_stiffness_corrected(hessian: TaskStiffness, wrench, frame: Frame = None) -> np.ndarray:
    """Task-space stiffness including the basis-change correction Gamma F.

    Generally asymmetric when the wrench carries moment components.
    """
    if frame is None:
        frame = hessian.frame
    elif frame != hessian.frame:
        raise FrameMismatch(
            f"task stiffness is {hessian.frame.value}, connection is {frame.value}"
        )
    return hessian.hessian + correction_matrix(frame, wrench).matrix


def kinematic_stiffness(model, q, wrench, frame: Frame) -> np.ndarray:
    """Configuration-dependence of the torque map: columns dJ^T/dq_j * F."""
    f = np.asarray(wrench, dtype=float)
    if f.shape != (6,):
        raise DimensionMismatch(f"wrench must have 6 components, got {f.shape}")
    d = robot_mod.jacobian_transpose_derivative(model, q, frame).tensor
    # entry (i, j) = sum_k dJ[k][i]/dq_j * F_k
    return np.einsum("jki,k->ij", d, f)


def assemble_joint_stiffness(jac, d_tensor, hessian_matrix, wrench, frame: Frame,
                             with_correction: bool) -> np.ndarray:
    """Assemble dtau/dq from precomputed Jacobian and derivative tensor."""
    f = np.asarray(wrench, dtype=float)
    k_kin = np.einsum("jki,k->ij", d_tensor, f)
    task = hessian_matrix
    if with_correction:
        task = task + correction_matrix(frame, f).matrix
    return k_kin + jac.T @ task @ jac


def joint_stiffness(model, q, hessian: TaskStiffness, wrench, frame: Frame,
                    with_correction: bool = True) -> JointStiffness:
    """Joint-space stiffness dtau/dq under a task spring and external wrench.

    With the correction the assembly is K_kin + J^T (H + Gamma F) J and is
    symmetric; without it (the conventional baseline) the Gamma F term is
    dropped and moments leave an antisymmetric residue.
    """
    if hessian.frame != frame:
        raise FrameMismatch(
            f"task stiffness is {hessian.frame.value}, requested frame {frame.value}"
        )
    f = np.asarray(wrench, dtype=float)
    if f.shape != (6,):
        raise DimensionMismatch(f"wrench must have 6 components, got {f.shape}")
    kin = robot_mod.full_kinematics(model, q, frame)
    matrix = assemble_joint_stiffness(
        kin.jacobian, kin.derivative, hessian.hessian, f, frame, with_correction
    )
    return JointStiffness(matrix, with_correction, frame, f)


def symmetry_decompose(m) -> tuple:
    """Split a square matrix into (symmetric, antisymmetric) parts."""
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise NotSquare(f"expected square matrix, got shape {m.shape}")
    sym = 0.5 * (m + m.T)
    return sym, m - sym


def symmetry_report(m) -> SymmetryReport:
    """Largest singular values of the symmetric and antisymmetric parts.

    For the symmetric part the singular values are the absolute eigenvalues;
    for the antisymmetric part they come from the Gram matrix.  Both routes
    avoid a full SVD, which matters in the per-step simulation loop.
    """
    sym, asym = symmetry_decompose(m)
    if sym.size == 0:
        return SymmetryReport(0.0, 0.0, 0.0)
    s_sym = float(np.max(np.abs(np.linalg.eigvalsh(sym))))
    s_asym = float(np.sqrt(max(0.0, np.max(np.linalg.eigvalsh(asym @ asym.T)))))
    return SymmetryReport(s_sym, s_asym, s_asym / max(s_sym, 1e-12))
