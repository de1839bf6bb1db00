"""Energy audit of stiffness fields over closed displacement loops.

An antisymmetric stiffness component does net work around a closed orbit
(a virtual perpetual motion machine); a symmetric one does none.  Loops are
specified counterclockwise in the (i, j) coordinate plane with i < j, and the
reported work follows the line integral of K x along that orientation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NotSquare, OpenPath

PASSIVE_TOLERANCE = 1e-9  # J, for the default unit-scale loop


@dataclass(frozen=True)
class LoopPath:
    """Closed polygonal path of displacement waypoints (first == last)."""

    waypoints: np.ndarray  # (N, d)

    def __post_init__(self):
        w = np.asarray(self.waypoints, dtype=float)
        if w.ndim != 2 or w.shape[0] < 4:
            raise OpenPath("need at least 4 waypoints")
        if not np.array_equal(w[0], w[-1]):
            raise OpenPath("first and last waypoints must coincide exactly")
        object.__setattr__(self, "waypoints", w)

    @property
    def dimension(self) -> int:
        return self.waypoints.shape[1]

    def reversed(self) -> "LoopPath":
        return LoopPath(self.waypoints[::-1].copy())


@dataclass(frozen=True)
class EnergyAudit:
    net_work: float            # J
    work_per_area: float       # J/m^2, None for non-planar loops
    passive: bool


def circle_path(dimension: int, plane: tuple, radius: float = 1.0,
                segments: int = 3600) -> LoopPath:
    """Counterclockwise circle in coordinate plane (i, j), 0-based, i < j."""
    i, j = plane
    theta = np.linspace(0.0, 2.0 * np.pi, segments + 1)
    w = np.zeros((segments + 1, dimension))
    w[:, i] = radius * np.cos(theta)
    w[:, j] = radius * np.sin(theta)
    w[-1] = w[0]  # exact closure
    return LoopPath(w)


def _planar_area(w: np.ndarray) -> float:
    """Signed shoelace area if the loop varies in exactly two coordinates."""
    active = np.where(np.ptp(w, axis=0) > 0)[0]
    if len(active) != 2:
        return None
    x, y = w[:, active[0]], w[:, active[1]]
    return 0.5 * float(np.sum(x[:-1] * y[1:] - x[1:] * y[:-1]))


def loop_work(k, path: LoopPath, tolerance: float = PASSIVE_TOLERANCE) -> EnergyAudit:
    """Net work of the spring force F(x) = K x around a closed path.

    Trapezoidal quadrature per segment, which is exact for the linear field
    along straight segments; only the polygonal approximation of a curved
    orbit contributes error.
    """
    k = np.asarray(k, dtype=float)
    if k.ndim != 2 or k.shape[0] != k.shape[1]:
        raise NotSquare(f"expected square matrix, got shape {k.shape}")
    w = path.waypoints
    if k.shape[0] != w.shape[1]:
        raise DimensionMismatch(
            f"matrix is {k.shape[0]}x{k.shape[0]} but path has dimension {w.shape[1]}"
        )
    forces = w @ k.T
    deltas = np.diff(w, axis=0)
    net = float(np.sum(0.5 * (forces[:-1] + forces[1:]) * deltas))
    area = _planar_area(w)
    per_area = net / area if area else None
    return EnergyAudit(net, per_area, abs(net) <= tolerance)


def audit_stiffness(k, radius: float = 1.0, segments: int = 3600,
                    tolerance: float = PASSIVE_TOLERANCE) -> EnergyAudit:
    """Worst-case loop work over unit circles in every coordinate plane."""
    k = np.asarray(k, dtype=float)
    if k.ndim != 2 or k.shape[0] != k.shape[1]:
        raise NotSquare(f"expected square matrix, got shape {k.shape}")
    d = k.shape[0]
    worst = 0.0
    for i in range(d):
        for j in range(i + 1, d):
            audit = loop_work(k, circle_path(d, (i, j), radius, segments), tolerance)
            if abs(audit.net_work) > abs(worst):
                worst = audit.net_work
    return EnergyAudit(worst, None, abs(worst) <= tolerance)
