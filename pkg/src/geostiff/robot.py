"""Serial-chain robot model: loading, kinematics, Jacobians and inertia.

Kinematics use a local product-of-exponentials: each joint carries a fixed
home transform from its parent frame and a unit screw axis expressed in its
own frame, so the pose after joint i is

    T_0i = T_0(i-1) * home_i * exp(axis_i * q_i)

and the end-effector pose appends a fixed offset.  Link i (mass, com,
inertia) is expressed in the frame of joint i after motion.
"""

from __future__ import annotations

import importlib.resources
import json
import weakref
from dataclasses import dataclass

import numpy as np

from . import se3
from .connection import Frame
from .errors import (
    BadAxis,
    DimensionMismatch,
    NonPositiveDefinite,
    SchemaError,
    ValidationError,
)

_POSE_KEYS = {"rotation", "translation"}
_JOINT_KEYS = {"axis", "kind", "home", "limits"}
_LINK_KEYS = {"mass", "com", "inertia"}
_TOP_KEYS = {"name", "joints", "links", "end_effector"}


@dataclass(frozen=True)
class Joint:
    axis: np.ndarray          # unit screw, 6-vector, joint frame
    kind: str                 # "revolute" | "prismatic"
    home: se3.Transform       # parent frame -> joint frame
    limit_lower: float
    limit_upper: float


@dataclass(frozen=True)
class Link:
    mass: float
    com: np.ndarray           # m, link frame
    inertia: np.ndarray       # 3x3 kg m^2 about the com, link frame


@dataclass(frozen=True, eq=False)
class RobotModel:
    name: str
    joints: tuple
    links: tuple
    end_effector: se3.Transform

    @property
    def n(self) -> int:
        return len(self.joints)

    def limits(self) -> np.ndarray:
        return np.array([[j.limit_lower, j.limit_upper] for j in self.joints])


@dataclass(frozen=True)
class JointState:
    q: np.ndarray
    qdot: np.ndarray


@dataclass(frozen=True)
class JacobianDerivative:
    """Rank-3 array D[alpha][k][beta] = d(J[k][beta]) / d(q[alpha])."""

    tensor: np.ndarray        # (n, 6, n)
    frame: Frame


def _pose_from_doc(doc, path: str) -> se3.Transform:
    if not isinstance(doc, dict):
        raise SchemaError(f"{path}: expected object with rotation/translation")
    unknown = set(doc) - _POSE_KEYS
    if unknown:
        raise SchemaError(f"{path}: unknown keys {sorted(unknown)}")
    try:
        rot = np.asarray(doc["rotation"], dtype=float).reshape(3, 3)
        trans = np.asarray(doc["translation"], dtype=float).reshape(3)
    except (KeyError, ValueError, TypeError) as exc:
        raise SchemaError(f"{path}: {exc}") from exc
    t = se3.Transform(rot, trans)
    if t.orthogonality_defect() > 1e-9 or np.linalg.det(rot) < 0:
        raise ValidationError(f"{path}.rotation: not a proper rotation matrix")
    return t.renormalized()


def load_model(document) -> RobotModel:
    """Build a RobotModel from a JSON string or an already-parsed dict.

    Raises SchemaError for structural problems and ValidationError for
    documents that parse but violate a model invariant.
    """
    if isinstance(document, (str, bytes)):
        try:
            doc = json.loads(document)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"invalid JSON: {exc}") from exc
    else:
        doc = document
    if not isinstance(doc, dict):
        raise SchemaError("top level: expected a JSON object")
    unknown = set(doc) - _TOP_KEYS
    if unknown:
        raise SchemaError(f"top level: unknown keys {sorted(unknown)}")
    for key in _TOP_KEYS:
        if key not in doc:
            raise SchemaError(f"top level: missing key '{key}'")

    joints = []
    if not isinstance(doc["joints"], list) or len(doc["joints"]) < 1:
        raise ValidationError("joints: need at least one joint")
    for idx, jd in enumerate(doc["joints"]):
        path = f"joints[{idx}]"
        if not isinstance(jd, dict):
            raise SchemaError(f"{path}: expected object")
        unknown = set(jd) - _JOINT_KEYS
        if unknown:
            raise SchemaError(f"{path}: unknown keys {sorted(unknown)}")
        try:
            axis = np.asarray(jd["axis"], dtype=float).reshape(6)
            kind = jd["kind"]
            home = _pose_from_doc(jd["home"], f"{path}.home")
            lo, hi = (float(x) for x in jd["limits"])
        except (KeyError, ValueError, TypeError) as exc:
            raise SchemaError(f"{path}: {exc}") from exc
        if kind not in ("revolute", "prismatic"):
            raise ValidationError(f"{path}.kind: must be revolute or prismatic")
        try:
            se3.exp_twist(axis, 0.0)
        except BadAxis as exc:
            raise ValidationError(f"{path}.axis: {exc}") from exc
        if kind == "prismatic" and np.linalg.norm(axis[3:]) > 1e-9:
            raise ValidationError(f"{path}.axis: prismatic axis must have zero angular part")
        if kind == "revolute" and abs(np.linalg.norm(axis[3:]) - 1.0) > 1e-9:
            raise ValidationError(f"{path}.axis: revolute axis must have unit angular part")
        if not lo <= hi:
            raise ValidationError(f"{path}.limits: lower bound exceeds upper bound")
        joints.append(Joint(axis, kind, home, lo, hi))

    links = []
    if not isinstance(doc["links"], list) or len(doc["links"]) != len(joints):
        raise ValidationError("links: need exactly one link per joint")
    for idx, ld in enumerate(doc["links"]):
        path = f"links[{idx}]"
        if not isinstance(ld, dict):
            raise SchemaError(f"{path}: expected object")
        unknown = set(ld) - _LINK_KEYS
        if unknown:
            raise SchemaError(f"{path}: unknown keys {sorted(unknown)}")
        try:
            mass = float(ld["mass"])
            com = np.asarray(ld["com"], dtype=float).reshape(3)
            inertia = np.asarray(ld["inertia"], dtype=float).reshape(3, 3)
        except (KeyError, ValueError, TypeError) as exc:
            raise SchemaError(f"{path}: {exc}") from exc
        if mass < 0:
            raise ValidationError(f"{path}.mass: must be >= 0")
        if np.max(np.abs(inertia - inertia.T)) > 1e-9:
            raise ValidationError(f"{path}.inertia: must be symmetric")
        if np.min(np.linalg.eigvalsh(0.5 * (inertia + inertia.T))) < -1e-12:
            raise ValidationError(f"{path}.inertia: must be positive semidefinite")
        links.append(Link(mass, com, inertia))

    ee = _pose_from_doc(doc["end_effector"], "end_effector")
    name = doc["name"]
    if not isinstance(name, str) or not name:
        raise ValidationError("name: must be a non-empty string")
    return RobotModel(name, tuple(joints), tuple(links), ee)


def load_model_file(path) -> RobotModel:
    with open(path, "r", encoding="utf-8") as fh:
        return load_model(fh.read())


def bundled_model(name: str) -> RobotModel:
    """Load one of the models shipped with the package ('anthro3r', 'iiwa7')."""
    res = importlib.resources.files("geostiff.models").joinpath(f"{name}.json")
    return load_model(res.read_text(encoding="utf-8"))


def _check_dim(model: RobotModel, q) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    if q.shape != (model.n,):
        raise DimensionMismatch(f"expected q of length {model.n}, got shape {q.shape}")
    return q


def link_transforms(model: RobotModel, q) -> list:
    """Poses T_0i of every link frame (after joint motion), base frame."""
    q = _check_dim(model, q)
    out = []
    t = se3.Transform.identity()
    for joint, qi in zip(model.joints, q):
        t = t.compose(joint.home).compose(se3.exp_twist(joint.axis, qi))
        out.append(t)
    return out


def forward_kinematics(model: RobotModel, q) -> se3.Transform:
    """End-effector pose in the base frame."""
    return link_transforms(model, q)[-1].compose(model.end_effector)


def _body_jacobian(model: RobotModel, frames) -> tuple:
    """Body Jacobian and end-effector pose from precomputed link frames."""
    t_ee = frames[-1].compose(model.end_effector)
    t_ee_inv = t_ee.inverse()
    jac = np.empty((6, model.n))
    for i, (joint, t0i) in enumerate(zip(model.joints, frames)):
        jac[:, i] = se3.adjoint(t_ee_inv.compose(t0i)) @ joint.axis
    return jac, t_ee


def _to_hybrid(jb: np.ndarray, rotation: np.ndarray) -> np.ndarray:
    out = np.empty_like(jb)
    out[:3] = rotation @ jb[:3]
    out[3:] = rotation @ jb[3:]
    return out


def jacobian(model: RobotModel, q, frame: Frame) -> np.ndarray:
    """6xn geometric Jacobian in the BODY or HYBRID convention.

    BODY columns are joint screws expressed in the end-effector frame; HYBRID
    gives end-effector origin velocity and angular velocity, both in
    inertial axes.
    """
    q = _check_dim(model, q)
    jb, t_ee = _body_jacobian(model, link_transforms(model, q))
    if frame == Frame.BODY:
        return jb
    if frame == Frame.HYBRID:
        return _to_hybrid(jb, t_ee.rotation)
    raise ValueError(f"jacobian frame must be BODY or HYBRID, got {frame}")


def _derivative_tensor(model: RobotModel, jb: np.ndarray, rotation, frame: Frame) -> np.ndarray:
    n = model.n
    ad_stack = np.stack([se3.ad(jb[:, a]) for a in range(n)])      # (n,6,6)
    d_body = -np.einsum("akl,lb->akb", ad_stack, jb)
    mask = np.tril(np.ones((n, n)), k=-1)                          # alpha > beta
    d_body *= mask[:, None, :]
    if frame == Frame.BODY:
        return d_body
    if frame != Frame.HYBRID:
        raise ValueError(f"jacobian frame must be BODY or HYBRID, got {frame}")
    # dR/dq_alpha = R * skew(body angular column alpha)
    d_hyb = np.empty_like(d_body)
    for a in range(n):
        dr = rotation @ se3.skew(jb[3:, a])
        d_hyb[a, :3] = dr @ jb[:3] + rotation @ d_body[a, :3]
        d_hyb[a, 3:] = dr @ jb[3:] + rotation @ d_body[a, 3:]
    return d_hyb


def jacobian_transpose_derivative(model: RobotModel, q, frame: Frame) -> JacobianDerivative:
    """Analytic derivative tensor D[alpha][k][beta] = dJ[k][beta]/dq[alpha].

    Body columns depend only on downstream joints, so the body derivative is
    the bracket -ad(J_alpha) J_beta for alpha > beta and zero otherwise.  The
    hybrid derivative adds the rotation of the base-axes block.
    """
    q = _check_dim(model, q)
    jb, t_ee = _body_jacobian(model, link_transforms(model, q))
    return JacobianDerivative(_derivative_tensor(model, jb, t_ee.rotation, frame), frame)


def _spatial_inertia(link: Link) -> np.ndarray:
    """6x6 spatial inertia in the link frame, linear-first ordering."""
    ch = se3.skew(link.com)
    g = np.zeros((6, 6))
    g[:3, :3] = link.mass * np.eye(3)
    g[:3, 3:] = -link.mass * ch
    g[3:, :3] = link.mass * ch
    g[3:, 3:] = link.inertia - link.mass * ch @ ch
    return g


def link_jacobian(model: RobotModel, q, link_index: int) -> np.ndarray:
    """Body Jacobian of link link_index's frame (6xn, zero past the link)."""
    q = _check_dim(model, q)
    frames = link_transforms(model, q)
    t_inv = frames[link_index].inverse()
    jac = np.zeros((6, model.n))
    for i in range(link_index + 1):
        jac[:, i] = se3.adjoint(t_inv.compose(frames[i])) @ model.joints[i].axis
    return jac


def _mass_from_frames(model: RobotModel, q, frames) -> np.ndarray:
    n = model.n
    s = np.empty((6, n))          # spatial joint screws, base frame
    g0 = np.empty((n, 6, 6))      # link inertias, base frame
    prev = se3.Transform.identity()
    for i, joint in enumerate(model.joints):
        s[:, i] = se3.adjoint(prev.compose(joint.home)) @ joint.axis
        prev = frames[i]
        ad_inv = se3.adjoint(frames[i].inverse())
        g0[i] = ad_inv.T @ _spatial_inertia(model.links[i]) @ ad_inv
    # composite inertia seen by joint i: everything from link i outward
    composite = np.cumsum(g0[::-1], axis=0)[::-1]
    m = np.empty((n, n))
    for i in range(n):
        fi = composite[i] @ s[:, i]
        for j in range(i + 1):
            m[i, j] = m[j, i] = s[:, j] @ fi
    m = 0.5 * (m + m.T)
    if np.min(np.linalg.eigvalsh(m)) < 1e-9:
        raise NonPositiveDefinite(
            f"mass matrix not positive definite at q={np.asarray(q).tolist()}"
        )
    return m


def mass_matrix(model: RobotModel, q) -> np.ndarray:
    """Joint-space inertia matrix by composite-rigid-body accumulation.

    Per-link spatial inertias are mapped to the base frame, accumulated from
    the tip inward, and contracted with the spatial joint screws.
    """
    q = _check_dim(model, q)
    return _mass_from_frames(model, q, link_transforms(model, q))


@dataclass(frozen=True)
class KinematicsBundle:
    """Everything the simulator needs at one configuration, computed once."""

    pose: se3.Transform
    jacobian: np.ndarray      # 6xn, requested frame
    derivative: np.ndarray    # (n,6,n), requested frame
    mass: np.ndarray          # nxn

    @property
    def rotation(self) -> np.ndarray:
        return self.pose.rotation


class _StaticModelData:
    """Configuration-independent arrays cached per model for the fast path."""

    def __init__(self, model: RobotModel):
        n = model.n
        self.n = n
        self.home = np.stack([j.home.matrix() for j in model.joints])
        self.ee = model.end_effector.matrix()
        self.axes = np.stack([j.axis for j in model.joints])           # (n,6)
        self.w_hat = np.stack([se3.skew(j.axis[3:]) for j in model.joints])
        self.w_hat2 = np.einsum("nab,nbc->nac", self.w_hat, self.w_hat)
        self.v = self.axes[:, :3]
        self.revolute = np.array(
            [np.linalg.norm(j.axis[3:]) > 0.5 for j in model.joints]
        )
        self.inertias = np.stack([_spatial_inertia(l) for l in model.links])
        self.tril_mask = np.tril(np.ones((n, n)), k=-1)[:, None, :]


_STATIC_CACHE = weakref.WeakKeyDictionary()


def _static_data(model: RobotModel) -> _StaticModelData:
    data = _STATIC_CACHE.get(model)
    if data is None:
        data = _StaticModelData(model)
        _STATIC_CACHE[model] = data
    return data


def _adjoint_rp(r: np.ndarray, p: np.ndarray) -> np.ndarray:
    out = np.zeros((6, 6))
    out[:3, :3] = r
    out[:3, 3:] = se3.skew(p) @ r
    out[3:, 3:] = r
    return out


def full_kinematics(model: RobotModel, q, frame: Frame) -> KinematicsBundle:
    """Pose, Jacobian, Jacobian derivative and inertia sharing one FK pass.

    Batched fast path equivalent to calling forward_kinematics, jacobian,
    jacobian_transpose_derivative and mass_matrix separately (tests pin the
    equivalence); used per step by the simulator.
    """
    q = _check_dim(model, q)
    sd = _static_data(model)
    n = sd.n

    # joint exponentials, all joints at once
    s, c = np.sin(q), np.cos(q)
    rot = np.eye(3) + s[:, None, None] * sd.w_hat + (1.0 - c)[:, None, None] * sd.w_hat2
    g = (
        q[:, None, None] * np.eye(3)
        + (1.0 - c)[:, None, None] * sd.w_hat
        + (q - s)[:, None, None] * sd.w_hat2
    )
    trans = np.einsum("nab,nb->na", g, sd.v)
    if not sd.revolute.all():
        pris = ~sd.revolute
        rot[pris] = np.eye(3)
        trans[pris] = q[pris, None] * sd.v[pris]
    exp = np.tile(np.eye(4), (n, 1, 1))
    exp[:, :3, :3] = rot
    exp[:, :3, 3] = trans

    # chain: frames after each joint, plus the pre-motion frames for inertia
    t0 = np.empty((n, 4, 4))
    tpre = np.empty((n, 4, 4))
    cur = np.eye(4)
    for i in range(n):
        pre = cur @ sd.home[i]
        tpre[i] = pre
        cur = pre @ exp[i]
        t0[i] = cur
    t_ee_m = cur @ sd.ee
    r_ee, p_ee = t_ee_m[:3, :3], t_ee_m[:3, 3]

    # body Jacobian from the relative poses T_ee^-1 T_0i
    r_rel = np.einsum("ba,nbc->nac", r_ee, t0[:, :3, :3])
    p_rel = (t0[:, :3, 3] - p_ee) @ r_ee
    w_cols = np.einsum("nab,nb->na", r_rel, sd.axes[:, 3:])
    v_cols = np.einsum("nab,nb->na", r_rel, sd.axes[:, :3]) + _cross_rows(p_rel, w_cols)
    jb = np.empty((6, n))
    jb[:3] = v_cols.T
    jb[3:] = w_cols.T

    jac = jb if frame == Frame.BODY else _to_hybrid(jb, r_ee)

    # derivative tensor
    ad_stack = np.zeros((n, 6, 6))
    vh = _skew_batch(v_cols)
    wh = _skew_batch(w_cols)
    ad_stack[:, :3, :3] = wh
    ad_stack[:, :3, 3:] = vh
    ad_stack[:, 3:, 3:] = wh
    d_body = -np.einsum("akl,lb->akb", ad_stack, jb)
    d_body *= sd.tril_mask
    if frame == Frame.BODY:
        deriv = d_body
    else:
        dr = np.einsum("ab,nbc->nac", r_ee, wh)
        deriv = np.empty_like(d_body)
        deriv[:, :3] = np.einsum("nab,bc->nac", dr, jb[:3]) + np.einsum(
            "ab,nbc->nac", r_ee, d_body[:, :3]
        )
        deriv[:, 3:] = np.einsum("nab,bc->nac", dr, jb[3:]) + np.einsum(
            "ab,nbc->nac", r_ee, d_body[:, 3:]
        )

    # mass matrix: spatial screws and base-frame composite inertias
    r_pre = tpre[:, :3, :3]
    p_pre = tpre[:, :3, 3]
    w_s = np.einsum("nab,nb->na", r_pre, sd.axes[:, 3:])
    v_s = np.einsum("nab,nb->na", r_pre, sd.axes[:, :3]) + _cross_rows(p_pre, w_s)
    s_spatial = np.concatenate([v_s, w_s], axis=1).T
    r0 = t0[:, :3, :3]
    p0 = t0[:, :3, 3]
    adinv = np.zeros((n, 6, 6))
    rt = r0.transpose(0, 2, 1)
    adinv[:, :3, :3] = rt
    adinv[:, :3, 3:] = -np.einsum("nab,nbc->nac", rt, _skew_batch(p0))
    adinv[:, 3:, 3:] = rt
    g0 = np.einsum("nba,nbc,ncd->nad", adinv, sd.inertias, adinv)
    composite = np.cumsum(g0[::-1], axis=0)[::-1]
    x = np.einsum("iab,bi->ia", composite, s_spatial)
    m = np.tril(x @ s_spatial)
    m = m + m.T - np.diag(np.diag(m))
    if np.min(np.linalg.eigvalsh(m)) < 1e-9:
        raise NonPositiveDefinite(
            f"mass matrix not positive definite at q={q.tolist()}"
        )
    return KinematicsBundle(se3.Transform.from_matrix(t_ee_m), jac, deriv, m)


def _cross_rows(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    out = np.empty_like(a)
    out[:, 0] = a[:, 1] * b[:, 2] - a[:, 2] * b[:, 1]
    out[:, 1] = a[:, 2] * b[:, 0] - a[:, 0] * b[:, 2]
    out[:, 2] = a[:, 0] * b[:, 1] - a[:, 1] * b[:, 0]
    return out


def _skew_batch(vecs: np.ndarray) -> np.ndarray:
    out = np.zeros((len(vecs), 3, 3))
    out[:, 0, 1] = -vecs[:, 2]
    out[:, 0, 2] = vecs[:, 1]
    out[:, 1, 0] = vecs[:, 2]
    out[:, 1, 2] = -vecs[:, 0]
    out[:, 2, 0] = -vecs[:, 1]
    out[:, 2, 1] = vecs[:, 0]
    return out
