"""DH-parameterized arm kinematics on a free-flying base.

The arm is a serial chain of revolute joints in the standard (distal) DH
convention.  Frame 0 (the DH base frame) is rigidly attached to the
satellite body at a configurable mount pose; joint j rotates about the
z-axis of frame j-1.  All outputs are expressed in inertial coordinates.

The linear/angular velocity Jacobians returned here are the fixed-base
Jacobians of the paper's velocity decomposition

    v_j = v_b - [p_bj]_x omega_b + J_vj qdot,     omega_j = omega_b + J_wj qdot

i.e. they map joint rates only; base motion is accounted for separately.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import cached_property

import numpy as np

from .attitude import UnitQuaternion, rotation_matrix

ALUMINIUM_DENSITY = 2700.0      # kg/m^3
LINK_WALL_THICKNESS = 0.0135    # m, hollow-cylinder wall
LINK_OUTER_RADIUS = 0.0635      # m
MOTOR_POINT_MASS = 0.5          # kg, one DC motor per joint
EE_POINT_MASS = 0.5             # kg

# 7-DoF arm geometry: a_i = 0 everywhere, alternating +/- pi/2 twists.
ARM_DH_ALPHA = (np.pi / 2, -np.pi / 2, np.pi / 2, -np.pi / 2,
                np.pi / 2, -np.pi / 2, 0.0)
ARM_DH_D = (0.3, 0.16, 1.15, -0.16, 1.15, -0.16, 0.4)

BASE_MASS = 1900.0                                  # kg
BASE_INERTIA = (13500.0, 2000.0, 2000.0)            # kg m^2, diagonal
BASE_HEIGHT = 3.1                                   # m, bus height
DEFAULT_MOUNT_OFFSET = (0.0, 0.0, BASE_HEIGHT / 2)  # arm on the top face


@dataclass(frozen=True)
class DHRow:
    """One standard-DH row; the joint variable adds to theta_offset."""

    a: float
    alpha: float
    d: float
    theta_offset: float = 0.0


@dataclass(frozen=True)
class LinkInertia:
    """Inertial parameters of one link, in its own DH frame.

    inertia_body is taken about the link CoM; com_offset locates the CoM
    in the link frame.
    """

    mass: float
    inertia_body: np.ndarray
    com_offset: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "inertia_body",
                           np.asarray(self.inertia_body, dtype=float))
        object.__setattr__(self, "com_offset",
                           np.asarray(self.com_offset, dtype=float))


@dataclass
class SpacecraftModel:
    """Base-body inertial parameters plus the arm description.

    The end effector is an extra rigid body attached at the last DH frame
    origin (point mass by default; the uncertainty campaigns give it a
    full inertia tensor).
    """

    base_mass: float
    base_inertia_body: np.ndarray
    links: list  # of (DHRow, LinkInertia)
    arm_mount_rotation: np.ndarray = field(
        default_factory=lambda: np.eye(3))
    arm_mount_offset: np.ndarray = field(
        default_factory=lambda: np.array(DEFAULT_MOUNT_OFFSET))
    ee_mass: float = EE_POINT_MASS
    ee_inertia_body: np.ndarray = field(default_factory=lambda: np.zeros((3, 3)))

    def __post_init__(self):
        self.base_inertia_body = np.asarray(self.base_inertia_body, dtype=float)
        self.arm_mount_rotation = np.asarray(self.arm_mount_rotation, dtype=float)
        self.arm_mount_offset = np.asarray(self.arm_mount_offset, dtype=float)
        self.ee_inertia_body = np.asarray(self.ee_inertia_body, dtype=float)

    @property
    def n(self) -> int:
        return len(self.links)

    @property
    def total_mass(self) -> float:
        return self.base_mass + sum(li.mass for _, li in self.links) + self.ee_mass

    @cached_property
    def packed(self) -> tuple:
        """Flat array views consumed by the jitted dynamics kernel."""
        n = self.n
        dh = np.zeros((n, 4))
        link_mass = np.zeros(n)
        link_com = np.zeros((n, 3))
        link_inertia = np.zeros((n, 3, 3))
        for j, (row, li) in enumerate(self.links):
            dh[j] = (row.a, row.alpha, row.d, row.theta_offset)
            link_mass[j] = li.mass
            link_com[j] = li.com_offset
            link_inertia[j] = li.inertia_body
        return (float(self.base_mass), self.base_inertia_body.copy(),
                self.arm_mount_rotation.copy(), self.arm_mount_offset.copy(),
                dh, link_mass, link_com, link_inertia,
                float(self.ee_mass), self.ee_inertia_body.copy())

    def with_params(self, **kw) -> "SpacecraftModel":
        return replace(self, **kw)


def dh_transform(a: float, alpha: float, d: float, theta: float) -> np.ndarray:
    """Standard DH homogeneous transform Rz(theta) Tz(d) Tx(a) Rx(alpha)."""
    ca, sa = np.cos(alpha), np.sin(alpha)
    ct, st = np.cos(theta), np.sin(theta)
    return np.array([
        [ct, -st * ca, st * sa, a * ct],
        [st, ct * ca, -ct * sa, a * st],
        [0.0, sa, ca, d],
        [0.0, 0.0, 0.0, 1.0],
    ])


def _chain(model: SpacecraftModel, state) -> tuple[np.ndarray, np.ndarray]:
    """Rotations (n+1,3,3) and origins (n+1,3) of frames 0..n, inertial."""
    n = model.n
    q = np.asarray(state.q, dtype=float)
    if q.shape != (n,):
        raise ValueError(f"joint vector has length {q.shape}, model has n={n}")
    R = np.zeros((n + 1, 3, 3))
    o = np.zeros((n + 1, 3))
    R_b = rotation_matrix(state.q_b)
    R[0] = R_b @ model.arm_mount_rotation
    o[0] = state.p_b + R_b @ model.arm_mount_offset
    for j, (row, _) in enumerate(model.links):
        A = dh_transform(row.a, row.alpha, row.d, row.theta_offset + q[j])
        R[j + 1] = R[j] @ A[:3, :3]
        o[j + 1] = o[j] + R[j] @ A[:3, 3]
    return R, o


def forward_frames(model: SpacecraftModel, state) -> list[np.ndarray]:
    """Poses of link frames 1..n in the inertial frame, as 4x4 transforms."""
    R, o = _chain(model, state)
    frames = []
    for j in range(1, model.n + 1):
        T = np.eye(4)
        T[:3, :3] = R[j]
        T[:3, 3] = o[j]
        frames.append(T)
    return frames


def link_com_positions(model: SpacecraftModel, state) -> list[np.ndarray]:
    """p_bj = CoM of link j minus CoM of the base, inertial coordinates."""
    R, o = _chain(model, state)
    p_b = np.asarray(state.p_b, dtype=float)
    return [o[j + 1] + R[j + 1] @ li.com_offset - p_b
            for j, (_, li) in enumerate(model.links)]


def jacobians(model: SpacecraftModel, state) -> tuple[list, list]:
    """Fixed-base CoM velocity Jacobians (J_v list, J_w list), 3xn each."""
    n = model.n
    R, o = _chain(model, state)
    J_v, J_w = [], []
    for j, (_, li) in enumerate(model.links):
        c = o[j + 1] + R[j + 1] @ li.com_offset
        Jv = np.zeros((3, n))
        Jw = np.zeros((3, n))
        for k in range(j + 1):
            z = R[k][:, 2]
            Jv[:, k] = np.cross(z, c - o[k])
            Jw[:, k] = z
        J_v.append(Jv)
        J_w.append(Jw)
    return J_v, J_w


def ee_pose(model: SpacecraftModel, state) -> tuple[np.ndarray, np.ndarray]:
    """(R, p) of the end-effector frame (= last DH frame) in inertial coords."""
    R, o = _chain(model, state)
    return R[model.n], o[model.n]


def ee_jacobian_position(model: SpacecraftModel, state) -> np.ndarray:
    """3xn fixed-base position Jacobian of the EE frame origin."""
    n = model.n
    R, o = _chain(model, state)
    J = np.zeros((3, n))
    for k in range(n):
        J[:, k] = np.cross(R[k][:, 2], o[n] - o[k])
    return J


def point_shift(r: np.ndarray) -> np.ndarray:
    """Parallel-axis inertia increment per unit mass for offset r."""
    r = np.asarray(r, dtype=float)
    return (r @ r) * np.eye(3) - np.outer(r, r)


def hollow_cylinder_link(alpha: float, d: float,
                         outer_radius: float = LINK_OUTER_RADIUS,
                         thickness: float = LINK_WALL_THICKNESS,
                         density: float = ALUMINIUM_DENSITY,
                         motor_mass: float = MOTOR_POINT_MASS) -> LinkInertia:
    """Composite link body: hollow aluminium cylinder + motor point mass.

    The cylinder spans the segment from the proximal joint origin to the
    link-frame origin; the motor sits at the proximal joint origin.  Both
    points are constant in the link frame (they lie on the joint axis).
    """
    r_o = outer_radius
    r_i = outer_radius - thickness
    L = abs(d)
    m_cyl = density * np.pi * (r_o**2 - r_i**2) * L
    p_prox = np.array([0.0, -d * np.sin(alpha), -d * np.cos(alpha)])
    p_cyl = 0.5 * p_prox
    if L > 0.0:
        u = -p_prox / L
        i_ax = 0.5 * m_cyl * (r_o**2 + r_i**2)
        i_tr = m_cyl * (3.0 * (r_o**2 + r_i**2) + L**2) / 12.0
        I_cyl = i_tr * np.eye(3) + (i_ax - i_tr) * np.outer(u, u)
    else:
        I_cyl = np.zeros((3, 3))

    mass = m_cyl + motor_mass
    com = (m_cyl * p_cyl + motor_mass * p_prox) / mass
    inertia = (I_cyl + m_cyl * point_shift(p_cyl - com)
               + motor_mass * point_shift(p_prox - com))
    return LinkInertia(mass=mass, inertia_body=inertia, com_offset=com)


def default_model() -> SpacecraftModel:
    """The simulated spacecraft: 1900 kg bus + redundant 7-DoF arm."""
    links = []
    for alpha, d in zip(ARM_DH_ALPHA, ARM_DH_D):
        row = DHRow(a=0.0, alpha=alpha, d=d)
        links.append((row, hollow_cylinder_link(alpha, d)))
    return SpacecraftModel(
        base_mass=BASE_MASS,
        base_inertia_body=np.diag(BASE_INERTIA),
        links=links,
    )


def inertia_physically_consistent(I: np.ndarray, tol: float = 1e-9) -> bool:
    """Symmetric, positive definite, and triangle inequality on principal moments."""
    I = np.asarray(I, dtype=float)
    if not np.allclose(I, I.T, atol=tol):
        return False
    lam = np.sort(np.linalg.eigvalsh(0.5 * (I + I.T)))
    if lam[0] <= 0.0:
        return False
    return bool(lam[2] <= lam[0] + lam[1] + tol * lam[2])
