"""Generalized inertia, Coriolis/centrifugal bias and time integration.

The system has no potential energy, so the model is

    M(x) xddot + C(xdot, x) = F

in the quasi-velocity coordinates xdot = [v_b, omega_b, qdot] (6+n) over
the configuration [p_b, q_b, q] (7+n).  The inertia matrix follows the
block structure M_t / M_tr / M_r / M_tm / M_rm / M_m assembled from the
per-body CoM offsets and fixed-base Jacobians; C is the exact bias force
(generalized force at zero quasi-velocity acceleration) from a
floating-base Newton-Euler recursion.

Integration is fixed-step classic RK4 with zero-order-hold forces and
quaternion renormalization after every step.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from . import _core
from .attitude import UnitQuaternion, g_matrix
from .kinematics import SpacecraftModel

DEFAULT_DT = 1e-3  # s


class NumericalDivergenceError(RuntimeError):
    """Integration produced non-finite state."""


class InconsistentInertiaError(ValueError):
    """Mass matrix is not positive definite (nonphysical parameters)."""


@dataclass
class SystemState:
    """Configuration [p_b, q_b, q] and quasi-velocity [v_b, omega_b, qdot]."""

    p_b: np.ndarray
    q_b: UnitQuaternion
    q: np.ndarray
    v_b: np.ndarray
    omega_b: np.ndarray
    qdot: np.ndarray

    def __post_init__(self):
        self.p_b = np.asarray(self.p_b, dtype=float)
        self.q = np.asarray(self.q, dtype=float)
        self.v_b = np.asarray(self.v_b, dtype=float)
        self.omega_b = np.asarray(self.omega_b, dtype=float)
        self.qdot = np.asarray(self.qdot, dtype=float)

    @property
    def n(self) -> int:
        return self.q.shape[0]

    def xdot(self) -> np.ndarray:
        return np.concatenate([self.v_b, self.omega_b, self.qdot])

    def pack(self) -> np.ndarray:
        return np.concatenate([self.p_b, self.q_b.as_array(), self.q,
                               self.v_b, self.omega_b, self.qdot])

    @staticmethod
    def unpack(y: np.ndarray, n: int) -> "SystemState":
        return SystemState(
            p_b=y[0:3].copy(),
            q_b=UnitQuaternion.from_array(y[3:7]),
            q=y[7:7 + n].copy(),
            v_b=y[7 + n:10 + n].copy(),
            omega_b=y[10 + n:13 + n].copy(),
            qdot=y[13 + n:13 + 2 * n].copy(),
        )

    @staticmethod
    def rest(n: int) -> "SystemState":
        return SystemState(np.zeros(3), UnitQuaternion.identity(), np.zeros(n),
                           np.zeros(3), np.zeros(3), np.zeros(n))

    def copy(self) -> "SystemState":
        return SystemState.unpack(self.pack(), self.n)


@dataclass
class GeneralizedForce:
    """F = [f_b, tau_b, tau_joints], inertial coordinates."""

    f_b: np.ndarray
    tau_b: np.ndarray
    tau_joints: np.ndarray

    def __post_init__(self):
        self.f_b = np.asarray(self.f_b, dtype=float)
        self.tau_b = np.asarray(self.tau_b, dtype=float)
        self.tau_joints = np.asarray(self.tau_joints, dtype=float)

    def as_array(self) -> np.ndarray:
        return np.concatenate([self.f_b, self.tau_b, self.tau_joints])

    @staticmethod
    def from_array(u: np.ndarray) -> "GeneralizedForce":
        u = np.asarray(u, dtype=float)
        return GeneralizedForce(u[0:3].copy(), u[3:6].copy(), u[6:].copy())

    @staticmethod
    def zero(n: int) -> "GeneralizedForce":
        return GeneralizedForce(np.zeros(3), np.zeros(3), np.zeros(n))


@dataclass
class ModelPair:
    """True plant vs the controller's nominal model (same chain length)."""

    truth: SpacecraftModel
    nominal: SpacecraftModel

    def __post_init__(self):
        if self.truth.n != self.nominal.n:
            raise ValueError("truth and nominal models must share n")


def _force_array(force, n: int) -> np.ndarray:
    if isinstance(force, GeneralizedForce):
        u = force.as_array()
    else:
        u = np.asarray(force, dtype=float)
    if u.shape != (6 + n,):
        raise ValueError(f"force must have dimension {6 + n}")
    return u


def _eval(model: SpacecraftModel, state: SystemState):
    return _core.mass_bias(*model.packed, state.p_b, state.q_b.as_array(),
                           state.q, state.v_b, state.omega_b, state.qdot)


def mass_matrix(model: SpacecraftModel, state: SystemState) -> np.ndarray:
    """Symmetric positive-definite generalized inertia, (6+n)x(6+n)."""
    return _eval(model, state)[0]


def coriolis_vector(model: SpacecraftModel, state: SystemState) -> np.ndarray:
    """Bias vector C(xdot, x): quadratic in velocities, workless in energy."""
    return _eval(model, state)[1]


def mass_and_coriolis(model: SpacecraftModel, state: SystemState):
    out = _eval(model, state)
    return out[0], out[1]


def body_snapshot(model: SpacecraftModel, state: SystemState) -> dict:
    """Per-body kinematics: index 0 = base, 1..n = links, n+1 = end effector."""
    M, C, masses, coms, vcoms, omegas, R, o = _eval(model, state)
    return {
        "masses": masses, "coms": coms, "vcoms": vcoms, "omegas": omegas,
        "frame_R": R, "frame_o": o,
        "ee_R": R[model.n], "ee_p": o[model.n],
    }


def h_matrix(q_b: UnitQuaternion, n: int) -> np.ndarray:
    """(6+n)x(7+n) velocity map blockdiag(E, 2 G(q_b), E)."""
    H = np.zeros((6 + n, 7 + n))
    H[0:3, 0:3] = np.eye(3)
    H[3:6, 3:7] = 2.0 * g_matrix(q_b)
    H[6:, 7:] = np.eye(n)
    return H


def kinetic_energy(model: SpacecraftModel, state: SystemState) -> float:
    """K = 0.5 xdot^T M xdot, in joules."""
    xd = state.xdot()
    return float(0.5 * xd @ mass_matrix(model, state) @ xd)


def forward_dynamics(model: SpacecraftModel, state: SystemState, force) -> np.ndarray:
    """Quasi-velocity accelerations xddot = M^-1 (F - C), via SPD solve."""
    u = _force_array(force, model.n)
    M, C = mass_and_coriolis(model, state)
    try:
        cho = scipy.linalg.cho_factor(M, lower=True, check_finite=False)
    except scipy.linalg.LinAlgError as exc:
        raise InconsistentInertiaError(
            "mass matrix is not positive definite") from exc
    return scipy.linalg.cho_solve(cho, u - C, check_finite=False)


def step(model: SpacecraftModel, state: SystemState, force, dt: float) -> SystemState:
    """Advance one RK4 step; force held constant over the step."""
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    u = _force_array(force, model.n)
    y = _core.rk4_packed(*model.packed, state.pack(), u, dt)
    if not np.all(np.isfinite(y)):
        raise NumericalDivergenceError(
            f"non-finite state after step (dt={dt}); "
            f"first bad index {int(np.argmin(np.isfinite(y)))}")
    return SystemState.unpack(y, model.n)


def linear_momentum(model: SpacecraftModel, state: SystemState) -> np.ndarray:
    """Total linear momentum m_tot * v_com (conserved with zero force)."""
    snap = body_snapshot(model, state)
    return snap["masses"] @ snap["vcoms"]
