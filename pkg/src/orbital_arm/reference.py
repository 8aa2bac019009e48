"""Smooth reference trajectories for the simulation scenarios.

Two scenarios are provided:

    * ``hold``       - constant pose, used for attitude-regulation studies.
    * ``two_phase``  - rest-to-rest diagonal translation of the base with
      the arm held, followed by a diagonal end-effector displacement with
      the base pose held.  Phase 2 is planned in joint space from
      damped-least-squares IK waypoints re-splined with zero boundary
      velocity and acceleration.

All segments use quintic (minimum-jerk) time scaling, so references are
C^2 and exactly rest-to-rest; velocities/accelerations are analytic
derivatives of the pose (finite-difference consistent by construction).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.interpolate import make_interp_spline

from . import kinematics
from .attitude import UnitQuaternion, from_euler_xyz, hamilton
from .dynamics import SystemState
from .kinematics import SpacecraftModel

SCENARIOS = ("hold", "two_phase")

DEFAULT_HORIZON = 57.0           # s, full two-phase motion
SEGMENT_SPLIT = (27.0, 30.0)     # s, base phase / arm phase at 57 s total
DEFAULT_BASE_DISPLACEMENT = 0.5 * np.array([1.0, 1.0, 1.0]) / np.sqrt(3.0)
DEFAULT_EE_DISPLACEMENT = 0.3 * np.array([1.0, 1.0, -1.0]) / np.sqrt(3.0)
DEFAULT_ARM_CONFIG = np.array([0.3, 0.6, 0.3, 0.8, 0.4, 0.6, 0.0])
IK_WAYPOINT_DT = 0.1             # s
IK_DAMPING = 0.05
IK_TOL = 1e-10
IK_MAX_ITERS = 300


class UnreachableTargetError(ValueError):
    """Joint-space plan for the requested EE displacement did not converge."""


@dataclass(frozen=True)
class ReferenceSample:
    """Desired pose/velocity/acceleration for base and joints at one time."""

    p_bd: np.ndarray
    v_bd: np.ndarray
    a_bd: np.ndarray
    q_bd: UnitQuaternion
    omega_bd: np.ndarray
    omegadot_bd: np.ndarray
    q_d: np.ndarray
    qdot_d: np.ndarray
    qddot_d: np.ndarray


def quintic(tau: float) -> tuple[float, float, float]:
    """Minimum-jerk scaling s(tau) on [0,1] with s', s'' (per unit tau)."""
    if tau <= 0.0:
        return 0.0, 0.0, 0.0
    if tau >= 1.0:
        return 1.0, 0.0, 0.0
    t2, t3 = tau * tau, tau**3
    s = 10.0 * t3 - 15.0 * t2 * t2 + 6.0 * t3 * t2
    sd = 30.0 * t2 - 60.0 * t3 + 30.0 * t2 * t2
    sdd = 60.0 * tau - 180.0 * t2 + 120.0 * t3
    return s, sd, sdd


class Reference:
    """Immutable trajectory object; evaluation at time t is pure."""

    def __init__(self, model: SpacecraftModel, p_b0, q_b0: UnitQuaternion,
                 q0, t1: float, t2: float,
                 base_displacement, joint_spline=None):
        self.model = model
        self.n = model.n
        self.p_b0 = np.asarray(p_b0, dtype=float)
        self.q_b0 = q_b0
        self.q0 = np.asarray(q0, dtype=float)
        self.t1 = float(t1)
        self.t2 = float(t2)
        self.base_displacement = np.asarray(base_displacement, dtype=float)
        self._spline = joint_spline
        self._spline_d1 = joint_spline.derivative(1) if joint_spline else None
        self._spline_d2 = joint_spline.derivative(2) if joint_spline else None

    @property
    def motion_duration(self) -> float:
        return self.t1 + self.t2

    def __call__(self, t: float) -> ReferenceSample:
        z3 = np.zeros(3)
        zn = np.zeros(self.n)
        # base translation phase
        if self.t1 > 0.0:
            s, sd, sdd = quintic(t / self.t1)
            sd /= self.t1
            sdd /= self.t1**2
        else:
            s, sd, sdd = 1.0, 0.0, 0.0
        p_bd = self.p_b0 + s * self.base_displacement
        v_bd = sd * self.base_displacement
        a_bd = sdd * self.base_displacement
        # joint phase
        if self._spline is None or t <= self.t1:
            q_d, qdot_d, qddot_d = self.q0.copy(), zn.copy(), zn.copy()
        else:
            tj = min(t, self.t1 + self.t2)
            q_d = self._spline(tj)
            if t >= self.t1 + self.t2:
                qdot_d, qddot_d = zn.copy(), zn.copy()
            else:
                qdot_d = self._spline_d1(tj)
                qddot_d = self._spline_d2(tj)
        return ReferenceSample(p_bd, v_bd, a_bd, self.q_b0, z3.copy(),
                               z3.copy(), q_d, qdot_d, qddot_d)

    def initial_state(self) -> SystemState:
        r = self(0.0)
        return SystemState(r.p_bd, r.q_bd, r.q_d, r.v_bd, r.omega_bd, r.qdot_d)


def _ik_joint_plan(model: SpacecraftModel, base_p, base_q: UnitQuaternion,
                   q_start, displacement, t1: float, t2: float):
    """DLS-IK waypoints along the straight EE segment, re-splined (quintic)."""
    n = model.n
    times = [t1]
    qs = [np.asarray(q_start, dtype=float).copy()]
    state = SystemState(base_p, base_q, qs[0].copy(), np.zeros(3), np.zeros(3),
                        np.zeros(n))
    _, p_start = kinematics.ee_pose(model, state)
    n_way = max(2, int(round(t2 / IK_WAYPOINT_DT)))
    q = qs[0].copy()
    for k in range(1, n_way + 1):
        tau = k / n_way
        s, _, _ = quintic(tau)
        target = p_start + s * np.asarray(displacement, dtype=float)
        for it in range(IK_MAX_ITERS):
            state = SystemState(base_p, base_q, q, np.zeros(3), np.zeros(3),
                                np.zeros(n))
            _, p_ee = kinematics.ee_pose(model, state)
            err = target - p_ee
            if np.linalg.norm(err) < IK_TOL:
                break
            J = kinematics.ee_jacobian_position(model, state)
            JJt = J @ J.T + IK_DAMPING**2 * np.eye(3)
            q = q + J.T @ np.linalg.solve(JJt, err)
        else:
            raise UnreachableTargetError(
                f"IK did not converge at waypoint {k}/{n_way} "
                f"(residual {np.linalg.norm(err):.3e})")
        times.append(t1 + tau * t2)
        qs.append(q.copy())
    bc = ([(1, np.zeros(n)), (2, np.zeros(n))],
          [(1, np.zeros(n)), (2, np.zeros(n))])
    return make_interp_spline(np.array(times), np.array(qs), k=5, bc_type=bc)


def build_reference(scenario: str, model: SpacecraftModel,
                    horizon: float = DEFAULT_HORIZON, *,
                    motion_duration: float | None = None,
                    base_displacement=None, ee_displacement=None,
                    segment_split=SEGMENT_SPLIT,
                    p_b0=None, q_b0: UnitQuaternion | None = None,
                    q0=None) -> Reference:
    """Trajectory factory; ``horizon`` bounds the episode, motion may end
    earlier (``motion_duration``) and the final pose is held afterwards."""
    if scenario not in SCENARIOS:
        raise ValueError(f"unknown scenario {scenario!r}, expected {SCENARIOS}")
    if horizon <= 0.0:
        raise ValueError("horizon must be positive")
    n = model.n
    p_b0 = np.zeros(3) if p_b0 is None else np.asarray(p_b0, dtype=float)
    q_b0 = UnitQuaternion.identity() if q_b0 is None else q_b0
    if q0 is None:
        q0 = DEFAULT_ARM_CONFIG[:n] if n <= 7 else np.zeros(n)
    q0 = np.asarray(q0, dtype=float)

    if scenario == "hold":
        return Reference(model, p_b0, q_b0, q0, t1=0.0, t2=0.0,
                         base_displacement=np.zeros(3))

    duration = min(horizon, motion_duration or horizon)
    frac = segment_split[0] / (segment_split[0] + segment_split[1])
    t1 = duration * frac
    t2 = duration - t1
    base_disp = (DEFAULT_BASE_DISPLACEMENT if base_displacement is None
                 else np.asarray(base_displacement, dtype=float))
    ee_disp = (DEFAULT_EE_DISPLACEMENT if ee_displacement is None
               else np.asarray(ee_displacement, dtype=float))
    spline = _ik_joint_plan(model, p_b0 + base_disp, q_b0, q0, ee_disp, t1, t2)
    return Reference(model, p_b0, q_b0, q0, t1=t1, t2=t2,
                     base_displacement=base_disp, joint_spline=spline)


def apply_misalignment(reference: Reference, euler_xyz) -> SystemState:
    """Initial state equal to the t=0 reference with the base attitude
    pre-rotated by the intrinsic xyz Euler triplet."""
    state = reference.initial_state()
    q_mis = from_euler_xyz(np.asarray(euler_xyz, dtype=float))
    state.q_b = hamilton(q_mis, state.q_b)
    return state
