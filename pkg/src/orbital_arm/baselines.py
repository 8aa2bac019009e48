"""Comparison controllers: feedback-linearization PD and an Euler-angle
terminal sliding-mode reconstruction.

The Euler-angle controller mirrors the quaternion NTSMC structure with the
attitude error expressed as the intrinsic xyz triplet of the error rotation
(half-angle scaled so both controllers linearize identically for small
errors) and its rate mapped through the Euler kinematic matrix.  The exact
equations of the published Euler-angle controller are external; this is a
documented approximation sharing the published parameter row, so every
comparison made against it is directional, not exact-value.

The xyz triplet is singular at pitch = +/- pi/2: there the kinematic matrix
loses rank and the commanded input grows without bound.  Inside a narrow
band around the singularity the controller raises EulerSingularityError so
batch harnesses can record the failure instead of integrating garbage.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .attitude import UnitQuaternion, abs_pow, error_quaternion, \
    euler_xyz_kinematic_matrix, sgn_plus, to_euler_xyz, vec_pow
from .dynamics import GeneralizedForce, SystemState, mass_and_coriolis
from .kinematics import SpacecraftModel
from .ntsmc import AdaptiveState, ControlDivergenceError, ControllerGains, \
    SlidingDiagnostics, assemble_s, boundary_layer, k2_default_pattern, sat, \
    surface_s1
from .reference import ReferenceSample

PITCH_SINGULARITY_BAND = 1e-3  # rad


class EulerSingularityError(RuntimeError):
    """xyz-triplet extraction/kinematics too close to pitch = +/- pi/2."""


@dataclass
class PDGains:
    """Feedback-linearization PD gains (diagonal entries)."""

    kp_b: np.ndarray
    kv_b: np.ndarray
    kq_eps: np.ndarray
    kw_b: np.ndarray
    kq: np.ndarray
    kqdot: np.ndarray

    def __post_init__(self):
        for name in ("kp_b", "kv_b", "kq_eps", "kw_b", "kq", "kqdot"):
            v = np.asarray(getattr(self, name), dtype=float)
            setattr(self, name, v)

    def validate(self) -> None:
        for name in ("kp_b", "kv_b", "kq_eps", "kw_b", "kq", "kqdot"):
            if np.any(getattr(self, name) <= 0.0):
                raise ValueError(f"{name} entries must be positive")


def default_pd_gains(n: int) -> PDGains:
    return PDGains(kp_b=np.full(3, 0.5), kv_b=np.full(3, 0.25),
                   kq_eps=np.full(3, 0.5), kw_b=np.full(3, 0.25),
                   kq=np.full(n, 1.0), kqdot=np.full(n, 0.5))


def default_euler_gains(n: int) -> ControllerGains:
    """Parameter row of the Euler-angle controller mapped onto the shared
    gain structure (beta1 -> Gamma, k1 -> K1, k0 -> K_delta(0), theta -> Phi,
    c0 -> adaptation rate)."""
    dof = 6 + n
    return ControllerGains(
        p=9, q=11, p1=5, q1=9, p2=7, q2=9,
        gamma1=np.full(3 + n, 0.1),
        gamma2=0.1,
        k1=np.full(dof, 1e-3),
        k2=k2_default_pattern(dof),
        phi_layer=1e-3,
        phi_adapt=1e-3,
        kdelta0=1e-4,
    )


def pd_control(nominal_model: SpacecraftModel, state: SystemState,
               ref: ReferenceSample, gains: PDGains) -> GeneralizedForce:
    """u = M0 (xddot_d - Kv xdot_err - Kp x_err) + C0, attitude error fed
    as the double-cover-safe sgn+(eta_be) eps_be."""
    q_be = error_quaternion(state.q_b, ref.q_bd)
    x_err = np.concatenate([
        state.p_b - ref.p_bd,
        sgn_plus(q_be.eta)[0] * q_be.eps,
        state.q - ref.q_d,
    ])
    xdot_err = np.concatenate([
        state.v_b - ref.v_bd,
        state.omega_b - ref.omega_bd,
        state.qdot - ref.qdot_d,
    ])
    kp = np.concatenate([gains.kp_b, gains.kq_eps, gains.kq])
    kv = np.concatenate([gains.kv_b, gains.kw_b, gains.kqdot])
    M0, C0 = mass_and_coriolis(nominal_model, state)
    xddot_d = np.concatenate([ref.a_bd, ref.omegadot_bd, ref.qddot_d])
    return GeneralizedForce.from_array(
        M0 @ (xddot_d - kv * xdot_err - kp * x_err) + C0)


def euler_attitude_error(state: SystemState, ref: ReferenceSample):
    """xyz triplet of the error rotation plus the kinematic matrix; raises
    inside the singular pitch band."""
    q_be = error_quaternion(state.q_b, ref.q_bd)
    e_att = to_euler_xyz(q_be)
    if abs(abs(e_att[1]) - np.pi / 2) < PITCH_SINGULARITY_BAND:
        raise EulerSingularityError(
            f"error pitch {e_att[1]:.6f} rad within "
            f"{PITCH_SINGULARITY_BAND} of +/- pi/2")
    return e_att, euler_xyz_kinematic_matrix(e_att)


def euler_ntsmc_control(nominal_model: SpacecraftModel, state: SystemState,
                        ref: ReferenceSample, gains: ControllerGains,
                        adaptive: AdaptiveState
                        ) -> tuple[GeneralizedForce, SlidingDiagnostics]:
    """Euler-angle NTSMC reconstruction with the quaternion controller's
    u1/u2/u3 structure."""
    qp = gains.qp
    e = np.concatenate([state.p_b - ref.p_bd, state.q - ref.q_d])
    edot = np.concatenate([state.v_b - ref.v_bd, state.qdot - ref.qdot_d])
    omega_be = state.omega_b - ref.omega_bd
    e_att, ekin = euler_attitude_error(state, ref)

    s1 = surface_s1(e, edot, gains)
    s2 = vec_pow(omega_be, qp) / gains.gamma2 + 0.5 * e_att
    s = assemble_s(s1, s2)
    phi = gains.phi_layer
    delta_s = boundary_layer(s, phi)
    zeta = assemble_s(abs_pow(edot, qp - 1.0) / gains.gamma1,
                      abs_pow(omega_be, qp - 1.0) / gains.gamma2)
    xi = zeta * delta_s
    diag = SlidingDiagnostics(s1, s2, s, delta_s, xi)

    M0, C0 = mass_and_coriolis(nominal_model, state)
    xddot_d = np.concatenate([ref.a_bd, ref.omegadot_bd, ref.qddot_d])
    u1 = M0 @ xddot_d + C0

    ratio = (abs_pow(omega_be, qp - 1.0)
             / np.maximum(abs_pow(omega_be, 2.0 * qp - 2.0), phi))
    # rate of the (half) Euler error through the kinematic matrix
    e_att_rate = 0.5 * np.linalg.solve(ekin, omega_be)
    u2_vec = assemble_s(gains.gamma1 * vec_pow(edot, 2.0 - qp),
                        gains.gamma2 * ratio * e_att_rate)
    u2 = -(1.0 / qp) * M0 @ u2_vec

    xdn2 = float(state.xdot() @ state.xdot())
    switching = adaptive.k_delta_hat * sat(s / phi) * (1.0 + xdn2)
    xi_norm_sq = float(xi @ xi)
    if xi_norm_sq >= 1e-18:
        ds_norm = float(np.linalg.norm(delta_s))
        boost = gains.k1 * xi / xi_norm_sq * ds_norm ** (2.0 * gains.p1 / gains.q1)
    else:
        boost = np.zeros_like(xi)
    u3 = -M0 @ (switching + boost + gains.k2 * vec_pow(delta_s, gains.p2 / gains.q2))

    u = u1 + u2 + u3
    if not np.all(np.isfinite(u)):
        raise ControlDivergenceError("non-finite Euler-baseline command")
    return GeneralizedForce.from_array(u), diag
