"""Quaternion-based adaptive non-singular terminal sliding-mode control.

The sliding variable combines a fractional-power surface on the
translation/joint errors with a quaternion attitude surface

    s1 = Gamma1^-1 edot^(q/p) + e
    s2 = Gamma2^-1 omega_be^(q/p) + sgn+(eta_be) eps_be

where the sgn+ discontinuity makes the controller blind to the quaternion
double cover: the shortest rotation is always selected and negating the
error quaternion leaves every output unchanged.

The control is u = u1 + u2 + u3: model feed-forward, the equivalent-control
term that shapes the surface dynamics, and a robustifying term with a
boundary-layer-softened switching action whose per-channel gain K_delta_hat
is adapted online against the velocity-dependent disturbance bound
|delta_i| < gamma1_i + gamma2_i ||xdot||^2.

Exponents of the form q/p - 1 appearing inside diag(.) scalings use the
nonnegative power |.|^alpha: with p, q odd, q - p is even, and the
stability argument requires nonnegative diagonal weights.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .attitude import UnitQuaternion, abs_pow, epsilon_dot, error_quaternion, \
    sgn_plus, vec_pow
from .dynamics import GeneralizedForce, SystemState, mass_and_coriolis
from .kinematics import SpacecraftModel
from .reference import ReferenceSample

XI_GUARD = 1e-9   # below this ||xi|| the reaching-boost term is dropped


class ControlDivergenceError(RuntimeError):
    """Controller produced a non-finite command."""


@dataclass
class ControllerGains:
    """All constants of the sliding-mode controller.

    Vector gains are stored as diagonal entries: gamma1 has dimension
    3+n (translation + joints), k1/k2 have dimension 6+n in the
    [translation, rotation, joints] ordering of the assembled surface.
    """

    p: int
    q: int
    p1: int
    q1: int
    p2: int
    q2: int
    gamma1: np.ndarray
    gamma2: float
    k1: np.ndarray
    k2: np.ndarray
    phi_layer: float      # boundary layer thickness (Phi)
    phi_adapt: float      # adaptation rate (phi)
    kdelta0: float        # initial disturbance-bound estimate

    def __post_init__(self):
        self.gamma1 = np.asarray(self.gamma1, dtype=float)
        self.k1 = np.asarray(self.k1, dtype=float)
        self.k2 = np.asarray(self.k2, dtype=float)

    @property
    def qp(self) -> float:
        return self.q / self.p

    def validate(self) -> None:
        def _odd_positive(v, name):
            if v <= 0 or v % 2 == 0:
                raise ValueError(f"{name} must be a positive odd integer")
        _odd_positive(self.p, "p")
        _odd_positive(self.q, "q")
        _odd_positive(self.p2, "p2")
        _odd_positive(self.q2, "q2")
        if not 1.0 < self.q / self.p < 2.0:
            raise ValueError("q/p must satisfy 1 < q/p < 2")
        if self.p1 <= 0 or self.q1 <= 0:
            raise ValueError("p1, q1 must be positive integers")
        if not 1.0 < self.q1 / self.p1 < 2.0:
            raise ValueError("q1/p1 must satisfy 1 < q1/p1 < 2")
        if self.p2 >= self.q2:
            raise ValueError("p2 < q2 is required")
        for name, v in (("gamma1", self.gamma1), ("k1", self.k1),
                        ("k2", self.k2)):
            if np.any(np.asarray(v) <= 0.0):
                raise ValueError(f"{name} entries must be positive")
        if self.gamma2 <= 0.0:
            raise ValueError("gamma2 must be positive")
        if self.phi_layer <= 0.0 or self.phi_adapt <= 0.0:
            raise ValueError("phi_layer and phi_adapt must be positive")
        if self.kdelta0 < 0.0:
            raise ValueError("kdelta0 must be nonnegative")


def k2_default_pattern(dof: int) -> np.ndarray:
    """Published gain pattern 0.1/0.2/0.6 laid over the 6+n channels."""
    out = np.empty(dof)
    out[:] = 0.6
    out[:min(8, dof)] = 0.1
    if dof > 8:
        out[8:min(10, dof)] = 0.2
    return out


def default_gains(n: int) -> ControllerGains:
    """Published parameter set of the proposed controller."""
    dof = 6 + n
    return ControllerGains(
        p=9, q=11, p1=5, q1=9, p2=7, q2=9,
        gamma1=np.full(3 + n, 0.1),
        gamma2=0.1,
        k1=np.full(dof, 1e-2),
        k2=k2_default_pattern(dof),
        phi_layer=1e-3,
        phi_adapt=1e-3,
        kdelta0=1e-4,
    )


@dataclass
class AdaptiveState:
    """Evolving per-channel disturbance-bound estimate (diagonal of K_delta)."""

    k_delta_hat: np.ndarray

    def __post_init__(self):
        self.k_delta_hat = np.asarray(self.k_delta_hat, dtype=float)

    @staticmethod
    def initial(n: int, kdelta0: float = 1e-4) -> "AdaptiveState":
        return AdaptiveState(np.full(6 + n, kdelta0))

    def trace(self) -> float:
        return float(self.k_delta_hat.sum())


@dataclass
class SlidingDiagnostics:
    """Per-step internals exposed for telemetry and analysis."""

    s1: np.ndarray
    s2: np.ndarray
    s: np.ndarray
    delta_s: np.ndarray
    xi: np.ndarray


@dataclass
class DisturbanceModel:
    """Acceleration-level disturbance generator under the strict bound
    |delta_i| < gamma1_i + gamma2_i ||xdot||^2 (checked at every sample)."""

    gamma1: np.ndarray
    gamma2: np.ndarray
    generator: str = "none"            # none | constant_bias | velocity_quadratic | parametric_mismatch
    amplitude_fraction: float = 0.8
    frequencies: np.ndarray | None = None   # Hz, per channel
    phases: np.ndarray | None = None

    def __post_init__(self):
        self.gamma1 = np.asarray(self.gamma1, dtype=float)
        self.gamma2 = np.asarray(self.gamma2, dtype=float)
        if self.generator not in ("none", "constant_bias",
                                  "velocity_quadratic", "parametric_mismatch"):
            raise ValueError(f"unknown generator {self.generator!r}")
        if not 0.0 < self.amplitude_fraction < 1.0:
            raise ValueError("amplitude_fraction must lie in (0, 1)")
        dof = self.gamma1.shape[0]
        if self.frequencies is None:
            self.frequencies = 0.05 + 0.04 * np.arange(dof)
        if self.phases is None:
            self.phases = 0.7 * np.arange(dof)

    @staticmethod
    def none(n: int) -> "DisturbanceModel":
        dof = 6 + n
        return DisturbanceModel(np.zeros(dof), np.zeros(dof), "none")

    def generate(self, t: float, xdot_norm_sq: float) -> np.ndarray:
        """Disturbance sample delta(t); zero for the passive generators."""
        dof = self.gamma1.shape[0]
        if self.generator in ("none", "parametric_mismatch"):
            return np.zeros(dof)
        bound = self.gamma1 + self.gamma2 * xdot_norm_sq
        if self.generator == "constant_bias":
            delta = self.amplitude_fraction * self.gamma1
        else:  # velocity_quadratic
            osc = np.sin(2.0 * np.pi * self.frequencies * t + self.phases)
            delta = self.amplitude_fraction * bound * osc
        if not np.all(np.abs(delta) < bound):
            raise AssertionError("disturbance generator violated its bound")
        return delta


def sat(v: np.ndarray) -> np.ndarray:
    """Component-wise saturation to [-1, 1]."""
    return np.clip(v, -1.0, 1.0)


def surface_s1(e: np.ndarray, edot: np.ndarray, gains: ControllerGains) -> np.ndarray:
    """Terminal surface for translation + joints: Gamma1^-1 edot^(q/p) + e."""
    return vec_pow(edot, gains.qp) / gains.gamma1 + e


def surface_s2(q_be: UnitQuaternion, omega_be: np.ndarray,
               gains: ControllerGains) -> np.ndarray:
    """Attitude surface; sgn+(eta) makes it double-cover invariant."""
    return (vec_pow(omega_be, gains.qp) / gains.gamma2
            + sgn_plus(q_be.eta)[0] * q_be.eps)


def assemble_s(s1: np.ndarray, s2: np.ndarray) -> np.ndarray:
    """Permute [s1; s2] into the [translation, rotation, joints] ordering
    of the generalized acceleration vector."""
    return np.concatenate([s1[:3], s2, s1[3:]])


def split_s(s: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Inverse of assemble_s."""
    return np.concatenate([s[:3], s[6:]]), s[3:6].copy()


def boundary_layer(s: np.ndarray, phi: float) -> np.ndarray:
    """delta_s = s - Phi sat(s/Phi): zero inside the layer |s_i| <= Phi."""
    if phi <= 0.0:
        raise ValueError("Phi must be positive")
    return s - phi * sat(s / phi)


def _errors(state: SystemState, ref: ReferenceSample):
    e = np.concatenate([state.p_b - ref.p_bd, state.q - ref.q_d])
    edot = np.concatenate([state.v_b - ref.v_bd, state.qdot - ref.qdot_d])
    q_be = error_quaternion(state.q_b, ref.q_bd)
    omega_be = state.omega_b - ref.omega_bd
    return e, edot, q_be, omega_be


def compute_surfaces(state: SystemState, ref: ReferenceSample,
                     gains: ControllerGains) -> SlidingDiagnostics:
    """Surfaces and boundary-layer quantities without the control effort."""
    e, edot, q_be, omega_be = _errors(state, ref)
    s1 = surface_s1(e, edot, gains)
    s2 = surface_s2(q_be, omega_be, gains)
    s = assemble_s(s1, s2)
    delta_s = boundary_layer(s, gains.phi_layer)
    zeta = assemble_s(abs_pow(edot, gains.qp - 1.0) / gains.gamma1,
                      abs_pow(omega_be, gains.qp - 1.0) / gains.gamma2)
    return SlidingDiagnostics(s1, s2, s, delta_s, zeta * delta_s)


def control(nominal_model: SpacecraftModel, state: SystemState,
            ref: ReferenceSample, gains: ControllerGains,
            adaptive: AdaptiveState) -> tuple[GeneralizedForce, SlidingDiagnostics]:
    """u_c = u1 + u2 + u3 with the nominal model's M0, C0."""
    qp = gains.qp
    e, edot, q_be, omega_be = _errors(state, ref)
    s1 = surface_s1(e, edot, gains)
    s2 = surface_s2(q_be, omega_be, gains)
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

    # equivalent-control term; the component-wise ratio's denominator is
    # lower-bounded at Phi to cap the effort as omega_be -> 0
    ratio = (abs_pow(omega_be, qp - 1.0)
             / np.maximum(abs_pow(omega_be, 2.0 * qp - 2.0), phi))
    epsdot = epsilon_dot(q_be, omega_be)
    u2_vec = assemble_s(gains.gamma1 * vec_pow(edot, 2.0 - qp),
                        sgn_plus(q_be.eta)[0] * gains.gamma2 * ratio * epsdot)
    u2 = -(1.0 / qp) * M0 @ u2_vec

    xdn2 = float(state.xdot() @ state.xdot())
    switching = adaptive.k_delta_hat * sat(s / phi) * (1.0 + xdn2)
    xi_norm_sq = float(xi @ xi)
    if xi_norm_sq >= XI_GUARD**2:
        ds_norm = float(np.linalg.norm(delta_s))
        boost = gains.k1 * xi / xi_norm_sq * ds_norm ** (2.0 * gains.p1 / gains.q1)
    else:
        boost = np.zeros_like(xi)
    u3 = -M0 @ (switching + boost + gains.k2 * vec_pow(delta_s, gains.p2 / gains.q2))

    u = u1 + u2 + u3
    if not np.all(np.isfinite(u)):
        raise ControlDivergenceError("non-finite control command")
    return GeneralizedForce.from_array(u), diag


def adaptive_update(adaptive: AdaptiveState, diag: SlidingDiagnostics,
                    xdot_norm_sq: float, gains: ControllerGains,
                    dt: float) -> AdaptiveState:
    """Euler step of the adaptive law; entries never decrease.

    The rate is phi * zeta_i * |delta_s_i| * (1 + ||xdot||^2) and
    zeta_i |delta_s_i| = |xi_i| since the diagonal weights are nonnegative.
    """
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    rate = gains.phi_adapt * np.abs(diag.xi) * (1.0 + xdot_norm_sq)
    return AdaptiveState(adaptive.k_delta_hat + rate * dt)


def settling_time_s1(e_at_reach: float, gamma_i: float, p: int, q: int) -> float:
    """Exact time for one error component to reach zero on the surface:
    |e|^(1-p/q) / (Gamma_i^(p/q) (1 - p/q))."""
    pq = p / q
    return abs(e_at_reach) ** (1.0 - pq) / (gamma_i ** pq * (1.0 - pq))


def settling_time_s2(q_be_at_reach: UnitQuaternion, gamma2: float,
                     p: int, q: int) -> float:
    """Attitude settling bound once the surface is enforced:
    2 ||eps||^(1-p/q) / (gamma2^(p/q) |eta| (1 - p/q))."""
    pq = p / q
    eps_norm = float(np.linalg.norm(q_be_at_reach.eps))
    eta_min = abs(q_be_at_reach.eta)
    if eps_norm == 0.0:
        return 0.0
    if eta_min == 0.0:
        raise ValueError("bound undefined at eta = 0 (it is left instantly)")
    return 2.0 * eps_norm ** (1.0 - pq) / (gamma2 ** pq * eta_min * (1.0 - pq))


def reach_time_bound(delta_s0_norm: float, gains: ControllerGains) -> float:
    """Upper bound on the time to reach delta_s = 0, with K1 taken as its
    minimum diagonal entry: derived from dV <= -(q/p) K1 2^(p1/q1) V^(p1/q1)
    for V = ||delta_s||^2 / 2."""
    p1q1 = gains.p1 / gains.q1
    k1 = float(np.min(gains.k1))
    v0 = 0.5 * delta_s0_norm**2
    return (gains.q1 * v0 ** ((gains.q1 - gains.p1) / gains.q1)
            / (2.0 ** p1q1 * (gains.q1 - gains.p1) * k1 * gains.qp))
