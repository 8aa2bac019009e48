"""Quaternion and SO(3) primitives for base-satellite attitude.

Conventions used throughout the package:

    * Unit quaternions are scalar-first, q = (eta, eps) with
      eta = cos(theta/2) and eps = sin(theta/2) * axis.
    * R(q) maps body coordinates into inertial coordinates and is a group
      homomorphism: R(a (x) b) = R(a) R(b).
    * Angular velocities are expressed in inertial coordinates, with the
      kinematics  omega = 2 G(q) qdot  and  qdot = 0.5 G(q)^T omega,
      where G(q) = [-eps | eta*E + [eps]_x]  (3x4).
    * xyz Euler triplets are intrinsic x-y-z rotations,
      R = Rx(a1) Ry(a2) Rz(a3), singular at a2 = +/- pi/2.

Everything here is a pure function on value types.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

AXIS_EPS = 1e-10        # below this |eps| the rotation axis is undefined
UNIT_TOL = 1e-9         # renormalization threshold for quaternion drift


class UndefinedAxisError(ValueError):
    """Raised when a rotation axis is requested for a near-identity rotation."""


@dataclass(frozen=True)
class UnitQuaternion:
    """Attitude element of S^3, scalar part ``eta`` and vector part ``eps``."""

    eta: float
    eps: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "eps", np.asarray(self.eps, dtype=float))
        if self.eps.shape != (3,):
            raise ValueError("eps must be a 3-vector")

    @staticmethod
    def identity() -> "UnitQuaternion":
        return UnitQuaternion(1.0, np.zeros(3))

    @staticmethod
    def from_array(w: np.ndarray) -> "UnitQuaternion":
        w = np.asarray(w, dtype=float)
        return UnitQuaternion(float(w[0]), w[1:4].copy())

    def as_array(self) -> np.ndarray:
        return np.concatenate(([self.eta], self.eps))

    @property
    def norm(self) -> float:
        return float(np.sqrt(self.eta**2 + self.eps @ self.eps))

    def normalized(self) -> "UnitQuaternion":
        n = self.norm
        if n == 0.0:
            raise ValueError("cannot normalize zero quaternion")
        return UnitQuaternion(self.eta / n, self.eps / n)

    def conjugate(self) -> "UnitQuaternion":
        return UnitQuaternion(self.eta, -self.eps)

    def negated(self) -> "UnitQuaternion":
        return UnitQuaternion(-self.eta, -self.eps)


@dataclass(frozen=True)
class AxisAngle:
    """Axis-angle rotation, angle in [0, 2*pi)."""

    axis: np.ndarray
    angle: float

    def __post_init__(self):
        object.__setattr__(self, "axis", np.asarray(self.axis, dtype=float))


def skew(v: np.ndarray) -> np.ndarray:
    """Cross-product matrix [v]_x with [v]_x w = v x w."""
    v = np.asarray(v, dtype=float)
    return np.array([
        [0.0, -v[2], v[1]],
        [v[2], 0.0, -v[0]],
        [-v[1], v[0], 0.0],
    ])


def hamilton(a: UnitQuaternion, b: UnitQuaternion) -> UnitQuaternion:
    """Hamilton product a (x) b, renormalized if drift exceeds UNIT_TOL."""
    eta = a.eta * b.eta - a.eps @ b.eps
    eps = a.eta * b.eps + b.eta * a.eps + np.cross(a.eps, b.eps)
    out = UnitQuaternion(eta, eps)
    if abs(out.norm - 1.0) > UNIT_TOL:
        out = out.normalized()
    return out


def rotation_matrix(q: UnitQuaternion) -> np.ndarray:
    """R(q), body -> inertial.  Valid (as a smooth map) for non-unit q too."""
    eta, eps = q.eta, q.eps
    return ((eta**2 - eps @ eps) * np.eye(3)
            + 2.0 * np.outer(eps, eps)
            + 2.0 * eta * skew(eps))


def error_quaternion(q_b: UnitQuaternion, q_bd: UnitQuaternion) -> UnitQuaternion:
    """Attitude error q_be = q_b (x) q_bd^-1, so R(q_be) = R(q_b) R(q_bd)^T."""
    return hamilton(q_b, q_bd.conjugate())


def g_matrix(q: UnitQuaternion) -> np.ndarray:
    """3x4 map G(q) = [-eps | eta*E + [eps]_x] with omega = 2 G qdot."""
    out = np.empty((3, 4))
    out[:, 0] = -q.eps
    out[:, 1:] = q.eta * np.eye(3) + skew(q.eps)
    return out


def quat_derivative(q: UnitQuaternion, omega: np.ndarray) -> np.ndarray:
    """qdot = 0.5 G(q)^T omega as a 4-array (scalar first)."""
    omega = np.asarray(omega, dtype=float)
    return 0.5 * g_matrix(q).T @ omega


def epsilon_dot(q_be: UnitQuaternion, omega_be: np.ndarray) -> np.ndarray:
    """Time derivative of the error-quaternion vector part.

    eps_dot = 0.5 (eta_be * omega_be - [eps_be]_x omega_be), exact for
    q_be driven by qdot_be = 0.5 G(q_be)^T omega_be.
    """
    omega_be = np.asarray(omega_be, dtype=float)
    return 0.5 * (q_be.eta * omega_be - np.cross(q_be.eps, omega_be))


def vec_pow(v: np.ndarray, alpha: float) -> np.ndarray:
    """Signed component-wise power: |v_i|^alpha * sgn(v_i).

    0^alpha = 0 for alpha > 0; alpha <= 0 on a zero component is a
    domain error.
    """
    v = np.asarray(v, dtype=float)
    if alpha <= 0.0 and np.any(v == 0.0):
        raise ValueError("vec_pow with alpha <= 0 on a zero component")
    return np.sign(v) * np.abs(v) ** alpha


def abs_pow(v: np.ndarray, alpha: float) -> np.ndarray:
    """Nonnegative component-wise power |v_i|^alpha."""
    v = np.asarray(v, dtype=float)
    if alpha <= 0.0 and np.any(v == 0.0):
        raise ValueError("abs_pow with alpha <= 0 on a zero component")
    return np.abs(v) ** alpha


def sgn_plus(x) -> np.ndarray:
    """Sign with the zero branch mapped to +1: -1 where x_i < 0, else +1."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    return np.where(x < 0.0, -1.0, 1.0)


def from_axis_angle(axis: np.ndarray, angle: float) -> UnitQuaternion:
    axis = np.asarray(axis, dtype=float)
    n = np.linalg.norm(axis)
    if n == 0.0:
        raise ValueError("zero rotation axis")
    half = 0.5 * angle
    return UnitQuaternion(np.cos(half), np.sin(half) * axis / n)


def to_axis_angle(q: UnitQuaternion) -> AxisAngle:
    """Axis-angle with angle in [0, 2*pi); axis = +z for near-identity q."""
    n = float(np.linalg.norm(q.eps))
    if n <= AXIS_EPS:
        return AxisAngle(np.array([0.0, 0.0, 1.0]), 0.0)
    angle = 2.0 * np.arctan2(n, q.eta)
    if angle < 0.0:
        angle += 2.0 * np.pi
    return AxisAngle(q.eps / n, angle)


def rotation_angle(q: UnitQuaternion) -> float:
    """Geodesic rotation angle in [0, pi] (double cover folded)."""
    return 2.0 * np.arccos(min(1.0, abs(q.eta)))


def geodesic_axis(q_be: UnitQuaternion) -> np.ndarray:
    """Unit axis of the shortest rotation represented by q_be.

    Sign-normalized so the implied angle is <= pi.  Raises
    UndefinedAxisError when ||eps|| <= AXIS_EPS (axis undefined).
    """
    n = float(np.linalg.norm(q_be.eps))
    if n <= AXIS_EPS:
        raise UndefinedAxisError("rotation axis undefined near identity")
    axis = q_be.eps / n
    if q_be.eta < 0.0:
        axis = -axis
    return axis


def instantaneous_axis_distance(omega_b: np.ndarray, geo_axis: np.ndarray) -> float:
    """Euclidean distance of the normalized rotation axis from geo_axis.

    The normalized omega is sign-aligned (double cover) to minimize the
    distance.  Undefined (raises) when ||omega_b|| <= AXIS_EPS; callers
    skip those samples.
    """
    omega_b = np.asarray(omega_b, dtype=float)
    n = float(np.linalg.norm(omega_b))
    if n <= AXIS_EPS:
        raise UndefinedAxisError("instantaneous axis undefined near rest")
    u = omega_b / n
    return float(min(np.linalg.norm(u - geo_axis), np.linalg.norm(u + geo_axis)))


def from_euler_xyz(angles: np.ndarray) -> UnitQuaternion:
    """Quaternion of the intrinsic xyz triplet: R = Rx(a1) Ry(a2) Rz(a3)."""
    a1, a2, a3 = np.asarray(angles, dtype=float)
    qx = from_axis_angle(np.array([1.0, 0.0, 0.0]), a1)
    qy = from_axis_angle(np.array([0.0, 1.0, 0.0]), a2)
    qz = from_axis_angle(np.array([0.0, 0.0, 1.0]), a3)
    return hamilton(hamilton(qx, qy), qz)


def to_euler_xyz(q: UnitQuaternion) -> np.ndarray:
    """xyz triplet of R(q): pitch = asin(R13) in [-pi/2, pi/2]."""
    R = rotation_matrix(q)
    pitch = np.arcsin(np.clip(R[0, 2], -1.0, 1.0))
    roll = np.arctan2(-R[1, 2], R[2, 2])
    yaw = np.arctan2(-R[0, 1], R[0, 0])
    return np.array([roll, pitch, yaw])


def euler_xyz_kinematic_matrix(angles: np.ndarray) -> np.ndarray:
    """E_kin with omega (inertial coords) = E_kin(a1, a2) * [da1, da2, da3].

    det(E_kin) = cos(a2): singular at pitch = +/- pi/2.
    """
    a1, a2 = float(angles[0]), float(angles[1])
    c1, s1 = np.cos(a1), np.sin(a1)
    c2, s2 = np.cos(a2), np.sin(a2)
    return np.array([
        [1.0, 0.0, s2],
        [0.0, c1, -s1 * c2],
        [0.0, s1, c1 * c2],
    ])


def euler_xyz_kinematic_matrix_dot(angles: np.ndarray, rates: np.ndarray) -> np.ndarray:
    """Time derivative of euler_xyz_kinematic_matrix along the given rates."""
    a1, a2 = float(angles[0]), float(angles[1])
    d1, d2 = float(rates[0]), float(rates[1])
    c1, s1 = np.cos(a1), np.sin(a1)
    c2, s2 = np.cos(a2), np.sin(a2)
    return np.array([
        [0.0, 0.0, c2 * d2],
        [0.0, -s1 * d1, -c1 * c2 * d1 + s1 * s2 * d2],
        [0.0, c1 * d1, -s1 * c2 * d1 - c1 * s2 * d2],
    ])
