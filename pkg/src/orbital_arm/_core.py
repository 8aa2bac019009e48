"""Jitted inner kernel for the multibody dynamics.

One pass over the chain produces the frames, per-body velocity/bias
recursion, generalized inertia matrix and Coriolis/centrifugal bias
vector.  The bias vector is the generalized force required to hold all
(6+n) quasi-velocity accelerations [a_b, omegadot_b, qddot] at zero, so
that  M(x) xddot + C(xdot, x) = F  holds exactly (validated against
finite-difference Lagrangian and energy oracles in the test suite).

Everything is plain array code so it runs identically with numba
disabled (NUMBA_DISABLE_JIT=1) for debugging.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def _cross(a, b):
    out = np.empty(3)
    out[0] = a[1] * b[2] - a[2] * b[1]
    out[1] = a[2] * b[0] - a[0] * b[2]
    out[2] = a[0] * b[1] - a[1] * b[0]
    return out


@njit(cache=True)
def _rotmat(q):
    """R(q) for scalar-first q; homogeneous formula, no normalization."""
    w, x, y, z = q[0], q[1], q[2], q[3]
    R = np.empty((3, 3))
    ww, xx, yy, zz = w * w, x * x, y * y, z * z
    s = ww - xx - yy - zz
    R[0, 0] = s + 2.0 * xx
    R[0, 1] = 2.0 * (x * y - w * z)
    R[0, 2] = 2.0 * (x * z + w * y)
    R[1, 0] = 2.0 * (x * y + w * z)
    R[1, 1] = s + 2.0 * yy
    R[1, 2] = 2.0 * (y * z - w * x)
    R[2, 0] = 2.0 * (x * z - w * y)
    R[2, 1] = 2.0 * (y * z + w * x)
    R[2, 2] = s + 2.0 * zz
    return R


@njit(cache=True)
def _dh_rel(a, alpha, d, theta):
    """Rotation and translation of frame j in frame j-1 (standard DH)."""
    ca, sa = np.cos(alpha), np.sin(alpha)
    ct, st = np.cos(theta), np.sin(theta)
    R = np.empty((3, 3))
    R[0, 0], R[0, 1], R[0, 2] = ct, -st * ca, st * sa
    R[1, 0], R[1, 1], R[1, 2] = st, ct * ca, -ct * sa
    R[2, 0], R[2, 1], R[2, 2] = 0.0, sa, ca
    p = np.empty(3)
    p[0], p[1], p[2] = a * ct, a * st, d
    return R, p


@njit(cache=True)
def mass_bias(base_mass, base_inertia, mount_R, mount_p,
              dh, link_mass, link_com, link_inertia, ee_mass, ee_inertia,
              p_b, q_b, qj, v_b, w_b, qd):
    """Mass matrix, bias vector and per-body kinematic snapshot.

    Returns (M, C, masses, coms, vcoms, omegas, R_frames, o_frames) with
    body index 0 = base, 1..n = links, n+1 = end effector.
    """
    n = dh.shape[0]
    dof = 6 + n
    nb = n + 2

    # --- frame chain -----------------------------------------------------
    R = np.zeros((n + 1, 3, 3))
    o = np.zeros((n + 1, 3))
    Rb = _rotmat(q_b)
    R[0] = Rb @ mount_R
    o[0] = p_b + Rb @ mount_p
    for j in range(n):
        Rrel, prel = _dh_rel(dh[j, 0], dh[j, 1], dh[j, 2], dh[j, 3] + qj[j])
        R[j + 1] = R[j] @ Rrel
        o[j + 1] = o[j] + R[j] @ prel

    # --- velocity / bias-acceleration recursion (qddot = 0, base frozen) -
    w = np.zeros((n + 1, 3))       # angular velocity of frame j's body
    wd = np.zeros((n + 1, 3))      # its bias angular acceleration
    vo = np.zeros((n + 1, 3))      # origin velocity
    ao = np.zeros((n + 1, 3))      # origin bias acceleration
    w[0] = w_b
    r0 = o[0] - p_b
    vo[0] = v_b + _cross(w_b, r0)
    ao[0] = _cross(w_b, _cross(w_b, r0))
    for j in range(1, n + 1):
        z = R[j - 1][:, 2].copy()
        w[j] = w[j - 1] + qd[j - 1] * z
        wd[j] = wd[j - 1] + qd[j - 1] * _cross(w[j - 1], z)
        r = o[j] - o[j - 1]
        vo[j] = vo[j - 1] + _cross(w[j], r)
        ao[j] = ao[j - 1] + _cross(wd[j], r) + _cross(w[j], _cross(w[j], r))

    # --- per-body tables --------------------------------------------------
    masses = np.zeros(nb)
    coms = np.zeros((nb, 3))
    vcoms = np.zeros((nb, 3))
    acoms = np.zeros((nb, 3))
    omegas = np.zeros((nb, 3))
    omdots = np.zeros((nb, 3))
    Iw = np.zeros((nb, 3, 3))

    masses[0] = base_mass
    coms[0] = p_b
    vcoms[0] = v_b
    omegas[0] = w_b
    Iw[0] = Rb @ base_inertia @ Rb.T

    for j in range(1, n + 1):
        masses[j] = link_mass[j - 1]
        d = R[j] @ link_com[j - 1]
        coms[j] = o[j] + d
        vcoms[j] = vo[j] + _cross(w[j], d)
        acoms[j] = ao[j] + _cross(wd[j], d) + _cross(w[j], _cross(w[j], d))
        omegas[j] = w[j]
        omdots[j] = wd[j]
        Iw[j] = R[j] @ link_inertia[j - 1] @ R[j].T

    masses[n + 1] = ee_mass
    coms[n + 1] = o[n]
    vcoms[n + 1] = vo[n]
    acoms[n + 1] = ao[n]
    omegas[n + 1] = w[n]
    omdots[n + 1] = wd[n]
    Iw[n + 1] = R[n] @ ee_inertia @ R[n].T

    # --- bias wrenches ----------------------------------------------------
    f = np.zeros((nb, 3))
    tq = np.zeros((nb, 3))
    tq[0] = _cross(w_b, Iw[0] @ w_b)
    for b in range(1, nb):
        f[b] = masses[b] * acoms[b]
        tq[b] = Iw[b] @ omdots[b] + _cross(omegas[b], Iw[b] @ omegas[b])

    C = np.zeros(dof)
    C[0:3] = f[1:].sum(axis=0)
    rot = tq[0].copy()
    for b in range(1, nb):
        rot += _cross(coms[b] - p_b, f[b]) + tq[b]
    C[3:6] = rot
    # joint torques via backward wrench accumulation; joint k moves the
    # bodies k..n plus the end effector
    Sf = masses[n + 1] * acoms[n + 1]
    Sm = _cross(coms[n + 1], Sf) + tq[n + 1]
    for k in range(n, 0, -1):
        Sf = Sf + f[k]
        Sm = Sm + _cross(coms[k], f[k]) + tq[k]
        z = R[k - 1][:, 2].copy()
        C[6 + k - 1] = z @ (Sm - _cross(o[k - 1], Sf))

    # --- mass matrix ------------------------------------------------------
    M = np.zeros((dof, dof))
    m_tot = masses.sum()
    for i in range(3):
        M[i, i] = m_tot
    M[3:6, 3:6] += Iw[0]
    Jv = np.zeros((3, n))
    Jw = np.zeros((3, n))
    for b in range(1, nb):
        m = masses[b]
        c = coms[b]
        dep = b if b <= n else n       # joints this body depends on
        Jv[:] = 0.0
        Jw[:] = 0.0
        for k in range(dep):
            z = R[k][:, 2]
            Jv[:, k] = _cross(z, c - o[k])
            Jw[:, k] = z
        p = c - p_b
        P = np.zeros((3, 3))
        P[0, 1], P[0, 2] = -p[2], p[1]
        P[1, 0], P[1, 2] = p[2], -p[0]
        P[2, 0], P[2, 1] = -p[1], p[0]
        M[0:3, 3:6] += -m * P
        M[3:6, 3:6] += Iw[b] - m * (P @ P)
        M[0:3, 6:] += m * Jv
        M[3:6, 6:] += Iw[b] @ Jw + m * (P @ Jv)
        M[6:, 6:] += Jw.T @ (Iw[b] @ Jw) + m * (Jv.T @ Jv)
    M[3:6, 0:3] = M[0:3, 3:6].T
    M[6:, 0:3] = M[0:3, 6:].T
    M[6:, 3:6] = M[3:6, 6:].T
    M = 0.5 * (M + M.T)

    return M, C, masses, coms, vcoms, omegas, R, o


@njit(cache=True)
def ee_pose_packed(mount_R, mount_p, dh, p_b, q_b, qj):
    """Rotation and origin of the last DH frame, inertial coordinates."""
    n = dh.shape[0]
    Rb = _rotmat(q_b)
    R = Rb @ mount_R
    o = p_b + Rb @ mount_p
    for j in range(n):
        Rrel, prel = _dh_rel(dh[j, 0], dh[j, 1], dh[j, 2], dh[j, 3] + qj[j])
        o = o + R @ prel
        R = R @ Rrel
    return R, o


@njit(cache=True)
def rk4_packed(base_mass, base_inertia, mount_R, mount_p,
               dh, link_mass, link_com, link_inertia, ee_mass, ee_inertia,
               y, force, dt):
    """One classic RK4 step of the packed state with zero-order-hold force.

    y = [p_b(3), q_b(4), q(n), v_b(3), w_b(3), qdot(n)].  The quaternion
    is renormalized after the update.
    """
    n = dh.shape[0]
    k1 = _ydot(base_mass, base_inertia, mount_R, mount_p, dh, link_mass,
               link_com, link_inertia, ee_mass, ee_inertia, y, force)
    k2 = _ydot(base_mass, base_inertia, mount_R, mount_p, dh, link_mass,
               link_com, link_inertia, ee_mass, ee_inertia,
               y + 0.5 * dt * k1, force)
    k3 = _ydot(base_mass, base_inertia, mount_R, mount_p, dh, link_mass,
               link_com, link_inertia, ee_mass, ee_inertia,
               y + 0.5 * dt * k2, force)
    k4 = _ydot(base_mass, base_inertia, mount_R, mount_p, dh, link_mass,
               link_com, link_inertia, ee_mass, ee_inertia,
               y + dt * k3, force)
    out = y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    qn = np.sqrt(out[3]**2 + out[4]**2 + out[5]**2 + out[6]**2)
    for i in range(3, 7):
        out[i] /= qn
    return out


@njit(cache=True)
def _ydot(base_mass, base_inertia, mount_R, mount_p,
          dh, link_mass, link_com, link_inertia, ee_mass, ee_inertia,
          y, force):
    n = dh.shape[0]
    p_b = y[0:3]
    q_b = y[3:7]
    qj = y[7:7 + n]
    v_b = y[7 + n:10 + n]
    w_b = y[10 + n:13 + n]
    qd = y[13 + n:13 + 2 * n]

    M, C = mass_bias(base_mass, base_inertia, mount_R, mount_p,
                     dh, link_mass, link_com, link_inertia,
                     ee_mass, ee_inertia,
                     p_b, q_b, qj, v_b, w_b, qd)[:2]
    acc = np.linalg.solve(M, force - C)

    ydot = np.empty(y.shape[0])
    ydot[0:3] = v_b
    # qdot = 0.5 G(q)^T omega with G = [-eps | eta E + [eps]_x]
    ydot[3] = -0.5 * (q_b[1] * w_b[0] + q_b[2] * w_b[1] + q_b[3] * w_b[2])
    ydot[4] = 0.5 * (q_b[0] * w_b[0] + q_b[3] * w_b[1] - q_b[2] * w_b[2])
    ydot[5] = 0.5 * (-q_b[3] * w_b[0] + q_b[0] * w_b[1] + q_b[1] * w_b[2])
    ydot[6] = 0.5 * (q_b[2] * w_b[0] - q_b[1] * w_b[1] + q_b[0] * w_b[2])
    ydot[7:7 + n] = qd
    ydot[7 + n:13 + 2 * n] = acc
    return ydot
