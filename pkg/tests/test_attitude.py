import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from orbital_arm.attitude import (
    AxisAngle, UndefinedAxisError, UnitQuaternion, abs_pow, epsilon_dot,
    error_quaternion, euler_xyz_kinematic_matrix,
    euler_xyz_kinematic_matrix_dot, from_axis_angle, from_euler_xyz,
    g_matrix, geodesic_axis, hamilton, instantaneous_axis_distance,
    quat_derivative, rotation_angle, rotation_matrix, sgn_plus, skew,
    to_axis_angle, to_euler_xyz, vec_pow,
)
from conftest import random_unit_quaternion

I3 = np.eye(3)


def quats(rng, k):
    return [random_unit_quaternion(rng) for _ in range(k)]


unit_quat_st = st.builds(
    lambda v: UnitQuaternion.from_array(np.asarray(v) / np.linalg.norm(v)),
    st.lists(st.floats(-1.0, 1.0), min_size=4, max_size=4)
    .filter(lambda v: np.linalg.norm(v) > 1e-2))


class TestHamilton:
    def test_identity(self):
        rng = np.random.default_rng(1)
        q = random_unit_quaternion(rng)
        out = hamilton(UnitQuaternion.identity(), q)
        assert np.allclose(out.as_array(), q.as_array(), atol=1e-15)

    def test_ij_equals_k(self):
        i = UnitQuaternion(0.0, np.array([1.0, 0.0, 0.0]))
        j = UnitQuaternion(0.0, np.array([0.0, 1.0, 0.0]))
        out = hamilton(i, j)
        assert np.allclose(out.as_array(), [0.0, 0.0, 0.0, 1.0], atol=1e-15)

    def test_matches_rotation_composition(self):
        rng = np.random.default_rng(2)
        for a, b in zip(quats(rng, 100), quats(rng, 100)):
            R_prod = rotation_matrix(hamilton(a, b))
            assert np.abs(R_prod - rotation_matrix(a) @ rotation_matrix(b)).max() < 1e-12

    def test_associative_and_conjugate_inverse(self):
        rng = np.random.default_rng(3)
        for a, b, c in zip(quats(rng, 50), quats(rng, 50), quats(rng, 50)):
            lhs = hamilton(hamilton(a, b), c).as_array()
            rhs = hamilton(a, hamilton(b, c)).as_array()
            assert np.abs(lhs - rhs).max() < 1e-12
            ident = hamilton(a, a.conjugate()).as_array()
            assert np.abs(ident - [1.0, 0.0, 0.0, 0.0]).max() < 1e-12


class TestErrorQuaternion:
    def test_zero_error(self):
        rng = np.random.default_rng(4)
        q = random_unit_quaternion(rng)
        out = error_quaternion(q, q)
        assert abs(out.eta) == pytest.approx(1.0, abs=1e-12)
        assert np.abs(out.eps).max() < 1e-12

    def test_identity_reference(self):
        rng = np.random.default_rng(5)
        q = random_unit_quaternion(rng)
        out = error_quaternion(q, UnitQuaternion.identity())
        assert np.abs(out.as_array() - q.as_array()).max() < 1e-15

    def test_reconstruction(self):
        rng = np.random.default_rng(6)
        for q_b, q_bd in zip(quats(rng, 30), quats(rng, 30)):
            q_be = error_quaternion(q_b, q_bd)
            rec = hamilton(q_be, q_bd).as_array()
            direct = q_b.as_array()
            err = min(np.abs(rec - direct).max(), np.abs(rec + direct).max())
            assert err < 1e-12
            # rotation-matrix identity R(q_be) = R(q_b) R(q_bd)^T
            assert np.abs(rotation_matrix(q_be)
                          - rotation_matrix(q_b) @ rotation_matrix(q_bd).T).max() < 1e-12


class TestGMatrix:
    def test_identity(self):
        G = g_matrix(UnitQuaternion.identity())
        assert np.allclose(G, np.hstack([np.zeros((3, 1)), I3]))

    def test_orthogonality_1000(self):
        rng = np.random.default_rng(7)
        for q in quats(rng, 1000):
            G = g_matrix(q)
            assert np.abs(G @ G.T - I3).max() < 1e-12

    def test_spin_recovery(self):
        # analytic q(t) for constant inertial omega = (0,0,1)
        omega = np.array([0.0, 0.0, 1.0])
        q0 = from_axis_angle([1.0, 2.0, -1.0], 0.8)
        h = 1e-6

        def q_of_t(t):
            return hamilton(from_axis_angle(omega, t), q0)

        for t in (0.0, 0.4, 2.2):
            qdot_fd = (q_of_t(t + h).as_array() - q_of_t(t - h).as_array()) / (2 * h)
            q = q_of_t(t)
            assert np.abs(2.0 * g_matrix(q) @ qdot_fd - omega).max() < 1e-8
            assert np.abs(quat_derivative(q, omega) - qdot_fd).max() < 1e-8


class TestEpsilonDot:
    def test_zero_rate(self):
        rng = np.random.default_rng(8)
        q = random_unit_quaternion(rng)
        assert np.all(epsilon_dot(q, np.zeros(3)) == 0.0)

    def test_identity_half(self):
        out = epsilon_dot(UnitQuaternion.identity(), np.array([0.3, -0.2, 0.9]))
        assert np.allclose(out, [0.15, -0.1, 0.45])

    def test_fd_oracle_along_flow(self):
        rng = np.random.default_rng(9)
        h = 1e-6
        for q_be, w in zip(quats(rng, 20), rng.normal(size=(20, 3))):
            plus = hamilton(from_axis_angle(w, np.linalg.norm(w) * h), q_be)
            minus = hamilton(from_axis_angle(w, -np.linalg.norm(w) * h), q_be)
            # from_axis_angle normalizes; rebuild exact increments
            def flow(t):
                ang = np.linalg.norm(w) * t
                return hamilton(from_axis_angle(w, ang), q_be)
            fd = (flow(h).eps - flow(-h).eps) / (2 * h)
            assert np.abs(epsilon_dot(q_be, w) - fd).max() < 1e-6


class TestVecPow:
    def test_odd_root_sign(self):
        assert np.allclose(vec_pow(np.array([-8.0, 27.0]), 1.0 / 3.0), [-2.0, 3.0])

    def test_unit_power(self):
        v = np.array([0.3, -4.0, 0.0])
        assert np.array_equal(vec_pow(v, 1.0), v)

    def test_matches_scalar_loop(self):
        rng = np.random.default_rng(10)
        v = rng.normal(size=50)
        expect = np.array([abs(x) ** (11 / 9) * np.sign(x) for x in v])
        assert np.array_equal(vec_pow(v, 11 / 9), expect)

    def test_zero_component_domain_error(self):
        with pytest.raises(ValueError):
            vec_pow(np.array([0.0, 1.0]), -0.5)
        with pytest.raises(ValueError):
            abs_pow(np.array([0.0]), 0.0)

    @given(st.lists(st.floats(-100, 100), min_size=1, max_size=6),
           st.sampled_from([(3, 5), (5, 9), (9, 11), (7, 9)]))
    def test_roundtrip_odd_rational(self, v, pq):
        p, q = pq
        v = np.asarray([x for x in v if abs(x) > 1e-6] or [1.0])
        back = vec_pow(vec_pow(v, q / p), p / q)
        assert np.abs(back - v).max() < 1e-9 * max(1.0, np.abs(v).max())

    @given(st.lists(st.floats(-100, 100), min_size=1, max_size=6))
    def test_abs_pow_is_abs_of_vec_pow(self, v):
        v = np.asarray(v)
        assert np.array_equal(abs_pow(v, 2 / 9), np.abs(vec_pow(v, 2 / 9)))

    def test_abs_pow_examples(self):
        assert np.allclose(abs_pow(np.array([-8.0]), 1 / 3), [2.0])
        assert np.array_equal(abs_pow(np.zeros(4), 2 / 9), np.zeros(4))


class TestSgnPlus:
    def test_examples(self):
        assert sgn_plus(np.array([-0.5]))[0] == -1.0
        assert sgn_plus(np.array([0.0]))[0] == 1.0
        assert np.array_equal(sgn_plus(np.array([3.0, -3.0, 0.0])), [1.0, -1.0, 1.0])

    @given(st.lists(st.floats(allow_nan=False, allow_infinity=False),
                    min_size=1, max_size=8))
    def test_only_plus_minus_one(self, v):
        out = sgn_plus(np.asarray(v))
        assert set(np.unique(out)) <= {-1.0, 1.0}


class TestGeodesicAxis:
    def test_known_axis(self):
        q = from_axis_angle([0.0, 0.0, 1.0], np.pi / 4)
        assert np.allclose(geodesic_axis(q), [0.0, 0.0, 1.0], atol=1e-15)

    def test_double_cover(self):
        rng = np.random.default_rng(11)
        for q in quats(rng, 30):
            if np.linalg.norm(q.eps) < 1e-6:
                continue
            assert np.allclose(geodesic_axis(q), geodesic_axis(q.negated()),
                               atol=1e-14)

    def test_reconstruction(self):
        rng = np.random.default_rng(12)
        for q_b, q_bd in zip(quats(rng, 20), quats(rng, 20)):
            q_be = error_quaternion(q_b, q_bd)
            if np.linalg.norm(q_be.eps) < 1e-6:
                continue
            axis = geodesic_axis(q_be)
            angle = rotation_angle(q_be)
            rec = hamilton(from_axis_angle(axis, angle), q_bd).as_array()
            err = min(np.abs(rec - q_b.as_array()).max(),
                      np.abs(rec + q_b.as_array()).max())
            assert err < 1e-10

    def test_undefined_near_identity(self):
        with pytest.raises(UndefinedAxisError):
            geodesic_axis(UnitQuaternion.identity())


class TestAxisDistance:
    def test_parallel(self):
        a = np.array([0.0, 1.0, 0.0])
        assert instantaneous_axis_distance(0.3 * a, a) == pytest.approx(0.0, abs=1e-12)

    def test_orthogonal(self):
        assert instantaneous_axis_distance(
            np.array([1.0, 0.0, 0.0]), np.array([0.0, 1.0, 0.0])
        ) == pytest.approx(np.sqrt(2.0), abs=1e-12)

    def test_antiparallel(self):
        a = np.array([0.0, 0.0, 1.0])
        assert instantaneous_axis_distance(-2.0 * a, a) == pytest.approx(0.0, abs=1e-12)

    def test_undefined_at_rest(self):
        with pytest.raises(UndefinedAxisError):
            instantaneous_axis_distance(np.zeros(3), np.array([1.0, 0.0, 0.0]))


class TestEulerXYZ:
    def test_roundtrip(self):
        rng = np.random.default_rng(13)
        for _ in range(50):
            ang = rng.uniform([-np.pi, -1.4, -np.pi], [np.pi, 1.4, np.pi])
            back = to_euler_xyz(from_euler_xyz(ang))
            assert np.abs(back - ang).max() < 1e-10

    def test_rotation_convention(self):
        ang = np.array([0.3, -0.5, 0.8])
        Rx = rotation_matrix(from_axis_angle([1, 0, 0], ang[0]))
        Ry = rotation_matrix(from_axis_angle([0, 1, 0], ang[1]))
        Rz = rotation_matrix(from_axis_angle([0, 0, 1], ang[2]))
        assert np.abs(rotation_matrix(from_euler_xyz(ang)) - Rx @ Ry @ Rz).max() < 1e-14

    def test_kinematic_matrix(self):
        # omega = E_kin * euler_rates, checked by finite differences
        rng = np.random.default_rng(14)
        h = 1e-7
        for _ in range(20):
            ang = rng.uniform([-1, -1.2, -1], [1, 1.2, 1])
            rates = rng.normal(size=3)
            qp = from_euler_xyz(ang + h * rates)
            qm = from_euler_xyz(ang - h * rates)
            dq = (qp.as_array() - qm.as_array()) / (2 * h)
            omega_fd = 2.0 * g_matrix(from_euler_xyz(ang)) @ dq
            omega = euler_xyz_kinematic_matrix(ang) @ rates
            assert np.abs(omega - omega_fd).max() < 1e-6
            # determinant equals cos(pitch)
            det = np.linalg.det(euler_xyz_kinematic_matrix(ang))
            assert det == pytest.approx(np.cos(ang[1]), abs=1e-12)

    def test_kinematic_matrix_dot(self):
        rng = np.random.default_rng(15)
        h = 1e-6
        for _ in range(10):
            ang = rng.uniform(-1, 1, 3)
            rates = rng.normal(size=3)
            fd = (euler_xyz_kinematic_matrix(ang + h * rates)
                  - euler_xyz_kinematic_matrix(ang - h * rates)) / (2 * h)
            assert np.abs(euler_xyz_kinematic_matrix_dot(ang, rates) - fd).max() < 1e-6


class TestAxisAngle:
    def test_roundtrip(self):
        rng = np.random.default_rng(16)
        for _ in range(30):
            axis = rng.normal(size=3)
            axis /= np.linalg.norm(axis)
            angle = rng.uniform(1e-6, 2 * np.pi - 1e-6)
            aa = to_axis_angle(from_axis_angle(axis, angle))
            assert aa.angle == pytest.approx(angle, abs=1e-9)
            assert np.abs(aa.axis - axis).max() < 1e-9

    def test_skew(self):
        a, b = np.array([1.0, -2.0, 0.5]), np.array([0.3, 0.7, -1.1])
        assert np.allclose(skew(a) @ b, np.cross(a, b))
