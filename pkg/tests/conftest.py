import numpy as np
import pytest

from orbital_arm.attitude import UnitQuaternion, from_axis_angle
from orbital_arm.dynamics import SystemState
from orbital_arm.kinematics import default_model


@pytest.fixture(scope="session")
def model():
    return default_model()


def random_unit_quaternion(rng) -> UnitQuaternion:
    v = rng.normal(size=4)
    while np.linalg.norm(v) < 1e-3:
        v = rng.normal(size=4)
    return UnitQuaternion.from_array(v / np.linalg.norm(v))


def random_state(rng, n, vel_scale=0.3) -> SystemState:
    return SystemState(
        p_b=rng.normal(size=3),
        q_b=from_axis_angle(rng.normal(size=3), rng.uniform(0.1, 3.0)),
        q=rng.normal(size=n),
        v_b=rng.normal(size=3) * vel_scale,
        omega_b=rng.normal(size=3) * vel_scale,
        qdot=rng.normal(size=n) * vel_scale,
    )
