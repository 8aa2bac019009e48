"""Actuator saturation: commanded generalized force -> applied force.

Base torque authority models the four-wheel cluster as an aggregate
per-axis envelope (0.5 Nm per wheel); base force is the thruster nominal
per axis; joint motors clamp at 10 Nm.  Pulse modulation, wheel momentum
states and the thruster geometry are out of scope.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynamics import GeneralizedForce

BASE_FORCE_MAX = 10.0        # N per axis (thruster nominal)
BASE_TORQUE_MAX = 2.0        # Nm per axis (4 x 0.5 Nm wheels, aggregate)
JOINT_TORQUE_MAX = 10.0      # Nm per joint


@dataclass(frozen=True)
class ActuatorLimits:
    base_force_max: float = BASE_FORCE_MAX
    base_torque_max: float = BASE_TORQUE_MAX
    joint_torque_max: float = JOINT_TORQUE_MAX

    def __post_init__(self):
        for name in ("base_force_max", "base_torque_max", "joint_torque_max"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be positive (or infinite)")

    @staticmethod
    def unlimited() -> "ActuatorLimits":
        return ActuatorLimits(np.inf, np.inf, np.inf)


def saturate(u_c: GeneralizedForce, limits: ActuatorLimits) -> GeneralizedForce:
    """Component-wise clamp preserving sign; idempotent."""
    return GeneralizedForce(
        f_b=np.clip(u_c.f_b, -limits.base_force_max, limits.base_force_max),
        tau_b=np.clip(u_c.tau_b, -limits.base_torque_max, limits.base_torque_max),
        tau_joints=np.clip(u_c.tau_joints, -limits.joint_torque_max,
                           limits.joint_torque_max),
    )
