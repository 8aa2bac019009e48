"""Run configuration: YAML schema, validation and object construction.

One human-readable file configures the model, controller gains, actuator
limits, scenario and Monte-Carlo campaigns.  Every key is validated with
its full field path and unknown keys are rejected; an empty file runs the
paper-default system.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import yaml

from . import kinematics
from .actuation import ActuatorLimits
from .baselines import PDGains, default_euler_gains, default_pd_gains
from .kinematics import DHRow, SpacecraftModel, hollow_cylinder_link
from .ntsmc import ControllerGains, default_gains

SCHEMA_VERSION = 1


class ConfigError(ValueError):
    """Configuration rejected; message carries the offending field path."""


DEFAULT_DH = [
    {"a": 0.0, "alpha": float(al), "d": float(d), "offset": 0.0}
    for al, d in zip(kinematics.ARM_DH_ALPHA, kinematics.ARM_DH_D)
]

DEFAULTS = {
    "schema_version": SCHEMA_VERSION,
    "model": {
        "base_mass": kinematics.BASE_MASS,
        "base_inertia_diag": list(kinematics.BASE_INERTIA),
        "base_inertia_products": [0.0, 0.0, 0.0],
        "mount_offset": list(kinematics.DEFAULT_MOUNT_OFFSET),
        "dh": DEFAULT_DH,
        "link_outer_radius": kinematics.LINK_OUTER_RADIUS,
        "link_thickness": kinematics.LINK_WALL_THICKNESS,
        "link_density": kinematics.ALUMINIUM_DENSITY,
        "motor_mass": kinematics.MOTOR_POINT_MASS,
        "ee_mass": kinematics.EE_POINT_MASS,
        "ee_inertia_diag": [0.0, 0.0, 0.0],
        "ee_inertia_products": [0.0, 0.0, 0.0],
    },
    "gains": {
        "ntsmc": {
            "p": 9, "q": 11, "p1": 5, "q1": 9, "p2": 7, "q2": 9,
            "gamma1": 0.1, "gamma2": 0.1, "k1": 1e-2, "k2": None,
            "phi_layer": 1e-3, "phi_adapt": 1e-3, "kdelta0": 1e-4,
        },
        "euler": {
            "p": 9, "q": 11, "p1": 5, "q1": 9, "p2": 7, "q2": 9,
            "gamma1": 0.1, "gamma2": 0.1, "k1": 1e-3, "k2": None,
            "phi_layer": 1e-3, "phi_adapt": 1e-3, "kdelta0": 1e-4,
        },
        "pd": {
            "kp_b": 0.5, "kv_b": 0.25, "kq_eps": 0.5, "kw_b": 0.25,
            "kq": 1.0, "kqdot": 0.5,
        },
    },
    "limits": {
        "base_force_max": 10.0,
        "base_torque_max": 2.0,
        "joint_torque_max": 10.0,
    },
    "scenario": {
        "name": "two_phase",
        "horizon": 57.0,
        "dt": 1e-3,
        "motion_duration": None,
        "segment_split": [27.0, 30.0],
        "base_displacement": None,
        "ee_displacement": None,
        "arm_config": None,
        "misalignment_xyz": [0.0, 0.0, 0.0],
    },
    "mc": {
        "seed": 0,
        "runs": 100,
        "misalignment_bound": 4.0 * math.pi / 5.0,
        "motion_duration": 57.0,
        "attitude_horizon": 240.0,
        "attitude_dt": 5e-3,
        "attitude_base_torque_max": 40.0,
        "uncertainty_horizon": 150.0,
        "uncertainty_dt": 2e-3,
    },
}


def _merge(defaults, user, path):
    """Recursive defaults + user overlay; unknown keys rejected with path."""
    if user is None:
        return defaults
    if not isinstance(user, dict):
        raise ConfigError(f"{path or '<root>'}: expected a mapping")
    out = {}
    for key, dval in defaults.items():
        here = f"{path}.{key}" if path else key
        if key in user:
            uval = user[key]
            if isinstance(dval, dict):
                out[key] = _merge(dval, uval, here)
            else:
                out[key] = uval
        else:
            out[key] = dval
    unknown = set(user) - set(defaults)
    if unknown:
        k = sorted(unknown)[0]
        raise ConfigError(f"{path + '.' if path else ''}{k}: unknown key")
    return out


def _require(cond, path, msg):
    if not cond:
        raise ConfigError(f"{path}: {msg}")


def _as_vec(value, length, path, default=None):
    if value is None:
        return default
    arr = np.asarray(value, dtype=float)
    _require(arr.shape == (length,), path, f"expected {length} numbers")
    _require(bool(np.all(np.isfinite(arr))), path, "entries must be finite")
    return arr


def _diag_or_vec(value, length, path):
    """Scalar -> constant diagonal; list -> as-is."""
    if np.isscalar(value):
        _require(value > 0, path, "must be positive")
        return np.full(length, float(value))
    arr = _as_vec(value, length, path)
    _require(bool(np.all(arr > 0)), path, "entries must be positive")
    return arr


@dataclass
class RunConfig:
    """Validated configuration plus constructed objects."""

    raw: dict
    model: SpacecraftModel
    ntsmc_gains: ControllerGains
    euler_gains: ControllerGains
    pd_gains: PDGains
    limits: ActuatorLimits

    @property
    def scenario(self) -> dict:
        return self.raw["scenario"]

    @property
    def mc(self) -> dict:
        return self.raw["mc"]


def _build_model(m: dict) -> SpacecraftModel:
    path = "model"
    _require(np.isscalar(m["base_mass"]) and m["base_mass"] > 0,
             f"{path}.base_mass", "must be > 0")
    diag = _as_vec(m["base_inertia_diag"], 3, f"{path}.base_inertia_diag")
    _require(bool(np.all(diag > 0)), f"{path}.base_inertia_diag",
             "entries must be > 0")
    prod = _as_vec(m["base_inertia_products"], 3,
                   f"{path}.base_inertia_products")
    base_I = np.array([
        [diag[0], prod[0], prod[1]],
        [prod[0], diag[1], prod[2]],
        [prod[1], prod[2], diag[2]],
    ])
    _require(bool(np.linalg.eigvalsh(base_I).min() > 0),
             f"{path}.base_inertia_products",
             "base inertia must be positive definite")
    mount = _as_vec(m["mount_offset"], 3, f"{path}.mount_offset")
    for name in ("link_outer_radius", "link_thickness", "link_density",
                 "motor_mass"):
        _require(np.isscalar(m[name]) and m[name] > 0, f"{path}.{name}",
                 "must be > 0")
    _require(m["link_thickness"] < m["link_outer_radius"],
             f"{path}.link_thickness", "must be smaller than the outer radius")
    _require(isinstance(m["dh"], list) and len(m["dh"]) >= 1, f"{path}.dh",
             "expected a non-empty list of DH rows")
    links = []
    for j, row in enumerate(m["dh"]):
        rpath = f"{path}.dh[{j}]"
        _require(isinstance(row, dict), rpath, "expected a mapping")
        unknown = set(row) - {"a", "alpha", "d", "offset"}
        if unknown:
            raise ConfigError(f"{rpath}: unknown key {sorted(unknown)[0]!r}")
        for k in ("a", "alpha", "d", "offset"):
            _require(k in row and np.isfinite(row[k]), f"{rpath}.{k}",
                     "must be a finite number")
        _require(row["a"] == 0.0, f"{rpath}.a",
                 "only a = 0 chains are supported by the link builder")
        li = hollow_cylinder_link(
            row["alpha"], row["d"], outer_radius=m["link_outer_radius"],
            thickness=m["link_thickness"], density=m["link_density"],
            motor_mass=m["motor_mass"])
        _require(li.mass > 0, f"{rpath}.d", "link mass must be > 0")
        links.append((DHRow(row["a"], row["alpha"], row["d"], row["offset"]), li))
    _require(np.isscalar(m["ee_mass"]) and m["ee_mass"] >= 0,
             f"{path}.ee_mass", "must be >= 0")
    ee_diag = _as_vec(m["ee_inertia_diag"], 3, f"{path}.ee_inertia_diag")
    ee_prod = _as_vec(m["ee_inertia_products"], 3,
                      f"{path}.ee_inertia_products")
    ee_I = np.array([
        [ee_diag[0], ee_prod[0], ee_prod[1]],
        [ee_prod[0], ee_diag[1], ee_prod[2]],
        [ee_prod[1], ee_prod[2], ee_diag[2]],
    ])
    return SpacecraftModel(
        base_mass=float(m["base_mass"]), base_inertia_body=base_I,
        links=links, arm_mount_offset=mount,
        ee_mass=float(m["ee_mass"]), ee_inertia_body=ee_I)


def _build_smc_gains(g: dict, n: int, which: str) -> ControllerGains:
    path = f"gains.{which}"
    for k in ("p", "q", "p1", "q1", "p2", "q2"):
        _require(isinstance(g[k], int), f"{path}.{k}", "must be an integer")
    if g["k2"] is None:
        k2 = (default_gains(n) if which == "ntsmc"
              else default_euler_gains(n)).k2
    else:
        k2 = _diag_or_vec(g["k2"], 6 + n, f"{path}.k2")
    gains = ControllerGains(
        p=g["p"], q=g["q"], p1=g["p1"], q1=g["q1"], p2=g["p2"], q2=g["q2"],
        gamma1=_diag_or_vec(g["gamma1"], 3 + n, f"{path}.gamma1"),
        gamma2=float(g["gamma2"]), k1=_diag_or_vec(g["k1"], 6 + n, f"{path}.k1"),
        k2=k2, phi_layer=float(g["phi_layer"]),
        phi_adapt=float(g["phi_adapt"]), kdelta0=float(g["kdelta0"]))
    try:
        gains.validate()
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    return gains


def _build_pd_gains(g: dict, n: int) -> PDGains:
    path = "gains.pd"
    gains = PDGains(
        kp_b=_diag_or_vec(g["kp_b"], 3, f"{path}.kp_b"),
        kv_b=_diag_or_vec(g["kv_b"], 3, f"{path}.kv_b"),
        kq_eps=_diag_or_vec(g["kq_eps"], 3, f"{path}.kq_eps"),
        kw_b=_diag_or_vec(g["kw_b"], 3, f"{path}.kw_b"),
        kq=_diag_or_vec(g["kq"], n, f"{path}.kq"),
        kqdot=_diag_or_vec(g["kqdot"], n, f"{path}.kqdot"))
    try:
        gains.validate()
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    return gains


def _validate_scenario(s: dict, n: int) -> None:
    path = "scenario"
    _require(s["name"] in ("two_phase", "hold"), f"{path}.name",
             "must be 'two_phase' or 'hold'")
    _require(s["horizon"] > 0, f"{path}.horizon", "must be > 0")
    _require(s["dt"] > 0, f"{path}.dt", "must be > 0")
    if s["motion_duration"] is not None:
        _require(s["motion_duration"] > 0, f"{path}.motion_duration",
                 "must be > 0")
    split = _as_vec(s["segment_split"], 2, f"{path}.segment_split")
    _require(bool(np.all(split > 0)), f"{path}.segment_split",
             "entries must be > 0")
    _as_vec(s["base_displacement"], 3, f"{path}.base_displacement")
    _as_vec(s["ee_displacement"], 3, f"{path}.ee_displacement")
    _as_vec(s["arm_config"], n, f"{path}.arm_config")
    mis = s["misalignment_xyz"]
    if mis != "random":
        _as_vec(mis, 3, f"{path}.misalignment_xyz")


def _validate_mc(mc: dict) -> None:
    path = "mc"
    _require(isinstance(mc["seed"], int), f"{path}.seed", "must be an integer")
    _require(isinstance(mc["runs"], int) and mc["runs"] >= 1, f"{path}.runs",
             "must be an integer >= 1")
    for k in ("misalignment_bound", "motion_duration", "attitude_horizon",
              "attitude_dt", "attitude_base_torque_max",
              "uncertainty_horizon", "uncertainty_dt"):
        _require(np.isscalar(mc[k]) and mc[k] > 0, f"{path}.{k}",
                 "must be > 0")


def load_config(path_or_text: str, from_text: bool = False) -> RunConfig:
    """Parse, validate and construct; raises ConfigError on any problem."""
    if from_text:
        text = path_or_text
    else:
        try:
            with open(path_or_text) as f:
                text = f.read()
        except OSError as exc:
            raise ConfigError(f"cannot read config file: {exc}") from exc
    try:
        user = yaml.safe_load(text) or {}
    except yaml.YAMLError as exc:
        raise ConfigError(f"invalid YAML: {exc}") from exc
    raw = _merge(DEFAULTS, user, "")
    _require(raw["schema_version"] == SCHEMA_VERSION, "schema_version",
             f"expected {SCHEMA_VERSION}")
    model = _build_model(raw["model"])
    n = model.n
    ntsmc_gains = _build_smc_gains(raw["gains"]["ntsmc"], n, "ntsmc")
    euler_gains = _build_smc_gains(raw["gains"]["euler"], n, "euler")
    pd_gains = _build_pd_gains(raw["gains"]["pd"], n)
    lim = raw["limits"]
    for k in ("base_force_max", "base_torque_max", "joint_torque_max"):
        v = lim[k]
        _require(np.isscalar(v) and (v > 0), f"limits.{k}",
                 "must be > 0 (use .inf for unlimited)")
    limits = ActuatorLimits(float(lim["base_force_max"]),
                            float(lim["base_torque_max"]),
                            float(lim["joint_torque_max"]))
    _validate_scenario(raw["scenario"], n)
    _validate_mc(raw["mc"])
    return RunConfig(raw=raw, model=model, ntsmc_gains=ntsmc_gains,
                     euler_gains=euler_gains, pd_gains=pd_gains,
                     limits=limits)
