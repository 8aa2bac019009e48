"""Command-line entry point.

    orbital-arm simulate CONFIG --controller ntsmc --scenario two_phase --out DIR
    orbital-arm mc CONFIG --campaign attitude --runs 20 --seed 1 --jobs 2 --out DIR
    orbital-arm validate CONFIG

Exit codes: 0 success, 1 invariant-suite failure, 2 configuration error,
3 numerical divergence.  Output files are written atomically (temp file +
rename); ORBITAL_ARM_THREADS caps campaign parallelism.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import experiments as xp
from .actuation import ActuatorLimits
from .attitude import UnitQuaternion, g_matrix, from_axis_angle
from .config import ConfigError, RunConfig, load_config
from .dynamics import ModelPair, SystemState, kinetic_energy, mass_matrix, step
from .reference import apply_misalignment, build_reference

EXIT_OK = 0
EXIT_INVARIANT = 1
EXIT_CONFIG = 2
EXIT_DIVERGED = 3


def _build_scenario_reference(cfg: RunConfig, scenario_name: str | None):
    s = dict(cfg.scenario)
    if scenario_name:
        s["name"] = scenario_name
    return build_reference(
        s["name"], cfg.model, horizon=float(s["horizon"]),
        motion_duration=s["motion_duration"],
        base_displacement=s["base_displacement"],
        ee_displacement=s["ee_displacement"],
        segment_split=tuple(s["segment_split"]),
        q0=s["arm_config"]), s


def cmd_simulate(args) -> int:
    try:
        cfg = load_config(args.config)
        reference, s = _build_scenario_reference(cfg, args.scenario)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    mis = s["misalignment_xyz"]
    seed = args.seed if args.seed is not None else cfg.mc["seed"]
    if mis == "random":
        rng = xp.run_substream(seed, 0)
        mis = rng.uniform(-cfg.mc["misalignment_bound"],
                          cfg.mc["misalignment_bound"], size=3)
    init = apply_misalignment(reference, np.asarray(mis, dtype=float))

    gains = {"ntsmc": cfg.ntsmc_gains, "euler": cfg.euler_gains}.get(args.controller)
    pair = ModelPair(truth=cfg.model, nominal=cfg.model)
    res = xp.run_episode(
        pair, args.controller, reference, limits=cfg.limits,
        dt=float(s["dt"]), horizon=float(s["horizon"]), gains=gains,
        pd_gains=cfg.pd_gains, initial_state=init,
        record_attitude_path=True)

    os.makedirs(args.out, exist_ok=True)
    xp.write_telemetry(res.records, os.path.join(args.out, "telemetry.csv"))
    if res.attitude_path is not None:
        xp.write_attitude_path(res.attitude_path,
                               os.path.join(args.out, "eps_path.csv"))
    metrics = {
        "controller": args.controller,
        "scenario": s["name"],
        "seed": int(seed),
        "misalignment_xyz": [float(v) for v in np.asarray(mis, dtype=float)],
        "completed": res.completed,
        "flag_diverged": res.flag_diverged,
        "flag_singular": res.flag_singular,
        "records": len(res.records),
    }
    if len(res.records) >= 2:
        t = res.column("t")
        metrics.update({
            "energy": xp.energy_metric(res.records),
            "torque_integral": xp.torque_integral(res.records),
            "mean_axis_distance": xp.mean_axis_distance(res.records),
            "final_pos_err": res.records[-1].pos_err,
            "final_att_err": res.records[-1].att_err,
            "final_ee_pos_err": res.records[-1].ee_pos_err,
            "final_ee_att_err": res.records[-1].ee_att_err,
            "att_convergence_time": xp.convergence_time(
                t, res.column("att_err"), math.radians(xp.EE_ATT_THRESHOLD_DEG)),
            "ee_pos_convergence_time": xp.convergence_time(
                t, res.column("ee_pos_err"), xp.EE_POS_THRESHOLD),
        })
    xp.write_summary(metrics, os.path.join(args.out, "metrics.json"))

    finite = all(np.isfinite(v) for v in
                 (metrics.get("energy", 0.0), metrics.get("torque_integral", 0.0)))
    print(f"{args.controller} on {s['name']}: "
          f"{len(res.records)} steps, completed={res.completed}, "
          f"diverged={res.flag_diverged}, singular={res.flag_singular}")
    if res.flag_diverged or not finite:
        return EXIT_DIVERGED
    return EXIT_OK


def cmd_mc(args) -> int:
    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.campaign not in ("attitude", "uncertainty"):
        print(f"config error: unknown campaign {args.campaign!r}",
              file=sys.stderr)
        return EXIT_CONFIG

    mc = cfg.mc
    runs = args.runs if args.runs is not None else mc["runs"]
    seed = args.seed if args.seed is not None else mc["seed"]
    os.makedirs(args.out, exist_ok=True)
    try:
        if args.campaign == "attitude":
            config = xp.MCConfig(seed=seed, runs=runs,
                                 misalignment_bound=mc["misalignment_bound"],
                                 dt=mc["attitude_dt"],
                                 horizon=mc["attitude_horizon"],
                                 motion_duration=mc["motion_duration"])
            limits = ActuatorLimits(
                base_force_max=cfg.limits.base_force_max,
                base_torque_max=mc["attitude_base_torque_max"],
                joint_torque_max=cfg.limits.joint_torque_max)
            pair = ModelPair(truth=cfg.model, nominal=cfg.model)
            summary = xp.mc_attitude(config, pair, gains_prop=cfg.ntsmc_gains,
                                     gains_euler=cfg.euler_gains,
                                     limits=limits, jobs=args.jobs,
                                     outdir=args.out)
        else:
            config = xp.MCConfig(seed=seed, runs=runs,
                                 dt=mc["uncertainty_dt"],
                                 horizon=mc["uncertainty_horizon"],
                                 motion_duration=mc["motion_duration"])
            summary = xp.mc_uncertainty(config, cfg.model,
                                        gains=cfg.ntsmc_gains,
                                        limits=cfg.limits, jobs=args.jobs,
                                        outdir=args.out)
    except xp.CampaignConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    xp.write_summary(summary, os.path.join(args.out, "summary.json"))

    agg = summary["aggregates"]
    print(f"{args.campaign} campaign: {runs} runs, seed {seed}")
    for key in sorted(agg):
        val = agg[key]
        if isinstance(val, dict) and "mean" in val:
            print(f"  {key}: mean {val['mean']:.4g} (var {val['variance']:.3g})")
        elif isinstance(val, float):
            print(f"  {key}: {val:.4g}")
    if args.campaign == "attitude":
        print(f"  published mean torque-integral reduction (reference): "
              f"{summary['paper_reference_reduction_pct']}%")
    else:
        print(f"  published mean convergence times (reference): "
              f"{summary['paper_reference_pos_time']} s / "
              f"{summary['paper_reference_att_time']} s")
    return EXIT_OK


def _invariant_suite(cfg: RunConfig) -> list[tuple[str, bool, str]]:
    """Fast numerical sanity checks on the configured system."""
    checks = []
    rng = np.random.default_rng(0)
    n = cfg.model.n

    worst = 0.0
    for _ in range(100):
        q = UnitQuaternion.from_array(rng.normal(size=4)).normalized()
        G = g_matrix(q)
        worst = max(worst, float(np.abs(G @ G.T - np.eye(3)).max()))
    checks.append(("G G^T = E (100 random quaternions)", worst < 1e-12,
                   f"max deviation {worst:.2e}"))

    sym = pd = 0.0
    mineig = np.inf
    for _ in range(50):
        st = SystemState(
            p_b=rng.normal(size=3),
            q_b=from_axis_angle(rng.normal(size=3), rng.uniform(0.1, 3.0)),
            q=rng.normal(size=n), v_b=rng.normal(size=3) * 0.2,
            omega_b=rng.normal(size=3) * 0.2, qdot=rng.normal(size=n) * 0.2)
        M = mass_matrix(cfg.model, st)
        sym = max(sym, float(np.abs(M - M.T).max()))
        mineig = min(mineig, float(np.linalg.eigvalsh(M).min()))
    checks.append(("mass matrix symmetric (50 random states)", sym < 1e-10,
                   f"max asymmetry {sym:.2e}"))
    checks.append(("mass matrix positive definite", mineig > 0.0,
                   f"min eigenvalue {mineig:.3e}"))

    st = SystemState(
        p_b=np.zeros(3), q_b=from_axis_angle([1.0, 2.0, 3.0], 0.3),
        q=np.linspace(-0.4, 0.4, n), v_b=np.array([0.05, -0.02, 0.01]),
        omega_b=np.array([0.02, 0.03, -0.01]), qdot=np.full(n, 0.05))
    u = np.concatenate([[1.0, -0.5, 0.25, 0.05, 0.1, -0.05], np.full(n, 0.2)])
    dt = 1e-3
    worst_pb = 0.0
    k_prev = kinetic_energy(cfg.model, st)
    for i in range(1000):
        st_next = step(cfg.model, st, u, dt)
        k_next = kinetic_energy(cfg.model, st_next)
        power = 0.5 * (st.xdot() @ u + st_next.xdot() @ u)
        resid = abs((k_next - k_prev) / dt - power) / (1.0 + abs(power))
        worst_pb = max(worst_pb, resid)
        st, k_prev = st_next, k_next
    checks.append(("power balance over 1 s forced episode", worst_pb < 1e-5,
                   f"worst relative residual {worst_pb:.2e}"))
    return checks


def cmd_validate(args) -> int:
    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    checks = _invariant_suite(cfg)
    ok = True
    for name, passed, detail in checks:
        print(f"[{'PASS' if passed else 'FAIL'}] {name}: {detail}")
        ok &= passed
    return EXIT_OK if ok else EXIT_INVARIANT


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="orbital-arm",
        description="Free-flying space-manipulator simulation and control")
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="run one closed-loop episode")
    p_sim.add_argument("config")
    p_sim.add_argument("--controller", choices=("ntsmc", "pd", "euler"),
                       default="ntsmc")
    p_sim.add_argument("--scenario", choices=("two_phase", "hold"),
                       default=None)
    p_sim.add_argument("--seed", type=int, default=None)
    p_sim.add_argument("--out", required=True)
    p_sim.set_defaults(func=cmd_simulate)

    p_mc = sub.add_parser("mc", help="run a Monte-Carlo campaign")
    p_mc.add_argument("config")
    p_mc.add_argument("--campaign", required=True)
    p_mc.add_argument("--runs", type=int, default=None)
    p_mc.add_argument("--seed", type=int, default=None)
    p_mc.add_argument("--jobs", type=int, default=1)
    p_mc.add_argument("--out", required=True)
    p_mc.set_defaults(func=cmd_mc)

    p_val = sub.add_parser("validate", help="run the fast invariant suite")
    p_val.add_argument("config")
    p_val.set_defaults(func=cmd_validate)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
