"""Command-line interface.

Subcommands: simulate, optimize, compare, sweep-ratio, envelope.
Exit codes: 0 success, 2 configuration/usage error, 3 no feasible design in
the search box, 4 simulation left its valid range. The VRRJUMP_LOG
environment variable (DEBUG/INFO/WARNING/ERROR) sets log verbosity.

The tool is fully deterministic; --seedless is accepted for interface
compatibility and must be passed as a bare flag.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
import time
from pathlib import Path

from .config import RunConfig, load_config
from .errors import (ConfigError, DomainError, NoFeasibleDesignError,
                     SimulationRangeError, VrrJumpError)
from .mechanism import VrrParams, crank_angle, ratio_curve
from .motor import default_motor, envelope_table
from .optimize import compare_designs, optimize_frr, optimize_vrr
from .report import (RPM_PER_RADS, emit_report, fmt, write_csv,
                     write_trajectory_csv)
from .sim import simulate_jump

log = logging.getLogger("vrrjump")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INFEASIBLE = 3
EXIT_SIMULATION = 4


def _setup_logging() -> None:
    level = os.environ.get("VRRJUMP_LOG", "WARNING").upper()
    logging.basicConfig(
        level=getattr(logging, level, logging.WARNING),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )


def _add_common(parser: argparse.ArgumentParser, config_required: bool = True) -> None:
    parser.add_argument("--config", required=config_required,
                        help="path to the JSON run configuration")
    parser.add_argument("--out", default=None,
                        help="output directory (default: config output_dir)")
    parser.add_argument("--workers", type=int, default=1,
                        help="parallel candidate evaluations (default 1)")
    parser.add_argument("--jacobian-mode", choices=["paper", "geometric"],
                        default=None, help="override the config Jacobian mode")
    parser.add_argument("--seedless", action="store_true",
                        help="reserved; the tool uses no randomness anywhere")


def _load(args) -> RunConfig:
    return load_config(args.config, jacobian_mode=args.jacobian_mode)


def _out_dir(args, cfg: RunConfig | None) -> Path:
    if args.out is not None:
        return Path(args.out)
    return Path(cfg.output_dir if cfg else "out")


def _pick_angle(cfg: RunConfig, args) -> float:
    if getattr(args, "angle", None) is not None:
        return args.angle
    return cfg.angles[0]


def cmd_simulate(args) -> int:
    cfg = _load(args)
    if cfg.mechanism is None:
        raise ConfigError("simulate requires a 'mechanism' section in the config")
    angle = _pick_angle(cfg, args)
    result = simulate_jump(cfg.leg, cfg.motor, cfg.mechanism, cfg.sim.make(angle))
    out = _out_dir(args, cfg)
    out.mkdir(parents=True, exist_ok=True)
    traj_path = out / f"trajectory_{angle:.4f}.csv"
    write_trajectory_csv(traj_path, cfg.leg, cfg.mechanism, result)
    log.info("wrote %s (%d samples)", traj_path, len(result.trajectory))
    json.dump({
        "w_takeoff_j": result.w_takeoff,
        "h_jump_m": result.h_jump,
        "t_takeoff_s": result.t_takeoff,
        "q2_at_takeoff_rad": result.q2_at_takeoff,
        "terminated_by": result.terminated_by.value,
        "trajectory_csv": str(traj_path),
    }, sys.stdout, indent=2, sort_keys=True)
    sys.stdout.write("\n")
    return EXIT_OK


def _write_grid_csv(path: Path, opt) -> None:
    rows = []
    for rec in opt.evaluations:
        if isinstance(rec.params, VrrParams):
            cells = [fmt(rec.params.r * 1000), fmt(rec.params.s0 * 1000),
                     fmt(math.degrees(rec.params.delta_theta)), ""]
        else:
            cells = ["", "", "", fmt(rec.params.k_fixed)]
        rows.append(cells + [str(rec.feasible).lower(),
                             fmt(rec.w_takeoff) if rec.feasible else "nan",
                             fmt(rec.h_jump) if rec.feasible else "nan"])
    write_csv(path, ["r_mm", "s0_mm", "dtheta_deg", "k_fixed",
                     "feasible", "w_takeoff_j", "h_jump_m"], rows)
    log.info("wrote %s", path)


def cmd_optimize(args) -> int:
    cfg = _load(args)
    angle = _pick_angle(cfg, args)
    sim_cfg = cfg.sim.make(angle)
    fn = optimize_vrr if args.joint == "vrr" else optimize_frr
    opt = fn(cfg.leg, cfg.motor, sim_cfg, cfg.search, workers=args.workers)
    if args.dump_grid:
        out = _out_dir(args, cfg)
        out.mkdir(parents=True, exist_ok=True)
        _write_grid_csv(out / f"grid_{args.joint}_{angle:.4f}.csv", opt)
    best = opt.best_params
    summary = {
        "angle_rad": angle,
        "w_takeoff_j": opt.w_takeoff,
        "h_jump_m": opt.h_jump,
        "n_evaluations": len(opt.evaluations),
        "n_infeasible": opt.n_infeasible,
    }
    if isinstance(best, VrrParams):
        summary.update(r_mm=best.r * 1000, s0_mm=best.s0 * 1000,
                       dtheta_deg=math.degrees(best.delta_theta))
    else:
        summary.update(k_fixed=best.k_fixed)
    json.dump(summary, sys.stdout, indent=2, sort_keys=True)
    sys.stdout.write("\n")
    return EXIT_OK


def cmd_compare(args) -> int:
    cfg = _load(args)
    t0 = time.perf_counter()
    base = cfg.sim.make(cfg.angles[0])
    report = compare_designs(cfg.leg, cfg.motor, base, cfg.search,
                             list(cfg.angles), workers=args.workers)
    report.metadata = {
        "config_sha256": cfg.config_hash,
        "resolved_config": cfg.resolved_doc,
        "wall_time_s": round(time.perf_counter() - t0, 3),
    }
    out = _out_dir(args, cfg)
    manifest = emit_report(report, out)
    if args.dump_grid:
        for row in report.rows:
            for joint, opt in (("vrr", row.vrr), ("frr", row.frr)):
                if opt is None:
                    continue
                path = out / f"grid_{joint}_{row.angle:.4f}.csv"
                _write_grid_csv(path, opt)
                manifest.append(path)
    for path in manifest:
        print(path)
    failed = [r for r in report.rows if r.error is not None]
    return EXIT_INFEASIBLE if len(failed) == len(report.rows) and failed else EXIT_OK


def cmd_sweep_ratio(args) -> int:
    cfg = _load(args)
    if not isinstance(cfg.mechanism, VrrParams):
        raise ConfigError("sweep-ratio requires a variable-ratio 'mechanism' section")
    lo = args.lo if args.lo is not None else cfg.angles[0]
    hi = args.hi if args.hi is not None else cfg.sim.q2_takeoff_cap
    curve = ratio_curve(cfg.mechanism, lo, hi, args.n)
    rows = [[fmt(q2), fmt(crank_angle(cfg.mechanism, q2)), fmt(k)]
            for q2, k in curve.samples]
    out = _out_dir(args, cfg)
    out.mkdir(parents=True, exist_ok=True)
    path = out / "ratio_curve.csv"
    write_csv(path, ["q2_rad", "theta_rad", "k"], rows)
    json.dump({"argmax_q2_rad": curve.argmax_q2, "k_max": curve.k_max,
               "csv": str(path)}, sys.stdout, indent=2, sort_keys=True)
    sys.stdout.write("\n")
    return EXIT_OK


def cmd_envelope(args) -> int:
    motor = _load(args).motor if args.config else default_motor()
    table = envelope_table(motor, args.n)
    rows = [[fmt(p.omega * RPM_PER_RADS), fmt(p.tau_max), fmt(p.p_out), fmt(p.p_loss)]
            for p in table]
    out = Path(args.out) if args.out else None
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
        path = out / "envelope.csv"
        write_csv(path, ["omega_rpm", "tau_max_nm", "p_out_w", "p_loss_w"], rows)
        print(path)
    else:
        print(",".join(["omega_rpm", "tau_max_nm", "p_out_w", "p_loss_w"]))
        for row in rows:
            print(",".join(row))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vrrjump",
        description="Variable-reduction-ratio knee: takeoff simulation and "
                    "mechanism design search.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="simulate one maximum-effort takeoff")
    _add_common(p)
    p.add_argument("--angle", type=float, default=None,
                   help="initial knee angle in rad (default: first config angle)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("optimize", help="grid-search mechanism parameters")
    _add_common(p)
    p.add_argument("--joint", choices=["vrr", "frr"], default="vrr")
    p.add_argument("--angle", type=float, default=None)
    p.add_argument("--dump-grid", action="store_true",
                   help="also write the full evaluation grid as CSV")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("compare", help="optimize both joint types at every "
                                       "configured angle and emit reports")
    _add_common(p)
    p.add_argument("--dump-grid", action="store_true",
                   help="also write the per-angle evaluation grids as CSV")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("sweep-ratio", help="sample the reduction-ratio curve")
    _add_common(p)
    p.add_argument("--lo", type=float, default=None, help="range start (rad)")
    p.add_argument("--hi", type=float, default=None, help="range end (rad)")
    p.add_argument("--n", type=int, default=200)
    p.set_defaults(func=cmd_sweep_ratio)

    p = sub.add_parser("envelope", help="sample the motor torque/power envelope")
    _add_common(p, config_required=False)
    p.add_argument("--n", type=int, default=200)
    p.set_defaults(func=cmd_envelope)

    return parser


def main(argv: list[str] | None = None) -> int:
    _setup_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DomainError as exc:
        print(f"invalid parameter: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NoFeasibleDesignError as exc:
        print(f"no feasible design: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except SimulationRangeError as exc:
        print(f"simulation error: {exc}", file=sys.stderr)
        return EXIT_SIMULATION
    except VrrJumpError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SIMULATION


if __name__ == "__main__":
    sys.exit(main())
