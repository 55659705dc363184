"""Report and plot-data emission: CSV/JSON files from comparison results.

All numeric CSV fields are written with 9 significant digits in C locale
formatting, so re-running an identical configuration reproduces every CSV
byte for byte. metadata.json is the only file with run-varying content
(timestamp and wall time).
"""

from __future__ import annotations

import csv
import datetime
import json
import math
from pathlib import Path

from .leg import LegModel, com_jacobian
from .mechanism import FrrParams, VrrParams, crank_angle, reduction_ratio
from .optimize import ComparisonReport, OptResult
from .sim import TakeoffResult

RPM_PER_RADS = 30.0 / math.pi
DEG = math.pi / 180.0

TRAJECTORY_COLUMNS = [
    "t_s", "q2_rad", "dq2_rads", "theta_rad", "k", "lambda_radpm",
    "tau_m_nm", "tau_j_nm", "omega_m_rpm", "p_m_w", "p_j_w",
    "y_com_m", "dy_com_mps", "f_contact_n", "w_motor_j",
]


def fmt(value: float | None) -> str:
    """Canonical numeric cell: 9 significant digits, empty for missing."""
    if value is None:
        return ""
    return f"{value:.9g}"


def _ratio_of(mech: VrrParams | FrrParams, q2: float) -> float:
    if isinstance(mech, FrrParams):
        return mech.k_fixed
    return reduction_ratio(mech, q2)


def trajectory_rows(leg: LegModel, mech: VrrParams | FrrParams,
                    result: TakeoffResult) -> list[list[str]]:
    """Render a recorded trajectory as CSV cells in the canonical column order."""
    rows = []
    for s in result.trajectory:
        theta = crank_angle(mech, s.q2) if isinstance(mech, VrrParams) else None
        rows.append([
            fmt(s.t), fmt(s.q2), fmt(s.dq2), fmt(theta),
            fmt(_ratio_of(mech, s.q2)), fmt(1.0 / com_jacobian(leg, s.q2)),
            fmt(s.tau_m), fmt(s.tau_j), fmt(s.omega_m * RPM_PER_RADS),
            fmt(s.p_m), fmt(s.p_j), fmt(s.y_com), fmt(s.dy_com),
            fmt(s.f_contact), fmt(s.w_motor),
        ])
    return rows


def write_csv(path: Path, header: list[str], rows: list[list[str]]) -> None:
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def write_trajectory_csv(path: Path, leg: LegModel,
                         mech: VrrParams | FrrParams,
                         result: TakeoffResult) -> None:
    write_csv(path, TRAJECTORY_COLUMNS, trajectory_rows(leg, mech, result))


def _mech_cells(params: VrrParams | FrrParams) -> list[str]:
    """(r_mm, s0_mm, dtheta_deg, k_fixed) cells for a summary row."""
    if isinstance(params, VrrParams):
        return [fmt(params.r * 1000.0), fmt(params.s0 * 1000.0),
                fmt(params.delta_theta / DEG), ""]
    return ["", "", "", fmt(params.k_fixed)]


def _opt_json(opt: OptResult | None) -> dict | None:
    if opt is None:
        return None
    out = {"w_takeoff_j": opt.w_takeoff, "h_jump_m": opt.h_jump,
           "n_infeasible": opt.n_infeasible}
    if isinstance(opt.best_params, VrrParams):
        out.update(r_mm=opt.best_params.r * 1000.0,
                   s0_mm=opt.best_params.s0 * 1000.0,
                   dtheta_deg=opt.best_params.delta_theta / DEG)
    else:
        out.update(k_fixed=opt.best_params.k_fixed)
    return out


def emit_report(report: ComparisonReport, out_dir: str | Path,
                n_ratio: int = 400) -> list[Path]:
    """Write summary tables and per-optimum channel CSVs; return the manifest.

    An empty report (no rows) produces only metadata.json.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    manifest: list[Path] = []

    meta = dict(report.metadata)
    meta.setdefault("tool_version", _tool_version())
    meta["timestamp"] = datetime.datetime.now(datetime.timezone.utc).isoformat()
    meta_path = out / "metadata.json"
    meta_path.write_text(json.dumps(meta, sort_keys=True, indent=2) + "\n")
    manifest.append(meta_path)
    if not report.rows:
        return manifest

    if "resolved_config" in meta:
        cfg_path = out / "config_resolved.json"
        cfg_path.write_text(json.dumps(meta["resolved_config"],
                                       sort_keys=True, indent=1) + "\n")
        manifest.append(cfg_path)

    summary_rows = []
    json_rows = []
    txt_lines = [
        f"{'joint':<6} {'angle_rad':>10} {'r_mm':>6} {'s0_mm':>6} {'dth_deg':>8} "
        f"{'k_fixed':>8} {'W_J':>10} {'H_m':>8} {'improve_%':>10}",
    ]
    for row in report.rows:
        json_rows.append({
            "angle_rad": row.angle,
            "vrr": _opt_json(row.vrr),
            "frr": _opt_json(row.frr),
            "improvement_pct": row.improvement_pct,
            "error": row.error,
        })
        if row.error is not None:
            summary_rows.append(["evrr", fmt(row.angle)] + [""] * 7 + [row.error])
            txt_lines.append(f"evrr   {row.angle:>10.4f}  ERROR: {row.error}")
            continue
        summary_rows.append(
            ["evrr", fmt(row.angle), *_mech_cells(row.vrr.best_params),
             fmt(row.vrr.w_takeoff), fmt(row.vrr.h_jump),
             fmt(row.improvement_pct), ""])
        summary_rows.append(
            ["frr", fmt(row.angle), *_mech_cells(row.frr.best_params),
             fmt(row.frr.w_takeoff), fmt(row.frr.h_jump), "", ""])
        vp = row.vrr.best_params
        txt_lines.append(
            f"{'evrr':<6} {row.angle:>10.4f} {vp.r*1000:>6.1f} {vp.s0*1000:>6.1f} "
            f"{vp.delta_theta/DEG:>8.2f} {'':>8} {row.vrr.w_takeoff:>10.3f} "
            f"{row.vrr.h_jump:>8.4f} {row.improvement_pct:>10.2f}")
        txt_lines.append(
            f"{'frr':<6} {row.angle:>10.4f} {'':>6} {'':>6} {'':>8} "
            f"{row.frr.best_params.k_fixed:>8.1f} {row.frr.w_takeoff:>10.3f} "
            f"{row.frr.h_jump:>8.4f} {'':>10}")

    sum_csv = out / "summary.csv"
    write_csv(sum_csv, ["joint_type", "angle_rad", "r_mm", "s0_mm", "dtheta_deg",
                        "k_fixed", "w_takeoff_j", "h_jump_m", "improvement_pct",
                        "error"], summary_rows)
    manifest.append(sum_csv)

    sum_json = out / "summary.json"
    sum_json.write_text(json.dumps({"rows": json_rows}, sort_keys=True, indent=2) + "\n")
    manifest.append(sum_json)

    sum_txt = out / "summary.txt"
    sum_txt.write_text("\n".join(txt_lines) + "\n")
    manifest.append(sum_txt)

    for row in report.rows:
        if row.error is not None:
            continue
        label = f"{row.angle:.4f}"
        traj_v = out / f"trajectory_evrr_{label}.csv"
        write_trajectory_csv(traj_v, report.leg, row.vrr.best_params, row.vrr_takeoff)
        manifest.append(traj_v)
        traj_f = out / f"trajectory_frr_{label}.csv"
        write_trajectory_csv(traj_f, report.leg, row.frr.best_params, row.frr_takeoff)
        manifest.append(traj_f)

        cap = row.vrr_takeoff.trajectory[-1].q2 if row.vrr_takeoff.trajectory else -0.05
        ratio_path = out / f"ratio_curve_evrr_{label}.csv"
        rows_ratio = []
        rows_overall = []
        n = n_ratio
        for i in range(n):
            q2 = row.angle + (cap - row.angle) * i / (n - 1)
            k_v = reduction_ratio(row.vrr.best_params, q2)
            lam = 1.0 / com_jacobian(report.leg, q2)
            rows_ratio.append([fmt(q2), fmt(crank_angle(row.vrr.best_params, q2)), fmt(k_v)])
            rows_overall.append([fmt(q2), fmt(k_v * lam),
                                 fmt(row.frr.best_params.k_fixed * lam)])
        write_csv(ratio_path, ["q2_rad", "theta_rad", "k"], rows_ratio)
        manifest.append(ratio_path)
        overall_path = out / f"overall_ratio_{label}.csv"
        write_csv(overall_path, ["q2_rad", "evrr_k_lambda_radpm", "frr_k_lambda_radpm"],
                  rows_overall)
        manifest.append(overall_path)

    return manifest


def _tool_version() -> str:
    from . import __version__
    return __version__
