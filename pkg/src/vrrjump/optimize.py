"""Exhaustive mechanism-parameter search maximizing takeoff energy.

Candidates are evaluated on a fixed grid (row-major over r, S0, delta_theta
for the variable-ratio joint, or over k for the fixed-ratio baseline).
Candidates whose crank angle leaves the working range, or whose simulation
leaves the valid state range mid-flight, are recorded infeasible and excluded
from the argmax. Ties break toward the smallest (r, S0, |delta_theta|).

Evaluations are independent; with workers > 1 they run on a process pool in
deterministic chunks, and the aggregated result is identical to a sequential
run.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

from .errors import DomainError, NoFeasibleDesignError, SimulationRangeError
from .leg import LegModel
from .mechanism import FrrParams, MechanismRangeError, VrrParams
from .motor import MotorParams
from .sim import SimConfig, TakeoffResult, simulate_jump

log = logging.getLogger(__name__)

DEG = math.pi / 180.0


@dataclass(frozen=True)
class SearchBox:
    """Inclusive (min, max, step) ranges for each design axis, SI units."""

    r_range: tuple[float, float, float]
    s0_range: tuple[float, float, float]
    dtheta_range: tuple[float, float, float]
    frr_range: tuple[float, float, float]

    def __post_init__(self):
        for name in ("r_range", "s0_range", "dtheta_range", "frr_range"):
            lo, hi, step = getattr(self, name)
            if lo > hi:
                raise DomainError(f"{name}: min {lo} exceeds max {hi}")
            if step <= 0:
                raise DomainError(f"{name}: step {step} must be positive")


def default_search_box() -> SearchBox:
    """Default design box: r 25-75 mm / 1 mm, S0 100-250 mm / 5 mm,
    offset -3..3 deg / 1 deg, fixed ratio 10-40 / 1."""
    return SearchBox(
        r_range=(0.025, 0.075, 0.001),
        s0_range=(0.100, 0.250, 0.005),
        dtheta_range=(-3.0 * DEG, 3.0 * DEG, 1.0 * DEG),
        frr_range=(10.0, 40.0, 1.0),
    )


def _axis(rng: tuple[float, float, float]) -> list[float]:
    lo, hi, step = rng
    n = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return [lo + i * step for i in range(n)]


@dataclass(frozen=True)
class EvalRecord:
    """Outcome of one candidate; w/h are NaN when infeasible."""

    params: VrrParams | FrrParams
    w_takeoff: float
    h_jump: float
    feasible: bool


@dataclass
class OptResult:
    best_params: VrrParams | FrrParams
    w_takeoff: float
    h_jump: float
    evaluations: list[EvalRecord]
    n_infeasible: int


def _evaluate(leg: LegModel, motor: MotorParams, cfg: SimConfig,
              mech: VrrParams | FrrParams) -> tuple[float, float, bool]:
    try:
        res = simulate_jump(leg, motor, mech, cfg, record=False)
    except (MechanismRangeError, SimulationRangeError):
        return (math.nan, math.nan, False)
    return (res.w_takeoff, res.h_jump, True)


def _eval_chunk(leg, motor, cfg, mechs):
    return [_evaluate(leg, motor, cfg, m) for m in mechs]


def _run_grid(leg, motor, cfg, mechs, workers: int) -> list[EvalRecord]:
    if workers <= 1 or len(mechs) < 2:
        outs = [_evaluate(leg, motor, cfg, m) for m in mechs]
    else:
        n_chunks = min(len(mechs), workers * 8)
        size = (len(mechs) + n_chunks - 1) // n_chunks
        chunks = [mechs[i:i + size] for i in range(0, len(mechs), size)]
        outs = []
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_eval_chunk, leg, motor, cfg, c) for c in chunks]
            for fut in futures:
                outs.extend(fut.result())
    return [EvalRecord(m, w, h, ok) for m, (w, h, ok) in zip(mechs, outs)]


def _tie_key(params: VrrParams | FrrParams) -> tuple:
    if isinstance(params, FrrParams):
        return (params.k_fixed,)
    return (params.r, params.s0, abs(params.delta_theta), params.delta_theta)


def select_best(evaluations: list[EvalRecord]) -> EvalRecord:
    """Feasible record with maximal energy; ties go to the smallest params."""
    best = None
    best_key = None
    for rec in evaluations:
        if not rec.feasible:
            continue
        key = (-rec.w_takeoff, *_tie_key(rec.params))
        if best is None or key < best_key:
            best, best_key = rec, key
    if best is None:
        raise NoFeasibleDesignError(
            f"all {len(evaluations)} candidates failed the feasibility guard")
    return best


def _finish(evaluations: list[EvalRecord]) -> OptResult:
    best = select_best(evaluations)
    return OptResult(
        best_params=best.params,
        w_takeoff=best.w_takeoff,
        h_jump=best.h_jump,
        evaluations=evaluations,
        n_infeasible=sum(1 for r in evaluations if not r.feasible),
    )


def optimize_vrr(leg: LegModel, motor: MotorParams, cfg: SimConfig,
                 box: SearchBox, workers: int = 1) -> OptResult:
    """Grid-search (r, S0, delta_theta) for maximum takeoff energy."""
    mechs = [VrrParams(r=r, s0=s0, delta_theta=dth)
             for r in _axis(box.r_range)
             for s0 in _axis(box.s0_range)
             for dth in _axis(box.dtheta_range)]
    log.info("evaluating %d variable-ratio candidates (q2_init=%.4f)",
             len(mechs), cfg.q2_init)
    return _finish(_run_grid(leg, motor, cfg, mechs, workers))


def optimize_frr(leg: LegModel, motor: MotorParams, cfg: SimConfig,
                 box: SearchBox, workers: int = 1) -> OptResult:
    """Scan the scalar fixed reduction ratio for maximum takeoff energy."""
    mechs = [FrrParams(k_fixed=k) for k in _axis(box.frr_range)]
    log.info("evaluating %d fixed-ratio candidates (q2_init=%.4f)",
             len(mechs), cfg.q2_init)
    return _finish(_run_grid(leg, motor, cfg, mechs, workers))


@dataclass
class AngleRow:
    """Per-initial-angle comparison of the two optimized joints."""

    angle: float
    vrr: OptResult | None = None
    frr: OptResult | None = None
    vrr_takeoff: TakeoffResult | None = None
    frr_takeoff: TakeoffResult | None = None
    improvement_pct: float | None = None
    error: str | None = None


@dataclass
class ComparisonReport:
    rows: list[AngleRow]
    leg: LegModel
    metadata: dict


def compare_designs(leg: LegModel, motor: MotorParams, base_cfg: SimConfig,
                    box: SearchBox, angles: list[float],
                    workers: int = 1) -> ComparisonReport:
    """Optimize both joint types at each initial angle and compare heights.

    Rows are ordered deepest crouch first. A failure at one angle is recorded
    in that row's error field and does not abort the remaining angles. The
    optimal candidates are re-simulated with trajectory recording so reports
    can emit the per-channel curves.
    """
    rows = []
    for angle in sorted(angles):
        row = AngleRow(angle=angle)
        try:
            cfg = replace(base_cfg, q2_init=angle)
            row.vrr = optimize_vrr(leg, motor, cfg, box, workers)
            row.frr = optimize_frr(leg, motor, cfg, box, workers)
            row.vrr_takeoff = simulate_jump(leg, motor, row.vrr.best_params, cfg)
            row.frr_takeoff = simulate_jump(leg, motor, row.frr.best_params, cfg)
            if row.frr.h_jump != 0:
                row.improvement_pct = 100.0 * (row.vrr.h_jump - row.frr.h_jump) / row.frr.h_jump
            log.info("angle %.4f: vrr h=%.4f m, frr h=%.4f m",
                     angle, row.vrr.h_jump, row.frr.h_jump)
        except (DomainError, MechanismRangeError, SimulationRangeError,
                NoFeasibleDesignError) as exc:
            row.error = f"{type(exc).__name__}: {exc}"
            log.warning("angle %.4f failed: %s", angle, row.error)
        rows.append(row)
    return ComparisonReport(rows=rows, leg=leg, metadata={})
