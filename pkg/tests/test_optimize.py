import dataclasses
import math

import pytest

from vrrjump import (DomainError, EvalRecord, FrrParams, NoFeasibleDesignError,
                     SearchBox, VrrParams, compare_designs,
                     default_search_box, optimize_frr, optimize_vrr,
                     select_best, simulate_jump)
from vrrjump.optimize import _axis

DEG = math.pi / 180.0


def small_box(dtheta=(0.0, 0.0, 1.0)) -> SearchBox:
    return SearchBox(
        r_range=(0.040, 0.050, 0.005),
        s0_range=(0.140, 0.160, 0.010),
        dtheta_range=dtheta,
        frr_range=(20.0, 24.0, 2.0),
    )


def test_axis_counts_default_box():
    box = default_search_box()
    assert len(_axis(box.r_range)) == 51
    assert len(_axis(box.s0_range)) == 31
    assert len(_axis(box.dtheta_range)) == 7
    assert len(_axis(box.frr_range)) == 31


def test_axis_endpoints():
    vals = _axis((0.025, 0.075, 0.001))
    assert vals[0] == 0.025
    assert vals[-1] == pytest.approx(0.075, abs=1e-12)


def test_grid_completeness(leg, motor, deep_crouch):
    box = small_box(dtheta=(-1.0 * DEG, 1.0 * DEG, 1.0 * DEG))
    opt = optimize_vrr(leg, motor, deep_crouch, box)
    assert len(opt.evaluations) == 3 * 3 * 3


def test_oracle_equivalence_brute_force(leg, motor, deep_crouch):
    """Independent argmax loop over the same grid must agree exactly."""
    box = small_box(dtheta=(-1.0 * DEG, 1.0 * DEG, 1.0 * DEG))
    best_w = -math.inf
    best_params = None
    for r in _axis(box.r_range):
        for s0 in _axis(box.s0_range):
            for dth in _axis(box.dtheta_range):
                params = VrrParams(r=r, s0=s0, delta_theta=dth)
                w = simulate_jump(leg, motor, params, deep_crouch,
                                  record=False).w_takeoff
                key = (-w, r, s0, abs(dth), dth)
                if best_params is None or key < best_key:
                    best_params, best_key, best_w = params, key, w
    opt = optimize_vrr(leg, motor, deep_crouch, box)
    assert opt.best_params == best_params
    assert opt.w_takeoff == best_w


def test_concurrent_equals_sequential(leg, motor, deep_crouch):
    box = small_box()
    seq = optimize_vrr(leg, motor, deep_crouch, box, workers=1)
    par = optimize_vrr(leg, motor, deep_crouch, box, workers=2)
    assert seq.best_params == par.best_params
    assert seq.w_takeoff == par.w_takeoff
    assert seq.evaluations == par.evaluations


def test_single_cell_grid(leg, motor, deep_crouch):
    box = SearchBox((0.047, 0.047, 1.0), (0.150, 0.150, 1.0),
                    (0.0, 0.0, 1.0), (22.0, 22.0, 1.0))
    opt = optimize_vrr(leg, motor, deep_crouch, box)
    assert len(opt.evaluations) == 1
    assert opt.best_params == VrrParams(r=0.047, s0=0.150, delta_theta=0.0)
    direct = simulate_jump(leg, motor, opt.best_params, deep_crouch,
                           record=False)
    assert opt.w_takeoff == direct.w_takeoff


def test_frr_collapsed_range(leg, motor, deep_crouch):
    box = SearchBox((0.047, 0.047, 1.0), (0.150, 0.150, 1.0),
                    (0.0, 0.0, 1.0), (22.0, 22.0, 1.0))
    opt = optimize_frr(leg, motor, deep_crouch, box)
    assert opt.best_params == FrrParams(22.0)


def test_frr_scan_brackets_reference_optimum(leg, motor, deep_crouch):
    box = dataclasses.replace(default_search_box())
    opt = optimize_frr(leg, motor, deep_crouch, box)
    assert abs(opt.best_params.k_fixed - 22.0) <= 3.0
    assert 0.38 < opt.h_jump < 0.47


def test_infeasible_offsets_recorded(leg, motor, deep_crouch):
    box = small_box(dtheta=(-3.0 * DEG, 0.0, 1.0 * DEG))
    opt = optimize_vrr(leg, motor, deep_crouch, box)
    assert len(opt.evaluations) == 3 * 3 * 4
    bad = [r for r in opt.evaluations if not r.feasible]
    assert len(bad) == 9 == opt.n_infeasible
    for rec in bad:
        assert rec.params.delta_theta == pytest.approx(-3.0 * DEG)
        assert math.isnan(rec.w_takeoff)
    assert opt.best_params.delta_theta > -3.0 * DEG


def test_no_feasible_design(leg, motor, deep_crouch):
    box = small_box(dtheta=(-3.0 * DEG, -3.0 * DEG, 1.0 * DEG))
    with pytest.raises(NoFeasibleDesignError):
        optimize_vrr(leg, motor, deep_crouch, box)


def test_select_best_scaling_invariance():
    recs = [
        EvalRecord(VrrParams(0.047, 0.150), 300.0, 0.5, True),
        EvalRecord(VrrParams(0.046, 0.150), 310.0, 0.52, True),
        EvalRecord(VrrParams(0.048, 0.140), 310.0, 0.52, True),
        EvalRecord(VrrParams(0.030, 0.200), float("nan"), float("nan"), False),
    ]
    best = select_best(recs)
    assert best.params == VrrParams(0.046, 0.150)
    scaled = [dataclasses.replace(r, w_takeoff=3.0 * r.w_takeoff) for r in recs]
    assert select_best(scaled).params == best.params


def test_select_best_tie_breaks_smallest_offset():
    recs = [
        EvalRecord(VrrParams(0.047, 0.150, delta_theta=2 * DEG), 300.0, 0.5, True),
        EvalRecord(VrrParams(0.047, 0.150, delta_theta=1 * DEG), 300.0, 0.5, True),
        EvalRecord(VrrParams(0.047, 0.150, delta_theta=-2 * DEG), 300.0, 0.5, True),
    ]
    assert select_best(recs).params.delta_theta == pytest.approx(1 * DEG)


def test_compare_designs_rows_and_improvement(leg, motor, deep_crouch):
    box = small_box()
    report = compare_designs(leg, motor, deep_crouch, box,
                             angles=[-1.9199, -2.6180])
    assert [r.angle for r in report.rows] == [-2.6180, -1.9199]
    for row in report.rows:
        assert row.error is None
        assert row.vrr.h_jump > row.frr.h_jump
        expected = 100.0 * (row.vrr.h_jump - row.frr.h_jump) / row.frr.h_jump
        assert row.improvement_pct == pytest.approx(expected, rel=1e-12)
        assert row.vrr_takeoff.trajectory and row.frr_takeoff.trajectory


def test_compare_designs_isolates_per_angle_errors(leg, motor, deep_crouch):
    box = small_box()
    report = compare_designs(leg, motor, deep_crouch, box,
                             angles=[-2.6180, -0.04])
    good = [r for r in report.rows if r.error is None]
    bad = [r for r in report.rows if r.error is not None]
    assert len(good) == 1 and len(bad) == 1
    assert bad[0].angle == -0.04
    assert good[0].vrr is not None


def test_search_box_validation():
    with pytest.raises(DomainError):
        SearchBox((0.05, 0.04, 0.001), (0.1, 0.2, 0.01), (0.0, 0.0, 1.0),
                  (10.0, 40.0, 1.0))
    with pytest.raises(DomainError):
        SearchBox((0.04, 0.05, 0.0), (0.1, 0.2, 0.01), (0.0, 0.0, 1.0),
                  (10.0, 40.0, 1.0))
