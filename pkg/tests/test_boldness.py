from __future__ import annotations

import numpy as np
import pytest

from boldcal import (
    GridSpec,
    LLOParams,
    ParameterError,
    PredictionSet,
    boldness_recalibrate,
    evaluate_grid,
    fit_mle,
    llo_adjust,
    posterior_calibration,
    refine_grid,
    spread,
)


def _oracle_cells(data, spec, prior=0.5):
    """Cell-by-cell recomputation straight from the assessment module."""
    cells = []
    for delta in spec.delta_values:
        for gamma in spec.gamma_values:
            adjusted = llo_adjust(data.x, LLOParams(float(delta), float(gamma)))
            assessment = posterior_calibration(PredictionSet(adjusted, data.y), prior)
            cells.append(
                (float(delta), float(gamma), assessment.posterior_calibrated, spread(adjusted))
            )
    return cells


# ------------------------------------------------------------------- spread


def test_spread_constant_and_singleton():
    assert spread(np.full(5, 0.3)) == 0.0
    assert spread(np.array([0.42])) == 0.0


def test_spread_hand_values():
    assert spread(np.array([0.0, 1.0])) == pytest.approx(0.7071067811865476, abs=1e-15)
    assert spread(np.array([0.25, 0.5, 0.75])) == pytest.approx(0.25, abs=1e-15)


# ----------------------------------------------------------------- gridspec


def test_gridspec_validation():
    with pytest.raises(ParameterError):
        GridSpec(np.array([1.0, 0.5]), np.array([0.0, 1.0]))
    with pytest.raises(ParameterError):
        GridSpec(np.array([-1.0, 1.0]), np.array([0.0, 1.0]))
    spec = GridSpec.regular((0.5, 2.0), (0.0, 2.0), 5)
    assert spec.shape == (5, 5)
    assert spec.delta_values[0] == pytest.approx(0.5)
    assert spec.delta_values[-1] == pytest.approx(2.0)


# -------------------------------------------------------------------- grid


def test_grid_matches_independent_recomputation(small_set):
    spec = GridSpec.regular((0.5, 2.0), (0.3, 2.0), 3)
    grid = evaluate_grid(small_set, spec)
    oracle = _oracle_cells(small_set, spec)
    flat = list(grid.iter_cells())
    assert len(flat) == 9
    for cell, (delta, gamma, posterior, sd) in zip(flat, oracle):
        assert cell.delta == delta
        assert cell.gamma == gamma
        assert cell.posterior == posterior
        assert cell.spread == sd


def test_identity_cell_equals_raw_posterior(small_set):
    spec = GridSpec(np.array([0.5, 1.0, 2.0]), np.array([0.5, 1.0, 2.0]))
    grid = evaluate_grid(small_set, spec)
    center = grid.cells[1][1]
    assert (center.delta, center.gamma) == (1.0, 1.0)
    assert center.posterior == posterior_calibration(small_set).posterior_calibrated


def test_gamma_zero_cell_has_zero_spread(small_set):
    spec = GridSpec(np.array([2.0]), np.array([-1.0, 0.0, 1.0]))
    grid = evaluate_grid(small_set, spec)
    assert grid.cells[0][1].gamma == 0.0
    assert grid.cells[0][1].spread == 0.0


def test_grid_deterministic_across_runs_and_workers(small_set):
    spec = GridSpec.regular((0.4, 2.5), (0.2, 2.2), 9)
    first = evaluate_grid(small_set, spec, workers=1)
    second = evaluate_grid(small_set, spec, workers=1)
    parallel = evaluate_grid(small_set, spec, workers=2)
    for a, b, c in zip(first.iter_cells(), second.iter_cells(), parallel.iter_cells()):
        assert a == b == c


def test_degenerate_cells_flagged_not_fatal():
    # all-event outcomes make every cell's internal fit diverge
    data = PredictionSet(np.linspace(0.2, 0.8, 12), np.ones(12, dtype=int))
    grid = evaluate_grid(data, GridSpec.regular((0.5, 2.0), (0.5, 2.0), 2))
    for cell in grid.iter_cells():
        assert cell.degenerate
        assert cell.posterior == 0.0


# ----------------------------------------------------------------- boldness


def test_boldness_matches_exhaustive_scan(small_set):
    spec = GridSpec.regular((0.3, 3.0), (0.2, 2.5), 7)
    grid = evaluate_grid(small_set, spec)
    for t in (0.5, 0.9):
        result = boldness_recalibrate(small_set, t, grid=grid)
        feasible = [c for c in grid.iter_cells() if c.posterior >= t]
        if feasible:
            best = max(feasible, key=lambda c: (c.spread, c.posterior, -abs(c.gamma - 1.0)))
            assert result.feasible
            assert (result.params.delta, result.params.gamma) == (best.delta, best.gamma)
            assert result.achieved_spread == best.spread
            assert all(result.achieved_spread >= c.spread for c in feasible)
        else:
            assert not result.feasible


def test_infeasible_floor_reports_not_raises(small_set):
    spec = GridSpec.regular((0.3, 3.0), (0.2, 2.5), 5)
    grid = evaluate_grid(small_set, spec)
    result = boldness_recalibrate(small_set, 0.99, grid=grid)  # above n/(n+1)
    assert not result.feasible
    assert result.achieved_posterior == grid.max_posterior_cell.posterior


def test_spread_non_increasing_in_t(small_set):
    fit = fit_mle(small_set)
    spec = refine_grid(small_set, fit, k=15, coarse_k=5)
    grid = evaluate_grid(small_set, spec)
    spreads = [
        boldness_recalibrate(small_set, t, grid=grid).achieved_spread
        for t in (0.5, 0.7, 0.9)
    ]
    assert spreads[0] >= spreads[1] >= spreads[2]


def test_mle_cell_feasible_at_its_own_posterior(small_set):
    fit = fit_mle(small_set)
    spec = refine_grid(small_set, fit, k=15, coarse_k=5)
    grid = evaluate_grid(small_set, spec)
    mle_adjusted = llo_adjust(small_set.x, fit.params)
    mle_posterior = posterior_calibration(
        PredictionSet(mle_adjusted, small_set.y)
    ).posterior_calibrated
    result = boldness_recalibrate(small_set, mle_posterior - 1e-9, grid=grid)
    assert result.feasible
    assert result.achieved_spread >= spread(mle_adjusted) - 1e-12


def test_requires_spec_or_grid(small_set):
    with pytest.raises(ParameterError):
        boldness_recalibrate(small_set, 0.9)
    with pytest.raises(ParameterError):
        boldness_recalibrate(small_set, 1.5, grid=evaluate_grid(
            small_set, GridSpec.regular((0.5, 2.0), (0.5, 2.0), 2)))


def test_worker_count_capped_by_env(monkeypatch):
    from boldcal.boldness import _resolve_workers

    monkeypatch.delenv("BOLDCAL_THREADS", raising=False)
    assert _resolve_workers(None) == 1
    monkeypatch.setenv("BOLDCAL_THREADS", "2")
    assert _resolve_workers(None) == 2
    assert _resolve_workers(64) <= (__import__("os").cpu_count() or 1)


# -------------------------------------------------------------- refinement


def test_refine_grid_covers_identity_for_calibrated_data(calibrated_set):
    fit = fit_mle(calibrated_set)
    spec = refine_grid(calibrated_set, fit, k=11, coarse_k=5)
    assert spec.delta_values[0] < 1.0 < spec.delta_values[-1]
    assert spec.gamma_values[0] < 1.0 < spec.gamma_values[-1]
    assert not spec.partial_coverage


def test_refine_grid_boundary_posteriors_below_floor(calibrated_set):
    fit = fit_mle(calibrated_set)
    spec = refine_grid(calibrated_set, fit, k=5, coarse_k=5)
    grid = evaluate_grid(calibrated_set, spec)
    k_d, k_g = spec.shape
    for i in (0, k_d - 1):
        for j in range(k_g):
            assert grid.cells[i][j].posterior < 1e-4
    for j in (0, k_g - 1):
        for i in range(k_d):
            assert grid.cells[i][j].posterior < 1e-4


def test_refine_grid_expansion_cap_flags_partial_coverage(small_set):
    fit = fit_mle(small_set)
    # n=20 keeps boundary posteriors far above the floor at the initial window
    spec = refine_grid(small_set, fit, k=5, coarse_k=3, max_doublings=0)
    assert spec.partial_coverage


def test_refine_grid_centers_on_hedger_inverse():
    rng = np.random.default_rng(31)
    p = rng.uniform(size=5000)
    x = llo_adjust(p, LLOParams(1.0, 0.25))
    y = (rng.uniform(size=5000) < p).astype(int)
    data = PredictionSet(x, y)
    fit = fit_mle(data)
    spec = refine_grid(data, fit, k=9, coarse_k=5)
    center_gamma = 0.5 * (spec.gamma_values[0] + spec.gamma_values[-1])
    assert abs(center_gamma - 4.0) <= 0.5
