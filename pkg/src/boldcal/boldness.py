"""Grid evaluation of the calibration posterior and boldness-recalibration.

Boldness-recalibration sweeps a grid of shift/scale parameters, scores each
cell by the posterior probability of calibration of the adjusted predictions
and by their spread (sample standard deviation), then picks the cell that
maximizes spread among those whose posterior clears a user-chosen floor ``t``.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .assessment import posterior_calibration
from .errors import ParameterError
from .estimation import MLEFit
from .llo import LLOParams, PredictionSet, llo_adjust

THREADS_ENV = "BOLDCAL_THREADS"

DEFAULT_K = 200
COARSE_K = 9
BOUNDARY_POSTERIOR_FLOOR = 1e-4
MAX_DOUBLINGS = 10


@dataclass(frozen=True)
class GridSpec:
    """Axes of a parameter grid: delta log-spaced, gamma linear.

    ``partial_coverage`` is set by :func:`refine_grid` when the expansion cap
    was reached before the high-posterior region was fully enclosed.
    """

    delta_values: np.ndarray
    gamma_values: np.ndarray
    partial_coverage: bool = False

    def __post_init__(self):
        deltas = np.asarray(self.delta_values, dtype=float)
        gammas = np.asarray(self.gamma_values, dtype=float)
        if deltas.size < 1 or gammas.size < 1:
            raise ParameterError("grid axes must be non-empty")
        if np.any(deltas <= 0):
            raise ParameterError("all delta values must be positive")
        if np.any(np.diff(deltas) <= 0) or np.any(np.diff(gammas) <= 0):
            raise ParameterError("grid axes must be strictly increasing")
        object.__setattr__(self, "delta_values", deltas)
        object.__setattr__(self, "gamma_values", gammas)

    @classmethod
    def regular(
        cls,
        delta_range: tuple[float, float],
        gamma_range: tuple[float, float],
        k: int,
        partial_coverage: bool = False,
    ) -> "GridSpec":
        """k log-spaced deltas and k linear gammas over the given ranges."""
        if k < 2:
            raise ParameterError("k must be >= 2")
        if delta_range[0] <= 0 or delta_range[0] >= delta_range[1]:
            raise ParameterError("delta range must be positive and increasing")
        if gamma_range[0] >= gamma_range[1]:
            raise ParameterError("gamma range must be increasing")
        return cls(
            np.geomspace(delta_range[0], delta_range[1], k),
            np.linspace(gamma_range[0], gamma_range[1], k),
            partial_coverage,
        )

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.delta_values), len(self.gamma_values)


@dataclass(frozen=True)
class GridCell:
    delta: float
    gamma: float
    posterior: float
    spread: float
    degenerate: bool = False


@dataclass(frozen=True)
class ContourGrid:
    """Cells indexed [delta_index][gamma_index], plus the spec they came from."""

    spec: GridSpec
    cells: tuple[tuple[GridCell, ...], ...]

    def iter_cells(self):
        for row in self.cells:
            yield from row

    @property
    def max_posterior_cell(self) -> GridCell:
        return max(self.iter_cells(), key=lambda c: c.posterior)


@dataclass(frozen=True)
class BoldnessResult:
    """Outcome of maximizing spread subject to posterior >= t.

    ``feasible`` is False when no grid cell met the floor; the reported cell
    is then the one with the highest posterior, so callers can see how near
    the miss was.
    """

    t: float
    params: LLOParams
    recalibrated: np.ndarray
    achieved_posterior: float
    achieved_spread: float
    feasible: bool


def spread(x: np.ndarray) -> float:
    """Sample standard deviation (divisor n-1); 0 for constant or length-1 input."""
    x = np.asarray(x, dtype=float)
    if x.size == 0:
        raise ParameterError("spread needs at least one value")
    # exact zero for constant vectors (summation noise would leave ~1e-16)
    if x.size == 1 or np.min(x) == np.max(x):
        return 0.0
    return float(np.std(x, ddof=1))


def _resolve_workers(workers: int | None) -> int:
    if workers is None:
        env = os.environ.get(THREADS_ENV)
        workers = int(env) if env else 1
    return max(1, min(workers, os.cpu_count() or 1))


def _evaluate_cell(
    data: PredictionSet, delta: float, gamma: float, prior: float
) -> GridCell:
    adjusted = llo_adjust(data.x, LLOParams(delta, gamma))
    assessment = posterior_calibration(PredictionSet(adjusted, data.y), prior)
    return GridCell(
        delta=delta,
        gamma=gamma,
        posterior=assessment.posterior_calibrated,
        spread=spread(adjusted),
        degenerate=assessment.degenerate,
    )


# Worker-process state for parallel sweeps; set once per worker by the
# initializer so cells are not re-pickling the data set.
_WORKER_ARGS: tuple[PredictionSet, float] | None = None


def _init_worker(data: PredictionSet, prior: float) -> None:
    global _WORKER_ARGS
    _WORKER_ARGS = (data, prior)


def _cell_task(pair: tuple[float, float]) -> GridCell:
    data, prior = _WORKER_ARGS
    return _evaluate_cell(data, pair[0], pair[1], prior)


def evaluate_grid(
    data: PredictionSet,
    spec: GridSpec,
    prior_calibrated: float = 0.5,
    workers: int | None = None,
) -> ContourGrid:
    """Score every (delta, gamma) cell on the adjusted set's posterior and spread.

    Each cell is a full assessment of the adjusted predictions against the
    outcomes; cells whose internal fit diverges record posterior 0 with the
    ``degenerate`` flag instead of aborting the sweep.  Cells are independent,
    so the sweep may run on several processes (capped by the BOLDCAL_THREADS
    environment variable); results are assembled by index, never by completion
    order, and are identical under any scheduling.
    """
    pairs = [
        (float(d), float(g)) for d in spec.delta_values for g in spec.gamma_values
    ]
    workers = _resolve_workers(workers)
    if workers > 1 and len(pairs) >= 64:
        with ProcessPoolExecutor(
            max_workers=workers, initializer=_init_worker, initargs=(data, prior_calibrated)
        ) as pool:
            flat = list(pool.map(_cell_task, pairs, chunksize=32))
    else:
        flat = [_evaluate_cell(data, d, g, prior_calibrated) for d, g in pairs]
    n_gamma = len(spec.gamma_values)
    rows = tuple(
        tuple(flat[i * n_gamma : (i + 1) * n_gamma]) for i in range(len(spec.delta_values))
    )
    return ContourGrid(spec=spec, cells=rows)


def _boundary_cells(data: PredictionSet, spec: GridSpec, prior: float) -> list[GridCell]:
    k_d, k_g = spec.shape
    edge = {
        (i, j)
        for i in range(k_d)
        for j in range(k_g)
        if i in (0, k_d - 1) or j in (0, k_g - 1)
    }
    return [
        _evaluate_cell(data, float(spec.delta_values[i]), float(spec.gamma_values[j]), prior)
        for i, j in sorted(edge)
    ]


def refine_grid(
    data: PredictionSet,
    mle: MLEFit,
    k: int = DEFAULT_K,
    coarse_k: int = COARSE_K,
    prior_calibrated: float = 0.5,
    posterior_floor: float = BOUNDARY_POSTERIOR_FLOOR,
    max_doublings: int = MAX_DOUBLINGS,
) -> GridSpec:
    """Auto-size a grid around the fitted parameters.

    Starting from a small window centred on the fit, the window doubles until
    every boundary cell of a coarse probe grid has posterior below
    ``posterior_floor`` (the high-posterior region is enclosed), then the axes
    are densified to ``k`` points.  Hitting the expansion cap attaches a
    partial-coverage warning to the returned spec instead of failing.
    """
    center_log_delta = math.log(mle.params.delta)
    center_gamma = mle.params.gamma
    half_log_delta = 0.5
    half_gamma = 0.5
    partial = False
    for doubling in range(max_doublings + 1):
        probe = GridSpec.regular(
            (math.exp(center_log_delta - half_log_delta), math.exp(center_log_delta + half_log_delta)),
            (center_gamma - half_gamma, center_gamma + half_gamma),
            coarse_k,
        )
        boundary = _boundary_cells(data, probe, prior_calibrated)
        if all(cell.posterior < posterior_floor for cell in boundary):
            break
        if doubling == max_doublings:
            partial = True
            break
        half_log_delta *= 2.0
        half_gamma *= 2.0
    return GridSpec.regular(
        (math.exp(center_log_delta - half_log_delta), math.exp(center_log_delta + half_log_delta)),
        (center_gamma - half_gamma, center_gamma + half_gamma),
        k,
        partial_coverage=partial,
    )


def select_boldest_cell(grid: ContourGrid, t: float) -> tuple[GridCell, bool]:
    """Feasible cell with maximal spread, or the max-posterior cell if none.

    Spread ties break toward higher posterior, then toward gamma closest to 1
    (least distortion).
    """
    if not 0.0 < t < 1.0:
        raise ParameterError(f"calibration floor t must be in (0, 1), got {t}")
    feasible = [cell for cell in grid.iter_cells() if cell.posterior >= t]
    if not feasible:
        return grid.max_posterior_cell, False
    best = max(feasible, key=lambda c: (c.spread, c.posterior, -abs(c.gamma - 1.0)))
    return best, True


def boldness_recalibrate(
    data: PredictionSet,
    t: float,
    spec: GridSpec | None = None,
    grid: ContourGrid | None = None,
    prior_calibrated: float = 0.5,
    workers: int | None = None,
) -> BoldnessResult:
    """Maximize prediction spread subject to posterior calibration >= t.

    Either a ``spec`` to sweep or a pre-computed ``grid`` must be supplied
    (passing the grid lets callers reuse one sweep across several t levels).
    Infeasible floors are reported via ``feasible=False``, never raised.
    """
    if grid is None:
        if spec is None:
            raise ParameterError("either spec or grid must be provided")
        grid = evaluate_grid(data, spec, prior_calibrated, workers)
    cell, feasible = select_boldest_cell(grid, t)
    params = LLOParams(cell.delta, cell.gamma)
    return BoldnessResult(
        t=t,
        params=params,
        recalibrated=llo_adjust(data.x, params),
        achieved_posterior=cell.posterior,
        achieved_spread=cell.spread,
        feasible=feasible,
    )
