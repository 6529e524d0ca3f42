"""Render calibration contour plots and recalibration lineplots from CSV.

Inputs are the CSV schemas emitted by the boldcal CLI:

* contour:  ``delta,gamma,posterior,spread`` (long-format full grid)
* lineplot: ``label,y,x_original[,x_mle,x_t...]`` plus an optional ``.json``
  sidecar mapping column names to achieved posterior probabilities

Rendering never touches the input files and is deterministic for a fixed
spec and seed.
"""

from __future__ import annotations

import csv
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from matplotlib.backends.backend_agg import FigureCanvasAgg
from matplotlib.figure import Figure

DEFAULT_LEVELS = (0.95, 0.9, 0.8)

EVENT_COLOR = "#2166ac"      # outcomes that happened
NONEVENT_COLOR = "#b2182b"   # outcomes that did not


class PlotkitError(ValueError):
    """Malformed input (bad CSV shape, bad spec values)."""


@dataclass(frozen=True)
class ContourFigureSpec:
    csv_path: Path
    out_path: Path
    levels: tuple[float, ...] = DEFAULT_LEVELS
    annotate: bool = True

    def __post_init__(self):
        if any(not 0.0 < level < 1.0 for level in self.levels):
            raise PlotkitError("contour levels must lie in (0, 1)")
        ordered = tuple(sorted(set(self.levels), reverse=True))
        object.__setattr__(self, "levels", ordered)
        object.__setattr__(self, "csv_path", Path(self.csv_path))
        object.__setattr__(self, "out_path", Path(self.out_path))


@dataclass(frozen=True)
class LineplotFigureSpec:
    csv_path: Path
    out_path: Path
    subsample: float = 1.0
    seed: int = 0
    event_color: str = EVENT_COLOR
    nonevent_color: str = NONEVENT_COLOR

    def __post_init__(self):
        if not 0.0 < self.subsample <= 1.0:
            raise PlotkitError("subsample fraction must lie in (0, 1]")
        object.__setattr__(self, "csv_path", Path(self.csv_path))
        object.__setattr__(self, "out_path", Path(self.out_path))


def _read_rows(path: Path, required: tuple[str, ...]) -> tuple[list[str], list[dict]]:
    with open(path, "r", encoding="utf-8", newline="") as handle:
        reader = csv.DictReader(handle)
        header = reader.fieldnames or []
        missing = [name for name in required if name not in header]
        if missing:
            raise PlotkitError(f"{path}: missing columns {missing} (found {header})")
        rows = list(reader)
    if not rows:
        raise PlotkitError(f"{path}: no data rows")
    return header, rows


def read_contour_grid(path: Path) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Pivot the long-format contour CSV into axes plus posterior/spread matrices."""
    _, rows = _read_rows(path, ("delta", "gamma", "posterior", "spread"))
    try:
        deltas = np.array(sorted({float(r["delta"]) for r in rows}))
        gammas = np.array(sorted({float(r["gamma"]) for r in rows}))
        posterior = np.full((len(gammas), len(deltas)), np.nan)
        spread = np.full_like(posterior, np.nan)
        d_index = {d: i for i, d in enumerate(deltas)}
        g_index = {g: j for j, g in enumerate(gammas)}
        for r in rows:
            i = d_index[float(r["delta"])]
            j = g_index[float(r["gamma"])]
            posterior[j, i] = float(r["posterior"])
            spread[j, i] = float(r["spread"])
    except (ValueError, KeyError) as err:
        raise PlotkitError(f"{path}: unparseable contour cell ({err})") from err
    if np.any(np.isnan(posterior)):
        raise PlotkitError(f"{path}: grid is not complete (missing delta/gamma cells)")
    return deltas, gammas, posterior, spread


def build_contour_figure(spec: ContourFigureSpec) -> tuple[Figure, dict]:
    deltas, gammas, posterior, spread_grid = read_contour_grid(spec.csv_path)

    fig = Figure(figsize=(7.0, 5.4), dpi=150)
    FigureCanvasAgg(fig)
    ax = fig.add_subplot(111)

    mesh = ax.pcolormesh(
        deltas, gammas, posterior, cmap="RdYlBu_r", vmin=0.0, vmax=1.0, shading="nearest"
    )
    fig.colorbar(mesh, ax=ax, label="posterior probability of calibration")

    info: dict = {"levels_drawn": [], "annotations": []}
    if float(posterior.max()) == 0.0:
        print("plotkit: warning: posterior is zero everywhere; surface is blank", file=sys.stderr)

    drawable = [lv for lv in spec.levels if posterior.min() < lv < posterior.max()]
    if drawable:
        contour_set = ax.contour(
            deltas, gammas, posterior,
            levels=sorted(drawable), colors="white", linewidths=1.2,
        )
        ax.clabel(contour_set, fmt=lambda v: f"{v:g}", fontsize=8)
        info["levels_drawn"] = sorted(drawable)

    if spec.annotate:
        j, i = np.unravel_index(int(np.argmax(posterior)), posterior.shape)
        ax.plot(deltas[i], gammas[j], marker="x", color="white", markersize=10, mew=2)
        info["annotations"].append(("max_posterior", float(deltas[i]), float(gammas[j])))
        for level in spec.levels:
            feasible = posterior >= level
            if not np.any(feasible):
                continue
            masked = np.where(feasible, spread_grid, -np.inf)
            j, i = np.unravel_index(int(np.argmax(masked)), masked.shape)
            ax.plot(deltas[i], gammas[j], marker="*", color="white", markersize=9)
            info["annotations"].append((f"t={level:g}", float(deltas[i]), float(gammas[j])))

    ax.set_xscale("log")
    ax.set_xlabel("shift delta (log scale)")
    ax.set_ylabel("scale gamma")
    ax.set_title("Boldness-recalibration contour")
    return fig, info


def render_contour(spec: ContourFigureSpec) -> Path:
    fig, _ = build_contour_figure(spec)
    fig.savefig(spec.out_path)
    return spec.out_path


def _load_sidecar(csv_path: Path) -> dict[str, float] | None:
    sidecar = csv_path.with_suffix(".json")
    if not sidecar.exists():
        return None
    with open(sidecar, "r", encoding="utf-8") as handle:
        return {str(k): float(v) for k, v in json.load(handle).items()}


def _column_label(name: str) -> str:
    if name == "x_original":
        return "Original"
    if name == "x_mle":
        return "MLE"
    if name.startswith("x_t"):
        return f"{name[3:]}% B-R"
    return name


def build_lineplot_figure(spec: LineplotFigureSpec) -> tuple[Figure, dict]:
    header, rows = _read_rows(spec.csv_path, ("label", "y"))
    columns = [name for name in header if name not in ("label", "y")]
    if not columns:
        raise PlotkitError(f"{spec.csv_path}: no prediction columns after label,y")
    try:
        outcomes = np.array([int(r["y"]) for r in rows])
        values = np.array([[float(r[c]) for c in columns] for r in rows])
    except ValueError as err:
        raise PlotkitError(f"{spec.csv_path}: unparseable lineplot row ({err})") from err

    n = len(rows)
    if spec.subsample < 1.0:
        keep = max(1, int(round(n * spec.subsample)))
        chosen = np.sort(np.random.default_rng(spec.seed).choice(n, size=keep, replace=False))
    else:
        chosen = np.arange(n)

    posteriors = _load_sidecar(spec.csv_path)
    if posteriors is None:
        print(
            "plotkit: warning: no .json sidecar next to the CSV; "
            "axis labels omit achieved posteriors",
            file=sys.stderr,
        )

    fig = Figure(figsize=(7.0, 5.4), dpi=150)
    FigureCanvasAgg(fig)
    ax = fig.add_subplot(111)
    positions = np.arange(len(columns))
    for i in chosen:
        color = spec.event_color if outcomes[i] == 1 else spec.nonevent_color
        ax.plot(positions, values[i], color=color, alpha=0.35, linewidth=0.8,
                marker="o", markersize=2.0)

    labels = []
    for name in columns:
        label = _column_label(name)
        if posteriors and name in posteriors:
            label += f"\n({posteriors[name]:.4f})"
        labels.append(label)
    ax.set_xticks(positions)
    ax.set_xticklabels(labels)
    ax.set_ylim(-0.02, 1.02)
    ax.set_ylabel("prediction")
    ax.set_title("Predictions under recalibration")
    return fig, {"rows_drawn": int(len(chosen)), "columns": columns}


def render_lineplot(spec: LineplotFigureSpec) -> Path:
    fig, _ = build_lineplot_figure(spec)
    fig.savefig(spec.out_path)
    return spec.out_path
