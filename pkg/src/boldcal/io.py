"""CSV ingestion and report/grid serialization.

Wire formats (all CSV, comma-separated, UTF-8, with header):

* input:    ``x,y[,label]``          one prediction/outcome per row
* contour:  ``delta,gamma,posterior,spread``  long-format grid sweep
* lineplot: ``label,y,x_original,x_mle[,x_t...]``  per-row trajectories
* study:    ``n,replicate,forecaster,sigma,metric,value``

Probabilities are serialized with 12 significant digits so a write/read round
trip preserves them to that precision.
"""

from __future__ import annotations

import csv
import io as _io
import json
import math
from pathlib import Path
from typing import IO, Iterable

import numpy as np

from .assessment import CalibrationReport
from .boldness import ContourGrid
from .errors import DataFormatError
from .llo import PredictionSet
from .simulation import StudyRow

SIG_DIGITS = 12


def format_value(value: float) -> str:
    if value != value:  # NaN
        return "nan"
    return format(value, f".{SIG_DIGITS}g")


def _open_source(source) -> tuple[IO[str], bool]:
    if isinstance(source, (str, Path)):
        return open(source, "r", encoding="utf-8", newline=""), True
    return source, False


def read_predictions(source) -> PredictionSet:
    """Parse a predictions CSV (path or text stream) into a PredictionSet.

    Requires ``x`` and ``y`` columns; a ``label`` column is kept when present
    and other columns are ignored.  Errors name the offending 1-based row
    (the header is row 1).
    """
    stream, owned = _open_source(source)
    try:
        reader = csv.DictReader(stream)
        if reader.fieldnames is None:
            raise DataFormatError("empty file: expected a header with columns x,y")
        fields = [name.strip() for name in reader.fieldnames]
        if "x" not in fields or "y" not in fields:
            raise DataFormatError(f"missing required columns x,y (found {fields})", row=1)
        has_label = "label" in fields
        xs: list[float] = []
        ys: list[int] = []
        labels: list[str] = []
        for row_number, record in enumerate(reader, start=2):
            raw_x = (record.get("x") or "").strip()
            raw_y = (record.get("y") or "").strip()
            try:
                x = float(raw_x)
            except ValueError:
                raise DataFormatError(f"cannot parse x value {raw_x!r}", row=row_number)
            if not 0.0 <= x <= 1.0 or math.isnan(x):
                raise DataFormatError(f"x={raw_x} outside [0, 1]", row=row_number)
            if raw_y not in ("0", "1"):
                raise DataFormatError(f"y={raw_y!r} must be exactly 0 or 1", row=row_number)
            xs.append(x)
            ys.append(int(raw_y))
            labels.append(record.get("label", "").strip() if has_label else str(row_number - 1))
        if not xs:
            raise DataFormatError("no data rows found")
        return PredictionSet(np.asarray(xs), np.asarray(ys), labels=tuple(labels))
    finally:
        if owned:
            stream.close()


def write_contour_csv(grid: ContourGrid, stream: IO[str]) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(["delta", "gamma", "posterior", "spread"])
    for cell in grid.iter_cells():
        writer.writerow(
            [
                format_value(cell.delta),
                format_value(cell.gamma),
                format_value(cell.posterior),
                format_value(cell.spread),
            ]
        )


def write_lineplot_csv(
    data: PredictionSet,
    columns: dict[str, np.ndarray],
    stream: IO[str],
) -> None:
    """Per-row original and recalibrated probabilities, in input order.

    ``columns`` maps column name (``x_original``, ``x_mle``, ``x_t95``, ...)
    to a prediction vector; insertion order becomes column order.
    """
    labels = data.labels or tuple(str(i + 1) for i in range(data.n))
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(["label", "y", *columns])
    vectors = list(columns.values())
    for i in range(data.n):
        writer.writerow([labels[i], int(data.y[i]), *(format_value(v[i]) for v in vectors)])


def write_study_csv(rows: Iterable[StudyRow], stream: IO[str]) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(["n", "replicate", "forecaster", "sigma", "metric", "value"])
    for row in rows:
        writer.writerow(
            [row.n, row.replicate, row.forecaster, format_value(row.sigma), row.metric, format_value(row.value)]
        )


def read_contour_csv(source) -> list[dict[str, float]]:
    """Read back a contour CSV as a list of per-cell dicts (used in tests)."""
    stream, owned = _open_source(source)
    try:
        reader = csv.DictReader(stream)
        return [
            {key: float(record[key]) for key in ("delta", "gamma", "posterior", "spread")}
            for record in reader
        ]
    finally:
        if owned:
            stream.close()


def report_as_dict(report: CalibrationReport) -> dict:
    """JSON-ready view of a calibration report with a stable key set."""
    return {
        "n": report.n,
        "base_rate": report.base_rate,
        "assessment": {
            "posterior_calibrated": report.bayes.posterior_calibrated,
            "bayes_factor_21": _jsonable(report.bayes.bayes_factor_21),
            "bic_null": _jsonable(report.bayes.bic_null),
            "bic_mle": _jsonable(report.bayes.bic_mle),
            "prior_calibrated": report.bayes.prior_calibrated,
            "degenerate": report.bayes.degenerate,
        },
        "lrt": {
            "statistic": report.lrt.statistic if report.lrt else None,
            "p_value": report.lrt.p_value if report.lrt else None,
            "dof": report.lrt.dof if report.lrt else None,
        },
        "scores": {
            "brier": report.scores.brier,
            "brier_calibration": report.scores.brier_calibration,
            "ece": report.scores.ece,
            "auc": report.scores.auc,
            "n_bins": report.scores.n_bins,
        },
    }


def _jsonable(value: float):
    # JSON has no inf/nan literals; report them as strings/null.
    if value != value:
        return None
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return value


def dump_json(payload: dict, stream: IO[str]) -> None:
    json.dump(payload, stream, indent=2, sort_keys=False)
    stream.write("\n")


def render_report_table(report: CalibrationReport) -> str:
    """Small aligned summary table (posteriors shown to 4 decimals)."""
    rows = [
        ("n", str(report.n)),
        ("base rate", f"{report.base_rate:.4f}"),
        ("P(calibrated | y)", f"{report.bayes.posterior_calibrated:.4f}"),
        ("LRT p-value", f"{report.lrt.p_value:.4f}" if report.lrt else "n/a"),
        ("Brier score", f"{report.scores.brier:.4f}"),
        ("Brier calibration", f"{report.scores.brier_calibration:.4f}"),
        ("ECE", f"{report.scores.ece:.4f}"),
        ("AUC", f"{report.scores.auc:.4f}" if report.scores.auc is not None else "undefined"),
    ]
    if report.bayes.degenerate:
        rows.append(("flag", "degenerate data (single outcome class)"))
    width = max(len(name) for name, _ in rows)
    return "\n".join(f"{name.ljust(width)}  {value}" for name, value in rows)


def contour_csv_text(grid: ContourGrid) -> str:
    buffer = _io.StringIO()
    write_contour_csv(grid, buffer)
    return buffer.getvalue()
