"""Command-line surface: assess, recalibrate, contour, simulate.

Exit codes: 0 success (including completed-with-warnings), 1 usage error,
2 data error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .assessment import calibration_report, posterior_calibration
from .boldness import (
    DEFAULT_K,
    GridSpec,
    boldness_recalibrate,
    evaluate_grid,
    refine_grid,
    spread,
)
from .errors import (
    BoldcalError,
    DataFormatError,
    DivergenceError,
    InternalConsistencyError,
    NonConvergenceError,
    ParameterError,
)
from .estimation import fit_mle
from .io import (
    dump_json,
    read_predictions,
    render_report_table,
    report_as_dict,
    write_contour_csv,
    write_lineplot_csv,
    write_study_csv,
)
from .llo import PredictionSet, llo_adjust
from .simulation import (
    DEFAULT_N_VALUES,
    DEFAULT_REPLICATES,
    PAPER_SIGMAS,
    ARCHETYPE_PARAMS,
    ForecasterKind,
    MCStudyConfig,
    default_design,
    run_mc_study,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERICAL = 3


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors; this CLI reserves 2 for data errors.
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _build_parser() -> _Parser:
    parser = _Parser(prog="boldcal", description=__doc__)
    parser.add_argument("--version", action="version", version=f"boldcal {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    assess = sub.add_parser("assess", help="calibration report for a predictions CSV")
    assess.add_argument("input", help="CSV with columns x,y[,label]; '-' for stdin")
    assess.add_argument("--bins", type=int, default=10, help="bins for BSC/ECE (default 10)")
    assess.add_argument("--prior", type=float, default=0.5, help="prior P(calibrated) (default 0.5)")

    recal = sub.add_parser("recalibrate", help="MLE and/or boldness recalibration")
    recal.add_argument("input", help="CSV with columns x,y[,label]; '-' for stdin")
    recal.add_argument("--mle", action="store_true", help="include the MLE recalibration column")
    recal.add_argument(
        "--t", action="append", type=float, default=None, metavar="LEVEL",
        help="boldness-recalibration calibration floor; repeatable",
    )
    recal.add_argument("--k", type=int, default=DEFAULT_K, help=f"grid points per axis (default {DEFAULT_K})")
    recal.add_argument("--prior", type=float, default=0.5)
    recal.add_argument(
        "--out", default=None, metavar="PATH",
        help="write the lineplot CSV (and a .json sidecar of achieved posteriors) "
        "here; without it the CSV goes to stdout and the summary to stderr",
    )

    contour = sub.add_parser("contour", help="posterior/spread sweep over a parameter grid")
    contour.add_argument("input", help="CSV with columns x,y[,label]; '-' for stdin")
    contour.add_argument("--k", type=int, default=DEFAULT_K, help=f"grid points per axis (default {DEFAULT_K})")
    contour.add_argument("--delta-range", nargs=2, type=float, metavar=("LO", "HI"))
    contour.add_argument("--gamma-range", nargs=2, type=float, metavar=("LO", "HI"))
    contour.add_argument("--auto", action="store_true", help="size the grid automatically around the MLE")
    contour.add_argument("--prior", type=float, default=0.5)
    contour.add_argument("--out", default=None, metavar="PATH", help="write CSV here instead of stdout")

    simulate = sub.add_parser("simulate", help="Monte Carlo forecaster study")
    simulate.add_argument("--n", action="append", type=int, default=None, metavar="N",
                          help=f"sample size; repeatable (default {list(DEFAULT_N_VALUES)})")
    simulate.add_argument("--reps", type=int, default=DEFAULT_REPLICATES)
    simulate.add_argument("--seed", type=int, default=0)
    simulate.add_argument("--sigma", action="append", type=float, default=None,
                          help=f"log-odds noise s.d.; repeatable (default {list(PAPER_SIGMAS)})")
    simulate.add_argument("--types", action="append", default=None,
                          choices=[kind.value for kind in ARCHETYPE_PARAMS],
                          help="forecaster archetype; repeatable (default all four)")
    simulate.add_argument("--out", default=None, metavar="PATH", help="write CSV here instead of stdout")
    return parser


def _read_input(path: str) -> PredictionSet:
    if path == "-":
        return read_predictions(sys.stdin)
    return read_predictions(path)


def _open_out(path: str | None):
    if path is None:
        return sys.stdout, False
    return open(path, "w", encoding="utf-8", newline=""), True


def _cmd_assess(args) -> int:
    data = _read_input(args.input)
    report = calibration_report(data, prior_calibrated=args.prior, n_bins=args.bins)
    dump_json(report_as_dict(report), sys.stdout)
    print(render_report_table(report), file=sys.stderr)
    return EXIT_OK


def _t_column(t: float) -> str:
    return f"x_t{t * 100:g}"


def _cmd_recalibrate(args) -> int:
    t_levels = args.t or []
    if not args.mle and not t_levels:
        raise ParameterError("nothing to do: pass --mle and/or --t LEVEL")
    for t in t_levels:
        if not 0.0 < t < 1.0:
            raise ParameterError(f"--t must be in (0, 1), got {t}")
    data = _read_input(args.input)
    fit = fit_mle(data)

    columns: dict[str, np.ndarray] = {"x_original": data.x}
    posteriors = {
        "x_original": posterior_calibration(data, args.prior, fit=fit).posterior_calibrated
    }
    summary = {
        "n": data.n,
        "base_rate": data.base_rate,
        "adjustments": [],
    }
    warnings: list[str] = []

    if args.mle:
        adjusted = llo_adjust(data.x, fit.params)
        achieved = posterior_calibration(PredictionSet(adjusted, data.y), args.prior)
        columns["x_mle"] = adjusted
        posteriors["x_mle"] = achieved.posterior_calibrated
        summary["adjustments"].append(
            _adjustment_entry("x_mle", None, fit.params.delta, fit.params.gamma,
                              achieved.posterior_calibrated, adjusted, feasible=True)
        )

    if t_levels:
        spec = refine_grid(data, fit, k=args.k, prior_calibrated=args.prior)
        if spec.partial_coverage:
            warnings.append("grid expansion cap reached; coverage may be partial")
        grid = evaluate_grid(data, spec, prior_calibrated=args.prior)
        for t in t_levels:
            result = boldness_recalibrate(data, t, grid=grid, prior_calibrated=args.prior)
            name = _t_column(t)
            columns[name] = result.recalibrated
            posteriors[name] = result.achieved_posterior
            summary["adjustments"].append(
                _adjustment_entry(name, t, result.params.delta, result.params.gamma,
                                  result.achieved_posterior, result.recalibrated,
                                  feasible=result.feasible)
            )
            if not result.feasible:
                warnings.append(
                    f"t={t:g} infeasible: best grid posterior is {result.achieved_posterior:.4f}"
                )

    out_stream, to_file = _open_out(args.out)
    try:
        write_lineplot_csv(data, columns, out_stream)
    finally:
        if to_file:
            out_stream.close()
    if to_file:
        sidecar = Path(args.out).with_suffix(".json")
        with open(sidecar, "w", encoding="utf-8") as handle:
            dump_json(posteriors, handle)
        dump_json(summary, sys.stdout)
    else:
        dump_json(summary, sys.stderr)
    for warning in warnings:
        print(f"warning: {warning}", file=sys.stderr)
    return EXIT_OK


def _adjustment_entry(name, t, delta, gamma, posterior, values, feasible) -> dict:
    return {
        "name": name,
        "t": t,
        "delta": delta,
        "gamma": gamma,
        "posterior": posterior,
        "range_min": float(np.min(values)),
        "range_max": float(np.max(values)),
        "spread": spread(values),
        "feasible": feasible,
    }


def _cmd_contour(args) -> int:
    data = _read_input(args.input)
    base_rate = data.base_rate
    if base_rate in (0.0, 1.0):
        raise DivergenceError("degenerate data: every outcome is in one class")
    if args.auto:
        spec = refine_grid(data, fit_mle(data), k=args.k, prior_calibrated=args.prior)
    elif args.delta_range and args.gamma_range:
        spec = GridSpec.regular(tuple(args.delta_range), tuple(args.gamma_range), args.k)
    else:
        raise ParameterError("pass --auto, or both --delta-range and --gamma-range")
    grid = evaluate_grid(data, spec, prior_calibrated=args.prior)
    out_stream, to_file = _open_out(args.out)
    try:
        write_contour_csv(grid, out_stream)
    finally:
        if to_file:
            out_stream.close()
    return EXIT_OK


def _cmd_simulate(args) -> int:
    kinds = tuple(ForecasterKind(name) for name in args.types) if args.types else tuple(ARCHETYPE_PARAMS)
    sigmas = tuple(args.sigma) if args.sigma else PAPER_SIGMAS
    config = MCStudyConfig(
        seed=args.seed,
        n_values=tuple(args.n) if args.n else DEFAULT_N_VALUES,
        replicates=args.reps,
        forecasters=default_design(kinds=kinds, sigmas=sigmas),
    )
    rows = run_mc_study(config)
    out_stream, to_file = _open_out(args.out)
    try:
        write_study_csv(rows, out_stream)
    finally:
        if to_file:
            out_stream.close()
    return EXIT_OK


_COMMANDS = {
    "assess": _cmd_assess,
    "recalibrate": _cmd_recalibrate,
    "contour": _cmd_contour,
    "simulate": _cmd_simulate,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ParameterError as err:
        print(f"boldcal: usage error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except (DataFormatError, OSError) as err:
        print(f"boldcal: data error: {err}", file=sys.stderr)
        return EXIT_DATA
    except (DivergenceError, NonConvergenceError, InternalConsistencyError) as err:
        print(f"boldcal: numerical failure: {err}", file=sys.stderr)
        return EXIT_NUMERICAL
    except BoldcalError as err:
        print(f"boldcal: error: {err}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
