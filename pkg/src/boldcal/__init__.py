"""Calibration assessment and boldness-recalibration for binary-event forecasts.

The package tests whether a set of probability predictions is calibrated
(posterior model probability and likelihood ratio test), scores it (Brier,
calibration component, ECE, AUC), and recalibrates it: either to the
maximum-likelihood parameters or to the boldest parameters that keep the
posterior probability of calibration above a chosen floor.
"""

from __future__ import annotations

__version__ = "0.1.0"

from .assessment import (
    BayesAssessment,
    CalibrationReport,
    LRTResult,
    ScoreReport,
    auc,
    brier,
    brier_calibration,
    calibration_report,
    ece,
    lrt,
    posterior_calibration,
    posterior_from_loglik,
    score_report,
)
from .boldness import (
    BoldnessResult,
    ContourGrid,
    GridCell,
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
    NonInvertibleError,
    ParameterError,
    UndefinedMetricError,
)
from .estimation import MLEFit, fit_mle
from .io import read_predictions
from .llo import (
    EPS,
    IDENTITY,
    LLOParams,
    PredictionSet,
    llo_adjust,
    llo_inverse,
    log_likelihood,
)
from .simulation import (
    ForecasterKind,
    ForecasterSpec,
    MCStudyConfig,
    StudyRow,
    default_design,
    generate_replicate,
    run_mc_study,
)

__all__ = [
    "BayesAssessment",
    "BoldcalError",
    "BoldnessResult",
    "CalibrationReport",
    "ContourGrid",
    "DataFormatError",
    "DivergenceError",
    "EPS",
    "ForecasterKind",
    "ForecasterSpec",
    "GridCell",
    "GridSpec",
    "IDENTITY",
    "InternalConsistencyError",
    "LLOParams",
    "LRTResult",
    "MCStudyConfig",
    "MLEFit",
    "NonConvergenceError",
    "NonInvertibleError",
    "ParameterError",
    "PredictionSet",
    "ScoreReport",
    "StudyRow",
    "UndefinedMetricError",
    "auc",
    "boldness_recalibrate",
    "brier",
    "brier_calibration",
    "calibration_report",
    "default_design",
    "ece",
    "evaluate_grid",
    "fit_mle",
    "generate_replicate",
    "llo_adjust",
    "llo_inverse",
    "log_likelihood",
    "lrt",
    "posterior_calibration",
    "posterior_from_loglik",
    "read_predictions",
    "refine_grid",
    "run_mc_study",
    "score_report",
    "spread",
]
