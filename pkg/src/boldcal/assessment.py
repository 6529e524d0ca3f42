"""Calibration inference and comparison metrics.

The headline quantity is the posterior probability that a prediction set is
calibrated, obtained by comparing the calibrated model (identity parameters)
against the free-parameter model through a BIC approximation of the Bayes
factor.  A likelihood ratio test of the same hypothesis, plus the Brier score,
its calibration component, expected calibration error, and AUC round out the
report.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import expit
from scipy.stats import rankdata

from .errors import (
    DivergenceError,
    InternalConsistencyError,
    ParameterError,
    UndefinedMetricError,
)
from .estimation import MLEFit, fit_mle
from .llo import IDENTITY, PredictionSet, log_likelihood


@dataclass(frozen=True)
class BayesAssessment:
    """Posterior probability of calibration and the quantities behind it.

    ``degenerate`` marks data on which the free-parameter fit diverged
    (single-class outcomes); the posterior is then reported as 0.
    """

    bic_null: float
    bic_mle: float
    bayes_factor_21: float
    prior_calibrated: float
    posterior_calibrated: float
    degenerate: bool = False


@dataclass(frozen=True)
class LRTResult:
    statistic: float
    p_value: float
    dof: int = 2


@dataclass(frozen=True)
class ScoreReport:
    brier: float
    brier_calibration: float
    ece: float
    auc: float | None
    n_bins: int
    bin_edges: tuple[float, ...]


@dataclass(frozen=True)
class CalibrationReport:
    """Everything cmd-level consumers need from a single likelihood fit."""

    n: int
    base_rate: float
    bayes: BayesAssessment
    lrt: LRTResult | None
    scores: ScoreReport


def posterior_from_loglik(
    loglik_null: float, loglik_mle: float, n: int, prior_calibrated: float = 0.5
) -> BayesAssessment:
    """Assemble the Bayes assessment from the two fitted log-likelihoods.

    BIC_1 drops the parameter-count penalty (both parameters are fixed under
    the calibrated model); BIC_2 pays 2*log(n) for the two free parameters.
    The posterior is evaluated in log space so hopeless miscalibration
    (enormous Bayes factors) degrades gracefully to 0 instead of overflowing.
    """
    if not 0.0 < prior_calibrated < 1.0:
        raise ParameterError(f"prior must be in (0, 1), got {prior_calibrated}")
    bic_null = -2.0 * loglik_null
    bic_mle = 2.0 * math.log(n) - 2.0 * loglik_mle
    log_bf = -(bic_mle - bic_null) / 2.0
    try:
        bayes_factor = math.exp(log_bf)
    except OverflowError:
        bayes_factor = math.inf
    log_prior_odds = math.log((1.0 - prior_calibrated) / prior_calibrated)
    posterior = float(expit(-(log_bf + log_prior_odds)))
    return BayesAssessment(bic_null, bic_mle, bayes_factor, prior_calibrated, posterior)


def _degenerate_assessment(data: PredictionSet, prior_calibrated: float) -> BayesAssessment:
    bic_null = -2.0 * log_likelihood(data, IDENTITY)
    return BayesAssessment(
        bic_null=bic_null,
        bic_mle=math.nan,
        bayes_factor_21=math.inf,
        prior_calibrated=prior_calibrated,
        posterior_calibrated=0.0,
        degenerate=True,
    )


def posterior_calibration(
    data: PredictionSet, prior_calibrated: float = 0.5, fit: MLEFit | None = None
) -> BayesAssessment:
    """Posterior probability that ``data``'s predictions are calibrated.

    A diverging fit (single-class data) is reported as posterior 0 with the
    ``degenerate`` flag set rather than raised, so grid sweeps and reports
    survive pathological cells.
    """
    if not 0.0 < prior_calibrated < 1.0:
        raise ParameterError(f"prior must be in (0, 1), got {prior_calibrated}")
    if fit is None:
        try:
            fit = fit_mle(data)
        except DivergenceError:
            return _degenerate_assessment(data, prior_calibrated)
    return posterior_from_loglik(fit.loglik_at_null, fit.loglik_at_mle, data.n, prior_calibrated)


def lrt(data: PredictionSet, fit: MLEFit | None = None) -> LRTResult:
    """Likelihood ratio test of the identity parameters against the free fit.

    The statistic is asymptotically chi-squared with 2 degrees of freedom
    under the calibrated null, whose survival function is exp(-statistic/2)
    in closed form.  Raises on divergent data.
    """
    if fit is None:
        fit = fit_mle(data)
    statistic = 2.0 * (fit.loglik_at_mle - fit.loglik_at_null)
    if statistic < -1e-8:
        raise InternalConsistencyError(
            f"negative LR statistic {statistic:.3g}: optimizer failed to beat the null"
        )
    statistic = max(statistic, 0.0)
    return LRTResult(statistic=statistic, p_value=math.exp(-statistic / 2.0))


def brier(data: PredictionSet) -> float:
    """Mean squared gap between predictions and outcomes, in [0, 1]."""
    return float(np.mean((data.x - data.y) ** 2))


def bin_edges(n_bins: int) -> np.ndarray:
    return np.linspace(0.0, 1.0, n_bins + 1)


def _bin_index(x: np.ndarray, n_bins: int) -> np.ndarray:
    # Right-closed equal-width bins: (e[i], e[i+1]], with 0.0 folded into bin 0.
    idx = np.digitize(x, bin_edges(n_bins), right=True)
    return np.clip(idx - 1, 0, n_bins - 1)

def _bin_stats(data: PredictionSet, n_bins: int):
    idx = _bin_index(data.x, n_bins)
    counts = np.bincount(idx, minlength=n_bins)
    sum_x = np.bincount(idx, weights=data.x, minlength=n_bins)
    sum_y = np.bincount(idx, weights=data.y, minlength=n_bins)
    occupied = counts > 0
    return counts[occupied], sum_x[occupied] / counts[occupied], sum_y[occupied] / counts[occupied]


def brier_calibration(data: PredictionSet, n_bins: int = 10) -> float:
    """Calibration component of the Brier score.

    (1/n) * sum_k n_k * (xbar_k - ybar_k)^2 over occupied bins: the
    count-weighted squared gap between each bin's mean prediction and its
    event frequency.  Zero exactly when every bin is bin-wise matched.
    """
    if n_bins < 1:
        raise ParameterError("n_bins must be >= 1")
    counts, mean_x, mean_y = _bin_stats(data, n_bins)
    return float(np.sum(counts * (mean_x - mean_y) ** 2) / data.n)


def ece(data: PredictionSet, n_bins: int = 10) -> float:
    """Expected calibration error: count-weighted mean absolute bin gap."""
    if n_bins < 1:
        raise ParameterError("n_bins must be >= 1")
    counts, mean_x, mean_y = _bin_stats(data, n_bins)
    return float(np.sum(counts * np.abs(mean_y - mean_x)) / data.n)


def auc(data: PredictionSet) -> float:
    """Probability a random event outranks a random non-event (ties count 0.5).

    Computed from rank sums (Mann-Whitney), so it is exactly invariant under
    any strictly monotone transform of the predictions.  Raises
    :class:`UndefinedMetricError` when only one outcome class is present.
    """
    n_pos = int(np.sum(data.y))
    n_neg = data.n - n_pos
    if n_pos == 0 or n_neg == 0:
        raise UndefinedMetricError("AUC needs at least one event and one non-event")
    ranks = rankdata(data.x)
    u = float(np.sum(ranks[data.y == 1])) - n_pos * (n_pos + 1) / 2.0
    return u / (n_pos * n_neg)


def score_report(data: PredictionSet, n_bins: int = 10) -> ScoreReport:
    """Brier, its calibration component, ECE, and AUC (None if undefined)."""
    try:
        auc_value: float | None = auc(data)
    except UndefinedMetricError:
        auc_value = None
    return ScoreReport(
        brier=brier(data),
        brier_calibration=brier_calibration(data, n_bins),
        ece=ece(data, n_bins),
        auc=auc_value,
        n_bins=n_bins,
        bin_edges=tuple(bin_edges(n_bins).tolist()),
    )


def calibration_report(
    data: PredictionSet, prior_calibrated: float = 0.5, n_bins: int = 10
) -> CalibrationReport:
    """Full assessment from a single likelihood fit.

    Degenerate (single-class) data yields a flagged zero posterior and a
    ``None`` LRT instead of an exception.
    """
    try:
        fit = fit_mle(data)
    except DivergenceError:
        bayes = _degenerate_assessment(data, prior_calibrated)
        lrt_result = None
    else:
        bayes = posterior_calibration(data, prior_calibrated, fit=fit)
        lrt_result = lrt(data, fit=fit)
    return CalibrationReport(
        n=data.n,
        base_rate=data.base_rate,
        bayes=bayes,
        lrt=lrt_result,
        scores=score_report(data, n_bins),
    )
