"""Maximum-likelihood estimation of the shift/scale recalibration parameters.

The optimum of the Bernoulli likelihood over (delta, gamma) is searched in
(log delta, gamma) coordinates with a Nelder-Mead simplex, started at the
identity (0, 1) so the fitted log-likelihood can never fall below the null's.
The surface is the log-likelihood of a logistic regression on logit(x), hence
concave, so the simplex converges to the global optimum from any start.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .errors import DivergenceError, NonConvergenceError
from .llo import IDENTITY, LLOParams, PredictionSet, log_likelihood

# |log delta| or |gamma| beyond this pins every adjusted probability at the
# clamp rails; the likelihood has flat-lined and the search is diverging.
DIVERGENCE_BOUND = 30.0

MAX_ITER = 500
LOGLIK_TOL = 1e-10

# Fallback starts mirror hedged / exaggerated / shifted forecaster shapes.
_STARTS = ((0.0, 1.0), (0.0, 0.25), (0.0, 2.0), (math.log(2.0), 1.0))


@dataclass(frozen=True)
class MLEFit:
    params: LLOParams
    loglik_at_mle: float
    loglik_at_null: float
    converged: bool
    iterations: int


def fit_mle(data: PredictionSet, max_iter: int = MAX_ITER, tol: float = LOGLIK_TOL) -> MLEFit:
    """Fit the recalibration parameters that maximize the Bernoulli likelihood.

    Raises:
        DivergenceError: all outcomes in one class (the likelihood increases
            without bound in delta) or the search left the sane parameter box.
        NonConvergenceError: every start hit the iteration cap; the error
            carries the best fit found so far in ``best_fit``.
    """
    ybar = data.base_rate
    if ybar == 0.0 or ybar == 1.0:
        raise DivergenceError(
            "all outcomes are identical (base rate %g); delta_hat is unbounded" % ybar
        )
    ll_null = log_likelihood(data, IDENTITY)

    def nll(theta: np.ndarray) -> float:
        log_delta, gamma = theta
        if abs(log_delta) > DIVERGENCE_BOUND or abs(gamma) > DIVERGENCE_BOUND:
            raise DivergenceError(
                f"search diverged: log delta={log_delta:.3g}, gamma={gamma:.3g}"
            )
        return -log_likelihood(data, LLOParams(math.exp(log_delta), gamma))

    best: MLEFit | None = None
    divergence: DivergenceError | None = None
    for start in _STARTS:
        try:
            res = minimize(
                nll,
                np.asarray(start, dtype=float),
                method="Nelder-Mead",
                options={"maxiter": max_iter, "fatol": tol, "xatol": 1e-8},
            )
        except DivergenceError as err:
            divergence = err
            continue
        fit = MLEFit(
            params=LLOParams(math.exp(res.x[0]), float(res.x[1])),
            loglik_at_mle=float(-res.fun),
            loglik_at_null=ll_null,
            converged=bool(res.success),
            iterations=int(res.nit),
        )
        if fit.converged:
            return fit
        if best is None or fit.loglik_at_mle > best.loglik_at_mle:
            best = fit
    if best is not None:
        raise NonConvergenceError(
            f"no start converged within {max_iter} iterations", best_fit=best
        )
    raise divergence if divergence is not None else DivergenceError("all starts diverged")
