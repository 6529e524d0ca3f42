from __future__ import annotations

import math

import numpy as np
import pytest

from boldcal import (
    DivergenceError,
    LLOParams,
    PredictionSet,
    fit_mle,
    llo_adjust,
    llo_inverse,
    log_likelihood,
)


def _bernoulli_from(probs: np.ndarray, rng) -> np.ndarray:
    return (rng.uniform(size=len(probs)) < probs).astype(int)


def test_consistency_near_identity_on_calibrated_data():
    # outcomes drawn from the predictions themselves: truth is (1, 1)
    for seed in range(20):
        rng = np.random.default_rng(100 + seed)
        x = rng.uniform(size=5000)
        data = PredictionSet(x, _bernoulli_from(x, rng))
        fit = fit_mle(data)
        assert fit.converged
        assert abs(fit.params.delta - 1.0) <= 0.1
        assert abs(fit.params.gamma - 1.0) <= 0.1


def test_loglik_at_mle_dominates_null(calibrated_set):
    fit = fit_mle(calibrated_set)
    assert fit.loglik_at_mle >= fit.loglik_at_null


def test_mle_dominates_probe_grid(calibrated_set):
    fit = fit_mle(calibrated_set)
    best = fit.loglik_at_mle
    for delta in np.geomspace(0.1, 10.0, 50):
        for gamma in np.linspace(-5.0, 5.0, 50):
            assert best + 1e-6 >= log_likelihood(calibrated_set, LLOParams(delta, gamma))


@pytest.mark.parametrize("truth", [(1.0, 1.0), (1.0, 0.25), (1.0, 2.0), (2.0, 1.0)])
def test_parameter_recovery_error_shrinks_with_n(truth):
    # outcomes governed by the distorted probabilities: the fit estimates the
    # distortion directly, with error shrinking as n grows
    params = LLOParams(*truth)
    errors = {}
    for n in (800, 5000):
        per_seed = []
        for seed in range(5):
            rng = np.random.default_rng(200 + seed)
            x = rng.uniform(size=n)
            y = _bernoulli_from(llo_adjust(x, params), rng)
            fit = fit_mle(PredictionSet(x, y))
            per_seed.append(
                abs(fit.params.delta - truth[0]) + abs(fit.params.gamma - truth[1])
            )
        errors[n] = float(np.mean(per_seed))
    assert errors[5000] < errors[800]
    assert errors[5000] < 0.15


def test_inverse_recovery_of_hedged_predictions():
    # predictions compressed by gamma*=0.25; the corrective fit is the inverse,
    # so gamma_hat should sit near 1/0.25 = 4
    rng = np.random.default_rng(31)
    p = rng.uniform(size=5000)
    x = llo_adjust(p, LLOParams(1.0, 0.25))
    data = PredictionSet(x, _bernoulli_from(p, rng))
    fit = fit_mle(data)
    expected = llo_inverse(LLOParams(1.0, 0.25))
    assert abs(fit.params.gamma - expected.gamma) <= 0.5
    assert abs(fit.params.delta - expected.delta) <= 0.5


def test_recalibrated_mean_matches_base_rate():
    # shifting on the odds scale aligns the average prediction with ybar
    rng = np.random.default_rng(77)
    p = rng.uniform(size=4000)
    x = llo_adjust(p, LLOParams(2.0, 1.0))
    data = PredictionSet(x, _bernoulli_from(p, rng))
    fit = fit_mle(data)
    recalibrated = llo_adjust(x, fit.params)
    assert float(np.mean(recalibrated)) == pytest.approx(data.base_rate, abs=0.02)


def test_non_convergence_carries_best_fit(calibrated_set):
    from boldcal import NonConvergenceError

    with pytest.raises(NonConvergenceError) as err:
        fit_mle(calibrated_set, max_iter=3)
    best = err.value.best_fit
    assert best is not None
    assert not best.converged
    assert best.loglik_at_mle >= best.loglik_at_null


def test_all_same_outcome_diverges():
    x = np.linspace(0.1, 0.9, 20)
    with pytest.raises(DivergenceError):
        fit_mle(PredictionSet(x, np.ones(20, dtype=int)))
    with pytest.raises(DivergenceError):
        fit_mle(PredictionSet(x, np.zeros(20, dtype=int)))


def test_delta_always_positive(rng):
    for _ in range(10):
        n = 200
        x = rng.uniform(size=n)
        y = (rng.uniform(size=n) < rng.uniform(0.2, 0.8)).astype(int)
        if y.min() == y.max():
            continue
        assert fit_mle(PredictionSet(x, y)).params.delta > 0.0


def test_gradient_small_at_converged_fit(calibrated_set):
    fit = fit_mle(calibrated_set)
    assert fit.converged
    log_delta, gamma = math.log(fit.params.delta), fit.params.gamma
    h = 1e-5

    def ll(a, b):
        return log_likelihood(calibrated_set, LLOParams(math.exp(a), b))

    g1 = (ll(log_delta + h, gamma) - ll(log_delta - h, gamma)) / (2 * h)
    g2 = (ll(log_delta, gamma + h) - ll(log_delta, gamma - h)) / (2 * h)
    assert math.hypot(g1, g2) < 0.05
