from __future__ import annotations

import numpy as np
import pytest

from boldcal import PredictionSet


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def calibrated_set(rng) -> PredictionSet:
    """Outcomes drawn from the predictions themselves: calibrated by construction."""
    x = rng.uniform(size=500)
    y = (rng.uniform(size=500) < x).astype(int)
    return PredictionSet(x, y)


@pytest.fixture
def small_set() -> PredictionSet:
    """Fixed 20-point set with both outcome classes (grid/boldness tests)."""
    rng = np.random.default_rng(7)
    x = rng.uniform(0.05, 0.95, size=20)
    y = (rng.uniform(size=20) < x).astype(int)
    return PredictionSet(x, y)
