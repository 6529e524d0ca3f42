"""Seeded forecaster-archetype generator and Monte Carlo study harness.

One replicate draws event probabilities p_i ~ Uniform(0,1) and outcomes
y_i ~ Bernoulli(p_i), perturbs the probabilities with log-odds noise
v_i ~ N(0, sigma^2), and derives each forecaster's predictions by applying its
shift/scale distortion to the shared noisy base.  Because the distortions are
monotone, every forecaster in a replicate carries identical classification
accuracy at a given noise level; only calibration and boldness differ.

All randomness is drawn from counter-based Philox substreams keyed by
(seed, n, replicate, purpose), so runs are bit-reproducible and adding
forecaster types never perturbs existing draws.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import NamedTuple

import numpy as np
from scipy.special import expit, logit, ndtri

from .assessment import calibration_report
from .errors import ParameterError
from .llo import LLOParams, PredictionSet, llo_adjust


class ForecasterKind(str, Enum):
    WELL_CALIBRATED = "well_calibrated"
    HEDGER = "hedger"
    BOASTER = "boaster"
    BIASED = "biased"
    CUSTOM = "custom"


# Shift/scale pairs defining the four simulated forecaster archetypes:
# ideal, under-bold, over-bold, and systematically optimistic.
ARCHETYPE_PARAMS: dict[ForecasterKind, tuple[float, float]] = {
    ForecasterKind.WELL_CALIBRATED: (1.0, 1.0),
    ForecasterKind.HEDGER: (1.0, 0.25),
    ForecasterKind.BOASTER: (1.0, 2.0),
    ForecasterKind.BIASED: (2.0, 1.0),
}

PAPER_SIGMAS = (0.0, 0.1, 0.5, 1.0, 2.0)

DEFAULT_N_VALUES = (30, 100, 800, 2000, 5000)
DEFAULT_REPLICATES = 100


@dataclass(frozen=True)
class ForecasterSpec:
    kind: ForecasterKind
    delta: float
    gamma: float
    noise_sigma: float = 0.0

    def __post_init__(self):
        if self.delta <= 0:
            raise ParameterError("delta must be positive")
        if self.noise_sigma < 0:
            raise ParameterError("noise_sigma must be non-negative")

    @classmethod
    def archetype(cls, kind: ForecasterKind, noise_sigma: float = 0.0) -> "ForecasterSpec":
        if kind not in ARCHETYPE_PARAMS:
            raise ParameterError(f"{kind} is not a named archetype")
        delta, gamma = ARCHETYPE_PARAMS[kind]
        return cls(kind, delta, gamma, noise_sigma)

    @property
    def params(self) -> LLOParams:
        return LLOParams(self.delta, self.gamma)


def default_design(
    kinds: tuple[ForecasterKind, ...] = tuple(ARCHETYPE_PARAMS),
    sigmas: tuple[float, ...] = PAPER_SIGMAS,
) -> tuple[ForecasterSpec, ...]:
    """Full factorial of archetypes by noise levels (20 sets per replicate)."""
    return tuple(
        ForecasterSpec.archetype(kind, sigma) for kind in kinds for sigma in sigmas
    )


@dataclass(frozen=True)
class MCStudyConfig:
    seed: int
    n_values: tuple[int, ...] = DEFAULT_N_VALUES
    replicates: int = DEFAULT_REPLICATES
    forecasters: tuple[ForecasterSpec, ...] = field(default_factory=default_design)

    def __post_init__(self):
        if self.replicates < 1:
            raise ParameterError("replicates must be >= 1")
        if any(n < 1 for n in self.n_values):
            raise ParameterError("all n values must be >= 1")


class StudyRow(NamedTuple):
    n: int
    replicate: int
    forecaster: str
    sigma: float
    metric: str
    value: float


STUDY_METRICS = ("posterior", "lrt_pvalue", "brier", "brier_calibration", "ece", "degenerate")

# Substream purposes; the noise stream appends a fixed-point key per sigma.
_STREAM_P = 0
_STREAM_Y = 1
_STREAM_NOISE = 2


def _substream(seed: int, n: int, replicate: int, *tag: int) -> np.random.Generator:
    entropy = [seed & 0xFFFFFFFFFFFFFFFF, n, replicate, *tag]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))


def _open_uniform(gen: np.random.Generator, size: int) -> np.ndarray:
    # Uniform on the open interval (0, 1): logit and ndtri stay finite.
    return gen.integers(1, 1 << 53, size=size) / float(1 << 53)


def _sigma_key(sigma: float) -> int:
    return int(round(sigma * 1_000_000))


def generate_replicate(
    n: int,
    specs: tuple[ForecasterSpec, ...],
    seed: int,
    replicate: int = 0,
) -> tuple[np.ndarray, list[np.ndarray]]:
    """Outcomes plus one prediction vector per forecaster spec.

    The latent probabilities, outcomes, and the noise vector for each distinct
    sigma are shared across all specs in the replicate, so forecasters at the
    same noise level are monotone transforms of one another.
    """
    if n < 1:
        raise ParameterError("n must be >= 1")
    p = _open_uniform(_substream(seed, n, replicate, _STREAM_P), n)
    y = (_open_uniform(_substream(seed, n, replicate, _STREAM_Y), n) < p).astype(np.int64)

    noisy_base: dict[int, np.ndarray] = {}
    predictions = []
    for spec in specs:
        key = _sigma_key(spec.noise_sigma)
        if key not in noisy_base:
            if spec.noise_sigma == 0.0:
                noisy_base[key] = p
            else:
                u = _open_uniform(_substream(seed, n, replicate, _STREAM_NOISE, key), n)
                v = spec.noise_sigma * ndtri(u)
                noisy_base[key] = expit(logit(p) + v)
        predictions.append(llo_adjust(noisy_base[key], spec.params))
    return y, predictions


def run_mc_study(config: MCStudyConfig, n_bins: int = 10) -> list[StudyRow]:
    """Score every (n, replicate, forecaster) cell of the study design.

    Emits one row per metric in :data:`STUDY_METRICS` for each cell, in
    deterministic order.  Cells whose fit diverges record a NaN p-value and a
    raised ``degenerate`` flag; the study never aborts.
    """
    rows: list[StudyRow] = []
    for n in config.n_values:
        for replicate in range(config.replicates):
            y, predictions = generate_replicate(n, config.forecasters, config.seed, replicate)
            for spec, x in zip(config.forecasters, predictions):
                report = calibration_report(PredictionSet(x, y), n_bins=n_bins)
                values = {
                    "posterior": report.bayes.posterior_calibrated,
                    "lrt_pvalue": report.lrt.p_value if report.lrt else math.nan,
                    "brier": report.scores.brier,
                    "brier_calibration": report.scores.brier_calibration,
                    "ece": report.scores.ece,
                    "degenerate": float(report.bayes.degenerate),
                }
                rows.extend(
                    StudyRow(n, replicate, spec.kind.value, spec.noise_sigma, metric, values[metric])
                    for metric in STUDY_METRICS
                )
    return rows
