"""B-side analysis of the macro pulse and the A-side single-photon detectors.

The pulse is split on a polarizing beam splitter at the measurement angle;
the two output intensities follow Malus' law.  Each output hits a threshold
detector (a photodiode with a software threshold, or a human judging spot
brightness).  The postselection rule: a trial is conclusive iff exactly one
detector fires; both or neither firing rejects the trial.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import IntEnum
from typing import Optional

import numpy as np

from .cloner import MacroPulse
from .polarization import as_radians

__all__ = [
    "Verdict",
    "ThresholdConfig",
    "BSideResult",
    "ObserverModel",
    "split_intensities",
    "split_intensity_arrays",
    "split_circular",
    "classify",
    "classify_verdicts",
    "observer_gap",
    "observe_human",
    "observe_human_verdicts",
    "two_observer_verdicts",
    "detect_A",
    "detect_A_array",
]


class Verdict(IntEnum):
    MINUS = -1
    INCONCLUSIVE = 0
    PLUS = 1


@dataclass(frozen=True)
class ThresholdConfig:
    """Shared software threshold for the two photodiodes, in units of the
    nominal pulse peak.  t = 0.5 is the no-postselection point: with zero
    noise every (generic) pulse is conclusive there."""

    threshold: float
    analog_noise_sigma: float = 0.0

    def __post_init__(self) -> None:
        if not self.threshold > 0.0:
            raise ValueError("threshold must be positive")
        if self.analog_noise_sigma < 0.0:
            raise ValueError("analog_noise_sigma must be >= 0")


@dataclass(frozen=True)
class BSideResult:
    i_plus: float
    i_minus: float
    fired_plus: bool
    fired_minus: bool
    verdict: Verdict


@dataclass(frozen=True)
class ObserverModel:
    """Brightness-difference discriminator with a slowly drifting criterion.

    Single-observer mode: conclusive iff |i_plus - i_minus| exceeds the
    current gap.  In the two-observer scenario the same parameters act as a
    per-arm absolute threshold instead (the observer "sees" their spot iff
    its intensity exceeds the gap); an infinite gap models an observer who
    never sees anything, useful as a limiting case.

    gap(k) = discrimination_gap + drift_amplitude * sin(2 pi k / drift_period
             + drift_phase), evaluated at the global trial index k.
    """

    discrimination_gap: float
    drift_amplitude: float = 0.0
    drift_period: float = 0.0
    drift_phase: float = 0.0

    def __post_init__(self) -> None:
        if math.isinf(self.discrimination_gap):
            if self.drift_amplitude != 0.0:
                raise ValueError("an infinite gap cannot drift")
            return
        if self.drift_amplitude < 0.0:
            raise ValueError("drift_amplitude must be >= 0")
        if self.drift_amplitude > 0.0 and not self.drift_period > 0.0:
            raise ValueError("drift_period must be positive when drifting")
        lo = self.discrimination_gap - self.drift_amplitude
        hi = self.discrimination_gap + self.drift_amplitude
        if lo < 0.0 or hi > 1.0:
            raise ValueError(
                f"effective gap range [{lo}, {hi}] leaves [0, 1]"
            )


def split_intensities(
    pulse: MacroPulse,
    beta,
    noise_sigma: float = 0.0,
    rng: Optional[np.random.Generator] = None,
) -> tuple[float, float]:
    """PBS outputs for a pulse analyzed at beta: Malus' law plus optional
    additive Gaussian readout noise, clamped at zero.  With zero noise the
    two intensities sum exactly to the pulse peak."""
    delta = float(pulse.polarization) - as_radians(beta)
    i_plus = pulse.peak_intensity * math.cos(delta) ** 2
    i_minus = pulse.peak_intensity * math.sin(delta) ** 2
    if noise_sigma > 0.0:
        if rng is None:
            raise ValueError("noise requires an rng")
        i_plus = max(0.0, i_plus + noise_sigma * rng.standard_normal())
        i_minus = max(0.0, i_minus + noise_sigma * rng.standard_normal())
    return i_plus, i_minus


def split_intensity_arrays(
    theta: np.ndarray,
    beta,
    peak: float = 1.0,
    noise_sigma: float = 0.0,
    rng: Optional[np.random.Generator] = None,
) -> tuple[np.ndarray, np.ndarray]:
    delta = theta - as_radians(beta)
    i_plus = peak * np.cos(delta) ** 2
    i_minus = peak * np.sin(delta) ** 2
    if noise_sigma > 0.0:
        if rng is None:
            raise ValueError("noise requires an rng")
        i_plus = np.maximum(0.0, i_plus + noise_sigma * rng.standard_normal(theta.shape))
        i_minus = np.maximum(0.0, i_minus + noise_sigma * rng.standard_normal(theta.shape))
    return i_plus, i_minus


def split_circular(pulse: MacroPulse) -> tuple[float, float]:
    """Circular-basis split of a linearly polarized pulse: always 50/50.

    The amplifier lives on the linear great circle, so the circular-axis
    correlation visibility of the chain vanishes."""
    half = 0.5 * pulse.peak_intensity
    return half, half


def classify(i_plus: float, i_minus: float, cfg: ThresholdConfig) -> BSideResult:
    """Threshold detection with the exactly-one-fires postselection rule.

    Firing is a strict inequality; an exact tie at the threshold (measure
    zero under noise) is rejected as inconclusive."""
    fired_plus = i_plus > cfg.threshold
    fired_minus = i_minus > cfg.threshold
    if fired_plus and not fired_minus:
        verdict = Verdict.PLUS
    elif fired_minus and not fired_plus:
        verdict = Verdict.MINUS
    else:
        verdict = Verdict.INCONCLUSIVE
    return BSideResult(i_plus, i_minus, fired_plus, fired_minus, verdict)


def classify_verdicts(
    i_plus: np.ndarray, i_minus: np.ndarray, cfg: ThresholdConfig
) -> np.ndarray:
    fired_plus = i_plus > cfg.threshold
    fired_minus = i_minus > cfg.threshold
    return (fired_plus.astype(np.int8) - fired_minus.astype(np.int8)) * (
        fired_plus ^ fired_minus
    )


def observer_gap(model: ObserverModel, trial_index):
    """Discrimination gap at a trial index, replay-deterministic."""
    if model.drift_amplitude == 0.0:
        if np.ndim(trial_index) == 0:
            return model.discrimination_gap
        return np.full(np.shape(trial_index), model.discrimination_gap)
    phase = 2.0 * math.pi * np.asarray(trial_index, dtype=float) / model.drift_period
    return model.discrimination_gap + model.drift_amplitude * np.sin(
        phase + model.drift_phase
    )


def observe_human(
    i_plus: float, i_minus: float, model: ObserverModel, trial_index: int
) -> Verdict:
    """One brightness judgment: which spot is brighter, if the difference
    clears the observer's current gap; otherwise the trial is rejected."""
    gap = float(observer_gap(model, trial_index))
    if i_plus - i_minus > gap:
        return Verdict.PLUS
    if i_minus - i_plus > gap:
        return Verdict.MINUS
    return Verdict.INCONCLUSIVE


def observe_human_verdicts(
    i_plus: np.ndarray,
    i_minus: np.ndarray,
    model: ObserverModel,
    trial_index: np.ndarray,
) -> np.ndarray:
    gap = observer_gap(model, trial_index)
    diff = i_plus - i_minus
    return (diff > gap).astype(np.int8) - (-diff > gap).astype(np.int8)


def _sees(intensity: np.ndarray, model: ObserverModel, trial_index: np.ndarray):
    if math.isinf(model.discrimination_gap):
        return np.zeros(np.shape(intensity), dtype=bool)
    return intensity > observer_gap(model, trial_index)


def two_observer_verdicts(
    i_plus: np.ndarray,
    i_minus: np.ndarray,
    plus_model: ObserverModel,
    minus_model: ObserverModel,
    trial_index: np.ndarray,
) -> np.ndarray:
    """One observer per output spot, each with their own drifting threshold;
    conclusive iff exactly one of them sees their spot."""
    sees_plus = _sees(i_plus, plus_model, trial_index)
    sees_minus = _sees(i_minus, minus_model, trial_index)
    return (sees_plus.astype(np.int8) - sees_minus.astype(np.int8)) * (
        sees_plus ^ sees_minus
    )


def detect_A(
    a_outcome: int, efficiency_a: float, rng: Optional[np.random.Generator] = None
) -> Optional[str]:
    """APD pair on side A: +1 -> A1, -1 -> A2, lost with prob 1 - efficiency."""
    if not 0.0 <= efficiency_a <= 1.0:
        raise ValueError("efficiency_a must be in [0, 1]")
    if efficiency_a < 1.0:
        if rng is None:
            raise ValueError("efficiency < 1 requires an rng")
        if rng.random() >= efficiency_a:
            return None
    return "A1" if a_outcome == 1 else "A2"


def detect_A_array(
    a_outcome: np.ndarray,
    efficiency_a: float,
    rng: Optional[np.random.Generator] = None,
) -> np.ndarray:
    """Vectorized A-side detection: +1 = A1 click, -1 = A2 click, 0 = lost."""
    if not 0.0 <= efficiency_a <= 1.0:
        raise ValueError("efficiency_a must be in [0, 1]")
    clicks = a_outcome.astype(np.int8, copy=True)
    if efficiency_a < 1.0:
        if rng is None:
            raise ValueError("efficiency < 1 requires an rng")
        clicks[rng.random(a_outcome.shape) >= efficiency_a] = 0
    return clicks
