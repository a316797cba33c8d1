"""The measure-and-prepare amplifier inside the black box.

The box holds a linear polarizer rotated continuously by a motor, a
single-photon detector behind it (7% efficiency), and a diode laser co-rotating
with the polarizer.  Each incoming photon is projected onto the instantaneous
polarizer angle; when the detector clicks, a macroscopic pulse polarized along
that angle leaves the box.  A trial, throughout this package, is one such
flash emission.

The micro-macro state this machine produces is separable by construction: the
emitted pulse depends on the photon pair only through the recorded classical
angle and the click event.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .polarization import PairSource, PolAngle, as_radians, pair_correlation

__all__ = [
    "ClonerConfig",
    "MacroPulse",
    "AmplifiedTrial",
    "sample_cloner_angle",
    "sample_cloner_angles",
    "attempt_amplification",
    "amplify_polarized",
    "sample_click_trials",
    "click_probability",
]

DEFAULT_DETECTOR_EFFICIENCY = 0.07


@dataclass(frozen=True)
class ClonerConfig:
    """Knobs of the amplifier: detector efficiency and (off by default) dark clicks."""

    detector_efficiency: float = DEFAULT_DETECTOR_EFFICIENCY
    dark_click_rate: float = 0.0

    def __post_init__(self) -> None:
        if not 0.0 <= self.detector_efficiency <= 1.0:
            raise ValueError("detector_efficiency must be in [0, 1]")
        if not 0.0 <= self.dark_click_rate <= 1.0:
            raise ValueError("dark_click_rate must be in [0, 1]")


@dataclass(frozen=True)
class MacroPulse:
    """The classical flash: polarized along the polarizer angle at click time."""

    polarization: PolAngle
    peak_intensity: float = 1.0

    def __post_init__(self) -> None:
        if not self.peak_intensity > 0.0:
            raise ValueError("peak_intensity must be positive")


@dataclass(frozen=True)
class AmplifiedTrial:
    """One flash emission: the A-side outcome, the pulse, and the ground truth."""

    a_outcome: int
    pulse: MacroPulse
    hidden_theta: PolAngle


def sample_cloner_angle(rng: np.random.Generator) -> PolAngle:
    """Instantaneous polarizer angle: uniform on [0, pi), i.i.d. per trial."""
    return PolAngle(rng.random() * math.pi)


def sample_cloner_angles(rng: np.random.Generator, n: int) -> np.ndarray:
    return rng.random(n) * math.pi


def _click_given_pass(cfg: ClonerConfig) -> float:
    # detector fires on the transmitted photon, or a dark event does
    return 1.0 - (1.0 - cfg.detector_efficiency) * (1.0 - cfg.dark_click_rate)


def click_probability(cfg: ClonerConfig) -> float:
    """Per-pair flash probability.  The pass marginal is 1/2 for any source and
    any A-side setting, so this is independent of alpha (and of theta)."""
    return 0.5 * (_click_given_pass(cfg) + cfg.dark_click_rate)


def attempt_amplification(
    src: PairSource,
    alpha,
    cfg: ClonerConfig,
    rng: np.random.Generator,
) -> Optional[AmplifiedTrial]:
    """Process one photon pair through the box.

    Draws the polarizer angle theta, then the joint (A outcome, pass/absorb)
    event with b=+1 identified with transmission through the polarizer.  A
    click (detector fires on a pass, or a dark event) emits a pulse polarized
    at theta; anything else is a no-trial, returned as None.
    """
    theta = sample_cloner_angle(rng)
    e = pair_correlation(src, alpha, theta)
    passed = rng.random() < 0.5
    p_a_plus = 0.5 * (1.0 + e) if passed else 0.5 * (1.0 - e)
    a = 1 if rng.random() < p_a_plus else -1

    click = passed and rng.random() < cfg.detector_efficiency
    if cfg.dark_click_rate > 0.0 and not click:
        click = rng.random() < cfg.dark_click_rate
    if not click:
        return None
    return AmplifiedTrial(a_outcome=a, pulse=MacroPulse(theta), hidden_theta=theta)


def amplify_polarized(
    theta_in,
    cfg: ClonerConfig,
    rng: np.random.Generator,
) -> Optional[MacroPulse]:
    """Feed the box a photon of definite linear polarization (no pair).

    Used for cloning-fidelity checks: the transmitted fraction follows Malus'
    law cos^2(theta - theta_in).
    """
    theta = sample_cloner_angle(rng)
    passed = rng.random() < math.cos(theta.value - as_radians(theta_in)) ** 2
    click = passed and rng.random() < cfg.detector_efficiency
    if cfg.dark_click_rate > 0.0 and not click:
        click = rng.random() < cfg.dark_click_rate
    if not click:
        return None
    return MacroPulse(theta)


def sample_click_trials(
    src: PairSource,
    alpha,
    cfg: ClonerConfig,
    n: int,
    rng: np.random.Generator,
) -> tuple[np.ndarray, np.ndarray]:
    """Draw n trials conditioned on a cloner click (vectorized engine path).

    Because the pass marginal is 1/2 independent of theta, the click event
    carries no information about theta and the conditioning is exact:
    theta stays uniform, and the A outcome follows the conditional law given
    pass (or given absorb, reachable only through dark clicks).

    Returns (theta, a_outcome) arrays of length n.
    """
    theta = sample_cloner_angles(rng, n)
    e = pair_correlation(src, alpha, theta)
    if cfg.dark_click_rate > 0.0:
        q_pass = _click_given_pass(cfg)
        p_passed = q_pass / (q_pass + cfg.dark_click_rate)
        passed = rng.random(n) < p_passed
    else:
        passed = np.ones(n, dtype=bool)
    p_a_plus = np.where(passed, 0.5 * (1.0 + e), 0.5 * (1.0 - e))
    a = np.where(rng.random(n) < p_a_plus, 1, -1).astype(np.int8)
    return theta, a
