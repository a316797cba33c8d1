"""Closed-form predictions for the amplify-then-threshold chain.

With the polarizer angle uniform on [0, pi) and zero readout noise, every
postselection quantity reduces to a 1D integral over phi = theta - beta with
an exact closed form.  Writing c for the acceptance window, a trial is
conclusive iff |cos 2phi| > c, and

    c(t)   = |2t - 1|                  for a shared threshold t,
    c(g)   = g                         for a brightness-difference gap g,
    P_s(c) = (2/pi) arccos(c),
    K(c)   = sin(x0)/x0,  x0 = arccos(c),

where K is the factor by which the sign readout dilutes the pair
correlation: E(alpha, beta; c) = K(c) * E_pair(alpha, beta).  At c = 0
(success probability one) K = 2/pi.  These are the oracles the Monte Carlo
engine is tested against; the test suite re-derives them by quadrature.
"""

from __future__ import annotations

import math

import numpy as np

from .polarization import PairSource, pair_correlation

__all__ = [
    "acceptance_window",
    "success_probability",
    "two_threshold_success_probability",
    "correlation_dilution",
    "threshold_for_success_probability",
    "gap_for_success_probability",
    "amplified_correlation",
    "amplified_visibility",
    "predicted_bell_parameter",
    "NO_POSTSELECTION_TRANSFER",
]

# K(0) = 2/pi, the matched-basis visibility transfer with no postselection.
NO_POSTSELECTION_TRANSFER = 2.0 / math.pi


def acceptance_window(threshold: float) -> float:
    """Map a shared threshold t to the conclusive window c: |cos 2phi| > c."""
    if not threshold > 0.0:
        raise ValueError("threshold must be positive")
    return abs(2.0 * min(threshold, 1.0) - 1.0) if threshold < 1.0 else 1.0


def success_probability(threshold: float) -> float:
    """Conclusive fraction P_s(t) for uniform pulse angle and zero noise.

    Symmetric under t <-> 1-t and maximal (= 1) at t = 0.5."""
    return 2.0 * math.acos(acceptance_window(threshold)) / math.pi


def two_threshold_success_probability(t_plus: float, t_minus: float) -> float:
    """Conclusive fraction with independent per-arm thresholds.

    PLUS window: cos^2 phi > max(t_plus, 1 - t_minus);
    MINUS window: cos^2 phi < min(t_plus, 1 - t_minus)."""
    hi = max(t_plus, 1.0 - t_minus)
    lo = min(t_plus, 1.0 - t_minus)
    p_plus = 2.0 * math.acos(math.sqrt(min(max(hi, 0.0), 1.0))) / math.pi
    p_minus = 1.0 - 2.0 * math.acos(math.sqrt(min(max(lo, 0.0), 1.0))) / math.pi
    return p_plus + p_minus


def correlation_dilution(window: float) -> float:
    """K(c): the factor multiplying the pair correlation after threshold
    readout with acceptance window c.  Monotone increasing in c, K(0) = 2/pi,
    K(c) -> 1 as c -> 1 (infinitely strict postselection)."""
    if not 0.0 <= window <= 1.0:
        raise ValueError("window must be in [0, 1]")
    if window == 1.0:
        return 1.0
    x0 = math.acos(window)
    return math.sin(x0) / x0


def threshold_for_success_probability(p: float, side: str = "high") -> float:
    """Invert P_s(t): the threshold achieving conclusive fraction p.

    Two thresholds achieve each p < 1; `side` picks the branch above 0.5
    ("high") or below ("low")."""
    if not 0.0 < p <= 1.0:
        raise ValueError("success probability must be in (0, 1]")
    c = math.cos(p * math.pi / 2.0)
    t = 0.5 * (1.0 + c)
    if side == "high":
        return t
    if side == "low":
        return 1.0 - t
    raise ValueError("side must be 'high' or 'low'")


def gap_for_success_probability(p: float) -> float:
    """Invert P_s for the brightness-difference observer: gap = cos(p pi/2)."""
    if not 0.0 < p <= 1.0:
        raise ValueError("success probability must be in (0, 1]")
    return math.cos(p * math.pi / 2.0)


def amplified_correlation(src: PairSource, alpha, beta, window: float = 0.0):
    """E(alpha, beta; c) = K(c) * E_pair(alpha, beta) through the chain."""
    return correlation_dilution(window) * pair_correlation(src, alpha, beta)


def amplified_visibility(src: PairSource, axis_deg: float, window: float = 0.0) -> float:
    """Matched-basis visibility through the chain: K(c) * t_axis.

    axis_deg = 0 probes t_z (the (H,V) axis), 45 probes t_x ((+,-))."""
    a2 = 2.0 * math.radians(axis_deg)
    t_axis = src.t_z * math.cos(a2) ** 2 + src.t_x * math.sin(a2) ** 2
    return correlation_dilution(window) * t_axis


def predicted_bell_parameter(
    src: PairSource,
    settings_deg: tuple[tuple[float, float], ...] = (
        (22.5, 0.0),
        (22.5, 135.0),
        (157.5, 0.0),
        (157.5, 135.0),
    ),
    window: float = 0.0,
) -> float:
    """S through the chain at the four (alpha, beta) settings, combination
    |E11 - E12 + E21 + E22|.  For the default settings this equals
    K(c) * sqrt(2) * (t_z + t_x)."""
    e = [
        amplified_correlation(src, math.radians(a), math.radians(b), window)
        for a, b in settings_deg
    ]
    return abs(e[0] - e[1] + e[2] + e[3])


def mean_drift_success_probability(
    base: float, amplitude: float, period: float, n_trials: int, mode: str = "gap"
) -> float:
    """Average P_s over one run for a sinusoidally drifting criterion."""
    k = np.arange(n_trials)
    level = base + amplitude * np.sin(2.0 * math.pi * k / period)
    if mode == "gap":
        return float(np.mean(2.0 * np.arccos(np.clip(level, 0.0, 1.0)) / math.pi))
    raise ValueError("unknown mode")
