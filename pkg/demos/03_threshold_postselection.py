"""
Threshold detection and postselection
=====================================

The macroscopic pulse is split on a polarizing beam splitter; each output
hits a threshold detector. A trial counts only if exactly one detector
fires - both or neither means the trial is thrown away. The fraction kept
(the success probability) has a closed form, and the discarded trials are
anything but a fair sample.
"""

import math

import numpy as np

from macrobell import MacroPulse, PolAngle, ThresholdConfig, classify, split_intensities
from macrobell import theory

# Malus' law at the beam splitter: the two outputs always sum to the peak.
pulse = MacroPulse(PolAngle.from_degrees(30.0))
i_plus, i_minus = split_intensities(pulse, 0.0)
print(f"pulse at 30deg, analyzer at 0: i+ = {i_plus:.3f}, i- = {i_minus:.3f}")

# The postselection rule in action at threshold 0.5:
for pair in ((0.9, 0.1), (0.6, 0.55), (0.3, 0.2)):
    result = classify(*pair, ThresholdConfig(0.5))
    print(f"i = {pair} -> {result.verdict.name}")

# Success probability vs threshold: maximal (every pulse conclusive) at
# t = 0.5, falling symmetrically as the threshold leaves the midpoint.
print("\nthreshold  window  P_s (closed form)  P_s (Monte Carlo)")
rng = np.random.default_rng(3)
thetas = rng.random(100_000) * math.pi
for t in (0.5, 0.7, 0.9, 0.975):
    ip = np.cos(thetas) ** 2
    im = np.sin(thetas) ** 2
    conclusive = (ip > t) != (im > t)
    print(
        f"{t:9.3f}  {theory.acceptance_window(t):6.3f}  "
        f"{theory.success_probability(t):17.4f}  {np.mean(conclusive):17.4f}"
    )

# What survives a strict threshold? Only pulses nearly parallel or nearly
# orthogonal to the analyzer - exactly the trials where the rotating
# polarizer happened to agree with the measurement basis. That selection is
# what will fake the Bell violation downstream.
t = 0.975
kept = thetas[(np.cos(thetas) ** 2 > t) | (np.sin(thetas) ** 2 > t)]
distance = np.minimum(kept % (math.pi / 2), math.pi / 2 - kept % (math.pi / 2))
print(
    f"\nat t = {t}: kept pulses lie within "
    f"{np.degrees(distance.max()):.1f} degrees of an analyzer axis"
)
