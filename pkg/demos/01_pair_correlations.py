"""
The photon-pair source
======================

Everything in this toolkit derives from one object: a two-photon source
described by two correlation strengths, t_z for the (H,V) axis and t_x for
the (+,-) axis. The ideal singlet has t_z = t_x = 1 and pair correlation
E(alpha, beta) = -cos 2(alpha - beta).
"""

import math

import numpy as np

from macrobell import PairSource, calibrate_source, joint_outcome_probability, pair_correlation

ideal = PairSource.ideal()

# Matched analyzers: perfect anticorrelation, the singlet signature.
print("E(0, 0)    =", pair_correlation(ideal, 0.0, 0.0))
# Conjugate bases 45 degrees apart carry no correlation at all.
print("E(0, 45deg) =", round(pair_correlation(ideal, 0.0, math.radians(45.0)), 12))

# The joint outcome table P(a, b) = (1 + a*b*E)/4 always sums to one and
# keeps both single-side marginals unbiased, whatever the angles.
for a in (+1, -1):
    for b in (+1, -1):
        p = joint_outcome_probability(ideal, 0.0, math.radians(22.5), a, b)
        print(f"P(a={a:+d}, b={b:+d} | 0, 22.5deg) = {p:.4f}")

# A real source is calibrated from the two matched-basis visibilities it
# shows downstream of the amplifier (the chain transfers V = (2/pi) t).
src = calibrate_source(0.536, 0.602)
print("\ncalibrated source:", src)
print("E(H,V axis)  =", pair_correlation(src, 0.0, 0.0))
print("E(+,- axis)  =", pair_correlation(src, math.radians(45.0), math.radians(45.0)))

# The asymmetry between the two axes lives in the pair itself, before any
# amplification: the correlation surface is squeezed along (H,V).
alphas = np.radians([0.0, 22.5, 45.0, 67.5, 90.0])
print("\nalpha_deg  E_ideal   E_calibrated")
for alpha in alphas:
    print(
        f"{math.degrees(alpha):9.1f}  {pair_correlation(ideal, alpha, alpha):+.4f}   "
        f"{pair_correlation(src, alpha, alpha):+.4f}"
    )
