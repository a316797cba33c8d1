"""Linear-polarization angle arithmetic and the two-photon correlation model.

Conventions
-----------
- Angles are radians internally; linear polarization is pi-periodic, so the
  canonical range is [0, pi).  Degrees appear only at external interfaces.
- A measurement basis is a pair of orthogonal linear polarizations.  The
  primary angle carries the '+' outcome label, its orthogonal the '-'.
- The photon-pair source is a two-parameter diagonal correlation tensor
  restricted to the linear-polarization great circle: t_z is the correlation
  strength in the (H,V) axis, t_x in the (+,-) axis.  The ideal singlet is
  t_z = t_x = 1, with pair correlation -cos 2(alpha - beta).

Every probability downstream (cloner click statistics, coincidence rates,
visibilities) derives from ``pair_correlation``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "PolAngle",
    "Basis",
    "PairSource",
    "as_radians",
    "pair_correlation",
    "joint_outcome_probability",
]


@dataclass(frozen=True)
class PolAngle:
    """A linear-polarization angle, normalized to [0, pi)."""

    value: float

    def __post_init__(self) -> None:
        value = float(self.value) % math.pi
        if value >= math.pi:  # the modulo can round up to pi itself
            value = 0.0
        object.__setattr__(self, "value", value)

    @classmethod
    def from_degrees(cls, degrees: float) -> "PolAngle":
        return cls(math.radians(degrees))

    @property
    def degrees(self) -> float:
        return math.degrees(self.value)

    def orthogonal(self) -> "PolAngle":
        return PolAngle(self.value + math.pi / 2.0)

    def __float__(self) -> float:
        return self.value


@dataclass(frozen=True)
class Basis:
    """A two-channel polarization analyzer: '+' at `primary`, '-' orthogonal."""

    primary: PolAngle

    @classmethod
    def from_degrees(cls, degrees: float) -> "Basis":
        return cls(PolAngle.from_degrees(degrees))

    @property
    def orthogonal(self) -> PolAngle:
        return self.primary.orthogonal()

    @property
    def degrees(self) -> float:
        return self.primary.degrees

    def __float__(self) -> float:
        return self.primary.value


@dataclass(frozen=True)
class PairSource:
    """Correlation tensor of the (possibly imperfect) polarization-singlet pair.

    t_z and t_x live in [0, 1].  Single-side marginals are unbiased by
    construction, and the pair correlation is

        E(alpha, beta) = -(t_z cos2a cos2b + t_x sin2a sin2b),

    which stays within [-1, 1] for any angles.
    """

    t_z: float
    t_x: float

    def __post_init__(self) -> None:
        for name, t in (("t_z", self.t_z), ("t_x", self.t_x)):
            if not 0.0 <= t <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {t}")

    @classmethod
    def ideal(cls) -> "PairSource":
        return cls(t_z=1.0, t_x=1.0)


def as_radians(angle) -> float | np.ndarray:
    """Coerce a PolAngle, Basis, float (radians) or array to raw radians."""
    if isinstance(angle, (PolAngle, Basis)):
        return float(angle)
    if isinstance(angle, np.ndarray):
        return angle
    return float(angle)


def pair_correlation(src: PairSource, alpha, beta) -> float | np.ndarray:
    """Correlation of the +/-1 outcomes for analyzers at alpha (A) and beta (B).

    Accepts scalars or numpy arrays for either angle.
    """
    a2 = 2.0 * as_radians(alpha)
    b2 = 2.0 * as_radians(beta)
    e = -(src.t_z * np.cos(a2) * np.cos(b2) + src.t_x * np.sin(a2) * np.sin(b2))
    if np.ndim(e) == 0:
        return float(e)
    return e


def joint_outcome_probability(src: PairSource, alpha, theta, a: int, b: int):
    """P(a, b) for outcomes a on side A (at alpha) and b on side B (at theta).

    The standard two-outcome decomposition: P = (1 + a*b*E)/4.  The four
    outcomes sum to one and both single-side marginals are 1/2.
    """
    if a not in (-1, 1) or b not in (-1, 1):
        raise ValueError(f"outcomes must be +/-1, got a={a}, b={b}")
    e = pair_correlation(src, alpha, theta)
    p = 0.25 * (1.0 + a * b * e)
    if np.ndim(p) == 0:
        return float(p)
    return p
