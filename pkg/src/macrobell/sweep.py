"""Threshold sweeps and source calibration.

A sweep runs one full CHSH experiment per threshold with per-threshold
derived RNG streams, exposing how the Bell parameter climbs as the
postselection tightens (success probability falls) while the statistical
error grows on the shrinking conclusive sample.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .analysis import BellEstimate, chsh
from .detection import ThresholdConfig
from .experiment import RunConfig, run_experiment
from .polarization import PairSource
from .theory import NO_POSTSELECTION_TRANSFER, threshold_for_success_probability

__all__ = [
    "SweepRow",
    "SweepResult",
    "default_threshold_grid",
    "threshold_sweep",
    "calibrate_source",
]


@dataclass(frozen=True)
class SweepRow:
    threshold: float
    success_probability: float
    sigma_success: float
    s: float
    sigma_s: float
    conclusive: int
    trials: int

    def as_dict(self) -> dict:
        return {
            "threshold": self.threshold,
            "success_probability": self.success_probability,
            "sigma_success": self.sigma_success,
            "S": self.s,
            "sigma_S": self.sigma_s,
            "conclusive": self.conclusive,
            "trials": self.trials,
        }


@dataclass(frozen=True)
class SweepResult:
    rows: tuple[SweepRow, ...]

    def as_dicts(self) -> list[dict]:
        return [row.as_dict() for row in self.rows]


def default_threshold_grid(
    points: int = 21, p_min: float = 0.05, p_max: float = 1.0
) -> list[float]:
    """Thresholds spaced uniformly in success probability (the physically
    meaningful axis), on the above-0.5 branch."""
    targets = np.linspace(p_min, p_max, points)
    return [threshold_for_success_probability(float(p), side="high") for p in targets]


def _derived_seed(seed: int, index: int) -> int:
    return int(
        np.random.SeedSequence(seed, spawn_key=(700, index)).generate_state(
            1, np.uint64
        )[0]
    )


def threshold_sweep(cfg: RunConfig, thresholds: list[float]) -> SweepResult:
    """One full CHSH experiment per threshold, shared seed policy.

    Any threshold that yields no conclusive events raises the underlying
    insufficient-data error rather than reporting a silent zero."""
    if not thresholds:
        raise ValueError("thresholds must be nonempty")
    if any(t <= 0.0 for t in thresholds):
        raise ValueError("thresholds must be positive")
    noise = (
        cfg.detection.analog_noise_sigma
        if isinstance(cfg.detection, ThresholdConfig)
        else 0.0
    )
    rows = []
    for i, threshold in enumerate(sorted(thresholds)):
        run_cfg = replace(
            cfg,
            detection=ThresholdConfig(threshold, noise),
            seed=_derived_seed(cfg.seed, i),
        )
        _, tables = run_experiment(run_cfg)
        estimate: BellEstimate = chsh(tables)
        p = estimate.success_probability
        rows.append(
            SweepRow(
                threshold=threshold,
                success_probability=p,
                sigma_success=math.sqrt(max(p * (1.0 - p), 0.0) / estimate.trials),
                s=estimate.s,
                sigma_s=estimate.sigma_s,
                conclusive=estimate.conclusive,
                trials=estimate.trials,
            )
        )
    return SweepResult(rows=tuple(rows))


def calibrate_source(target_v_hv: float, target_v_pm: float) -> PairSource:
    """Invert the no-postselection visibility transfer V = (2/pi) t.

    Targets are matched-basis visibilities measured through the amplifier
    chain at success probability one; values above 2/pi are unreachable
    without postselection and rejected."""
    source_strengths = []
    for label, target in (("(H,V)", target_v_hv), ("(+,-)", target_v_pm)):
        if not 0.0 < target <= NO_POSTSELECTION_TRANSFER + 1e-12:
            raise ValueError(
                f"{label} visibility {target:g} not reachable through the "
                f"chain without postselection (max {NO_POSTSELECTION_TRANSFER:.4f})"
            )
        source_strengths.append(min(target / NO_POSTSELECTION_TRANSFER, 1.0))
    return PairSource(t_z=source_strengths[0], t_x=source_strengths[1])
