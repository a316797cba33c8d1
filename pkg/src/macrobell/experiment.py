"""The trial engine: schedule bases, run source -> cloner -> detection per
trial, and accumulate conclusive coincidences.

A trial is a flash emission (a click inside the box); pairs that produce no
click are counted but not logged.  Blocks of trials rotate through the
scheduled settings round-robin; each (setting, block) pair owns an
independent, seed-derived RNG stream, so identical seeds reproduce
bit-identical trial streams regardless of evaluation order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Iterator, Optional, Union

import numpy as np

from .cloner import ClonerConfig, click_probability, sample_click_trials
from .detection import (
    ObserverModel,
    ThresholdConfig,
    Verdict,
    classify_verdicts,
    detect_A_array,
    observe_human_verdicts,
    split_intensity_arrays,
    two_observer_verdicts,
)
from .polarization import Basis, PairSource, PolAngle

__all__ = [
    "Setting",
    "TwoObserverConfig",
    "RunConfig",
    "TrialRecord",
    "TrialLog",
    "CoincidenceTable",
    "chsh_settings",
    "matched_basis_setting",
    "run_experiment",
    "run_two_observer_scenario",
    "run_fringe_scan",
    "run_circular_axis",
]

CHSH_SETTING_NAMES = ("a1b1", "a1b2", "a2b1", "a2b2")

A_CLICK_LABELS = {1: "A1", -1: "A2", 0: None}
VERDICT_LABELS = {1: "PLUS", -1: "MINUS", 0: "INCONCLUSIVE"}


@dataclass(frozen=True)
class Setting:
    """One scheduled measurement configuration: A analyzer and B analyzer."""

    name: str
    a: Basis
    b: Basis


def chsh_settings(
    a1_deg: float = 22.5,
    a2_deg: float = 157.5,
    b1_deg: float = 0.0,
    b2_deg: float = 135.0,
) -> tuple[Setting, ...]:
    """The four CHSH settings.

    Defaults put the '+' labels where the Bell combination
    |E(a1,b1) - E(a1,b2) + E(a2,b1) + E(a2,b2)| is the maximal one for the
    singlet: basis pairs {22.5, 112.5} / {67.5, 157.5} on side A and
    {0, 90} / {45, 135} on side B, with a2 and b2 primary on the second
    member of each pair."""
    a1, a2 = Basis.from_degrees(a1_deg), Basis.from_degrees(a2_deg)
    b1, b2 = Basis.from_degrees(b1_deg), Basis.from_degrees(b2_deg)
    return (
        Setting("a1b1", a1, b1),
        Setting("a1b2", a1, b2),
        Setting("a2b1", a2, b1),
        Setting("a2b2", a2, b2),
    )


def matched_basis_setting(angle_deg: float, name: Optional[str] = None) -> Setting:
    """Same analyzer on both sides, for visibility runs."""
    basis = Basis.from_degrees(angle_deg)
    return Setting(name or f"matched{angle_deg:g}", basis, basis)


@dataclass(frozen=True)
class TwoObserverConfig:
    """Footnote scenario: one observer per output spot, independent drifts."""

    plus: ObserverModel
    minus: ObserverModel


DetectionModel = Union[ThresholdConfig, ObserverModel, TwoObserverConfig]


@dataclass(frozen=True)
class RunConfig:
    source: PairSource
    cloner: ClonerConfig = ClonerConfig()
    detection: DetectionModel = ThresholdConfig(threshold=0.5)
    settings: tuple[Setting, ...] = field(default_factory=chsh_settings)
    trials_per_setting: int = 5000
    block_length: Optional[int] = None
    seed: int = 0
    efficiency_a: float = 1.0

    def validate(self) -> None:
        if len(self.settings) == 0:
            raise ValueError("schedule must contain at least one setting")
        if self.trials_per_setting <= 0:
            raise ValueError("trials_per_setting must be positive")
        if self.block_length is not None and self.block_length <= 0:
            raise ValueError("block_length must be positive")
        if not 0.0 <= self.efficiency_a <= 1.0:
            raise ValueError("efficiency_a must be in [0, 1]")


@dataclass(frozen=True)
class TrialRecord:
    trial_id: int
    timestamp: int
    setting: str
    a_basis: Basis
    b_basis: Basis
    hidden_theta: PolAngle
    a_click: Optional[str]
    i_plus: float
    i_minus: float
    verdict: Verdict


class TrialLog:
    """Columnar store of trial records; iterates as TrialRecord objects.

    hidden_theta is simulation ground truth and is exported only on request;
    the estimators never read it."""

    def __init__(
        self,
        settings: tuple[Setting, ...],
        setting_index: np.ndarray,
        hidden_theta: np.ndarray,
        a_click: np.ndarray,
        i_plus: np.ndarray,
        i_minus: np.ndarray,
        verdict: np.ndarray,
        pairs_attempted: np.ndarray,
    ):
        self.settings = settings
        self.setting_index = setting_index
        self.hidden_theta = hidden_theta
        self.a_click = a_click
        self.i_plus = i_plus
        self.i_minus = i_minus
        self.verdict = verdict
        # per setting, pairs fed to the box to obtain the logged trials
        self.pairs_attempted = pairs_attempted

    def __len__(self) -> int:
        return int(self.setting_index.shape[0])

    def __getitem__(self, trial_id: int) -> TrialRecord:
        if not 0 <= trial_id < len(self):
            raise IndexError(trial_id)
        s = self.settings[int(self.setting_index[trial_id])]
        return TrialRecord(
            trial_id=trial_id,
            timestamp=trial_id,
            setting=s.name,
            a_basis=s.a,
            b_basis=s.b,
            hidden_theta=PolAngle(float(self.hidden_theta[trial_id])),
            a_click=A_CLICK_LABELS[int(self.a_click[trial_id])],
            i_plus=float(self.i_plus[trial_id]),
            i_minus=float(self.i_minus[trial_id]),
            verdict=Verdict(int(self.verdict[trial_id])),
        )

    def __iter__(self) -> Iterator[TrialRecord]:
        for i in range(len(self)):
            yield self[i]

    def with_verdicts(self, verdict: np.ndarray) -> "TrialLog":
        return TrialLog(
            self.settings,
            self.setting_index,
            self.hidden_theta,
            self.a_click,
            self.i_plus,
            self.i_minus,
            verdict,
            self.pairs_attempted,
        )


@dataclass
class CoincidenceTable:
    """Conclusive-coincidence counts for one setting: A click x B verdict."""

    setting: Setting
    n_a1_plus: int
    n_a1_minus: int
    n_a2_plus: int
    n_a2_minus: int
    trials: int
    conclusive: int
    pairs_attempted: int = 0

    def __post_init__(self) -> None:
        cells = (self.n_a1_plus, self.n_a1_minus, self.n_a2_plus, self.n_a2_minus)
        if any(c < 0 for c in cells):
            raise ValueError("counts must be nonnegative")
        if not self.cell_sum() <= self.conclusive <= self.trials:
            raise ValueError(
                f"need cell sum {self.cell_sum()} <= conclusive "
                f"{self.conclusive} <= trials {self.trials}"
            )

    def cell_sum(self) -> int:
        return self.n_a1_plus + self.n_a1_minus + self.n_a2_plus + self.n_a2_minus

    def cells(self) -> tuple[int, int, int, int]:
        return (self.n_a1_plus, self.n_a1_minus, self.n_a2_plus, self.n_a2_minus)

    def conclusive_fraction(self) -> float:
        return self.conclusive / self.trials


def _blocks(cfg: RunConfig) -> Iterator[tuple[int, int, int]]:
    """Round-robin block schedule: yields (setting_index, block_index, n)."""
    block = cfg.block_length or cfg.trials_per_setting
    remaining = [cfg.trials_per_setting] * len(cfg.settings)
    block_count = [0] * len(cfg.settings)
    while any(remaining):
        for s in range(len(cfg.settings)):
            if remaining[s] == 0:
                continue
            n = min(block, remaining[s])
            yield s, block_count[s], n
            block_count[s] += 1
            remaining[s] -= n


def _block_rng(seed: int, setting_index: int, block_index: int) -> np.random.Generator:
    return np.random.default_rng(
        np.random.SeedSequence(seed, spawn_key=(setting_index, block_index))
    )


def simulate_flashes(cfg: RunConfig) -> TrialLog:
    """Generate the verdict-independent part of the run: per trial the hidden
    polarizer angle, the A-side click, and the two PBS output intensities.

    Verdicts are left inconclusive; apply_detection fills them in.  The
    stream is a deterministic function of (config, seed) only, so a human
    observer answering over a service sees exactly the same trials as the
    in-process simulated observer."""
    cfg.validate()
    noise_sigma = (
        cfg.detection.analog_noise_sigma
        if isinstance(cfg.detection, ThresholdConfig)
        else 0.0
    )
    p_click = click_probability(cfg.cloner)
    if p_click <= 0.0:
        raise ValueError("cloner never clicks: no trials can be generated")

    chunks: list[tuple[int, np.ndarray, np.ndarray, np.ndarray, np.ndarray]] = []
    pairs_attempted = np.zeros(len(cfg.settings), dtype=np.int64)
    for s_idx, b_idx, n in _blocks(cfg):
        rng = _block_rng(cfg.seed, s_idx, b_idx)
        setting = cfg.settings[s_idx]
        theta, a_outcome = sample_click_trials(
            cfg.source, setting.a, cfg.cloner, n, rng
        )
        i_plus, i_minus = split_intensity_arrays(
            theta, setting.b, 1.0, noise_sigma, rng
        )
        a_click = detect_A_array(a_outcome, cfg.efficiency_a, rng)
        extra = int(rng.negative_binomial(n, p_click)) if p_click < 1.0 else 0
        pairs_attempted[s_idx] += n + extra
        chunks.append((s_idx, theta, a_click, i_plus, i_minus))

    setting_index = np.concatenate(
        [np.full(c[1].shape[0], c[0], dtype=np.int16) for c in chunks]
    )
    theta = np.concatenate([c[1] for c in chunks])
    a_click = np.concatenate([c[2] for c in chunks])
    i_plus = np.concatenate([c[3] for c in chunks])
    i_minus = np.concatenate([c[4] for c in chunks])
    verdict = np.zeros(theta.shape[0], dtype=np.int8)
    return TrialLog(
        cfg.settings, setting_index, theta, a_click, i_plus, i_minus, verdict,
        pairs_attempted,
    )


def apply_detection(log: TrialLog, detection: DetectionModel) -> np.ndarray:
    """Compute verdicts for a flash stream under the given detection model."""
    trial_index = np.arange(len(log))
    if isinstance(detection, ThresholdConfig):
        return classify_verdicts(log.i_plus, log.i_minus, detection)
    if isinstance(detection, ObserverModel):
        return observe_human_verdicts(log.i_plus, log.i_minus, detection, trial_index)
    if isinstance(detection, TwoObserverConfig):
        return two_observer_verdicts(
            log.i_plus, log.i_minus, detection.plus, detection.minus, trial_index
        )
    raise TypeError(f"unknown detection model: {detection!r}")


def accumulate_tables(log: TrialLog) -> dict[str, CoincidenceTable]:
    """Count conclusive coincidences per setting.

    A coincidence increments a cell only when the A detector clicked AND the
    B verdict is conclusive; with unit A-side efficiency the four cells sum
    to the conclusive count."""
    tables: dict[str, CoincidenceTable] = {}
    for s_idx, setting in enumerate(log.settings):
        mask = log.setting_index == s_idx
        verdict = log.verdict[mask]
        a_click = log.a_click[mask]
        conclusive = verdict != 0
        coinc = conclusive & (a_click != 0)
        tables[setting.name] = CoincidenceTable(
            setting=setting,
            n_a1_plus=int(np.sum(coinc & (a_click == 1) & (verdict == 1))),
            n_a1_minus=int(np.sum(coinc & (a_click == 1) & (verdict == -1))),
            n_a2_plus=int(np.sum(coinc & (a_click == -1) & (verdict == 1))),
            n_a2_minus=int(np.sum(coinc & (a_click == -1) & (verdict == -1))),
            trials=int(np.sum(mask)),
            conclusive=int(np.sum(conclusive)),
            pairs_attempted=int(log.pairs_attempted[s_idx]),
        )
    return tables


def run_experiment(cfg: RunConfig) -> tuple[TrialLog, dict[str, CoincidenceTable]]:
    """Run the full pipeline for every scheduled setting."""
    log = simulate_flashes(cfg)
    log = log.with_verdicts(apply_detection(log, cfg.detection))
    return log, accumulate_tables(log)


def run_two_observer_scenario(
    cfg: RunConfig,
) -> tuple[TrialLog, dict[str, CoincidenceTable]]:
    """Run with one observer per arm (the scenario where independent
    threshold drift degrades the Bell parameter)."""
    if not isinstance(cfg.detection, TwoObserverConfig):
        raise TypeError("run_two_observer_scenario needs a TwoObserverConfig")
    return run_experiment(cfg)


def run_fringe_scan(
    cfg: RunConfig,
    b_basis_deg: float,
    alpha_degrees: np.ndarray,
    trials_per_point: int,
) -> list[tuple[float, int]]:
    """Coincidence fringe: N(A1, B+) vs the A analyzer angle at fixed B basis.

    Returns (alpha_rad, count) pairs, one per scan point."""
    scan = []
    for i, alpha_deg in enumerate(np.asarray(alpha_degrees, dtype=float)):
        point_seed = int(
            np.random.SeedSequence(cfg.seed, spawn_key=(500, i)).generate_state(
                1, np.uint64
            )[0]
        )
        setting = Setting(
            f"scan{alpha_deg:g}",
            Basis.from_degrees(float(alpha_deg)),
            Basis.from_degrees(b_basis_deg),
        )
        point_cfg = replace(
            cfg,
            settings=(setting,),
            trials_per_setting=trials_per_point,
            block_length=None,
            seed=point_seed,
        )
        _, tables = run_experiment(point_cfg)
        table = tables[setting.name]
        scan.append((math.radians(float(alpha_deg)), table.n_a1_plus))
    return scan


def run_circular_axis(cfg: RunConfig, noise_sigma: float = 0.05) -> CoincidenceTable:
    """Probe the circular (out-of-plane) axis of the chain.

    The pulse is linearly polarized, so a circular-basis split is 50/50 and
    only readout noise ever produces a conclusive verdict; the A outcome is
    drawn from the unbiased marginal (the source model carries no circular
    correlation).  The resulting visibility is zero within counting error."""
    cfg.validate()
    if not isinstance(cfg.detection, ThresholdConfig):
        raise TypeError("circular-axis runs use threshold detection")
    n = cfg.trials_per_setting
    rng = np.random.default_rng(np.random.SeedSequence(cfg.seed, spawn_key=(901,)))
    a_outcome = np.where(rng.random(n) < 0.5, 1, -1).astype(np.int8)
    i_plus = np.maximum(0.0, 0.5 + noise_sigma * rng.standard_normal(n))
    i_minus = np.maximum(0.0, 0.5 + noise_sigma * rng.standard_normal(n))
    a_click = detect_A_array(a_outcome, cfg.efficiency_a, rng)
    verdict = classify_verdicts(i_plus, i_minus, cfg.detection)
    conclusive = verdict != 0
    coinc = conclusive & (a_click != 0)
    setting = Setting(
        "circular", Basis.from_degrees(0.0), Basis.from_degrees(0.0)
    )
    return CoincidenceTable(
        setting=setting,
        n_a1_plus=int(np.sum(coinc & (a_click == 1) & (verdict == 1))),
        n_a1_minus=int(np.sum(coinc & (a_click == 1) & (verdict == -1))),
        n_a2_plus=int(np.sum(coinc & (a_click == -1) & (verdict == 1))),
        n_a2_minus=int(np.sum(coinc & (a_click == -1) & (verdict == -1))),
        trials=n,
        conclusive=int(np.sum(conclusive)),
        pairs_attempted=0,
    )
