"""Run configuration files (INI) and bundled presets.

All config values carry explicit units: angles in degrees, thresholds and
noise in normalized intensity (pulse peak = 1), counts as plain integers.
A threshold may instead be given as a target success probability, inverted
through the closed-form acceptance curve.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Optional

from .cloner import ClonerConfig
from .detection import ObserverModel, ThresholdConfig
from .experiment import RunConfig, TwoObserverConfig, chsh_settings
from .polarization import PairSource
from .theory import threshold_for_success_probability

__all__ = ["AppConfig", "load_config", "preset_path", "list_presets"]

DEFAULT_SEED = 20120904


@dataclass(frozen=True)
class AppConfig:
    """A parsed config file: either a simulation run or a counts reanalysis."""

    label: str
    run: Optional[RunConfig] = None
    counts_path: Optional[Path] = None
    pacing_ms: int = 1000


def preset_path(name: str) -> Path:
    """Resolve a bundled preset by filename (e.g. 'paper_photodiode.cfg')."""
    root = resources.files("macrobell") / "presets"
    candidate = root / name
    if not candidate.is_file():
        raise FileNotFoundError(
            f"no bundled preset {name!r}; available: {sorted(p.name for p in root.iterdir())}"
        )
    return Path(str(candidate))


def list_presets() -> list[str]:
    root = resources.files("macrobell") / "presets"
    return sorted(p.name for p in root.iterdir() if p.name.endswith(".cfg"))


def _observer_from_section(section) -> ObserverModel:
    gap = section.get("discrimination_gap", fallback=None)
    return ObserverModel(
        discrimination_gap=float("inf") if gap == "inf" else float(gap),
        drift_amplitude=section.getfloat("drift_amplitude", fallback=0.0),
        drift_period=section.getfloat("drift_period", fallback=0.0),
        drift_phase=section.getfloat("drift_phase", fallback=0.0),
    )


def _threshold_from_section(section) -> ThresholdConfig:
    noise = section.getfloat("analog_noise_sigma", fallback=0.0)
    if "threshold" in section:
        return ThresholdConfig(section.getfloat("threshold"), noise)
    if "target_success_probability" in section:
        return ThresholdConfig(
            threshold_for_success_probability(
                section.getfloat("target_success_probability"),
                side=section.get("threshold_side", fallback="high"),
            ),
            noise,
        )
    raise ValueError(
        "[detection] needs 'threshold' or 'target_success_probability'"
    )


def load_config(path_or_preset: str | Path, seed_override: Optional[int] = None) -> AppConfig:
    """Load a config file; bare names fall back to the bundled presets."""
    path = Path(path_or_preset)
    if not path.is_file():
        path = preset_path(str(path_or_preset))

    parser = configparser.ConfigParser(interpolation=None)
    with open(path, "r", encoding="utf-8") as fh:
        parser.read_file(fh)

    label = parser.get("run", "label", fallback=path.stem)

    if parser.has_section("reanalysis"):
        counts = Path(parser.get("reanalysis", "counts"))
        if not counts.is_absolute():
            counts = path.parent / counts
        return AppConfig(label=label, counts_path=counts)

    source = PairSource(
        t_z=parser.getfloat("source", "t_z", fallback=1.0),
        t_x=parser.getfloat("source", "t_x", fallback=1.0),
    )
    cloner = ClonerConfig(
        detector_efficiency=parser.getfloat(
            "cloner", "detector_efficiency", fallback=0.07
        ),
        dark_click_rate=parser.getfloat("cloner", "dark_click_rate", fallback=0.0),
    )
    settings = chsh_settings(
        a1_deg=parser.getfloat("bases", "a1_deg", fallback=22.5),
        a2_deg=parser.getfloat("bases", "a2_deg", fallback=157.5),
        b1_deg=parser.getfloat("bases", "b1_deg", fallback=0.0),
        b2_deg=parser.getfloat("bases", "b2_deg", fallback=135.0),
    )

    mode = parser.get("detection", "mode", fallback="threshold")
    if mode == "threshold":
        detection = _threshold_from_section(parser["detection"])
    elif mode == "observer":
        detection = _observer_from_section(parser["detection"])
    elif mode == "two_observer":
        detection = TwoObserverConfig(
            plus=_observer_from_section(parser["observer_plus"]),
            minus=_observer_from_section(parser["observer_minus"]),
        )
    else:
        raise ValueError(f"unknown detection mode {mode!r}")

    block_length = parser.getint("run", "block_length", fallback=0)
    run = RunConfig(
        source=source,
        cloner=cloner,
        detection=detection,
        settings=settings,
        trials_per_setting=parser.getint("run", "trials_per_setting", fallback=5000),
        block_length=block_length if block_length > 0 else None,
        seed=seed_override
        if seed_override is not None
        else parser.getint("run", "seed", fallback=DEFAULT_SEED),
        efficiency_a=parser.getfloat("run", "efficiency_a", fallback=1.0),
    )
    run.validate()
    return AppConfig(
        label=label,
        run=run,
        pacing_ms=parser.getint("service", "pacing_ms", fallback=1000),
    )
