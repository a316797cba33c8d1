"""Monte Carlo toolkit for Bell tests on a classically amplified photon.

One photon of a polarization-entangled pair enters a black box that measures
it along a uniformly rotating linear polarizer and, on a detector click,
emits a macroscopic pulse in the measured polarization.  Threshold detection
of the pulse plus keep-only-one-fires postselection lets the CHSH inequality
be violated even though the micro-macro state is separable by construction;
visibility-based witnesses applied to the same data certify only the
entanglement of the original pair.  This package simulates the whole chain,
provides the estimators and closed-form oracles, and includes a live service
where a human plays the threshold detector.
"""

from .polarization import (
    Basis,
    PairSource,
    PolAngle,
    joint_outcome_probability,
    pair_correlation,
)
from .cloner import (
    AmplifiedTrial,
    ClonerConfig,
    MacroPulse,
    amplify_polarized,
    attempt_amplification,
    sample_cloner_angle,
)
from .detection import (
    BSideResult,
    ObserverModel,
    ThresholdConfig,
    Verdict,
    classify,
    detect_A,
    observe_human,
    split_intensities,
)
from .experiment import (
    CoincidenceTable,
    RunConfig,
    Setting,
    TrialLog,
    TrialRecord,
    TwoObserverConfig,
    chsh_settings,
    matched_basis_setting,
    run_experiment,
    run_fringe_scan,
    run_two_observer_scenario,
)
from .analysis import (
    BellEstimate,
    FringeFitError,
    InsufficientDataError,
    MacroStateSummary,
    VisibilityEstimate,
    WitnessResult,
    check_separable_bound,
    chsh,
    correlation_term,
    visibility_direct,
    visibility_fringe_fit,
    witness_three_visibilities,
    witness_two_visibilities,
)
from .sweep import SweepResult, calibrate_source, default_threshold_grid, threshold_sweep
from . import theory

__version__ = "0.1.0"

__all__ = [
    "Basis",
    "PairSource",
    "PolAngle",
    "joint_outcome_probability",
    "pair_correlation",
    "AmplifiedTrial",
    "ClonerConfig",
    "MacroPulse",
    "amplify_polarized",
    "attempt_amplification",
    "sample_cloner_angle",
    "BSideResult",
    "ObserverModel",
    "ThresholdConfig",
    "Verdict",
    "classify",
    "detect_A",
    "observe_human",
    "split_intensities",
    "CoincidenceTable",
    "RunConfig",
    "Setting",
    "TrialLog",
    "TrialRecord",
    "TwoObserverConfig",
    "chsh_settings",
    "matched_basis_setting",
    "run_experiment",
    "run_fringe_scan",
    "run_two_observer_scenario",
    "BellEstimate",
    "FringeFitError",
    "InsufficientDataError",
    "MacroStateSummary",
    "VisibilityEstimate",
    "WitnessResult",
    "check_separable_bound",
    "chsh",
    "correlation_term",
    "visibility_direct",
    "visibility_fringe_fit",
    "witness_three_visibilities",
    "witness_two_visibilities",
    "SweepResult",
    "calibrate_source",
    "default_threshold_grid",
    "threshold_sweep",
    "theory",
]
