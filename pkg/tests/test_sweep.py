import math

import numpy as np
import pytest

from macrobell import (
    PairSource,
    RunConfig,
    ThresholdConfig,
    calibrate_source,
    default_threshold_grid,
    matched_basis_setting,
    run_experiment,
    threshold_sweep,
    visibility_direct,
)
from macrobell import theory


def sweep_cfg(source, trials=8000, seed=20120904) -> RunConfig:
    return RunConfig(source=source, trials_per_setting=trials, seed=seed)


def test_default_grid_uniform_in_success_probability():
    grid = default_threshold_grid()
    assert len(grid) == 21
    targets = [theory.success_probability(t) for t in grid]
    assert targets[0] == pytest.approx(0.05, abs=1e-12)
    assert targets[-1] == pytest.approx(1.0, abs=1e-12)
    steps = np.diff(targets)
    assert np.allclose(steps, steps[0], atol=1e-12)


def test_sweep_rows_ordered_and_validated(ideal_source):
    result = threshold_sweep(sweep_cfg(ideal_source, trials=3000), [0.9, 0.5, 0.7])
    thresholds = [row.threshold for row in result.rows]
    assert thresholds == sorted(thresholds)
    for row in result.rows:
        assert 0.0 <= row.success_probability <= 1.0
    with pytest.raises(ValueError):
        threshold_sweep(sweep_cfg(ideal_source), [])
    with pytest.raises(ValueError):
        threshold_sweep(sweep_cfg(ideal_source), [0.5, -0.1])


def test_sweep_no_postselection_point(ideal_source):
    result = threshold_sweep(sweep_cfg(ideal_source, trials=50_000), [0.5])
    row = result.rows[0]
    assert row.success_probability == 1.0
    assert abs(row.s - 4.0 * math.sqrt(2.0) / math.pi) < 3.0 * row.sigma_s


def test_sweep_twenty_percent_point(ideal_source):
    t = theory.threshold_for_success_probability(0.2)
    result = threshold_sweep(sweep_cfg(ideal_source, trials=50_000), [t])
    row = result.rows[0]
    k = math.sin(0.1 * math.pi) / (0.1 * math.pi)
    assert abs(row.success_probability - 0.2) < 3.0 * row.sigma_success
    assert abs(row.s - 2.0 * math.sqrt(2.0) * k) < 3.0 * row.sigma_s
    assert row.s > 2.0  # the separable chain beats the local bound here


def test_sweep_calibrated_source_matches_quoted_value(calibrated_source):
    t = theory.threshold_for_success_probability(0.2)
    result = threshold_sweep(sweep_cfg(calibrated_source, trials=50_000), [t])
    row = result.rows[0]
    assert row.s == pytest.approx(2.49, abs=3.0 * row.sigma_s + 0.01)


def test_sigma_grows_as_success_shrinks(ideal_source):
    grid = [
        theory.threshold_for_success_probability(0.05),
        theory.threshold_for_success_probability(1.0),
    ]
    result = threshold_sweep(sweep_cfg(ideal_source, trials=20_000), grid)
    # rows sort by threshold; on the high branch the last row postselects hardest
    loose, strict = result.rows[0], result.rows[-1]
    assert strict.success_probability < loose.success_probability
    assert strict.sigma_s > loose.sigma_s


def test_sweep_monotone_along_dilution_curve(ideal_source):
    grid = default_threshold_grid(points=8, p_min=0.1)
    result = threshold_sweep(sweep_cfg(ideal_source, trials=20_000), grid)
    oracle = [
        theory.predicted_bell_parameter(
            ideal_source, window=theory.acceptance_window(row.threshold)
        )
        for row in result.rows
    ]
    # on the high branch thresholds ascend means P_s falls and S climbs
    assert all(b > a for a, b in zip(oracle, oracle[1:]))
    for row, s_oracle in zip(result.rows, oracle):
        assert abs(row.s - s_oracle) < 3.0 * row.sigma_s


def test_calibrate_source_examples():
    src = calibrate_source(0.536, 0.602)
    assert src.t_z == pytest.approx(0.8419, abs=5e-5)
    assert src.t_x == pytest.approx(0.9456, abs=5e-5)
    ideal = calibrate_source(2.0 / math.pi, 2.0 / math.pi)
    assert (ideal.t_z, ideal.t_x) == (1.0, 1.0)
    with pytest.raises(ValueError, match="not reachable"):
        calibrate_source(0.7, 0.6)
    with pytest.raises(ValueError):
        calibrate_source(0.5, 0.0)


def test_calibration_round_trip_through_the_chain(calibrated_source):
    for angle, target in ((0.0, 0.536), (45.0, 0.602)):
        cfg = RunConfig(
            source=calibrated_source,
            detection=ThresholdConfig(0.5),
            settings=(matched_basis_setting(angle, "m"),),
            trials_per_setting=200_000,
            seed=31,
        )
        _, tables = run_experiment(cfg)
        est = visibility_direct(tables["m"])
        assert abs(est.v - target) < 3.0 * est.sigma_v
