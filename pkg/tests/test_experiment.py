import math

import numpy as np
import pytest

from macrobell import (
    ClonerConfig,
    ObserverModel,
    PairSource,
    RunConfig,
    ThresholdConfig,
    TwoObserverConfig,
    Verdict,
    chsh,
    chsh_settings,
    correlation_term,
    matched_basis_setting,
    run_experiment,
    run_two_observer_scenario,
)
from macrobell.cloner import click_probability
from macrobell.experiment import (
    TrialLog,
    accumulate_tables,
    apply_detection,
    run_circular_axis,
    simulate_flashes,
)


def quick_cfg(**overrides) -> RunConfig:
    defaults = dict(
        source=PairSource.ideal(),
        detection=ThresholdConfig(0.5),
        trials_per_setting=20_000,
        seed=20120904,
    )
    defaults.update(overrides)
    return RunConfig(**defaults)


def test_rejects_bad_configs():
    with pytest.raises(ValueError):
        run_experiment(quick_cfg(settings=()))
    with pytest.raises(ValueError):
        run_experiment(quick_cfg(trials_per_setting=0))
    with pytest.raises(ValueError):
        run_experiment(quick_cfg(block_length=-5))
    with pytest.raises(ValueError):
        run_experiment(quick_cfg(efficiency_a=1.3))


def test_exact_trial_counts_per_setting():
    cfg = quick_cfg(trials_per_setting=1234, block_length=250)
    _, tables = run_experiment(cfg)
    assert set(tables) == {"a1b1", "a1b2", "a2b1", "a2b2"}
    for table in tables.values():
        assert table.trials == 1234
        assert table.cell_sum() == table.conclusive  # A efficiency 1
        assert table.pairs_attempted > table.trials


def test_round_robin_block_schedule():
    cfg = quick_cfg(trials_per_setting=500, block_length=250)
    log, _ = run_experiment(cfg)
    idx = log.setting_index
    # blocks of 250 rotating a1b1, a1b2, a2b1, a2b2, then repeat
    expected = np.concatenate(
        [np.full(250, s, dtype=np.int16) for s in (0, 1, 2, 3) * 2]
    )
    assert np.array_equal(idx, expected)


def test_identical_seeds_reproduce_bit_identical_streams():
    cfg = quick_cfg(trials_per_setting=2000, block_length=250)
    log_a, tables_a = run_experiment(cfg)
    log_b, tables_b = run_experiment(cfg)
    for name in ("setting_index", "hidden_theta", "a_click", "i_plus", "i_minus", "verdict"):
        assert np.array_equal(getattr(log_a, name), getattr(log_b, name))
    assert np.array_equal(log_a.pairs_attempted, log_b.pairs_attempted)
    assert tables_a == tables_b

    log_c, _ = run_experiment(quick_cfg(trials_per_setting=2000, block_length=250, seed=1))
    assert not np.array_equal(log_a.hidden_theta, log_c.hidden_theta)


def test_block_streams_depend_only_on_their_spawn_key():
    # each (setting, block) owns an independent stream: its trials can be
    # reproduced in isolation, independent of global schedule position
    from macrobell.cloner import sample_click_trials

    cfg = quick_cfg(trials_per_setting=600, block_length=200)
    log, _ = run_experiment(cfg)
    s_idx, b_idx = 2, 1  # a2b1, second block: position 6 in the interleave
    rng = np.random.default_rng(np.random.SeedSequence(cfg.seed, spawn_key=(s_idx, b_idx)))
    theta, _ = sample_click_trials(
        cfg.source, cfg.settings[s_idx].a, cfg.cloner, 200, rng
    )
    in_run = log.hidden_theta[log.setting_index == s_idx][200:400]
    assert np.array_equal(theta, in_run)


def test_matched_basis_correlation_hits_oracle():
    cfg = quick_cfg(
        settings=(matched_basis_setting(0.0, "m"),), trials_per_setting=100_000
    )
    _, tables = run_experiment(cfg)
    e, sigma = correlation_term(tables["m"])
    assert abs(e - (-2.0 / math.pi)) < 3.0 * sigma


def test_conjugate_setting_correlation_vanishes():
    from macrobell.experiment import Setting
    from macrobell.polarization import Basis

    setting = Setting("x", Basis.from_degrees(45.0), Basis.from_degrees(0.0))
    cfg = quick_cfg(settings=(setting,), trials_per_setting=100_000)
    _, tables = run_experiment(cfg)
    e, sigma = correlation_term(tables["x"])
    assert abs(e) < 3.0 * sigma


def test_conclusive_fraction_basis_independent():
    cfg = quick_cfg(
        source=PairSource(0.84, 0.95),
        detection=ThresholdConfig(0.9),
        trials_per_setting=100_000,
    )
    _, tables = run_experiment(cfg)
    fractions = [t.conclusive_fraction() for t in tables.values()]
    n = 100_000
    p = np.mean(fractions)
    sigma_diff = math.sqrt(2.0 * p * (1.0 - p) / n)
    for i in range(4):
        for j in range(i + 1, 4):
            assert abs(fractions[i] - fractions[j]) < 3.0 * sigma_diff


def test_cell_sum_below_conclusive_with_lossy_a_side():
    cfg = quick_cfg(efficiency_a=0.5, trials_per_setting=20_000)
    _, tables = run_experiment(cfg)
    for table in tables.values():
        assert table.cell_sum() < table.conclusive
        rate = table.cell_sum() / table.conclusive
        assert abs(rate - 0.5) < 3.0 * math.sqrt(0.25 / table.conclusive)


def test_strong_postselection_keeps_only_aligned_pulses():
    # white-box: conclusive PLUS verdicts concentrate where the hidden angle
    # is parallel to the B analyzer
    cfg = quick_cfg(detection=ThresholdConfig(0.99), trials_per_setting=50_000)
    log, _ = run_experiment(cfg)
    for s_idx, setting in enumerate(log.settings):
        mask = (log.setting_index == s_idx) & (log.verdict == 1)
        assert np.sum(mask) > 100
        delta = np.abs(log.hidden_theta[mask] - float(setting.b.primary)) % math.pi
        delta = np.minimum(delta, math.pi - delta)
        # PLUS needs cos^2(delta) > 0.99, i.e. |delta| < acos(sqrt(0.99))
        assert delta.max() <= math.acos(math.sqrt(0.99)) + 1e-12


def test_pairs_attempted_consistent_with_click_rate():
    cfg = quick_cfg(trials_per_setting=50_000)
    _, tables = run_experiment(cfg)
    p = click_probability(ClonerConfig())
    for table in tables.values():
        attempts = table.pairs_attempted
        sigma = math.sqrt(table.trials * (1 - p)) / p  # negative-binomial spread
        assert abs(attempts - table.trials / p) < 4.0 * sigma


def test_trial_log_record_view():
    cfg = quick_cfg(trials_per_setting=50, block_length=10)
    log, _ = run_experiment(cfg)
    assert len(log) == 200
    record = log[7]
    assert record.trial_id == 7 and record.timestamp == 7
    assert record.setting == log.settings[log.setting_index[7]].name
    assert record.a_click in ("A1", "A2")
    assert record.verdict in (Verdict.PLUS, Verdict.MINUS, Verdict.INCONCLUSIVE)
    assert 0.0 <= record.hidden_theta.value < math.pi
    records = list(log)
    assert len(records) == 200 and records[7] == record
    with pytest.raises(IndexError):
        log[200]


def test_observer_mode_matches_equivalent_threshold_windows():
    # a gap-g observer and a threshold with window g accept the same trials
    gap = 0.6
    cfg_obs = quick_cfg(
        detection=ObserverModel(discrimination_gap=gap), trials_per_setting=5000
    )
    log_obs, _ = run_experiment(cfg_obs)
    threshold = 0.5 * (1.0 + gap)
    cfg_thr = quick_cfg(
        detection=ThresholdConfig(threshold), trials_per_setting=5000
    )
    log_thr, _ = run_experiment(cfg_thr)
    assert np.array_equal(log_obs.verdict, log_thr.verdict)


def test_two_observer_static_equal_thresholds_match_classify():
    plus = ObserverModel(0.7)
    minus = ObserverModel(0.7)
    cfg_two = quick_cfg(
        detection=TwoObserverConfig(plus, minus), trials_per_setting=5000
    )
    log_two, tables_two = run_two_observer_scenario(cfg_two)
    cfg_one = quick_cfg(detection=ThresholdConfig(0.7), trials_per_setting=5000)
    log_one, tables_one = run_experiment(cfg_one)
    assert np.array_equal(log_two.verdict, log_one.verdict)
    assert chsh(tables_two).s == chsh(tables_one).s


def test_two_observer_blind_arm_limiting_case():
    blind = ObserverModel(math.inf)
    active = ObserverModel(0.7)
    cfg = quick_cfg(detection=TwoObserverConfig(active, blind), trials_per_setting=5000)
    log, _ = run_two_observer_scenario(cfg)
    # conclusive iff the active observer fires, always PLUS
    assert set(np.unique(log.verdict)) <= {0, 1}
    assert np.array_equal(log.verdict == 1, log.i_plus > 0.7)


def test_two_observer_requires_two_observer_config():
    with pytest.raises(TypeError):
        run_two_observer_scenario(quick_cfg())


def test_desynchronized_drift_degrades_bell_parameter(calibrated_source):
    plus = ObserverModel(0.7, 0.29, 311, 0.0)
    minus = ObserverModel(0.7, 0.29, 457, math.pi)
    cfg = quick_cfg(
        source=calibrated_source,
        detection=TwoObserverConfig(plus, minus),
        trials_per_setting=5000,
        block_length=250,
    )
    _, tables = run_two_observer_scenario(cfg)
    assert chsh(tables).s < 2.0


def test_circular_axis_correlation_vanishes(calibrated_source):
    cfg = quick_cfg(
        source=calibrated_source,
        detection=ThresholdConfig(0.5),
        trials_per_setting=100_000,
    )
    table = run_circular_axis(cfg, noise_sigma=0.05)
    assert table.conclusive > 10_000
    e, sigma = correlation_term(table)
    assert abs(e) < 4.0 * sigma


def test_apply_detection_is_stream_independent():
    cfg = quick_cfg(trials_per_setting=2000)
    stream = simulate_flashes(cfg)
    assert np.all(stream.verdict == 0)
    verdicts = apply_detection(stream, cfg.detection)
    log = stream.with_verdicts(verdicts)
    assert accumulate_tables(log) == run_experiment(cfg)[1]
