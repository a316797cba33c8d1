import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from macrobell import (
    CoincidenceTable,
    InsufficientDataError,
    FringeFitError,
    MacroStateSummary,
    PairSource,
    RunConfig,
    Setting,
    ThresholdConfig,
    VisibilityEstimate,
    check_separable_bound,
    chsh,
    correlation_term,
    matched_basis_setting,
    run_experiment,
    run_fringe_scan,
    visibility_direct,
    visibility_fringe_fit,
    witness_three_visibilities,
    witness_two_visibilities,
)
from macrobell.analysis import fit_fringe
from macrobell.polarization import Basis


def table(name, cells, a_deg=22.5, b_deg=0.0, trials=None, conclusive=None):
    total = sum(cells)
    return CoincidenceTable(
        setting=Setting(name, Basis.from_degrees(a_deg), Basis.from_degrees(b_deg)),
        n_a1_plus=cells[0],
        n_a1_minus=cells[1],
        n_a2_plus=cells[2],
        n_a2_minus=cells[3],
        trials=trials if trials is not None else total,
        conclusive=conclusive if conclusive is not None else total,
    )


def test_correlation_term_human_run_block():
    e, sigma = correlation_term(table("a1b1", (15, 144, 134, 26)))
    assert e == pytest.approx(float(Fraction(15 + 26 - 144 - 134, 319)), abs=1e-15)
    assert e == pytest.approx(-0.743, abs=5e-4)
    assert sigma == pytest.approx(2.0 * math.sqrt(41 * 278 / 319**3), abs=1e-15)
    assert sigma == pytest.approx(0.038, abs=1e-3)


def test_correlation_term_perfect_correlation_has_zero_sigma():
    e, sigma = correlation_term(table("x", (50, 0, 0, 50)))
    assert (e, sigma) == (1.0, 0.0)


def test_correlation_term_magnitude_of_swapped_block():
    e, _ = correlation_term(table("x", (112, 46, 44, 135)))
    assert abs(e) == pytest.approx(157 / 337, abs=1e-15)
    assert abs(e) == pytest.approx(0.466, abs=5e-4)


def test_correlation_term_scale_invariant():
    base = (30, 11, 14, 45)
    e1, _ = correlation_term(table("x", base))
    e2, _ = correlation_term(table("x", tuple(17 * c for c in base)))
    assert e1 == pytest.approx(e2, abs=1e-15)


def test_correlation_term_insufficient_data():
    empty = table("a1b1", (0, 0, 0, 0), trials=100, conclusive=0)
    with pytest.raises(InsufficientDataError):
        correlation_term(empty)


def test_coincidence_table_invariants():
    with pytest.raises(ValueError):
        table("x", (10, 0, 0, 0), trials=5)  # cell sum > trials
    with pytest.raises(ValueError):
        CoincidenceTable(
            setting=Setting("x", Basis.from_degrees(0), Basis.from_degrees(0)),
            n_a1_plus=-1,
            n_a1_minus=0,
            n_a2_plus=0,
            n_a2_minus=0,
            trials=10,
            conclusive=5,
        )


def four_tables(e_targets, n=200):
    # build exact-count tables realizing the requested E values
    tables = {}
    angles = {"a1b1": (22.5, 0.0), "a1b2": (22.5, 135.0), "a2b1": (157.5, 0.0), "a2b2": (157.5, 135.0)}
    for name, e in e_targets.items():
        same = int(round(n * (1 + e) / 2))
        diff = n - same
        tables[name] = table(name, (same, diff, 0, 0), *angles[name])
    return tables


def test_chsh_combination_and_sigma():
    tables = four_tables({"a1b1": -1.0, "a1b2": 1.0, "a2b1": -1.0, "a2b2": -1.0})
    with pytest.warns(RuntimeWarning, match="quantum bound"):
        est = chsh(tables)
    assert est.s == pytest.approx(4.0)
    assert est.sigma_s == pytest.approx(0.0)
    assert est.success_probability == 1.0


def test_chsh_missing_setting_named():
    tables = four_tables({"a1b1": -0.7, "a1b2": 0.7, "a2b1": -0.7, "a2b2": -0.7})
    del tables["a2b1"]
    with pytest.raises(KeyError, match="a2b1"):
        chsh(tables)


def test_visibility_direct_requires_matched_bases():
    t = table("x", (10, 40, 35, 15), a_deg=22.5, b_deg=0.0)
    with pytest.raises(ValueError, match="matched"):
        visibility_direct(t)


def test_visibility_direct_sign_convention():
    # anticorrelated (singlet-like) counts give positive visibility
    t = table("m", (10, 90, 85, 15), a_deg=0.0, b_deg=0.0)
    est = visibility_direct(t)
    e, sigma = correlation_term(t)
    assert est.v == pytest.approx(-e) and est.v > 0
    assert est.sigma_v == sigma
    assert est.basis == "(H,V)" and est.method == "direct"
    plus_minus = visibility_direct(table("m", (5, 50, 45, 10), a_deg=45.0, b_deg=45.0))
    assert plus_minus.basis == "(+,-)"


def test_visibility_direct_mc_no_postselection(ideal_source):
    cfg = RunConfig(
        source=ideal_source,
        detection=ThresholdConfig(0.5),
        settings=(matched_basis_setting(0.0, "m"),),
        trials_per_setting=1_000_000,
        seed=20120904,
    )
    _, tables = run_experiment(cfg)
    est = visibility_direct(tables["m"])
    assert abs(est.v - 2.0 / math.pi) < 3.0 * est.sigma_v


def test_fringe_fit_noiseless_recovery():
    alphas = np.linspace(0.0, math.pi, 12, endpoint=False)
    counts = 100.0 * (1.0 + 0.6 * np.cos(2.0 * alphas))
    est = visibility_fringe_fit(list(zip(alphas, counts)), basis_angle_deg=0.0)
    assert est.v == pytest.approx(0.600, abs=1e-9)
    assert est.sigma_v < 1e-3
    assert est.method == "fringe_fit"


def test_fringe_fit_recovers_phase_and_mean():
    alphas = np.linspace(0.0, math.pi, 16, endpoint=False)
    counts = 50.0 * (1.0 + 0.35 * np.cos(2.0 * (alphas - 0.4)))
    fit = fit_fringe(alphas, counts)
    assert fit.mean == pytest.approx(50.0, abs=1e-9)
    assert fit.visibility == pytest.approx(0.35, abs=1e-9)
    assert fit.phase == pytest.approx(0.4, abs=1e-9)


def test_fringe_fit_constant_counts_zero_visibility():
    alphas = np.linspace(0.0, math.pi, 12, endpoint=False)
    est = visibility_fringe_fit([(a, 100.0) for a in alphas])
    assert est.v == pytest.approx(0.0, abs=1e-12)


def test_fringe_fit_validation():
    alphas = np.linspace(0.0, math.pi, 12, endpoint=False)
    with pytest.raises(ValueError, match="8 scan points"):
        fit_fringe(alphas[:6], np.full(6, 10.0))
    with pytest.raises(ValueError, match="180 degrees"):
        narrow = np.linspace(0.0, 1.0, 12)
        fit_fringe(narrow, np.full(12, 10.0))
    with pytest.raises(ValueError, match="nonnegative"):
        fit_fringe(alphas, np.full(12, -1.0))
    # a fringe deeper than the mean is clipped at zero counts and unphysical
    counts = np.maximum(10.0 * (1.0 + 4.0 * np.cos(2 * alphas)), 0.0)
    with pytest.raises(FringeFitError):
        fit_fringe(alphas, counts)


def test_fringe_fit_agrees_with_direct_on_mc_data(calibrated_source):
    cfg = RunConfig(
        source=calibrated_source,
        detection=ThresholdConfig(0.5),
        trials_per_setting=1,
        seed=77,
    )
    scan = run_fringe_scan(cfg, 0.0, np.arange(0.0, 181.0, 15.0), 4000)
    fringe = visibility_fringe_fit(scan, basis_angle_deg=0.0)
    direct_cfg = RunConfig(
        source=calibrated_source,
        detection=ThresholdConfig(0.5),
        settings=(matched_basis_setting(0.0, "m"),),
        trials_per_setting=100_000,
        seed=78,
    )
    _, tables = run_experiment(direct_cfg)
    direct = visibility_direct(tables["m"])
    combined = math.hypot(fringe.sigma_v, direct.sigma_v)
    assert abs(fringe.v - direct.v) < 3.0 * combined


def test_witness_two_visibilities_values():
    v1 = VisibilityEstimate("(H,V)", 0.536, 0.019, "fringe_fit", angle_deg=0.0)
    v2 = VisibilityEstimate("(+,-)", 0.602, 0.018, "fringe_fit", angle_deg=45.0)
    result = witness_two_visibilities(v1, v2)
    assert result.total == pytest.approx(1.138, abs=1e-12)
    assert result.sigma_total == pytest.approx(math.hypot(0.019, 0.018), abs=1e-12)
    assert result.sigma_total == pytest.approx(0.026, abs=1e-3)
    assert result.violated
    assert result.significance == pytest.approx(0.138 / math.hypot(0.019, 0.018))


def test_witness_two_saturating_product_state():
    v1 = VisibilityEstimate("(H,V)", 1.0, 0.0, "direct", angle_deg=0.0)
    v2 = VisibilityEstimate("(+,-)", 0.0, 0.0, "direct", angle_deg=45.0)
    result = witness_two_visibilities(v1, v2)
    assert result.total == 1.0 and not result.violated


def test_witness_two_requires_mutually_unbiased_bases():
    v1 = VisibilityEstimate("(H,V)", 0.5, 0.01, "direct", angle_deg=0.0)
    v2 = VisibilityEstimate("(H,V)", 0.5, 0.01, "direct", angle_deg=90.0)
    with pytest.raises(ValueError, match="unbiased"):
        witness_two_visibilities(v1, v2)
    # 135 is unbiased with 0 (same basis pair as 45)
    v3 = VisibilityEstimate("(+,-)", 0.5, 0.01, "direct", angle_deg=135.0)
    witness_two_visibilities(v1, v3)


def test_witness_three_visibilities():
    mk = lambda basis, v: VisibilityEstimate(basis, v, 0.0, "direct")
    result = witness_three_visibilities(mk("x", 1 / 3), mk("y", 1 / 3), mk("z", 1 / 3))
    assert result.total == pytest.approx(1.0) and not result.violated
    result = witness_three_visibilities(mk("x", 1.0), mk("y", 1.0), mk("z", 1.0))
    assert result.total == pytest.approx(3.0) and result.violated
    with pytest.raises(ValueError, match="distinct"):
        witness_three_visibilities(mk("x", 0.1), mk("x", 0.1), mk("z", 0.1))


def test_macro_state_invariant():
    MacroStateSummary(jx=3.0, jy=0.0, jz=4.0, n=5.0)
    with pytest.raises(ValueError):
        MacroStateSummary(jx=3.0, jy=0.0, jz=4.0, n=4.99)
    with pytest.raises(ValueError):
        MacroStateSummary(jx=0.0, jy=0.0, jz=0.0, n=0.0)


def test_separable_bound_chain_saturates_for_aligned_states():
    a = MacroStateSummary(jx=100.0, jy=0.0, jz=0.0, n=100.0)
    b = MacroStateSummary(jx=250.0, jy=0.0, jz=0.0, n=250.0)
    lhs = abs(a.jx * b.jx + a.jy * b.jy)
    assert lhs == a.j_plane() * b.j_plane() == a.j_length() * b.j_length() == a.n * b.n


def test_separable_bound_jz_only_states_trivial():
    a = MacroStateSummary(jx=0.0, jy=0.0, jz=50.0, n=60.0)
    b = MacroStateSummary(jx=0.0, jy=0.0, jz=-70.0, n=90.0)
    assert abs(a.jx * b.jx + a.jy * b.jy) == 0.0 <= a.n * b.n


def test_separable_bound_random_product_states(rng):
    report = check_separable_bound(10_000, rng)
    assert report.passed and report.samples == 10_000 and report.violations == 0


@given(st.integers(min_value=0, max_value=10_000))
def test_separable_bound_rejects_bad_sample_count(count):
    if count >= 1:
        return
    with pytest.raises(ValueError):
        check_separable_bound(count, np.random.default_rng(0))
