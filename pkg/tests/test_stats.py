"""Mann-Whitney, Benjamini-Hochberg, boxplots, and report assembly."""

import math

import numpy as np
import pytest
import scipy.stats
from hypothesis import given, settings
from hypothesis import strategies as st

from wearfeat.errors import ConfigError, DegenerateSeriesError
from wearfeat.stats import (
    TestResult as ComparisonResult,
    benjamini_hochberg,
    boxplot_data,
    boxplot_stats,
    mann_whitney_u,
    median_iqr_cell,
    render_csv,
    render_markdown,
    run_comparisons,
)
from wearfeat.types import DailyStats, FEATURE_NAMES, FeatureStat, SubjectSummary

from oracles import bh_reference, mwu_exact_enumeration


class TestMannWhitney:
    def test_identical_samples(self):
        _, p = mann_whitney_u([1.0, 2.0, 3.0, 4.0], [1.5, 2.5, 3.5, 4.5])
        assert p > 0.5

    def test_fully_separated_small_samples_exact(self):
        u, p = mann_whitney_u([1.0, 2.0, 3.0], [4.0, 5.0, 6.0])
        assert u == 0.0
        assert p == pytest.approx(0.1, abs=1e-12)

    def test_eight_vs_eight_matches_enumeration(self):
        rng = np.random.default_rng(67)
        a = rng.normal(0.0, 1.0, size=8)
        b = rng.normal(0.8, 1.0, size=8)
        u, p = mann_whitney_u(a, b)
        u_ref, p_ref = mwu_exact_enumeration(a, b)
        assert u == u_ref
        assert p == pytest.approx(p_ref, abs=1e-10)

    def test_tied_data_matches_scipy_asymptotic(self):
        a = [1.0, 2.0, 2.0, 3.0, 5.0, 5.0, 7.0, 9.0, 11.0]
        b = [2.0, 4.0, 5.0, 5.0, 6.0, 8.0, 8.0, 10.0, 12.0]
        u, p = mann_whitney_u(a, b)
        ref = scipy.stats.mannwhitneyu(a, b, alternative="two-sided",
                                       method="asymptotic", use_continuity=True)
        assert u == ref.statistic
        assert p == pytest.approx(ref.pvalue, rel=1e-10)

    def test_large_samples_match_scipy_asymptotic(self):
        rng = np.random.default_rng(71)
        a = rng.normal(0.0, 1.0, size=25)
        b = rng.normal(0.4, 1.0, size=22)
        u, p = mann_whitney_u(a, b)
        ref = scipy.stats.mannwhitneyu(a, b, alternative="two-sided",
                                       method="asymptotic", use_continuity=True)
        assert u == ref.statistic
        assert p == pytest.approx(ref.pvalue, rel=1e-10)

    def test_all_identical_values(self):
        _, p = mann_whitney_u([5.0, 5.0, 5.0], [5.0, 5.0, 5.0])
        assert p == 1.0

    def test_symmetry(self):
        rng = np.random.default_rng(73)
        a = rng.normal(size=6)
        b = rng.normal(size=9)
        u_a, p_a = mann_whitney_u(a, b)
        u_b, p_b = mann_whitney_u(b, a)
        assert u_a + u_b == pytest.approx(6 * 9)
        assert p_a == pytest.approx(p_b, rel=1e-12)

    def test_monotone_transform_invariance(self):
        rng = np.random.default_rng(79)
        a = rng.uniform(1.0, 2.0, size=10)
        b = rng.uniform(1.2, 2.4, size=10)
        _, p1 = mann_whitney_u(a, b)
        _, p2 = mann_whitney_u(np.exp(a), np.exp(b))
        assert p1 == pytest.approx(p2, rel=1e-12)

    def test_too_small_sample_rejected(self):
        with pytest.raises(DegenerateSeriesError):
            mann_whitney_u([1.0], [2.0, 3.0])


class TestBenjaminiHochberg:
    def test_single_p_unchanged(self):
        assert benjamini_hochberg([0.03]).tolist() == [0.03]

    def test_uniform_ladder(self):
        adj = benjamini_hochberg([0.01, 0.02, 0.03, 0.04])
        assert np.allclose(adj, [0.04, 0.04, 0.04, 0.04])

    def test_two_values(self):
        adj = benjamini_hochberg([0.001, 0.9])
        assert np.allclose(adj, [0.002, 0.9])

    def test_matches_literal_reference_on_random_vectors(self):
        rng = np.random.default_rng(83)
        for _ in range(50):
            p = rng.uniform(0.0, 1.0, size=rng.integers(1, 40))
            assert np.allclose(benjamini_hochberg(p), bh_reference(p), atol=1e-12)

    def test_empty_input(self):
        assert benjamini_hochberg([]).size == 0

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            benjamini_hochberg([0.5, 1.5])
        with pytest.raises(ValueError):
            benjamini_hochberg([0.5, math.nan])

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.floats(min_value=0.0, max_value=1.0), min_size=1, max_size=30))
    def test_properties(self, p):
        adj = benjamini_hochberg(p)
        assert np.all(adj >= np.asarray(p) - 1e-12)  # never undercuts raw
        assert np.all(adj <= 1.0)
        order = np.argsort(p, kind="stable")
        assert np.all(np.diff(adj[order]) >= -1e-12)  # monotone in raw order


class TestBoxplotStats:
    def test_one_to_hundred(self):
        s = boxplot_stats(np.arange(1.0, 101.0))
        assert s["median"] == 50.5
        assert s["q1"] == 25.75
        assert s["q3"] == 75.25
        assert s["outliers"] == []
        assert s["whisker_lo"] == 1.0 and s["whisker_hi"] == 100.0

    def test_constant_sample(self):
        s = boxplot_stats([3.0, 3.0, 3.0])
        assert s["median"] == s["q1"] == s["q3"] == 3.0
        assert s["outliers"] == []

    def test_outlier_flagged(self):
        s = boxplot_stats([1.0, 2.0, 3.0, 100.0])
        assert s["outliers"] == [100.0]
        assert s["whisker_hi"] == 3.0

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.floats(min_value=-1e6, max_value=1e6), min_size=1, max_size=50))
    def test_properties(self, sample):
        s = boxplot_stats(sample)
        assert s["q1"] <= s["median"] <= s["q3"]
        assert s["whisker_lo"] in sample and s["whisker_hi"] in sample
        n_inside = sum(1 for v in sample
                       if s["whisker_lo"] <= v <= s["whisker_hi"])
        assert n_inside + len(s["outliers"]) == len(sample)


def _summary(sid, group, offsets=None, daily=None, rng=None):
    """SubjectSummary with every feature populated from a seeded draw."""
    rng = rng or np.random.default_rng(abs(hash(sid)) % 2**32)
    offsets = offsets or {}
    feats = {}
    for name in FEATURE_NAMES:
        for state in ("awake", "asleep"):
            shift = offsets.get((name, state), 0.0)
            feats[(name, state)] = FeatureStat(
                mean=float(rng.normal(1.0 + shift, 0.1)),
                std=float(abs(rng.normal(0.2, 0.02))),
                count=10,
            )
    return SubjectSummary(subject_id=sid, group=group, features=feats, daily=daily)


class TestRunComparisons:
    def test_planted_shift_detected(self):
        rng = np.random.default_rng(89)
        ctrl = [_summary(f"c{i}", "control", rng=rng) for i in range(10)]
        pats = [_summary(f"p{i}", "patient",
                         offsets={("sampen", "awake"): 2.0}, rng=rng)
                for i in range(10)]
        results = run_comparisons(ctrl + pats)
        hit = [r for r in results if r.feature == "sampen mean" and r.state == "awake"]
        assert hit[0].significant

    def test_one_row_per_feature_statistic_state(self):
        rng = np.random.default_rng(97)
        subs = [_summary(f"c{i}", "control", rng=rng) for i in range(3)] + \
               [_summary(f"p{i}", "patient", rng=rng) for i in range(3)]
        results = run_comparisons(subs)
        assert len(results) == len(FEATURE_NAMES) * 2 * 2 + 4
        daily = [r for r in results if r.state == "daily"]
        assert all(r.skipped for r in daily)  # no eligible daily stats given

    def test_bh_applied_within_state_family(self):
        rng = np.random.default_rng(101)
        subs = [_summary(f"c{i}", "control", rng=rng) for i in range(5)] + \
               [_summary(f"p{i}", "patient", rng=rng) for i in range(5)]
        results = run_comparisons(subs)
        for state in ("awake", "asleep"):
            fam = [r for r in results if r.state == state and not r.skipped]
            adj = benjamini_hochberg([r.p_raw for r in fam])
            assert np.allclose([r.p_adjusted for r in fam], adj)

    def test_daily_tests_use_only_eligible_subjects(self):
        rng = np.random.default_rng(103)
        eligible = DailyStats(0.5, 0.05, 8000.0, 500.0, 35, True)
        ineligible = DailyStats(0.9, 0.05, 2000.0, 500.0, 10, False)
        subs = [_summary(f"c{i}", "control", daily=eligible, rng=rng)
                for i in range(4)]
        subs += [_summary(f"p{i}", "patient",
                          daily=eligible if i < 2 else ineligible, rng=rng)
                 for i in range(4)]
        results = run_comparisons(subs)
        daily = [r for r in results if r.state == "daily" and not r.skipped]
        assert daily and all(r.n_patient == 2 for r in daily)

    def test_fewer_than_two_subjects_rejected(self):
        with pytest.raises(ConfigError):
            run_comparisons([_summary("c0", "control"), _summary("c1", "control"),
                             _summary("p0", "patient")])

    def test_missing_feature_skipped_and_flagged(self):
        rng = np.random.default_rng(107)
        subs = [_summary(f"c{i}", "control", rng=rng) for i in range(3)]
        pats = []
        for i in range(3):
            s = _summary(f"p{i}", "patient", rng=rng)
            feats = {k: v for k, v in s.features.items() if k != ("sd2", "asleep")}
            pats.append(SubjectSummary(subject_id=s.subject_id, group="patient",
                                       features=feats))
        results = run_comparisons(subs + pats)
        row = [r for r in results if r.feature == "sd2 mean" and r.state == "asleep"]
        assert row[0].skipped and not row[0].significant


class TestReports:
    def test_median_iqr_cell_format(self):
        assert median_iqr_cell(6.87, 1.24) == "6.87 (1.24)"
        assert median_iqr_cell(0.0001554, 0.02) == "0.0001554 (0.02)"
        assert median_iqr_cell(math.nan, math.nan) == "- (-)"

    def test_result_invariants_enforced(self):
        with pytest.raises(ValueError):
            ComparisonResult(feature="sampen mean", state="awake", control_median=1.0,
                       control_iqr=0.1, patient_median=1.1, patient_iqr=0.1,
                       u_statistic=10.0, p_raw=0.5, p_adjusted=0.2,
                       significant=False, n_control=5, n_patient=5)

    def test_render_markdown_and_csv(self):
        rng = np.random.default_rng(109)
        subs = [_summary(f"c{i}", "control", rng=rng) for i in range(3)] + \
               [_summary(f"p{i}", "patient", rng=rng) for i in range(3)]
        results = run_comparisons(subs)
        md = render_markdown(results)
        csv_text = render_csv(results)
        assert md.splitlines()[0].startswith("| feature | state |")
        assert len(md.splitlines()) == len(results) + 2
        assert len(csv_text.splitlines()) == len(results) + 1
        assert "(" in md.splitlines()[2]  # median (IQR) cells present

    def test_boxplot_data_entries(self):
        rng = np.random.default_rng(113)
        subs = [_summary(f"c{i}", "control", rng=rng) for i in range(3)] + \
               [_summary(f"p{i}", "patient", rng=rng) for i in range(3)]
        data = boxplot_data(subs)
        entry = data[0]
        for key in ("feature", "state", "group", "median", "q1", "q3",
                    "whisker_lo", "whisker_hi", "outliers"):
            assert key in entry
        # two groups per populated feature comparison
        assert len(data) == len(FEATURE_NAMES) * 2 * 2 * 2
