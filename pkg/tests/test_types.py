"""Domain types: invariants, serialization round trips, window validation."""

import math

import numpy as np
import pytest

from wearfeat.types import (
    FeatureRecord,
    FeatureStat,
    InvalidWindow,
    MotionWindow,
    RRSeries,
    SleepSchedule,
    SubjectSummary,
    validate_rr_window,
)

from conftest import alternating_intervals, ticks_from_beats

HOUR_MS = 3_600_000


def _window_stream(n_beats, base_ms=800.0, t0=0):
    intervals = alternating_intervals(n_beats, base_ms=base_ms)
    return ticks_from_beats(t0, intervals, duration_ms=HOUR_MS)


class TestValidateRRWindow:
    def test_full_hour_of_beats_is_valid(self):
        t, rr = _window_stream(4500)
        series = validate_rr_window(t, rr, 0, HOUR_MS)
        assert isinstance(series, RRSeries)
        assert series.coverage_seconds == pytest.approx(3600.0, abs=1.0)
        assert series.beat_times[0] >= 0.0
        assert series.beat_times[-1] < 3600.0

    def test_fifty_minutes_is_insufficient(self):
        t, rr = _window_stream(int(50 * 60 * 1000 / 800))  # ~50 min of beats
        result = validate_rr_window(t, rr, 0, HOUR_MS)
        assert isinstance(result, InvalidWindow)
        assert result.reason == "insufficient_coverage"

    def test_exactly_54_minutes_is_valid(self):
        # 4050 alternating 801/799 intervals sum to exactly 3240 s = 54 min.
        t, rr = _window_stream(4050)
        series = validate_rr_window(t, rr, 0, HOUR_MS)
        assert isinstance(series, RRSeries)
        assert series.coverage_seconds == pytest.approx(3240.0, abs=1e-6)

    def test_empty_window(self):
        result = validate_rr_window([], [], 0, HOUR_MS)
        assert isinstance(result, InvalidWindow)
        assert result.reason == "empty"

    def test_flatline_window_is_empty(self):
        t = np.arange(0, HOUR_MS, 200)
        rr = np.full(t.size, 800.0)
        result = validate_rr_window(t, rr, 0, HOUR_MS)
        assert isinstance(result, InvalidWindow)

    def test_samples_outside_window_ignored(self):
        t, rr = _window_stream(4500, t0=-HOUR_MS)
        result = validate_rr_window(t, rr, 0, HOUR_MS)
        assert isinstance(result, InvalidWindow)

    def test_revalidating_valid_series_returns_equal_series(self):
        t, rr = _window_stream(4500)
        series = validate_rr_window(t, rr, 0, HOUR_MS)
        beat_t_ms = series.beat_times * 1000.0 + series.window_start
        again = validate_rr_window(beat_t_ms, series.intervals, 0, HOUR_MS)
        assert again == series

    def test_removing_intervals_never_increases_coverage(self):
        t, rr = _window_stream(4200)
        full = validate_rr_window(t, rr, 0, HOUR_MS)
        half = validate_rr_window(t[: t.size // 2], rr[: t.size // 2], 0, HOUR_MS)
        if isinstance(half, RRSeries):
            assert half.coverage_seconds <= full.coverage_seconds


class TestRRSeries:
    def test_round_trip(self):
        s = RRSeries(beat_times=[0.0, 0.8, 1.7], intervals=[800.0, 800.5, 900.0],
                     window_start=0, window_end=HOUR_MS, coverage_seconds=2.5005)
        assert RRSeries.from_dict(s.to_dict()) == s

    def test_rejects_out_of_range_intervals(self):
        with pytest.raises(ValueError):
            RRSeries(beat_times=[0.0, 1.0], intervals=[800.0, 2100.0],
                     window_start=0, window_end=HOUR_MS, coverage_seconds=2.9)

    def test_rejects_non_increasing_beat_times(self):
        with pytest.raises(ValueError):
            RRSeries(beat_times=[1.0, 1.0], intervals=[800.0, 800.0],
                     window_start=0, window_end=HOUR_MS, coverage_seconds=1.6)

    def test_rejects_inconsistent_coverage(self):
        with pytest.raises(ValueError):
            RRSeries(beat_times=[0.0, 0.8], intervals=[800.0, 800.0],
                     window_start=0, window_end=HOUR_MS, coverage_seconds=99.0)

    def test_arrays_immutable(self):
        s = RRSeries(beat_times=[0.0, 0.8], intervals=[800.0, 801.0],
                     window_start=0, window_end=HOUR_MS, coverage_seconds=1.601)
        with pytest.raises(ValueError):
            s.intervals[0] = 500.0


class TestMotionWindow:
    def _window(self, n):
        t = np.arange(n, dtype=np.int64) * 50
        return MotionWindow(sensor="acc", t_ms=t, xyz=np.zeros((n, 3)), window_start=0)

    def test_validity_threshold_is_90_percent(self):
        assert self._window(10_800).is_valid  # exactly 90% of 12000
        assert not self._window(10_799).is_valid

    def test_zero_samples_invalid(self):
        assert not self._window(0).is_valid

    def test_round_trip(self):
        w = self._window(5)
        assert MotionWindow.from_dict(w.to_dict()) == w

    def test_rejects_unknown_sensor(self):
        with pytest.raises(ValueError):
            MotionWindow(sensor="mag", t_ms=[0], xyz=[[0.0, 0.0, 0.0]], window_start=0)

    def test_rejects_samples_outside_window(self):
        with pytest.raises(ValueError):
            MotionWindow(sensor="acc", t_ms=[600_000], xyz=[[0.0, 0.0, 0.0]],
                         window_start=0)


class TestSleepSchedule:
    def test_overlap_arithmetic(self):
        s = SleepSchedule(intervals=[[1000, 5000], [8000, 9000]])
        assert s.overlap_ms(0, 10_000) == 5000
        assert s.overlap_ms(4000, 8500) == 1500
        assert s.overlap_ms(5000, 8000) == 0

    def test_intervals_sorted_on_construction(self):
        s = SleepSchedule(intervals=[[8000, 9000], [1000, 5000]])
        assert s.intervals[0, 0] == 1000

    def test_rejects_overlapping_intervals(self):
        with pytest.raises(ValueError):
            SleepSchedule(intervals=[[0, 5000], [4000, 9000]])

    def test_round_trip(self):
        s = SleepSchedule(intervals=[[1000, 5000]])
        assert SleepSchedule.from_dict(s.to_dict()) == s


class TestFeatureRecordAndSummary:
    def test_feature_record_round_trip(self):
        r = FeatureRecord(subject_id="s", feature_name="sampen", window_start=0,
                          state="awake", value=1.25)
        assert FeatureRecord.from_dict(r.to_dict()) == r

    def test_rejects_unknown_feature_name(self):
        with pytest.raises(ValueError):
            FeatureRecord(subject_id="s", feature_name="bogus", window_start=0,
                          state="awake", value=1.0)

    def test_rejects_unknown_state(self):
        with pytest.raises(ValueError):
            FeatureRecord(subject_id="s", feature_name="sampen", window_start=0,
                          state="dozing", value=1.0)

    def test_rejects_non_finite_value(self):
        with pytest.raises(ValueError):
            FeatureRecord(subject_id="s", feature_name="sampen", window_start=0,
                          state="awake", value=math.inf)

    def test_summary_round_trip(self):
        s = SubjectSummary(
            subject_id="s", group="patient",
            features={("sampen", "awake"): FeatureStat(mean=1.5, std=0.2, count=10)},
        )
        back = SubjectSummary.from_dict(s.to_dict())
        assert back.features == s.features
        assert back.group == s.group

    def test_rejects_unknown_group(self):
        with pytest.raises(ValueError):
            SubjectSummary(subject_id="s", group="cohort3")

    def test_rejects_bad_feature_key(self):
        with pytest.raises(ValueError):
            SubjectSummary(subject_id="s", group="control",
                           features={("bogus", "awake"): FeatureStat(1.0, 0.0, 1)})
