"""Domain types shared across the pipeline.

All types are immutable after construction and safe to share across
threads.  Timestamps are integer milliseconds since the Unix epoch;
window boundaries are computed in the subject's local timezone (sleep
and wake have local semantics).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .preprocess import clean_rr

MOTION_WINDOW_MS = 10 * 60 * 1000
HRV_WINDOW_MS = 60 * 60 * 1000
MOTION_RATE_HZ = 20
MOTION_EXPECTED_COUNT = MOTION_WINDOW_MS // 1000 * MOTION_RATE_HZ  # 12000
COVERAGE_FRACTION = 0.9  # both the 54-minute HRV rule and the motion rule

SENSORS = ("acc", "gyr")
STATES = ("awake", "asleep")
GROUPS = ("control", "patient")

# Closed catalog of per-window feature families.
FEATURE_NAMES = (
    "acc_STE",
    "gyr_STE",
    "sampen",
    "higuchi",
    "mfd_fd1",
    "mfd_min",
    "mfd_max",
    "mfd_mean",
    "mfd_std",
    "sd1",
    "sd2",
    "lf_power",
    "hf_power",
    "lf_hf_ratio",
)


class RawSample(NamedTuple):
    """One tri-axial motion sample (m/s^2 for acc, deg/s for gyr)."""

    t_ms: int
    x: float
    y: float
    z: float


class RawRRSample(NamedTuple):
    """One 5 Hz RR report; consecutive duplicates mean 'no new beat'."""

    t_ms: int
    rr: float


@dataclass(frozen=True)
class InvalidWindow:
    """Marker returned instead of a series when a validity rule failed."""

    reason: str  # "insufficient_coverage" | "empty"


@dataclass(frozen=True)
class RRSeries:
    """Cleaned inter-beat intervals within one analysis window.

    beat_times are seconds relative to window_start, strictly increasing;
    intervals are milliseconds, one per beat time (the interval ending at
    that beat).
    """

    beat_times: np.ndarray
    intervals: np.ndarray
    window_start: int
    window_end: int
    coverage_seconds: float

    def __post_init__(self):
        bt = np.array(self.beat_times, dtype=np.float64)
        iv = np.array(self.intervals, dtype=np.float64)
        object.__setattr__(self, "beat_times", bt)
        object.__setattr__(self, "intervals", iv)
        bt.setflags(write=False)
        iv.setflags(write=False)
        if bt.shape != iv.shape:
            raise ValueError("beat_times and intervals must align")
        if bt.size and np.any(np.diff(bt) <= 0):
            raise ValueError("beat_times must be strictly increasing")
        if iv.size and (iv.min() < 300.0 or iv.max() > 2000.0):
            raise ValueError("intervals must lie within [300, 2000] ms")
        if abs(iv.sum() / 1000.0 - self.coverage_seconds) > 1e-6:
            raise ValueError("coverage_seconds inconsistent with intervals")

    def __len__(self) -> int:
        return int(self.beat_times.size)

    def __eq__(self, other) -> bool:
        if not isinstance(other, RRSeries):
            return NotImplemented
        return (
            self.window_start == other.window_start
            and self.window_end == other.window_end
            and self.coverage_seconds == other.coverage_seconds
            and np.array_equal(self.beat_times, other.beat_times)
            and np.array_equal(self.intervals, other.intervals)
        )

    def to_dict(self) -> dict:
        return {
            "beat_times": self.beat_times.tolist(),
            "intervals": self.intervals.tolist(),
            "window_start": self.window_start,
            "window_end": self.window_end,
            "coverage_seconds": self.coverage_seconds,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RRSeries":
        return cls(
            beat_times=np.asarray(d["beat_times"], dtype=np.float64),
            intervals=np.asarray(d["intervals"], dtype=np.float64),
            window_start=int(d["window_start"]),
            window_end=int(d["window_end"]),
            coverage_seconds=float(d["coverage_seconds"]),
        )


@dataclass(frozen=True)
class MotionWindow:
    """One 10-minute window of 20 Hz tri-axial samples for one sensor."""

    sensor: str
    t_ms: np.ndarray
    xyz: np.ndarray  # shape (n, 3)
    window_start: int
    expected_count: int = MOTION_EXPECTED_COUNT

    def __post_init__(self):
        if self.sensor not in SENSORS:
            raise ValueError(f"unknown sensor {self.sensor!r}")
        t = np.array(self.t_ms, dtype=np.int64)
        v = np.array(self.xyz, dtype=np.float64)
        object.__setattr__(self, "t_ms", t)
        object.__setattr__(self, "xyz", v)
        t.setflags(write=False)
        v.setflags(write=False)
        if v.ndim != 2 or v.shape != (t.size, 3):
            raise ValueError("xyz must be (n, 3) aligned with t_ms")
        if t.size and (
            t.min() < self.window_start
            or t.max() >= self.window_start + MOTION_WINDOW_MS
        ):
            raise ValueError("samples outside the 10-minute window")

    def __len__(self) -> int:
        return int(self.t_ms.size)

    @property
    def is_valid(self) -> bool:
        # Zero samples means "watch off", not "no movement".
        return len(self) >= COVERAGE_FRACTION * self.expected_count

    def to_dict(self) -> dict:
        return {
            "sensor": self.sensor,
            "t_ms": self.t_ms.tolist(),
            "xyz": self.xyz.tolist(),
            "window_start": self.window_start,
            "expected_count": self.expected_count,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "MotionWindow":
        return cls(
            sensor=d["sensor"],
            t_ms=np.asarray(d["t_ms"], dtype=np.int64),
            xyz=np.asarray(d["xyz"], dtype=np.float64),
            window_start=int(d["window_start"]),
            expected_count=int(d.get("expected_count", MOTION_EXPECTED_COUNT)),
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, MotionWindow):
            return NotImplemented
        return (
            self.sensor == other.sensor
            and self.window_start == other.window_start
            and self.expected_count == other.expected_count
            and np.array_equal(self.t_ms, other.t_ms)
            and np.array_equal(self.xyz, other.xyz)
        )


@dataclass(frozen=True)
class SleepSchedule:
    """Non-overlapping absolute-time intervals during which the subject slept."""

    intervals: np.ndarray  # shape (k, 2), ms since epoch

    def __post_init__(self):
        iv = np.array(self.intervals, dtype=np.int64).reshape(-1, 2)
        iv = iv[np.argsort(iv[:, 0])]
        object.__setattr__(self, "intervals", iv)
        iv.setflags(write=False)
        if iv.size:
            if np.any(iv[:, 1] <= iv[:, 0]):
                raise ValueError("sleep interval end must exceed start")
            if np.any(iv[1:, 0] < iv[:-1, 1]):
                raise ValueError("sleep intervals must not overlap")

    def overlap_ms(self, start: int, end: int) -> int:
        """Total sleep time overlapping [start, end)."""
        if self.intervals.size == 0 or end <= start:
            return 0
        lo = np.maximum(self.intervals[:, 0], start)
        hi = np.minimum(self.intervals[:, 1], end)
        return int(np.maximum(hi - lo, 0).sum())

    def to_dict(self) -> dict:
        return {"intervals": self.intervals.tolist()}

    @classmethod
    def from_dict(cls, d: dict) -> "SleepSchedule":
        return cls(intervals=np.asarray(d["intervals"], dtype=np.int64).reshape(-1, 2))

    def __eq__(self, other) -> bool:
        if not isinstance(other, SleepSchedule):
            return NotImplemented
        return np.array_equal(self.intervals, other.intervals)


class StepRecord(NamedTuple):
    """Step count for one 10-minute bucket aligned to the 10-minute grid."""

    bucket_start_ms: int
    steps: int


@dataclass(frozen=True)
class FeatureRecord:
    """One window's value for one feature family."""

    subject_id: str
    feature_name: str
    window_start: int
    state: str
    value: float

    def __post_init__(self):
        if self.feature_name not in FEATURE_NAMES:
            raise ValueError(f"unknown feature {self.feature_name!r}")
        if self.state not in STATES:
            raise ValueError(f"unknown state {self.state!r}")
        if not math.isfinite(self.value):
            raise ValueError("feature value must be finite")

    def to_dict(self) -> dict:
        return {
            "subject_id": self.subject_id,
            "feature_name": self.feature_name,
            "window_start": self.window_start,
            "state": self.state,
            "value": self.value,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "FeatureRecord":
        return cls(
            subject_id=str(d["subject_id"]),
            feature_name=str(d["feature_name"]),
            window_start=int(d["window_start"]),
            state=str(d["state"]),
            value=float(d["value"]),
        )


@dataclass(frozen=True)
class FeatureStat:
    """Mean/std of one feature family in one state for one subject."""

    mean: float
    std: float  # NaN when fewer than 2 windows
    count: int

    def __post_init__(self):
        if self.count < 0:
            raise ValueError("count must be non-negative")
        if math.isfinite(self.std) and self.std < 0:
            raise ValueError("std must be non-negative")


@dataclass(frozen=True)
class DailyStats:
    """Sleep/wake-ratio and steps statistics over qualifying days."""

    sleep_wake_ratio_mean: float
    sleep_wake_ratio_std: float
    steps_per_day_mean: float
    steps_per_day_std: float
    n_qualifying_days: int
    eligible: bool  # at least 30 days with >= 20 recorded hours


@dataclass(frozen=True)
class SubjectSummary:
    """Per-subject summary: per-(feature, state) statistics plus daily stats."""

    subject_id: str
    group: str
    features: dict = field(default_factory=dict)  # (name, state) -> FeatureStat
    daily: DailyStats | None = None

    def __post_init__(self):
        if self.group not in GROUPS:
            raise ValueError(f"unknown group {self.group!r}")
        for name, state in self.features:
            if name not in FEATURE_NAMES or state not in STATES:
                raise ValueError(f"bad feature key ({name!r}, {state!r})")

    def to_dict(self) -> dict:
        return {
            "subject_id": self.subject_id,
            "group": self.group,
            "features": [
                {"feature_name": n, "state": s, "mean": fs.mean,
                 "std": fs.std, "count": fs.count}
                for (n, s), fs in sorted(self.features.items())
            ],
            "daily": None if self.daily is None else vars(self.daily),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SubjectSummary":
        feats = {
            (e["feature_name"], e["state"]): FeatureStat(
                mean=float(e["mean"]), std=float(e["std"]), count=int(e["count"])
            )
            for e in d["features"]
        }
        daily = None
        if d.get("daily") is not None:
            daily = DailyStats(**d["daily"])
        return cls(subject_id=str(d["subject_id"]), group=str(d["group"]),
                   features=feats, daily=daily)


def validate_rr_window(t_ms, rr_ms, window_start: int, window_end: int):
    """Clean raw RR samples and validate coverage for one window.

    Returns an RRSeries when the cleaned intervals inside the window sum to
    at least 90% of the window length (3240 s = 54 min for a 1-hour
    window, threshold inclusive), otherwise an InvalidWindow marker.
    Validating the beats of an already-valid series returns an equal series.
    """
    t = np.asarray(t_ms, dtype=np.float64)
    rr = np.asarray(rr_ms, dtype=np.float64)
    inside = (t >= window_start) & (t < window_end)
    beat_t, intervals = clean_rr(t[inside], rr[inside])
    if beat_t.size == 0:
        return InvalidWindow("empty")
    inside = (beat_t >= window_start) & (beat_t < window_end)
    beat_t, intervals = beat_t[inside], intervals[inside]
    if beat_t.size == 0:
        return InvalidWindow("empty")
    coverage = intervals.sum() / 1000.0
    window_seconds = (window_end - window_start) / 1000.0
    if coverage < COVERAGE_FRACTION * window_seconds - 1e-9:
        return InvalidWindow("insufficient_coverage")
    return RRSeries(
        beat_times=(beat_t - window_start) / 1000.0,
        intervals=intervals,
        window_start=int(window_start),
        window_end=int(window_end),
        coverage_seconds=coverage,
    )
