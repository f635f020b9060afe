"""Per-subject aggregation of window features and daily statistics."""

from __future__ import annotations

import csv
import math
from collections import defaultdict
from datetime import datetime
from pathlib import Path
from zoneinfo import ZoneInfo

import numpy as np

from .types import (
    DailyStats,
    FeatureRecord,
    FeatureStat,
    SleepSchedule,
    SubjectSummary,
)

MIN_QUALIFYING_DAYS = 30
MIN_RECORDED_HOURS = 20


def summarize_subject(records, subject_id: str, group: str,
                      daily: DailyStats | None = None) -> SubjectSummary:
    """Mean and population std per (feature, state) over all valid windows.

    Pairs with fewer than 2 windows get a NaN std (flagged via the count);
    pairs with no windows are simply absent.  Record order never matters.
    """
    values = defaultdict(list)
    for rec in records:
        if rec.subject_id != subject_id:
            raise ValueError(f"record for {rec.subject_id!r} in summary of {subject_id!r}")
        values[(rec.feature_name, rec.state)].append(rec.value)

    features = {}
    for key, vals in values.items():
        arr = np.asarray(vals, dtype=np.float64)
        features[key] = FeatureStat(
            mean=float(arr.mean()),
            std=float(arr.std()) if arr.size >= 2 else math.nan,
            count=int(arr.size),
        )
    return SubjectSummary(subject_id=subject_id, group=group,
                          features=features, daily=daily)


def daily_stats(motion_windows, sleep: SleepSchedule, steps, tz: str) -> DailyStats:
    """Sleep/wake ratio and steps per day over qualifying days.

    A day qualifies when at least 20 local-clock hours contain a valid
    motion window; a subject is eligible for daily statistics when at
    least 30 days qualify.  Within a qualifying day the ratio is asleep
    seconds over awake seconds inside the recorded (windowed) time.
    """
    zone = ZoneInfo(tz)

    def local_day(t_ms):
        return datetime.fromtimestamp(t_ms / 1000.0, zone).date()

    def local_hour(t_ms):
        dt = datetime.fromtimestamp(t_ms / 1000.0, zone)
        return (dt.date(), dt.hour)

    # Distinct windows by start time (sensors overlap on the same grid).
    window_spans = {}
    for win, _state in motion_windows:
        window_spans[win.window_start] = win.window_start + 600_000

    hours_per_day = defaultdict(set)
    for ws in window_spans:
        day, hour = local_hour(ws)
        hours_per_day[day].add(hour)
    qualifying = sorted(d for d, hrs in hours_per_day.items()
                        if len(hrs) >= MIN_RECORDED_HOURS)

    steps_per_day = defaultdict(int)
    for rec in steps:
        steps_per_day[local_day(rec.bucket_start_ms)] += rec.steps

    ratios = []
    day_steps = []
    for day in qualifying:
        recorded_ms = 0
        asleep_ms = 0
        for ws, we in window_spans.items():
            if local_day(ws) == day:
                recorded_ms += we - ws
                asleep_ms += sleep.overlap_ms(ws, we)
        awake_ms = recorded_ms - asleep_ms
        if awake_ms <= 0:
            continue  # ratio undefined for a fully-asleep recorded day
        ratios.append(asleep_ms / awake_ms)
        day_steps.append(steps_per_day[day])

    def mean_std(vals):
        if not vals:
            return math.nan, math.nan
        arr = np.asarray(vals, dtype=np.float64)
        return float(arr.mean()), float(arr.std())

    ratio_mean, ratio_std = mean_std(ratios)
    steps_mean, steps_std = mean_std(day_steps)
    return DailyStats(
        sleep_wake_ratio_mean=ratio_mean,
        sleep_wake_ratio_std=ratio_std,
        steps_per_day_mean=steps_mean,
        steps_per_day_std=steps_std,
        n_qualifying_days=len(qualifying),
        eligible=len(qualifying) >= MIN_QUALIFYING_DAYS,
    )


FEATURE_CSV_HEADER = ("subject_id", "feature_name", "state", "window_start_ms", "value")


def write_feature_records(records, path):
    """Write the restartable per-subject feature CSV."""
    path = Path(path)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(FEATURE_CSV_HEADER)
        for r in records:
            w.writerow((r.subject_id, r.feature_name, r.state,
                        r.window_start, repr(r.value)))


def read_feature_records(path):
    """Read a feature CSV written by write_feature_records."""
    path = Path(path)
    records = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            records.append(FeatureRecord(
                subject_id=row["subject_id"],
                feature_name=row["feature_name"],
                window_start=int(row["window_start_ms"]),
                state=row["state"],
                value=float(row["value"]),
            ))
    return records
