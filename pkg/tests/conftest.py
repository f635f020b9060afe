"""Shared fixtures and stream-building helpers."""

from __future__ import annotations

import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))  # make oracles importable

from wearfeat.ingest import ParsedSubject
from wearfeat.types import SleepSchedule

RR_TICK_MS = 200  # 5 Hz report rate


def ticks_from_beats(t0_ms, intervals_ms, duration_ms=None):
    """Emit a 5 Hz RR report stream from a beat sequence.

    Mirrors the device semantics: each 200 ms tick repeats the interval of
    the most recent beat, so runs of duplicates appear between beats.
    """
    intervals = np.asarray(intervals_ms, dtype=np.float64)
    beat_t = t0_ms + np.cumsum(intervals) - intervals[0]
    if duration_ms is None:
        duration_ms = float(beat_t[-1] - t0_ms) + RR_TICK_MS
    ticks = np.arange(t0_ms, t0_ms + duration_ms, RR_TICK_MS, dtype=np.int64)
    idx = np.searchsorted(beat_t, ticks, side="right") - 1
    values = intervals[np.clip(idx, 0, intervals.size - 1)]
    return ticks, values


def alternating_intervals(n, base_ms=800.0, delta_ms=1.0):
    """n intervals alternating base+delta / base-delta (mean exactly base).

    Alternation keeps consecutive values distinct so duplicate dropping
    never collapses genuine beats; n even keeps the sum exact.
    """
    iv = np.full(n, base_ms)
    iv[0::2] += delta_ms
    iv[1::2] -= delta_ms
    return iv


def motion_stream(t0_ms, minutes, rate_hz=20, amplitude=1.0, seed=0):
    """Gaussian tri-axial stream starting at t0_ms."""
    n = int(minutes * 60 * rate_hz)
    rng = np.random.default_rng(seed)
    t = t0_ms + np.arange(n, dtype=np.int64) * (1000 // rate_hz)
    return t, rng.normal(0.0, amplitude, size=(n, 3))


def make_subject(subject_id="s-000", group="control", timezone="UTC",
                 acc=(None, None), gyr=(None, None), rr=(None, None),
                 sleep=None, steps=()):
    """Assemble an in-memory ParsedSubject from optional streams."""
    def arr_t(t):
        return np.empty(0, np.int64) if t is None else np.asarray(t, np.int64)

    def arr_v(v, shape):
        return np.empty(shape) if v is None else np.asarray(v, np.float64)

    return ParsedSubject(
        subject_id=subject_id,
        group=group,
        timezone=timezone,
        acc_t=arr_t(acc[0]),
        acc_xyz=arr_v(acc[1], (0, 3)),
        gyr_t=arr_t(gyr[0]),
        gyr_xyz=arr_v(gyr[1], (0, 3)),
        rr_t=arr_t(rr[0]),
        rr_ms=arr_v(rr[1], (0,)),
        sleep=sleep if sleep is not None else SleepSchedule(np.empty((0, 2), np.int64)),
        steps=list(steps),
        manifest={"subject_id": subject_id, "group": group, "timezone": timezone},
    )


@pytest.fixture(scope="session")
def tiny_cohort(tmp_path_factory):
    """One small generated cohort (2 vs 2 subjects, 1 day) shared read-only."""
    from wearfeat.synth import generate_cohort

    root = tmp_path_factory.mktemp("tiny_cohort")
    dirs = generate_cohort({"n_control": 2, "n_patient": 2, "days": 1}, 7, root)
    return root, dirs
