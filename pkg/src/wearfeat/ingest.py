"""Subject-directory parsing and window segmentation.

Expected layout per subject directory:

    manifest.json   subject_id, group, timezone, recording date range
    acc.csv         t_ms,x,y,z        (20 Hz accelerometer, m/s^2)
    gyr.csv         t_ms,x,y,z        (20 Hz gyroscope, deg/s)
    rr.csv          t_ms,rr_ms        (5 Hz RR reports)
    sleep.csv       start_ms,end_ms   (asleep intervals)
    steps.csv       bucket_start_ms,steps

All CSVs are UTF-8 with LF line endings.  Missing stream files yield
empty streams with a warning; a manifest is mandatory.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from datetime import datetime, timedelta
from pathlib import Path
from zoneinfo import ZoneInfo

import numpy as np
import pandas as pd

from .errors import IngestError
from .types import (
    HRV_WINDOW_MS,
    MOTION_EXPECTED_COUNT,
    MOTION_WINDOW_MS,
    COVERAGE_FRACTION,
    InvalidWindow,
    MotionWindow,
    RRSeries,
    SleepSchedule,
    StepRecord,
    validate_rr_window,
)

logger = logging.getLogger(__name__)

MALFORMED_FRACTION_LIMIT = 0.01


@dataclass(frozen=True)
class ParsedSubject:
    """All streams of one subject, sorted by timestamp."""

    subject_id: str
    group: str
    timezone: str
    acc_t: np.ndarray
    acc_xyz: np.ndarray
    gyr_t: np.ndarray
    gyr_xyz: np.ndarray
    rr_t: np.ndarray
    rr_ms: np.ndarray
    sleep: SleepSchedule
    steps: list
    manifest: dict

    def stream_span(self):
        """(first, last) timestamp over all sensor streams, or None."""
        firsts = [t[0] for t in (self.acc_t, self.gyr_t, self.rr_t) if t.size]
        lasts = [t[-1] for t in (self.acc_t, self.gyr_t, self.rr_t) if t.size]
        if not firsts:
            return None
        return int(min(firsts)), int(max(lasts))


@dataclass(frozen=True)
class SegmentedStreams:
    """Valid analysis windows, each tagged awake/asleep."""

    motion_windows: list  # (MotionWindow, state)
    rr_windows: list  # (RRSeries, state)
    counts: dict  # window bookkeeping, Table-style


def _count_lines(path: Path) -> int:
    n = 0
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            n += chunk.count(b"\n")
    return n


def _read_stream_csv(path: Path, columns):
    """Read a numeric CSV, tolerating malformed lines below 1%."""
    total = _count_lines(path) - 1  # header
    if total <= 0:
        return pd.DataFrame(columns=columns)
    df = pd.read_csv(path, on_bad_lines="skip")
    missing = [c for c in columns if c not in df.columns]
    if missing:
        raise IngestError(f"{path}: missing columns {missing}")
    df = df[list(columns)].apply(pd.to_numeric, errors="coerce")
    df = df.dropna()
    malformed = total - len(df)
    if malformed > MALFORMED_FRACTION_LIMIT * total:
        raise IngestError(
            f"{path}: {malformed} of {total} lines malformed "
            f"(limit {MALFORMED_FRACTION_LIMIT:.0%})"
        )
    if malformed:
        logger.warning("%s: dropped %d malformed lines", path, malformed)
    return df


def _sorted_strict(t: np.ndarray, path: Path):
    order = np.argsort(t, kind="stable")
    t = t[order]
    if t.size > 1 and np.any(np.diff(t) <= 0):
        raise IngestError(f"{path}: non-monotone timestamps after sorting")
    return order, t


def parse_subject_dir(path) -> ParsedSubject:
    """Parse one subject directory into sorted in-memory streams."""
    path = Path(path)
    manifest_path = path / "manifest.json"
    if not manifest_path.exists():
        raise IngestError(f"missing manifest: {manifest_path}")
    manifest = json.loads(manifest_path.read_text())
    for key in ("subject_id", "group", "timezone"):
        if key not in manifest:
            raise IngestError(f"{manifest_path}: missing key {key!r}")

    def motion(name):
        p = path / name
        if not p.exists():
            logger.warning("%s: missing %s, stream left empty", path, name)
            return np.empty(0, np.int64), np.empty((0, 3))
        df = _read_stream_csv(p, ("t_ms", "x", "y", "z"))
        t = df["t_ms"].to_numpy(np.int64)
        order, t = _sorted_strict(t, p)
        return t, df[["x", "y", "z"]].to_numpy(np.float64)[order]

    acc_t, acc_xyz = motion("acc.csv")
    gyr_t, gyr_xyz = motion("gyr.csv")

    rr_path = path / "rr.csv"
    if rr_path.exists():
        df = _read_stream_csv(rr_path, ("t_ms", "rr_ms"))
        rr_t = df["t_ms"].to_numpy(np.int64)
        order, rr_t = _sorted_strict(rr_t, rr_path)
        rr_ms = df["rr_ms"].to_numpy(np.float64)[order]
    else:
        logger.warning("%s: missing rr.csv, stream left empty", path)
        rr_t, rr_ms = np.empty(0, np.int64), np.empty(0)

    sleep_path = path / "sleep.csv"
    if sleep_path.exists():
        df = _read_stream_csv(sleep_path, ("start_ms", "end_ms"))
        sleep = SleepSchedule(intervals=df.to_numpy(np.int64))
    else:
        logger.warning("%s: missing sleep.csv, schedule left empty", path)
        sleep = SleepSchedule(intervals=np.empty((0, 2), np.int64))

    steps_path = path / "steps.csv"
    steps = []
    if steps_path.exists():
        df = _read_stream_csv(steps_path, ("bucket_start_ms", "steps"))
        df = df.sort_values("bucket_start_ms")
        steps = [
            StepRecord(int(r.bucket_start_ms), int(r.steps))
            for r in df.itertuples()
        ]
    else:
        logger.warning("%s: missing steps.csv, no step data", path)

    return ParsedSubject(
        subject_id=str(manifest["subject_id"]),
        group=str(manifest["group"]),
        timezone=str(manifest["timezone"]),
        acc_t=acc_t,
        acc_xyz=acc_xyz,
        gyr_t=gyr_t,
        gyr_xyz=gyr_xyz,
        rr_t=rr_t,
        rr_ms=rr_ms,
        sleep=sleep,
        steps=steps,
        manifest=manifest,
    )


def first_full_hour(t_ms: int, tz: str) -> int:
    """First local full hour at or after t_ms, as ms since epoch."""
    dt = datetime.fromtimestamp(t_ms / 1000.0, ZoneInfo(tz))
    if dt.minute or dt.second or dt.microsecond:
        dt = dt.replace(minute=0, second=0, microsecond=0) + timedelta(hours=1)
    return int(dt.timestamp() * 1000)


def _intersects_any(start: int, end: int, ranges) -> bool:
    return any(start < hi and end > lo for lo, hi in ranges)


def _state_of(sleep: SleepSchedule, start: int, end: int) -> str:
    # Majority-overlap rule: >= 50% of the window inside a sleep interval.
    return "asleep" if sleep.overlap_ms(start, end) * 2 >= (end - start) else "awake"


def segment_windows(subject: ParsedSubject, exclusions=()) -> SegmentedStreams:
    """Cut streams into grid-aligned valid windows tagged awake/asleep.

    The grid starts at the subject's first full local-time hour; motion
    windows are 10 minutes, HRV windows 1 hour, both clock-aligned and
    disjoint.  Windows intersecting an exclusion range are dropped.
    """
    span = subject.stream_span()
    counts = {
        f"# {kind} ({state})": 0
        for kind in ("10 min. mov", "1 hour HRV")
        for state in ("awake", "sleep")
    }
    if span is None:
        return SegmentedStreams([], [], counts)
    origin = first_full_hour(span[0], subject.timezone)
    last = span[1]

    exclusions = [(int(lo), int(hi)) for lo, hi in exclusions]
    motion_windows = []
    rr_windows = []

    for sensor, t, xyz in (
        ("acc", subject.acc_t, subject.acc_xyz),
        ("gyr", subject.gyr_t, subject.gyr_xyz),
    ):
        if t.size == 0:
            continue
        ws = origin
        while ws <= last:
            we = ws + MOTION_WINDOW_MS
            lo, hi = np.searchsorted(t, [ws, we])
            if hi - lo >= COVERAGE_FRACTION * MOTION_EXPECTED_COUNT and not _intersects_any(ws, we, exclusions):
                win = MotionWindow(sensor=sensor, t_ms=t[lo:hi], xyz=xyz[lo:hi], window_start=ws)
                state = _state_of(subject.sleep, ws, we)
                motion_windows.append((win, state))
                if sensor == "acc":
                    counts[f"# 10 min. mov ({'sleep' if state == 'asleep' else 'awake'})"] += 1
            ws = we

    if subject.rr_t.size:
        ws = origin
        while ws <= last:
            we = ws + HRV_WINDOW_MS
            if not _intersects_any(ws, we, exclusions):
                lo, hi = np.searchsorted(subject.rr_t, [ws, we])
                series = validate_rr_window(subject.rr_t[lo:hi], subject.rr_ms[lo:hi], ws, we)
                if not isinstance(series, InvalidWindow):
                    state = _state_of(subject.sleep, ws, we)
                    rr_windows.append((series, state))
                    counts[f"# 1 hour HRV ({'sleep' if state == 'asleep' else 'awake'})"] += 1
            ws = we

    return SegmentedStreams(motion_windows, rr_windows, counts)
