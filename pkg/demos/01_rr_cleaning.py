"""Cleaning a raw 5 Hz RR stream into a beat sequence.

The watch repeats the last RR value at every 200 ms tick until a new beat
is detected, occasionally reports artifacts outside the physiological
[300, 2000] ms range, and drops beats entirely.  This walkthrough builds
such a stream by hand and shows what each cleaning stage removes.

Run:  python demos/01_rr_cleaning.py
"""

import numpy as np

from wearfeat import clean_rr

rng = np.random.default_rng(1)

# --- build a raw stream: ~60 s of beats around 800 ms -----------------------
intervals = np.round(rng.normal(800.0, 25.0, size=75))
beat_t = np.cumsum(intervals) - intervals[0]

# device semantics: every 200 ms tick repeats the latest interval
ticks = np.arange(0, beat_t[-1] + 200, 200, dtype=np.int64)
idx = np.searchsorted(beat_t, ticks, side="right") - 1
values = intervals[np.clip(idx, 0, intervals.size - 1)].copy()

# inject two artifacts and a dropout
values[40] = 2500.0        # missed beat reported as one huge interval
values[41] = 150.0         # spurious too-short interval
keep = np.ones(ticks.size, dtype=bool)
keep[120:135] = False      # 3 s of dropped ticks
ticks, values = ticks[keep], values[keep]

print(f"raw stream: {ticks.size} ticks, "
      f"{np.sum(values[1:] == values[:-1])} duplicated reports, "
      f"range [{values.min():.0f}, {values.max():.0f}] ms")

# --- clean ------------------------------------------------------------------
beat_t_clean, iv_clean = clean_rr(ticks, values)

print(f"cleaned:    {iv_clean.size} beats, "
      f"range [{iv_clean.min():.0f}, {iv_clean.max():.0f}] ms")
print(f"cumulative time preserved: raw span {(ticks[-1] - ticks[0]) / 1000:.1f} s, "
      f"beat span {(beat_t_clean[-1] - beat_t_clean[0]) / 1000:.1f} s")

inserted = np.setdiff1d(np.round(iv_clean), np.round(intervals))
print(f"interpolated fill intervals: {inserted}")
