"""RR-interval stream cleaning.

The watch reports an RR value at 5 Hz and repeats the last obtained value
until a new beat is detected, so a raw stream contains runs of duplicated
intervals, occasional artifacts outside the physiological range, and gaps
where pulses were not detected.  Cleaning proceeds in three stages:

1. collapse runs of identical consecutive values to their first occurrence,
2. remove intervals outside [300, 2000] ms,
3. fill the time gaps left by removals (and by implied missed beats) with
   linearly interpolated beats so that cumulative time is preserved.
"""

from __future__ import annotations

import numpy as np

RR_MIN_MS = 300.0
RR_MAX_MS = 2000.0

# Gaps shorter than one valid beat are treated as timestamp jitter
# (5 Hz ticks quantize arrival times by up to 200 ms).
_MIN_FILL_GAP_MS = RR_MIN_MS


def _fill_values(a: float, b: float, gap: float) -> np.ndarray:
    """Interpolated interval values bridging a gap between beats a and b."""
    k_lo = int(np.ceil(gap / RR_MAX_MS))
    k_hi = int(np.floor(gap / RR_MIN_MS))
    if k_hi < 1:
        return np.empty(0)
    k = int(round(gap / ((a + b) / 2.0)))
    k = min(max(k, k_lo, 1), k_hi)
    vals = np.linspace(a, b, k + 2)[1:-1]
    vals = vals * (gap / vals.sum())
    if vals.min() < RR_MIN_MS or vals.max() > RR_MAX_MS:
        # Rescaled ramp escaped the valid range; fall back to equal spacing.
        vals = np.full(k, gap / k)
    return vals


def clean_rr(t_ms, rr_ms):
    """Clean a raw 5 Hz RR stream into a beat sequence.

    Parameters
    ----------
    t_ms : array-like
        Sample timestamps, milliseconds since epoch, sorted ascending.
    rr_ms : array-like
        Reported RR interval at each timestamp, milliseconds.

    Returns
    -------
    beat_t_ms, intervals_ms : ndarray
        Beat times (ms since epoch, the time each interval *ends*) and the
        interval lengths, all within [300, 2000] ms.  Empty arrays when
        fewer than two valid beats remain.
    """
    t = np.asarray(t_ms, dtype=np.float64)
    rr = np.asarray(rr_ms, dtype=np.float64)
    if t.shape != rr.shape:
        raise ValueError("t_ms and rr_ms must have the same shape")
    if t.size == 0:
        return np.empty(0), np.empty(0)

    keep = np.empty(t.size, dtype=bool)
    keep[0] = True
    keep[1:] = rr[1:] != rr[:-1]
    t, rr = t[keep], rr[keep]

    in_range = (rr >= RR_MIN_MS) & (rr <= RR_MAX_MS)
    t, rr = t[in_range], rr[in_range]
    if t.size < 2:
        return np.empty(0), np.empty(0)

    # Fill gaps where removed artifacts / missed beats left elapsed time
    # unaccounted for between consecutive kept beats.
    gaps = np.diff(t) - rr[1:]
    fill_at = np.nonzero(gaps >= _MIN_FILL_GAP_MS)[0]

    pieces = []
    prev = 0
    for i in fill_at:
        pieces.append(rr[prev : i + 1])
        pieces.append(_fill_values(rr[i], rr[i + 1], gaps[i]))
        prev = i + 1
    pieces.append(rr[prev:])
    intervals = np.concatenate(pieces)

    beat_t = t[0] + np.cumsum(intervals) - intervals[0]
    return beat_t, intervals
