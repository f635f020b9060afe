"""Linear features: short-time energy and Lomb-Scargle spectral band powers."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import DegenerateSeriesError, InvalidWindowError
from .types import MotionWindow, RRSeries

LF_BAND = (0.04, 0.15)
HF_BAND = (0.15, 0.40)
GRID_FMIN = 0.003
GRID_FMAX = 0.40


def short_time_energy(window: MotionWindow) -> float:
    """Mean squared euclidean norm of the tri-axial signal in one window.

    The mean (rather than the sum) keeps windows with slightly different
    sample counts comparable.  Gravity is not removed, so awake/asleep
    contrasts of acc energy include posture effects.
    """
    if not window.is_valid:
        raise InvalidWindowError(
            f"window at {window.window_start} has {len(window)} samples, "
            f"needs >= {0.9 * window.expected_count:.0f}"
        )
    return float(np.mean(np.sum(window.xyz**2, axis=1)))


@njit(cache=True)
def _ls_power(n, c, s, cs, sn, inv_two_var):
    """Classic Lomb power from the four trig sums at one frequency."""
    wtau = 0.5 * math.atan2(sn, cs)
    coswt = math.cos(wtau)
    sinwt = math.sin(wtau)
    cterm = c * coswt + s * sinwt
    sterm = s * coswt - c * sinwt
    proj = cs * math.cos(2.0 * wtau) + sn * math.sin(2.0 * wtau)
    cc = 0.5 * (n + proj)
    ss = 0.5 * (n - proj)
    p = 0.0
    if cc > 1e-12:
        p += cterm * cterm / cc
    if ss > 1e-12:
        p += sterm * sterm / ss
    return p * inv_two_var


@njit(cache=True)
def _ls_direct(t, y, freqs, inv_two_var):
    n = t.shape[0]
    power = np.empty(freqs.shape[0])
    for k in range(freqs.shape[0]):
        w = 2.0 * math.pi * freqs[k]
        c = s = cs = sn = 0.0
        for j in range(n):
            cwt = math.cos(w * t[j])
            swt = math.sin(w * t[j])
            c += y[j] * cwt
            s += y[j] * swt
            cs += cwt * cwt - swt * swt
            sn += 2.0 * swt * cwt
        power[k] = _ls_power(n, c, s, cs, sn, inv_two_var)
    return power


@njit(cache=True)
def _ls_uniform_grid(t, y, w0, dw, nf, inv_two_var):
    """Evaluate on an evenly spaced grid via per-sample phase rotation.

    Avoids recomputing trig at every (frequency, sample) pair; the
    rotation accumulates O(nf * eps) rounding, far below tolerance.
    """
    n = t.shape[0]
    zr = np.cos(w0 * t)
    zi = np.sin(w0 * t)
    rot_r = np.cos(dw * t)
    rot_i = np.sin(dw * t)
    power = np.empty(nf)
    for k in range(nf):
        c = s = cs = sn = 0.0
        for j in range(n):
            a = zr[j]
            b = zi[j]
            c += y[j] * a
            s += y[j] * b
            cs += a * a - b * b
            sn += 2.0 * a * b
        power[k] = _ls_power(n, c, s, cs, sn, inv_two_var)
        if k + 1 < nf:
            for j in range(n):
                a = zr[j]
                b = zi[j]
                zr[j] = a * rot_r[j] - b * rot_i[j]
                zi[j] = a * rot_i[j] + b * rot_r[j]
    return power


def default_frequency_grid(span_seconds: float, oversample: int = 4,
                           fmin: float = GRID_FMIN, fmax: float = GRID_FMAX) -> np.ndarray:
    """Evenly spaced grid with spacing 1/(oversample * span)."""
    if span_seconds <= 0:
        raise ValueError("span must be positive")
    df = 1.0 / (oversample * span_seconds)
    # last grid point at or just beyond fmax so the HF band is covered
    n = int(math.ceil((fmax - fmin) / df)) + 1
    return fmin + df * np.arange(n)


def lomb_scargle(t, y, freqs):
    """Classic normalized Lomb-Scargle periodogram.

    Parameters
    ----------
    t : array-like
        Sample times in seconds (need not be uniform).
    y : array-like
        Sample values; the mean is removed before evaluation.
    freqs : array-like
        Frequencies in Hz at which to evaluate.

    Returns
    -------
    power : ndarray
        Periodogram normalized by twice the sample variance.
    """
    t = np.ascontiguousarray(t, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.float64)
    freqs = np.ascontiguousarray(freqs, dtype=np.float64)
    if t.shape != y.shape:
        raise ValueError("t and y must align")
    if t.size < 2:
        raise DegenerateSeriesError("need at least 2 samples")
    var = float(np.var(y, ddof=1))
    if var <= 0.0:
        raise DegenerateSeriesError("series variance is zero")
    yc = y - y.mean()
    inv_two_var = 1.0 / (2.0 * var)

    if freqs.size >= 3:
        df = np.diff(freqs)
        if np.allclose(df, df[0], rtol=1e-12, atol=1e-15):
            w0 = 2.0 * math.pi * freqs[0]
            dw = 2.0 * math.pi * df[0]
            return _ls_uniform_grid(t, yc, w0, dw, freqs.size, inv_two_var)
    return _ls_direct(t, yc, freqs, inv_two_var)


def hrv_periodogram(rr: RRSeries, oversample: int = 4):
    """Lomb-Scargle periodogram of the interval series of one HRV window.

    Uses beat times as abscissae and a grid covering 0.003-0.40 Hz.
    Returns (freqs, power).
    """
    span = float(rr.beat_times[-1] - rr.beat_times[0])
    freqs = default_frequency_grid(span, oversample=oversample)
    power = lomb_scargle(rr.beat_times, rr.intervals, freqs)
    return freqs, power


@dataclass(frozen=True)
class BandPowers:
    """Relative and normalized spectral power in the LF and HF bands."""

    lf_rel: float
    hf_rel: float
    lf_norm: float
    hf_norm: float
    lf_hf_ratio: float


def _band_integral(freqs: np.ndarray, power: np.ndarray, lo: float, hi: float) -> float:
    """Trapezoidal integral of the periodogram over [lo, hi].

    Band edges rarely fall on grid points, so the power there is linearly
    interpolated and included as integration nodes.
    """
    inside = (freqs > lo) & (freqs < hi)
    xs = np.concatenate(([lo], freqs[inside], [hi]))
    ys = np.concatenate((
        [np.interp(lo, freqs, power)],
        power[inside],
        [np.interp(hi, freqs, power)],
    ))
    return float(np.trapezoid(ys, xs))


def band_powers(freqs, power) -> BandPowers:
    """LF/HF band powers of a periodogram covering both bands."""
    freqs = np.asarray(freqs, dtype=np.float64)
    power = np.asarray(power, dtype=np.float64)
    if freqs[0] > LF_BAND[0] or freqs[-1] < HF_BAND[1]:
        raise ValueError("periodogram grid does not cover the LF and HF bands")
    total = float(np.trapezoid(power, freqs))
    lf = _band_integral(freqs, power, *LF_BAND)
    hf = _band_integral(freqs, power, *HF_BAND)
    if total <= 0.0 or lf + hf <= 0.0:
        raise DegenerateSeriesError("periodogram carries no power")
    return BandPowers(
        lf_rel=lf / total,
        hf_rel=hf / total,
        lf_norm=lf / (lf + hf),
        hf_norm=hf / (lf + hf),
        lf_hf_ratio=lf / hf if hf > 0.0 else math.inf,
    )
