"""Nonlinear HRV complexity measures.

All functions operate on the interval sequence (tachogram) indexed by
beat number, are deterministic, and are invariant to adding a constant
to every sample.

References
----------
Richman & Moorman (2000), Am J Physiol 278: sample entropy.
Higuchi (1988), Physica D 31: fractal dimension from curve lengths.
Maragos & Sun (1993), IEEE Trans Signal Process 41: multiscale fractal
dimension via morphological covers.
Brennan et al. (2001), IEEE Trans Biomed Eng 48: Poincare SD1/SD2.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from numba import njit
from scipy.ndimage import maximum_filter1d, minimum_filter1d

from .errors import DegenerateSeriesError


@njit(cache=True)
def _sampen_counts(x, m, r):
    """Count template matches of length m (B) and m+1 (A).

    Pairs i < j over the first n - m templates, Chebyshev distance <= r,
    self-matches excluded.  Kept as an exact integer count so it can be
    compared bit-for-bit against a brute-force reference.
    """
    n = x.shape[0]
    nt = n - m  # templates considered at both lengths
    a = 0
    b = 0
    for i in range(nt - 1):
        for j in range(i + 1, nt):
            match = True
            for k in range(m):
                if abs(x[i + k] - x[j + k]) > r:
                    match = False
                    break
            if match:
                b += 1
                if abs(x[i + m] - x[j + m]) <= r:
                    a += 1
    return a, b


def sample_entropy(x, m: int = 2, r: float | None = None) -> float:
    """Sample entropy of a series: -ln(A/B).

    B counts pairs of m-length templates within Chebyshev distance r
    (self-matches excluded), A counts (m+1)-length matches over the same
    template set.  By default r = 0.2 * std(x), the field-standard rule,
    which makes the result amplitude-invariant.

    Returns +inf when no (m+1)-length match exists.
    """
    x = np.ascontiguousarray(x, dtype=np.float64)
    if x.size <= m + 1:
        raise ValueError(f"need more than m+1={m + 1} samples, got {x.size}")
    if r is None:
        sd = float(np.std(x))
        if sd <= 0.0:
            raise DegenerateSeriesError("series has zero variance")
        r = 0.2 * sd
    a, b = _sampen_counts(x, m, float(r))
    if b == 0 or a == 0:
        return float("inf")
    return float(-np.log(a / b))


def higuchi_fd(x, kmax: int = 10) -> float:
    """Higuchi fractal dimension from multiscale curve lengths.

    Builds the normalized curve lengths L(k) for k = 1..kmax and returns
    the slope of the least-squares fit of ln L(k) against ln(1/k),
    clamped to [1, 2].
    """
    x = np.asarray(x, dtype=np.float64)
    n = x.size
    if n < 10 * kmax:
        raise ValueError(f"need at least 10*kmax={10 * kmax} samples, got {n}")
    if np.ptp(x) == 0.0:
        raise DegenerateSeriesError("constant series has no curve length")

    lk = np.empty(kmax)
    for k in range(1, kmax + 1):
        lengths = []
        for m in range(k):
            sub = x[m::k]
            q = sub.size - 1
            if q < 1:
                continue
            lm = np.abs(np.diff(sub)).sum() * (n - 1) / (q * k) / k
            lengths.append(lm)
        lk[k - 1] = np.mean(lengths)
    if np.any(lk <= 0.0):
        raise DegenerateSeriesError("zero curve length at some scale")

    slope = np.polyfit(np.log(1.0 / np.arange(1, kmax + 1)), np.log(lk), 1)[0]
    if slope < 1.0 - 1e-6 or slope > 2.0 + 1e-6:
        warnings.warn(f"Higuchi slope {slope:.4f} outside [1, 2], clamping")
    return float(min(max(slope, 1.0), 2.0))


@dataclass(frozen=True)
class MFDProfile:
    """Local fractal dimension per morphological cover scale."""

    scales: np.ndarray  # 1..max_scale
    local_fd: np.ndarray  # nominally within [1, 2]

    def __post_init__(self):
        s = np.array(self.scales, dtype=np.int64)
        f = np.array(self.local_fd, dtype=np.float64)
        object.__setattr__(self, "scales", s)
        object.__setattr__(self, "local_fd", f)
        s.setflags(write=False)
        f.setflags(write=False)
        if s.shape != f.shape:
            raise ValueError("scales and local_fd must align")

    def __len__(self) -> int:
        return int(self.scales.size)

    def __eq__(self, other) -> bool:
        if not isinstance(other, MFDProfile):
            return NotImplemented
        return np.array_equal(self.scales, other.scales) and np.array_equal(
            self.local_fd, other.local_fd
        )


def mfd_profile(x, max_scale: int = 32) -> MFDProfile:
    """Multiscale fractal dimension profile via morphological covers.

    The graph of x is dilated/eroded with a flat 3-sample structuring
    element, iterated s times to reach scale s; the cover area is
    A(s) = sum(dilation - erosion).  The local dimension at scale s is
    2 minus the slope of ln A over ln scale on a 3-point neighborhood
    centered at s (one-sided at the ends), clamped to [1, 2].
    """
    x = np.asarray(x, dtype=np.float64)
    if x.size < 4 * max_scale:
        raise ValueError(f"need at least 4*max_scale={4 * max_scale} samples, got {x.size}")
    if np.ptp(x) == 0.0:
        raise DegenerateSeriesError("constant series has zero cover area")

    areas = np.empty(max_scale)
    upper = x.copy()
    lower = x.copy()
    for s in range(1, max_scale + 1):
        upper = maximum_filter1d(upper, size=3, mode="nearest")
        lower = minimum_filter1d(lower, size=3, mode="nearest")
        areas[s - 1] = (upper - lower).sum()
    if np.any(areas <= 0.0):
        raise DegenerateSeriesError("zero cover area at some scale")

    log_s = np.log(np.arange(1, max_scale + 1, dtype=np.float64))
    log_a = np.log(areas)
    local_fd = np.empty(max_scale)
    for i in range(max_scale):
        lo = min(max(i - 1, 0), max_scale - 3)
        sl = slice(lo, lo + 3)
        slope = np.polyfit(log_s[sl], log_a[sl], 1)[0]
        local_fd[i] = min(max(2.0 - slope, 1.0), 2.0)
    return MFDProfile(scales=np.arange(1, max_scale + 1), local_fd=local_fd)


def mfd_summaries(profile: MFDProfile) -> dict:
    """fd at scale 1 plus elementary statistics of the local-FD vector."""
    if len(profile) == 0:
        raise ValueError("empty profile")
    fd = profile.local_fd
    return {
        "fd1": float(fd[0]),
        "min": float(fd.min()),
        "max": float(fd.max()),
        "mean": float(fd.mean()),
        "std": float(fd.std()),
    }


def poincare(x) -> dict:
    """Poincare plot dispersions SD1 (short-term) and SD2 (long-term).

    Computed from the variance identities rather than a geometric ellipse
    fit, which is equivalent and deterministic:
    sd1^2 = var(diff)/2, sd2^2 = 2 var(x) - var(diff)/2.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.size < 2:
        raise ValueError("need at least 2 samples")
    d = np.diff(x)
    half_vd = np.var(d) / 2.0
    sd1 = float(np.sqrt(half_vd))
    rad = 2.0 * np.var(x) - half_vd
    if rad < 0.0:
        warnings.warn("negative SD2 radicand, clamping to 0")
        rad = 0.0
    return {"sd1": sd1, "sd2": float(np.sqrt(rad))}
