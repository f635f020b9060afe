"""Group comparison statistics and report tables.

Each per-subject summary value (feature family x statistic x state) is
compared between controls and patients with a two-tailed Mann-Whitney U
test; p-values are adjusted with the Benjamini-Hochberg step-up procedure
separately within each state family (awake, asleep, daily).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.special import erfc
from scipy.stats import rankdata

from .errors import ConfigError, DegenerateSeriesError
from .types import FEATURE_NAMES, STATES, SubjectSummary

ALPHA = 0.05

# Largest group size for which the exact U distribution is used
# (tie-free samples only); beyond that the normal approximation with
# tie-corrected variance and continuity correction is standard.
EXACT_MAX_N = 8


@lru_cache(maxsize=None)
def _u_counts(n: int, m: int) -> tuple:
    """Number of rank arrangements giving each U value, u = 0..n*m."""
    if n == 0 or m == 0:
        return (1,)
    a = _u_counts(n - 1, m)
    b = _u_counts(n, m - 1)
    out = [0] * (n * m + 1)
    for u, c in enumerate(a):
        out[u + m] += c
    for u, c in enumerate(b):
        out[u] += c
    return tuple(out)


def _exact_two_tailed_p(u: int, n: int, m: int) -> float:
    counts = _u_counts(n, m)
    total = math.comb(n + m, n)
    lower = sum(counts[: u + 1])
    upper = sum(counts[u:])
    return min(1.0, 2.0 * min(lower, upper) / total)


def mann_whitney_u(a, b):
    """Two-tailed Mann-Whitney U test.

    Uses the exact U distribution when both samples have at most 8 values
    and no ties are present; otherwise a normal approximation with
    midrank tie-corrected variance and continuity correction.

    Returns (U, p) where U is the statistic of the first sample.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    n, m = a.size, b.size
    if n < 2 or m < 2:
        raise DegenerateSeriesError("each sample needs at least 2 values")

    pooled = np.concatenate((a, b))
    ranks = rankdata(pooled)
    u_a = float(ranks[:n].sum() - n * (n + 1) / 2.0)
    has_ties = np.unique(pooled).size < pooled.size

    if not has_ties and min(n, m) <= EXACT_MAX_N:
        return u_a, _exact_two_tailed_p(int(round(u_a)), n, m)

    mu = n * m / 2.0
    nm = n + m
    _, tie_sizes = np.unique(pooled, return_counts=True)
    tie_term = float(((tie_sizes**3 - tie_sizes)).sum()) / (nm * (nm - 1))
    var = n * m / 12.0 * ((nm + 1) - tie_term)
    if var <= 0.0:
        return u_a, 1.0  # all values identical
    z = max(0.0, abs(u_a - mu) - 0.5) / math.sqrt(var)
    return u_a, float(min(1.0, erfc(z / math.sqrt(2.0))))


def benjamini_hochberg(p_values):
    """BH step-up adjusted p-values, returned in the input order.

    adjusted p_(i) = min over j >= i of (m/j) * p_(j), clamped to 1.
    """
    p = np.asarray(p_values, dtype=np.float64)
    if p.size == 0:
        return p.copy()
    if np.any((p < 0.0) | (p > 1.0)) or np.any(np.isnan(p)):
        raise ValueError("p-values must lie in [0, 1]")
    m = p.size
    order = np.argsort(p, kind="stable")
    scaled = p[order] * m / np.arange(1, m + 1)
    adjusted = np.minimum.accumulate(scaled[::-1])[::-1]
    adjusted = np.minimum(adjusted, 1.0)
    out = np.empty(m)
    out[order] = adjusted
    return out


def boxplot_stats(sample) -> dict:
    """Median, quartiles, 1.5*IQR whiskers, and outliers of a sample.

    Quartiles use linear interpolation between order statistics; whiskers
    sit on the most extreme data points within 1.5*IQR of the quartiles.
    """
    x = np.sort(np.asarray(sample, dtype=np.float64))
    if x.size == 0:
        raise ValueError("sample must be non-empty")
    q1, med, q3 = np.percentile(x, [25.0, 50.0, 75.0])
    iqr = q3 - q1
    lo_fence = q1 - 1.5 * iqr
    hi_fence = q3 + 1.5 * iqr
    inside = x[(x >= lo_fence) & (x <= hi_fence)]
    return {
        "median": float(med),
        "q1": float(q1),
        "q3": float(q3),
        "whisker_lo": float(inside[0]),
        "whisker_hi": float(inside[-1]),
        "outliers": [float(v) for v in x[(x < lo_fence) | (x > hi_fence)]],
    }


@dataclass(frozen=True)
class TestResult:
    """Group comparison for one feature x statistic x state."""

    feature: str  # e.g. "acc_STE std" or "sleep_wake_ratio mean"
    state: str  # "awake" | "asleep" | "daily"
    control_median: float
    control_iqr: float
    patient_median: float
    patient_iqr: float
    u_statistic: float
    p_raw: float
    p_adjusted: float
    significant: bool
    n_control: int
    n_patient: int
    skipped: bool = False

    def __post_init__(self):
        if not self.skipped:
            if self.p_adjusted < self.p_raw - 1e-12:
                raise ValueError("adjusted p must not undercut raw p")
            if self.significant != (self.p_adjusted < ALPHA):
                raise ValueError("significance flag inconsistent with p_adjusted")


def _collect_samples(summaries):
    """Per-comparison value vectors: [(label, state, {group: values})]."""
    out = []
    for state in STATES:
        for name in FEATURE_NAMES:
            for stat in ("mean", "std"):
                by_group = {"control": [], "patient": []}
                for s in summaries:
                    fs = s.features.get((name, state))
                    if fs is None:
                        continue
                    v = fs.mean if stat == "mean" else fs.std
                    if math.isfinite(v):
                        by_group[s.group].append(v)
                out.append((f"{name} {stat}", state, by_group))
    for label, attr in (
        ("sleep_wake_ratio mean", "sleep_wake_ratio_mean"),
        ("sleep_wake_ratio std", "sleep_wake_ratio_std"),
        ("steps_per_day mean", "steps_per_day_mean"),
        ("steps_per_day std", "steps_per_day_std"),
    ):
        by_group = {"control": [], "patient": []}
        for s in summaries:
            if s.daily is None or not s.daily.eligible:
                continue
            v = getattr(s.daily, attr)
            if math.isfinite(v):
                by_group[s.group].append(v)
        out.append((label, "daily", by_group))
    return out


def run_comparisons(summaries, alpha: float = ALPHA):
    """Mann-Whitney comparisons over all summary values with BH per state.

    Comparisons where either group has fewer than 2 non-missing values are
    returned flagged as skipped and excluded from the BH family.
    """
    summaries = list(summaries)
    for g in ("control", "patient"):
        if sum(1 for s in summaries if s.group == g) < 2:
            raise ConfigError(f"need at least 2 subjects in group {g!r}")

    tested = []  # (label, state, groups, u, p)
    skipped = []
    for label, state, groups in _collect_samples(summaries):
        a, b = groups["control"], groups["patient"]
        if len(a) < 2 or len(b) < 2:
            skipped.append((label, state, groups))
            continue
        u, p = mann_whitney_u(a, b)
        tested.append((label, state, groups, u, p))

    adjusted = {}
    for fam_state in ("awake", "asleep", "daily"):
        fam = [t for t in tested if t[1] == fam_state]
        if not fam:
            continue
        adj = benjamini_hochberg([t[4] for t in fam])
        for t, pa in zip(fam, adj):
            adjusted[(t[0], t[1])] = pa

    results = []
    for label, state, groups, u, p in tested:
        pa = float(adjusted[(label, state)])
        cb = boxplot_stats(groups["control"])
        pb = boxplot_stats(groups["patient"])
        results.append(TestResult(
            feature=label,
            state=state,
            control_median=cb["median"],
            control_iqr=cb["q3"] - cb["q1"],
            patient_median=pb["median"],
            patient_iqr=pb["q3"] - pb["q1"],
            u_statistic=u,
            p_raw=p,
            p_adjusted=pa,
            significant=pa < alpha,
            n_control=len(groups["control"]),
            n_patient=len(groups["patient"]),
        ))
    for label, state, groups in skipped:
        results.append(TestResult(
            feature=label,
            state=state,
            control_median=math.nan,
            control_iqr=math.nan,
            patient_median=math.nan,
            patient_iqr=math.nan,
            u_statistic=math.nan,
            p_raw=math.nan,
            p_adjusted=math.nan,
            significant=False,
            n_control=len(groups["control"]),
            n_patient=len(groups["patient"]),
            skipped=True,
        ))
    return results


def _fmt(v: float) -> str:
    if not math.isfinite(v):
        return "-"
    return format(v, ".4g")


def median_iqr_cell(median: float, iqr: float) -> str:
    """Render a 'median (IQR)' table cell, e.g. '6.87 (1.24)'."""
    return f"{_fmt(median)} ({_fmt(iqr)})"


def render_markdown(results) -> str:
    """Markdown comparison table, one row per feature x statistic x state."""
    lines = [
        "| feature | state | controls | patients | p_raw | p_adjusted | significant |",
        "|---|---|---|---|---|---|---|",
    ]
    for r in results:
        lines.append(
            "| {} | {} | {} | {} | {} | {} | {} |".format(
                r.feature,
                r.state,
                median_iqr_cell(r.control_median, r.control_iqr),
                median_iqr_cell(r.patient_median, r.patient_iqr),
                _fmt(r.p_raw),
                _fmt(r.p_adjusted),
                "skipped" if r.skipped else ("yes" if r.significant else "no"),
            )
        )
    return "\n".join(lines) + "\n"


def render_csv(results) -> str:
    """CSV comparison table with the same columns as the Markdown report."""
    lines = ["feature,state,control_median_iqr,patient_median_iqr,p_raw,p_adjusted,significant"]
    for r in results:
        lines.append(
            '{},{},"{}","{}",{},{},{}'.format(
                r.feature,
                r.state,
                median_iqr_cell(r.control_median, r.control_iqr),
                median_iqr_cell(r.patient_median, r.patient_iqr),
                "" if math.isnan(r.p_raw) else repr(r.p_raw),
                "" if math.isnan(r.p_adjusted) else repr(r.p_adjusted),
                "skipped" if r.skipped else ("yes" if r.significant else "no"),
            )
        )
    return "\n".join(lines) + "\n"


def boxplot_data(summaries) -> list:
    """Per feature/state/group boxplot statistics for plotting."""
    out = []
    for label, state, groups in _collect_samples(summaries):
        for group in ("control", "patient"):
            values = groups[group]
            if not values:
                continue
            entry = {"feature": label, "state": state, "group": group}
            entry.update(boxplot_stats(values))
            out.append(entry)
    return out
