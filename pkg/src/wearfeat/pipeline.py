"""End-to-end orchestration: ingestion -> features -> aggregation -> stats.

Per-subject extraction is pure given (subject directory, config) and
writes one feature CSV plus one metadata sidecar, so subjects can be
processed in any order or in parallel with byte-identical results.
"""

from __future__ import annotations

import json
import logging
import math
from datetime import date, datetime, timedelta
from pathlib import Path
from zoneinfo import ZoneInfo

from . import aggregate, linear, nonlinear
from .errors import ConfigError, DegenerateSeriesError
from .ingest import parse_subject_dir, segment_windows
from .stats import boxplot_data, render_csv, render_markdown, run_comparisons
from .types import FeatureRecord

logger = logging.getLogger(__name__)

DEFAULT_FEATURE_PARAMS = {
    "sampen_m": 2,
    "sampen_r_factor": 0.2,
    "higuchi_kmax": 10,
    "mfd_scales": 32,
    "ls_oversample": 4,
}


def load_config(path) -> dict:
    """Load and validate a run configuration file.

    Validation happens before any data is touched, so malformed entries
    (e.g. a bad exclusion date) fail fast.
    """
    path = Path(path)
    try:
        cfg = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    if "subjects" not in cfg and "data_dir" not in cfg:
        raise ConfigError("config needs 'subjects' or 'data_dir'")
    for rng in cfg.get("exclusions", []):
        if len(rng) != 2:
            raise ConfigError(f"exclusion range must be [start, end]: {rng!r}")
        try:
            lo, hi = (date.fromisoformat(d) for d in rng)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad exclusion date in {rng!r}: {exc}") from None
        if hi < lo:
            raise ConfigError(f"exclusion range reversed: {rng!r}")
    feats = dict(DEFAULT_FEATURE_PARAMS)
    feats.update(cfg.get("features", {}))
    unknown = set(feats) - set(DEFAULT_FEATURE_PARAMS)
    if unknown:
        raise ConfigError(f"unknown feature parameters: {sorted(unknown)}")
    cfg["features"] = feats
    return cfg


def subject_dirs(cfg: dict) -> list:
    if "subjects" in cfg:
        dirs = [Path(p) for p in cfg["subjects"]]
    else:
        root = Path(cfg["data_dir"])
        dirs = sorted(p for p in root.iterdir() if (p / "manifest.json").exists())
    if not dirs:
        raise ConfigError("no subject directories found")
    return dirs


def exclusion_ranges_ms(cfg: dict, tz: str) -> list:
    """Exclusion date ranges as [start, end) ms in the subject's timezone."""
    zone = ZoneInfo(tz)
    out = []
    for lo, hi in cfg.get("exclusions", []):
        start = datetime.combine(date.fromisoformat(lo), datetime.min.time(), zone)
        end = datetime.combine(date.fromisoformat(hi) + timedelta(days=1),
                               datetime.min.time(), zone)
        out.append((int(start.timestamp() * 1000), int(end.timestamp() * 1000)))
    return out


def _rr_window_records(subject_id, series, state, params):
    """Feature records for one valid HRV window; degenerate features skipped."""
    records = []
    x = series.intervals
    ws = series.window_start

    def emit(name, value):
        if value is not None and math.isfinite(value):
            records.append(FeatureRecord(subject_id=subject_id, feature_name=name,
                                         window_start=ws, state=state, value=value))

    try:
        emit("sampen", nonlinear.sample_entropy(x, m=params["sampen_m"],
                                                r=params["sampen_r_factor"] * float(x.std())))
        emit("higuchi", nonlinear.higuchi_fd(x, kmax=params["higuchi_kmax"]))
        profile = nonlinear.mfd_profile(x, max_scale=params["mfd_scales"])
        mfd = nonlinear.mfd_summaries(profile)
        emit("mfd_fd1", mfd["fd1"])
        emit("mfd_min", mfd["min"])
        emit("mfd_max", mfd["max"])
        emit("mfd_mean", mfd["mean"])
        emit("mfd_std", mfd["std"])
        pc = nonlinear.poincare(x)
        emit("sd1", pc["sd1"])
        emit("sd2", pc["sd2"])
        freqs, power = linear.hrv_periodogram(series, oversample=params["ls_oversample"])
        bp = linear.band_powers(freqs, power)
        emit("lf_power", bp.lf_norm)
        emit("hf_power", bp.hf_norm)
        emit("lf_hf_ratio", bp.lf_hf_ratio)
    except DegenerateSeriesError as exc:
        logger.warning("%s window %d: degenerate HRV series (%s)", subject_id, ws, exc)
    return records


def extract_subject(subject_dir, cfg: dict, out_dir, force: bool = False) -> dict:
    """Extract all features of one subject; returns window counts.

    Writes <out>/features/<subject_id>.csv and a metadata sidecar.
    Cached outputs are reused unless force is set.
    """
    out_dir = Path(out_dir)
    feat_dir = out_dir / "features"
    feat_dir.mkdir(parents=True, exist_ok=True)

    subject = parse_subject_dir(subject_dir)
    sid = subject.subject_id
    csv_path = feat_dir / f"{sid}.csv"
    meta_path = feat_dir / f"{sid}.meta.json"
    if not force and csv_path.exists() and meta_path.exists():
        meta = json.loads(meta_path.read_text())
        meta["cached"] = True
        return meta

    params = cfg["features"]
    exclusions = exclusion_ranges_ms(cfg, subject.timezone)
    segmented = segment_windows(subject, exclusions)

    records = []
    for win, state in segmented.motion_windows:
        name = "acc_STE" if win.sensor == "acc" else "gyr_STE"
        records.append(FeatureRecord(
            subject_id=sid, feature_name=name, window_start=win.window_start,
            state=state, value=linear.short_time_energy(win)))
    for series, state in segmented.rr_windows:
        records.extend(_rr_window_records(sid, series, state, params))

    daily = aggregate.daily_stats(segmented.motion_windows, subject.sleep,
                                  subject.steps, subject.timezone)

    records.sort(key=lambda r: (r.feature_name, r.window_start, r.state))
    aggregate.write_feature_records(records, csv_path)
    meta = {
        "subject_id": sid,
        "group": subject.group,
        "counts": segmented.counts,
        "daily": vars(daily),
        "n_records": len(records),
        "cached": False,
    }
    meta_path.write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    return meta


def collect_summaries(out_dir):
    """Rebuild SubjectSummary objects from the extraction outputs."""
    from .types import DailyStats

    feat_dir = Path(out_dir) / "features"
    metas = sorted(feat_dir.glob("*.meta.json"))
    if not metas:
        raise ConfigError(f"no extraction outputs under {feat_dir}")
    summaries = []
    missing = []
    for meta_path in metas:
        meta = json.loads(meta_path.read_text())
        sid = meta["subject_id"]
        csv_path = feat_dir / f"{sid}.csv"
        if not csv_path.exists():
            missing.append(sid)
            continue
        records = aggregate.read_feature_records(csv_path)
        daily = DailyStats(**meta["daily"])
        summaries.append(aggregate.summarize_subject(records, sid, meta["group"],
                                                     daily=daily))
    if missing:
        raise ConfigError(f"missing feature files for subjects: {missing}")
    return summaries


def write_reports(summaries, out_dir) -> dict:
    """Emit report.md, report.csv and boxplot.json; returns the results."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    results = run_comparisons(summaries)
    (out_dir / "report.md").write_text(render_markdown(results))
    (out_dir / "report.csv").write_text(render_csv(results))
    (out_dir / "boxplot.json").write_text(
        json.dumps(boxplot_data(summaries), indent=2, sort_keys=True) + "\n")
    return {"n_tests": len(results),
            "n_significant": sum(1 for r in results if r.significant)}
