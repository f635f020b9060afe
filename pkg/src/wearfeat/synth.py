"""Synthetic two-cohort dataset generator.

Writes subject directories in the ingestion file layout, with
controllable ground-truth differences between the control and patient
groups.  RR streams follow the 5 Hz device semantics (the last value is
repeated until a new beat occurs) so the cleaning path is exercised;
motion is piecewise-stationary Gaussian noise with per-window energy
targets.  Output is bit-identical for a given (spec, seed): per-subject
randomness derives from (seed, subject index), so parallel generation
cannot change the result.
"""

from __future__ import annotations

import json
from datetime import date, datetime, timedelta
from pathlib import Path
from zoneinfo import ZoneInfo

import numpy as np
import pandas as pd

from .errors import ConfigError

MOTION_DT_MS = 50  # 20 Hz
RR_TICK_MS = 200  # 5 Hz

DEFAULT_SPEC = {
    "n_control": 2,
    "n_patient": 2,
    "days": 3,
    "timezone": "Europe/Athens",
    "start_date": "2021-06-07",
    "schedule": {
        "sleep_start_hour": 23,
        "sleep_duration_hours": 8,
        "awake_hrv_hours": [12],
        "asleep_hrv_hours": [2],
        "awake_motion_hour": 12,
        "asleep_motion_hour": 3,
        "motion_minutes": 10,
        "hrv_alternate_days": False,
    },
    "groups": {
        "control": {
            "rr": {
                "mean_ms": 850.0,
                "lf_amp_ms": 30.0,
                "hf_amp_ms": 20.0,
                "noise_ms": 25.0,
                "noise_jitter": 0.1,
                "ar_coeff": 0.8,
            },
            "motion": {
                "awake_ste_mean": 6.5,
                "awake_ste_between_std": 1.0,
                "asleep_ste_mean": 0.65,
                "asleep_ste_between_std": 0.2,
                "gyr_ste_factor": 600.0,
            },
            "steps_per_awake_bucket": 80.0,
        },
        "patient": {},  # defaults to control parameters
    },
    "artifacts": {
        "rr_outlier_rate": 0.0,
        "dropout_rate": 0.0,
    },
}


def _deep_merge(base: dict, override: dict) -> dict:
    out = dict(base)
    for k, v in override.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _deep_merge(out[k], v)
        else:
            out[k] = v
    return out


def validate_spec(spec: dict) -> dict:
    """Fill defaults and reject impossible parameter combinations."""
    full = _deep_merge(DEFAULT_SPEC, spec or {})
    full["groups"]["control"] = _deep_merge(
        DEFAULT_SPEC["groups"]["control"], (spec or {}).get("groups", {}).get("control", {})
    )
    full["groups"]["patient"] = _deep_merge(
        full["groups"]["control"], (spec or {}).get("groups", {}).get("patient", {})
    )

    if full["n_control"] < 1 or full["n_patient"] < 1:
        raise ConfigError("group sizes must be positive")
    if full["days"] < 1:
        raise ConfigError("days must be positive")
    sched = full["schedule"]
    if not 0 < sched["sleep_duration_hours"] < 24:
        raise ConfigError("sleep duration must lie in (0, 24) hours")
    if not 1 <= sched["motion_minutes"] <= 60:
        raise ConfigError("motion_minutes must lie in [1, 60]")
    for rate in full["artifacts"].values():
        if not 0.0 <= rate <= 0.5:
            raise ConfigError("artifact rates must lie in [0, 0.5]")
    for group in ("control", "patient"):
        rr = full["groups"][group]["rr"]
        if not 400.0 <= rr["mean_ms"] <= 1500.0:
            raise ConfigError("mean RR must lie in [400, 1500] ms")
        if rr["lf_amp_ms"] < 0 or rr["hf_amp_ms"] < 0 or rr["noise_ms"] < 0:
            raise ConfigError("RR amplitudes must be non-negative")
        if not 0.0 <= rr["ar_coeff"] < 1.0:
            raise ConfigError("AR coefficient must lie in [0, 1)")
        mo = full["groups"][group]["motion"]
        if mo["awake_ste_mean"] <= 0 or mo["asleep_ste_mean"] <= 0:
            raise ConfigError("motion energy targets must be positive")
    try:
        ZoneInfo(full["timezone"])
        date.fromisoformat(full["start_date"])
    except Exception as exc:
        raise ConfigError(f"bad timezone or start_date: {exc}") from None
    return full


def _local_ms(day: date, hour: int, zone: ZoneInfo) -> int:
    dt = datetime(day.year, day.month, day.day, tzinfo=zone) + timedelta(hours=hour)
    return int(dt.timestamp() * 1000)


def _simulate_rr_block(rng, rr_params, t0_ms: int, duration_ms: int, artifacts):
    """One block of 5 Hz RR reports with device duplication semantics."""
    mean = rr_params["mean_ms"]
    scale = rr_params["noise_ms"] * (1.0 + rr_params["noise_jitter"] * rng.uniform(-1.0, 1.0))
    ar = rr_params["ar_coeff"]
    phi_lf = rng.uniform(0.0, 2.0 * np.pi)
    phi_hf = rng.uniform(0.0, 2.0 * np.pi)

    beat_t = []
    intervals = []
    t = float(t0_ms)
    e = 0.0
    innov_sd = scale * np.sqrt(1.0 - ar * ar)
    while t < t0_ms + duration_ms + 2000:
        tau = (t - t0_ms) / 1000.0
        e = ar * e + innov_sd * rng.standard_normal()
        period = (
            mean
            + rr_params["lf_amp_ms"] * np.sin(2.0 * np.pi * 0.1 * tau + phi_lf)
            + rr_params["hf_amp_ms"] * np.sin(2.0 * np.pi * 0.25 * tau + phi_hf)
            + e
        )
        period = min(max(period, 350.0), 1900.0)
        t += period
        beat_t.append(t)
        intervals.append(period)
    beat_t = np.asarray(beat_t)
    intervals = np.asarray(intervals)

    ticks = np.arange(t0_ms, t0_ms + duration_ms, RR_TICK_MS, dtype=np.int64)
    idx = np.searchsorted(beat_t, ticks, side="right") - 1
    values = intervals[np.clip(idx, 0, intervals.size - 1)]
    values = np.round(values)  # devices report integer milliseconds

    out_rate = artifacts["rr_outlier_rate"]
    if out_rate > 0:
        mask = rng.random(ticks.size) < out_rate
        values = values.copy()
        values[mask] = rng.choice([150.0, 2500.0], size=int(mask.sum()))
    drop_rate = artifacts["dropout_rate"]
    if drop_rate > 0:
        keep = rng.random(ticks.size) >= drop_rate
        ticks, values = ticks[keep], values[keep]
    return ticks, values


def _motion_block(rng, motion, state: str, t0_ms: int, minutes: int, factor: float):
    """Tri-axial Gaussian samples with a per-10-minute energy target."""
    ts = []
    xyz = []
    truth = []
    for w in range(int(np.ceil(minutes / 10))):
        ws = t0_ms + w * 600_000
        n = min(minutes * 60 * 20 - w * 12000, 12000)
        if n <= 0:
            break
        target = max(0.01, rng.normal(
            motion[f"{state}_ste_mean"], motion[f"{state}_ste_between_std"]
        )) * factor
        sigma = np.sqrt(target / 3.0)
        v = rng.normal(0.0, sigma, size=(n, 3))
        t = ws + MOTION_DT_MS * np.arange(n, dtype=np.int64)
        ts.append(t)
        xyz.append(v)
        truth.append({
            "window_start_ms": int(ws),
            "state": "asleep" if state == "asleep" else "awake",
            "ste_target": float(target),
            "ste_sample": float(np.mean(np.sum(v * v, axis=1))),
        })
    return np.concatenate(ts), np.concatenate(xyz), truth


def generate_subject(spec: dict, seed: int, index: int, group: str, outdir: Path) -> Path:
    """Generate and write one subject directory; returns its path."""
    rng = np.random.default_rng(np.random.SeedSequence([int(seed), int(index)]))
    zone = ZoneInfo(spec["timezone"])
    start = date.fromisoformat(spec["start_date"])
    sched = spec["schedule"]
    params = spec["groups"][group]
    subject_id = f"{'ctrl' if group == 'control' else 'pat'}-{index:03d}"
    subj_dir = Path(outdir) / subject_id
    subj_dir.mkdir(parents=True, exist_ok=True)

    sleep_rows = []
    for d in range(-1, spec["days"]):
        s = _local_ms(start + timedelta(days=d), sched["sleep_start_hour"], zone)
        sleep_rows.append((s, s + int(sched["sleep_duration_hours"] * 3600_000)))

    rr_t, rr_v = [], []
    acc_t, acc_v = [], []
    gyr_t, gyr_v = [], []
    steps_rows = []
    truth = {"subject_id": subject_id, "group": group, "acc_windows": [],
             "gyr_windows": [], "rr_blocks": []}

    minutes = int(sched["motion_minutes"])
    for d in range(spec["days"]):
        day = start + timedelta(days=d)
        use_awake = not sched["hrv_alternate_days"] or d % 2 == 0
        use_asleep = not sched["hrv_alternate_days"] or d % 2 == 1

        hrv_blocks = []
        if use_awake:
            hrv_blocks += [(h, "awake") for h in sched["awake_hrv_hours"]]
        if use_asleep:
            hrv_blocks += [(h, "asleep") for h in sched["asleep_hrv_hours"]]
        for hour, state in sorted(hrv_blocks):
            t0 = _local_ms(day, hour, zone)
            ticks, values = _simulate_rr_block(rng, params["rr"], t0, 3600_000,
                                              spec["artifacts"])
            rr_t.append(ticks)
            rr_v.append(values)
            truth["rr_blocks"].append({"start_ms": t0, "state": state})

        for hour, state in ((sched["awake_motion_hour"], "awake"),
                            (sched["asleep_motion_hour"], "asleep")):
            t0 = _local_ms(day, hour, zone)
            t, v, wtruth = _motion_block(rng, params["motion"], state, t0, minutes, 1.0)
            acc_t.append(t)
            acc_v.append(v)
            truth["acc_windows"].extend(wtruth)
            t, v, wtruth = _motion_block(rng, params["motion"], state, t0, minutes,
                                         params["motion"]["gyr_ste_factor"])
            gyr_t.append(t)
            gyr_v.append(v)
            truth["gyr_windows"].extend(wtruth)

            # step buckets covering the motion block
            lam = params["steps_per_awake_bucket"] if state == "awake" else 0.0
            for w in range(int(np.ceil(minutes / 10))):
                bucket = t0 + w * 600_000
                steps_rows.append((bucket, int(rng.poisson(lam)) if lam > 0 else 0))

    def cat(parts):
        return np.concatenate(parts) if parts else np.empty(0)

    rr_t, rr_v = cat(rr_t), cat(rr_v)
    order = np.argsort(rr_t, kind="stable")
    pd.DataFrame({"t_ms": rr_t[order].astype(np.int64),
                  "rr_ms": rr_v[order].astype(np.int64)}).to_csv(
        subj_dir / "rr.csv", index=False, lineterminator="\n")

    for name, ts, vs in (("acc", acc_t, acc_v), ("gyr", gyr_t, gyr_v)):
        t = cat(ts).astype(np.int64)
        v = np.round(np.concatenate(vs), 4) if vs else np.empty((0, 3))
        order = np.argsort(t, kind="stable")
        pd.DataFrame({"t_ms": t[order], "x": v[order, 0], "y": v[order, 1],
                      "z": v[order, 2]}).to_csv(
            subj_dir / f"{name}.csv", index=False, lineterminator="\n")

    pd.DataFrame(sorted(sleep_rows), columns=["start_ms", "end_ms"]).to_csv(
        subj_dir / "sleep.csv", index=False, lineterminator="\n")
    pd.DataFrame(sorted(steps_rows), columns=["bucket_start_ms", "steps"]).to_csv(
        subj_dir / "steps.csv", index=False, lineterminator="\n")

    manifest = {
        "subject_id": subject_id,
        "group": group,
        "timezone": spec["timezone"],
        "start_date": spec["start_date"],
        "days": spec["days"],
    }
    (subj_dir / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    (subj_dir / "groundtruth.json").write_text(json.dumps(truth, indent=2) + "\n")
    return subj_dir


def subject_plan(spec: dict):
    """Deterministic (index, group) assignment for a validated spec."""
    plan = []
    for i in range(spec["n_control"]):
        plan.append((i, "control"))
    for i in range(spec["n_patient"]):
        plan.append((spec["n_control"] + i, "patient"))
    return plan


def generate_cohort(spec: dict, seed: int, outdir) -> list:
    """Generate all subject directories sequentially; returns their paths."""
    spec = validate_spec(spec)
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    return [generate_subject(spec, seed, idx, group, outdir)
            for idx, group in subject_plan(spec)]
