"""Command-line entry point.

Commands:
    extract  ingest subject directories and write per-subject feature files
    report   run group comparisons and emit report tables / boxplot data
    synth    generate a synthetic two-cohort dataset

Set the WEARFEAT_LOG environment variable to change the log level.
"""

from __future__ import annotations

import argparse
import json
import logging
import multiprocessing
import os
import sys
from pathlib import Path

from .errors import ConfigError, WearfeatError


def _setup_logging():
    level = os.environ.get("WEARFEAT_LOG", "INFO").upper()
    logging.basicConfig(level=getattr(logging, level, logging.INFO),
                        format="%(levelname)s %(name)s: %(message)s")


def _extract_worker(args):
    subject_dir, cfg, out_dir, force = args
    from .pipeline import extract_subject

    try:
        return str(subject_dir), extract_subject(subject_dir, cfg, out_dir, force=force), None
    except Exception as exc:  # per-subject failures must not stop the run
        return str(subject_dir), None, f"{type(exc).__name__}: {exc}"


def _synth_worker(args):
    spec, seed, index, group, outdir = args
    from .synth import generate_subject

    return str(generate_subject(spec, seed, index, group, Path(outdir)))


def _pool_map(func, items, jobs: int):
    if jobs <= 1 or len(items) <= 1:
        return [func(it) for it in items]
    with multiprocessing.Pool(processes=jobs) as pool:
        return pool.map(func, items)


def cmd_extract(ns) -> int:
    from .pipeline import load_config, subject_dirs

    cfg = load_config(ns.config)
    out_dir = Path(ns.out or cfg.get("out", "."))
    dirs = subject_dirs(cfg)
    tasks = [(d, cfg, out_dir, ns.force) for d in dirs]
    results = _pool_map(_extract_worker, tasks, ns.jobs)

    failures = 0
    for subject_dir, meta, err in results:
        if err is not None:
            failures += 1
            logging.error("failed %s: %s", subject_dir, err)
            continue
        cached = " (cached)" if meta.get("cached") else ""
        print(f"subject {meta['subject_id']}{cached}:")
        for label in ("# 10 min. mov (awake)", "# 1 hour HRV (awake)",
                      "# 10 min. mov (sleep)", "# 1 hour HRV (sleep)"):
            print(f"  {label}: {meta['counts'][label]}")
    if failures == len(results):
        logging.error("all %d subjects failed", failures)
        return 1
    if failures:
        logging.warning("%d of %d subjects failed", failures, len(results))
    return 0


def cmd_report(ns) -> int:
    from .pipeline import collect_summaries, load_config, write_reports

    cfg = load_config(ns.config)
    out_dir = Path(ns.out or cfg.get("out", "."))
    summaries = collect_summaries(out_dir)
    info = write_reports(summaries, out_dir)
    print(f"wrote report.md, report.csv, boxplot.json to {out_dir} "
          f"({info['n_significant']} of {info['n_tests']} tests significant)")
    return 0


def cmd_synth(ns) -> int:
    from .synth import subject_plan, validate_spec

    try:
        spec = json.loads(Path(ns.config).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read generator spec {ns.config}: {exc}") from None
    spec = validate_spec(spec)
    outdir = Path(ns.out or ".")
    outdir.mkdir(parents=True, exist_ok=True)
    tasks = [(spec, ns.seed, idx, group, outdir) for idx, group in subject_plan(spec)]
    paths = _pool_map(_synth_worker, tasks, ns.jobs)
    for p in paths:
        print(p)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wearfeat", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="extract per-subject window features")
    p.add_argument("--config", required=True, help="run configuration JSON")
    p.add_argument("--out", default=None, help="output directory")
    p.add_argument("--force", action="store_true", help="ignore cached outputs")
    p.add_argument("--jobs", type=int, default=1, help="parallel worker processes")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("report", help="group comparison report from extracted features")
    p.add_argument("--config", required=True, help="run configuration JSON")
    p.add_argument("--out", default=None, help="directory holding extraction outputs")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("synth", help="generate a synthetic cohort dataset")
    p.add_argument("--config", required=True, help="generator spec JSON")
    p.add_argument("--seed", type=int, required=True, help="master seed")
    p.add_argument("--out", default=None, help="output dataset directory")
    p.add_argument("--jobs", type=int, default=1, help="parallel worker processes")
    p.set_defaults(func=cmd_synth)
    return parser


def main(argv=None) -> int:
    _setup_logging()
    ns = build_parser().parse_args(argv)
    try:
        return ns.func(ns)
    except WearfeatError as exc:
        logging.error("%s", exc)
        return 2


if __name__ == "__main__":
    sys.exit(main())
