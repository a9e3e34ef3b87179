#!/usr/bin/env python3
"""Run every config in scripts/configs and write one report per config.

    python3 scripts/run_experiments.py [--outdir results] [config.json ...]

Exits nonzero if any experiment reports a failed check.
"""

import argparse
import json
import sys
from pathlib import Path

from stabforge.runner import ExperimentConfig, run_experiment, write_report

HERE = Path(__file__).resolve().parent


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("configs", nargs="*", type=Path)
    ap.add_argument("--outdir", type=Path, default=Path("results"))
    args = ap.parse_args()
    paths = args.configs or sorted((HERE / "configs").glob("*.json"))
    args.outdir.mkdir(parents=True, exist_ok=True)
    failed = 0
    for path in paths:
        cfg = ExperimentConfig.from_dict(json.loads(path.read_text()))
        report = run_experiment(cfg)
        suffix = ".csv" if cfg.format == "csv" else ".json"
        out = args.outdir / (path.stem + suffix)
        write_report(report, str(out), cfg.format)
        # keep the full JSON next to any CSV so the echo and timing are not lost
        if cfg.format == "csv":
            write_report(report, str(out.with_suffix(".json")), "json")
        status = "ok" if report["passed"] else "FAILED"
        print(f"{path.stem:24s} {status:7s} {report['timestamp']['wall_time_s']:8.2f}s -> {out}")
        failed += not report["passed"]
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
