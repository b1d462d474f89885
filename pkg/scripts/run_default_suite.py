#!/usr/bin/env python3
"""Run an experiment config (default: every suite) and write result.json, CSVs, plots and report.md."""

import argparse
import sys
from pathlib import Path

from emtransfer.harness import ExperimentConfig, report, run


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--config", help="JSON experiment config")
    ap.add_argument("--out", default="runs/default")
    ap.add_argument("--seed", type=int)
    args = ap.parse_args()

    cfg = ExperimentConfig.load(args.config) if args.config else ExperimentConfig(name="default")
    cfg.out, cfg.plots = args.out, True
    if args.seed is not None:
        cfg.seed = args.seed
    rec = run(cfg)
    Path(args.out, "report.md").write_text(report([rec], args.out))
    for name, secs in rec.timings.items():
        status = next(s["passed"] for s in rec.suites if s["suite"] == name)
        print(f"{'PASS' if status else 'FAIL'}  {name:16s} {secs:7.2f} s")
    c = rec.counts()
    print(f"{c['checks'] - c['checks_failed']}/{c['checks']} checks passed; outputs in {args.out}")
    return 0 if rec.passed else 1


if __name__ == "__main__":
    sys.exit(main())
