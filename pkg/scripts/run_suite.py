"""Run a benchmark suite and print one latency line per benchmark.

    python3 scripts/run_suite.py [--config configs/default.json] [--out report.json] [--jobs 4]
"""

from __future__ import annotations

import argparse
from pathlib import Path

from qcbench.cli import build_report, dump_report
from qcbench.runconfig import load_run_config

ROOT = Path(__file__).resolve().parent.parent


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--config", default=str(ROOT / "configs" / "default.json"))
    ap.add_argument("--out", default=None, help="write the JSON report here")
    ap.add_argument("--jobs", type=int, default=1)
    args = ap.parse_args()

    cfg = load_run_config(args.config, {"scenarios": []})
    report = build_report(cfg, jobs=args.jobs)
    width = max((len(b["benchmark"]) for b in report["benchmarks"]), default=0)
    for b in report["benchmarks"]:
        parts = ", ".join(f"{k}={v}" for k, v in b["component_breakdown"].items() if v)
        print(f"{b['benchmark']:<{width}}  {b['feedback_latency']:>6}  {parts}")
    print(f"{len(report['benchmarks'])} benchmarks in {report['wall_clock_runtime_s']} s")
    if args.out:
        Path(args.out).write_text(dump_report(report), encoding="utf-8")
        print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
