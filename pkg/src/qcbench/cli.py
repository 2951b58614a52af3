"""Command-line front end.

Exit codes: 0 success, 1 invalid program (``check``), 2 configuration or
usage error, 3 simulation abort.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from . import __version__
from .bench.builders import build_benchmark, default_plant, machine_for
from .bench.spec import InvalidSpec, all_specs, parse_benchmark_id
from .bench.suite import BenchmarkFailed, SuiteConfig, run_suite
from .calib import rms, simulate_rabi_tracking, simulate_ramsey_tracking
from .lang import ast as A
from .lang.checker import check_program
from .lang.errors import LangError
from .lang.parser import parse_program
from .runconfig import SUITES, RunConfig, load_run_config
from .sim.config import ChannelDefaults, ConfigError, ElementConfig, MachineConfig, default_pulses
from .sim.executor import PlantExhausted, RuntimeFault, SimulationError, run

EXIT_OK, EXIT_INVALID, EXIT_CONFIG, EXIT_ABORT = 0, 1, 2, 3


def _err(msg: str) -> None:
    print(f"error: {msg}", file=sys.stderr)


def _n_list(text: str) -> list[int]:
    try:
        ns = [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not ns or any(n <= 0 for n in ns):
        raise argparse.ArgumentTypeError("channel counts must be positive")
    return ns


def _scenario_summary(sc_cfg, series) -> dict:
    sc = sc_cfg.scenario
    d = {"name": sc_cfg.name, "kind": sc_cfg.kind, "rounds": sc.rounds,
         "tracking_enabled": sc.tracking_enabled, "gain": sc.gain}
    if sc_cfg.kind == "rabi":
        amp = series.column("amp_error")
        d["initial_amp_error"] = float(amp[0]) if len(amp) else sc.plant.amp_error
        d["final_amp_error"] = sc.plant.amp_error
    else:
        d["rms_true_detuning"] = rms(series.column("true_detuning"))
        d["rms_corrected_detuning"] = rms(series.column("corrected_detuning"))
    if sc_cfg.csv:
        d["csv"] = sc_cfg.csv
    return d


def build_report(cfg: RunConfig, jobs: int = 1, trace_dir: str | None = None) -> dict:
    """Run every benchmark and scenario in ``cfg``; ``wall_clock_runtime_s`` is the only unstable field."""
    t0 = time.perf_counter()
    suite = SuiteConfig(tuple(cfg.benchmarks), cfg.cost_model, cfg.channel, cfg.seed,
                        cfg.success_after_k, cfg.p_excited, cfg.hash, trace_dir)
    reports = run_suite(suite, jobs=jobs)
    scenarios = []
    for sc_cfg in cfg.scenarios:
        sim = simulate_rabi_tracking if sc_cfg.kind == "rabi" else simulate_ramsey_tracking
        series = sim(sc_cfg.scenario, cfg.seed)
        if sc_cfg.csv:
            series.write_csv(sc_cfg.csv)
        scenarios.append(_scenario_summary(sc_cfg, series))
    return {
        "tool_version": __version__,
        "config_hash": cfg.hash,
        "seed": cfg.seed,
        "cost_model": cfg.cost_model.to_dict(),
        "benchmarks": [r.to_dict() for r in reports],
        "scenarios": scenarios,
        "wall_clock_runtime_s": round(time.perf_counter() - t0, 3),
    }


def dump_report(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


def cmd_run(args) -> int:
    overrides = {"seed": args.seed, "n_inout": args.n_inout, "benchmarks": args.suite}
    try:
        cfg = load_run_config(args.config, overrides)
    except ConfigError as exc:
        _err(str(exc))
        return EXIT_CONFIG
    out = args.out or cfg.outputs.get("report", "report.json")
    try:
        report = build_report(cfg, jobs=args.jobs, trace_dir=cfg.outputs.get("trace_dir"))
    except BenchmarkFailed as exc:
        _err(str(exc))
        return EXIT_ABORT
    except (SimulationError, RuntimeFault, PlantExhausted) as exc:
        _err(f"{type(exc).__name__}: {exc}")
        return EXIT_ABORT
    Path(out).write_text(dump_report(report), encoding="utf-8")
    print(f"wrote {out}: {len(report['benchmarks'])} benchmarks, {len(report['scenarios'])} scenarios")
    return EXIT_OK


def machine_for_program(p: A.Program, channel: ChannelDefaults | None = None) -> MachineConfig:
    """Default machine with every element the program touches; measured elements read out."""
    channel = channel or ChannelDefaults()
    readouts = {s.element for s in A.walk(p.body) if isinstance(s, A.Measure)}
    elements = {}
    for name in sorted(p.elements_used | readouts):
        if name in readouts:
            elements[name] = ElementConfig(name, "readout", channel.if_freq, channel.time_of_flight,
                                           channel.sampling_window)
        else:
            elements[name] = ElementConfig(name, "control", channel.if_freq)
    return MachineConfig(elements, default_pulses())


def cmd_check(args) -> int:
    path = Path(args.program)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        _err(f"cannot read {args.program!r}: {exc.strerror}")
        return EXIT_CONFIG
    cfg = None
    if args.config:
        try:
            cfg = load_run_config(args.config)
        except ConfigError as exc:
            _err(str(exc))
            return EXIT_CONFIG
    try:
        prog = parse_program(text)
        if cfg is not None and cfg.machine is not None:
            mc = cfg.machine
        else:
            mc = machine_for_program(prog, cfg.channel if cfg else None)
        check_program(prog, mc)
    except LangError as exc:
        print(f"{path}:{exc}", file=sys.stderr)
        return EXIT_INVALID
    print(f"{path}: ok")
    return EXIT_OK


def cmd_trace(args) -> int:
    try:
        cfg = load_run_config(args.config)
        bm21_kw = dict(cfg.raw.get("bm21", {}) or {})
        kw = {"bm21": bm21_kw} if args.benchmark.startswith("BM21") else {}
        spec = parse_benchmark_id(args.benchmark, max_latency=cfg.raw.get("max_latency", 300), **kw)
    except (ConfigError, InvalidSpec) as exc:
        _err(str(exc))
        return EXIT_CONFIG
    if spec not in cfg.benchmarks:
        _err(f"benchmark {args.benchmark!r} is not part of the configured suite")
        return EXIT_CONFIG
    mc = machine_for(spec, cfg.channel)
    try:
        tp = check_program(build_benchmark(spec), mc)
        tr = run(tp, mc, cfg.cost_model,
                 default_plant(spec, k=cfg.success_after_k, p_excited=cfg.p_excited), cfg.seed)
    except (SimulationError, RuntimeFault, PlantExhausted) as exc:
        _err(f"{spec.id}: {type(exc).__name__}: {exc}")
        return EXIT_ABORT
    tr.write_jsonl(args.out)
    print(f"wrote {args.out}: {len(tr.events)} events")
    return EXIT_OK


def cmd_list(args) -> int:
    if args.config:
        try:
            specs = load_run_config(args.config).benchmarks
        except ConfigError as exc:
            _err(str(exc))
            return EXIT_CONFIG
    else:
        specs = all_specs()
    for s in specs:
        print(s.id)
    return EXIT_OK


def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qcbench", description="Controller feedback-latency benchmarks")
    ap.add_argument("--version", action="version", version=f"qcbench {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run the configured benchmarks and scenarios")
    r.add_argument("--config", required=True)
    r.add_argument("--seed", type=int)
    r.add_argument("--n-inout", type=_n_list, help="comma-separated channel counts, e.g. 1,20,50")
    r.add_argument("--out", help="report path (default: outputs.report or report.json)")
    r.add_argument("--suite", choices=SUITES, help="replace the configured benchmark list")
    r.add_argument("--jobs", type=int, default=1)
    r.set_defaults(func=cmd_run)

    c = sub.add_parser("check", help="parse and type-check a program")
    c.add_argument("program")
    c.add_argument("--config")
    c.set_defaults(func=cmd_check)

    t = sub.add_parser("trace", help="write the event trace of one benchmark")
    t.add_argument("--config", required=True)
    t.add_argument("--benchmark", required=True)
    t.add_argument("--out", required=True)
    t.set_defaults(func=cmd_trace)

    ls = sub.add_parser("list-benchmarks", help="print benchmark ids")
    ls.add_argument("--config")
    ls.set_defaults(func=cmd_list)
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = make_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
