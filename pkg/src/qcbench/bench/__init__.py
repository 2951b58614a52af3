"""Benchmark programs, latency extraction and the analytic latency oracle."""

from .bm21 import Bm21State, double_update, fixed_point_update, recount_histogram
from .builders import benchmark_source, build_benchmark, default_plant, machine_for
from .latency import LatencyReport, MissingTimestamp, Overflow, bin2dec, extract_latency
from .oracle import NotDeterministic, predict_breakdown, predict_latency
from .spec import (
    BenchmarkSpec,
    Bm21Params,
    InvalidSpec,
    all_specs,
    parse_benchmark_id,
)
from .suite import BenchmarkFailed, SuiteConfig, run_benchmark, run_suite, trace_filename

__all__ = [
    "Bm21State", "double_update", "fixed_point_update", "recount_histogram",
    "benchmark_source", "build_benchmark", "default_plant", "machine_for",
    "LatencyReport", "MissingTimestamp", "Overflow", "bin2dec", "extract_latency",
    "NotDeterministic", "predict_breakdown", "predict_latency", "BenchmarkSpec", "Bm21Params",
    "InvalidSpec", "all_specs", "parse_benchmark_id", "BenchmarkFailed", "SuiteConfig",
    "run_benchmark", "run_suite", "trace_filename",
]
