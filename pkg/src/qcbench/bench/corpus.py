"""The shipped ``.qcl`` program corpus and the benchmarks each file matches."""

from __future__ import annotations

from importlib import resources
from pathlib import Path

from .spec import BenchmarkSpec

# file name -> benchmark the builders must reproduce (None: example program only)
CORPUS_SPECS: dict[str, BenchmarkSpec | None] = {
    "ramsey_with_reset.qcl": None,
    "conditional_single.qcl": BenchmarkSpec("BM11", "single"),
    "control_flow_single.qcl": BenchmarkSpec("BM12", "single"),
    "frame_lut_single.qcl": BenchmarkSpec("BM13", "single", "frame_lut"),
    "frame_binary_rep.qcl": BenchmarkSpec("BM13", "single", "binary_rep"),
    "multishot_calibration.qcl": BenchmarkSpec("BM21"),
    "conditional_distributed_n2.qcl": BenchmarkSpec("BM11", "distributed", n_inout=2),
    "conditional_aggregated_n2.qcl": BenchmarkSpec("BM11", "aggregated", n_inout=2),
    "conditional_aggregated_int_n2.qcl": BenchmarkSpec("BM11", "aggregated_int", n_inout=2),
    "control_flow_distributed_n2.qcl": BenchmarkSpec("BM12", "distributed", n_inout=2),
    "control_flow_aggregated_n2.qcl": BenchmarkSpec("BM12", "aggregated", n_inout=2),
    "frame_distributed_n2.qcl": BenchmarkSpec("BM13", "distributed", "frame_lut", 2),
    "frame_aggregated_n2.qcl": BenchmarkSpec("BM13", "aggregated", "frame_lut", 2),
    "frequency_distributed_n2.qcl": BenchmarkSpec("BM13", "distributed", "frequency", 2),
    "frequency_aggregated_n2.qcl": BenchmarkSpec("BM13", "aggregated", "frequency", 2),
    "amplitude_distributed_n2.qcl": BenchmarkSpec("BM13", "distributed", "amplitude", 2),
    "amplitude_aggregated_n2.qcl": BenchmarkSpec("BM13", "aggregated", "amplitude", 2),
    "threshold_distributed_n2.qcl": BenchmarkSpec("BM13", "distributed", "threshold", 2),
}


def corpus_dir() -> Path:
    return Path(str(resources.files("qcbench") / "corpus"))


def corpus_files() -> list[Path]:
    return sorted(corpus_dir().glob("*.qcl"))


def read_corpus(name: str) -> str:
    return (corpus_dir() / name).read_text(encoding="utf-8")
