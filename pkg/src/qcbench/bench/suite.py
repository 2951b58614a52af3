"""Running benchmarks one at a time or as a sweep."""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from ..lang.checker import check_program
from ..plant import PlantModel
from ..sim.config import ChannelDefaults, CostModel
from ..sim.executor import PlantExhausted, RuntimeFault, SimulationError, run
from ..sim.trace import EventTrace
from .builders import build_benchmark, default_plant, machine_for
from .latency import LatencyReport, extract_latency
from .spec import BenchmarkSpec


@dataclass(frozen=True)
class SuiteConfig:
    specs: tuple[BenchmarkSpec, ...]
    cost_model: CostModel = field(default_factory=CostModel)
    channel: ChannelDefaults = field(default_factory=ChannelDefaults)
    seed: int = 0
    success_after_k: int = 2  # failures before success in repeat-until-success loops
    p_excited: float = 0.5
    config_hash: str | None = None
    trace_dir: str | None = None  # write one JSON-Lines trace per benchmark when set


class BenchmarkFailed(RuntimeError):
    """A benchmark run aborted; names the benchmark and the underlying error."""

    def __init__(self, benchmark: str, error_type: str, message: str):
        super().__init__(benchmark, error_type, message)
        self.benchmark, self.error_type, self.message = benchmark, error_type, message

    def __str__(self) -> str:
        return f"{self.benchmark}: {self.error_type}: {self.message}"


def trace_filename(spec: BenchmarkSpec) -> str:
    return spec.id.replace("/", "_") + ".jsonl"


def run_benchmark(spec: BenchmarkSpec, cm: CostModel | None = None, seed: int = 0, *,
                  channel: ChannelDefaults | None = None, plant: PlantModel | None = None,
                  k: int = 2, p_excited: float = 0.5,
                  config_hash: str | None = None) -> tuple[LatencyReport, EventTrace]:
    cm = cm or CostModel()
    mc = machine_for(spec, channel)
    tp = check_program(build_benchmark(spec), mc)
    plant = plant if plant is not None else default_plant(spec, k=k, p_excited=p_excited)
    tr = run(tp, mc, cm, plant, seed)
    rep = extract_latency(tr, spec, mc, cm)
    rep.config_hash = config_hash
    return rep, tr


def _one(args) -> LatencyReport:
    spec, cfg = args
    try:
        rep, tr = run_benchmark(spec, cfg.cost_model, cfg.seed, channel=cfg.channel,
                                k=cfg.success_after_k, p_excited=cfg.p_excited,
                                config_hash=cfg.config_hash)
    except (SimulationError, RuntimeFault, PlantExhausted) as exc:
        raise BenchmarkFailed(spec.id, type(exc).__name__, str(exc)) from exc
    if cfg.trace_dir is not None:
        path = Path(cfg.trace_dir) / trace_filename(spec)
        tr.write_jsonl(path)
        rep.trace_ref = str(path)
    return rep


def run_suite(cfg: SuiteConfig, jobs: int = 1) -> list[LatencyReport]:
    """One report per spec, in the order of ``cfg.specs`` regardless of ``jobs``."""
    if cfg.trace_dir is not None:
        Path(cfg.trace_dir).mkdir(parents=True, exist_ok=True)
    work = [(s, cfg) for s in cfg.specs]
    if jobs <= 1 or len(work) <= 1:
        return [_one(w) for w in work]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_one, work))
