"""Run configuration: parsing, defaults and canonical hashing.

A run config is a JSON object. Only ``seed`` is mandatory::

    {
      "seed": 7,
      "machine": {"channel": {"if_freq": 1e8, "time_of_flight": 28, "sampling_window": 200}},
      "cost_model": {"discrimination_cost": 4, "aggregation_comm_cost": {"c0": 16, "c1": 2}},
      "max_latency": 300,
      "benchmarks": "default",
      "n_inout": [1, 20, 50],
      "bm21": {"n_shots": 1000},
      "plants": {"benchmark": {"kind": "bernoulli", "p_excited": 0.5},
                 "repeat_until_success": {"kind": "success_after_k", "k": 2}},
      "scenarios": [{"name": "rabi", "kind": "rabi", "plant": "rabi"}],
      "outputs": {"report": "report.json"}
    }

The config hash covers everything except ``outputs``.
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass, field
from pathlib import Path

from .bench.spec import (
    PARAM_KINDS,
    BenchmarkSpec,
    Bm21Params,
    InvalidSpec,
    all_specs,
    parse_benchmark_id,
)
from .calib import TrackingScenario
from .plant import Bernoulli, DriftModel, PlantModel, RabiPlant, RamseyDriftPlant, SuccessAfterK
from .sim.config import ChannelDefaults, ConfigError, CostModel, MachineConfig

DEFAULT_N = (1, 20, 50)
SUITES = ("default", "quick", "none")
_N_SUFFIX = re.compile(r"/n\d+$")
_TOP_KEYS = {"seed", "machine", "cost_model", "max_latency", "benchmarks", "n_inout", "bm21",
             "plants", "scenarios", "outputs"}


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=True)


def config_hash(raw: dict) -> str:
    body = {k: v for k, v in raw.items() if k != "outputs"}
    return hashlib.sha256(canonical_json(body).encode("utf-8")).hexdigest()


@dataclass
class ScenarioConfig:
    name: str
    kind: str  # rabi | ramsey
    scenario: TrackingScenario
    csv: str | None = None


@dataclass
class RunConfig:
    seed: int
    channel: ChannelDefaults = field(default_factory=ChannelDefaults)
    machine: MachineConfig | None = None  # explicit element table, used by ``check``
    cost_model: CostModel = field(default_factory=CostModel)
    benchmarks: list[BenchmarkSpec] = field(default_factory=list)
    plants: dict[str, dict] = field(default_factory=dict)
    scenarios: list[ScenarioConfig] = field(default_factory=list)
    outputs: dict[str, str] = field(default_factory=dict)
    hash: str = ""
    raw: dict = field(default_factory=dict)

    @property
    def success_after_k(self) -> int:
        return int(self.plants.get("repeat_until_success", {}).get("k", 2))

    @property
    def p_excited(self) -> float:
        return float(self.plants.get("benchmark", {}).get("p_excited", 0.5))


def _sweep(ids, n_values, max_latency, bm21_kw) -> list[BenchmarkSpec]:
    if ids == "default" or ids is None:
        bm21 = [Bm21Params(**{**bm21_kw, "param_kind": k}) for k in PARAM_KINDS]
        return all_specs(tuple(n_values), bm21=bm21, max_latency=max_latency)
    if ids == "none":
        return []
    if ids == "quick":
        bm21 = [Bm21Params(**{"n_in": 3, "n_out": 2, "n_shots": 8, **bm21_kw, "param_kind": k})
                for k in PARAM_KINDS]
        return all_specs(tuple(n_values), bm21=bm21, max_latency=max_latency)
    if not isinstance(ids, list):
        raise ConfigError("benchmarks must be 'default', 'quick', 'none' or a list of ids")
    out: list[BenchmarkSpec] = []
    for item in ids:
        if not isinstance(item, str):
            raise ConfigError(f"benchmark ids must be strings, got {item!r}")
        has_n = _N_SUFFIX.search(item.strip()) is not None
        if item.startswith("BM21"):
            out.append(parse_benchmark_id(item, bm21=bm21_kw, max_latency=max_latency))
            continue
        spec = parse_benchmark_id(item, max_latency=max_latency)
        if has_n or spec.variant == "single":
            out.append(spec)
        else:
            out.extend(spec.with_n(n) for n in n_values)
    return out


def make_plant(d: dict) -> PlantModel:
    kind = d.get("kind")
    try:
        if kind == "bernoulli":
            return Bernoulli(d.get("p_excited", 0.5))
        if kind == "success_after_k":
            return SuccessAfterK(k=int(d.get("k", 2)), success_state=int(d.get("success_state", 1)))
        if kind == "rabi":
            return RabiPlant(amp_error=float(d.get("amp_error", 0.02)))
        if kind == "ramsey_drift":
            drift = DriftModel(**d.get("drift", {"kind": "sinusoid", "amplitude": 50e3, "period": 200.0}))
            return RamseyDriftPlant(drift, offset_detuning=float(d.get("offset_detuning", 1e6)))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad plant {d!r}: {exc}") from exc
    raise ConfigError(f"unknown plant kind {kind!r}")


_DEFAULT_SCENARIO_PLANTS = {
    "rabi": {"kind": "rabi", "amp_error": 0.02},
    "ramsey": {"kind": "ramsey_drift", "offset_detuning": 1e6,
               "drift": {"kind": "sinusoid", "amplitude": 50e3, "period": 200.0}},
}
_SCENARIO_DEFAULTS = {
    "rabi": {"gain": 0.1, "shots_per_round": 100, "rounds": 50},
    "ramsey": {"gain": 0.5, "shots_per_round": 1000, "rounds": 400,
               "tau_points": [200e-9, 250e-9, 300e-9, 350e-9]},
}
_SCENARIO_KEYS = {"name", "kind", "plant", "gain", "shots_per_round", "rounds", "tracking_enabled",
                  "tau_points", "amp_sensitivity", "search_halfwidth", "search_points",
                  "noiseless", "csv"}


def _scenario(d: dict, plants: dict[str, dict]) -> ScenarioConfig:
    unknown = set(d) - _SCENARIO_KEYS
    if unknown:
        raise ConfigError(f"unknown scenario fields {sorted(unknown)}")
    kind = d.get("kind")
    if kind not in _SCENARIO_DEFAULTS:
        raise ConfigError(f"scenario kind must be 'rabi' or 'ramsey', got {kind!r}")
    pname = d.get("plant", kind)
    pdict = plants.get(pname, _DEFAULT_SCENARIO_PLANTS.get(pname))
    if pdict is None:
        raise ConfigError(f"scenario references unknown plant {pname!r}")
    plant = make_plant(pdict)
    if (kind == "rabi") != isinstance(plant, RabiPlant) or \
            (kind == "ramsey") != isinstance(plant, RamseyDriftPlant):
        raise ConfigError(f"{kind} scenario cannot use plant {pname!r}")
    kw = {**_SCENARIO_DEFAULTS[kind],
          **{k: v for k, v in d.items() if k not in ("name", "kind", "plant", "csv")}}
    if "tau_points" in kw:
        kw["tau_points"] = tuple(float(t) for t in kw["tau_points"])
    try:
        sc = TrackingScenario(plant, **kw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad scenario {d!r}: {exc}") from exc
    return ScenarioConfig(d.get("name", kind), kind, sc, d.get("csv"))


def parse_run_config(raw: dict) -> RunConfig:
    if not isinstance(raw, dict):
        raise ConfigError("run config must be a JSON object")
    unknown = set(raw) - _TOP_KEYS
    if unknown:
        raise ConfigError(f"unknown config fields {sorted(unknown)}")
    seed = raw.get("seed")
    if not isinstance(seed, int) or isinstance(seed, bool):
        raise ConfigError("seed is mandatory and must be an integer")
    try:
        mach = raw.get("machine", {}) or {}
        channel = ChannelDefaults(**mach.get("channel", {}))
        machine = MachineConfig.from_dict(mach) if "elements" in mach else None
        cm = CostModel.from_dict(raw.get("cost_model", {}) or {})
        max_latency = raw.get("max_latency", 300)
        if not isinstance(max_latency, int) or max_latency < 0:
            raise ConfigError("max_latency must be a non-negative integer (ticks)")
        n_values = raw.get("n_inout", list(DEFAULT_N))
        if not isinstance(n_values, list) or not all(isinstance(n, int) and n > 0 for n in n_values):
            raise ConfigError("n_inout must be a list of positive integers")
        specs = _sweep(raw.get("benchmarks", "default"), n_values, max_latency,
                       dict(raw.get("bm21", {}) or {}))
        plants = dict(raw.get("plants", {}) or {})
        for name, p in plants.items():
            make_plant(p)  # validate early
        scenarios = [_scenario(s, plants) for s in raw.get("scenarios", []) or []]
    except ConfigError:
        raise
    except (InvalidSpec, TypeError, ValueError, AttributeError) as exc:
        raise ConfigError(str(exc)) from exc
    return RunConfig(seed=seed, channel=channel, machine=machine, cost_model=cm, benchmarks=specs,
                     plants=plants, scenarios=scenarios, outputs=dict(raw.get("outputs", {}) or {}),
                     hash=config_hash(raw), raw=raw)


def load_run_config(path, overrides: dict | None = None) -> RunConfig:
    """Read and parse a config file; ``overrides`` replaces top-level keys before hashing."""
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {str(path)!r}: {exc.strerror}") from exc
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    if isinstance(raw, dict) and overrides:
        raw = {**raw, **{k: v for k, v in overrides.items() if v is not None}}
    return parse_run_config(raw)

