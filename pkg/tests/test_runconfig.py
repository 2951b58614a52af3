from __future__ import annotations

import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from qcbench.bench import BenchmarkSpec
from qcbench.runconfig import config_hash, load_run_config, make_plant, parse_run_config
from qcbench.sim.config import ConfigError, CostModel

BASE = {"seed": 1, "benchmarks": ["BM11/single", "BM11/aggregated"], "n_inout": [1, 4]}


def test_seed_is_mandatory():
    for raw in ({}, {"seed": "1"}, {"seed": True}, {"seed": 1.5}):
        with pytest.raises(ConfigError):
            parse_run_config(raw)


def test_unknown_fields_rejected():
    with pytest.raises(ConfigError):
        parse_run_config({"seed": 0, "sede": 1})
    with pytest.raises(ConfigError):
        parse_run_config({"seed": 0, "cost_model": {"discrimnation_cost": 3}})
    with pytest.raises(ConfigError):
        parse_run_config({"seed": 0, "scenarios": [{"kind": "rabi", "gian": 0.1}]})


def test_benchmark_ids_sweep_over_channel_counts():
    cfg = parse_run_config(BASE)
    assert [s.id for s in cfg.benchmarks] == ["BM11/single/n1", "BM11/aggregated/n1", "BM11/aggregated/n4"]
    pinned = parse_run_config({**BASE, "benchmarks": ["BM11/aggregated/n3"]})
    assert pinned.benchmarks == [BenchmarkSpec("BM11", "aggregated", n_inout=3)]


def test_named_suites():
    assert parse_run_config({"seed": 0, "benchmarks": "none"}).benchmarks == []
    assert len(parse_run_config({"seed": 0}).benchmarks) == 44
    quick = parse_run_config({"seed": 0, "benchmarks": "quick", "n_inout": [1, 2]}).benchmarks
    assert all(s.bm21.n_shots == 8 for s in quick if s.family == "BM21")


def test_cost_model_parsing():
    cfg = parse_run_config({"seed": 0, "cost_model": {"issue_cost": 3,
                                                      "aggregation_comm_cost": {"c0": 5, "c1": 1}}})
    assert cfg.cost_model == CostModel(issue_cost=3, comm_c0=5, comm_c1=1)
    assert cfg.cost_model.comm(10) == 15


def test_plants_and_scenarios():
    assert make_plant({"kind": "success_after_k", "k": 4}).k == 4
    with pytest.raises(ConfigError):
        make_plant({"kind": "dragon"})
    cfg = parse_run_config({"seed": 0, "benchmarks": "none",
                            "scenarios": [{"kind": "rabi", "gain": 0.2}, {"name": "r2", "kind": "ramsey"}]})
    assert [s.kind for s in cfg.scenarios] == ["rabi", "ramsey"]
    assert cfg.scenarios[0].scenario.gain == 0.2
    assert cfg.scenarios[1].name == "r2"
    with pytest.raises(ConfigError):
        parse_run_config({"seed": 0, "plants": {"p": {"kind": "bernoulli"}},
                          "scenarios": [{"kind": "rabi", "plant": "p"}]})


def test_hash_ignores_outputs_and_key_order():
    a = dict(BASE, outputs={"report": "a.json"})
    b = {"n_inout": [1, 4], "outputs": {"report": "b.json"}, "benchmarks": BASE["benchmarks"], "seed": 1}
    assert config_hash(a) == config_hash(b) == parse_run_config(a).hash


@given(st.integers(0, 2**31), st.integers(0, 2**31))
def test_hash_sensitive_to_seed(s1, s2):
    assert (config_hash({**BASE, "seed": s1}) == config_hash({**BASE, "seed": s2})) == (s1 == s2)


def test_hash_sensitive_to_costs():
    assert config_hash(BASE) != config_hash({**BASE, "cost_model": {"issue_cost": 9}})


def test_load_with_overrides(tmp_path):
    p = tmp_path / "c.json"
    p.write_text(json.dumps(BASE))
    cfg = load_run_config(p, {"seed": 9, "n_inout": None})
    assert cfg.seed == 9
    assert cfg.hash == config_hash({**BASE, "seed": 9})
    with pytest.raises(ConfigError):
        load_run_config(tmp_path / "missing.json")
    (tmp_path / "bad.json").write_text("{")
    with pytest.raises(ConfigError):
        load_run_config(tmp_path / "bad.json")
