from __future__ import annotations

import json

import pytest

from qcbench.bench.corpus import corpus_dir
from qcbench.cli import EXIT_ABORT, EXIT_CONFIG, EXIT_INVALID, EXIT_OK, main

SMALL = {"seed": 3, "benchmarks": ["BM11/single", "BM12/aggregated", "BM13/distributed/frame_lut"],
         "n_inout": [1, 3], "scenarios": [{"kind": "rabi", "rounds": 5}]}


@pytest.fixture
def config(tmp_path):
    def write(raw, name="c.json"):
        p = tmp_path / name
        p.write_text(json.dumps(raw))
        return str(p)
    return write


def test_check_corpus_file():
    assert main(["check", str(corpus_dir() / "conditional_single.qcl")]) == EXIT_OK
    assert main(["check", str(corpus_dir() / "ramsey_with_reset.qcl")]) == EXIT_OK


def test_check_invalid_program(tmp_path, capsys):
    p = tmp_path / "nest.qcl"
    p.write_text("strict_timing:\n    strict_timing:\n        play(control_pulse, control_element)\n")
    assert main(["check", str(p)]) == EXIT_INVALID
    assert f"{p}:2:5:" in capsys.readouterr().err


def test_check_missing_file(tmp_path):
    assert main(["check", str(tmp_path / "none.qcl")]) == EXIT_CONFIG


def test_usage_errors():
    assert main([]) == EXIT_CONFIG
    assert main(["run"]) == EXIT_CONFIG
    assert main(["run", "--config", "x.json", "--n-inout", "0"]) == EXIT_CONFIG


def test_run_writes_report(config, tmp_path):
    out = tmp_path / "r.json"
    assert main(["run", "--config", config(SMALL), "--out", str(out)]) == EXIT_OK
    rep = json.loads(out.read_text())
    assert set(rep) == {"tool_version", "config_hash", "seed", "cost_model", "benchmarks", "scenarios",
                        "wall_clock_runtime_s"}
    assert [b["benchmark"] for b in rep["benchmarks"]] == [
        "BM11/single/n1", "BM12/aggregated/n1", "BM12/aggregated/n3",
        "BM13/distributed/frame_lut/n1", "BM13/distributed/frame_lut/n3"]
    assert rep["scenarios"][0]["rounds"] == 5


def test_run_is_reproducible(config, tmp_path):
    cfg = config(SMALL)
    texts = []
    for k, jobs in enumerate(("1", "2")):
        out = tmp_path / f"r{k}.json"
        assert main(["run", "--config", cfg, "--out", str(out), "--jobs", jobs]) == EXIT_OK
        rep = json.loads(out.read_text())
        rep.pop("wall_clock_runtime_s")
        texts.append(json.dumps(rep, sort_keys=True))
    assert texts[0] == texts[1]


def test_run_overrides_change_hash(config, tmp_path):
    cfg = config(SMALL)
    hashes = []
    for seed in ("3", "4"):
        out = tmp_path / f"s{seed}.json"
        assert main(["run", "--config", cfg, "--out", str(out), "--seed", seed, "--suite", "none"]) == EXIT_OK
        hashes.append(json.loads(out.read_text())["config_hash"])
    assert hashes[0] != hashes[1]


def test_run_abort_names_benchmark(config, tmp_path, capsys):
    raw = {**SMALL, "max_latency": 10}
    assert main(["run", "--config", config(raw), "--out", str(tmp_path / "r.json")]) == EXIT_ABORT
    assert "BM11/single/n1: MaxLatencyExceeded" in capsys.readouterr().err


def test_run_config_errors(config, tmp_path):
    assert main(["run", "--config", str(tmp_path / "missing.json")]) == EXIT_CONFIG
    assert main(["run", "--config", config({"benchmarks": "none"})]) == EXIT_CONFIG


def test_trace_command(config, tmp_path):
    cfg = config(SMALL)
    out = tmp_path / "t.jsonl"
    assert main(["trace", "--config", cfg, "--benchmark", "BM11/single", "--out", str(out)]) == EXIT_OK
    first = json.loads(out.read_text().splitlines()[0])
    assert first == {"kind": "output_sample_start", "element": "readout_element", "tick": 0,
                     "label": "readout_pulse"}
    assert main(["trace", "--config", cfg, "--benchmark", "BM11/distributed/n9", "--out", str(out)]) == EXIT_CONFIG
    assert main(["trace", "--config", cfg, "--benchmark", "BMX", "--out", str(out)]) == EXIT_CONFIG


def test_list_benchmarks(config, capsys):
    assert main(["list-benchmarks"]) == EXIT_OK
    assert len(capsys.readouterr().out.splitlines()) == 44
    assert main(["list-benchmarks", "--config", config(SMALL)]) == EXIT_OK
    assert capsys.readouterr().out.splitlines()[0] == "BM11/single/n1"
