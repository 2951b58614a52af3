from __future__ import annotations

import random
from dataclasses import fields

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qcbench.bench import (
    BenchmarkFailed,
    BenchmarkSpec,
    Bm21Params,
    Bm21State,
    InvalidSpec,
    MissingTimestamp,
    NotDeterministic,
    Overflow,
    SuiteConfig,
    all_specs,
    bin2dec,
    build_benchmark,
    default_plant,
    double_update,
    extract_latency,
    fixed_point_update,
    machine_for,
    parse_benchmark_id,
    predict_breakdown,
    predict_latency,
    recount_histogram,
    run_benchmark,
    run_suite,
)
from qcbench.fixedpoint import Fixed, quantize
from qcbench.lang import check_program
from qcbench.plant import ScriptedStates, SuccessAfterK
from qcbench.signal import synthesize
from qcbench.sim import CostModel, Event, EventTrace, default_machine, run
from qcbench.sim.config import default_pulses

# -- specs -------------------------------------------------------------------


@pytest.mark.parametrize("kw", [
    dict(family="BM99"),
    dict(family="BM11", variant="fancy"),
    dict(family="BM11", variant="single", n_inout=2),
    dict(family="BM11", variant="distributed", n_inout=0),
    dict(family="BM13", variant="single"),
    dict(family="BM13", variant="aggregated", kind="threshold"),
    dict(family="BM11", kind="frame_lut"),
    dict(family="BM11", max_latency=-1),
])
def test_invalid_specs(kw):
    with pytest.raises(InvalidSpec):
        BenchmarkSpec(**kw)


def test_invalid_bm21_params():
    with pytest.raises(InvalidSpec):
        Bm21Params(n_in=17)
    with pytest.raises(InvalidSpec):
        Bm21Params(n_out=3, matrix_form="block_diagonal")
    with pytest.raises(InvalidSpec):
        Bm21Params(param_kind="phase")
    with pytest.raises(InvalidSpec):
        Bm21Params(n_in=2, h0=(0, 0, 0))


@pytest.mark.parametrize("spec", all_specs((1, 7)), ids=lambda s: s.id)
def test_id_round_trip(spec):
    kw = {"bm21": {"param_kind": spec.bm21.param_kind}} if spec.bm21 else {}
    assert parse_benchmark_id(spec.id, **kw) == spec


def test_default_sweep_shape():
    specs = all_specs()
    assert len(specs) == 44
    assert len({s.id for s in specs}) == 44
    assert sum(s.family == "BM21" for s in specs) == 4


# -- oracle ------------------------------------------------------------------

def test_oracle_zero_costs():
    zero = CostModel.zero()
    for spec in all_specs((1, 5)):
        assert predict_latency(zero, spec, k=2) == 0


def costs(**kw) -> CostModel:
    return CostModel(**({f.name: 0 for f in fields(CostModel)} | kw))


def test_oracle_examples():
    assert predict_latency(costs(discrimination_cost=20, issue_cost=8), BenchmarkSpec("BM11")) == 28
    agg = costs(discrimination_cost=20, arithmetic_cost_per_op=4, issue_cost=8, comm_c0=16, comm_c1=2)
    assert predict_latency(agg, BenchmarkSpec("BM11", "aggregated", n_inout=50)) == 148


def test_oracle_needs_loop_count_for_repeat_until_success():
    with pytest.raises(NotDeterministic):
        predict_latency(CostModel(), BenchmarkSpec("BM12"))
    assert predict_latency(CostModel(), BenchmarkSpec("BM12"), k=0) == \
        predict_latency(CostModel(), BenchmarkSpec("BM12"), k=5)


def test_breakdown_sums_to_latency():
    cm = CostModel()
    for spec in all_specs((1, 3)):
        assert sum(predict_breakdown(cm, spec, k=1).values()) == predict_latency(cm, spec, k=1)


cost_models = st.builds(CostModel, **{f.name: st.integers(0, 50) for f in fields(CostModel)})
small_specs = st.sampled_from([s for s in all_specs((1, 2, 4)) if s.family != "BM21"])


@given(cost_models, small_specs)
def test_simulator_matches_oracle(cm, spec):
    spec = BenchmarkSpec(spec.family, spec.variant, spec.kind, spec.n_inout, max_latency=10**6)
    rep, _ = run_benchmark(spec, cm, seed=1)
    assert rep.feedback_latency == predict_latency(cm, spec, k=2)
    assert rep.component_breakdown["slack"] == 0


@given(cost_models, st.sampled_from(["frequency", "amplitude", "dc_offset", "threshold"]),
       st.sampled_from(["dense", "diagonal", "block_diagonal"]), st.booleans())
def test_calibration_benchmark_matches_oracle(cm, kind, form, norm):
    spec = BenchmarkSpec("BM21", bm21=Bm21Params(n_in=3, n_out=2, n_shots=4, param_kind=kind,
                                                 matrix_form=form, normalize=norm), max_latency=10**6)
    rep, _ = run_benchmark(spec, cm, seed=2)
    assert rep.feedback_latency == predict_latency(cm, spec)


@given(cost_models, st.sampled_from(["BM11/distributed", "BM12/distributed", "BM13/distributed/frame_lut",
                                     "BM13/distributed/frequency", "BM13/distributed/amplitude"]))
def test_distributed_latency_independent_of_channels(cm, ident):
    spec = parse_benchmark_id(ident, max_latency=10**6)
    lats = {predict_latency(cm, spec.with_n(n), k=2) for n in (1, 20, 50)}
    assert len(lats) == 1


@given(cost_models, st.sampled_from(["BM11/aggregated", "BM11/aggregated_int", "BM12/aggregated",
                                     "BM13/aggregated/frame_lut", "BM13/aggregated/frequency",
                                     "BM13/aggregated/amplitude"]),
       st.integers(1, 60), st.integers(1, 60))
def test_aggregated_slope_is_c1(cm, ident, n1, n2):
    spec = parse_benchmark_id(ident)
    d = predict_latency(cm, spec.with_n(n2), k=2) - predict_latency(cm, spec.with_n(n1), k=2)
    assert d == cm.comm_c1 * (n2 - n1)


# -- latency extraction -------------------------------------------------------

def cap(label, tick, element):
    return Event("timestamp_capture", element, tick, label)


def test_extract_single():
    tr = EventTrace([cap("re_time", 0, "readout_element"), cap("ce_time", 300, "control_element")])
    rep = extract_latency(tr, BenchmarkSpec("BM11"), default_machine(1))
    assert rep.feedback_latency == 72


def test_extract_distributed_takes_worst_channel():
    tr = EventTrace([cap("re_time[0]", 0, "readout_element[0]"), cap("re_time[1]", 0, "readout_element[1]"),
                     cap("ce_time[0]", 288, "control_element[0]"), cap("ce_time[1]", 300, "control_element[1]")])
    rep = extract_latency(tr, BenchmarkSpec("BM11", "distributed", n_inout=2), default_machine(2))
    assert rep.feedback_latency == 72


def test_extract_aggregated_uses_latest_input():
    tr = EventTrace([cap("re_time[0]", 0, "readout_element[0]"), cap("re_time[1]", 40, "readout_element[1]"),
                     cap("ce_time[0]", 300, "control_element[0]"), cap("ce_time[1]", 300, "control_element[1]")])
    rep = extract_latency(tr, BenchmarkSpec("BM11", "aggregated", n_inout=2), default_machine(2))
    assert rep.feedback_latency == 32


def test_extract_missing_timestamp():
    with pytest.raises(MissingTimestamp):
        extract_latency(EventTrace([cap("re_time", 0, "readout_element")]), BenchmarkSpec("BM11"),
                        default_machine(1))


def test_bin2dec():
    assert bin2dec([]) == 0
    assert bin2dec([1, 0, 1]) == 5
    assert bin2dec([0, 0, 0, 1]) == 8
    assert bin2dec([1] * 31) == 2**31 - 1
    with pytest.raises(Overflow):
        bin2dec([0] * 32)


@given(st.lists(st.booleans(), max_size=31))
def test_bin2dec_matches_int_parse(bits):
    assert bin2dec(bits) == int("".join("1" if b else "0" for b in reversed(bits)) or "0", 2)


# -- benchmark behaviour ------------------------------------------------------

def test_frame_rotation_applied_to_waveform():
    spec = BenchmarkSpec("BM13", "single", "frame_lut")
    mc = machine_for(spec)
    tp = check_program(build_benchmark(spec), mc)
    for state, angle in ((0, 0.1), (1, 0.2)):
        tr = run(tp, mc, CostModel(), ScriptedStates({"readout_element": [state]}), 0,
                 capture_waveforms=True)
        (buf,) = tr.waveforms["control_element"]
        # table entries are fixed-point, so the phase is the quantized angle
        assert buf == synthesize(default_pulses()["control_pulse"], float(quantize(angle)), buf.t0)


def test_amplitude_lookup_applied_to_waveform():
    spec = BenchmarkSpec("BM13", "distributed", "amplitude", 2)
    mc = machine_for(spec)
    plant = ScriptedStates({"readout_element[0]": [0], "readout_element[1]": [1]})
    tr = run(check_program(build_benchmark(spec), mc), mc, CostModel(), plant, 0, capture_waveforms=True)
    pulse = default_pulses()["control_pulse"]
    for k, scale in ((0, 0.7), (1, 0.9)):
        (buf,) = tr.waveforms[f"control_element[{k}]"]
        assert buf == synthesize(pulse, 0.0, buf.t0, amp_scale=float(quantize(scale)))


def test_repeat_until_success_measures_k_plus_one_times():
    spec = BenchmarkSpec("BM12")
    rep, tr = run_benchmark(spec, CostModel(), seed=0, plant=SuccessAfterK(k=3, success_state=0))
    measures = [e for e in tr.events if e.kind == "instruction_issue" and e.label == "measure"]
    assert len(measures) == 4


def test_calibration_histogram_and_update():
    params = Bm21Params(n_in=4, n_out=2, n_shots=50, matrix_form="block_diagonal")
    spec = BenchmarkSpec("BM21", bm21=params, max_latency=10**6)
    plant = default_plant(spec)
    _, tr = run_benchmark(spec, CostModel(), seed=3, plant=plant)
    st_ = Bm21State.from_final_state(tr.final_state)
    assert st_.H == recount_histogram(plant, 4, 50)
    assert sum(st_.H) == 50
    f0 = [Fixed(0)] * 2
    assert st_.f == fixed_point_update(st_.T, st_.H, st_.H0, f0)
    assert np.max(np.abs(np.array([float(x) for x in st_.f]) - double_update(st_.T, st_.H, st_.H0, f0))) <= 2**-20
    # block-diagonal structure of the drawn matrix
    assert all(float(st_.T[i][j]) == 0.0 for i in range(2) for j in range(16) if i // 2 != j // 2)


def test_normalized_update_matches_oracle():
    params = Bm21Params(n_in=3, n_out=2, n_shots=7, normalize=True, h0=(1, 1, 1, 1, 1, 1, 1, 0))
    spec = BenchmarkSpec("BM21", bm21=params, max_latency=10**6)
    _, tr = run_benchmark(spec, CostModel(), seed=4)
    st_ = Bm21State.from_final_state(tr.final_state)
    f0 = [Fixed(0)] * 2
    assert st_.H0 == list(params.h0)
    assert st_.f == fixed_point_update(st_.T, st_.H, st_.H0, f0, normalize=True, n_shots=7)


def test_fixed_point_update_exact_rounding():
    one_ulp = [[Fixed(1), Fixed(1)]]
    assert fixed_point_update(one_ulp, [2, 1], [0, 0], [Fixed(0)]) == [Fixed(3)]
    # 0.5 times a 3-ulp residual is 1.5 ulp, which rounds away from zero
    half = [[Fixed(1 << 27)]]
    assert fixed_point_update(half, [3], [0], [Fixed(0)], normalize=True, n_shots=2**28) == [Fixed(2)]
    assert fixed_point_update(half, [-3], [0], [Fixed(0)], normalize=True, n_shots=2**28) == [Fixed(-2)]


def test_run_suite_empty_and_ordering():
    assert run_suite(SuiteConfig(())) == []
    specs = tuple(random.Random(0).sample(all_specs((1, 2)), 8))
    cfg = SuiteConfig(specs, seed=5)
    one = [r.to_dict() for r in run_suite(cfg, jobs=1)]
    many = [r.to_dict() for r in run_suite(cfg, jobs=3)]
    assert one == many
    assert [d["benchmark"] for d in one] == [s.id for s in specs]


def test_run_suite_reports_failing_benchmark():
    spec = BenchmarkSpec("BM11", max_latency=1)
    with pytest.raises(BenchmarkFailed) as err:
        run_suite(SuiteConfig((spec,)))
    assert err.value.benchmark == "BM11/single/n1"
    assert err.value.error_type == "MaxLatencyExceeded"
