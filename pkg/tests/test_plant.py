from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qcbench.lang import check_program, parse_program
from qcbench.plant import (
    Bernoulli,
    DriftModel,
    RabiPlant,
    RamseyDriftPlant,
    SuccessAfterK,
    rabi_flip_probability,
    ramsey_probability,
    response_buffer,
)
from qcbench.signal import DemodSpec, demodulate
from qcbench.sim import CostModel, default_machine, run
from qcbench.sim.rng import stream

SPEC = DemodSpec(100e6, 200, 28)
MC = default_machine(1)


@given(st.integers(0, 10**6))
def test_response_sign_encodes_state(emit):
    assert float(demodulate(response_buffer(1, emit, SPEC), SPEC)) == pytest.approx(0.5, abs=2**-20)
    assert float(demodulate(response_buffer(0, emit, SPEC), SPEC)) == pytest.approx(-0.5, abs=2**-20)
    assert response_buffer(1, emit, SPEC).t0 == emit + 28


def test_bernoulli_extremes():
    rng = stream(0, "plant")
    assert all(Bernoulli(1.0).draw_state("r", k, 0, rng) == 1 for k in range(100))
    assert all(Bernoulli(0.0).draw_state("r", k, 0, rng) == 0 for k in range(100))
    with pytest.raises(ValueError):
        Bernoulli(1.5)


def test_bernoulli_frequency_within_five_sigma():
    rng = stream(1, "plant")
    n, p = 20000, 0.3
    hits = sum(Bernoulli(p).draw_state("r", k, 0, rng) for k in range(n))
    assert abs(hits - n * p) < 5 * math.sqrt(n * p * (1 - p))


def test_success_after_k_loop_iterations():
    src = """\
fixed x
bool done = False
int tries
while not done:
   measure(readout_pulse, readout_element, demod(x))
   done = x > 0
   tries += 1
"""
    for k in (0, 1, 3):
        plant = SuccessAfterK(k=k)
        tr = run(check_program(parse_program(src), MC), MC, CostModel(), plant, 0)
        assert tr.final_state["tries"] == k + 1
        assert plant.states("readout_element") == [0] * k + [1]


@given(st.integers(0, 40).map(lambda k: 2 * k + 1), st.floats(-0.5, 0.5))
def test_rabi_flip_probability_bounds(n, eps):
    assert 0.0 <= rabi_flip_probability(n, eps) <= 1.0


def test_rabi_flip_probability_examples():
    for n in (5, 7, 9, 11):
        assert rabi_flip_probability(n, 0.0) == 0.5
    assert rabi_flip_probability(5, 0.2) == 1.0
    assert rabi_flip_probability(7, 0.02) == pytest.approx(0.5 - 0.5 * math.cos(7 * 1.02 * math.pi / 2))
    with pytest.raises(ValueError):
        rabi_flip_probability(4, 0.0)


def test_rabi_plant_counts_pulses_per_readout():
    src = """\
fixed x
play(pi_half, control_element)
play(pi_half, control_element)
align(control_element, readout_element)
measure(readout_pulse, readout_element, demod(x))
"""
    # two pi/2 pulses with no error make a pi rotation: always flipped
    plant = RabiPlant(amp_error=0.0)
    run(check_program(parse_program(src), MC), MC, CostModel(), plant, 0)
    assert plant.states("readout_element") == [1]


def test_ramsey_quadrature_point():
    # quarter period of free evolution: P = 1/2
    assert ramsey_probability(1e6, 250e-9) == pytest.approx(0.5)
    assert ramsey_probability(1e6, 0.0) == 1.0


def test_ramsey_plant_uses_gap_between_pulses():
    src = """\
fixed x
play(pi_half, control_element)
wait(500, control_element)
play(pi_half, control_element)
align(control_element, readout_element)
measure(readout_pulse, readout_element, demod(x))
"""
    # 500 ns at 1 MHz is half a fringe: never back in the ground state
    plant = RamseyDriftPlant(DriftModel(), offset_detuning=1e6)
    run(check_program(parse_program(src), MC), MC, CostModel(), plant, 0)
    assert plant.states("readout_element") == [0]


def test_drift_models():
    t = np.arange(200.0)
    sin = DriftModel("sinusoid", amplitude=50e3, period=200.0).path(t)
    assert sin[0] == 0.0 and sin[50] == pytest.approx(50e3)
    assert np.all(DriftModel("constant_offset", offset=3.0).path(t) == 3.0)
    walk = DriftModel("random_walk", step_std=10.0).path(t, stream(0, "plant"))
    assert walk[0] == 0.0 and walk.std() > 0
    with pytest.raises(ValueError):
        DriftModel("random_walk", step_std=1.0).path(t)
    with pytest.raises(ValueError):
        DriftModel("sinusoid", period=0.0)
