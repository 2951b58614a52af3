from __future__ import annotations

import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from qcbench.lang import check_program, parse_program
from qcbench.plant import Bernoulli
from qcbench.sim import (
    CostModel,
    StrictTimingViolation,
    default_machine,
    get_timestamp,
    run,
    verify_strict_timing,
)

from strict_programs import random_case


def outcome(case):
    mc = case.machine
    tp = check_program(parse_program(case.source), mc)
    try:
        return run(tp, mc, case.cost_model, Bernoulli(0.5), 0), None
    except StrictTimingViolation as exc:
        return None, exc


@given(st.integers(0, 2**32 - 1))
def test_violation_iff_deficit(seed):
    case = random_case(random.Random(seed))
    tr, exc = outcome(case)
    if case.expect_violation():
        assert exc is not None and exc.gap == case.deficit()
    else:
        assert exc is None
        assert verify_strict_timing(tr) == []
        assert get_timestamp(tr, "ce_time") == max(case.ready_tick(), case.control_free())


@given(st.integers(0, 2**32 - 1))
def test_pending_wait_never_violates(seed):
    case = random_case(random.Random(seed))
    if case.max_time is None:
        return
    _, exc = outcome(case)
    assert exc is None


def test_first_instruction_on_an_element_is_asap():
    src = """\
fixed x
bool s
strict_timing:
   measure(readout_pulse, readout_element, demod(x))
   s = x > 0
   play(control_pulse, control_element, condition = s, timestamp-> ce_time)
   play(control_pulse, control_element)
"""
    mc = default_machine(1)
    tr = run(check_program(parse_program(src), mc), mc, CostModel(), Bernoulli(0.5), 0)
    assert get_timestamp(tr, "ce_time") == 228 + 4 + 8
    assert verify_strict_timing(tr) == []


def test_violation_carries_partial_trace():
    src = """\
fixed x
bool s
strict_timing:
   play(control_pulse, control_element)
   measure(readout_pulse, readout_element, demod(x))
   s = x > 0
   play(control_pulse, control_element, condition = s)
"""
    mc = default_machine(1)
    with pytest.raises(StrictTimingViolation) as err:
        run(check_program(parse_program(src), mc), mc, CostModel(), Bernoulli(0.5), 0)
    kinds = [e.kind for e in err.value.trace.events]
    assert kinds.count("strict_violation") == 1
