"""Feedback-latency extraction from event traces.

Feedback latency runs from the last input sample the computation needs to
the first output sample of the dependent pulse. With ``re_time`` captured at
the start of a readout, the last sample arrives ``time_of_flight +
sampling_window`` ticks later.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..sim.config import CostModel, MachineConfig
from ..sim.trace import EventTrace
from .oracle import predict_breakdown
from .spec import BenchmarkSpec


class MissingTimestamp(KeyError):
    """The trace lacks a ``re_time`` or ``ce_time`` capture."""


class Overflow(ValueError):
    """A bit vector is too long for a 32-bit signed result."""


def bin2dec(bits) -> int:
    """Integer encoded by ``bits`` with index 0 as the least-significant bit."""
    bits = list(bits)
    if len(bits) > 31:
        raise Overflow(f"{len(bits)} bits do not fit in a 32-bit signed integer")
    return sum(1 << i for i, b in enumerate(bits) if b)


@dataclass
class LatencyReport:
    spec: BenchmarkSpec
    feedback_latency: int
    component_breakdown: dict[str, int] = field(default_factory=dict)
    timestamps: dict = field(default_factory=dict)
    seed: int | None = None
    config_hash: str | None = None
    trace_ref: str | None = None

    def to_dict(self) -> dict:
        return {
            "benchmark": self.spec.id,
            "spec": self.spec.to_dict(),
            "feedback_latency": self.feedback_latency,
            "component_breakdown": dict(self.component_breakdown),
            "timestamps": self.timestamps,
            "seed": self.seed,
            "config_hash": self.config_hash,
            "trace_ref": self.trace_ref,
        }


def _captures(tr: EventTrace, stem: str) -> dict[int | None, tuple[int, str]]:
    """Last capture per index for ``stem`` (``None`` key for the scalar label)."""
    out: dict[int | None, tuple[int, str]] = {}
    for e in tr.events:
        if e.kind != "timestamp_capture":
            continue
        if e.label == stem:
            out[None] = (e.tick, e.element)
        elif e.label.startswith(stem + "[") and e.label.endswith("]"):
            idx = e.label[len(stem) + 1:-1]
            if idx.isdigit():
                out[int(idx)] = (e.tick, e.element)
    if not out:
        raise MissingTimestamp(stem)
    return out


def _last_sample(mc: MachineConfig, tick: int, element: str) -> int:
    el = mc.element(element)
    return tick + el.time_of_flight + el.sampling_window


def extract_latency(tr: EventTrace, spec: BenchmarkSpec, mc: MachineConfig,
                    cm: CostModel | None = None) -> LatencyReport:
    """Measured feedback latency for one benchmark run.

    When ``cm`` is given the breakdown lists the oracle's components plus a
    ``slack`` entry holding whatever the oracle does not account for, so the
    entries always sum to the measured latency.
    """
    re = _captures(tr, "re_time")
    ce = _captures(tr, "ce_time")
    re_last = {k: _last_sample(mc, t, el) for k, (t, el) in re.items()}
    ce_tick = {k: t for k, (t, _) in ce.items()}

    if spec.variant == "distributed":
        missing = set(ce_tick) - set(re_last)
        if missing:
            raise MissingTimestamp(f"re_time[{min(missing)}]")
        per = {k: ce_tick[k] - re_last[k] for k in ce_tick}
        latency = max(per.values())
    elif spec.variant == "single" and None in ce_tick:
        latency = ce_tick[None] - max(re_last.values())
    else:
        first = ce_tick.get(0, ce_tick.get(None))
        if first is None:
            raise MissingTimestamp("ce_time[0]")
        latency = first - max(re_last.values())

    breakdown: dict[str, int] = {}
    if cm is not None:
        # the BM12 path after the final iteration does not depend on the count
        breakdown = predict_breakdown(cm, spec, k=0 if spec.family == "BM12" else None)
        breakdown["slack"] = latency - sum(breakdown.values())

    def _fmt(d: dict):
        return d[None] if list(d) == [None] else [d[k] for k in sorted(d)]

    return LatencyReport(
        spec=spec,
        feedback_latency=latency,
        component_breakdown=breakdown,
        timestamps={"re_time": _fmt({k: t for k, (t, _) in re.items()}), "ce_time": _fmt(ce_tick)},
        seed=tr.seed,
    )
