"""Closed-form critical-path latency for every benchmark variant.

The oracle is written against the cost model only; it never runs the
simulator. Each entry of the breakdown names one cost on the path from the
last input sample to the first output sample of the dependent pulse.
"""

from __future__ import annotations

from ..sim.config import CostModel
from .spec import BenchmarkSpec

READOUT_LENGTH = 200


class NotDeterministic(ValueError):
    """The latency depends on plant behavior the oracle was not told about."""


def _add(out: dict[str, int], name: str, ticks: int) -> None:
    out[name] = out.get(name, 0) + int(ticks)


def predict_breakdown(cm: CostModel, spec: BenchmarkSpec, k: int | None = None,
                      readout_length: int = READOUT_LENGTH) -> dict[str, int]:
    """Per-component ticks on the critical path; the values sum to :func:`predict_latency`."""
    if spec.family == "BM12" and k is None:
        raise NotDeterministic("BM12 loop count depends on the plant; pass k")
    if k is not None and k < 0:
        raise ValueError("k must be >= 0")
    d, a, lut = cm.discrimination_cost, cm.arithmetic_cost_per_op, cm.lut_cost
    b, p, i = cm.bin2dec_cost_per_bit, cm.param_update_cost, cm.issue_cost
    n = spec.n_inout
    out: dict[str, int] = {}
    fam, var, kind = spec.family, spec.variant, spec.kind

    if fam == "BM11":
        _add(out, "discrimination", d)
        if var in ("aggregated", "aggregated_int"):
            _add(out, "arith", a)
            _add(out, "comm", cm.comm(n))
    elif fam == "BM12":
        # the loop exit test is an equality comparison, charged as arithmetic
        _add(out, "discrimination", d)
        if var == "aggregated":
            _add(out, "comm", cm.comm(n))
            _add(out, "arith", a)
        _add(out, "arith", a)
        _add(out, "branch", cm.branch_cost)
    elif fam == "BM13":
        if kind == "threshold":
            # the threshold lookup overlaps the second readout
            _add(out, "readout_overlap", max(0, d + lut - readout_length))
            _add(out, "discrimination", d)
        elif kind == "binary_rep":
            _add(out, "discrimination", d)
            _add(out, "bin2dec", 16 * b)
            _add(out, "comm", cm.comm(1))
            _add(out, "arith", a)
            _add(out, "param_update", p)
        elif var == "aggregated":
            _add(out, "discrimination", d)
            _add(out, "bin2dec", b)  # one bit per source
            _add(out, "comm", cm.comm(n))
            _add(out, "arith", 2 * a if kind == "frequency" else a)
            _add(out, "param_update", p)
        else:
            _add(out, "discrimination", d)
            _add(out, "lut", lut)
            _add(out, "param_update", p)
    else:
        q = spec.bm21
        bins = q.bins
        _add(out, "discrimination", d)
        _add(out, "bin2dec", b)  # one bit per source
        _add(out, "comm", 2 * cm.comm(q.n_in))  # histogram index, then matrix product
        _add(out, "lut", lut)  # dynamic histogram address
        _add(out, "arith", a)  # histogram increment
        _add(out, "arith", bins * a * (2 if q.normalize else 1))  # residual (and scaling)
        _add(out, "matvec", q.n_out * bins * cm.matvec_cost_per_entry)
        _add(out, "arith", q.n_out * a)  # f += ...
        if q.param_kind == "threshold":
            _add(out, "discrimination", d)
        else:
            _add(out, "param_update", p)
    _add(out, "issue", i)
    return out


def predict_latency(cm: CostModel, spec: BenchmarkSpec, k: int | None = None,
                    readout_length: int = READOUT_LENGTH) -> int:
    return sum(predict_breakdown(cm, spec, k, readout_length).values())
