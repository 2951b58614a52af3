"""Discrete-event execution of a checked program.

Timing model
------------
Every element owns a timeline (the tick at which it is next free). Classical
values carry a :class:`Dep` recording when they become usable: values that
do not derive from a measurement are static and cost nothing, while each
operation with a data-dependent operand adds its cost-model duration.

A timeline instruction (play or measure) requests a start tick equal to the
readiness of everything it depends on (control-flow decisions, condition,
amplitude and pending parameter updates of its element) plus ``issue_cost``.
Outside ``strict_timing`` it starts at the later of its element's timeline
and that request. Inside a strict block the first instruction on each
element is placed the same way (a fixed ``wait`` or an ``align`` also counts
as claiming the element); later ones must start exactly where the
element's previous instruction ended unless a ``wait(max_time=...)`` is
pending, otherwise the run aborts with :class:`StrictTimingViolation`.

A pending ``wait(max_time=L)`` stretches to the next instruction's request.
``L`` bounds the feedback latency: the request minus the later of the wait's
start and the newest input sample the request depends on.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..fixedpoint import Fixed, MAX_VALUE, quantize_raw
from ..lang import ast as A
from ..lang import semantics as S
from ..lang.checker import TypedProgram
from ..lang.semantics import RuntimeFault
from ..plant import PlantExhausted, PlantModel
from ..signal import demodulate, synthesize
from .config import CostModel, MachineConfig
from .rng import stream
from .trace import Event, EventTrace

__all__ = [
    "Dep", "run", "SimulationError", "StrictTimingViolation", "MaxLatencyExceeded",
    "RuntimeFault", "PlantExhausted",
]

RANDOM_SCALE = 2.0 ** -10


class SimulationError(RuntimeError):
    trace: EventTrace | None = None


class StrictTimingViolation(SimulationError):
    def __init__(self, element: str, gap: int, tick: int, block: int):
        self.element, self.gap, self.tick, self.block = element, gap, tick, block
        super().__init__(f"strict_timing violation on {element!r} at tick {tick}: "
                         f"inputs ready {gap} ticks late; add a wait")


class MaxLatencyExceeded(SimulationError):
    def __init__(self, element: str, required: int, limit: int):
        self.element, self.required, self.limit = element, required, limit
        super().__init__(f"wait(max_time={limit}) on {element!r}: feedback needs {required} ticks")


@dataclass(frozen=True)
class Dep:
    ready: int | None = None  # None: static
    input_tick: int | None = None  # newest input sample this value derives from
    sources: frozenset[str] = frozenset()  # readout elements it derives from

    @property
    def dynamic(self) -> bool:
        return self.ready is not None


STATIC = Dep()


def _max(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return a if a >= b else b


def join(*deps: Dep) -> Dep:
    ready = inp = None
    sources: frozenset[str] = frozenset()
    for d in deps:
        if d.ready is None:
            continue
        ready = _max(ready, d.ready)
        inp = _max(inp, d.input_tick)
        sources = sources | d.sources
    if ready is None:
        return STATIC
    return Dep(ready, inp, sources)


def after(d: Dep, cost: int) -> Dep:
    if d.ready is None:
        return d
    return Dep(d.ready + cost, d.input_tick, d.sources)


def merged(d) -> Dep:
    """Join a nested dependency structure into one Dep."""
    if isinstance(d, Dep):
        return d
    return join(*(merged(x) for x in d))


def _fill(d: Dep, like):
    if isinstance(like, list):
        return [_fill(d, x) for x in like]
    return d


def _bits_per_source(d) -> int:
    """Largest number of entries of a dependency vector that derive from one source."""
    flat = [d] if isinstance(d, Dep) else [merged(x) for x in d]
    counts: dict[str, int] = {}
    for x in flat:
        for src in x.sources:
            counts[src] = counts.get(src, 0) + 1
    return max(counts.values(), default=len(flat))


def _size(v) -> int:
    if isinstance(v, list):
        return sum(_size(x) for x in v)
    return 1


@dataclass
class _Pending:
    t0: int
    limit: int
    block: int | None


@dataclass
class _Channel:
    freq: float
    phase: float = 0.0  # turns
    dc: float = 0.0


class _Executor:
    def __init__(self, tp: TypedProgram, mc: MachineConfig, cm: CostModel, plant: PlantModel,
                 seed: int, capture_waveforms: bool, max_steps: int):
        self.tp, self.mc, self.cm, self.plant, self.seed = tp, mc, cm, plant, seed
        self.capture = capture_waveforms
        self.max_steps = max_steps
        self.steps = 0
        self.plant_rng = stream(seed, "plant")
        self.program_rng = stream(seed, "program")
        self.env: dict[str, object] = {}
        self.deps: dict[str, object] = {}
        self.floor: dict[str, Dep] = {}
        self.t: dict[str, int] = {e: 0 for e in mc.elements}
        self.pending: dict[str, _Pending] = {}
        self.param_dep: dict[str, Dep] = {}
        self.channels = {n: _Channel(e.if_freq) for n, e in mc.elements.items()}
        self.shots: dict[str, int] = {}
        self.gate = STATIC
        self.block: int | None = None
        self.block_count = 0
        self.touched: set[str] = set()
        self.events: list[Event] = []
        self.waveforms: dict[str, list] = {}

    # -- events --------------------------------------------------------------
    def emit(self, kind, element, tick, label="", end=None, block=None):
        self.events.append(Event(kind, element, int(tick), label, end, block))

    def saturation(self, label: str, dep: Dep) -> None:
        tick = dep.ready if dep.dynamic else max(self.t.values(), default=0)
        self.emit("saturation", "", tick, label)

    def trace(self) -> EventTrace:
        order = sorted(range(len(self.events)), key=lambda k: (self.events[k].tick, k))
        return EventTrace([self.events[k] for k in order], dict(self.env), self.seed, self.waveforms)

    # -- initialisation ------------------------------------------------------
    def init_vars(self) -> None:
        decls = {d.name: d for d in self.tp.program.declarations}
        for name, vt in self.tp.var_types.items():
            d = decls[name]
            value = S.default_value(vt.kind, vt.shape)
            init = d.init
            if isinstance(init, A.Call) and init.func in A.RANDOM_INITS:
                value = self.random_matrix(init.func, vt.shape)
            elif isinstance(init, A.ListInit):
                value = [self.static_item(x, vt.kind, name) for x in init.items]
            elif init is not None:
                value = self.static_item(init, vt.kind, name)
            self.env[name] = value
            self.deps[name] = _fill(STATIC, value)
            self.floor[name] = STATIC

    def static_item(self, e: A.Expr, kind: str, name: str):
        if kind == "int" and isinstance(e, A.FixedLit):
            return S.coerce_store("int", int(e.value), [])
        sat: list = []
        v, _ = self.eval(e)
        v = S.coerce_store(kind, v, sat)
        if sat:
            self.saturation(name, STATIC)
        return v

    def random_matrix(self, func: str, shape: tuple[int, int]) -> list:
        rows, cols = shape
        draws = self.program_rng.uniform(-RANDOM_SCALE, RANDOM_SCALE, size=(rows, cols))
        out = []
        for i in range(rows):
            row = []
            for j in range(cols):
                keep = (func == "random"
                        or (func == "random_diag" and i == j)
                        or (func == "random_block2" and i // 2 == j // 2))
                row.append(Fixed(quantize_raw(float(draws[i, j]))[0]) if keep else Fixed(0))
            out.append(row)
        return out

    # -- expressions ---------------------------------------------------------
    def read_var(self, name: str):
        if name in self.tp.constants:
            return self.tp.constants[name], STATIC
        fl = self.floor[name]
        d = self.deps[name]
        if fl.dynamic:
            d = _map_join(d, fl)
        return self.env[name], d

    def eval(self, e: A.Expr):
        sat: list = []
        v, d = self._eval(e, sat)
        if sat:
            self.saturation("expr", merged(d))
        return v, d

    def _eval(self, e: A.Expr, sat: list):
        cm = self.cm
        if isinstance(e, A.IntLit):
            return e.value, STATIC
        if isinstance(e, A.FixedLit):
            raw, s = quantize_raw(e.value)
            if s:
                sat.append(True)
            return Fixed(raw), STATIC
        if isinstance(e, A.BoolLit):
            return e.value, STATIC
        if isinstance(e, A.Name):
            return self.read_var(e.id)
        if isinstance(e, A.Index):
            if isinstance(e.base, A.Name) and e.base.id not in self.tp.constants:
                base_v, base_d = self.env[e.base.id], self.deps[e.base.id]
                fl = self.floor[e.base.id]
            else:
                base_v, base_d = self._eval(e.base, sat)
                fl = STATIC
            iv, idep = self._eval(e.index, sat)
            v = S.get_item(base_v, iv)
            if idep.dynamic:
                d = _fill(after(join(idep, merged(base_d), fl), cm.lut_cost), v)
            else:
                d = base_d[S.index_of(iv)]
                if fl.dynamic:
                    d = _map_join(d, fl)
            return v, d
        if isinstance(e, A.UnaryOp):
            v, d = self._eval(e.operand, sat)
            out = S.unop(e.op, v, sat)
            return out, self._op_dep(d, out, cm.arithmetic_cost_per_op)
        if isinstance(e, A.BinOp):
            lv, ld = self._eval(e.left, sat)
            rv, rd = self._eval(e.right, sat)
            out = S.binop(e.op, lv, rv, sat)
            if e.op == "*" and isinstance(lv, list) and lv and isinstance(lv[0], list):
                dj = join(merged(ld), merged(rd))
                rows, cols = len(lv), len(lv[0])
                cost = cm.matvec_cost_per_entry * rows * cols + cm.comm(len(dj.sources))
                return out, _fill(after(dj, cost), out)
            if e.op in ("<", ">", "<=", ">="):
                cost = cm.discrimination_cost
            else:
                cost = cm.arithmetic_cost_per_op
            dj = join(merged(ld), merged(rd))
            if isinstance(out, list):
                return out, _fill(after(dj, cost * _size(out)), out)
            return out, after(dj, cost)
        if isinstance(e, A.Call):
            args = [self._eval(a, sat) for a in e.args]
            vals = [a[0] for a in args]
            out = S.call(e.func, vals, sat)
            d0 = merged(args[0][1])
            if e.func == "bin2dec":
                # each source converts its own bits while the gather brings them together
                cost = cm.bin2dec_cost_per_bit * _bits_per_source(args[0][1]) + cm.comm(len(d0.sources))
                return out, after(d0, cost)
            if e.func in ("sum", "and_all"):
                return out, after(d0, cm.arithmetic_cost_per_op + cm.comm(len(d0.sources)))
            if e.func == "lut_lookup":
                idep = args[1][1]
                if idep.dynamic:
                    return out, after(join(idep, d0), cm.lut_cost)
                return out, args[0][1][S.index_of(vals[1])]
            return out, after(d0, cm.arithmetic_cost_per_op)
        raise TypeError(f"cannot evaluate {e!r}")

    def _op_dep(self, d, out, cost: int):
        """Dependency of an (element-wise) op result; vectors are processed sequentially."""
        if isinstance(d, Dep):
            return after(d, cost)
        dj = merged(d)
        return _fill(after(dj, cost * _size(out)), out)

    # -- assignment ----------------------------------------------------------
    def target_path(self, target: A.Expr):
        """(name, [(index value, index dep), ...]) for an lvalue."""
        path = []
        while isinstance(target, A.Index):
            path.append(self.eval(target.index))
            target = target.base
        path.reverse()
        return target.id, path

    def store(self, target: A.Expr, op: str, value, vdep, *, cost_free: bool = False) -> None:
        name, path = self.target_path(target)
        kind = self.tp.var_types[name].kind
        cm = self.cm
        sat: list = []
        dyn_index = any(d.dynamic for _, d in path)
        addr = join(*(d for _, d in path))
        if dyn_index:
            addr = after(addr, cm.lut_cost)
        # locate the container
        cont_v, cont_d = self.env, self.deps
        key = name
        for iv, _ in path:
            cont_v, cont_d = cont_v[key], cont_d[key]
            key = S.index_of(iv)
            if not 0 <= key < len(cont_v):
                raise RuntimeFault(f"index {key} out of range for {name!r}")
        old_v = cont_v[key]
        old_d = cont_d[key]
        if self.floor[name].dynamic:
            old_d = _map_join(old_d, self.floor[name])
        if op == "=":
            new_v = value
            new_d = _map_join(vdep, addr) if addr.dynamic else vdep
        else:
            if op == "++":
                new_v = S.binop("+", old_v, 1, sat)
                vdep = STATIC
            else:
                new_v = S.binop("+" if op == "+=" else "-", old_v, value, sat)
            dj = join(merged(old_d), merged(vdep), addr)
            new_d = _fill(after(dj, cm.arithmetic_cost_per_op * _size(new_v)), new_v)
        if self.gate.dynamic:
            new_d = _map_join(new_d, self.gate)
        new_v = S.coerce_store(kind, new_v, sat)
        cont_v[key] = new_v
        cont_d[key] = new_d
        if dyn_index:
            self.floor[name] = join(self.floor[name], merged(new_d))
        if sat:
            self.saturation(name, merged(new_d))

    # -- timeline ------------------------------------------------------------
    def request(self, element: str, *deps: Dep) -> Dep:
        req = join(self.gate, self.param_dep.get(element, STATIC), *deps)
        return after(req, self.cm.issue_cost)

    def resolve_pending(self, element: str, start: int | None = None) -> None:
        p = self.pending.pop(element, None)
        if p is None:
            return
        end = p.t0 if start is None else start
        self.emit("instruction_issue", element, p.t0, "wait", end, p.block)
        self.t[element] = end

    def start_op(self, element: str, req: Dep) -> int:
        t = self.t[element]
        p = self.pending.get(element)
        if p is not None:
            start = p.t0 if not req.dynamic else max(p.t0, req.ready)
            if req.dynamic:
                ref = max(p.t0, req.input_tick if req.input_tick is not None else p.t0)
                if req.ready - ref > p.limit:
                    raise MaxLatencyExceeded(element, req.ready - ref, p.limit)
            self.resolve_pending(element, start)
        elif not req.dynamic or req.ready <= t:
            start = t
        elif self.block is not None and element in self.touched:
            gap = req.ready - t
            self.emit("strict_violation", element, t, f"gap={gap}", None, self.block)
            raise StrictTimingViolation(element, gap, t, self.block)
        else:
            start = req.ready
        if self.block is not None:
            self.touched.add(element)
        return start

    def capture_ts(self, ts: A.Timestamp | None, element: str, tick: int) -> None:
        if ts is None:
            return
        label = ts.name
        if ts.index is not None:
            iv, _ = self.eval(ts.index)
            label = f"{ts.name}[{S.index_of(iv)}]"
        self.emit("timestamp_capture", element, tick, label)

    # -- statements ----------------------------------------------------------
    def tick_step(self) -> None:
        self.steps += 1
        if self.steps > self.max_steps:
            raise RuntimeFault(f"step limit of {self.max_steps} exceeded")

    def exec_block(self, body) -> None:
        for s in body:
            self.exec(s)

    def branch(self, cond: A.Expr) -> bool:
        v, d = self.eval(cond)
        if d.dynamic:
            self.gate = join(self.gate, after(d, self.cm.branch_cost))
        return bool(v)

    def exec(self, s: A.Stmt) -> None:
        self.tick_step()
        cm = self.cm
        if isinstance(s, A.Assign):
            if s.op == "++":
                self.store(s.target, "++", None, STATIC)
            else:
                v, d = self.eval(s.value)
                self.store(s.target, s.op, v, d)
        elif isinstance(s, A.Play):
            self.exec_play(s)
        elif isinstance(s, A.Measure):
            self.exec_measure(s)
        elif isinstance(s, A.Wait):
            if s.duration is not None:
                d, _ = self.eval(s.duration)
                if d < 0:
                    raise RuntimeFault(f"negative wait duration {d}")
                for e in s.elements:
                    self.resolve_pending(e)
                    self.emit("instruction_issue", e, self.t[e], "wait", self.t[e] + d, self.block)
                    self.t[e] += d
                    if self.block is not None:
                        self.touched.add(e)
            else:
                limit, _ = self.eval(s.max_time)
                for e in s.elements:
                    self.resolve_pending(e)
                    self.pending[e] = _Pending(self.t[e], int(limit), self.block)
        elif isinstance(s, A.Align):
            target = max(self.t[e] for e in s.elements)
            limits = [self.pending[e].limit for e in s.elements if e in self.pending]
            for e in s.elements:
                self.pending.pop(e, None)
                self.emit("instruction_issue", e, self.t[e], "align", target, self.block)
                self.t[e] = target
                if self.block is not None:
                    self.touched.add(e)
                if limits:
                    self.pending[e] = _Pending(target, max(limits), self.block)
        elif isinstance(s, A.StrictTiming):
            self.block_count += 1
            outer = (self.block, self.touched)
            self.block, self.touched = self.block_count, set()
            self.exec_block(s.body)
            self.block, self.touched = outer
        elif isinstance(s, A.If):
            if self.branch(s.cond):
                self.exec_block(s.body)
            else:
                self.exec_block(s.orelse)
        elif isinstance(s, A.While):
            while self.branch(s.cond):
                self.exec_block(s.body)
                self.tick_step()
        elif isinstance(s, A.For):
            v, d = self.eval(s.init)
            self.store(A.Name(s.var), "=", v, d)
            while self.branch(s.cond):
                self.exec_block(s.body)
                v, d = self.eval(s.step)
                self.store(A.Name(s.var), "=", v, d)
                self.tick_step()
        elif isinstance(s, (A.UpdateFrequency, A.FrameRotation, A.SetDcOffset)):
            expr = s.angle if isinstance(s, A.FrameRotation) else s.value
            v, d = self.eval(expr)
            d = join(d, self.gate)
            ch = self.channels[s.element]
            if isinstance(s, A.UpdateFrequency):
                ch.freq = float(v)
                label = "update_frequency"
            elif isinstance(s, A.FrameRotation):
                ch.phase = (ch.phase + float(v)) % 1.0
                label = "frame_rotation_2pi"
            else:
                ch.dc = float(v)
                label = "set_dc_offset"
            if d.dynamic:
                done = after(d, cm.param_update_cost)
                self.param_dep[s.element] = join(self.param_dep.get(s.element, STATIC), done)
                tick = done.ready
            else:
                tick = self.t[s.element]
            self.emit("instruction_issue", s.element, tick, label, None, self.block)
        else:
            raise TypeError(f"cannot execute {s!r}")

    def exec_play(self, s: A.Play) -> None:
        cm = self.cm
        cond_v, cond_d = (True, STATIC) if s.condition is None else self.eval(s.condition)
        amp_v, amp_d = (1.0, STATIC) if s.amp_scale is None else self.eval(s.amp_scale)
        amp_d = after(amp_d, cm.param_update_cost)
        start = self.start_op(s.element, self.request(s.element, cond_d, amp_d))
        pulse = self.mc.pulses[s.pulse]
        end = start + pulse.length
        self.t[s.element] = end
        if cond_v:
            self.emit("output_sample_start", s.element, start, s.pulse)
        self.emit("instruction_issue", s.element, start, "play", end, self.block)
        self.capture_ts(s.timestamp, s.element, start)
        if not cond_v:
            return
        self.plant.observe_play(s.element, s.pulse, start, pulse.length)
        ch = self.channels[s.element]
        scale = float(amp_v)
        if abs(pulse.amplitude * scale) + abs(ch.dc) >= MAX_VALUE:
            self.emit("saturation", s.element, start, s.pulse)
        if self.capture:
            buf = synthesize(pulse, ch.phase, start, if_freq=ch.freq, amp_scale=scale, dc_offset=ch.dc)
            self.waveforms.setdefault(s.element, []).append(buf)

    def exec_measure(self, s: A.Measure) -> None:
        start = self.start_op(s.element, self.request(s.element))
        pulse = self.mc.pulses[s.pulse]
        self.t[s.element] = start + pulse.length
        self.emit("output_sample_start", s.element, start, s.pulse)
        self.emit("instruction_issue", s.element, start, "measure", start + pulse.length, self.block)
        self.capture_ts(s.timestamp, s.element, start)
        spec = self.mc.elements[s.element].demod_spec()
        shot = self.shots.get(s.element, 0)
        self.shots[s.element] = shot + 1
        buf = self.plant.respond(s.element, shot, start, self.plant_rng, spec)
        value = demodulate(buf, spec)
        last = start + spec.time_of_flight + spec.sampling_window
        self.emit("input_last_sample", s.element, last, s.pulse)
        self.store(s.target, "=", value, Dep(last, last, frozenset([s.element])))

    def run(self) -> EventTrace:
        self.init_vars()
        self.exec_block(self.tp.program.body)
        for e in sorted(self.pending):
            self.resolve_pending(e)
        return self.trace()


def _map_join(d, extra: Dep):
    if isinstance(d, Dep):
        return join(d, extra)
    return [_map_join(x, extra) for x in d]


def run(tp: TypedProgram, mc: MachineConfig, cm: CostModel, plant: PlantModel, seed: int,
        *, capture_waveforms: bool = False, max_steps: int = 10_000_000) -> EventTrace:
    """Execute ``tp`` and return its event trace.

    On :class:`SimulationError` the partial trace is attached as ``exc.trace``.
    """
    if seed is None:
        raise ValueError("a seed is required")
    ex = _Executor(tp, mc, cm, plant, int(seed), capture_waveforms, max_steps)
    try:
        return ex.run()
    except (SimulationError, RuntimeFault, PlantExhausted) as exc:
        exc.trace = ex.trace()
        raise
