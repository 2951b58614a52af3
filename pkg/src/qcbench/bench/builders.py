"""Program builders for every benchmark variant.

Builders emit source text with the per-channel meta-loops unrolled and
then parse it, so every benchmark program is also valid ``.qcl`` input.
"""

from __future__ import annotations

from ..lang import ast as A
from ..lang.parser import parse_program
from ..plant import Bernoulli, PlantModel, SuccessAfterK
from ..sim.config import ChannelDefaults, MachineConfig, default_machine
from .spec import BenchmarkSpec

I = "    "
READOUT_PULSE_LENGTH = 200


class _Src:
    def __init__(self, spec: BenchmarkSpec):
        self.spec = spec
        self.lines: list[str] = []

    def add(self, depth: int, text: str) -> None:
        self.lines.append(I * depth + text)

    def text(self) -> str:
        return "".join(line + "\n" for line in self.lines)

    def ro(self, i: int | None = None) -> str:
        return "readout_element" if i is None else f"readout_element[{i}]"

    def ctl(self, i: int | None = None) -> str:
        return "control_element" if i is None else f"control_element[{i}]"

    def channels(self) -> range:
        return range(self.spec.n_inout)

    def all_elements(self) -> str:
        n = self.spec.n_inout
        return ", ".join([self.ro(i) for i in range(n)] + [self.ctl(i) for i in range(n)])

    def readouts(self) -> str:
        return ", ".join(self.ro(i) for i in self.channels())

    def controls(self) -> str:
        return ", ".join(self.ctl(i) for i in self.channels())

    def measure_all(self, depth: int, target: str = "x", then: str | None = None) -> None:
        for i in self.channels():
            self.add(depth, f"measure(readout_pulse, {self.ro(i)}, demod({target}[{i}]), "
                            f"timestamp -> re_time[{i}])")
            if then:
                self.add(depth, then.format(i=i))


def _bm11(src: _Src) -> None:
    s, n = src.spec, src.spec.n_inout
    src.add(0, f"max_latency = {s.max_latency}")
    if s.variant == "single":
        src.add(0, "fixed x")
        src.add(0, "bool s")
        src.add(0, "strict_timing:")
        src.add(1, "measure(readout_pulse, readout_element, demod(x), timestamp -> re_time)")
        src.add(1, "s = x > 0")
        src.add(1, "wait(max_time = max_latency, control_element)")
        src.add(1, "play(control_pulse, control_element, condition = s, timestamp -> ce_time)")
        return
    src.add(0, f"fixed[{n}] x")
    if s.variant == "distributed":
        src.add(0, f"bool[{n}] s_ar")
        src.add(0, "strict_timing:")
        for i in src.channels():
            src.add(1, f"measure(readout_pulse, {src.ro(i)}, demod(x[{i}]), timestamp -> re_time[{i}])")
            src.add(1, f"s_ar[{i}] = x[{i}] > 0")
            src.add(1, f"wait(max_time = max_latency, {src.ctl(i)})")
            src.add(1, f"play(control_pulse, {src.ctl(i)}, condition = s_ar[{i}], "
                       f"timestamp -> ce_time[{i}])")
        return
    if s.variant == "aggregated":
        src.add(0, f"bool[{n}] s_ar")
    src.add(0, "bool s")
    src.add(0, "strict_timing:")
    if s.variant == "aggregated":
        src.measure_all(1, then="s_ar[{i}] = x[{i}] > 0")
        src.add(1, "s = and_all(s_ar)")
    else:
        src.measure_all(1)
        src.add(1, "s = sum(x) > 0")
    src.add(1, f"wait(max_time = max_latency, {src.all_elements()})")
    src.add(1, f"align({src.all_elements()})")
    for i in src.channels():
        src.add(1, f"play(control_pulse, {src.ctl(i)}, condition = s, timestamp -> ce_time[{i}])")


def _bm12(src: _Src) -> None:
    s, n = src.spec, src.spec.n_inout
    src.add(0, f"max_latency = {s.max_latency}")
    if s.variant == "single":
        src.add(0, "fixed x")
        src.add(0, "bool s")
        src.add(0, "s = False")
        src.add(0, "strict_timing:")
        src.add(1, "while s == False:")
        src.add(2, "measure(readout_pulse, readout_element, demod(x), timestamp -> re_time)")
        src.add(2, "s = x < 0")
        src.add(2, "wait(max_time = max_latency, readout_element)")
        src.add(1, "align(control_element, readout_element)")
        src.add(1, "play(control_pulse, control_element, timestamp -> ce_time)")
        return
    src.add(0, f"fixed[{n}] x")
    src.add(0, f"bool[{n}] s_ar")
    if s.variant == "distributed":
        src.add(0, "int i")
        src.add(0, f"for (i = 0, i < {n}, i + 1):")
        src.add(1, "s_ar[i] = False")
        src.add(0, "strict_timing:")
        for i in src.channels():
            src.add(1, f"while s_ar[{i}] == False:")
            src.add(2, f"measure(readout_pulse, {src.ro(i)}, demod(x[{i}]), timestamp -> re_time[{i}])")
            src.add(2, f"s_ar[{i}] = x[{i}] > 0")
            src.add(2, f"wait(max_time = max_latency, {src.ro(i)})")
            src.add(1, f"align({src.ctl(i)}, {src.ro(i)})")
            src.add(1, f"play(control_pulse, {src.ctl(i)}, timestamp -> ce_time[{i}])")
        return
    src.add(0, "bool s = False")
    src.add(0, "strict_timing:")
    src.add(1, "while s == False:")
    src.measure_all(2, then="s_ar[{i}] = x[{i}] > 0")
    src.add(2, "s = and_all(s_ar)")
    src.add(2, f"wait(max_time = max_latency, {src.readouts()})")
    src.add(1, f"align({src.all_elements()})")
    for i in src.channels():
        src.add(1, f"play(control_pulse, {src.ctl(i)}, timestamp -> ce_time[{i}])")


_LUTS = {
    "frame_lut": ("fixed", "frame_lut", "[0.1, 0.2]"),
    "frequency": ("int", "frequency_lut", "[50e6, 70e6]"),
    "amplitude": ("fixed", "amp_lut", "[0.7, 0.9]"),
    "threshold": ("fixed", "threshold_lut", "[0.1, 0.2]"),
}


def _bm13(src: _Src) -> None:
    s, n, kind = src.spec, src.spec.n_inout, src.spec.kind
    src.add(0, f"max_latency = {s.max_latency}")
    if kind == "binary_rep":
        src.add(0, "fixed[16] x")
        src.add(0, "bool[16] s")
        src.add(0, "fixed frame_rot_ang")
        src.add(0, "int i")
        src.add(0, "strict_timing:")
        src.add(1, "for (i = 0, i < 16, i + 1):")
        src.add(2, "measure(readout_pulse, readout_element, demod(x[i]), timestamp -> re_time[i])")
        src.add(2, "s[i] = x[i] > 0")
        src.add(1, "frame_rot_ang = bin2dec(s) / 2 ** 16")
        src.add(1, "wait(max_time = max_latency, control_element)")
        src.add(1, "frame_rotation_2pi(frame_rot_ang, control_element)")
        src.add(1, "play(control_pulse, control_element, timestamp -> ce_time)")
        return
    if s.variant == "single":  # frame_lut
        src.add(0, "fixed x")
        src.add(0, "int s")
        src.add(0, "fixed frame_rot_ang")
        src.add(0, "fixed[2] frame_lut = [0.1, 0.2]")
        src.add(0, "strict_timing:")
        src.add(1, "measure(readout_pulse, readout_element, demod(x), timestamp -> re_time)")
        src.add(1, "s = x > 0")
        src.add(1, "frame_rot_ang = frame_lut[s]")
        src.add(1, "wait(max_time = max_latency, control_element)")
        src.add(1, "frame_rotation_2pi(frame_rot_ang, control_element)")
        src.add(1, "play(control_pulse, control_element, timestamp -> ce_time)")
        return
    if s.variant == "distributed":
        lut_kind, lut, values = _LUTS[kind]
        if kind == "threshold":
            src.add(0, f"fixed[{n}] x1")
            src.add(0, f"fixed[{n}] x2")
            src.add(0, f"fixed[{n}] threshold_ar")
            src.add(0, f"fixed[2] threshold_lut = {values}")
            src.add(0, f"bool[{n}] s_ar")
            src.add(0, "strict_timing:")
            for i in src.channels():
                src.add(1, f"measure(readout_pulse, {src.ro(i)}, demod(x1[{i}]), timestamp -> re_time[{i}])")
                src.add(1, f"threshold_ar[{i}] = threshold_lut[x1[{i}] > 0]")
                src.add(1, f"measure(readout_pulse, {src.ro(i)}, demod(x2[{i}]), timestamp -> re_time[{i}])")
                src.add(1, f"s_ar[{i}] = x2[{i}] > threshold_ar[{i}]")
                src.add(1, f"wait(max_time = max_latency, {src.ctl(i)})")
                src.add(1, f"play(control_pulse, {src.ctl(i)}, condition = s_ar[{i}], "
                           f"timestamp -> ce_time[{i}])")
            return
        arr = {"frame_lut": "frame_rot_ang_ar", "frequency": "frequency_ar", "amplitude": "amp_ar"}[kind]
        src.add(0, f"fixed[{n}] x")
        src.add(0, f"{lut_kind}[{n}] {arr}")
        src.add(0, f"{lut_kind}[2] {lut} = {values}")
        src.add(0, "strict_timing:")
        for i in src.channels():
            src.add(1, f"measure(readout_pulse, {src.ro(i)}, demod(x[{i}]), timestamp -> re_time[{i}])")
            src.add(1, f"{arr}[{i}] = {lut}[x[{i}] > 0]")
            src.add(1, f"wait(max_time = max_latency, {src.ctl(i)})")
            if kind == "frame_lut":
                src.add(1, f"frame_rotation_2pi({arr}[{i}], {src.ctl(i)})")
                src.add(1, f"play(control_pulse, {src.ctl(i)}, timestamp -> ce_time[{i}])")
            elif kind == "frequency":
                src.add(1, f"update_frequency({src.ctl(i)}, {arr}[{i}])")
                src.add(1, f"play(control_pulse, {src.ctl(i)}, timestamp -> ce_time[{i}])")
            else:
                src.add(1, f"play(control_pulse * amp({arr}[{i}]), {src.ctl(i)}, "
                           f"timestamp -> ce_time[{i}])")
        return
    # aggregated: bin2dec over all discriminated bits
    src.add(0, f"fixed[{n}] x")
    src.add(0, f"bool[{n}] s_ar")
    var = {"frame_lut": ("fixed", "frame_rot_ang"), "frequency": ("int", "frequency_update"),
           "amplitude": ("fixed", "amp_update")}[kind]
    src.add(0, f"{var[0]} {var[1]}")
    src.add(0, "strict_timing:")
    src.measure_all(1, then="s_ar[{i}] = x[{i}] > 0")
    if kind == "frequency":
        src.add(1, f"frequency_update = 100000000 * bin2dec(s_ar) // 2 ** {n}")
    else:
        src.add(1, f"{var[1]} = bin2dec(s_ar) / 2 ** {n}")
    src.add(1, f"align({src.all_elements()})")
    src.add(1, f"wait(max_time = max_latency, {src.controls()})")
    if kind == "frame_lut":
        for i in src.channels():
            src.add(1, f"frame_rotation_2pi(frame_rot_ang, {src.ctl(i)})")
            src.add(1, f"play(control_pulse, {src.ctl(i)}, timestamp -> ce_time[{i}])")
    elif kind == "frequency":
        for i in src.channels():
            src.add(1, f"update_frequency({src.ctl(i)}, frequency_update)")
        src.add(1, f"align({src.controls()})")
        for i in src.channels():
            src.add(1, f"play(control_pulse, {src.ctl(i)}, timestamp -> ce_time[{i}])")
    else:
        for i in src.channels():
            src.add(1, f"play(control_pulse * amp(amp_update), {src.ctl(i)}, "
                       f"timestamp -> ce_time[{i}])")


_RANDOM_FN = {"dense": "random", "diagonal": "random_diag", "block_diagonal": "random_block2"}


def _bm21(src: _Src) -> None:
    p = src.spec.bm21
    n_in, n_out, bins = p.n_in, p.n_out, p.bins
    pad = p.shot_period - READOUT_PULSE_LENGTH
    if pad < 0:
        from .spec import InvalidSpec

        raise InvalidSpec(f"shot_period must be at least {READOUT_PULSE_LENGTH} ticks")
    ro = lambda k: f"readout_element[{k}]"  # noqa: E731
    ctl = lambda k: f"control_element[{k}]"  # noqa: E731
    src.add(0, f"bool[{n_in}] s")
    src.add(0, f"fixed[{n_out}][{bins}] T = {_RANDOM_FN[p.matrix_form]}({n_out}, {bins})")
    src.add(0, f"int[{bins}] H")
    if p.h0 is None or not any(p.h0):
        src.add(0, f"int[{bins}] H0")
    else:
        src.add(0, f"int[{bins}] H0 = [{', '.join(str(int(v)) for v in p.h0)}]")
    src.add(0, f"fixed[{n_out}] f")
    src.add(0, f"fixed[{n_in}] x")
    src.add(0, "int i")
    if p.param_kind == "threshold":
        src.add(0, f"bool[{n_out}] r")
    src.add(0, f"for (i = 0, i < {bins}, i + 1):")
    src.add(1, "H[i] = 0")
    src.add(0, "strict_timing:")
    src.add(1, f"for (i = 0, i < {p.n_shots}, i + 1):")
    for k in range(n_in):
        src.add(2, f"measure(readout_pulse, {ro(k)}, demod(x[{k}]), timestamp -> re_time[{k}])")
        src.add(2, f"s[{k}] = x[{k}] > 0")
    src.add(2, "H[bin2dec(s)]++")
    src.add(2, f"wait({pad}, {', '.join(ro(k) for k in range(n_in))})")
    if p.normalize:
        src.add(0, f"f += T * ((H - H0) / {p.n_shots})")
    else:
        src.add(0, "f += T * (H - H0)")
    if p.param_kind == "frequency":
        for k in range(n_out):
            src.add(0, f"update_frequency({ctl(k)}, f[{k}])")
    elif p.param_kind == "dc_offset":
        for k in range(n_out):
            src.add(0, f"set_dc_offset({ctl(k)}, f[{k}])")
    elif p.param_kind == "threshold":
        for k in range(n_out):
            src.add(0, f"r[{k}] = x[{k}] > f[{k}]")
    src.add(0, "strict_timing:")
    for k in range(n_out):
        if p.param_kind == "amplitude":
            src.add(1, f"play(control_pulse * amp(f[{k}]), {ctl(k)}, timestamp -> ce_time[{k}])")
        elif p.param_kind == "threshold":
            src.add(1, f"play(control_pulse, {ctl(k)}, condition = r[{k}], timestamp -> ce_time[{k}])")
        else:
            src.add(1, f"play(control_pulse, {ctl(k)}, timestamp -> ce_time[{k}])")


_BUILDERS = {"BM11": _bm11, "BM12": _bm12, "BM13": _bm13, "BM21": _bm21}


def benchmark_source(spec: BenchmarkSpec) -> str:
    src = _Src(spec)
    _BUILDERS[spec.family](src)
    return src.text()


def build_benchmark(spec: BenchmarkSpec) -> A.Program:
    return parse_program(benchmark_source(spec))


def machine_for(spec: BenchmarkSpec, channel: ChannelDefaults | None = None) -> MachineConfig:
    """Default machine with exactly the channels ``spec`` uses."""
    if spec.family == "BM21":
        n = max(spec.bm21.n_in, spec.bm21.n_out)
        return default_machine(n, indexed=True, channel=channel)
    return default_machine(spec.n_inout, indexed=spec.indexed, channel=channel)


def success_state(spec: BenchmarkSpec) -> int:
    """Discriminated state that ends a repeat-until-success loop.

    The single-channel loop exits on ``x < 0`` (state 0), the multi-channel
    loops on ``x > 0`` (state 1).
    """
    return 0 if spec.variant == "single" else 1


def default_plant(spec: BenchmarkSpec, k: int = 2, p_excited: float = 0.5) -> PlantModel:
    if spec.family == "BM12":
        return SuccessAfterK(k=k, success_state=success_state(spec))
    return Bernoulli(p_excited)
