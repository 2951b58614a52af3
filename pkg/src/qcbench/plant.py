"""Simulated QPU loopback.

Each readout pulse comes back, one time of flight later, as a tone at the
element's intermediate frequency whose sign encodes the qubit state:
+0.5 full scale for state 1 and -0.5 for state 0, in phase with the
demodulation kernel. A positive demodulated value therefore means state 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .signal import DemodSpec, SampleBuffer, carrier_turns, quantize_array

RESPONSE_AMPLITUDE = 0.5


class PlantExhausted(RuntimeError):
    """A scripted plant was asked for more shots than it has."""


def response_buffer(state: int, emit_tick: int, spec: DemodSpec) -> SampleBuffer:
    t0 = emit_tick + spec.time_of_flight
    n = spec.sampling_window
    sign = 1.0 if state else -1.0
    samples = sign * RESPONSE_AMPLITUDE * np.cos(2.0 * np.pi * carrier_turns(spec.if_freq, t0, n))
    return SampleBuffer(t0, quantize_array(samples))


@dataclass
class PlantModel:
    """Base class. Subclasses implement :meth:`draw_state`."""

    history: list[tuple[str, int, int]] = field(default_factory=list, init=False, repr=False)

    def draw_state(self, element: str, shot: int, emit_tick: int, rng: np.random.Generator) -> int:
        raise NotImplementedError

    def respond(self, element: str, shot: int, emit_tick: int, rng: np.random.Generator,
                spec: DemodSpec) -> SampleBuffer:
        state = int(self.draw_state(element, shot, emit_tick, rng))
        self.history.append((element, shot, state))
        return response_buffer(state, emit_tick, spec)

    def observe_play(self, element: str, pulse: str, tick: int, length: int) -> None:
        """Called for every emitted control pulse; stateless plants ignore it."""

    def reset(self) -> None:
        self.history.clear()

    def states(self, element: str) -> list[int]:
        return [s for e, _, s in self.history if e == element]


@dataclass
class ScriptedStates(PlantModel):
    schedule: dict[str, list[int]] = field(default_factory=dict)

    def draw_state(self, element, shot, emit_tick, rng):
        seq = self.schedule.get(element)
        if seq is None:
            raise PlantExhausted(f"no schedule for element {element!r}")
        if shot >= len(seq):
            raise PlantExhausted(f"schedule for {element!r} has {len(seq)} shots, shot {shot} requested")
        return seq[shot]


@dataclass
class Bernoulli(PlantModel):
    p_excited: float | dict[str, float] = 0.5

    def __post_init__(self) -> None:
        ps = self.p_excited.values() if isinstance(self.p_excited, dict) else [self.p_excited]
        if any(not 0.0 <= p <= 1.0 for p in ps):
            raise ValueError("probabilities must lie in [0, 1]")

    def p_for(self, element: str) -> float:
        if isinstance(self.p_excited, dict):
            return self.p_excited.get(element, 0.5)
        return self.p_excited

    def draw_state(self, element, shot, emit_tick, rng):
        return int(rng.random() < self.p_for(element))


@dataclass
class SuccessAfterK(PlantModel):
    """The first ``k`` shots on each element fail; every later shot succeeds."""

    k: int = 0
    success_state: int = 1

    def __post_init__(self) -> None:
        if self.k < 0:
            raise ValueError("k must be >= 0")

    def draw_state(self, element, shot, emit_tick, rng):
        return self.success_state if shot >= self.k else 1 - self.success_state


def rabi_flip_probability(n_pulses: int, amp_error: float) -> float:
    """Flip probability after ``n_pulses`` nominal pi/2 rotations with relative rate error."""
    if n_pulses <= 0 or n_pulses % 2 == 0:
        raise ValueError("n_pulses must be a positive odd integer")
    if abs(amp_error) >= 1:
        raise ValueError("|amp_error| must be < 1")
    return _flip(n_pulses, amp_error)


def _cos_quarter_turns(x: float) -> float:
    """``cos(x * pi / 2)`` with exact reduction, so odd integers give exactly 0."""
    k = round(x)
    f = (x - k) * (math.pi / 2.0)
    return (math.cos(f), -math.sin(f), -math.cos(f), math.sin(f))[k % 4]


def _flip(n: int, eps: float) -> float:
    return 0.5 * (1.0 - _cos_quarter_turns(n * (1.0 + eps)))


@dataclass
class RabiPlant(PlantModel):
    """Counts control pulses since the last readout; the readout flips with the rotation model."""

    amp_error: float = 0.0
    pulse_names: tuple[str, ...] = ()  # empty: every control pulse counts
    _count: dict[str, int] = field(default_factory=dict, init=False, repr=False)

    def observe_play(self, element, pulse, tick, length):
        if not self.pulse_names or pulse in self.pulse_names:
            self._count["*"] = self._count.get("*", 0) + 1

    def draw_state(self, element, shot, emit_tick, rng):
        n = self._count.pop("*", 0)
        return int(rng.random() < _flip(n, self.amp_error))


@dataclass(frozen=True)
class DriftModel:
    kind: str = "constant_offset"  # sinusoid | random_walk | constant_offset
    amplitude: float = 0.0  # Hz, sinusoid
    period: float = 1.0  # s for time-based use, rounds for round-based use
    step_std: float = 0.0  # Hz per step, random walk
    offset: float = 0.0  # Hz, constant offset

    def __post_init__(self) -> None:
        if self.kind not in ("sinusoid", "random_walk", "constant_offset"):
            raise ValueError(f"unknown drift kind {self.kind!r}")
        if self.period <= 0:
            raise ValueError("period must be positive")
        if self.step_std < 0:
            raise ValueError("step_std must be >= 0")

    def path(self, times: np.ndarray, rng: np.random.Generator | None = None) -> np.ndarray:
        """Drift at each of ``times`` (same unit as ``period``); a random walk steps once per entry."""
        times = np.asarray(times, dtype=np.float64)
        if self.kind == "sinusoid":
            return self.amplitude * np.sin(2.0 * np.pi * times / self.period)
        if self.kind == "constant_offset":
            return np.full(times.shape, self.offset)
        if self.step_std == 0 or len(times) == 0:
            return np.zeros(times.shape)
        if rng is None:
            raise ValueError("a random walk needs a generator")
        steps = rng.normal(0.0, self.step_std, size=times.shape)
        steps[0] = 0.0
        return np.cumsum(steps)


def ramsey_probability(detuning_hz: float, tau_s: float) -> float:
    return 0.5 * (1.0 + math.cos(2.0 * math.pi * detuning_hz * tau_s))


@dataclass
class RamseyDriftPlant(PlantModel):
    """Ramsey fringe with a drifting detuning.

    Inside a program run the free-evolution time is the gap between the two
    most recent control pulses, and the drift is evaluated at the readout
    time in seconds.
    """

    drift: DriftModel = field(default_factory=DriftModel)
    offset_detuning: float = 1e6
    _plays: list[tuple[int, int]] = field(default_factory=list, init=False, repr=False)

    def detuning(self, t: float, rng: np.random.Generator | None = None) -> float:
        return self.offset_detuning + float(self.drift.path(np.array([t]), rng)[0])

    def observe_play(self, element, pulse, tick, length):
        self._plays = (self._plays + [(tick, tick + length)])[-2:]

    def draw_state(self, element, shot, emit_tick, rng):
        tau_ticks = 0
        if len(self._plays) == 2:
            tau_ticks = max(0, self._plays[1][0] - self._plays[0][1])
        self._plays = []
        p = ramsey_probability(self.detuning(emit_tick * 1e-9), tau_ticks * 1e-9)
        return int(rng.random() < p)
