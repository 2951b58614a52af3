"""Pulse synthesis and readout demodulation at the intermediate frequency.

One sample per tick, one tick per nanosecond. Only the in-phase path is
modelled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .fixedpoint import FRAC_BITS, ONE, RAW_MAX, RAW_MIN, Fixed, _round_div, saturate

SAMPLE_PERIOD_S = 1e-9
TICKS_PER_SECOND = 10**9


class InvalidPulse(ValueError):
    pass


class WindowOverrun(ValueError):
    pass


@dataclass(frozen=True)
class PulseDef:
    name: str
    shape: str  # "gaussian" | "constant"
    length: int
    amplitude: float = 1.0
    sigma: float | None = None
    if_freq: float = 100e6

    def __post_init__(self) -> None:
        if self.shape not in ("gaussian", "constant"):
            raise InvalidPulse(f"unknown envelope shape {self.shape!r}")
        if self.length <= 0:
            raise InvalidPulse(f"pulse {self.name!r}: length must be positive")
        if self.shape == "gaussian" and (self.sigma is None or self.sigma <= 0):
            raise InvalidPulse(f"pulse {self.name!r}: gaussian sigma must be positive")
        if abs(self.amplitude) > 1:
            raise InvalidPulse(f"pulse {self.name!r}: |amplitude| must be <= 1")


@dataclass(frozen=True)
class SampleBuffer:
    t0: int
    raw: np.ndarray  # int64 fixed-point raw samples

    def __len__(self) -> int:
        return len(self.raw)

    @property
    def values(self) -> np.ndarray:
        return self.raw.astype(np.float64) / ONE

    @classmethod
    def from_values(cls, t0: int, values) -> SampleBuffer:
        return cls(t0, quantize_array(np.asarray(values, dtype=np.float64)))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SampleBuffer):
            return NotImplemented
        return self.t0 == other.t0 and np.array_equal(self.raw, other.raw)

    __hash__ = None  # type: ignore[assignment]


@dataclass(frozen=True)
class DemodSpec:
    if_freq: float = 100e6
    sampling_window: int = 200
    time_of_flight: int = 0

    def __post_init__(self) -> None:
        if self.sampling_window <= 0:
            raise ValueError("sampling_window must be positive")
        if self.time_of_flight < 0:
            raise ValueError("time_of_flight must be non-negative")


def quantize_array(x: np.ndarray) -> np.ndarray:
    raw = np.rint(x * ONE)
    return np.clip(raw, RAW_MIN, RAW_MAX).astype(np.int64)


def gaussian_envelope(sigma: float, length: int) -> SampleBuffer:
    """Unit-peak Gaussian centred at (length - 1) / 2."""
    if sigma <= 0 or length <= 0:
        raise InvalidPulse(f"need sigma > 0 and length > 0, got sigma={sigma}, length={length}")
    i = np.arange(length, dtype=np.float64)
    centre = (length - 1) / 2
    env = np.exp(-((i - centre) ** 2) / (2.0 * sigma * sigma))
    env /= env.max()
    return SampleBuffer(0, quantize_array(env))


def constant_envelope(length: int) -> SampleBuffer:
    if length <= 0:
        raise InvalidPulse("length must be positive")
    return SampleBuffer(0, np.full(length, ONE, dtype=np.int64))


def envelope(p: PulseDef) -> SampleBuffer:
    if p.shape == "gaussian":
        return gaussian_envelope(p.sigma, p.length)
    return constant_envelope(p.length)


def carrier_turns(freq: float, t0: int, n: int) -> np.ndarray:
    """Phase of ``cos(2*pi*freq*t)`` in turns (mod 1) for ticks t0 .. t0+n-1."""
    ticks = np.arange(t0, t0 + n, dtype=np.int64)
    if float(freq).is_integer():
        # exact modular phase keeps long timelines precise
        num = (int(freq) * ticks.astype(object)) % TICKS_PER_SECOND
        return np.asarray(num, dtype=np.float64) / TICKS_PER_SECOND
    return np.mod(freq * ticks.astype(np.float64) * SAMPLE_PERIOD_S, 1.0)


def synthesize(
    p: PulseDef,
    frame_phase: float,
    t0: int,
    *,
    if_freq: float | None = None,
    amp_scale: float = 1.0,
    dc_offset: float = 0.0,
) -> SampleBuffer:
    """In-phase output samples of ``p`` starting at tick ``t0``.

    ``frame_phase`` is in turns. ``if_freq`` overrides the pulse's own IF
    (elements may retune it at run time).
    """
    freq = p.if_freq if if_freq is None else if_freq
    env = envelope(p).values
    turns = carrier_turns(freq, t0, p.length) + frame_phase
    samples = p.amplitude * amp_scale * env * np.cos(2.0 * np.pi * turns) + dc_offset
    return SampleBuffer(t0, quantize_array(samples))


@lru_cache(maxsize=256)
def _kernel(freq: float, t0_key: int, n: int) -> np.ndarray:
    return quantize_array(np.cos(2.0 * np.pi * carrier_turns(freq, t0_key, n)))


def _kernel_for(freq: float, t0: int, n: int) -> np.ndarray:
    if float(freq).is_integer() and freq != 0:
        period = TICKS_PER_SECOND // math.gcd(int(freq), TICKS_PER_SECOND)
        return _kernel(freq, t0 % period, n)
    return _kernel(freq, t0, n)


def demodulate(buf: SampleBuffer, spec: DemodSpec) -> Fixed:
    """Cosine-kernel windowed sum over the first ``sampling_window`` samples.

    The kernel runs on absolute controller time (``buf.t0`` onward) and the
    sum is scaled by 2/N, so a full-scale in-phase tone demodulates to 1.0.
    """
    n = spec.sampling_window
    if len(buf) < n:
        raise WindowOverrun(f"buffer has {len(buf)} samples, window needs {n}")
    kernel = _kernel_for(spec.if_freq, buf.t0, n)
    prod = kernel * buf.raw[:n]
    # round each product back to the fixed scale: (k*s + half) >> FRAC_BITS
    prod = (prod + (1 << (FRAC_BITS - 1))) >> FRAC_BITS
    acc = int(prod.sum())
    raw, _ = saturate(_round_div(2 * acc, n))
    return Fixed(raw)
