"""Reference computations for the embedded calibration benchmark.

These recompute the histogram and the parameter update from first
principles so the simulator's fixed-point result can be checked against
an exact rational route and a double-precision route.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ..fixedpoint import ONE, RAW_MAX, RAW_MIN, Fixed
from ..plant import PlantModel
from .latency import bin2dec


@dataclass
class Bm21State:
    s: list[bool]
    H: list[int]
    H0: list[int]
    T: list[list[Fixed]]
    f: list[Fixed]

    @classmethod
    def from_final_state(cls, st: dict) -> Bm21State:
        return cls(s=list(st["s"]), H=list(st["H"]), H0=list(st["H0"]), T=st["T"], f=list(st["f"]))


def recount_histogram(plant: PlantModel, n_in: int, n_shots: int,
                      readout: str = "readout_element") -> list[int]:
    """Histogram rebuilt from the plant's drawn states, shot by shot."""
    per = [plant.states(f"{readout}[{k}]") for k in range(n_in)]
    if any(len(p) < n_shots for p in per):
        raise ValueError("plant history has fewer shots than requested")
    H = [0] * (2 ** n_in)
    for shot in range(n_shots):
        H[bin2dec(per[k][shot] for k in range(n_in))] += 1
    return H


def _nearest(q: Fraction) -> int:
    """Round to the nearest integer, ties away from zero."""
    mag = abs(q)
    n = int(mag + Fraction(1, 2))  # floor for non-negative values
    return n if q >= 0 else -n


def _sat(raw: int) -> int:
    return min(RAW_MAX, max(RAW_MIN, raw))


def fixed_point_update(T: list[list[Fixed]], H: list[int], H0: list[int], f0: list[Fixed],
                       normalize: bool = False, n_shots: int = 1) -> list[Fixed]:
    """``f0 + T (H - H0)`` in exact rationals, rounded and clamped where the hardware would.

    With ``normalize`` each residual entry is first rounded to the fixed grid
    after dividing by ``n_shots``. Each output entry is rounded once and
    clamped before the accumulate into ``f0``.
    """
    resid = [Fraction(h - h0) for h, h0 in zip(H, H0)]
    if normalize:
        resid = [Fraction(_sat(_nearest(r / n_shots * ONE)), ONE) for r in resid]
    out = []
    for row, f in zip(T, f0):
        acc = sum((Fraction(t.raw, ONE) * r for t, r in zip(row, resid)), Fraction(0))
        prod = _sat(_nearest(acc * ONE))
        out.append(Fixed(_sat(f.raw + prod)))
    return out


def double_update(T, H, H0, f0, normalize: bool = False, n_shots: int = 1) -> np.ndarray:
    """Double-precision ``f0 + T (H - H0)``."""
    Tm = np.array([[float(t) for t in row] for row in T])
    r = np.asarray(H, dtype=np.float64) - np.asarray(H0, dtype=np.float64)
    if normalize:
        r = r / n_shots
    return np.array([float(x) for x in f0]) + Tm @ r
