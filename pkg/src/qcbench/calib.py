"""Embedded-calibration feedback laws and closed-loop tracking scenarios.

Three pieces of calibration math:

* the Rabi amplitude correction built from flip proportions after 5, 7, 9
  and 11 nominal pi/2 pulses,
* the re-calibration bandwidth bound ``1 / (8 tau_tot)``,
* the linearized parameter update ``r <- r + M (p_ideal - p_measured)``.

The scenario simulators run these laws against the simulated plants in
double precision and return per-round time series.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from .plant import DriftModel, RabiPlant, RamseyDriftPlant, rabi_flip_probability
from .sim.rng import stream

RABI_PULSE_COUNTS = (5, 7, 9, 11)


class NonPositiveDuration(ValueError):
    pass


class DimensionMismatch(ValueError):
    pass


class FitDegenerate(ValueError):
    """The Ramsey delays cannot tell detunings in the search range apart."""


def rabi_amplitude_correction(p5: float, p7: float, p9: float, p11: float, gain: float) -> float:
    """``-gain * (P5 - P7 + P9 - P11)``."""
    for p in (p5, p7, p9, p11):
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"flip proportion {p!r} outside [0, 1]")
    return -gain * (p5 - p7 + p9 - p11)


def recalibration_bandwidth(tau_tot: float) -> float:
    """Best-case tracking bandwidth in Hz for a calibration cycle of ``tau_tot`` seconds."""
    if not tau_tot > 0:
        raise NonPositiveDuration(f"tau_tot must be positive, got {tau_tot!r}")
    return 1.0 / (8.0 * tau_tot)


def linear_update(r_est, M, p_ideal, p_meas) -> np.ndarray:
    """One step of ``r_est + M (p_ideal - p_meas)``."""
    r = np.asarray(r_est, dtype=np.float64)
    M = np.atleast_2d(np.asarray(M, dtype=np.float64))
    pi = np.asarray(p_ideal, dtype=np.float64)
    pm = np.asarray(p_meas, dtype=np.float64)
    if r.ndim == 0:
        r = r.reshape(1)
    pi, pm = pi.reshape(-1), pm.reshape(-1)
    if pi.shape != pm.shape:
        raise DimensionMismatch(f"outcome vectors differ: {pi.shape} vs {pm.shape}")
    if M.shape != (r.shape[0], pi.shape[0]):
        raise DimensionMismatch(f"M is {M.shape}, expected {(r.shape[0], pi.shape[0])}")
    return r + M @ (pi - pm)


def update_matrix(F) -> np.ndarray:
    """Inverse of the outcome sensitivity ``F``; square and invertible."""
    F = np.atleast_2d(np.asarray(F, dtype=np.float64))
    if F.shape[0] != F.shape[1]:
        raise DimensionMismatch(f"F must be square, got {F.shape}")
    return np.linalg.inv(F)


@dataclass
class LinearPlantSpec:
    """Outcome distribution linear in the parameter error.

    ``p_measured = p_ideal - F (r_actual - r_estimated)`` so that one update
    with ``M = F^-1`` lands exactly on ``r_actual`` when there is no noise.
    """

    r_actual: np.ndarray
    r_estimated: np.ndarray
    F: np.ndarray
    p_ideal: np.ndarray

    def p_measured(self, noise_std: float = 0.0, rng: np.random.Generator | None = None) -> np.ndarray:
        p = self.p_ideal - self.F @ (self.r_actual - self.r_estimated)
        if noise_std > 0:
            if rng is None:
                raise ValueError("noisy outcomes need a generator")
            p = p + rng.normal(0.0, noise_std, size=p.shape)
        return p


def random_linear_plant(rng: np.random.Generator, dim: int, max_cond: float = 1e3,
                        error_scale: float = 1e-3) -> LinearPlantSpec:
    """Random plant with singular values of ``F`` log-uniform in ``[1, cond)``, ``cond < max_cond``."""
    if dim < 1:
        raise ValueError("dim must be positive")
    cond = math.exp(rng.uniform(0.0, math.log(max_cond)))
    sv = np.exp(rng.uniform(0.0, math.log(cond), size=dim))
    sv[0] = 1.0
    u, _ = np.linalg.qr(rng.normal(size=(dim, dim)))
    v, _ = np.linalg.qr(rng.normal(size=(dim, dim)))
    F = u @ np.diag(sv) @ v.T
    r_est = rng.normal(size=dim)
    r_act = r_est + rng.normal(0.0, error_scale, size=dim) / sv.max()
    p_ideal = rng.uniform(0.2, 0.8, size=dim)
    return LinearPlantSpec(r_act, r_est, F, p_ideal)


@dataclass
class TrackingScenario:
    plant: RabiPlant | RamseyDriftPlant
    gain: float = 0.1
    shots_per_round: int = 100
    rounds: int = 50
    tracking_enabled: bool = True
    tau_points: tuple[float, ...] = ()  # seconds, Ramsey only
    amp_sensitivity: float = 0.04  # relative rate change per unit amplitude correction, Rabi only
    search_halfwidth: float = 200e3  # Hz around the offset detuning, Ramsey only
    search_points: int = 401
    noiseless: bool = False  # use exact probabilities instead of sampled proportions

    def __post_init__(self) -> None:
        if not math.isfinite(self.gain):
            raise ValueError("gain must be finite")
        if self.shots_per_round < 1 or self.rounds < 0:
            raise ValueError("shots_per_round must be >= 1 and rounds >= 0")


@dataclass
class Series:
    columns: tuple[str, ...]
    rows: list[tuple] = field(default_factory=list)

    def column(self, name: str) -> np.ndarray:
        i = self.columns.index(name)
        return np.array([r[i] for r in self.rows], dtype=np.float64)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for r in self.rows:
            w.writerow([repr(float(x)) if isinstance(x, float) else x for x in r])
        return buf.getvalue()

    def write_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(self.to_csv())


RABI_COLUMNS = ("round", "amp_error", "p5", "p7", "p9", "p11", "delta_amp")
RAMSEY_COLUMNS = ("round", "true_detuning", "estimated_detuning", "corrected_detuning")


def _proportion(rng: np.random.Generator, p: float, shots: int, noiseless: bool) -> float:
    return p if noiseless else int(rng.binomial(shots, p)) / shots


def simulate_rabi_tracking(sc: TrackingScenario, seed: int) -> Series:
    """Per round: sample the four flip proportions, then apply the correction.

    ``amp_error`` is the rate error the round was measured at. A correction
    ``delta_amp`` changes the error by ``amp_sensitivity * delta_amp``; the
    plant's ``amp_error`` holds the corrected value when the loop ends.
    """
    if not isinstance(sc.plant, RabiPlant):
        raise TypeError("Rabi tracking needs a RabiPlant")
    rng = stream(seed, "scenario")
    eps = sc.plant.amp_error
    out = Series(RABI_COLUMNS)
    for r in range(sc.rounds):
        ps = [_proportion(rng, rabi_flip_probability(n, eps), sc.shots_per_round, sc.noiseless)
              for n in RABI_PULSE_COUNTS]
        d_amp = rabi_amplitude_correction(*ps, sc.gain)
        out.rows.append((r, eps, *ps, d_amp))
        if sc.tracking_enabled:
            eps += sc.amp_sensitivity * d_amp
    sc.plant.amp_error = eps
    return out


def _ramsey_model(detunings: np.ndarray, taus: np.ndarray) -> np.ndarray:
    return 0.5 * (1.0 + np.cos(2.0 * np.pi * np.outer(detunings, taus)))


def _check_identifiable(grid: np.ndarray, taus: np.ndarray) -> None:
    if np.all(taus <= 0):
        raise FitDegenerate("all Ramsey delays are zero")
    model = _ramsey_model(grid, taus)
    sq = np.sum(model ** 2, axis=1)
    dist = sq[:, None] + sq[None, :] - 2.0 * model @ model.T
    idx = np.arange(len(grid))
    far = np.abs(idx[:, None] - idx[None, :]) > 2
    if np.any(dist[far] < 1e-10):
        raise FitDegenerate("distinct detunings give identical Ramsey fringes over the delays")


def estimate_detuning(p_hat, taus, center: float, halfwidth: float, points: int = 401) -> float:
    """Least-squares detuning from Ramsey proportions: grid search, then a bounded 1-D refine."""
    taus = np.asarray(taus, dtype=np.float64)
    p_hat = np.asarray(p_hat, dtype=np.float64)
    grid = np.linspace(center - halfwidth, center + halfwidth, points)
    cost = np.sum((_ramsey_model(grid, taus) - p_hat) ** 2, axis=1)
    j = int(np.argmin(cost))
    step = grid[1] - grid[0]

    def f(g: float) -> float:
        return float(np.sum((0.5 * (1.0 + np.cos(2.0 * np.pi * g * taus)) - p_hat) ** 2))

    res = minimize_scalar(f, bounds=(grid[j] - step, grid[j] + step), method="bounded",
                          options={"xatol": 1e-6})
    return float(res.x) if f(res.x) <= cost[j] else float(grid[j])


def simulate_ramsey_tracking(sc: TrackingScenario, seed: int) -> Series:
    """Per round: Ramsey proportions at each delay, fit, optionally correct the frequency.

    Detunings are reported relative to the plant's intentional offset:
    ``true_detuning`` is the drift, ``corrected_detuning`` what remains after
    the accumulated correction and ``estimated_detuning`` the fit result.
    The drift clock advances by one ``period`` unit per round.
    """
    if not isinstance(sc.plant, RamseyDriftPlant):
        raise TypeError("Ramsey tracking needs a RamseyDriftPlant")
    if not sc.tau_points:
        raise ValueError("tau_points must be non-empty")
    taus = np.asarray(sc.tau_points, dtype=np.float64)
    off = sc.plant.offset_detuning
    grid = np.linspace(off - sc.search_halfwidth, off + sc.search_halfwidth, sc.search_points)
    _check_identifiable(grid, taus)
    drift = sc.plant.drift.path(np.arange(sc.rounds, dtype=np.float64), stream(seed, "plant"))
    rng = stream(seed, "scenario")
    corr = 0.0
    out = Series(RAMSEY_COLUMNS)
    for r in range(sc.rounds):
        residual = float(drift[r]) - corr
        probs = _ramsey_model(np.array([off + residual]), taus)[0]
        p_hat = [_proportion(rng, float(p), sc.shots_per_round, sc.noiseless) for p in probs]
        est = estimate_detuning(p_hat, taus, off, sc.search_halfwidth, sc.search_points) - off
        out.rows.append((r, float(drift[r]), est, residual))
        if sc.tracking_enabled:
            corr += sc.gain * est
    return out


def rms(x) -> float:
    x = np.asarray(x, dtype=np.float64)
    return float(np.sqrt(np.mean(x ** 2))) if x.size else 0.0


def default_rabi_scenario(tracking: bool = True, amp_error: float = 0.02) -> TrackingScenario:
    return TrackingScenario(RabiPlant(amp_error=amp_error), gain=0.1, shots_per_round=100,
                            rounds=50, tracking_enabled=tracking)


def default_ramsey_scenario(tracking: bool = True, amplitude: float = 50e3) -> TrackingScenario:
    drift = DriftModel("sinusoid", amplitude=amplitude, period=200.0)
    return TrackingScenario(RamseyDriftPlant(drift, offset_detuning=1e6), gain=0.5,
                            shots_per_round=1000, rounds=400, tracking_enabled=tracking,
                            tau_points=(200e-9, 250e-9, 300e-9, 350e-9))
