"""Ramsey detuning tracking under sinusoidal drift, with and without feedback.

Writes ``ramsey_on.csv`` and ``ramsey_off.csv`` and prints the RMS residual
detuning of each run.

    python3 scripts/ramsey_tracking.py [--seed 0] [--outdir results] [--amplitude 50e3]
"""

from __future__ import annotations

import argparse
from dataclasses import replace
from pathlib import Path

from qcbench.calib import default_ramsey_scenario, rms, simulate_ramsey_tracking


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--outdir", default="results")
    ap.add_argument("--amplitude", type=float, default=50e3, help="drift amplitude in Hz")
    ap.add_argument("--gain", type=float, default=0.5)
    ap.add_argument("--rounds", type=int, default=400)
    args = ap.parse_args()

    out = Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)
    residual = {}
    for tracking, name in ((True, "on"), (False, "off")):
        sc = replace(default_ramsey_scenario(tracking, args.amplitude), gain=args.gain, rounds=args.rounds)
        series = simulate_ramsey_tracking(sc, args.seed)
        path = out / f"ramsey_{name}.csv"
        series.write_csv(path)
        residual[name] = rms(series.column("corrected_detuning"))
        print(f"tracking {name:>3}: RMS residual detuning {residual[name]:9.1f} Hz -> {path}")
    if residual["off"] > 0:
        print(f"ratio on/off: {residual['on'] / residual['off']:.3f}")


if __name__ == "__main__":
    main()
