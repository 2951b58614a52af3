"""Deterministic co-simulation of a pulse-level controller and a simulated plant."""

__version__ = "0.1.0"
