"""Discrete-event controller simulation."""

from .config import ConfigError, CostModel, ElementConfig, MachineConfig, default_machine
from .executor import (
    Dep,
    MaxLatencyExceeded,
    PlantExhausted,
    RuntimeFault,
    SimulationError,
    StrictTimingViolation,
    run,
)
from .trace import Event, EventTrace, UnknownLabel, Violation, get_timestamp, verify_strict_timing

__all__ = [
    "ConfigError", "CostModel", "ElementConfig", "MachineConfig", "default_machine", "Dep",
    "MaxLatencyExceeded", "PlantExhausted", "RuntimeFault", "SimulationError",
    "StrictTimingViolation", "run", "Event", "EventTrace", "UnknownLabel", "Violation",
    "get_timestamp", "verify_strict_timing",
]
