"""Machine description and classical-processing cost model."""

from __future__ import annotations

import re
from dataclasses import asdict, dataclass, fields

from ..signal import DemodSpec, PulseDef

ROLES = ("control", "readout", "both")


class ConfigError(ValueError):
    """Invalid machine, cost-model or run configuration."""


@dataclass(frozen=True)
class ElementConfig:
    name: str
    role: str = "control"
    if_freq: float = 100e6
    time_of_flight: int = 0
    sampling_window: int = 0
    pulses: frozenset[str] = frozenset()  # empty: any pulse in the library

    def __post_init__(self) -> None:
        if self.role not in ROLES:
            raise ConfigError(f"element {self.name!r}: role must be one of {ROLES}")
        if self.time_of_flight < 0:
            raise ConfigError(f"element {self.name!r}: time_of_flight must be >= 0")
        if self.is_readout and self.sampling_window <= 0:
            raise ConfigError(f"readout element {self.name!r} needs a positive sampling_window")

    @property
    def is_readout(self) -> bool:
        return self.role in ("readout", "both")

    def demod_spec(self) -> DemodSpec:
        return DemodSpec(self.if_freq, self.sampling_window, self.time_of_flight)

    def to_dict(self) -> dict:
        d = {
            "role": self.role,
            "if_freq": self.if_freq,
            "time_of_flight": self.time_of_flight,
            "sampling_window": self.sampling_window,
        }
        if self.pulses:
            d["pulses"] = sorted(self.pulses)
        return d


_GROUP_RE = re.compile(r"^([A-Za-z_][A-Za-z_0-9]*)\[\]$")


@dataclass(frozen=True)
class MachineConfig:
    elements: dict[str, ElementConfig]
    pulses: dict[str, PulseDef]

    def __post_init__(self) -> None:
        for e in self.elements.values():
            unknown = set(e.pulses) - set(self.pulses)
            if unknown:
                raise ConfigError(f"element {e.name!r} references unknown pulses {sorted(unknown)}")

    def element(self, name: str) -> ElementConfig:
        try:
            return self.elements[name]
        except KeyError:
            raise ConfigError(f"unknown element {name!r}") from None

    def allows(self, element: str, pulse: str) -> bool:
        e = self.elements[element]
        return pulse in self.pulses and (not e.pulses or pulse in e.pulses)

    @classmethod
    def from_dict(cls, d: dict) -> MachineConfig:
        """Build from JSON-style data.

        An element key of the form ``"name[]"`` with an integer ``count``
        expands into ``name[0] .. name[count-1]`` sharing the same settings.
        """
        try:
            pulses = {}
            for name, p in d.get("pulses", {}).items():
                pulses[name] = PulseDef(
                    name=name,
                    shape=p["shape"],
                    length=int(p["length"]),
                    amplitude=float(p.get("amplitude", 1.0)),
                    sigma=p.get("sigma"),
                    if_freq=float(p.get("if_freq", 100e6)),
                )
            elements: dict[str, ElementConfig] = {}
            for key, e in d.get("elements", {}).items():
                m = _GROUP_RE.match(key)
                names = [key]
                if m:
                    count = int(e["count"])
                    if count <= 0:
                        raise ConfigError(f"element group {key!r} needs a positive count")
                    names = [f"{m.group(1)}[{k}]" for k in range(count)]
                for name in names:
                    elements[name] = ElementConfig(
                        name=name,
                        role=e.get("role", "control"),
                        if_freq=float(e.get("if_freq", 100e6)),
                        time_of_flight=int(e.get("time_of_flight", 0)),
                        sampling_window=int(e.get("sampling_window", 0)),
                        pulses=frozenset(e.get("pulses", ())),
                    )
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"malformed machine config: {exc}") from exc
        return cls(elements, pulses)

    def to_dict(self) -> dict:
        pulses = {}
        for name, p in sorted(self.pulses.items()):
            pd = {"shape": p.shape, "length": p.length, "amplitude": p.amplitude, "if_freq": p.if_freq}
            if p.sigma is not None:
                pd["sigma"] = p.sigma
            pulses[name] = pd
        return {
            "elements": {n: e.to_dict() for n, e in sorted(self.elements.items())},
            "pulses": pulses,
        }


@dataclass(frozen=True)
class CostModel:
    """Classical-processing durations in ticks.

    A cost is charged only when an operand is data-dependent (derived from a
    measurement); operations on static values are resolved ahead of time.
    """

    discrimination_cost: int = 4
    lut_cost: int = 4
    arithmetic_cost_per_op: int = 2
    bin2dec_cost_per_bit: int = 1
    matvec_cost_per_entry: int = 1
    param_update_cost: int = 4
    issue_cost: int = 8
    comm_c0: int = 16
    comm_c1: int = 2
    branch_cost: int = 4

    def __post_init__(self) -> None:
        for f in fields(self):
            v = getattr(self, f.name)
            if not isinstance(v, int) or isinstance(v, bool) or v < 0:
                raise ConfigError(f"cost {f.name} must be a non-negative integer, got {v!r}")

    def comm(self, n_sources: int) -> int:
        """Fan-in communication overhead for a reduction over ``n_sources`` channels."""
        return self.comm_c0 + self.comm_c1 * n_sources

    @classmethod
    def zero(cls) -> CostModel:
        return cls(**{f.name: 0 for f in fields(cls)})

    def to_dict(self) -> dict:
        d = asdict(self)
        c0, c1 = d.pop("comm_c0"), d.pop("comm_c1")
        d["aggregation_comm_cost"] = {"c0": c0, "c1": c1}
        return d

    @classmethod
    def from_dict(cls, d: dict) -> CostModel:
        d = dict(d)
        comm = d.pop("aggregation_comm_cost", None)
        if comm is not None:
            d["comm_c0"] = comm.get("c0", cls.comm_c0)
            d["comm_c1"] = comm.get("c1", cls.comm_c1)
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown cost-model fields {sorted(unknown)}")
        return cls(**d)


def default_pulses() -> dict[str, PulseDef]:
    return {
        "control_pulse": PulseDef("control_pulse", "gaussian", 20, 1.0, sigma=4.0),
        "pi": PulseDef("pi", "gaussian", 20, 1.0, sigma=4.0),
        "pi_half": PulseDef("pi_half", "gaussian", 20, 0.5, sigma=4.0),
        "readout_pulse": PulseDef("readout_pulse", "constant", 200, 0.5),
    }


@dataclass(frozen=True)
class ChannelDefaults:
    if_freq: float = 100e6
    time_of_flight: int = 28
    sampling_window: int = 200


def default_machine(n_inout: int = 1, *, indexed: bool | None = None,
                    channel: ChannelDefaults | None = None) -> MachineConfig:
    """Paired readout/control channels.

    With one channel and ``indexed`` unset, the plain names ``readout_element``
    and ``control_element`` are used; otherwise ``readout_element[k]`` and
    ``control_element[k]``.
    """
    channel = channel or ChannelDefaults()
    if indexed is None:
        indexed = n_inout > 1
    names = [(f"readout_element[{k}]", f"control_element[{k}]") for k in range(n_inout)]
    if not indexed:
        names = [("readout_element", "control_element")]
    elements: dict[str, ElementConfig] = {}
    for ro, ctl in names:
        elements[ro] = ElementConfig(ro, "readout", channel.if_freq, channel.time_of_flight,
                                     channel.sampling_window)
        elements[ctl] = ElementConfig(ctl, "control", channel.if_freq)
    return MachineConfig(elements, default_pulses())
