"""Event trace: the timestamped record every latency figure is derived from."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

EVENT_KINDS = (
    "output_sample_start",
    "input_last_sample",
    "instruction_issue",
    "timestamp_capture",
    "saturation",
    "strict_violation",
)

# JSON Lines field order; ``end`` and ``block`` are only written when set
FIELD_ORDER = ("kind", "element", "tick", "label", "end", "block")


class UnknownLabel(KeyError):
    pass


@dataclass(frozen=True)
class Event:
    kind: str
    element: str
    tick: int
    label: str = ""
    end: int | None = None  # exclusive end tick of timeline-occupying instructions
    block: int | None = None  # strict_timing block instance

    def to_dict(self) -> dict:
        d = {"kind": self.kind, "element": self.element, "tick": self.tick, "label": self.label}
        if self.end is not None:
            d["end"] = self.end
        if self.block is not None:
            d["block"] = self.block
        return d


@dataclass
class EventTrace:
    events: list[Event]
    final_state: dict = field(default_factory=dict)
    seed: int | None = None
    waveforms: dict = field(default_factory=dict)  # element -> list of SampleBuffer

    def of_kind(self, kind: str) -> list[Event]:
        return [e for e in self.events if e.kind == kind]

    def to_jsonl(self) -> str:
        return "".join(json.dumps(e.to_dict(), separators=(",", ":")) + "\n" for e in self.events)

    def write_jsonl(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_jsonl())

    @classmethod
    def from_jsonl(cls, text: str) -> EventTrace:
        events = []
        for line in text.splitlines():
            if line.strip():
                d = json.loads(line)
                events.append(Event(d["kind"], d["element"], d["tick"], d.get("label", ""),
                                    d.get("end"), d.get("block")))
        return cls(events)


def get_timestamp(tr: EventTrace, label: str):
    """Captured tick for ``label``.

    ``"name[]"`` returns the vector of ticks captured as ``name[0]``,
    ``name[1]``, ... ordered by index. A label captured more than once
    reports its last capture.
    """
    caps: dict[str, int] = {}
    for e in tr.events:
        if e.kind == "timestamp_capture":
            caps[e.label] = e.tick
    if label.endswith("[]"):
        stem = label[:-2] + "["
        found = {}
        for k, v in caps.items():
            if k.startswith(stem) and k.endswith("]") and k[len(stem):-1].isdigit():
                found[int(k[len(stem):-1])] = v
        if not found:
            raise UnknownLabel(label)
        return [found[i] for i in sorted(found)]
    if label not in caps:
        raise UnknownLabel(label)
    return caps[label]


@dataclass(frozen=True)
class Violation:
    element: str
    block: int
    tick: int  # start of the late instruction
    gap: int


def verify_strict_timing(tr: EventTrace) -> list[Violation]:
    """Gaps between consecutive timeline instructions of one element inside one strict block."""
    last_end: dict[tuple[int, str], int] = {}
    out = []
    for e in tr.events:
        if e.kind != "instruction_issue" or e.block is None or e.end is None:
            continue
        key = (e.block, e.element)
        if key in last_end and e.tick != last_end[key]:
            out.append(Violation(e.element, e.block, e.tick, e.tick - last_end[key]))
        last_end[key] = e.end
    return out
