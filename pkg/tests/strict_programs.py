"""Random strict_timing programs with an independent readiness-deficit oracle.

Each program measures the readout element a few times, combines some of the
results, discriminates and plays a conditional pulse on the control element
after a random amount of static control activity. The oracle computes the
tick at which the conditional pulse could start from first principles and
compares it with where the control timeline is when the pulse is reached.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from qcbench.sim.config import ChannelDefaults, CostModel, default_machine

CONTROL_LEN = 20
READOUT_LEN = 200


@dataclass(frozen=True)
class StrictCase:
    source: str
    cost_model: CostModel
    channel: ChannelDefaults
    n_measure: int
    used: tuple[int, ...]  # measurement indices summed before discrimination
    lead_plays: int  # static control pulses before the conditional one
    lead_wait: int  # static wait on the control element after them
    readout_wait: int  # static wait on the readout element before measuring
    max_time: int | None  # pending wait(max_time) before the conditional play
    tail_plays: int

    @property
    def machine(self):
        return default_machine(1, channel=self.channel)

    def ready_tick(self) -> int:
        """Earliest start of the conditional play."""
        ch, cm = self.channel, self.cost_model
        last = [self.readout_wait + READOUT_LEN * j + ch.time_of_flight + ch.sampling_window
                for j in self.used]
        # the sum is a left fold, so each partial sum starts once both of its operands exist
        acc = last[0]
        for t in last[1:]:
            acc = max(acc, t) + cm.arithmetic_cost_per_op
        return acc + cm.discrimination_cost + cm.issue_cost

    def control_free(self) -> int:
        return CONTROL_LEN * self.lead_plays + self.lead_wait

    def deficit(self) -> int:
        return self.ready_tick() - self.control_free()

    def expect_violation(self) -> bool:
        # a static wait claims the timeline just like a pulse does
        claimed = self.lead_plays > 0 or self.lead_wait > 0
        return claimed and self.max_time is None and self.deficit() > 0


def random_case(rng: random.Random) -> StrictCase:
    cm = CostModel(
        discrimination_cost=rng.randint(0, 40),
        arithmetic_cost_per_op=rng.randint(0, 20),
        issue_cost=rng.randint(0, 30),
        lut_cost=rng.randint(0, 10),
    )
    ch = ChannelDefaults(time_of_flight=rng.randint(0, 60),
                         sampling_window=rng.choice([40, 100, 200]))
    n = rng.randint(1, 3)
    used = tuple(sorted(rng.sample(range(n), rng.randint(1, n))))
    lead = rng.choice([0, 1, 2, 5, 10, 12, 15, 20])
    lead_wait = rng.choice([0, 0, 8, 50, 200])
    ro_wait = rng.choice([0, 0, 16, 100])
    max_time = rng.choice([None, None, None, 100_000])
    tail = rng.randint(0, 2)

    lines = ["fixed[3] x", "fixed y", "bool s", "", "strict_timing:"]
    for _ in range(lead):
        lines.append("   play(control_pulse, control_element)")
    if lead_wait:
        lines.append(f"   wait({lead_wait}, control_element)")
    if ro_wait:
        lines.append(f"   wait({ro_wait}, readout_element)")
    for j in range(n):
        lines.append(f"   measure(readout_pulse, readout_element, demod(x[{j}]))")
    lines.append("   y = " + " + ".join(f"x[{j}]" for j in used))
    lines.append("   s = y > 0")
    if max_time is not None:
        lines.append(f"   wait(max_time={max_time}, control_element)")
    lines.append("   play(control_pulse, control_element, condition = s, timestamp-> ce_time)")
    for _ in range(tail):
        lines.append("   play(control_pulse, control_element)")
    return StrictCase("\n".join(lines) + "\n", cm, ch, n, used, lead, lead_wait, ro_wait,
                      max_time, tail)
