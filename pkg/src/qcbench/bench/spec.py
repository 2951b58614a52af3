"""Benchmark specifications and their string identifiers."""

from __future__ import annotations

import re
from dataclasses import dataclass, replace

FAMILIES = ("BM11", "BM12", "BM13", "BM21")
BM13_KINDS = ("frame_lut", "binary_rep", "frequency", "amplitude", "threshold")
PARAM_KINDS = ("frequency", "amplitude", "dc_offset", "threshold")
MATRIX_FORMS = ("dense", "diagonal", "block_diagonal")

VARIANTS = {
    "BM11": ("single", "distributed", "aggregated", "aggregated_int"),
    "BM12": ("single", "distributed", "aggregated"),
    "BM21": ("aggregated",),
}
BM13_VARIANTS = {
    "frame_lut": ("single", "distributed", "aggregated"),
    "binary_rep": ("single",),
    "frequency": ("distributed", "aggregated"),
    "amplitude": ("distributed", "aggregated"),
    "threshold": ("distributed",),
}


class InvalidSpec(ValueError):
    pass


@dataclass(frozen=True)
class Bm21Params:
    n_in: int = 10
    n_out: int = 10
    n_shots: int = 1000
    shot_period: int = 1000  # ticks
    param_kind: str = "frequency"
    matrix_form: str = "dense"
    normalize: bool = False  # divide the histogram residual by n_shots
    h0: tuple[int, ...] | None = None  # target histogram; all zeros when None

    def __post_init__(self) -> None:
        if not 1 <= self.n_in <= 16:
            raise InvalidSpec("n_in must be in 1..16")
        if self.n_out < 1 or self.n_shots < 1:
            raise InvalidSpec("n_out and n_shots must be positive")
        if self.param_kind not in PARAM_KINDS:
            raise InvalidSpec(f"param_kind must be one of {PARAM_KINDS}")
        if self.matrix_form not in MATRIX_FORMS:
            raise InvalidSpec(f"matrix_form must be one of {MATRIX_FORMS}")
        if self.matrix_form == "block_diagonal" and self.n_out % 2:
            raise InvalidSpec("block_diagonal needs an even n_out")
        if self.param_kind == "threshold" and self.n_out > self.n_in:
            raise InvalidSpec("threshold updates need n_out <= n_in")
        if self.h0 is not None and len(self.h0) != 2 ** self.n_in:
            raise InvalidSpec("h0 must have 2**n_in entries")

    @property
    def bins(self) -> int:
        return 2 ** self.n_in


@dataclass(frozen=True)
class BenchmarkSpec:
    family: str
    variant: str = "single"
    kind: str | None = None  # BM13 only
    n_inout: int = 1
    bm21: Bm21Params | None = None
    max_latency: int = 300

    def __post_init__(self) -> None:
        if self.family not in FAMILIES:
            raise InvalidSpec(f"unknown family {self.family!r}")
        if self.family == "BM21":
            if self.bm21 is None:
                object.__setattr__(self, "bm21", Bm21Params())
            object.__setattr__(self, "variant", "aggregated")
            object.__setattr__(self, "n_inout", self.bm21.n_in)
        elif self.bm21 is not None:
            raise InvalidSpec("bm21 parameters apply to BM21 only")
        if self.family == "BM13":
            if self.kind not in BM13_KINDS:
                raise InvalidSpec(f"BM13 needs kind in {BM13_KINDS}")
            allowed = BM13_VARIANTS[self.kind]
        else:
            if self.kind is not None:
                raise InvalidSpec("kind applies to BM13 only")
            allowed = VARIANTS[self.family]
        if self.variant not in allowed:
            raise InvalidSpec(f"{self.family} {self.kind or ''} does not support variant {self.variant!r}")
        if self.n_inout < 1:
            raise InvalidSpec("n_inout must be positive")
        if self.variant == "single" and self.n_inout != 1:
            raise InvalidSpec("single variants have exactly one channel")
        if self.max_latency < 0:
            raise InvalidSpec("max_latency must be >= 0")

    @property
    def id(self) -> str:
        if self.family == "BM21":
            p = self.bm21
            tail = "/normalized" if p.normalize else ""
            return f"BM21/{p.param_kind}/{p.matrix_form}{tail}"
        parts = [self.family, self.variant]
        if self.kind:
            parts.append(self.kind)
        parts.append(f"n{self.n_inout}")
        return "/".join(parts)

    @property
    def deterministic(self) -> bool:
        return self.family != "BM12"

    @property
    def indexed(self) -> bool:
        return self.variant != "single"

    def with_n(self, n: int) -> BenchmarkSpec:
        return replace(self, n_inout=n)

    def to_dict(self) -> dict:
        d = {"id": self.id, "family": self.family, "variant": self.variant, "kind": self.kind,
             "n_inout": self.n_inout, "max_latency": self.max_latency}
        if self.bm21 is not None:
            p = self.bm21
            d["bm21"] = {"n_in": p.n_in, "n_out": p.n_out, "n_shots": p.n_shots,
                         "shot_period": p.shot_period, "param_kind": p.param_kind,
                         "matrix_form": p.matrix_form, "normalize": p.normalize}
        return d


_ID_RE = re.compile(r"^n(\d+)$")


def parse_benchmark_id(text: str, **overrides) -> BenchmarkSpec:
    """Inverse of :attr:`BenchmarkSpec.id`; a missing ``nN`` suffix means one channel."""
    parts = text.strip().split("/")
    if not parts or parts[0] not in FAMILIES:
        raise InvalidSpec(f"unknown benchmark id {text!r}")
    family = parts[0]
    if family == "BM21":
        kw = dict(overrides.pop("bm21", {}) or {})
        if len(parts) > 1:
            kw["param_kind"] = parts[1]
        if len(parts) > 2:
            kw["matrix_form"] = parts[2]
        if len(parts) > 3:
            if parts[3] != "normalized" or len(parts) > 4:
                raise InvalidSpec(f"malformed benchmark id {text!r}")
            kw["normalize"] = True
        return BenchmarkSpec("BM21", bm21=Bm21Params(**kw), **overrides)
    rest = parts[1:]
    n = overrides.pop("n_inout", 1)
    if rest and _ID_RE.match(rest[-1]):
        n = int(_ID_RE.match(rest[-1]).group(1))
        rest = rest[:-1]
    if family == "BM13":
        if len(rest) != 2:
            raise InvalidSpec(f"BM13 ids look like BM13/<variant>/<kind>/nN, got {text!r}")
        return BenchmarkSpec(family, rest[0], rest[1], n, **overrides)
    if len(rest) != 1:
        raise InvalidSpec(f"malformed benchmark id {text!r}")
    return BenchmarkSpec(family, rest[0], None, n, **overrides)


def all_specs(n_values=(1, 20, 50), *, bm21: list[Bm21Params] | None = None,
              max_latency: int = 300) -> list[BenchmarkSpec]:
    """Every family/variant/kind, multi-channel variants swept over ``n_values``."""
    out: list[BenchmarkSpec] = []

    def add(family, variant, kind=None):
        ns = [1] if variant == "single" else list(n_values)
        for n in ns:
            out.append(BenchmarkSpec(family, variant, kind, n, max_latency=max_latency))

    for fam in ("BM11", "BM12"):
        for v in VARIANTS[fam]:
            add(fam, v)
    for kind in BM13_KINDS:
        for v in BM13_VARIANTS[kind]:
            add("BM13", v, kind)
    if bm21 is None:
        bm21 = [Bm21Params(param_kind=k) for k in PARAM_KINDS]
    out.extend(BenchmarkSpec("BM21", bm21=p, max_latency=max_latency) for p in bm21)
    return out

