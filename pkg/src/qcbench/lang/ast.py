"""Abstract syntax for the pulse-level benchmark language.

Nodes are frozen dataclasses. Source positions are carried for diagnostics
but excluded from equality, so structurally identical programs compare
equal regardless of layout.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

KINDS = ("int", "fixed", "bool")


@dataclass(frozen=True)
class Node:
    line: int = field(default=0, compare=False, repr=False, kw_only=True)
    col: int = field(default=0, compare=False, repr=False, kw_only=True)


# -- expressions -------------------------------------------------------------

@dataclass(frozen=True)
class IntLit(Node):
    value: int


@dataclass(frozen=True)
class FixedLit(Node):
    value: float


@dataclass(frozen=True)
class BoolLit(Node):
    value: bool


@dataclass(frozen=True)
class Name(Node):
    id: str


@dataclass(frozen=True)
class Index(Node):
    base: "Expr"
    index: "Expr"


@dataclass(frozen=True)
class BinOp(Node):
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class UnaryOp(Node):
    op: str  # "-" | "not"
    operand: "Expr"


@dataclass(frozen=True)
class Call(Node):
    func: str
    args: tuple["Expr", ...]


@dataclass(frozen=True)
class ListInit(Node):
    items: tuple["Expr", ...]


Expr = Union[IntLit, FixedLit, BoolLit, Name, Index, BinOp, UnaryOp, Call]

BUILTINS = {
    "bin2dec": 1,
    "sum": 1,
    "and_all": 1,
    "lut_lookup": 2,
    "to_fixed": 1,
    "to_int": 1,
}
# only valid as declaration initialisers; drawn from the run's seeded stream
RANDOM_INITS = ("random", "random_diag", "random_block2")
BUILTIN_ALIASES = {"and": "and_all"}


# -- statements --------------------------------------------------------------

@dataclass(frozen=True)
class Timestamp(Node):
    name: str
    index: Expr | None = None


@dataclass(frozen=True)
class Play(Node):
    pulse: str
    element: str
    condition: Expr | None = None
    amp_scale: Expr | None = None
    timestamp: Timestamp | None = None


@dataclass(frozen=True)
class Measure(Node):
    pulse: str
    element: str
    target: Expr  # Name or Index
    timestamp: Timestamp | None = None


@dataclass(frozen=True)
class Wait(Node):
    elements: tuple[str, ...]
    duration: Expr | None = None
    max_time: Expr | None = None


@dataclass(frozen=True)
class Align(Node):
    elements: tuple[str, ...]


@dataclass(frozen=True)
class StrictTiming(Node):
    body: tuple["Stmt", ...]


@dataclass(frozen=True)
class If(Node):
    cond: Expr
    body: tuple["Stmt", ...]
    orelse: tuple["Stmt", ...] = ()


@dataclass(frozen=True)
class While(Node):
    cond: Expr
    body: tuple["Stmt", ...]


@dataclass(frozen=True)
class For(Node):
    var: str
    init: Expr
    cond: Expr
    step: Expr
    body: tuple["Stmt", ...]


@dataclass(frozen=True)
class Assign(Node):
    target: Expr  # Name or Index
    op: str  # "=", "+=", "-=", "++"
    value: Expr | None


@dataclass(frozen=True)
class UpdateFrequency(Node):
    element: str
    value: Expr


@dataclass(frozen=True)
class FrameRotation(Node):
    angle: Expr
    element: str


@dataclass(frozen=True)
class SetDcOffset(Node):
    element: str
    value: Expr


Stmt = Union[Play, Measure, Wait, Align, StrictTiming, If, While, For, Assign,
             UpdateFrequency, FrameRotation, SetDcOffset]


# -- program -----------------------------------------------------------------

@dataclass(frozen=True)
class ConstDef(Node):
    name: str
    value: Expr


@dataclass(frozen=True)
class VarDecl(Node):
    name: str
    kind: str
    shape: tuple[Expr, ...] = ()
    init: Expr | ListInit | None = None


@dataclass(frozen=True)
class Program(Node):
    constants: tuple[ConstDef, ...] = ()
    declarations: tuple[VarDecl, ...] = ()
    body: tuple[Stmt, ...] = ()

    @property
    def elements_used(self) -> frozenset[str]:
        return frozenset(elements_in(self.body))


def stmt_elements(s: Stmt) -> tuple[str, ...]:
    if isinstance(s, (Play, Measure, UpdateFrequency, FrameRotation, SetDcOffset)):
        return (s.element,)
    if isinstance(s, (Wait, Align)):
        return s.elements
    return ()


def child_blocks(s: Stmt) -> tuple[tuple[Stmt, ...], ...]:
    if isinstance(s, (StrictTiming, While, For)):
        return (s.body,)
    if isinstance(s, If):
        return (s.body, s.orelse)
    return ()


def walk(body: tuple[Stmt, ...]):
    for s in body:
        yield s
        for block in child_blocks(s):
            yield from walk(block)


def elements_in(body: tuple[Stmt, ...]) -> set[str]:
    out: set[str] = set()
    for s in walk(body):
        out.update(stmt_elements(s))
    return out
