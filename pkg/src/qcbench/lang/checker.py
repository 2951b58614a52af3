"""Static checking: name resolution, typing and element resolution.

Typing rules in brief:

* int literals (and int constants) coerce to fixed where a fixed is expected;
  other int/fixed mixing needs ``to_fixed``/``to_int``, except that ``*``
  may scale a fixed by an int and ``/`` always yields fixed;
* a bool used as an index or stored into an int becomes 0 or 1;
* a fixed matrix times a vector is a matrix-vector product;
* timestamp labels are write-only and implicitly int.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..fixedpoint import Fixed, quantize_raw
from . import ast as A
from . import semantics as S
from .errors import (
    CheckError,
    DuplicateDeclaration,
    NestedStrictTiming,
    TypeMismatch,
    UndeclaredVariable,
    UnknownElement,
    UnknownPulse,
    WaitBothDurationAndMaxTime,
)

NUMERIC = ("int", "fixed")


@dataclass(frozen=True)
class VarType:
    kind: str
    shape: tuple[int, ...] = ()
    literal: bool = False  # a static int that may coerce to fixed

    @property
    def scalar(self) -> bool:
        return not self.shape

    def __str__(self) -> str:
        return self.kind + "".join(f"[{n}]" for n in self.shape)


@dataclass
class TypedProgram:
    program: A.Program
    machine: object
    var_types: dict[str, VarType]
    constants: dict[str, object]
    timestamps: dict[str, bool] = field(default_factory=dict)  # label -> indexed

    @property
    def elements_used(self) -> frozenset[str]:
        return self.program.elements_used


def _err(cls, msg: str, node: A.Node) -> CheckError:
    return cls(msg, node.line, node.col)


class _Checker:
    def __init__(self, program: A.Program, machine):
        self.p = program
        self.mc = machine
        self.consts: dict[str, object] = {}
        self.vars: dict[str, VarType] = {}
        self.timestamps: dict[str, bool] = {}

    # static evaluation of constant expressions
    def static_value(self, e: A.Expr):
        if isinstance(e, A.IntLit):
            return e.value
        if isinstance(e, A.FixedLit):
            return _fixed_lit(e)
        if isinstance(e, A.BoolLit):
            return e.value
        if isinstance(e, A.Name):
            if e.id in self.consts:
                return self.consts[e.id]
            raise _err(TypeMismatch, f"{e.id!r} is not a compile-time constant", e)
        if isinstance(e, A.UnaryOp):
            return S.unop(e.op, self.static_value(e.operand), [])
        if isinstance(e, A.BinOp):
            try:
                return S.binop(e.op, self.static_value(e.left), self.static_value(e.right), [])
            except S.RuntimeFault as exc:
                raise _err(TypeMismatch, str(exc), e) from None
        raise _err(TypeMismatch, "expression is not a compile-time constant", e)

    def const_int(self, e: A.Expr, what: str) -> int:
        v = self.static_value(e)
        if isinstance(v, bool) or not isinstance(v, int):
            raise _err(TypeMismatch, f"{what} must be an int constant", e)
        return v

    # program structure
    def run(self) -> TypedProgram:
        for c in self.p.constants:
            if c.name in self.consts:
                raise _err(DuplicateDeclaration, f"constant {c.name!r} defined twice", c)
            self.consts[c.name] = self.static_value(c.value)
        for d in self.p.declarations:
            if d.name in self.vars or d.name in self.consts:
                raise _err(DuplicateDeclaration, f"{d.name!r} declared more than once", d)
            shape = tuple(self.const_int(s, "array dimension") for s in d.shape)
            if any(n <= 0 for n in shape):
                raise _err(TypeMismatch, f"{d.name!r}: dimensions must be positive", d)
            vt = VarType(d.kind, shape)
            self.vars[d.name] = vt
            if d.init is not None:
                self.check_init(d, vt)
        self.block(self.p.body, in_strict=False)
        return TypedProgram(self.p, self.mc, dict(self.vars), dict(self.consts), dict(self.timestamps))

    def check_init(self, d: A.VarDecl, vt: VarType) -> None:
        init = d.init
        if isinstance(init, A.Call) and init.func in A.RANDOM_INITS:
            if vt.kind != "fixed" or len(vt.shape) != 2:
                raise _err(TypeMismatch, f"{init.func}() initialises fixed matrices only", init)
            dims = tuple(self.const_int(a, "random() dimension") for a in init.args)
            if dims != vt.shape:
                raise _err(TypeMismatch, f"{init.func}{dims} does not match shape {vt.shape}", init)
            if init.func == "random_block2" and (vt.shape[0] % 2 or vt.shape[1] % 2):
                raise _err(TypeMismatch, "random_block2 needs even dimensions", init)
            return
        if isinstance(init, A.ListInit):
            if len(vt.shape) != 1 or len(init.items) != vt.shape[0]:
                raise _err(TypeMismatch, f"list of {len(init.items)} items cannot initialise {vt}", init)
            for item in init.items:
                self.check_static_item(item, vt.kind)
            return
        if not vt.scalar:
            raise _err(TypeMismatch, "array initialiser must be a list", init)
        self.check_static_item(init, vt.kind)

    def check_static_item(self, e: A.Expr, kind: str) -> None:
        v = self.static_value(e)
        if kind == "bool":
            ok = isinstance(v, bool)
        elif kind == "int":
            ok = (isinstance(v, int) and not isinstance(v, bool)) or (
                isinstance(e, A.FixedLit) and float(e.value).is_integer())
        else:
            ok = isinstance(v, Fixed) or (isinstance(v, int) and not isinstance(v, bool))
        if not ok:
            raise _err(TypeMismatch, f"initialiser does not fit {kind}", e)

    def block(self, body: tuple[A.Stmt, ...], in_strict: bool) -> None:
        for s in body:
            self.stmt(s, in_strict)

    # elements
    def element(self, name: str, node: A.Node, readout: bool = False) -> None:
        if name not in self.mc.elements:
            raise _err(UnknownElement, f"unknown element {name!r}", node)
        if readout and not self.mc.elements[name].is_readout:
            raise _err(UnknownElement, f"element {name!r} is not a readout element", node)

    def pulse(self, pulse: str, element: str, node: A.Node) -> None:
        if pulse not in self.mc.pulses:
            raise _err(UnknownPulse, f"unknown pulse {pulse!r}", node)
        if not self.mc.allows(element, pulse):
            raise _err(UnknownPulse, f"pulse {pulse!r} is not available on {element!r}", node)

    def timestamp(self, t: A.Timestamp | None) -> None:
        if t is None:
            return
        if t.name in self.vars or t.name in self.consts:
            raise _err(DuplicateDeclaration, f"timestamp label {t.name!r} clashes with a variable", t)
        indexed = t.index is not None
        if self.timestamps.setdefault(t.name, indexed) != indexed:
            raise _err(TypeMismatch, f"label {t.name!r} used both with and without an index", t)
        if indexed:
            self.expect_index(t.index)

    # statements
    def stmt(self, s: A.Stmt, in_strict: bool) -> None:
        if isinstance(s, A.StrictTiming):
            if in_strict:
                raise _err(NestedStrictTiming, "strict_timing blocks cannot be nested", s)
            self.block(s.body, True)
        elif isinstance(s, A.If):
            self.expect_bool(s.cond)
            self.block(s.body, in_strict)
            self.block(s.orelse, in_strict)
        elif isinstance(s, A.While):
            self.expect_bool(s.cond)
            self.block(s.body, in_strict)
        elif isinstance(s, A.For):
            vt = self.lookup(A.Name(s.var, line=s.line, col=s.col))
            if vt.kind != "int" or not vt.scalar:
                raise _err(TypeMismatch, f"loop variable {s.var!r} must be a scalar int", s)
            self.expect_assignable(vt, self.type_of(s.init), s.init)
            self.expect_bool(s.cond)
            self.expect_assignable(vt, self.type_of(s.step), s.step)
            self.block(s.body, in_strict)
        elif isinstance(s, A.Assign):
            tt = self.lvalue(s.target)
            if s.op == "++":
                if tt.kind not in NUMERIC or not tt.scalar:
                    raise _err(TypeMismatch, "'++' needs a numeric scalar", s)
            elif s.op == "=":
                self.expect_assignable(tt, self.type_of(s.value), s.value)
            else:
                if tt.kind not in NUMERIC:
                    raise _err(TypeMismatch, f"{s.op!r} needs a numeric target", s)
                self.expect_assignable(tt, self.type_of(s.value), s.value, allow_bool=False)
        elif isinstance(s, A.Play):
            self.element(s.element, s)
            self.pulse(s.pulse, s.element, s)
            if s.condition is not None:
                self.expect_bool(s.condition)
            if s.amp_scale is not None:
                self.expect_fixed_scalar(s.amp_scale)
            self.timestamp(s.timestamp)
        elif isinstance(s, A.Measure):
            self.element(s.element, s, readout=True)
            self.pulse(s.pulse, s.element, s)
            tt = self.lvalue(s.target)
            if tt.kind != "fixed" or not tt.scalar:
                raise _err(TypeMismatch, f"demod target must be a fixed scalar, got {tt}", s.target)
            self.timestamp(s.timestamp)
        elif isinstance(s, A.Wait):
            if s.duration is not None and s.max_time is not None:
                raise _err(WaitBothDurationAndMaxTime, "wait takes a duration or max_time, not both", s)
            if s.duration is None and s.max_time is None:
                raise _err(TypeMismatch, "wait needs a duration or max_time", s)
            for e in s.elements:
                self.element(e, s)
            self.expect_int_scalar(s.duration if s.duration is not None else s.max_time)
        elif isinstance(s, A.Align):
            for e in s.elements:
                self.element(e, s)
        elif isinstance(s, A.UpdateFrequency):
            self.element(s.element, s)
            t = self.type_of(s.value)
            if t.kind not in ("int", "fixed") or not t.scalar:
                raise _err(TypeMismatch, f"frequency must be an int or fixed scalar, got {t}", s.value)
        elif isinstance(s, A.FrameRotation):
            self.element(s.element, s)
            self.expect_fixed_scalar(s.angle)
        elif isinstance(s, A.SetDcOffset):
            self.element(s.element, s)
            self.expect_fixed_scalar(s.value)
        else:
            raise TypeError(f"unknown statement {s!r}")

    # expression typing
    def lookup(self, n: A.Name) -> VarType:
        if n.id in self.vars:
            return self.vars[n.id]
        raise UndeclaredVariable(n.id, n.line, n.col)

    def lvalue(self, e: A.Expr) -> VarType:
        if isinstance(e, A.Name):
            if e.id in self.consts:
                raise _err(TypeMismatch, f"cannot assign to constant {e.id!r}", e)
            return self.lookup(e)
        if isinstance(e, A.Index):
            base = self.lvalue(e.base)
            return self.index_type(base, e)
        raise _err(TypeMismatch, "invalid assignment target", e)

    def index_type(self, base: VarType, e: A.Index) -> VarType:
        if base.scalar:
            raise _err(TypeMismatch, f"cannot index a scalar {base}", e)
        self.expect_index(e.index)
        try:
            i = self.static_value(e.index)
        except CheckError:
            i = None
        if isinstance(i, int) and not 0 <= int(i) < base.shape[0]:
            raise _err(TypeMismatch, f"index {int(i)} out of range for {base}", e)
        return VarType(base.kind, base.shape[1:])

    def expect_index(self, e: A.Expr) -> None:
        t = self.type_of(e)
        if t.kind not in ("int", "bool") or not t.scalar:
            raise _err(TypeMismatch, f"index must be an int or bool scalar, got {t}", e)

    def expect_bool(self, e: A.Expr) -> None:
        t = self.type_of(e)
        if t.kind != "bool" or not t.scalar:
            raise _err(TypeMismatch, f"expected a bool, got {t}", e)

    def expect_int_scalar(self, e: A.Expr) -> None:
        t = self.type_of(e)
        if t.kind != "int" or not t.scalar:
            raise _err(TypeMismatch, f"expected an int, got {t}", e)

    def expect_fixed_scalar(self, e: A.Expr) -> None:
        t = self.type_of(e)
        if not t.scalar or not (t.kind == "fixed" or (t.kind == "int" and t.literal)):
            raise _err(TypeMismatch, f"expected a fixed, got {t}", e)

    def expect_assignable(self, target: VarType, value: VarType, node: A.Node,
                          allow_bool: bool = True) -> None:
        if target.shape != value.shape:
            raise _err(TypeMismatch, f"cannot assign {value} to {target}", node)
        if target.kind == value.kind:
            return
        if target.kind == "int" and value.kind == "bool" and allow_bool:
            return
        if target.kind == "fixed" and value.kind == "int" and value.literal:
            return
        raise _err(TypeMismatch, f"cannot assign {value} to {target}", node)

    def type_of(self, e: A.Expr) -> VarType:
        if isinstance(e, A.IntLit):
            return VarType("int", (), literal=True)
        if isinstance(e, A.FixedLit):
            return VarType("fixed")
        if isinstance(e, A.BoolLit):
            return VarType("bool")
        if isinstance(e, A.Name):
            if e.id in self.consts:
                v = self.consts[e.id]
                return VarType(S.kind_of(v), (), literal=S.kind_of(v) == "int")
            if e.id in self.timestamps and e.id not in self.vars:
                raise _err(UndeclaredVariable, f"timestamp label {e.id!r} is write-only", e)
            return self.lookup(e)
        if isinstance(e, A.Index):
            return self.index_type(self.type_of(e.base), e)
        if isinstance(e, A.UnaryOp):
            t = self.type_of(e.operand)
            if e.op == "not":
                if t.kind != "bool" or not t.scalar:
                    raise _err(TypeMismatch, f"'not' needs a bool, got {t}", e)
                return t
            if t.kind not in NUMERIC:
                raise _err(TypeMismatch, f"unary '-' needs a number, got {t}", e)
            return t
        if isinstance(e, A.BinOp):
            return self.binop_type(e)
        if isinstance(e, A.Call):
            return self.call_type(e)
        raise _err(TypeMismatch, "unexpected expression", e)

    def binop_type(self, e: A.BinOp) -> VarType:
        lt, rt = self.type_of(e.left), self.type_of(e.right)
        op = e.op
        if op in ("and", "or"):
            if lt != VarType("bool") or rt != VarType("bool"):
                raise _err(TypeMismatch, f"{op!r} needs bool operands, got {lt} and {rt}", e)
            return VarType("bool")
        if op in ("<", ">", "<=", ">=", "==", "!="):
            if not (lt.scalar and rt.scalar):
                raise _err(TypeMismatch, "comparisons need scalars", e)
            if op in ("==", "!=") and lt.kind == rt.kind == "bool":
                return VarType("bool")
            self.same_numeric(lt, rt, e)
            return VarType("bool")
        if lt.kind not in NUMERIC or rt.kind not in NUMERIC:
            raise _err(TypeMismatch, f"{op!r} needs numeric operands, got {lt} and {rt}", e)
        if op == "*" and len(lt.shape) == 2:
            if lt.kind != "fixed" or len(rt.shape) != 1 or rt.shape[0] != lt.shape[1]:
                raise _err(TypeMismatch, f"cannot multiply {lt} by {rt}", e)
            return VarType("fixed", (lt.shape[0],))
        shape = self.broadcast(lt, rt, e, allow_scalar_right=op in ("*", "/", "//"))
        literal = lt.literal and rt.literal
        if op == "/":
            return VarType("fixed", shape)
        if op in ("//", "**"):
            if lt.kind != "int" or rt.kind != "int":
                raise _err(TypeMismatch, f"{op!r} needs int operands, got {lt} and {rt}", e)
            return VarType("int", shape, literal)
        if op == "*":
            kind = "fixed" if "fixed" in (lt.kind, rt.kind) else "int"
            return VarType(kind, shape, literal)
        return VarType(self.same_numeric(lt, rt, e), shape, literal)

    def broadcast(self, lt: VarType, rt: VarType, e: A.Node, allow_scalar_right: bool):
        if lt.shape == rt.shape:
            return lt.shape
        if allow_scalar_right and rt.scalar and len(lt.shape) == 1:
            return lt.shape
        if e.op == "*" and lt.scalar and len(rt.shape) == 1:
            return rt.shape
        raise _err(TypeMismatch, f"shape mismatch: {lt} and {rt}", e)

    def same_numeric(self, lt: VarType, rt: VarType, e: A.Node) -> str:
        if lt.kind not in NUMERIC or rt.kind not in NUMERIC:
            raise _err(TypeMismatch, f"expected numbers, got {lt} and {rt}", e)
        if lt.kind == rt.kind:
            return lt.kind
        if (lt.kind == "int" and lt.literal) or (rt.kind == "int" and rt.literal):
            return "fixed"
        raise _err(TypeMismatch, f"cannot mix {lt} and {rt} without conversion", e)

    def call_type(self, e: A.Call) -> VarType:
        if e.func in A.RANDOM_INITS:
            raise _err(TypeMismatch, f"{e.func}() is only valid as an initialiser", e)
        want = A.BUILTINS[e.func]
        if len(e.args) != want:
            raise _err(TypeMismatch, f"{e.func}() takes {want} argument(s)", e)
        ts = [self.type_of(a) for a in e.args]
        t = ts[0]
        if e.func in ("bin2dec", "and_all"):
            if t.kind != "bool" or len(t.shape) != 1:
                raise _err(TypeMismatch, f"{e.func}() needs a bool vector, got {t}", e)
            return VarType("int" if e.func == "bin2dec" else "bool")
        if e.func == "sum":
            if len(t.shape) != 1:
                raise _err(TypeMismatch, f"sum() needs a vector, got {t}", e)
            return VarType("fixed" if t.kind == "fixed" else "int")
        if e.func == "lut_lookup":
            if len(t.shape) != 1:
                raise _err(TypeMismatch, f"lut_lookup() needs a vector table, got {t}", e)
            self.expect_index(e.args[1])
            return VarType(t.kind)
        if e.func == "to_fixed":
            if t.kind != "int" or not t.scalar:
                raise _err(TypeMismatch, f"to_fixed() needs an int, got {t}", e)
            return VarType("fixed")
        if t.kind != "fixed" or not t.scalar:
            raise _err(TypeMismatch, f"to_int() needs a fixed, got {t}", e)
        return VarType("int")


def _fixed_lit(e: A.FixedLit) -> Fixed:
    raw, _ = quantize_raw(e.value)
    return Fixed(raw)


def check_program(p: A.Program, machine_config) -> TypedProgram:
    """Resolve names, types and elements; raise a :class:`CheckError` subclass on failure."""
    return _Checker(p, machine_config).run()
