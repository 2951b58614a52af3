"""Run-time value semantics of classical expressions.

Values are plain Python objects: ``bool`` for bool, ``int`` for int
(exact while computing, wrapped to 32 bits when stored), :class:`Fixed` for
fixed, and nested lists for vectors and matrices. Every operation that can
saturate reports it through the ``sat`` list so callers can trace it.
"""

from __future__ import annotations

from ..fixedpoint import (
    ONE,
    Fixed,
    _round_div,
    fx_add,
    fx_div,
    fx_mul,
    fx_mul_int,
    fx_sub,
    int_ratio_to_fixed,
    saturate,
    wrap_int32,
)


class RuntimeFault(RuntimeError):
    """A classical operation failed at run time (bad index, division by zero)."""


Value = object


def kind_of(v: Value) -> str:
    if isinstance(v, bool):
        return "bool"
    if isinstance(v, int):
        return "int"
    if isinstance(v, Fixed):
        return "fixed"
    if isinstance(v, list):
        return kind_of(v[0]) if v else "int"
    raise TypeError(f"not a value: {v!r}")


def _fixed(v, sat: list) -> Fixed:
    if isinstance(v, Fixed):
        return v
    raw, s = saturate(int(v) * ONE)
    if s:
        sat.append(True)
    return Fixed(raw)


def _checked(pair: tuple[int, bool], sat: list) -> Fixed:
    raw, s = pair
    if s:
        sat.append(True)
    return Fixed(raw)


def to_fixed(v, sat: list) -> Fixed:
    return _fixed(v, sat)


def to_int(v) -> int:
    if isinstance(v, Fixed):
        q = abs(v.raw) // ONE
        return q if v.raw >= 0 else -q
    return int(v)


def coerce_store(kind: str, v: Value, sat: list) -> Value:
    """Convert a value for storage into a variable of ``kind``."""
    if isinstance(v, list):
        return [coerce_store(kind, x, sat) for x in v]
    if kind == "int":
        return wrap_int32(int(v))
    if kind == "fixed":
        return _fixed(v, sat)
    return bool(v)


def default_value(kind: str, shape: tuple[int, ...]) -> Value:
    zero = {"int": 0, "fixed": Fixed(0), "bool": False}[kind]
    if not shape:
        return zero
    if len(shape) == 1:
        return [zero] * shape[0]
    return [[zero] * shape[1] for _ in range(shape[0])]


def index_of(v: Value) -> int:
    if isinstance(v, Fixed):
        raise RuntimeFault("fixed value used as an index")
    return int(v)


def get_item(base: Value, idx: Value) -> Value:
    i = index_of(idx)
    if not isinstance(base, list):
        raise RuntimeFault("indexing a scalar")
    if not 0 <= i < len(base):
        raise RuntimeFault(f"index {i} out of range for length {len(base)}")
    return base[i]


def _scalar_arith(op: str, a, b, sat: list):
    if op in ("+", "-"):
        if isinstance(a, Fixed) or isinstance(b, Fixed):
            fa, fb = _fixed(a, sat), _fixed(b, sat)
            fn = fx_add if op == "+" else fx_sub
            return _checked(fn(fa.raw, fb.raw), sat)
        return int(a) + int(b) if op == "+" else int(a) - int(b)
    if op == "*":
        if isinstance(a, Fixed) and isinstance(b, Fixed):
            return _checked(fx_mul(a.raw, b.raw), sat)
        if isinstance(a, Fixed):
            return _checked(fx_mul_int(a.raw, int(b)), sat)
        if isinstance(b, Fixed):
            return _checked(fx_mul_int(b.raw, int(a)), sat)
        return int(a) * int(b)
    if op == "/":
        try:
            if isinstance(a, Fixed) and isinstance(b, Fixed):
                return _checked(fx_div(a.raw, b.raw), sat)
            if isinstance(a, Fixed):
                if int(b) == 0:
                    raise ZeroDivisionError
                return _checked(saturate(_round_div(a.raw, int(b))), sat)
            if isinstance(b, Fixed):
                return _checked(fx_div(int(a) * ONE, b.raw), sat)
            return _checked(int_ratio_to_fixed(int(a), int(b)), sat)
        except ZeroDivisionError:
            raise RuntimeFault("division by zero") from None
    if op == "//":
        if int(b) == 0:
            raise RuntimeFault("division by zero")
        q = abs(int(a)) // abs(int(b))
        return q if (int(a) >= 0) == (int(b) >= 0) else -q
    if op == "**":
        if int(b) < 0:
            raise RuntimeFault("negative integer exponent")
        return int(a) ** int(b)
    raise ValueError(op)


def _compare(op: str, a, b, sat: list) -> bool:
    if isinstance(a, Fixed) or isinstance(b, Fixed):
        x, y = _fixed(a, sat).raw, _fixed(b, sat).raw
    else:
        x, y = a, b
    if op == "<":
        return x < y
    if op == ">":
        return x > y
    if op == "<=":
        return x <= y
    if op == ">=":
        return x >= y
    if op == "==":
        return x == y
    return x != y


def matvec(m: list, v: list, sat: list) -> list:
    """Matrix-vector product with one rounding per output entry."""
    if len(m[0]) != len(v):
        raise RuntimeFault("matrix-vector shape mismatch")
    fixed_vec = any(isinstance(x, Fixed) for x in v)
    out = []
    for row in m:
        if fixed_vec:
            acc = sum(t.raw * _fixed(x, sat).raw for t, x in zip(row, v))
            out.append(_checked(saturate(_round_div(acc, ONE)), sat))
        else:
            acc = sum(t.raw * int(x) for t, x in zip(row, v))
            out.append(_checked(saturate(acc), sat))
    return out


def binop(op: str, a: Value, b: Value, sat: list) -> Value:
    if op == "and":
        return bool(a) and bool(b)
    if op == "or":
        return bool(a) or bool(b)
    if op in ("<", ">", "<=", ">=", "==", "!="):
        return _compare(op, a, b, sat)
    la, lb = isinstance(a, list), isinstance(b, list)
    if op == "*" and la and a and isinstance(a[0], list):
        return matvec(a, b, sat)
    if la and lb:
        if len(a) != len(b):
            raise RuntimeFault("vector length mismatch")
        return [binop(op, x, y, sat) for x, y in zip(a, b)]
    if la:
        return [binop(op, x, b, sat) for x in a]
    if lb:
        return [binop(op, a, y, sat) for y in b]
    return _scalar_arith(op, a, b, sat)


def unop(op: str, a: Value, sat: list) -> Value:
    if op == "not":
        return not a
    if isinstance(a, list):
        return [unop(op, x, sat) for x in a]
    if isinstance(a, Fixed):
        return _checked(saturate(-a.raw), sat)
    return -int(a)


def bin2dec(bits: list) -> int:
    """Least-significant bit first: ``bits[i]`` contributes ``2**i``."""
    return sum(1 << i for i, b in enumerate(bits) if b)


def call(func: str, args: list[Value], sat: list) -> Value:
    if func == "bin2dec":
        return bin2dec(args[0])
    if func == "sum":
        vec = args[0]
        if any(isinstance(x, Fixed) for x in vec):
            return _checked(saturate(sum(x.raw for x in vec)), sat)
        return sum(int(x) for x in vec)
    if func == "and_all":
        return all(bool(x) for x in args[0])
    if func == "lut_lookup":
        return get_item(args[0], args[1])
    if func == "to_fixed":
        return _fixed(args[0], sat)
    if func == "to_int":
        return to_int(args[0])
    raise ValueError(f"unknown builtin {func!r}")
