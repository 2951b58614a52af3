"""Canonical pretty-printer. Output re-parses to a structurally equal tree."""

from __future__ import annotations

from . import ast as A

INDENT = "    "

_PREC = {
    "or": 1, "and": 2, "not": 3,
    "<": 4, ">": 4, "<=": 4, ">=": 4, "==": 4, "!=": 4,
    "+": 5, "-": 5, "*": 6, "/": 6, "//": 6,
    "neg": 7, "**": 8,
}
_POSTFIX = 9
_ATOM = 10


def _prec(e: A.Expr) -> int:
    if isinstance(e, A.BinOp):
        return _PREC[e.op]
    if isinstance(e, A.UnaryOp):
        return _PREC["neg"] if e.op == "-" else _PREC["not"]
    if isinstance(e, A.Index):
        return _POSTFIX
    if isinstance(e, (A.IntLit, A.FixedLit)) and e.value < 0:
        return _PREC["neg"]
    return _ATOM


def _wrap(e: A.Expr, need_parens: bool) -> str:
    s = print_expr(e)
    return f"({s})" if need_parens else s


def _fixed_text(v: float) -> str:
    s = repr(float(v))
    return s if any(c in s for c in ".e") else s + ".0"


def print_expr(e: A.Expr) -> str:
    if isinstance(e, A.IntLit):
        return str(e.value)
    if isinstance(e, A.FixedLit):
        return _fixed_text(e.value)
    if isinstance(e, A.BoolLit):
        return "True" if e.value else "False"
    if isinstance(e, A.Name):
        return e.id
    if isinstance(e, A.Index):
        return f"{_wrap(e.base, _prec(e.base) < _POSTFIX)}[{print_expr(e.index)}]"
    if isinstance(e, A.Call):
        return f"{e.func}({', '.join(print_expr(a) for a in e.args)})"
    if isinstance(e, A.ListInit):
        return f"[{', '.join(print_expr(a) for a in e.items)}]"
    if isinstance(e, A.UnaryOp):
        p = _prec(e)
        if e.op == "-":
            return "-" + _wrap(e.operand, _prec(e.operand) < p)
        return "not " + _wrap(e.operand, _prec(e.operand) < p)
    if isinstance(e, A.BinOp):
        p = _PREC[e.op]
        lp, rp = _prec(e.left), _prec(e.right)
        if e.op == "**":
            left = _wrap(e.left, lp <= p)
            right = _wrap(e.right, rp < _PREC["neg"])
        elif p == 4:
            left = _wrap(e.left, lp <= p)
            right = _wrap(e.right, rp <= p)
        else:
            left = _wrap(e.left, lp < p)
            right = _wrap(e.right, rp <= p)
        return f"{left} {e.op} {right}"
    raise TypeError(f"not an expression: {e!r}")


def _ts(t: A.Timestamp) -> str:
    if t.index is None:
        return f"timestamp -> {t.name}"
    return f"timestamp -> {t.name}[{print_expr(t.index)}]"


def print_stmt(s: A.Stmt, depth: int = 0) -> list[str]:
    pad = INDENT * depth
    if isinstance(s, A.Play):
        pulse = s.pulse
        if s.amp_scale is not None:
            pulse += f" * amp({print_expr(s.amp_scale)})"
        args = [pulse, s.element]
        if s.condition is not None:
            args.append(f"condition = {print_expr(s.condition)}")
        if s.timestamp is not None:
            args.append(_ts(s.timestamp))
        return [f"{pad}play({', '.join(args)})"]
    if isinstance(s, A.Measure):
        args = [s.pulse, s.element, f"demod({print_expr(s.target)})"]
        if s.timestamp is not None:
            args.append(_ts(s.timestamp))
        return [f"{pad}measure({', '.join(args)})"]
    if isinstance(s, A.Wait):
        args = []
        if s.duration is not None:
            args.append(print_expr(s.duration))
        if s.max_time is not None:
            args.append(f"max_time = {print_expr(s.max_time)}")
        args.extend(s.elements)
        return [f"{pad}wait({', '.join(args)})"]
    if isinstance(s, A.Align):
        return [f"{pad}align({', '.join(s.elements)})"]
    if isinstance(s, A.StrictTiming):
        return [f"{pad}strict_timing:"] + _block(s.body, depth + 1)
    if isinstance(s, A.If):
        out = [f"{pad}if {print_expr(s.cond)}:"] + _block(s.body, depth + 1)
        if s.orelse:
            out += [f"{pad}else:"] + _block(s.orelse, depth + 1)
        return out
    if isinstance(s, A.While):
        return [f"{pad}while {print_expr(s.cond)}:"] + _block(s.body, depth + 1)
    if isinstance(s, A.For):
        head = (f"{pad}for ({s.var} = {print_expr(s.init)}, {print_expr(s.cond)}, "
                f"{print_expr(s.step)}):")
        return [head] + _block(s.body, depth + 1)
    if isinstance(s, A.Assign):
        if s.op == "++":
            return [f"{pad}{print_expr(s.target)}++"]
        return [f"{pad}{print_expr(s.target)} {s.op} {print_expr(s.value)}"]
    if isinstance(s, A.UpdateFrequency):
        return [f"{pad}update_frequency({s.element}, {print_expr(s.value)})"]
    if isinstance(s, A.FrameRotation):
        return [f"{pad}frame_rotation_2pi({print_expr(s.angle)}, {s.element})"]
    if isinstance(s, A.SetDcOffset):
        return [f"{pad}set_dc_offset({s.element}, {print_expr(s.value)})"]
    raise TypeError(f"not a statement: {s!r}")


def _block(body: tuple[A.Stmt, ...], depth: int) -> list[str]:
    out: list[str] = []
    for s in body:
        out.extend(print_stmt(s, depth))
    return out


def print_decl(d: A.VarDecl) -> str:
    dims = "".join(f"[{print_expr(e)}]" for e in d.shape)
    text = f"{d.kind}{dims} {d.name}"
    if d.init is not None:
        text += f" = {print_expr(d.init)}"
    return text


def print_program(p: A.Program) -> str:
    lines = [f"{c.name} = {print_expr(c.value)}" for c in p.constants]
    lines += [print_decl(d) for d in p.declarations]
    lines += _block(p.body, 0)
    return "".join(line + "\n" for line in lines)
