"""Line-oriented parser for ``.qcl`` sources.

Blocks are introduced by a trailing colon and delimited by indentation.
A trailing ``...`` continues a statement on the next line, and so does an
unclosed bracket.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from . import ast as A
from .errors import NestedStrictTiming, ParseError

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t]+)
  | (?P<comment>\#[^\n]*)
  | (?P<ellipsis>\.\.\.)
  | (?P<number>\d+(?:\.\d*)?(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>->|\*\*|//|\+\+|\+=|-=|==|!=|<=|>=|[-+*/<>=()\[\],:])
    """,
    re.VERBOSE,
)

KIND_WORDS = set(A.KINDS)
STMT_WORDS = {
    "strict_timing", "if", "else", "while", "for", "play", "measure", "wait",
    "align", "update_frequency", "frame_rotation_2pi", "frame_rot_2pi", "set_dc_offset",
}
RESERVED = KIND_WORDS | STMT_WORDS | {"and", "or", "not", "True", "False"}
COMPARE_OPS = {"<", ">", "<=", ">=", "==", "!="}


@dataclass
class Tok:
    kind: str  # name | number | op | end
    value: str
    line: int
    col: int


@dataclass
class LogicalLine:
    indent: int
    tokens: list[Tok]

    @property
    def line(self) -> int:
        return self.tokens[0].line


def _tokenize(source: str) -> list[LogicalLine]:
    lines: list[LogicalLine] = []
    pending: list[Tok] = []
    indent = 0
    depth = 0
    for lineno, text in enumerate(source.expandtabs(4).splitlines(), start=1):
        pos = 0
        toks: list[Tok] = []
        continued = False
        while pos < len(text):
            m = _TOKEN_RE.match(text, pos)
            if m is None:
                raise ParseError(f"unexpected character {text[pos]!r}", lineno, pos + 1)
            kind = m.lastgroup
            value = m.group()
            if kind == "ellipsis":
                rest = text[m.end():].strip()
                if rest and not rest.startswith("#"):
                    raise ParseError("'...' must end the line", lineno, pos + 1)
                continued = True
                break
            if kind not in ("ws", "comment"):
                toks.append(Tok(kind, value, lineno, pos + 1))
                if value in "([":
                    depth += 1
                elif value in ")]":
                    depth -= 1
                    if depth < 0:
                        raise ParseError(f"unbalanced {value!r}", lineno, pos + 1)
            pos = m.end()
        if not pending and toks:
            indent = toks[0].col - 1
        pending.extend(toks)
        if continued or depth > 0:
            continue
        if pending:
            lines.append(LogicalLine(indent, pending))
            pending = []
    if depth > 0 or pending:
        last = pending[-1] if pending else Tok("end", "", 0, 0)
        raise ParseError("unexpected end of input inside statement", last.line, last.col)
    return lines


class _LineParser:
    """Recursive-descent parser over the tokens of one logical line."""

    def __init__(self, line: LogicalLine):
        self.toks = line.tokens
        self.pos = 0
        last = self.toks[-1]
        self.end = Tok("end", "", last.line, last.col + len(last.value))

    # token helpers
    def peek(self, k: int = 0) -> Tok:
        i = self.pos + k
        return self.toks[i] if i < len(self.toks) else self.end

    def next(self) -> Tok:
        t = self.peek()
        self.pos += 1
        return t

    def at(self, value: str) -> bool:
        t = self.peek()
        return t.kind in ("op", "name") and t.value == value

    def accept(self, value: str) -> Tok | None:
        if self.at(value):
            return self.next()
        return None

    def expect(self, value: str) -> Tok:
        t = self.peek()
        if not self.at(value):
            shown = t.value or "end of line"
            raise ParseError(f"expected {value!r}, found {shown!r}", t.line, t.col)
        return self.next()

    def expect_name(self) -> Tok:
        t = self.peek()
        if t.kind != "name" or t.value in RESERVED:
            shown = t.value or "end of line"
            raise ParseError(f"expected identifier, found {shown!r}", t.line, t.col)
        return self.next()

    def done(self) -> None:
        t = self.peek()
        if t.kind != "end":
            raise ParseError(f"unexpected {t.value!r}", t.line, t.col)

    @staticmethod
    def pos_of(t: Tok) -> dict:
        return {"line": t.line, "col": t.col}

    # expressions
    def expr(self) -> A.Expr:
        left = self.and_expr()
        while self.at("or"):
            t = self.next()
            left = A.BinOp("or", left, self.and_expr(), **self.pos_of(t))
        return left

    def and_expr(self) -> A.Expr:
        left = self.not_expr()
        while self.at("and"):
            t = self.next()
            left = A.BinOp("and", left, self.not_expr(), **self.pos_of(t))
        return left

    def not_expr(self) -> A.Expr:
        if self.at("not"):
            t = self.next()
            return A.UnaryOp("not", self.not_expr(), **self.pos_of(t))
        return self.comparison()

    def comparison(self) -> A.Expr:
        left = self.arith()
        t = self.peek()
        if t.kind == "op" and t.value in COMPARE_OPS:
            self.next()
            left = A.BinOp(t.value, left, self.arith(), **self.pos_of(t))
            t2 = self.peek()
            if t2.kind == "op" and t2.value in COMPARE_OPS:
                raise ParseError("comparisons do not chain", t2.line, t2.col)
        return left

    def arith(self) -> A.Expr:
        left = self.term()
        while self.peek().kind == "op" and self.peek().value in ("+", "-"):
            t = self.next()
            left = A.BinOp(t.value, left, self.term(), **self.pos_of(t))
        return left

    def term(self) -> A.Expr:
        left = self.unary()
        while self.peek().kind == "op" and self.peek().value in ("*", "/", "//"):
            t = self.next()
            left = A.BinOp(t.value, left, self.unary(), **self.pos_of(t))
        return left

    def unary(self) -> A.Expr:
        if self.at("-"):
            t = self.next()
            return A.UnaryOp("-", self.unary(), **self.pos_of(t))
        return self.power()

    def power(self) -> A.Expr:
        base = self.postfix()
        if self.at("**"):
            t = self.next()
            return A.BinOp("**", base, self.unary(), **self.pos_of(t))
        return base

    def postfix(self) -> A.Expr:
        node = self.atom()
        while self.at("["):
            t = self.next()
            idx = self.expr()
            self.expect("]")
            node = A.Index(node, idx, **self.pos_of(t))
        return node

    def atom(self) -> A.Expr:
        t = self.peek()
        if t.kind == "number":
            self.next()
            if any(c in t.value for c in ".eE"):
                return A.FixedLit(float(t.value), **self.pos_of(t))
            return A.IntLit(int(t.value), **self.pos_of(t))
        if t.kind == "name":
            if t.value in ("True", "False"):
                self.next()
                return A.BoolLit(t.value == "True", **self.pos_of(t))
            if self.peek(1).value == "(" and self.peek(1).kind == "op":
                func = A.BUILTIN_ALIASES.get(t.value, t.value)
                if func in A.BUILTINS or func in A.RANDOM_INITS:
                    self.next()
                    self.expect("(")
                    args = self.args_until(")")
                    return A.Call(func, tuple(args), **self.pos_of(t))
                raise ParseError(f"unknown function {t.value!r}", t.line, t.col)
            name = self.expect_name()
            return A.Name(name.value, **self.pos_of(name))
        if self.at("("):
            self.next()
            e = self.expr()
            self.expect(")")
            return e
        shown = t.value or "end of line"
        raise ParseError(f"unexpected {shown!r} in expression", t.line, t.col)

    def args_until(self, close: str) -> list[A.Expr]:
        args: list[A.Expr] = []
        if self.accept(close):
            return args
        while True:
            args.append(self.expr())
            if self.accept(close):
                return args
            self.expect(",")

    def lvalue(self) -> A.Expr:
        t = self.expect_name()
        node: A.Expr = A.Name(t.value, **self.pos_of(t))
        while self.at("["):
            b = self.next()
            idx = self.expr()
            self.expect("]")
            node = A.Index(node, idx, **self.pos_of(b))
        return node

    def element(self) -> str:
        t = self.expect_name()
        if self.accept("["):
            n = self.peek()
            if n.kind != "number" or not n.value.isdigit():
                raise ParseError("element index must be an integer literal", n.line, n.col)
            self.next()
            self.expect("]")
            return f"{t.value}[{int(n.value)}]"
        return t.value

    def timestamp(self) -> A.Timestamp:
        t = self.expect_name()
        idx = None
        if self.accept("["):
            idx = self.expr()
            self.expect("]")
        return A.Timestamp(t.value, idx, **self.pos_of(t))

    # statements (single line part)
    def play(self, start: Tok) -> A.Play:
        self.expect("(")
        pulse = self.expect_name().value
        amp = None
        if self.accept("*"):
            self.expect_word("amp")
            self.expect("(")
            amp = self.expr()
            self.expect(")")
        self.expect(",")
        elem = self.element()
        cond = ts = None
        while self.accept(","):
            if self.at_word("condition"):
                self.next()
                self.expect("=")
                cond = self.expr()
            elif self.at_word("timestamp"):
                self.next()
                self.expect("->")
                ts = self.timestamp()
            else:
                t = self.peek()
                raise ParseError("expected 'condition =' or 'timestamp ->'", t.line, t.col)
        self.expect(")")
        return A.Play(pulse, elem, cond, amp, ts, **self.pos_of(start))

    def measure(self, start: Tok) -> A.Measure:
        self.expect("(")
        pulse = self.expect_name().value
        self.expect(",")
        elem = self.element()
        self.expect(",")
        self.expect_word("demod")
        self.expect("(")
        target = self.lvalue()
        self.expect(")")
        ts = None
        if self.accept(","):
            self.expect_word("timestamp")
            self.expect("->")
            ts = self.timestamp()
        self.expect(")")
        return A.Measure(pulse, elem, target, ts, **self.pos_of(start))

    def wait(self, start: Tok) -> A.Wait:
        self.expect("(")
        duration = max_time = None
        if self.at_word("max_time") and self.peek(1).value == "=":
            self.next()
            self.next()
            max_time = self.expr()
        else:
            duration = self.expr()
            if self.accept(","):
                if self.at_word("max_time") and self.peek(1).value == "=":
                    self.next()
                    self.next()
                    max_time = self.expr()
                else:
                    self.pos -= 1
        elems: list[str] = []
        while self.accept(","):
            elems.append(self.element())
        self.expect(")")
        if not elems:
            raise ParseError("wait needs at least one element", start.line, start.col)
        return A.Wait(tuple(elems), duration, max_time, **self.pos_of(start))

    def element_list(self) -> tuple[str, ...]:
        self.expect("(")
        elems = [self.element()]
        while self.accept(","):
            elems.append(self.element())
        self.expect(")")
        return tuple(elems)

    def at_word(self, word: str) -> bool:
        t = self.peek()
        return t.kind == "name" and t.value == word

    def expect_word(self, word: str) -> Tok:
        if not self.at_word(word):
            t = self.peek()
            raise ParseError(f"expected {word!r}", t.line, t.col)
        return self.next()


class Parser:
    def __init__(self, source: str):
        self.lines = _tokenize(source)
        self.i = 0

    def parse(self) -> A.Program:
        decl_names = {
            ln.tokens[self._decl_name_pos(ln)].value
            for ln in self.lines
            if ln.indent == 0 and ln.tokens[0].value in KIND_WORDS and self._decl_name_pos(ln) is not None
        }
        consts: list[A.ConstDef] = []
        decls: list[A.VarDecl] = []
        body: list[A.Stmt] = []
        phase = 0  # 0: constants, 1: declarations, 2: statements
        while self.i < len(self.lines):
            ln = self.lines[self.i]
            if ln.indent != 0:
                raise ParseError("unexpected indent", ln.line, ln.tokens[0].col)
            first = ln.tokens[0]
            if phase == 0 and self._is_const(ln, decl_names):
                p = _LineParser(ln)
                name = p.expect_name()
                p.expect("=")
                value = p.expr()
                p.done()
                consts.append(A.ConstDef(name.value, value, line=first.line, col=first.col))
                self.i += 1
                continue
            if first.value in KIND_WORDS:
                if phase == 2:
                    raise ParseError("declarations must precede statements", first.line, first.col)
                phase = 1
                decls.append(self._decl(ln))
                self.i += 1
                continue
            phase = 2
            body.append(self._stmt(0, in_strict=False))
        return A.Program(tuple(consts), tuple(decls), tuple(body), line=1, col=1)

    @staticmethod
    def _decl_name_pos(ln: LogicalLine) -> int | None:
        depth = 0
        for k, t in enumerate(ln.tokens[1:], start=1):
            if t.value == "[":
                depth += 1
            elif t.value == "]":
                depth -= 1
            elif depth == 0 and t.kind == "name":
                return k
            elif depth == 0:
                return None
        return None

    @staticmethod
    def _is_const(ln: LogicalLine, decl_names: set[str]) -> bool:
        toks = ln.tokens
        return (
            len(toks) >= 3
            and toks[0].kind == "name"
            and toks[0].value not in RESERVED
            and toks[1].value == "="
            and toks[0].value not in decl_names
        )

    def _decl(self, ln: LogicalLine) -> A.VarDecl:
        p = _LineParser(ln)
        kind_tok = p.next()
        shape: list[A.Expr] = []
        while p.accept("["):
            shape.append(p.expr())
            p.expect("]")
        if len(shape) > 2:
            raise ParseError("at most two dimensions are supported", kind_tok.line, kind_tok.col)
        name = p.expect_name()
        init = None
        if p.accept("="):
            if p.at("["):
                t = p.next()
                items = p.args_until("]")
                init = A.ListInit(tuple(items), line=t.line, col=t.col)
            else:
                init = p.expr()
        p.done()
        return A.VarDecl(name.value, kind_tok.value, tuple(shape), init,
                         line=kind_tok.line, col=kind_tok.col)

    def _block(self, header: LogicalLine, in_strict: bool) -> tuple[A.Stmt, ...]:
        if self.i >= len(self.lines) or self.lines[self.i].indent <= header.indent:
            t = header.tokens[-1]
            raise ParseError("expected an indented block", t.line, t.col)
        indent = self.lines[self.i].indent
        stmts: list[A.Stmt] = []
        while self.i < len(self.lines) and self.lines[self.i].indent >= indent:
            ln = self.lines[self.i]
            if ln.indent > indent:
                raise ParseError("unexpected indent", ln.line, ln.tokens[0].col)
            stmts.append(self._stmt(indent, in_strict))
        return tuple(stmts)

    def _stmt(self, indent: int, in_strict: bool) -> A.Stmt:
        ln = self.lines[self.i]
        self.i += 1
        p = _LineParser(ln)
        t = p.peek()
        word = t.value if t.kind == "name" else ""
        pos = {"line": t.line, "col": t.col}

        if word in KIND_WORDS:
            raise ParseError("declarations are only allowed at top level", t.line, t.col)
        if word == "strict_timing":
            if in_strict:
                raise NestedStrictTiming("strict_timing blocks cannot be nested", t.line, t.col)
            p.next()
            p.expect(":")
            p.done()
            return A.StrictTiming(self._block(ln, True), **pos)
        if word == "if":
            p.next()
            cond = p.expr()
            p.expect(":")
            p.done()
            body = self._block(ln, in_strict)
            orelse: tuple[A.Stmt, ...] = ()
            if self.i < len(self.lines):
                nxt = self.lines[self.i]
                if nxt.indent == ln.indent and nxt.tokens[0].value == "else":
                    self.i += 1
                    q = _LineParser(nxt)
                    q.next()
                    q.expect(":")
                    q.done()
                    orelse = self._block(nxt, in_strict)
            return A.If(cond, body, orelse, **pos)
        if word == "else":
            raise ParseError("'else' without matching 'if'", t.line, t.col)
        if word == "while":
            p.next()
            cond = p.expr()
            p.expect(":")
            p.done()
            return A.While(cond, self._block(ln, in_strict), **pos)
        if word == "for":
            p.next()
            p.expect("(")
            var = p.expect_name().value
            if p.accept("="):
                init = p.expr()
            else:
                p.expect(",")
                init = p.expr()
            p.expect(",")
            cond = p.expr()
            p.expect(",")
            step = p.expr()
            p.expect(")")
            p.expect(":")
            p.done()
            return A.For(var, init, cond, step, self._block(ln, in_strict), **pos)

        if word == "play":
            p.next()
            s = p.play(t)
        elif word == "measure":
            p.next()
            s = p.measure(t)
        elif word == "wait":
            p.next()
            s = p.wait(t)
        elif word == "align":
            p.next()
            s = A.Align(p.element_list(), **pos)
        elif word == "update_frequency":
            p.next()
            p.expect("(")
            elem = p.element()
            p.expect(",")
            value = p.expr()
            p.expect(")")
            s = A.UpdateFrequency(elem, value, **pos)
        elif word in ("frame_rotation_2pi", "frame_rot_2pi"):
            p.next()
            p.expect("(")
            angle = p.expr()
            p.expect(",")
            elem = p.element()
            p.expect(")")
            s = A.FrameRotation(angle, elem, **pos)
        elif word == "set_dc_offset":
            p.next()
            p.expect("(")
            elem = p.element()
            p.expect(",")
            value = p.expr()
            p.expect(")")
            s = A.SetDcOffset(elem, value, **pos)
        else:
            target = p.lvalue()
            if p.accept("++"):
                s = A.Assign(target, "++", None, **pos)
            else:
                op_tok = p.peek()
                if op_tok.value not in ("=", "+=", "-="):
                    shown = op_tok.value or "end of line"
                    raise ParseError(f"expected assignment, found {shown!r}", op_tok.line, op_tok.col)
                p.next()
                s = A.Assign(target, op_tok.value, p.expr(), **pos)
        p.done()
        return s


def parse_program(source_text: str) -> A.Program:
    """Parse ``.qcl`` source text into a :class:`Program`."""
    return Parser(source_text).parse()


def parse_expr(text: str) -> A.Expr:
    lines = _tokenize(text)
    if len(lines) != 1:
        raise ParseError("expected a single expression")
    p = _LineParser(lines[0])
    e = p.expr()
    p.done()
    return e
