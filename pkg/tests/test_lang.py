from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from qcbench.lang import (
    DuplicateDeclaration,
    NestedStrictTiming,
    ParseError,
    TypeMismatch,
    UndeclaredVariable,
    UnknownElement,
    UnknownPulse,
    WaitBothDurationAndMaxTime,
    check_program,
    parse_expr,
    parse_program,
    print_expr,
    print_program,
)
from qcbench.lang import ast as A
from qcbench.sim.config import default_machine

MC = default_machine(1)

FEEDBACK = """\
fixed x
bool s
strict_timing:
   measure(readout_pulse, readout_element, demod(x), timestamp-> re_time)
   s = x > 0
   wait(max_time=300, control_element)
   play(control_pulse, control_element, condition = s, timestamp-> ce_time)
"""


# -- parser ------------------------------------------------------------------

def test_empty_program():
    assert parse_program("") == A.Program()
    assert parse_program("# only a comment\n\n") == A.Program()


def test_feedback_body():
    p = parse_program(FEEDBACK)
    (block,) = p.body
    assert isinstance(block, A.StrictTiming)
    assert [type(s) for s in block.body] == [A.Measure, A.Assign, A.Wait, A.Play]
    play = block.body[3]
    assert play.condition == A.Name("s")
    assert play.timestamp == A.Timestamp("ce_time")
    assert block.body[2].max_time == A.IntLit(300)


def test_missing_comma_points_at_token():
    with pytest.raises(ParseError) as err:
        parse_program("play(p1 q0)\n")
    assert (err.value.line, err.value.col) == (1, 9)


def test_nested_strict_timing_rejected():
    src = "strict_timing:\n   strict_timing:\n      play(control_pulse, control_element)\n"
    with pytest.raises(NestedStrictTiming) as err:
        parse_program(src)
    assert err.value.line == 2


def test_continuation_lines():
    src = "fixed x\nmeasure(readout_pulse, ...\n        readout_element, demod(x))\n"
    (m,) = parse_program(src).body
    assert m == A.Measure("readout_pulse", "readout_element", A.Name("x"))


def test_leading_assignment_to_undeclared_name_is_constant():
    p = parse_program("a = 3\nint b\nb = a\n")
    assert p.constants == (A.ConstDef("a", A.IntLit(3)),)
    assert p.body == (A.Assign(A.Name("b"), "=", A.Name("a")),)


def test_constants_and_declarations():
    p = parse_program("n = 4\nint[n] a = [1, 2, 3, 4]\nfixed f = 0.5\n")
    assert p.constants == (A.ConstDef("n", A.IntLit(4)),)
    assert [d.name for d in p.declarations] == ["a", "f"]
    assert p.declarations[0].init == A.ListInit(tuple(A.IntLit(v) for v in (1, 2, 3, 4)))


@pytest.mark.parametrize("text", ["a + b * c", "(a + b) * c", "a - (b - c)", "2 ** 3 ** 2",
                                  "not (a and b) or c", "-(a + 1)", "x[i + 1] > 0", "bin2dec(s) / 2 ** 16"])
def test_expression_print_parse(text):
    e = parse_expr(text)
    assert parse_expr(print_expr(e)) == e


def test_precedence():
    assert parse_expr("a + b * c") == A.BinOp("+", A.Name("a"), A.BinOp("*", A.Name("b"), A.Name("c")))
    assert parse_expr("a - b - c") == A.BinOp("-", A.BinOp("-", A.Name("a"), A.Name("b")), A.Name("c"))


# -- printer -----------------------------------------------------------------

def test_print_single_play():
    p = A.Program(body=(A.Play("control_pulse", "control_element"),))
    assert print_program(p) == "play(control_pulse, control_element)\n"


names = st.sampled_from(["a", "b", "c"])
lits = st.one_of(st.integers(0, 1000).map(A.IntLit),
                 st.sampled_from([0.5, 0.25, 1.5, 3.0]).map(A.FixedLit),
                 st.booleans().map(A.BoolLit))
exprs = st.recursive(
    st.one_of(names.map(A.Name), lits),
    lambda sub: st.one_of(
        st.builds(A.BinOp, st.sampled_from(["+", "-", "*", "/", "//", "**", "<", ">", "==", "and", "or"]),
                  sub, sub),
        st.builds(A.UnaryOp, st.sampled_from(["-", "not"]), sub),
        st.builds(A.Index, names.map(A.Name), sub),
        st.builds(A.Call, st.sampled_from(["sum", "bin2dec"]), st.tuples(sub)),
    ),
    max_leaves=8,
)
elements = st.sampled_from(["control_element", "readout_element"])
simple_stmts = st.one_of(
    st.builds(A.Assign, names.map(A.Name), st.sampled_from(["=", "+=", "-="]), exprs),
    st.builds(A.Assign, names.map(A.Name), st.just("++"), st.none()),
    st.builds(A.Play, st.sampled_from(["control_pulse", "pi"]), elements,
              st.none() | exprs, st.none() | exprs,
              st.none() | st.builds(A.Timestamp, st.just("ce_time"))),
    st.builds(A.Measure, st.just("readout_pulse"), elements, names.map(A.Name),
              st.none() | st.builds(A.Timestamp, st.just("re_time"), st.none() | exprs)),
    st.builds(A.Wait, st.lists(elements, min_size=1, max_size=2, unique=True).map(tuple), exprs, st.none()),
    st.builds(A.Wait, st.lists(elements, min_size=1, max_size=2, unique=True).map(tuple), st.none(), exprs),
    st.builds(A.Align, st.lists(elements, min_size=1, max_size=2, unique=True).map(tuple)),
    st.builds(A.UpdateFrequency, elements, exprs),
    st.builds(A.FrameRotation, exprs, elements),
    st.builds(A.SetDcOffset, elements, exprs),
)


def blocks(inner):
    body = st.lists(inner, min_size=1, max_size=3).map(tuple)
    return st.one_of(
        st.builds(A.If, exprs, body, st.just(()) | body),
        st.builds(A.While, exprs, body),
        st.builds(A.For, names, exprs, exprs, exprs, body),
    )


nested = st.recursive(simple_stmts, blocks, max_leaves=6)
strict = st.lists(nested, min_size=1, max_size=3).map(lambda b: A.StrictTiming(tuple(b)))
# every assigned name is declared; a leading assignment to an undeclared name is a constant
decls = st.permutations(["a", "b", "c"]).flatmap(lambda order: st.tuples(*(
    st.builds(A.VarDecl, st.just(n), st.sampled_from(["int", "fixed", "bool"]),
              st.just(()) | st.tuples(st.integers(1, 8).map(A.IntLit)))
    for n in order)))


@given(decls, st.lists(st.one_of(nested, strict), max_size=4))
def test_print_parse_round_trip(ds, body):
    p = A.Program(declarations=ds, body=tuple(body))
    text = print_program(p)
    again = parse_program(text)
    assert again == p
    assert print_program(again) == text


# -- checker -----------------------------------------------------------------

def test_checker_accepts_feedback_program():
    tp = check_program(parse_program(FEEDBACK), MC)
    assert tp.var_types["x"].kind == "fixed"
    assert tp.elements_used == {"readout_element", "control_element"}


@pytest.mark.parametrize("src, exc", [
    ("int a\ny = 1\n", UndeclaredVariable),
    ("int a\nbool b\nb = a\n", TypeMismatch),
    ("fixed x\nint a\na = x\n", TypeMismatch),
    ("play(control_pulse, q9)\n", UnknownElement),
    ("play(nope, control_element)\n", UnknownPulse),
    ("wait(10, max_time=20, control_element)\n", WaitBothDurationAndMaxTime),
    ("int a\nint a\n", DuplicateDeclaration),
    ("fixed a\nwait(a, control_element)\n", TypeMismatch),
])
def test_checker_rejects(src, exc):
    with pytest.raises(exc):
        check_program(parse_program(src), MC)


def test_undeclared_name_reported():
    with pytest.raises(UndeclaredVariable) as err:
        check_program(parse_program("fixed x\nx = y\n"), MC)
    assert err.value.name == "y"
    assert err.value.line == 2
