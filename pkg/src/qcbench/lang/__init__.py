"""Parser, checker and printer for the pulse-level benchmark language."""

from . import ast
from .checker import TypedProgram, VarType, check_program
from .errors import (
    CheckError,
    DuplicateDeclaration,
    LangError,
    NestedStrictTiming,
    ParseError,
    TypeMismatch,
    UndeclaredVariable,
    UnknownElement,
    UnknownPulse,
    WaitBothDurationAndMaxTime,
)
from .parser import parse_expr, parse_program
from .printer import print_expr, print_program

__all__ = [
    "ast", "TypedProgram", "VarType", "check_program", "CheckError", "DuplicateDeclaration",
    "LangError", "NestedStrictTiming", "ParseError", "TypeMismatch", "UndeclaredVariable",
    "UnknownElement", "UnknownPulse", "WaitBothDurationAndMaxTime", "parse_expr",
    "parse_program", "print_expr", "print_program",
]
