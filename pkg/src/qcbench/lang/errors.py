from __future__ import annotations


class LangError(Exception):
    """Base class for parse and check diagnostics."""

    code = "LangError"

    def __init__(self, message: str, line: int = 0, col: int = 0):
        self.message = message
        self.line = line
        self.col = col
        super().__init__(self.__str__())

    def __str__(self) -> str:
        where = f"{self.line}:{self.col}: " if self.line else ""
        return f"{where}{self.code}: {self.message}"


class ParseError(LangError):
    code = "ParseError"


class CheckError(LangError):
    code = "CheckError"


class NestedStrictTiming(ParseError, CheckError):
    code = "NestedStrictTiming"


class UndeclaredVariable(CheckError):
    code = "UndeclaredVariable"

    def __init__(self, name: str, line: int = 0, col: int = 0):
        self.name = name
        super().__init__(f"variable {name!r} is not declared", line, col)


class DuplicateDeclaration(CheckError):
    code = "DuplicateDeclaration"


class TypeMismatch(CheckError):
    code = "TypeMismatch"


class UnknownElement(CheckError):
    code = "UnknownElement"


class UnknownPulse(CheckError):
    code = "UnknownPulse"


class WaitBothDurationAndMaxTime(CheckError):
    code = "WaitBothDurationAndMaxTime"
