from __future__ import annotations

import re
from dataclasses import dataclass


class DslError(ValueError):
    """Error in an immersion description, located in the source text."""

    kind = "error"

    def __init__(self, message: str, source: str, span: tuple[int, int]):
        self.message = message
        self.span = span
        self.line, self.column = line_col(source, span[0])
        start = source.rfind("\n", 0, span[0]) + 1
        end = source.find("\n", start)
        self.source_line = source[start : len(source) if end < 0 else end]
        super().__init__(f"{self.kind} at line {self.line}, column {self.column}: {message}")

    def excerpt(self) -> str:
        """The offending source line with the span underlined."""
        width = max(1, min(self.span[1] - self.span[0], len(self.source_line) - self.column + 1))
        return f"  {self.source_line}\n  {' ' * (self.column - 1)}{'^' * width}"

    def __reduce__(self):
        return _rebuild_dsl_error, (type(self), self.args[0], self.message, self.span, self.line, self.column, self.source_line)


def _rebuild_dsl_error(cls, text, message, span, line, column, source_line):
    err = cls.__new__(cls)
    ValueError.__init__(err, text)
    err.message, err.span, err.line, err.column, err.source_line = message, span, line, column, source_line
    return err


class LexError(DslError):
    kind = "lexical error"


class ParseError(DslError):
    kind = "syntax error"


class UnknownIdentifier(DslError):
    kind = "unknown identifier"


class ArityError(DslError):
    kind = "arity error"


class SpecError(DslError):
    kind = "invalid description"


def line_col(source: str, offset: int) -> tuple[int, int]:
    line = source.count("\n", 0, offset) + 1
    col = offset - (source.rfind("\n", 0, offset) + 1) + 1
    return line, col


@dataclass(frozen=True)
class Token:
    kind: str  # NUMBER IDENT OP SEP EOF
    text: str
    start: int
    end: int


_NUMBER = re.compile(r"(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?")
_IDENT = re.compile(r"[A-Za-z_][A-Za-z_0-9]*")
_OPS = ("->", "+", "-", "*", "/", "^", "(", ")", "[", "]", ",", "=")


def tokenize(source: str) -> list[Token]:
    """Split source into tokens.

    Newlines and ``;`` become ``SEP`` tokens, except inside brackets or
    parentheses where newlines are plain whitespace.
    """
    tokens: list[Token] = []
    depth = 0
    i, n = 0, len(source)
    while i < n:
        ch = source[i]
        if ch == "#":
            j = source.find("\n", i)
            i = n if j < 0 else j
            continue
        if ch == "\n":
            if depth == 0:
                tokens.append(Token("SEP", "\n", i, i + 1))
            i += 1
            continue
        if ch in " \t\r":
            i += 1
            continue
        if ch == ";":
            tokens.append(Token("SEP", ";", i, i + 1))
            i += 1
            continue
        m = _NUMBER.match(source, i)
        if m:
            tokens.append(Token("NUMBER", m.group(), i, m.end()))
            i = m.end()
            continue
        m = _IDENT.match(source, i)
        if m:
            tokens.append(Token("IDENT", m.group(), i, m.end()))
            i = m.end()
            continue
        for op in _OPS:
            if source.startswith(op, i):
                if op in "([":
                    depth += 1
                elif op in ")]":
                    depth = max(0, depth - 1)
                tokens.append(Token("OP", op, i, i + len(op)))
                i += len(op)
                break
        else:
            raise LexError(f"unexpected character {ch!r}", source, (i, i + 1))
    tokens.append(Token("EOF", "", n, n))
    return tokens
