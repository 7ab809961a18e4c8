"""Tokeniser for ``.hyb`` files and sentences."""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Optional

from ..institution import HybridKitError


@dataclass(frozen=True)
class Pos:
    line: int
    col: int

    def __str__(self):
        return f"{self.line}:{self.col}"


class SpecError(HybridKitError):
    """Lexical, syntax or resolution error with a source position."""

    def __init__(self, message: str, pos: Optional[Pos] = None, expected: Iterable[str] = ()):
        self.message = message
        self.pos = pos or Pos(1, 1)
        self.expected = sorted(set(expected))
        super().__init__(str(self))

    def __str__(self):
        out = f"{self.pos}: {self.message}"
        if self.expected:
            out += f" (expected one of: {', '.join(self.expected)})"
        return out


@dataclass(frozen=True)
class Token:
    kind: str  # IDENT, NUMBER, EOF, or the operator text itself
    text: str
    pos: Pos = field(compare=False)

    def __str__(self):
        return "end of input" if self.kind == "EOF" else repr(self.text)


OPERATORS = ("\\/", "/\\", "=>", "->", "!", "*", "@", "<", ">", "[", "]",
             "(", ")", "{", "}", ",", ";", ":", ".", "=")

_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>(?://|\#)[^\n]*)
  | (?P<NUMBER>\d+(?:/\d+|\.\d+)?)
  | (?P<IDENT>[A-Za-z_][A-Za-z0-9_']*(?:-[A-Za-z][A-Za-z0-9_]*)*)
  | (?P<op>""" + "|".join(re.escape(o) for o in OPERATORS) + r""")
""", re.VERBOSE)


def tokenize(text: str) -> list[Token]:
    tokens = []
    i, line, col = 0, 1, 1
    while i < len(text):
        m = _TOKEN.match(text, i)
        if m is None:
            raise SpecError(f"unexpected character {text[i]!r}", Pos(line, col))
        kind = m.lastgroup
        chunk = m.group()
        if kind == "op":
            tokens.append(Token(chunk, chunk, Pos(line, col)))
        elif kind in ("NUMBER", "IDENT"):
            tokens.append(Token(kind, chunk, Pos(line, col)))
        newlines = chunk.count("\n")
        if newlines:
            line += newlines
            col = len(chunk) - chunk.rfind("\n")
        else:
            col += len(chunk)
        i = m.end()
    tokens.append(Token("EOF", "", Pos(line, col)))
    return tokens
