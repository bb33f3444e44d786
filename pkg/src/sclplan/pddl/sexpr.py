"""Tokenizer and s-expression reader for PDDL text.

Identifiers are folded to lower case here, so everything downstream can
compare names directly.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import ParseError


@dataclass(frozen=True, slots=True)
class Token:
    text: str
    line: int
    col: int


@dataclass(frozen=True, slots=True)
class Symbol:
    """A leaf of the tree, remembering where it came from."""

    name: str
    line: int
    col: int

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True, slots=True)
class SList:
    items: tuple
    line: int
    col: int

    def __len__(self) -> int:
        return len(self.items)

    def __getitem__(self, i):
        return self.items[i]

    def __iter__(self):
        return iter(self.items)

    def head(self) -> str | None:
        if self.items and isinstance(self.items[0], Symbol):
            return self.items[0].name
        return None


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    line, col = 1, 1
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch in " \t\r\f":
            i += 1
            col += 1
            continue
        if ch == ";":
            while i < n and text[i] != "\n":
                i += 1
            continue
        if ch in "()":
            tokens.append(Token(ch, line, col))
            i += 1
            col += 1
            continue
        start, start_col = i, col
        while i < n and text[i] not in " \t\r\n\f();":
            i += 1
            col += 1
        tokens.append(Token(text[start:i].lower(), line, start_col))
    return tokens


def _end_position(text: str) -> tuple[int, int]:
    lines = text.split("\n")
    return len(lines), len(lines[-1]) + 1


def read(text: str) -> SList:
    """Read exactly one top-level list from ``text``."""
    tokens = tokenize(text)
    if not tokens:
        line, col = _end_position(text)
        raise ParseError("expected '(' but found end of input", line, col)
    if tokens[0].text != "(":
        t = tokens[0]
        raise ParseError(f"expected '(' but found {t.text!r}", t.line, t.col)
    node, pos = _read_list(tokens, 0, text)
    if pos != len(tokens):
        t = tokens[pos]
        raise ParseError(f"unexpected {t.text!r} after end of definition", t.line, t.col)
    return node


def _read_list(tokens: list[Token], pos: int, text: str) -> tuple[SList, int]:
    # iterative to survive deeply nested garbage from LLM output
    open_tok = tokens[pos]
    stack: list[tuple[Token, list]] = [(open_tok, [])]
    pos += 1
    while pos < len(tokens):
        t = tokens[pos]
        pos += 1
        if t.text == "(":
            stack.append((t, []))
        elif t.text == ")":
            tok, items = stack.pop()
            node = SList(tuple(items), tok.line, tok.col)
            if not stack:
                return node, pos
            stack[-1][1].append(node)
        else:
            stack[-1][1].append(Symbol(t.text, t.line, t.col))
    line, col = _end_position(text)
    raise ParseError("expected ')' but found end of input", line, col)


def balanced_spans(text: str):
    """Yield every balanced parenthesised span of ``text`` by start offset."""
    n = len(text)
    for i in range(n):
        if text[i] != "(":
            continue
        depth = 0
        for j in range(i, n):
            if text[j] == "(":
                depth += 1
            elif text[j] == ")":
                depth -= 1
                if depth == 0:
                    yield text[i : j + 1]
                    break


def span_head(span: str) -> str:
    inner = span[1:].lstrip()
    if not inner or inner[0] in "()":
        return ""
    return re.split(r"[\s()]", inner, maxsplit=1)[0].lower()
