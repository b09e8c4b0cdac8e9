"""The plain-text algebra file format.

::

    algebra <name>
    size <k>
    op <name> <arity>
    <k**arity integers, row-major, first argument most significant>

``#`` starts a comment.  Whitespace between tokens is free.
"""
from __future__ import annotations

import numpy as np

from .algebra import FiniteAlgebra
from .errors import AlgebraError


class ParseError(AlgebraError):
    def __init__(self, message, line, col):
        super().__init__(f"line {line}, column {col}: {message}")
        self.line = line
        self.col = col


def _tokens(text: str):
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0]
        col = 0
        for part in line.split():
            col = line.index(part, col)
            yield part, lineno, col + 1
            col += len(part)


def parse_algebra(text: str) -> FiniteAlgebra:
    toks = list(_tokens(text))
    pos = 0
    end = (text.count("\n") + 1, 1)

    def take(what):
        nonlocal pos
        if pos >= len(toks):
            raise ParseError(f"unexpected end of file, expected {what}", *end)
        tok = toks[pos]
        pos += 1
        return tok

    def integer(what):
        tok, line, col = take(what)
        try:
            return int(tok), line, col
        except ValueError:
            raise ParseError(f"expected {what}, got {tok!r}", line, col) from None

    def keyword(word):
        tok, line, col = take(f"'{word}'")
        if tok != word:
            raise ParseError(f"expected '{word}', got {tok!r}", line, col)

    keyword("algebra")
    name, _, _ = take("an algebra name")
    keyword("size")
    size, line, col = integer("the universe size")
    if size < 1:
        raise ParseError("size must be at least 1", line, col)
    symbols, tables = [], []
    while pos < len(toks):
        keyword("op")
        op, oline, ocol = take("an operation name")
        if any(c in op for c in "(),"):
            raise ParseError(f"operation name {op!r} may not contain '(', ')' or ','", oline, ocol)
        if op in (s for s, _ in symbols):
            raise ParseError(f"operation {op!r} defined twice", oline, ocol)
        arity, line, col = integer("an arity")
        if arity < 0:
            raise ParseError("arity must be nonnegative", line, col)
        values = []
        for _ in range(size**arity):
            v, line, col = integer(f"a table entry of {op!r}")
            if not 0 <= v < size:
                raise ParseError(f"entry {v} outside 0..{size - 1}", line, col)
            values.append(v)
        symbols.append((op, arity))
        tables.append(values)
    try:
        return FiniteAlgebra(size, symbols, tables, name)
    except AlgebraError as e:
        raise ParseError(str(e), 1, 1) from None


def format_algebra(A: FiniteAlgebra) -> str:
    name = "_".join((A.name or "A").split()).replace("#", "_")
    lines = [f"algebra {name}", f"size {A.size}"]
    for i, (name, r) in enumerate(A.signature):
        lines.append(f"op {name} {r}")
        table = np.asarray(A.tables[i])
        width = A.size if r else 1
        for lo in range(0, len(table), width):
            lines.append(" ".join(str(int(v)) for v in table[lo:lo + width]))
    return "\n".join(lines) + "\n"


def read_algebra(path: str, stdin=None) -> FiniteAlgebra:
    """Read a file; ``-`` means standard input."""
    if path == "-":
        import sys

        return parse_algebra((stdin or sys.stdin).read())
    with open(path, encoding="utf-8") as fh:
        return parse_algebra(fh.read())
