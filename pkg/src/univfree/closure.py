"""Subuniverse generation with term witnesses.

Everything here generates inside a *power*: an ambient list of segments
``(algebra, length)`` all sharing one signature.  An element is a row of
coordinates; operations act coordinatewise, each segment through its own
tables.  Single algebras, function spaces ``A^(A^n)`` and mixed products such
as ``F^(patterns) x S^(S^K)`` are all powers of this kind.

Generation is breadth-first and semi-naive: round ``t`` applies each
operation only to argument tuples that use at least one element found in
round ``t-1``.  Every element records the operation and argument indices that
first produced it, so witnesses have minimal depth and children always
precede parents.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import guards
from .algebra import FiniteAlgebra, Signature
from .errors import AlgebraError, ResourceGuardError, SignatureMismatch

_CHUNK = 1 << 22  # coordinates materialized per batch


# --- terms -----------------------------------------------------------------

@dataclass(frozen=True)
class Var:
    index: int

    def __str__(self):
        return f"x{self.index}"


@dataclass(frozen=True)
class App:
    op: int
    args: tuple

    def __str__(self):
        return f"f{self.op}(" + ",".join(map(str, self.args)) + ")"


Term = Var | App


def term_str(t: Term, signature: Signature) -> str:
    """Prefix form over operation names and variables ``x0, x1, ...``."""
    if isinstance(t, Var):
        return f"x{t.index}"
    name = signature.symbols[t.op][0]
    if not t.args:
        return name
    return name + "(" + ",".join(term_str(a, signature) for a in t.args) + ")"


def parse_term(text: str, signature: Signature) -> Term:
    """Inverse of :func:`term_str`."""
    pos = 0
    text = text.replace(" ", "")

    def name():
        nonlocal pos
        start = pos
        while pos < len(text) and text[pos] not in "(),":
            pos += 1
        return text[start:pos]

    def node():
        nonlocal pos
        tok = name()
        if tok in signature.names:
            i = signature.index(tok)
            args = []
            if pos < len(text) and text[pos] == "(":
                pos += 1
                while True:
                    args.append(node())
                    if text[pos] == ",":
                        pos += 1
                        continue
                    if text[pos] == ")":
                        pos += 1
                        break
            if len(args) != signature.arity(i):
                raise AlgebraError(f"{tok!r} applied to {len(args)} arguments")
            return App(i, tuple(args))
        if tok.startswith("x") and tok[1:].isdigit():
            return Var(int(tok[1:]))
        raise AlgebraError(f"unknown symbol {tok!r} in term")

    t = node()
    if pos != len(text):
        raise AlgebraError(f"trailing text in term {text!r}")
    return t


def term_vars(t: Term) -> set[int]:
    if isinstance(t, Var):
        return {t.index}
    out: set[int] = set()
    for a in t.args:
        out |= term_vars(a)
    return out


def rename_vars(t: Term, mapping: dict[int, int]) -> Term:
    if isinstance(t, Var):
        return Var(mapping[t.index])
    return App(t.op, tuple(rename_vars(a, mapping) for a in t.args))


def substitute(t: Term, mapping: dict[int, Term]) -> Term:
    if isinstance(t, Var):
        return mapping.get(t.index, t)
    return App(t.op, tuple(substitute(a, mapping) for a in t.args))


def evaluate(t: Term, A: FiniteAlgebra, assignment: Sequence[int]) -> int:
    """Value of ``t`` in A with ``x_i := assignment[i]``."""
    memo: dict[int, int] = {}

    def ev(node):
        key = id(node)
        if key in memo:
            return memo[key]
        if isinstance(node, Var):
            val = int(assignment[node.index])
        else:
            idx = 0
            for a in node.args:
                idx = idx * A.size + ev(a)
            val = int(A.tables[node.op][idx])
        memo[key] = val
        return val

    return ev(t)


def term_table(t: Term, A: FiniteAlgebra, n: int) -> np.ndarray:
    """The n-ary term operation of ``t`` on A as a flat table."""
    L = A.size**n
    idx = np.arange(L)
    cols = [(idx // A.size ** (n - 1 - i)) % A.size for i in range(n)]
    memo: dict[int, np.ndarray] = {}

    def ev(node):
        if id(node) in memo:
            return memo[id(node)]
        if isinstance(node, Var):
            val = cols[node.index]
        else:
            flat = np.zeros(L, dtype=np.int64)
            for a in node.args:
                flat = flat * A.size + ev(a)
            val = A.tables[node.op][flat]
        memo[id(node)] = val
        return val

    return np.asarray(ev(t), dtype=np.int64)


# --- ambient powers ----------------------------------------------------------

class Power:
    """Direct product of segments ``(algebra, length)`` over one signature."""

    def __init__(self, segments: Sequence[tuple[FiniteAlgebra, int]]):
        segments = [(A, int(n)) for A, n in segments]
        if not segments:
            raise AlgebraError("a power needs at least one segment")
        sig = segments[0][0].signature
        for A, _ in segments:
            if A.signature != sig:
                raise SignatureMismatch("all factors of a power must share a signature")
        self.segments = segments
        self.signature = sig
        self.width = sum(n for _, n in segments)
        self.offsets = np.cumsum([0] + [n for _, n in segments])
        biggest = max(A.size for A, _ in segments)
        self.dtype = np.uint8 if biggest <= 256 else (np.uint16 if biggest <= 65536 else np.int64)

    def __repr__(self):
        return "Power(" + " x ".join(f"{A.name or 'A'}^{n}" for A, n in self.segments) + ")"

    def segment(self, rows: np.ndarray, j: int) -> np.ndarray:
        return rows[..., self.offsets[j]:self.offsets[j + 1]]

    def constant(self, op: int) -> np.ndarray:
        return np.concatenate(
            [np.full(n, A.tables[op][0], dtype=self.dtype) for A, n in self.segments]
        )

    def apply(self, op: int, args: Sequence[np.ndarray]) -> np.ndarray:
        """Apply operation ``op`` coordinatewise to argument rows of shape (P, width)."""
        if not args:
            return self.constant(op)[None, :]
        out = np.empty(args[0].shape, dtype=self.dtype)
        for j, (A, _) in enumerate(self.segments):
            lo, hi = self.offsets[j], self.offsets[j + 1]
            flat = np.zeros(args[0][:, lo:hi].shape, dtype=np.int64)
            for a in args:
                flat *= A.size
                flat += a[:, lo:hi]
            out[:, lo:hi] = A.tables[op][flat]
        return out


# --- generated sets ----------------------------------------------------------

class GeneratedSet:
    """A subuniverse of a :class:`Power` together with a witness arena.

    ``witness[i]`` is ``("var", g)`` for the g-th generator or
    ``(op, (child, ...))``; children are indices of earlier elements.
    """

    def __init__(self, ambient: Power, rows: np.ndarray, witness: list, n_gens: int,
                 gen_rows: np.ndarray, stopped: int | None = None):
        self.ambient = ambient
        self.rows = rows
        self.witness = witness
        self.n_gens = n_gens
        self.gen_rows = gen_rows
        self.stopped = stopped
        self._index = None
        self._terms: dict[int, Term] = {}

    def __len__(self):
        return self.rows.shape[0]

    def __repr__(self):
        return f"<GeneratedSet {len(self)} elements in {self.ambient}>"

    @property
    def complete(self) -> bool:
        """False when generation stopped early at a flagged element."""
        return self.stopped is None

    def index_of(self, row) -> int | None:
        if self._index is None:
            self._index = {r.tobytes(): i for i, r in enumerate(self.rows)}
        row = np.asarray(row, dtype=self.ambient.dtype)
        return self._index.get(row.tobytes())

    def segment(self, j: int, i: int | None = None) -> np.ndarray:
        rows = self.ambient.segment(self.rows, j)
        return rows if i is None else rows[i]

    def term(self, i: int) -> Term:
        """Witness term of element ``i`` over generator variables."""
        if i in self._terms:
            return self._terms[i]
        stack = [i]
        while stack:
            j = stack[-1]
            w = self.witness[j]
            if w[0] == "var":
                self._terms[j] = Var(w[1])
                stack.pop()
                continue
            missing = [c for c in w[1] if c not in self._terms]
            if missing:
                stack.extend(missing)
                continue
            self._terms[j] = App(w[0], tuple(self._terms[c] for c in w[1]))
            stack.pop()
        return self._terms[i]

    def replay(self, i: int) -> np.ndarray:
        """Recompute element ``i`` by evaluating its witness over the generators."""
        memo: dict[int, np.ndarray] = {}
        order = []
        stack = [i]
        while stack:
            j = stack.pop()
            if j in memo:
                continue
            memo[j] = None
            order.append(j)
            w = self.witness[j]
            if w[0] != "var":
                stack.extend(w[1])
        for j in sorted(order):
            w = self.witness[j]
            if w[0] == "var":
                memo[j] = self.gen_rows[w[1]]
            else:
                args = [memo[c][None, :] for c in w[1]]
                memo[j] = self.ambient.apply(w[0], args)[0]
        return memo[i]

    def as_algebra(self, name: str = "") -> FiniteAlgebra:
        """The generated subalgebra on indices ``0..len-1``."""
        n = len(self)
        if not self.complete:
            raise AlgebraError("generation stopped early; the set is not closed")
        tables = []
        lookup = _RowLookup(self.rows)
        for op, (_, r) in enumerate(self.ambient.signature):
            if r == 0:
                tables.append([lookup.find(self.ambient.constant(op)[None, :])[0]])
                continue
            total = n**r
            out = np.empty(total, dtype=np.int64)
            step = max(1, _CHUNK // max(1, self.ambient.width))
            for lo in range(0, total, step):
                hi = min(total, lo + step)
                flat = np.arange(lo, hi)
                args = [self.rows[(flat // n ** (r - 1 - p)) % n] for p in range(r)]
                out[lo:hi] = lookup.find(self.ambient.apply(op, args))
            tables.append(out)
        return FiniteAlgebra(n, self.ambient.signature, tables, name)


class _RowLookup:
    def __init__(self, rows):
        self.index = {r.tobytes(): i for i, r in enumerate(rows)}

    def find(self, rows) -> np.ndarray:
        out = np.empty(rows.shape[0], dtype=np.int64)
        for j, r in enumerate(rows):
            k = self.index.get(r.tobytes())
            if k is None:
                raise AlgebraError("set is not closed under the operations")
            out[j] = k
        return out


def _tuples(op_arity, old, cur):
    """Index tuples (as r arrays) using at least one element of [old, cur)."""
    r = op_arity
    for first_new in range(r):
        ranges = [range(0, old)] * first_new + [range(old, cur)] + [range(0, cur)] * (r - 1 - first_new)
        sizes = [len(x) for x in ranges]
        if 0 in sizes:
            continue
        total = int(np.prod(sizes))
        yield ranges, sizes, total


def generate(ambient: Power, gens, stop: Callable | None = None) -> GeneratedSet:
    """Least subuniverse of ``ambient`` containing ``gens`` and all constants.

    ``stop(rows)`` may flag newly found rows (boolean mask); generation then
    halts right after the flagged element is recorded, and the result's
    ``stopped`` attribute holds its index.
    """
    gen_rows = np.asarray(gens, dtype=ambient.dtype).reshape(-1, ambient.width)
    for j, (A, _) in enumerate(ambient.segments):
        seg = ambient.segment(gen_rows.astype(np.int64), j)
        if seg.size and (seg.min() < 0 or seg.max() >= A.size):
            raise AlgebraError("generator coordinate outside its factor's universe")
    index: dict[bytes, int] = {}
    rows: list[np.ndarray] = []
    witness: list = []
    limit = guards.limit("MAX_GENERATED")

    def add(batch, wits):
        """Record unseen rows; returns the index of a stop-flagged row or None."""
        flags = stop(batch) if stop is not None else None
        for j, row in enumerate(batch):
            key = row.tobytes()
            if key in index:
                continue
            index[key] = len(rows)
            rows.append(row.copy())
            witness.append(wits(j))
            if len(rows) > limit:
                raise ResourceGuardError("MAX_GENERATED", len(rows), limit)
            if flags is not None and flags[j]:
                return len(rows) - 1
        return None

    def finish(stopped=None):
        arr = np.array(rows, dtype=ambient.dtype).reshape(-1, ambient.width)
        return GeneratedSet(ambient, arr, witness, len(gen_rows), gen_rows, stopped)

    for g, row in enumerate(gen_rows):
        hit = add(row[None, :], lambda _j, g=g: ("var", g))
        if hit is not None:
            return finish(hit)
    for op, (_, r) in enumerate(ambient.signature):
        if r == 0:
            hit = add(ambient.constant(op)[None, :], lambda _j, op=op: (op, ()))
            if hit is not None:
                return finish(hit)

    positive = [(op, r) for op, (_, r) in enumerate(ambient.signature) if r > 0]
    old = 0
    while True:
        cur = len(rows)
        if cur == old:
            return finish()
        table = np.array(rows, dtype=ambient.dtype)
        for op, r in positive:
            for ranges, sizes, total in _tuples(r, old, cur):
                step = max(1, _CHUNK // max(1, ambient.width))
                starts = [x.start for x in ranges]
                for lo in range(0, total, step):
                    flat = np.arange(lo, min(total, lo + step))
                    idx = []
                    rem = flat
                    for p in range(r - 1, -1, -1):
                        idx.append(rem % sizes[p] + starts[p])
                        rem = rem // sizes[p]
                    idx.reverse()
                    out = ambient.apply(op, [table[ix] for ix in idx])
                    uniq, first = np.unique(out, axis=0, return_index=True)
                    order = np.argsort(first, kind="stable")
                    uniq, first = uniq[order], first[order]
                    keep = np.array([u.tobytes() not in index for u in uniq], dtype=bool)
                    if not keep.any():
                        continue
                    uniq, first = uniq[keep], first[keep]
                    hit = add(uniq, lambda j, op=op, idx=idx, first=first:
                              (op, tuple(int(ix[first[j]]) for ix in idx)))
                    if hit is not None:
                        return finish(hit)
        old = cur


# --- the public generation operations ----------------------------------------

def generate_subuniverse(A: FiniteAlgebra, gens: Sequence[int], stop=None) -> GeneratedSet:
    for g in gens:
        if not 0 <= int(g) < A.size:
            raise AlgebraError(f"generator {g} outside the universe")
    return generate(Power([(A, 1)]), [[int(g)] for g in gens], stop)


def projection_rows(size: int, n: int) -> np.ndarray:
    """The n projection tables of length size**n, one per row."""
    idx = np.arange(size**n)
    return np.stack([(idx // size ** (n - 1 - i)) % size for i in range(n)]) if n else np.zeros((0, 1))


def clone_table(A: FiniteAlgebra, n: int) -> GeneratedSet:
    """The n-ary term operations of A, generated from the projections in A^(A^n)."""
    if n < 0:
        raise AlgebraError("arity must be nonnegative")
    if n == 0 and not A.signature.nullary():
        raise AlgebraError("Clo_0 is defined only for signatures with a constant symbol")
    guards.check("MAX_CLONE_TABLE", A.size**n)
    return generate(Power([(A, A.size**n)]), projection_rows(A.size, n))


def unary_polynomials(A: FiniteAlgebra) -> GeneratedSet:
    """Pol_1(A): generated in A^A by the identity (x0) and the constants c (x(1+c))."""
    guards.check("MAX_POL1_SIZE", A.size)
    gens = [np.arange(A.size)] + [np.full(A.size, c) for c in range(A.size)]
    return generate(Power([(A, A.size)]), gens)


def joint_generation(left, right, paired_gens, stop=None) -> GeneratedSet:
    """Generate in ``left x right`` from ``(left_row, right_row)`` pairs.

    ``left`` and ``right`` are algebras or ``(algebra, length)`` segments.
    Segment 0 of the result holds left components, segment 1 right ones.
    """
    if isinstance(left, FiniteAlgebra):
        left = (left, 1)
    if isinstance(right, FiniteAlgebra):
        right = (right, 1)
    ambient = Power([left, right])
    gens = [np.concatenate([np.atleast_1d(a), np.atleast_1d(b)]) for a, b in paired_gens]
    return generate(ambient, gens, stop)


def is_closed(gs: GeneratedSet) -> bool:
    """Exhaustive fixpoint check: every operation maps members to members."""
    lookup = {r.tobytes() for r in gs.rows}
    n = len(gs)
    for op, (_, r) in enumerate(gs.ambient.signature):
        for combo in itertools.product(range(n), repeat=r):
            out = gs.ambient.apply(op, [gs.rows[[c]] for c in combo]) if r else gs.ambient.apply(op, [])
            if out[0].tobytes() not in lookup:
                return False
    return True
