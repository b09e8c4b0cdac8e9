"""Finite algebras as dense operation tables, and structure-level constructions.

An algebra has universe ``{0, ..., size-1}``.  An ``r``-ary operation is a flat
table of length ``size**r`` read row-major with the first argument most
significant, so ``f(a, b) = table[a * size + b]``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import guards
from .errors import AlgebraError, NotACongruence, SignatureMismatch


@dataclass(frozen=True)
class Signature:
    symbols: tuple[tuple[str, int], ...]

    def __post_init__(self):
        symbols = tuple((str(n), int(r)) for n, r in self.symbols)
        names = [n for n, _ in symbols]
        if len(set(names)) != len(names):
            raise AlgebraError(f"duplicate operation names in {names}")
        for n, r in symbols:
            if r < 0:
                raise AlgebraError(f"negative arity for {n!r}")
            if not n or any(c.isspace() for c in n) or any(c in n for c in "(),#"):
                raise AlgebraError(f"bad operation name {n!r}")
        object.__setattr__(self, "symbols", symbols)

    def __len__(self):
        return len(self.symbols)

    def __iter__(self):
        return iter(self.symbols)

    @property
    def names(self) -> list[str]:
        return [n for n, _ in self.symbols]

    def arity(self, i: int) -> int:
        return self.symbols[i][1]

    def index(self, name: str) -> int:
        for i, (n, _) in enumerate(self.symbols):
            if n == name:
                return i
        raise AlgebraError(f"no operation named {name!r}")

    def nullary(self) -> list[int]:
        return [i for i, (_, r) in enumerate(self.symbols) if r == 0]

    def extend(self, *symbols: tuple[str, int]) -> "Signature":
        return Signature(self.symbols + tuple(symbols))


@dataclass(frozen=True)
class Operation:
    arity: int
    table: np.ndarray


def _as_table(table, size: int, arity: int, name: str) -> np.ndarray:
    t = np.asarray(table, dtype=np.int64).reshape(-1)
    if t.shape[0] != size**arity:
        raise AlgebraError(f"operation {name!r}: table length {t.shape[0]} != {size}**{arity}")
    if t.size and (t.min() < 0 or t.max() >= size):
        raise AlgebraError(f"operation {name!r}: entries must lie in 0..{size - 1}")
    t = t.copy()
    t.setflags(write=False)
    return t


class FiniteAlgebra:
    """A finite algebra: universe size, signature and one table per symbol.

    Instances are immutable.  Two algebras compare equal when size, signature
    and every table agree; the display name is ignored.
    """

    __slots__ = ("size", "signature", "tables", "name", "_shaped", "_hash")

    def __init__(self, size: int, signature, tables: Sequence, name: str = ""):
        if not isinstance(signature, Signature):
            signature = Signature(tuple(signature))
        size = int(size)
        if size < 1:
            raise AlgebraError("an algebra needs at least one element")
        if len(tables) != len(signature):
            raise AlgebraError(f"{len(tables)} tables for {len(signature)} symbols")
        self.size = size
        self.signature = signature
        self.tables = tuple(_as_table(t, size, r, n) for t, (n, r) in zip(tables, signature))
        self.name = name
        self._shaped = tuple(t.reshape((size,) * r) for t, (_, r) in zip(self.tables, signature))
        self._hash = None

    @classmethod
    def from_ops(cls, size: int, ops: dict, name: str = "") -> "FiniteAlgebra":
        """Build from ``{name: (arity, table)}`` in insertion order."""
        sig = Signature(tuple((n, r) for n, (r, _) in ops.items()))
        return cls(size, sig, [t for _, t in ops.values()], name)

    @classmethod
    def from_function(cls, size, signature, funcs, name=""):
        """Tabulate Python callables, one per symbol, over the universe."""
        if not isinstance(signature, Signature):
            signature = Signature(tuple(signature))
        tables = []
        for (n, r), f in zip(signature, funcs):
            tables.append([f(*args) for args in itertools.product(range(size), repeat=r)])
        return cls(size, signature, tables, name)

    def __repr__(self):
        ops = ", ".join(f"{n}/{r}" for n, r in self.signature)
        label = f"{self.name} " if self.name else ""
        return f"<FiniteAlgebra {label}size={self.size} [{ops}]>"

    def __eq__(self, other):
        if not isinstance(other, FiniteAlgebra):
            return NotImplemented
        return (
            self.size == other.size
            and self.signature == other.signature
            and all(np.array_equal(a, b) for a, b in zip(self.tables, other.tables))
        )

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.size, self.signature, tuple(t.tobytes() for t in self.tables)))
        return self._hash

    def __len__(self):
        return self.size

    def op(self, which) -> Operation:
        i = self.op_index(which)
        return Operation(self.signature.arity(i), self.tables[i])

    def op_index(self, which) -> int:
        if isinstance(which, str):
            return self.signature.index(which)
        i = int(which)
        if not 0 <= i < len(self.signature):
            raise AlgebraError(f"operation index {i} out of range")
        return i

    def shaped(self, i: int) -> np.ndarray:
        """Table of operation ``i`` as an ``arity``-dimensional array."""
        return self._shaped[i]

    def arity(self, i: int) -> int:
        return self.signature.arity(i)

    def constants(self) -> list[int]:
        """Values of the nullary symbols, in signature order."""
        return [int(self.tables[i][0]) for i in self.signature.nullary()]

    def is_idempotent(self) -> bool:
        """Every basic operation of positive arity satisfies f(x,...,x) = x."""
        diag = np.arange(self.size)
        for i, (_, r) in enumerate(self.signature):
            if r == 0:
                if self.size > 1:
                    return False
                continue
            if not np.array_equal(self._shaped[i][(diag,) * r], diag):
                return False
        return True

    def with_name(self, name: str) -> "FiniteAlgebra":
        return FiniteAlgebra(self.size, self.signature, self.tables, name)


def eval_op(A: FiniteAlgebra, op, args: Sequence[int]) -> int:
    i = A.op_index(op)
    r = A.arity(i)
    if len(args) != r:
        raise AlgebraError(f"operation {A.signature.symbols[i][0]!r} has arity {r}, got {len(args)} arguments")
    idx = 0
    for a in args:
        a = int(a)
        if not 0 <= a < A.size:
            raise AlgebraError(f"argument {a} outside universe of size {A.size}")
        idx = idx * A.size + a
    return int(A.tables[i][idx])


def same_signature(A: FiniteAlgebra, B: FiniteAlgebra):
    if A.signature != B.signature:
        raise SignatureMismatch(f"signatures differ: {A.signature.symbols} vs {B.signature.symbols}")


def gather(T: np.ndarray, arrays: Sequence[np.ndarray]) -> np.ndarray:
    """``T[a1, ..., ar]`` over the outer product of the index arrays."""
    if not arrays:
        return T.reshape(())
    return T[np.ix_(*arrays)]


def product(A: FiniteAlgebra, B: FiniteAlgebra, name: str = "") -> FiniteAlgebra:
    """Direct product; the pair (i, j) has index ``i * |B| + j``."""
    same_signature(A, B)
    n = A.size * B.size
    guards.check("MAX_PRODUCT_SIZE", n)
    first = np.arange(n) // B.size
    second = np.arange(n) % B.size
    tables = []
    for i, (_, r) in enumerate(A.signature):
        ta = gather(A.shaped(i), [first] * r)
        tb = gather(B.shaped(i), [second] * r)
        tables.append(ta * B.size + tb)
    return FiniteAlgebra(n, A.signature, tables, name or f"{A.name or 'A'}x{B.name or 'B'}")


def power(A: FiniteAlgebra, n: int) -> FiniteAlgebra:
    if n < 1:
        raise AlgebraError("power exponent must be >= 1")
    P = A
    for _ in range(n - 1):
        P = product(P, A)
    return P


def subalgebra(A: FiniteAlgebra, elements: Iterable[int], name: str = "") -> FiniteAlgebra:
    """Restrict A to a subuniverse, renumbering elements in the given order."""
    elements = np.asarray(list(elements), dtype=np.int64)
    pos = np.full(A.size, -1, dtype=np.int64)
    pos[elements] = np.arange(len(elements))
    tables = []
    for i, (n, r) in enumerate(A.signature):
        vals = gather(A.shaped(i), [elements] * r)
        img = pos[vals]
        if (img < 0).any():
            raise AlgebraError(f"not a subuniverse: not closed under {n!r}")
        tables.append(img)
    return FiniteAlgebra(len(elements), A.signature, tables, name)


def subuniverse_mask(A: FiniteAlgebra, gens: Iterable[int]) -> np.ndarray:
    """Boolean mask of Sg(gens); constants are included automatically."""
    mask = np.zeros(A.size, dtype=bool)
    for g in gens:
        mask[int(g)] = True
    for c in A.constants():
        mask[c] = True
    positive = [i for i, (_, r) in enumerate(A.signature) if r > 0]
    while True:
        S = np.flatnonzero(mask)
        grown = False
        for i in positive:
            vals = gather(A.shaped(i), [S] * A.arity(i)).ravel()
            fresh = vals[~mask[vals]]
            if fresh.size:
                mask[fresh] = True
                grown = True
        if not grown:
            return mask


def relabel(A: FiniteAlgebra, perm: Sequence[int], name: str = "") -> FiniteAlgebra:
    """Isomorphic copy in which element ``a`` is renamed ``perm[a]``."""
    perm = np.asarray(perm, dtype=np.int64)
    if sorted(perm.tolist()) != list(range(A.size)):
        raise AlgebraError("relabel needs a permutation of the universe")
    inv = np.empty_like(perm)
    inv[perm] = np.arange(A.size)
    tables = [perm[gather(A.shaped(i), [inv] * r)] for i, (_, r) in enumerate(A.signature)]
    return FiniteAlgebra(A.size, A.signature, tables, name or A.name)


class Homomorphism:
    """A map between algebras of one signature, verified exhaustively on construction."""

    __slots__ = ("source", "target", "map")

    def __init__(self, source: FiniteAlgebra, target: FiniteAlgebra, mapping, check: bool = True):
        same_signature(source, target)
        m = np.asarray(mapping, dtype=np.int64).reshape(-1)
        if m.shape[0] != source.size:
            raise AlgebraError("homomorphism map must have one entry per source element")
        if m.size and (m.min() < 0 or m.max() >= target.size):
            raise AlgebraError("homomorphism map leaves the target universe")
        m.setflags(write=False)
        self.source = source
        self.target = target
        self.map = m
        if check:
            bad = hom_violation(source, target, m)
            if bad is not None:
                raise AlgebraError(f"not a homomorphism: operation {bad[0]} at arguments {bad[1]}")

    def __repr__(self):
        return f"<Homomorphism {self.map.tolist()}>"

    def __call__(self, a: int) -> int:
        return int(self.map[a])

    def is_injective(self) -> bool:
        return len(set(self.map.tolist())) == self.source.size

    def is_surjective(self) -> bool:
        return len(set(self.map.tolist())) == self.target.size

    def kernel_labels(self) -> np.ndarray:
        return self.map.copy()


def hom_violation(A: FiniteAlgebra, B: FiniteAlgebra, m: np.ndarray):
    """First ``(op_index, args)`` where ``m`` fails to commute with an operation, else None."""
    for i, (_, r) in enumerate(A.signature):
        if r == 0:
            if m[A.tables[i][0]] != B.tables[i][0]:
                return i, ()
            continue
        bad = np.argwhere(m[A.shaped(i)] != gather(B.shaped(i), [m] * r))
        if bad.size:
            return i, tuple(int(x) for x in bad[0])
    return None


def quotient_by(A: FiniteAlgebra, theta) -> tuple[FiniteAlgebra, Homomorphism]:
    """Quotient by a congruence, blocks numbered by their canonical label.

    ``theta`` is a :class:`~univfree.congruence.Partition` or a label sequence.
    Raises :class:`NotACongruence` naming a violating (op, tuple, pair).
    """
    from .congruence import Partition, congruence_violation

    if not isinstance(theta, Partition):
        theta = Partition(theta)
    if theta.size != A.size:
        raise AlgebraError("partition and algebra have different universes")
    bad = congruence_violation(A, theta)
    if bad is not None:
        raise NotACongruence(f"partition not compatible with operation {bad[0]}", bad)
    labels = theta.labels
    reps = theta.representatives()
    tables = [labels[gather(A.shaped(i), [reps] * r)] for i, (_, r) in enumerate(A.signature)]
    Q = FiniteAlgebra(theta.nblocks, A.signature, tables, f"{A.name or 'A'}/theta")
    return Q, Homomorphism(A, Q, labels)


def matrix_power(A: FiniteAlgebra, d: int) -> FiniteAlgebra:
    """The d-th matrix power A^[d].

    Universe A^d in lexicographic order.  Operations: each basic operation of
    A acting coordinatewise, the cyclic shift (x0..x_{d-1}) -> (x1..x_{d-1},x0)
    and the d-ary diagonal taking coordinate l of its l-th argument.
    """
    if d < 1:
        raise AlgebraError("matrix power exponent must be >= 1")
    k = A.size
    n = k**d
    guards.check("MAX_PRODUCT_SIZE", n)
    coords = np.array(list(itertools.product(range(k), repeat=d)), dtype=np.int64).reshape(n, d)
    weights = k ** np.arange(d - 1, -1, -1)

    def encode(c):
        return c @ weights

    tables = []
    for i, (_, r) in enumerate(A.signature):
        idx = np.indices((n,) * r).reshape(r, -1) if r else np.zeros((0, 1), dtype=np.int64)
        out = np.empty((idx.shape[1], d), dtype=np.int64)
        for j in range(d):
            args = [coords[idx[p], j] for p in range(r)]
            out[:, j] = A.shaped(i)[tuple(args)] if r else A.tables[i][0]
        tables.append(encode(out))
    shift = encode(np.roll(coords, -1, axis=1))
    idx = np.indices((n,) * d).reshape(d, -1)
    diag = encode(np.stack([coords[idx[j], j] for j in range(d)], axis=1))
    names = set(A.signature.names)
    shift_name, diag_name = "shift", "diag"
    while shift_name in names:
        shift_name += "_"
    while diag_name in names:
        diag_name += "_"
    sig = A.signature.extend((shift_name, 1), (diag_name, d))
    return FiniteAlgebra(n, sig, tables + [shift, diag], f"{A.name or 'A'}^[{d}]")


# --- generating sets -------------------------------------------------------

def greedy_generating_set(A: FiniteAlgebra) -> list[int]:
    """A generating set built by adding the least element not yet generated."""
    gens: list[int] = []
    mask = subuniverse_mask(A, gens)
    while not mask.all():
        g = int(np.flatnonzero(~mask)[0])
        gens.append(g)
        mask = subuniverse_mask(A, gens)
    return gens


def generates(A: FiniteAlgebra, gens: Iterable[int]) -> bool:
    return bool(subuniverse_mask(A, gens).all())


def min_generating_size(A: FiniteAlgebra) -> int:
    """Least k such that some k-element subset generates A."""
    # an element outside Sg(A minus itself) lies in every generating set
    forced = []
    for a in range(A.size):
        others = [b for b in range(A.size) if b != a]
        if not subuniverse_mask(A, others)[a]:
            forced.append(a)
    rest = [a for a in range(A.size) if a not in forced]
    for extra in range(len(rest) + 1):
        for combo in itertools.combinations(rest, extra):
            if generates(A, forced + list(combo)):
                return len(forced) + extra
    raise AssertionError("the whole universe always generates")


# --- isomorphism and homomorphism search -----------------------------------

def _colors(A: FiniteAlgebra, B: FiniteAlgebra, rounds: int = 3):
    """Joint invariant colouring of the elements of A and B."""

    def base(X):
        feats = []
        for i, (_, r) in enumerate(X.signature):
            counts = np.bincount(X.tables[i], minlength=X.size)
            if r:
                diag = X.shaped(i)[(np.arange(X.size),) * r]
                feats.append(counts)
                feats.append((diag == np.arange(X.size)).astype(np.int64))
            else:
                feats.append((np.arange(X.size) == X.tables[i][0]).astype(np.int64))
        if not feats:
            return [()] * X.size
        return [tuple(int(f[a]) for f in feats) for a in range(X.size)]

    ca, cb = base(A), base(B)
    for _ in range(rounds):
        keys = sorted(set(ca) | set(cb))
        code = {c: j for j, c in enumerate(keys)}
        ia = np.array([code[c] for c in ca], dtype=np.int64)
        ib = np.array([code[c] for c in cb], dtype=np.int64)

        def refine(X, col):
            out = []
            for a in range(X.size):
                f = [int(col[a])]
                for i, (_, r) in enumerate(X.signature):
                    if r == 0:
                        continue
                    diag_val = X.shaped(i)[(a,) * r]
                    f.append(int(col[diag_val]))
                    if r == 1:
                        pre = np.flatnonzero(X.tables[i] == a)
                        f.append(tuple(sorted(col[pre].tolist())))
                out.append(tuple(f))
            return out

        ca, cb = refine(A, ia), refine(B, ib)
    keys = sorted(set(ca) | set(cb))
    code = {c: j for j, c in enumerate(keys)}
    return [code[c] for c in ca], [code[c] for c in cb]


def _propagate(A, B, phi, inv, injective, colors=None) -> bool:
    """Close a partial map under the operations; False on contradiction."""
    for i, (_, r) in enumerate(A.signature):
        if r == 0:
            v, w = int(A.tables[i][0]), int(B.tables[i][0])
            if not _assign(phi, inv, v, w, injective, colors):
                return False
    while True:
        S = np.flatnonzero(phi >= 0)
        new = False
        for i, (_, r) in enumerate(A.signature):
            if r == 0:
                continue
            src = gather(A.shaped(i), [S] * r).ravel()
            tgt = gather(B.shaped(i), [phi[S]] * r).ravel()
            pairs = np.unique(np.stack([src, tgt], axis=1), axis=0)
            known = phi[pairs[:, 0]]
            if np.any((known >= 0) & (known != pairs[:, 1])):
                return False
            for v, w in pairs[known < 0]:
                if not _assign(phi, inv, int(v), int(w), injective, colors):
                    return False
                new = True
        if not new:
            return True


def _assign(phi, inv, v, w, injective, colors) -> bool:
    if phi[v] >= 0:
        return phi[v] == w
    if injective:
        if inv[w] >= 0:
            return False
        if colors is not None and colors[0][v] != colors[1][w]:
            return False
        inv[w] = v
    phi[v] = w
    return True


def _map_search(A, B, injective, colors=None):
    """Yield every homomorphism A -> B (injective ones only, if asked)."""
    gens = greedy_generating_set(A)
    phi = np.full(A.size, -1, dtype=np.int64)
    inv = np.full(B.size, -1, dtype=np.int64)
    if not _propagate(A, B, phi, inv, injective, colors):
        return

    def rec(phi, inv):
        todo = [g for g in gens if phi[g] < 0]
        if not todo:
            yield phi.copy()
            return
        g = todo[0]
        for w in range(B.size):
            if injective and inv[w] >= 0:
                continue
            if colors is not None and colors[0][g] != colors[1][w]:
                continue
            p2, i2 = phi.copy(), inv.copy()
            if _assign(p2, i2, g, w, injective, colors) and _propagate(A, B, p2, i2, injective, colors):
                yield from rec(p2, i2)

    yield from rec(phi, inv)


def is_isomorphic(A: FiniteAlgebra, B: FiniteAlgebra):
    """A bijective :class:`Homomorphism` A -> B, or None."""
    same_signature(A, B)
    if A.size != B.size:
        return None
    for sig_i, (_, r) in enumerate(A.signature):
        if r and sorted(np.bincount(A.tables[sig_i], minlength=A.size)) != sorted(
            np.bincount(B.tables[sig_i], minlength=B.size)
        ):
            return None
    colors = _colors(A, B)
    if sorted(colors[0]) != sorted(colors[1]):
        return None
    for phi in _map_search(A, B, injective=True, colors=colors):
        if (phi >= 0).all():
            return Homomorphism(A, B, phi)
    return None


def find_surjective_hom(B: FiniteAlgebra, A: FiniteAlgebra):
    """A surjective homomorphism B -> A, or None (exhaustive over generator images)."""
    same_signature(B, A)
    if A.size > B.size:
        return None
    for phi in _map_search(B, A, injective=False):
        if (phi >= 0).all() and len(set(phi.tolist())) == A.size:
            return Homomorphism(B, A, phi)
    return None


def count_homomorphisms(B: FiniteAlgebra, A: FiniteAlgebra) -> int:
    same_signature(B, A)
    return sum(1 for phi in _map_search(B, A, injective=False) if (phi >= 0).all())
