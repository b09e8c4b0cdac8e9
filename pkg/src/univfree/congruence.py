"""Partitions, congruence generation and congruence lattices."""
from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from . import guards
from .algebra import FiniteAlgebra, gather
from .errors import AlgebraError


def _canonical(labels) -> tuple[int, ...]:
    seen: dict[int, int] = {}
    out = []
    for x in labels:
        x = int(x)
        if x not in seen:
            seen[x] = len(seen)
        out.append(seen[x])
    return tuple(out)


class Partition:
    """An equivalence relation on ``{0..n-1}`` in canonical block-label form.

    Labels appear in first-occurrence order, so equal relations have equal
    label vectors.  Ordering (``<``, ``<=``) is refinement, not sort order;
    use :meth:`sort_key` for the lattice tie-break order.
    """

    __slots__ = ("_labels", "nblocks", "_array")

    def __init__(self, labels: Iterable[int]):
        self._labels = _canonical(labels)
        self.nblocks = (max(self._labels) + 1) if self._labels else 0
        arr = np.array(self._labels, dtype=np.int64)
        arr.setflags(write=False)
        self._array = arr

    @classmethod
    def identity(cls, n: int) -> "Partition":
        return cls(range(n))

    @classmethod
    def full(cls, n: int) -> "Partition":
        return cls([0] * n)

    @classmethod
    def from_blocks(cls, blocks: Sequence[Sequence[int]], n: int | None = None) -> "Partition":
        if n is None:
            n = sum(len(b) for b in blocks)
        labels = [-1] * n
        for j, block in enumerate(blocks):
            for a in block:
                if labels[a] != -1:
                    raise AlgebraError(f"element {a} listed in two blocks")
                labels[a] = j
        if -1 in labels:
            raise AlgebraError(f"element {labels.index(-1)} not covered by the blocks")
        return cls(labels)

    @classmethod
    def from_pairs(cls, n: int, pairs: Iterable[tuple[int, int]]) -> "Partition":
        """Least equivalence relation containing the pairs."""
        pairs = list(pairs)
        src = [a for a, _ in pairs]
        dst = [b for _, b in pairs]
        return cls(_components(n, np.array(src, dtype=np.int64), np.array(dst, dtype=np.int64)))

    @property
    def labels(self) -> np.ndarray:
        return self._array

    @property
    def size(self) -> int:
        return len(self._labels)

    def __len__(self):
        return len(self._labels)

    def __repr__(self):
        return "Partition(" + "|".join(",".join(map(str, b)) for b in self.blocks()) + ")"

    def __eq__(self, other):
        return isinstance(other, Partition) and self._labels == other._labels

    def __hash__(self):
        return hash(self._labels)

    def __le__(self, other: "Partition") -> bool:
        if self.size != other.size:
            raise AlgebraError("partitions of different universes")
        pairs = set(zip(self._labels, other._labels))
        return len(pairs) == self.nblocks

    def __lt__(self, other: "Partition") -> bool:
        return self != other and self <= other

    def __ge__(self, other):
        return other <= self

    def __gt__(self, other):
        return other < self

    def related(self, a: int, b: int) -> bool:
        return self._labels[a] == self._labels[b]

    def blocks(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(self.nblocks)]
        for a, lab in enumerate(self._labels):
            out[lab].append(a)
        return out

    def representatives(self) -> np.ndarray:
        """Least element of each block, indexed by block label."""
        _, first = np.unique(self._array, return_index=True)
        return first.astype(np.int64)

    def root(self) -> np.ndarray:
        """For every element, the least element of its block."""
        return self.representatives()[self._array]

    def is_identity(self) -> bool:
        return self.nblocks == self.size

    def is_full(self) -> bool:
        return self.nblocks <= 1

    def pairs(self) -> list[tuple[int, int]]:
        return [(a, b) for blk in self.blocks() for a in blk for b in blk]

    def sort_key(self):
        return (self.nblocks, self._labels)

    def to_text(self) -> str:
        return "|".join(",".join(map(str, b)) for b in self.blocks())

    @classmethod
    def parse(cls, text: str, n: int) -> "Partition":
        """Parse ``"0,1|2"`` block syntax; unlisted elements become singletons."""
        blocks = []
        listed = set()
        for chunk in text.split("|"):
            chunk = chunk.strip()
            if not chunk:
                continue
            block = [int(x) for x in chunk.split(",") if x.strip()]
            for a in block:
                if not 0 <= a < n or a in listed:
                    raise AlgebraError(f"bad element {a} in partition {text!r}")
                listed.add(a)
            blocks.append(block)
        blocks += [[a] for a in range(n) if a not in listed]
        return cls.from_blocks(blocks, n)


def _components(n, src, dst) -> np.ndarray:
    if n == 0:
        return np.zeros(0, dtype=np.int64)
    g = coo_matrix((np.ones(len(src), dtype=np.int8), (src, dst)), shape=(n, n))
    _, labels = connected_components(g, directed=False)
    return labels


def join(theta: Partition, psi: Partition) -> Partition:
    """Least equivalence relation containing both (a congruence if both are)."""
    n = theta.size
    idx = np.arange(n)
    src = np.concatenate([idx, idx])
    dst = np.concatenate([theta.root(), psi.root()])
    return Partition(_components(n, src, dst))


def meet(theta: Partition, psi: Partition) -> Partition:
    return Partition(theta.labels * max(psi.nblocks, 1) + psi.labels)


def restrict_to(theta: Partition, subuniverse: Sequence[int]) -> Partition:
    """The partition induced on ``subuniverse`` (elements renumbered by position)."""
    return Partition([theta.labels[a] for a in subuniverse])


def kernel(mapping) -> Partition:
    return Partition(mapping)


# --- congruences ------------------------------------------------------------

def congruence_violation(A: FiniteAlgebra, theta: Partition):
    """First ``(op, args, other_args)`` with related arguments but unrelated images."""
    labels = theta.labels
    root = theta.root()
    for i, (_, r) in enumerate(A.signature):
        T = A.shaped(i)
        for pos in range(r):
            moved = np.take(T, root, axis=pos)
            bad = np.argwhere(labels[T] != labels[moved])
            if bad.size:
                args = tuple(int(x) for x in bad[0])
                other = list(args)
                other[pos] = int(root[args[pos]])
                return i, args, tuple(other)
    return None


def is_congruence(A: FiniteAlgebra, theta: Partition) -> bool:
    if theta.size != A.size:
        return False
    return congruence_violation(A, theta) is None


def _close(A: FiniteAlgebra, labels: np.ndarray) -> Partition:
    # Merge f(..a..) with f(..root(a)..) in every coordinate and every
    # filling of the other coordinates, until nothing merges.  The fixpoint is
    # compatible coordinate by coordinate, hence a congruence; every merge is
    # forced, hence it is the least one.
    part = Partition(labels)
    n = A.size
    idx = np.arange(n)
    positive = [i for i, (_, r) in enumerate(A.signature) if r > 0]
    while True:
        root = part.root()
        if (root == idx).all():
            return part
        src, dst = [idx], [root]
        for i in positive:
            T = A.shaped(i)
            for pos in range(A.arity(i)):
                moved = np.take(T, root, axis=pos)
                diff = T != moved
                src.append(T[diff])
                dst.append(moved[diff])
        new = Partition(_components(n, np.concatenate(src), np.concatenate(dst)))
        if new.nblocks == part.nblocks:
            return part
        part = new


def cg_pairs(A: FiniteAlgebra, pairs: Iterable[tuple[int, int]]) -> Partition:
    """Least congruence of A containing the given pairs."""
    pairs = list(pairs)
    for a, b in pairs:
        if not (0 <= a < A.size and 0 <= b < A.size):
            raise AlgebraError(f"pair {(a, b)} outside the universe")
    theta = _close(A, Partition.from_pairs(A.size, pairs).labels)
    assert is_congruence(A, theta)
    return theta


def cg_partition(A: FiniteAlgebra, theta: Partition) -> Partition:
    """Least congruence containing an equivalence relation."""
    return _close(A, theta.labels)


def all_congruences(A: FiniteAlgebra) -> list[Partition]:
    """Every congruence of A, sorted by (block count, label vector)."""
    guards.check("MAX_CON_SIZE", A.size)
    found = {Partition.identity(A.size)}
    principal = set()
    for a in range(A.size):
        for b in range(a + 1, A.size):
            principal.add(cg_pairs(A, [(a, b)]))
    found |= principal
    frontier = list(principal)
    while frontier:
        nxt = []
        for x in frontier:
            for y in principal:
                z = join(x, y)
                if z not in found:
                    found.add(z)
                    nxt.append(z)
        frontier = nxt
    return sorted(found, key=Partition.sort_key)


def _top(lattice):
    return min(lattice, key=lambda p: p.nblocks)


def _bottom(lattice):
    return max(lattice, key=lambda p: p.nblocks)


def covers(lattice: Sequence[Partition], lower: Partition, upper: Partition) -> bool:
    if not lower < upper:
        return False
    return not any(lower < x < upper for x in lattice)


def coatoms(lattice: Sequence[Partition]) -> list[Partition]:
    top = _top(lattice)
    return [x for x in lattice if covers(lattice, x, top)]


def atoms(lattice: Sequence[Partition]) -> list[Partition]:
    bottom = _bottom(lattice)
    return [x for x in lattice if covers(lattice, bottom, x)]


def is_simple(A: FiniteAlgebra) -> bool:
    """|A| >= 2 and every nontrivial principal congruence is the full relation."""
    if A.size < 2:
        return False
    for a in range(A.size):
        for b in range(a + 1, A.size):
            if not cg_pairs(A, [(a, b)]).is_full():
                return False
    return True


def sd_meet_failure(lattice: Sequence[Partition], gamma: Partition | None = None):
    """A triple (alpha, beta, gamma) with alpha^gamma = beta^gamma = 0 and
    (alpha v beta) ^ gamma = gamma > 0, or None.

    With ``gamma`` given, only that third component is tried.
    """
    bottom = _bottom(lattice)
    gammas = [gamma] if gamma is not None else [g for g in lattice if g != bottom]
    for g in gammas:
        if g == bottom:
            continue
        disjoint = [x for x in lattice if meet(x, g) == bottom]
        for i, a in enumerate(disjoint):
            for b in disjoint[i + 1:]:
                if g <= join(a, b):
                    return a, b, g
    return None


def maximal_below(lattice: Sequence[Partition], theta: Partition) -> Partition:
    """The sort-least congruence covered by ``theta``."""
    if theta.is_identity():
        raise AlgebraError("the identity relation has nothing strictly below it")
    below = [x for x in lattice if x < theta]
    for x in sorted(below, key=Partition.sort_key):
        if not any(x < y for y in below):
            return x
    raise AlgebraError("theta is not in the lattice")
