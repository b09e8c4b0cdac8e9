"""Free algebras of V(A) for a finite algebra A, membership, freeness and spectra."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .algebra import (
    FiniteAlgebra,
    Homomorphism,
    greedy_generating_set,
    is_isomorphic,
    min_generating_size,
    quotient_by,
    same_signature,
    subalgebra,
    subuniverse_mask,
)
from .closure import GeneratedSet, Term, clone_table, evaluate, joint_generation, projection_rows, term_table
from .congruence import Partition, all_congruences, is_simple
from .errors import AlgebraError, PreconditionError


@dataclass
class FreeAlgebra:
    """F_V(n) for V = V(generator), realized on n-ary term tables of the generator.

    ``algebra`` is None exactly when n = 0 and the signature has no constant
    (the free algebra on no generators is then empty).
    """

    generator: FiniteAlgebra
    rank: int
    algebra: FiniteAlgebra | None
    generators: list[int]
    clone: GeneratedSet | None

    @property
    def empty(self) -> bool:
        return self.algebra is None

    @property
    def size(self) -> int:
        return 0 if self.algebra is None else self.algebra.size

    def __len__(self):
        return self.size

    def term(self, i: int) -> Term:
        return self.clone.term(i)

    def element_of_table(self, table) -> int:
        i = self.clone.index_of(table)
        if i is None:
            raise AlgebraError("table is not a term operation of the generator")
        return i

    def zero(self) -> int | None:
        c = self.algebra.constants() if self.algebra is not None else []
        return c[0] if c else None


def free_algebra(A: FiniteAlgebra, n: int) -> FreeAlgebra:
    if n < 0:
        raise AlgebraError("rank must be >= 0")
    if n == 0 and not A.signature.nullary():
        return FreeAlgebra(A, 0, None, [], None)
    cl = clone_table(A, n)
    F = cl.as_algebra(f"F_{A.name or 'A'}({n})")
    gens = [cl.index_of(row) for row in projection_rows(A.size, n)] if n else []
    return FreeAlgebra(A, n, F, gens, cl)


def free_hom(src: FreeAlgebra, dst: FreeAlgebra, images) -> Homomorphism:
    """The homomorphism F(m) -> F(r) sending generator x_j to ``images[j]``.

    An element of F(m) is a term table t over A^m; its image is the table
    a -> t(s_1(a), ..., s_m(a)) over A^r where s_j is the table of images[j].
    """
    A = src.generator
    k = A.size
    s = [dst.clone.rows[j].astype(np.int64) for j in images]
    flat = np.zeros(k**dst.rank, dtype=np.int64)
    for col in s:
        flat = flat * k + col
    out = []
    for row in src.clone.rows.astype(np.int64):
        out.append(dst.element_of_table(row[flat]))
    return Homomorphism(src.algebra, dst.algebra, out)


def extend_to_hom(source: FiniteAlgebra, gens, target: FiniteAlgebra, images):
    """The homomorphism source -> target with gens[i] -> images[i], or None.

    Joint generation in source x target from the pairs; the map exists iff the
    generated relation is a function defined on all of source.
    """
    same_signature(source, target)
    gs = joint_generation(source, target, list(zip(gens, images)))
    left = gs.segment(0)[:, 0].astype(np.int64)
    right = gs.segment(1)[:, 0].astype(np.int64)
    m = np.full(source.size, -1, dtype=np.int64)
    for a, b in zip(left, right):
        if m[a] >= 0 and m[a] != b:
            return None
        m[a] = b
    if (m < 0).any():
        return None
    return Homomorphism(source, target, m)


# --- membership -------------------------------------------------------------

@dataclass
class IdentityWitness:
    """Terms s, t over x0..x(n-1) equal in the generator but not in B at ``assignment``."""

    left: Term
    right: Term
    n: int
    assignment: tuple[int, ...]

    def replay(self, A: FiniteAlgebra, B: FiniteAlgebra) -> bool:
        holds_in_a = np.array_equal(term_table(self.left, A, self.n), term_table(self.right, A, self.n))
        fails_in_b = evaluate(self.left, B, self.assignment) != evaluate(self.right, B, self.assignment)
        return bool(holds_in_a and fails_in_b)


@dataclass
class Membership:
    holds: bool
    witness: IdentityWitness | None = None
    generators: list[int] = field(default_factory=list)

    def __bool__(self):
        return self.holds


def variety_membership(B: FiniteAlgebra, A: FiniteAlgebra, generators=None) -> Membership:
    """Is B in the variety generated by A?

    With b = ``generators`` (all of B by default) and n = len(b), generate in
    A^(A^n) x B from (projection_i, b_i).  B is in V(A) iff the result is the
    graph of a function: every identity of A in n variables then holds at b,
    and b generates B.  Any generating set of B gives the same answer.
    """
    same_signature(A, B)
    gens = list(range(B.size)) if generators is None else [int(g) for g in generators]
    if not subuniverse_mask(B, gens).all():
        raise AlgebraError("membership generators must generate B")
    n = len(gens)
    proj = projection_rows(A.size, n)
    seen: dict[bytes, tuple[int, int]] = {}
    L = A.size**n
    clash: list = []

    def stop(rows):
        flags = np.zeros(len(rows), dtype=bool)
        for j, row in enumerate(rows):
            key = row[:L].tobytes()
            b = int(row[L])
            if key in seen and seen[key][1] != b:
                clash.append(seen[key][0])
                flags[j] = True
                break
            seen.setdefault(key, (-1, b))
        return flags

    gs = joint_generation((A, L), (B, 1), [(proj[i], [g]) for i, g in enumerate(gens)], stop=stop)
    if gs.complete:
        return Membership(True, None, gens)
    bad = gs.stopped
    left_key = gs.rows[bad][:L].tobytes()
    other = next(i for i in range(bad) if gs.rows[i][:L].tobytes() == left_key)
    w = IdentityWitness(gs.term(other), gs.term(bad), n, tuple(gens))
    return Membership(False, w, gens)


def in_variety(B: FiniteAlgebra, A: FiniteAlgebra) -> Membership:
    """Membership using a greedy generating set of B (equivalent, and cheaper)."""
    return variety_membership(B, A, greedy_generating_set(B))


# --- freeness -------------------------------------------------------------------

@dataclass
class FreeRank:
    rank: int
    isomorphism: Homomorphism  # B -> F(rank)
    size_matches: list[int]  # every k with |F(k)| = |B| that was examined


def is_free_in(B: FiniteAlgebra, A: FiniteAlgebra, _free_cache: dict | None = None) -> FreeRank | None:
    """Least k with B isomorphic to F_V(A)(k), or None if B is not free.

    Raises :class:`PreconditionError` (witness: a violated identity) when B is
    not in V(A).
    """
    mem = in_variety(B, A)
    if not mem:
        raise PreconditionError("B is not in the variety generated by A", mem.witness)
    cache = {} if _free_cache is None else _free_cache
    found = None
    matches = []
    for k in range(0, B.size + 1):
        if k not in cache:
            cache[k] = free_algebra(A, k)
        F = cache[k]
        if F.empty:
            continue
        if F.size > B.size:
            break
        if F.size == B.size:
            matches.append(k)
            if found is None:
                iso = is_isomorphic(B, F.algebra)
                if iso is not None:
                    found = (k, iso)
    if found is None:
        return None
    return FreeRank(found[0], found[1], matches)


def is_free_over(B: FiniteAlgebra, A: FiniteAlgebra, gens) -> bool:
    """Does ``gens`` freely generate B in V(A) (universal mapping property)?"""
    F = free_algebra(A, len(gens))
    hom = free_hom_to(F, B, gens)
    return hom is not None and hom.is_injective() and hom.is_surjective()


def free_hom_to(F: FreeAlgebra, B: FiniteAlgebra, images) -> Homomorphism | None:
    """Extend x_j -> images[j] from F(n) to B (None if B is outside V)."""
    return extend_to_hom(F.algebra, F.generators, B, images)


# --- spectra ----------------------------------------------------------------------

@dataclass
class SpectrumType:
    size: int
    algebra: FiniteAlgebra
    congruence: Partition
    free_rank: int | None
    min_generators: int


@dataclass
class SpectrumReport:
    n: int
    types: list[SpectrumType]

    @property
    def count(self) -> int:
        return len(self.types)

    @property
    def all_free(self) -> bool:
        return all(t.free_rank is not None for t in self.types)


def quotient_types(F: FiniteAlgebra):
    """Quotients of F by every congruence, one per isomorphism type (sorted)."""
    reps: list[tuple[FiniteAlgebra, Partition]] = []
    for theta in all_congruences(F):
        Q, _ = quotient_by(F, theta)
        if any(R.size == Q.size and is_isomorphic(Q, R) is not None for R, _ in reps):
            continue
        reps.append((Q, theta))
    reps.sort(key=lambda qt: (qt[0].size, qt[1].sort_key()))
    return reps


def g_spectrum(A: FiniteAlgebra, n: int) -> SpectrumReport:
    """Isomorphism types of the <= n-generated members of V(A).

    These are exactly the quotients of F_V(n) (for n = 0 without constants
    there are none).
    """
    F = free_algebra(A, n)
    if F.empty:
        return SpectrumReport(n, [])
    cache: dict = {}
    types = []
    for Q, theta in quotient_types(F.algebra):
        fr = is_free_in(Q, A, cache)
        types.append(SpectrumType(Q.size, Q, theta, None if fr is None else fr.rank, min_generating_size(Q)))
    return SpectrumReport(n, types)


# --- kernels of collapse maps -----------------------------------------------------

@dataclass
class CollapseReport:
    case: str  # "pointed" | "idempotent"
    m: int
    maps: list[Homomorphism]
    kernels: list[Partition]
    applicable: bool
    distinct: bool | None
    restrictions: list[tuple[int, ...]] = field(default_factory=list)

    @property
    def distinct_count(self) -> int:
        return len(set(self.kernels))


def kernels_of_variable_collapse(A: FiniteAlgebra, m: int) -> CollapseReport:
    """Kernels of the generator-collapsing homomorphisms out of F_V(m).

    With a constant 0: three maps onto F(1) = F(x): x1 -> 0, rest -> x;
    x1 -> x, rest -> 0; all -> x.  Without constants: the maps e_i onto F(y, z)
    with x_i -> y and the other generators -> z.
    """
    if m < 1:
        raise AlgebraError("m must be >= 1")
    Fm = free_algebra(A, m)
    if A.signature.nullary():
        F1 = free_algebra(A, 1)
        zero, x = F1.zero(), F1.generators[0]
        images = [[zero] + [x] * (m - 1), [x] + [zero] * (m - 1), [x] * m]
        maps = [free_hom(Fm, F1, im) for im in images]
        probe = [Fm.zero()] + Fm.generators
        case, applicable = "pointed", m > 1
    else:
        F2 = free_algebra(A, 2)
        y, z = F2.generators
        maps = [free_hom(Fm, F2, [y if j == i else z for j in range(m)]) for i in range(m)]
        probe = Fm.generators
        case, applicable = "idempotent", m >= 2
    kernels = [Partition(h.map) for h in maps]
    restrictions = [tuple(Partition([h.map[p] for p in probe])._labels) for h in maps]
    distinct = len(set(kernels)) == len(kernels) if applicable else None
    return CollapseReport(case, m, maps, kernels, applicable, distinct, restrictions)


# --- lemma replays ----------------------------------------------------------------

@dataclass
class FreelyReport:
    simple_f1: bool
    checked: list[tuple[int, bool]]  # (element b, Sg{b} freely generated by b and iso to F(1))

    @property
    def passed(self) -> bool:
        return self.simple_f1 and all(ok for _, ok in self.checked)


def verify_lemma_freely(A: FiniteAlgebra, B: FiniteAlgebra) -> FreelyReport:
    """Each nonzero b in B freely generates a copy of F_V(1)."""
    if not A.signature.nullary():
        raise PreconditionError("the lemma needs a constant symbol")
    F1 = free_algebra(A, 1)
    simple = is_simple(F1.algebra)
    if not simple:
        raise PreconditionError("F_V(1) is not simple")
    zero = B.constants()[0]
    checked = []
    for b in range(B.size):
        if b == zero:
            continue
        hom = free_hom_to(F1, B, [b])
        sub = np.flatnonzero(subuniverse_mask(B, [b]))
        ok = (
            hom is not None
            and hom.is_injective()
            and is_isomorphic(subalgebra(B, sub), F1.algebra) is not None
        )
        checked.append((b, ok))
    return FreelyReport(simple, checked)


@dataclass
class CoatomReport:
    empty_free_size: int  # |F(0)|
    f1_simple: bool
    coatoms: dict  # m -> number of coatoms of Con F(m)

    @property
    def passed(self) -> bool:
        return self.empty_free_size == 1 and self.f1_simple and all(c >= 3 for c in self.coatoms.values())


def verify_lemma_3coatoms(A: FiniteAlgebra, max_rank: int = 3) -> CoatomReport:
    """|F(0)| = 1, F(1) simple, and Con F(m) has at least 3 coatoms for 1 < m <= max_rank."""
    from .congruence import coatoms

    if not A.signature.nullary():
        raise PreconditionError("the lemma needs a constant symbol")
    counts = {m: len(coatoms(all_congruences(free_algebra(A, m).algebra))) for m in range(2, max_rank + 1)}
    return CoatomReport(free_algebra(A, 0).size, is_simple(free_algebra(A, 1).algebra), counts)


def verify_lemma_injective(A: FiniteAlgebra):
    """Nonconstant unary polynomials of F(x) = F_V(1) are injective."""
    from .termcond import nonconstant_unaries_injective

    if not A.signature.nullary():
        raise PreconditionError("the lemma needs a constant symbol")
    return nonconstant_unaries_injective(free_algebra(A, 1).algebra)
