"""Builders for the generator algebras, clone-count formulas, the classifier
and the semiprojection counterexamples."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import guards
from .algebra import FiniteAlgebra, find_surjective_hom, matrix_power
from .closure import clone_table
from .errors import AlgebraError
from .termcond import is_abelian

KINDS = ("set", "pointed_set", "vector_space", "affine_space", "semilattice",
         "matrix_power", "semiprojection_expansion")


def is_prime(p: int) -> bool:
    return p >= 2 and all(p % q for q in range(2, int(p**0.5) + 1))


@dataclass(frozen=True)
class CatalogSpec:
    """``kind`` plus its parameters.

    set(k), pointed_set(k), semilattice(k): ``k``; vector_space(p),
    affine_space(p): ``p``; matrix_power: ``inner`` and ``d``;
    semiprojection_expansion: ``inner``, ``m`` and ``variant``.
    """

    kind: str
    k: int = 2
    p: int = 2
    d: int = 1
    m: int = 1
    variant: str = "projection"
    inner: "CatalogSpec | None" = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise AlgebraError(f"unknown catalog kind {self.kind!r}")
        if self.kind in ("vector_space", "affine_space") and not is_prime(self.p):
            raise AlgebraError(f"{self.p} is not prime")
        if self.k < 1 or self.d < 1 or self.m < 1:
            raise AlgebraError("k, d and m must be positive")
        if self.kind in ("matrix_power", "semiprojection_expansion") and self.inner is None:
            raise AlgebraError(f"{self.kind} needs an inner spec")
        if self.variant not in ("projection", "shifted"):
            raise AlgebraError(f"unknown semiprojection variant {self.variant!r}")

    def __str__(self):
        if self.kind in ("set", "pointed_set", "semilattice"):
            return f"{self.kind}({self.k})"
        if self.kind in ("vector_space", "affine_space"):
            return f"{self.kind}({self.p})"
        if self.kind == "matrix_power":
            return f"matrix_power({self.inner}, {self.d})"
        return f"semiprojection_expansion({self.inner}, {self.m}, {self.variant})"


def set_algebra(k: int) -> FiniteAlgebra:
    return FiniteAlgebra(k, [], [], f"set{k}")


def pointed_set(k: int) -> FiniteAlgebra:
    return FiniteAlgebra(k, [("0", 0)], [[0]], f"pointed{k}")


def vector_space(p: int) -> FiniteAlgebra:
    """GF(p) as a 1-dimensional vector space: +, 0 and x -> a*x for a = 2..p-1."""
    if not is_prime(p):
        raise AlgebraError(f"{p} is not prime")
    ops = {"+": (2, [(a + b) % p for a in range(p) for b in range(p)]), "0": (0, [0])}
    for a in range(2, p):
        ops[f"*{a}"] = (1, [(a * x) % p for x in range(p)])
    return FiniteAlgebra.from_ops(p, ops, f"GF{p}")


def affine_space(p: int) -> FiniteAlgebra:
    """GF(p) with the single ternary operation x - y + z."""
    if not is_prime(p):
        raise AlgebraError(f"{p} is not prime")
    table = [(x - y + z) % p for x in range(p) for y in range(p) for z in range(p)]
    return FiniteAlgebra.from_ops(p, {"m": (3, table)}, f"AGF{p}")


def semilattice(k: int) -> FiniteAlgebra:
    """The k-element chain with meet."""
    return FiniteAlgebra.from_ops(k, {"^": (2, [min(a, b) for a in range(k) for b in range(k)])}, f"chain{k}")


def build_semiprojection_expansion(base: FiniteAlgebra, m: int, variant: str = "projection") -> FiniteAlgebra:
    """Add an (m+1)-ary first-variable semiprojection ``s`` to ``base``.

    ``projection``: s is the first projection.  ``shifted``: s(a) = a0 when two
    arguments coincide, otherwise a1 (needs |base| >= m+1 to differ from a
    projection).
    """
    if m < 1:
        raise AlgebraError("m must be >= 1")
    k = base.size
    if variant == "shifted" and k < m + 1:
        raise AlgebraError(f"shifted semiprojection of arity {m + 1} needs at least {m + 1} elements, got {k}")
    if variant not in ("projection", "shifted"):
        raise AlgebraError(f"unknown variant {variant!r}")
    guards.check("MAX_CLONE_TABLE", k ** (m + 1))
    args = np.array(list(itertools.product(range(k), repeat=m + 1)), dtype=np.int64)
    table = args[:, 0].copy()
    if variant == "shifted":
        distinct = np.array([len(set(row)) == m + 1 for row in args.tolist()], dtype=bool)
        table[distinct] = args[distinct, 1]
    name = "s"
    while name in base.signature.names:
        name += "_"
    A = FiniteAlgebra(k, base.signature.extend((name, m + 1)), list(base.tables) + [table],
                      f"{base.name or 'A'}+s{m + 1}{'*' if variant == 'shifted' else ''}")
    assert is_semiprojection(A.tables[-1], k, m + 1)
    return A


def is_semiprojection(table, k: int, arity: int) -> bool:
    args = itertools.product(range(k), repeat=arity)
    return all(len(set(a)) == arity or int(table[j]) == a[0] for j, a in enumerate(args))


def build(spec: CatalogSpec) -> FiniteAlgebra:
    if spec.kind == "set":
        return set_algebra(spec.k)
    if spec.kind == "pointed_set":
        return pointed_set(spec.k)
    if spec.kind == "vector_space":
        return vector_space(spec.p)
    if spec.kind == "affine_space":
        return affine_space(spec.p)
    if spec.kind == "semilattice":
        return semilattice(spec.k)
    if spec.kind == "matrix_power":
        return matrix_power(build(spec.inner), spec.d)
    return build_semiprojection_expansion(build(spec.inner), spec.m, spec.variant)


def clone_count_formula(case: str, d: int, n: int, size: int | None = None, L: int | None = None) -> int:
    """|Clo_n| for the generators of locally finite minimal abelian varieties.

    case ``i``: matrix power of the 2-element set, (n d)^d.
    case ``ii``: matrix power of the 2-element pointed set, (n d + 1)^d.
    case ``iii``: affine reduct with ring of size |A|^d and left ideal of size
    ``L``: |A|^(d (n-1)) |L|.
    """
    if n < 1 or d < 1:
        raise AlgebraError("n and d must be >= 1")
    if case == "i":
        return (n * d) ** d
    if case == "ii":
        return (n * d + 1) ** d
    if case == "iii":
        if size is None or L is None:
            raise AlgebraError("case iii needs |A| and |L|")
        return size ** (d * (n - 1)) * L
    raise AlgebraError(f"unknown case {case!r}")


# --- classification ----------------------------------------------------------------

@dataclass
class ScalarStructure:
    zero: int
    addition: np.ndarray
    scalars: list[tuple[int, ...]]

    def add(self, x: int, y: int) -> int:
        return int(self.addition[x, y])


@dataclass
class Classification:
    kind: str  # sets | pointed_sets | vector_space | affine_space | unclassified
    field_size: int | None = None
    scalar_structure: ScalarStructure | None = None
    constant: str | None = None  # "nullary" or "unary" when a constant was found
    verified_arity: int = 3
    notes: list[str] = field(default_factory=list)

    def __str__(self):
        if self.kind in ("vector_space", "affine_space"):
            return f"{self.kind}({self.field_size})"
        return self.kind


def _projection_rows(k, n):
    idx = np.arange(k**n)
    return [tuple(((idx // k ** (n - 1 - i)) % k).tolist()) for i in range(n)]


def classify(A: FiniteAlgebra, arity: int = 3) -> Classification:
    """Decide which of the four good kinds A is term-equivalent to, up to ``arity``.

    Clone comparisons stop at the given arity, so positive verdicts mean
    "verified to arity 3" by default.
    """
    guards.check("MAX_CLASSIFY_SIZE", A.size)
    k = A.size
    clo = {n: clone_table(A, n) for n in range(1, arity + 1)}
    rows = {n: {tuple(r.tolist()) for r in clo[n].rows} for n in clo}
    proj = {n: set(_projection_rows(k, n)) for n in clo}

    if all(rows[n] == proj[n] for n in clo):
        return Classification("sets", verified_arity=arity)

    constants = [r for r in rows[1] if len(set(r)) == 1]
    if len(constants) == 1 and k > 1:
        c = constants[0][0]
        realization = "nullary" if c in A.constants() else "unary"
        expected = {n: proj[n] | {(c,) * k**n} for n in clo}
        if all(rows[n] == expected[n] for n in clo):
            return Classification("pointed_sets", constant=realization, verified_arity=arity)

    if arity < 3:
        return Classification("unclassified", verified_arity=arity, notes=["Maltsev search needs arity 3"])
    maltsev = _find_maltsev(k, clo[3].rows)
    if maltsev is None:
        return Classification("unclassified", verified_arity=arity, notes=["no Maltsev term in Clo_3"])
    if not is_abelian(A):
        return Classification("unclassified", verified_arity=arity, notes=["Maltsev but not abelian"])
    M = maltsev.reshape(k, k, k)
    if len(constants) == 1:
        zero = constants[0][0]
        realization = "nullary" if zero in A.constants() else "unary"
    elif not constants:
        zero, realization = 0, None
    else:
        return Classification("unclassified", verified_arity=arity, notes=["several constant unary terms"])
    add = M[:, zero, :]
    if not _is_abelian_group(add, zero):
        return Classification("unclassified", verified_arity=arity, notes=["x + y := m(x,0,y) is not an abelian group"])
    # scalars: y -> t(0, y) for binary terms t; covers Clo_1 (t ignoring x)
    bin_rows = clo[2].rows.astype(np.int64).reshape(-1, k, k) if 2 in clo else None
    scalars = sorted({tuple(r[zero].tolist()) for r in bin_rows})
    ok, why = _is_field(scalars, add, zero, k)
    if not ok:
        return Classification("unclassified", verified_arity=arity, notes=[why])
    structure = ScalarStructure(zero, add, scalars)
    has_constant = realization is not None
    linear = {n: _combination_clone(scalars, add, zero, k, n, affine=False) for n in clo}
    affine = {n: _combination_clone(scalars, add, zero, k, n, affine=True) for n in clo}
    if has_constant and all(rows[n] == linear[n] for n in clo):
        return Classification("vector_space", len(scalars), structure, realization, arity)
    if not has_constant and A.is_idempotent() and all(rows[n] == affine[n] for n in clo):
        return Classification("affine_space", len(scalars), structure, None, arity)
    return Classification("unclassified", verified_arity=arity, notes=["clone differs from the (affine) linear clone"])


def _find_maltsev(k, rows3):
    x = np.repeat(np.arange(k), k)
    y = np.tile(np.arange(k), k)
    xxy = x * k * k + x * k + y
    yxx = y * k * k + x * k + x
    for r in rows3.astype(np.int64):
        if np.array_equal(r[xxy], y) and np.array_equal(r[yxx], y):
            return r
    return None


def _is_abelian_group(add, zero) -> bool:
    k = add.shape[0]
    e = np.arange(k)
    if not (np.array_equal(add[zero], e) and np.array_equal(add[:, zero], e)):
        return False
    if not np.array_equal(add, add.T):
        return False
    if not all((add[x] == zero).any() for x in range(k)):
        return False
    # associativity: (x+y)+z == x+(y+z) for all x, y, z
    return bool(np.array_equal(add[add, :], add[:, add]))


def _is_field(scalars, add, zero, k):
    S = {tuple(s) for s in scalars}
    e = tuple(range(k))
    z = tuple([zero] * k)
    if e not in S or z not in S:
        return False, "scalars lack 0 or 1"
    for s in S:
        for x in range(k):
            for y in range(k):
                if s[add[x, y]] != add[s[x], s[y]]:
                    return False, "a scalar is not additive"
    for s, t in itertools.product(S, repeat=2):
        comp = tuple(s[t[x]] for x in range(k))
        summ = tuple(int(add[s[x], t[x]]) for x in range(k))
        if comp not in S or summ not in S:
            return False, "scalars not closed under composition and addition"
        if comp != tuple(t[s[x]] for x in range(k)):
            return False, "scalar multiplication not commutative"
    for s in S - {z}:
        if len(set(s)) != k:
            return False, "a nonzero scalar is not invertible"
    return True, ""


def _combination_clone(scalars, add, zero, k, n, affine):
    """Tables of sum r_i x_i over all scalar tuples (with sum r_i = 1 if affine)."""
    cols = [np.array(c) for c in _projection_rows(k, n)]
    ident = tuple(range(k))
    out = set()
    for coeffs in itertools.product(scalars, repeat=n):
        if affine:
            total = [zero] * k
            for s in coeffs:
                total = [int(add[total[x], s[x]]) for x in range(k)]
            if tuple(total) != ident:
                continue
        acc = np.full(k**n, zero, dtype=np.int64)
        for s, c in zip(coeffs, cols):
            acc = add[acc, np.asarray(s)[c]]
        out.add(tuple(acc.tolist()))
    return out


# --- small-free counterexample -----------------------------------------------------

@dataclass
class SmallFreeReport:
    n: int
    m: int
    B: FiniteAlgebra
    A: FiniteAlgebra
    forced_projection: dict  # size j -> (candidates satisfying identities, all first projection)
    surjective_hom: object
    maps_considered: int

    @property
    def passed(self) -> bool:
        return self.surjective_hom is None and all(ok for _, ok in self.forced_projection.values())


def semiprojection_candidates(j: int, arity: int, exhaustive: bool | None = None):
    """All tables on a j-element set satisfying the semiprojection identities.

    With ``exhaustive`` every one of the j**(j**arity) tables is enumerated and
    filtered; otherwise only the entries at all-distinct argument tuples vary.
    """
    tuples = list(itertools.product(range(j), repeat=arity))
    if exhaustive is None:
        exhaustive = j ** (j**arity) <= guards.limit("MAX_ENUMERATION")
    if exhaustive:
        guards.check("MAX_ENUMERATION", j ** (j**arity))
        for table in itertools.product(range(j), repeat=len(tuples)):
            if is_semiprojection(table, j, arity):
                yield table
        return
    free = [i for i, t in enumerate(tuples) if len(set(t)) == arity]
    guards.check("MAX_ENUMERATION", j ** len(free))
    base = [t[0] for t in tuples]
    for vals in itertools.product(range(j), repeat=len(free)):
        table = list(base)
        for i, v in zip(free, vals):
            table[i] = v
        yield tuple(table)


def verify_smallfree(n: int) -> SmallFreeReport:
    """Sets expanded by an (n+1)-ary semiprojection: small algebras are sets, B is not free.

    (a) on every set of size <= m = n the identities force s to be the first
    projection; (b) the (n+1)-element algebra B with s the first projection
    has no surjective homomorphism onto the (n+1)-element algebra A with the
    shifted semiprojection, so B is not free.
    """
    if n < 1:
        raise AlgebraError("n must be >= 1")
    m = n
    forced = {}
    for j in range(1, m + 1):
        first = tuple(t[0] for t in itertools.product(range(j), repeat=m + 1))
        cands = list(semiprojection_candidates(j, m + 1))
        forced[j] = (len(cands), all(c == first for c in cands))
    B = build_semiprojection_expansion(set_algebra(n + 1), m, "projection")
    A = build_semiprojection_expansion(set_algebra(n + 1), m, "shifted")
    hom = find_surjective_hom(B, A)
    return SmallFreeReport(n, m, B, A, forced, hom, (n + 1) ** (n + 1))




def maltsev_term(A: FiniteAlgebra):
    """A ternary term table m with m(x,x,y) = y = m(y,x,x), or None."""
    return _find_maltsev(A.size, clone_table(A, 3).rows)
