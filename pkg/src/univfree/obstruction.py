"""The construction S = A(theta)/Delta, its five properties, and the obstruction verdict."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .algebra import FiniteAlgebra, product, quotient_by, subalgebra, subuniverse_mask
from .closure import Power, Term, evaluate, generate, joint_generation, term_table, substitute, Var
from .congruence import (
    Partition,
    all_congruences,
    cg_pairs,
    coatoms,
    congruence_violation,
    is_congruence,
    maximal_below,
    sd_meet_failure,
)
from .errors import AlgebraError, NotACongruence, PreconditionError
from .termcond import is_abelian, is_strongly_abelian_congruence


# --- relations ------------------------------------------------------------------

@dataclass
class BinaryRelation:
    """A relation on ``{0..n-1}`` stored as a boolean matrix; ``m[a, b]`` iff a R b."""

    matrix: np.ndarray

    @classmethod
    def from_pairs(cls, n: int, pairs) -> "BinaryRelation":
        m = np.zeros((n, n), dtype=bool)
        for a, b in pairs:
            m[a, b] = True
        return cls(m)

    @property
    def size(self) -> int:
        return self.matrix.shape[0]

    def __contains__(self, pair) -> bool:
        return bool(self.matrix[pair[0], pair[1]])

    def __eq__(self, other):
        return isinstance(other, BinaryRelation) and np.array_equal(self.matrix, other.matrix)

    def pairs(self) -> list[tuple[int, int]]:
        return [(int(a), int(b)) for a, b in np.argwhere(self.matrix)]

    def converse(self) -> "BinaryRelation":
        return BinaryRelation(self.matrix.T.copy())

    def transitive_closure(self) -> "BinaryRelation":
        m = self.matrix.copy()
        for k in range(self.size):
            m |= m[:, k:k + 1] & m[k:k + 1, :]
        return BinaryRelation(m)

    def is_reflexive(self) -> bool:
        return bool(np.diag(self.matrix).all())

    def is_transitive(self) -> bool:
        m = self.matrix.astype(np.int64)
        return bool(((m @ m > 0) <= self.matrix).all())

    def is_antisymmetric(self) -> bool:
        both = self.matrix & self.matrix.T
        return bool((both == np.diag(np.diag(both))).all())

    def is_compatible(self, A: FiniteAlgebra) -> bool:
        """The relation is a subuniverse of A x A."""
        rows = np.array(self.pairs(), dtype=np.int64).reshape(-1, 2)
        closed = generate(Power([(A, 2)]), rows)
        return len(closed) == len(rows)


# --- the construction ----------------------------------------------------------------

@dataclass
class GraphAlgebra:
    """A(theta): the subalgebra of A x A on the theta-related pairs, in lexicographic order."""

    base: FiniteAlgebra
    theta: Partition
    algebra: FiniteAlgebra
    pairs: list[tuple[int, int]]
    diagonal: list[int]

    def index(self, a: int, b: int) -> int:
        return self.pairs.index((a, b))


def graph_algebra(A: FiniteAlgebra, theta: Partition) -> GraphAlgebra:
    bad = congruence_violation(A, theta)
    if bad is not None:
        raise NotACongruence("theta is not a congruence", bad)
    k = A.size
    pairs = [(a, b) for a in range(k) for b in range(k) if theta.related(a, b)]
    G = subalgebra(product(A, A), [a * k + b for a, b in pairs], f"{A.name or 'A'}(theta)")
    diagonal = [i for i, (a, b) in enumerate(pairs) if a == b]
    return GraphAlgebra(A, theta, G, pairs, diagonal)


@dataclass
class SConstruction:
    graph: GraphAlgebra
    delta: Partition
    S: FiniteAlgebra
    zero: int
    diagonal_is_class: bool
    nontrivial: bool

    @property
    def projection(self) -> np.ndarray:
        """A(theta) -> S."""
        return self.delta.labels


def s_construction(A: FiniteAlgebra, theta: Partition) -> SConstruction:
    """S = A(theta)/Delta with Delta = Cg(D x D) and zero = D/Delta.

    ``diagonal_is_class`` and ``nontrivial`` record the two facts that hold
    when A is abelian and theta is nontrivial; they are reported, not enforced.
    """
    G = graph_algebra(A, theta)
    d0 = G.diagonal[0]
    delta = cg_pairs(G.algebra, [(d0, d) for d in G.diagonal[1:]])
    S, _ = quotient_by(G.algebra, delta)
    S = S.with_name(f"S({A.name or 'A'})")
    zero = int(delta.labels[d0])
    block = set(np.flatnonzero(delta.labels == zero).tolist())
    return SConstruction(G, delta, S, zero, block == set(G.diagonal), S.size > 1)


# --- items (2), (3) ----------------------------------------------------------------

def zero_is_subuniverse(S: FiniteAlgebra, zero: int) -> bool:
    return all(int(S.tables[i][sum(zero * S.size**p for p in range(r))]) == zero
               for i, (_, r) in enumerate(S.signature))


@dataclass
class PairWitness:
    """A term t with ``t(left gens) = pair[0]`` and ``t(right gens) = pair[1]`` in S."""

    term: Term
    generators: list[tuple[int, int]]
    pair: tuple[int, int]

    def replay(self, S: FiniteAlgebra) -> bool:
        left = [g[0] for g in self.generators]
        right = [g[1] for g in self.generators]
        return (evaluate(self.term, S, left), evaluate(self.term, S, right)) == self.pair


@dataclass
class PropertyP:
    holds: bool
    witness: PairWitness | None
    relation: BinaryRelation | None = None

    def __bool__(self):
        return self.holds


def _r_generators(S: FiniteAlgebra, zero: int):
    gens = [(s, s) for s in range(S.size)]
    gens += [(zero, s) for s in range(S.size) if s != zero]
    return gens


def generated_relation(S: FiniteAlgebra, zero: int) -> BinaryRelation:
    """R: the compatible relation generated by the diagonal and {zero} x S.

    Its members are the pairs (p(0,...,0), p(s1,...,sn)) for polynomials p.
    """
    gs = generate(Power([(S, 2)]), _r_generators(S, zero))
    return BinaryRelation.from_pairs(S.size, [tuple(map(int, r)) for r in gs.rows])


def property_p_holds(S: FiniteAlgebra, zero: int) -> PropertyP:
    """p(s) = 0 implies p(0) = 0, decided on R (no (x, zero) with x != zero in R)."""
    if not zero_is_subuniverse(S, zero):
        raise AlgebraError(f"{{{zero}}} is not a subuniverse")
    gens = _r_generators(S, zero)

    def bad(rows):
        r = rows.astype(np.int64)
        return (r[:, 1] == zero) & (r[:, 0] != zero)

    gs = generate(Power([(S, 2)]), gens, stop=bad)
    if gs.complete:
        rel = BinaryRelation.from_pairs(S.size, [tuple(map(int, r)) for r in gs.rows])
        return PropertyP(True, None, rel)
    i = gs.stopped
    return PropertyP(False, PairWitness(gs.term(i), gens, tuple(int(v) for v in gs.rows[i])))


# --- item (4) ------------------------------------------------------------------------

@dataclass
class IndependenceWitness:
    """V satisfies t(w) = t(z) with w_i != z_i, yet t on S depends on variable i.

    ``w`` and ``z`` are patterns over the two variables x0, x1; ``assignment``
    and ``changed`` are S-assignments of t differing only at position i.
    """

    term: Term
    arity: int
    position: int
    w: tuple[int, ...]
    z: tuple[int, ...]
    assignment: tuple[int, ...]
    changed: tuple[int, ...]

    def identity(self) -> tuple[Term, Term]:
        def inst(pattern):
            return substitute(self.term, {j: Var(v) for j, v in enumerate(pattern)})

        return inst(self.w), inst(self.z)

    def replay(self, V_generator: FiniteAlgebra, S: FiniteAlgebra) -> bool:
        lhs, rhs = self.identity()
        holds = np.array_equal(term_table(lhs, V_generator, 2), term_table(rhs, V_generator, 2))
        differs = evaluate(self.term, S, self.assignment) != evaluate(self.term, S, self.changed)
        only_i = all((a == b) == (j != self.position)
                     for j, (a, b) in enumerate(zip(self.assignment, self.changed)))
        return bool(holds and differs and only_i and self.w[self.position] != self.z[self.position])


@dataclass
class Independence:
    holds: bool
    witness: IndependenceWitness | None
    arity_bound: int
    terms_checked: dict = field(default_factory=dict)

    def __bool__(self):
        return self.holds


def _independence_at(free2, S: FiniteAlgebra, n: int):
    """Joint generation of (t at all {x,y}-patterns in F(2), t's table on S) for n-ary t."""
    patterns = list(itertools.product((0, 1), repeat=n))
    xs = free2.generators
    s = S.size
    idx = np.arange(s**n)
    s_proj = [(idx // s ** (n - 1 - j)) % s for j in range(n)]
    paired = [([xs[p[j]] for p in patterns], s_proj[j]) for j in range(n)]
    checks = []  # (position, w index, z index)
    for i in range(n):
        for a, w in enumerate(patterns):
            for b, z in enumerate(patterns):
                if a < b and w[i] != z[i]:
                    checks.append((i, a, b))
    # report identities in which both sides use both variables first
    checks.sort(key=lambda c: (len(set(patterns[c[1]])) + len(set(patterns[c[2]])) < 4, c))
    P = len(patterns)

    def depends(tables, i):
        T = tables.reshape((-1,) + (s,) * n)
        base = np.take(T, [0], axis=i + 1)
        return (T != base).reshape(len(tables), -1).any(axis=1)

    def bad(rows):
        r = rows.astype(np.int64)
        left, right = r[:, :P], r[:, P:]
        dep = [depends(right, i) for i in range(n)]
        flags = np.zeros(len(rows), dtype=bool)
        for i, a, b in checks:
            flags |= (left[:, a] == left[:, b]) & dep[i]
        return flags

    gs = joint_generation((free2.algebra, P), (S, s**n), paired, stop=bad)
    if gs.complete:
        return None, len(gs)
    k = gs.stopped
    row = gs.rows[k].astype(np.int64)
    left, right = row[:P], row[P:].reshape((s,) * n)
    for i, a, b in checks:
        if left[a] != left[b]:
            continue
        base = np.take(right, [0], axis=i)
        hit = np.argwhere(right != base)
        if hit.size:
            assign = tuple(int(v) for v in hit[0])
            changed = list(assign)
            changed[i] = 0
            return IndependenceWitness(gs.term(k), n, i, patterns[a], patterns[b], assign, tuple(changed)), len(gs)
    raise AssertionError("flagged element without a violation")


def independence_condition_check(V_generator: FiniteAlgebra, S: FiniteAlgebra, K: int = 3) -> Independence:
    """Item (4) for all terms of arity at most K (patterns over two variables)."""
    from .free import free_algebra, in_variety

    if K < 1:
        raise AlgebraError("arity bound must be >= 1")
    mem = in_variety(S, V_generator)
    if not mem:
        raise PreconditionError("S is not in the variety generated by the generator", mem.witness)
    F2 = free_algebra(V_generator, 2)
    counts = {}
    for n in range(1, K + 1):
        w, size = _independence_at(F2, S, n)
        counts[n] = size
        if w is not None:
            return Independence(False, w, K, counts)
    return Independence(True, None, K, counts)


# --- item (5) ---------------------------------------------------------------------

@dataclass
class OrderQuotient:
    sigma: Partition
    order: BinaryRelation
    quotient: FiniteAlgebra
    zero: int  # zero/sigma
    degenerate: bool  # Property P failed, so zero need not be alone in its class
    checks: dict

    @property
    def passed(self) -> bool:
        return all(self.checks.values())


def order_quotient(S: FiniteAlgebra, zero: int) -> OrderQuotient:
    """sigma = R* cap converse(R*) and the order R*/sigma on S/sigma."""
    p = property_p_holds(S, zero)
    R = p.relation if p.relation is not None else generated_relation(S, zero)
    Rs = R.transitive_closure()
    sym = Rs.matrix & Rs.matrix.T
    sigma = Partition.from_pairs(S.size, [tuple(map(int, x)) for x in np.argwhere(sym)])
    checks = {"sigma_compatible": is_congruence(S, sigma)}
    Q, _ = quotient_by(S, sigma) if checks["sigma_compatible"] else (None, None)
    reps = sigma.representatives()
    order = BinaryRelation(Rs.matrix[np.ix_(reps, reps)])
    z = int(sigma.labels[zero])
    checks["reflexive"] = order.is_reflexive()
    checks["transitive"] = order.is_transitive()
    checks["antisymmetric"] = order.is_antisymmetric()
    checks["compatible"] = Q is not None and order.is_compatible(Q)
    checks["zero_least"] = bool(order.matrix[z].all())
    if Q is not None:
        checks["item1"] = Q.size > 1
        checks["item2"] = zero_is_subuniverse(Q, z)
        checks["item3"] = checks["item2"] and bool(property_p_holds(Q, z))
    return OrderQuotient(sigma, order, Q, z, not p.holds, checks)


# --- the obstruction verdict ------------------------------------------------------------

@dataclass
class ItemResult:
    passed: bool
    witness: object = None
    info: dict = field(default_factory=dict)


@dataclass
class ObstructionReport:
    preconditions: dict
    arity_bound: int
    S: FiniteAlgebra | None = None
    zero: int | None = None
    items: dict = field(default_factory=dict)
    failed_precondition: str | None = None
    precondition_witness: object = None

    @property
    def passed(self) -> bool:
        return self.failed_precondition is None and all(it.passed for it in self.items.values())


def verify_affine_obstruction(V_generator: FiniteAlgebra, A: FiniteAlgebra, theta: Partition,
                              K: int = 3) -> ObstructionReport:
    """Check items (1)-(5) for S = S(A, theta); item (4) up to arity K."""
    pre = {}
    rep = ObstructionReport(pre, K)
    pre["theta_congruence"] = is_congruence(A, theta)
    if not pre["theta_congruence"]:
        rep.failed_precondition = "theta_congruence"
        return rep
    pre["theta_nontrivial"] = not theta.is_identity()
    ab = is_abelian(A)
    pre["abelian"] = bool(ab)
    sa = is_strongly_abelian_congruence(A, theta)
    pre["strongly_abelian"] = bool(sa)
    for name, wit in (("theta_nontrivial", None), ("abelian", ab.witness), ("strongly_abelian", sa.witness)):
        if not pre[name]:
            rep.failed_precondition = name
            rep.precondition_witness = wit
            return rep

    sc = s_construction(A, theta)
    rep.S, rep.zero = sc.S, sc.zero
    S, zero = sc.S, sc.zero
    rep.items["1"] = ItemResult(sc.nontrivial and sc.diagonal_is_class,
                                info={"size": S.size, "diagonal_is_class": sc.diagonal_is_class})
    two = zero_is_subuniverse(S, zero)
    rep.items["2"] = ItemResult(two)
    if two:
        p = property_p_holds(S, zero)
        rep.items["3"] = ItemResult(p.holds, p.witness)
    else:
        rep.items["3"] = ItemResult(False, info={"reason": "zero is not a subuniverse"})
    ind = independence_condition_check(V_generator, S, K)
    rep.items["4"] = ItemResult(ind.holds, ind.witness, {"arity_bound": K, "terms": ind.terms_checked})
    if two:
        oq = order_quotient(S, zero)
        rep.items["5"] = ItemResult(oq.passed and not oq.degenerate, oq,
                                    {"sigma": oq.sigma, "degenerate": oq.degenerate})
    else:
        rep.items["5"] = ItemResult(False, info={"reason": "zero is not a subuniverse"})
    return rep


# --- the scaffold around Sg{(0,x),(x,0)} ----------------------------------------------------

@dataclass
class ScaffoldReport:
    free_size: int
    trivial: bool
    sub_size: int = 0
    eta_is_principal: bool = False
    mu: Partition | None = None
    coatom_count: int = 0
    sd_failure: tuple | None = None
    free_abelian: bool = False

    @property
    def passed(self) -> bool:
        return (not self.trivial and self.eta_is_principal and self.coatom_count >= 3
                and self.sd_failure is not None and self.free_abelian)


def verify_lemma_abelian_scaffold(generator: FiniteAlgebra) -> ScaffoldReport:
    """Inside F x F with F = F_V(1) = F(x): the subalgebra A' = Sg{(0,x),(x,0)}.

    Checks that the kernel eta1 of the first projection on A' is
    Cg((0,0),(0,x)), that A'/mu has at least 3 coatoms for mu maximal below
    eta1, that the lattice of A'/mu fails meet-semidistributivity with third
    component eta1/mu, and that F is abelian.
    """
    from .free import free_algebra

    if not generator.signature.nullary():
        raise PreconditionError("the scaffold needs a constant symbol")
    F1 = free_algebra(generator, 1)
    F = F1.algebra
    if F.size < 2:
        return ScaffoldReport(F.size, True)
    zero, x = F1.zero(), F1.generators[0]
    k = F.size
    P = product(F, F)
    elems = np.flatnonzero(subuniverse_mask(P, [zero * k + x, x * k + zero]))
    Ap = subalgebra(P, elems, "A'")
    pos = {int(e): i for i, e in enumerate(elems)}
    eta = Partition([int(e) // k for e in elems])
    cg = cg_pairs(Ap, [(pos[zero * k + zero], pos[zero * k + x])])
    rep = ScaffoldReport(k, False, Ap.size, eta == cg)
    lattice = all_congruences(Ap)
    mu = maximal_below(lattice, eta)
    rep.mu = mu
    Q, _ = quotient_by(Ap, mu)
    qlat = all_congruences(Q)
    rep.coatom_count = len(coatoms(qlat))
    eta_q = Partition([eta.labels[r] for r in mu.representatives()])
    rep.sd_failure = sd_meet_failure(qlat, eta_q)
    rep.free_abelian = bool(is_abelian(F))
    return rep
