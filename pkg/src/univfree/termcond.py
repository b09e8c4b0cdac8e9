"""Term-condition deciders: abelian, strongly abelian, injective unary polynomials."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import guards
from .algebra import FiniteAlgebra, product
from .closure import (
    GeneratedSet,
    Power,
    Term,
    evaluate,
    generate,
    rename_vars,
    term_str,
    term_vars,
    unary_polynomials,
)
from .congruence import Partition, all_congruences, cg_pairs, congruence_violation
from .errors import NotACongruence


@dataclass
class Verdict:
    """A boolean outcome plus optional evidence.  Truthy iff ``holds``."""

    holds: bool
    witness: object = None
    info: dict = field(default_factory=dict)

    def __bool__(self):
        return bool(self.holds)


@dataclass
class MatrixWitness:
    """A term and the assignments read off the columns of a term-condition matrix.

    ``columns[c]`` is the assignment of the term's variables that produces
    coordinate ``c`` of the offending matrix element; ``values[c]`` is that
    coordinate.
    """

    term: Term
    columns: list[tuple[int, ...]]
    values: list[int]
    roles: list[str]

    def describe(self, A: FiniteAlgebra) -> str:
        return term_str(self.term, A.signature)

    def replay(self, A: FiniteAlgebra) -> bool:
        return all(evaluate(self.term, A, col) == v for col, v in zip(self.columns, self.values))


def _matrix_witness(gs: GeneratedSet, i: int, roles_of_gen) -> MatrixWitness:
    t = gs.term(i)
    used = sorted(term_vars(t))
    mapping = {g: j for j, g in enumerate(used)}
    t = rename_vars(t, mapping)
    width = gs.ambient.width
    columns = [tuple(int(gs.gen_rows[g][c]) for g in used) for c in range(width)]
    values = [int(v) for v in gs.rows[i]]
    return MatrixWitness(t, columns, values, [roles_of_gen(g) for g in used])


# --- abelianness --------------------------------------------------------------

def _four_matrix(A: FiniteAlgebra, stop_on_failure=True):
    # rows are (t(a,u), t(a,v), t(b,u), t(b,v)); x-type generators (a,a,b,b),
    # y-type generators (u,v,u,v)
    k = A.size
    xs = [(a, a, b, b) for a in range(k) for b in range(k)]
    ys = [(u, v, u, v) for u in range(k) for v in range(k)]
    gens = xs + ys

    def bad(rows):
        r = rows.astype(np.int64)
        return (r[:, 0] == r[:, 1]) & (r[:, 2] != r[:, 3])

    gs = generate(Power([(A, 4)]), gens, stop=bad if stop_on_failure else None)
    return gs, len(xs), bad


def is_abelian_matrix(A: FiniteAlgebra) -> Verdict:
    """Term condition via the subuniverse of A^4 generated by (a,a,b,b) and (u,v,u,v).

    t(a,u) = t(a,v) with t(b,u) != t(b,v) shows up as an element whose first two
    coordinates agree and whose last two differ.
    """
    gs, nx, _ = _four_matrix(A)
    if gs.complete:
        return Verdict(True, info={"matrix_elements": len(gs)})
    w = _matrix_witness(gs, gs.stopped, lambda g: "x" if g < nx else "y")
    return Verdict(False, w)


def is_abelian(A: FiniteAlgebra) -> Verdict:
    """Abelian iff the diagonal of A x A is a class of the congruence it generates.

    On failure the witness is a term-condition instance taken from the
    matrix-generation trace: ``columns`` are the (a,u), (a,v), (b,u), (b,v)
    assignments.
    """
    guards.check("MAX_ABELIAN_SIZE", A.size)
    k = A.size
    P = product(A, A)
    diag = [a * k + a for a in range(k)]
    delta = cg_pairs(P, [(diag[0], d) for d in diag[1:]])
    block = np.flatnonzero(delta.labels == delta.labels[diag[0]])
    if len(block) == k:
        return Verdict(True, info={"diagonal_congruence": delta})
    gs, nx, _ = _four_matrix(A)
    w = _matrix_witness(gs, gs.stopped, lambda g: "x" if g < nx else "y") if not gs.complete else None
    return Verdict(False, w, {"diagonal_congruence": delta})


# --- strong abelianness -----------------------------------------------------------

def is_strongly_abelian_congruence(A: FiniteAlgebra, theta: Partition) -> Verdict:
    """Strong term condition for ``theta`` via a subuniverse of A^6.

    Generators are (a,b,c,a,b,c) for pairwise theta-related a, b, c and
    (u,u,u,v,v,v) for theta-related u, v.  A term t applied to x-type
    generators (tuples a, b, c) and y-type ones (tuples u, v) yields

        (t(a,u), t(b,u), t(c,u), t(a,v), t(b,v), t(c,v)).

    Conversely every instance of the strong term condition is such an
    element: put one x-type generator per position of the theta-related
    tuples a, b, c and one y-type generator per position of u, v, repeating
    generators where the tuples repeat.  So the condition
    t(a,u) = t(b,v) => t(c,u) = t(c,v) holds for every term exactly when every
    element with coordinate 0 = coordinate 4 also has coordinate 2 =
    coordinate 5.  The subuniverse is finite, so this decides the condition.
    """
    if congruence_violation(A, theta) is not None:
        raise NotACongruence("theta is not a congruence")
    blocks = theta.blocks()
    xs = [(a, b, c, a, b, c) for blk in blocks for a in blk for b in blk for c in blk]
    ys = [(u, u, u, v, v, v) for blk in blocks for u in blk for v in blk]

    def bad(rows):
        r = rows.astype(np.int64)
        return (r[:, 0] == r[:, 4]) & (r[:, 2] != r[:, 5])

    gs = generate(Power([(A, 6)]), xs + ys, stop=bad)
    if gs.complete:
        return Verdict(True, info={"matrix_elements": len(gs)})
    nx = len(xs)
    return Verdict(False, _matrix_witness(gs, gs.stopped, lambda g: "x" if g < nx else "y"))


def is_strongly_abelian_algebra(A: FiniteAlgebra) -> Verdict:
    for theta in all_congruences(A):
        v = is_strongly_abelian_congruence(A, theta)
        if not v:
            return Verdict(False, v.witness, {"congruence": theta})
    return Verdict(True)


# --- unary polynomials --------------------------------------------------------------

@dataclass
class PolynomialWitness:
    """A unary polynomial ``term(x0; x1 = c0, x2 = c1, ...)`` and its table.

    Variable 0 is the argument; variable ``1 + c`` stands for the constant c.
    """

    term: Term
    table: tuple[int, ...]

    def replay(self, A: FiniteAlgebra) -> bool:
        consts = list(range(A.size))
        return all(evaluate(self.term, A, [x] + consts) == self.table[x] for x in range(A.size))


def polynomial_witness(gs: GeneratedSet, i: int) -> PolynomialWitness:
    return PolynomialWitness(gs.term(i), tuple(int(v) for v in gs.rows[i]))


def nonconstant_unaries_injective(A: FiniteAlgebra) -> Verdict:
    """Every unary polynomial of A is constant or injective."""
    pol = unary_polynomials(A)
    for i, row in enumerate(pol.rows):
        distinct = len(set(row.tolist()))
        if 1 < distinct < A.size:
            return Verdict(False, polynomial_witness(pol, i), {"pol1_size": len(pol)})
    return Verdict(True, info={"pol1_size": len(pol)})


def twin_kernels_agree(A: FiniteAlgebra, zero: int) -> Verdict:
    """For each p(x) = t(x, u), ker p equals ker t(x, 0, ..., 0).

    Checked over the witnesses of Pol_1(A); only meaningful for abelian A.
    """
    pol = unary_polynomials(A)
    for i in range(len(pol)):
        t = pol.term(i)
        p = [int(v) for v in pol.rows[i]]
        twin = [evaluate(t, A, [x] + [zero] * A.size) for x in range(A.size)]
        if Partition(p) != Partition(twin):
            return Verdict(False, (polynomial_witness(pol, i), tuple(twin)))
    return Verdict(True)


def term_condition_bruteforce(A: FiniteAlgebra, max_arity: int = 2) -> bool:
    """Term condition checked directly for all term operations of arity <= max_arity.

    Slow reference used by tests: splits each term's variables into one
    x-block and one y-block in every way.
    """
    from .closure import clone_table

    for n in range(1, max_arity + 1):
        cl = clone_table(A, n)
        for row in cl.rows:
            T = row.astype(np.int64).reshape((A.size,) * n)
            for nx in range(1, n):
                for a, b in itertools.product(itertools.product(range(A.size), repeat=nx), repeat=2):
                    for u, v in itertools.product(itertools.product(range(A.size), repeat=n - nx), repeat=2):
                        if T[a + u] == T[a + v] and T[b + u] != T[b + v]:
                            return False
    return True
