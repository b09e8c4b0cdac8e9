import itertools

import numpy as np
import pytest

from univfree import AlgebraError, FiniteAlgebra
from univfree.algebra import eval_op, matrix_power, relabel
from univfree.catalog import (
    CatalogSpec,
    affine_space,
    build,
    build_semiprojection_expansion,
    classify,
    clone_count_formula,
    is_semiprojection,
    maltsev_term,
    pointed_set,
    semilattice,
    semiprojection_candidates,
    set_algebra,
    vector_space,
    verify_smallfree,
)
from univfree.closure import clone_table


def test_build_examples():
    P = build(CatalogSpec("pointed_set", k=2))
    assert P.signature.symbols == (("0", 0),) and list(P.tables[0]) == [0]
    A = build(CatalogSpec("affine_space", p=2))
    assert list(A.tables[0]) == [(x + y + z) % 2 for x in range(2) for y in range(2) for z in range(2)]
    V = build(CatalogSpec("vector_space", p=3))
    assert V.signature.names == ["+", "0", "*2"]


def test_spec_validation():
    with pytest.raises(AlgebraError):
        CatalogSpec("vector_space", p=4)
    with pytest.raises(AlgebraError):
        CatalogSpec("matrix_power", d=2)
    with pytest.raises(AlgebraError):
        CatalogSpec("heap")


def test_nested_specs():
    M = build(CatalogSpec("matrix_power", d=2, inner=CatalogSpec("pointed_set", k=2)))
    assert M.size == 4
    S = build(CatalogSpec("semiprojection_expansion", m=2, variant="shifted", inner=CatalogSpec("set", k=3)))
    assert S.signature.names == ["s"]


def test_semiprojection_examples():
    B = build_semiprojection_expansion(set_algebra(2), 2, "projection")
    assert all(eval_op(B, "s", t) == t[0] for t in itertools.product(range(2), repeat=3))
    A = build_semiprojection_expansion(set_algebra(3), 2, "shifted")
    assert eval_op(A, "s", (0, 1, 2)) == 1
    assert eval_op(A, "s", (0, 0, 2)) == 0
    assert is_semiprojection(A.tables[0], 3, 3)
    with pytest.raises(AlgebraError):
        build_semiprojection_expansion(set_algebra(2), 2, "shifted")


@pytest.mark.parametrize("case,d,n,kw,expected", [
    ("i", 2, 3, {}, 36),
    ("ii", 1, 4, {}, 5),
    ("iii", 1, 3, {"size": 2, "L": 1}, 4),
])
def test_clone_count_formula_examples(case, d, n, kw, expected):
    assert clone_count_formula(case, d, n, **kw) == expected


@pytest.mark.parametrize("d", [1, 2])
@pytest.mark.parametrize("n", [1, 2, 3])
def test_formula_matches_closure_matrix_powers(d, n):
    assert len(clone_table(matrix_power(set_algebra(2), d), n)) == clone_count_formula("i", d, n)
    assert len(clone_table(matrix_power(pointed_set(2), d), n)) == clone_count_formula("ii", d, n)


@pytest.mark.parametrize("q", [2, 3])
@pytest.mark.parametrize("n", [1, 2, 3])
def test_formula_matches_closure_affine_case(q, n):
    assert len(clone_table(vector_space(q), n)) == clone_count_formula("iii", 1, n, size=q, L=q)
    assert len(clone_table(affine_space(q), n)) == clone_count_formula("iii", 1, n, size=q, L=1)


ROUND_TRIP = [
    (CatalogSpec("set", k=2), "sets", None),
    (CatalogSpec("pointed_set", k=2), "pointed_sets", None),
    (CatalogSpec("vector_space", p=2), "vector_space", 2),
    (CatalogSpec("vector_space", p=3), "vector_space", 3),
    (CatalogSpec("affine_space", p=2), "affine_space", 2),
    (CatalogSpec("affine_space", p=3), "affine_space", 3),
]


@pytest.mark.parametrize("spec,kind,q", ROUND_TRIP, ids=str)
def test_classify_round_trip(spec, kind, q):
    c = classify(build(spec))
    assert c.kind == kind and c.field_size == q
    assert c.verified_arity == 3


@pytest.mark.parametrize("spec,kind,q", ROUND_TRIP, ids=str)
def test_classify_invariant_under_relabelling(spec, kind, q):
    A = build(spec)
    rng = np.random.default_rng(7)
    for _ in range(3):
        c = classify(relabel(A, rng.permutation(A.size)))
        assert c.kind == kind and c.field_size == q


def test_classify_affine_gf2_reconstructs_xor():
    c = classify(affine_space(2))
    assert str(c) == "affine_space(2)"
    assert c.scalar_structure.zero == 0
    assert c.scalar_structure.addition.tolist() == [[0, 1], [1, 0]]


def test_classify_unclassified():
    assert classify(semilattice(2)).kind == "unclassified"
    shifted = build_semiprojection_expansion(set_algebra(3), 2, "shifted")
    assert classify(shifted).kind == "unclassified"


def test_classify_records_unary_constant_realization():
    # GF(2) with + and a unary constant-zero map instead of a nullary symbol
    A = FiniteAlgebra.from_ops(2, {"+": (2, [0, 1, 1, 0]), "z": (1, [0, 0])})
    c = classify(A)
    assert c.kind == "vector_space" and c.constant == "unary"
    assert classify(vector_space(2)).constant == "nullary"
    P = FiniteAlgebra.from_ops(2, {"z": (1, [0, 0])})
    c = classify(P)
    assert c.kind == "pointed_sets" and c.constant == "unary"


def test_classify_sets_of_larger_size():
    assert classify(set_algebra(4)).kind == "sets"
    assert classify(pointed_set(3)).kind == "pointed_sets"


def test_maltsev_term_search():
    assert maltsev_term(affine_space(3)) is not None
    assert maltsev_term(semilattice(2)) is None
    assert maltsev_term(pointed_set(2)) is None


@pytest.mark.parametrize("n", [1, 2])
def test_verify_smallfree(n):
    rep = verify_smallfree(n)
    assert rep.passed
    assert rep.surjective_hom is None
    assert rep.B.size == rep.A.size == n + 1
    assert all(ok for _, ok in rep.forced_projection.values())


def test_smallfree_n1_second_projection():
    rep = verify_smallfree(1)
    assert list(rep.A.tables[0]) == [0, 1, 0, 1]  # s(a0, a1) = a1
    assert list(rep.B.tables[0]) == [0, 0, 1, 1]


def test_semiprojection_candidates_exhaustive_on_two_elements():
    # all 2**8 ternary tables on 2 elements, filtered by the identities
    cands = list(semiprojection_candidates(2, 3, exhaustive=True))
    assert cands == [tuple(t[0] for t in itertools.product(range(2), repeat=3))]


def test_semiprojection_candidates_structured_matches_exhaustive():
    for j, arity in [(2, 2), (2, 3), (3, 2)]:
        a = sorted(semiprojection_candidates(j, arity, exhaustive=True))
        b = sorted(semiprojection_candidates(j, arity, exhaustive=False))
        assert a == b
