import numpy as np
import pytest

from univfree import AlgebraError, FiniteAlgebra, NotACongruence, PreconditionError
from univfree.algebra import is_isomorphic
from univfree.catalog import affine_space, maltsev_term, pointed_set, set_algebra, vector_space
from univfree.closure import term_str
from univfree.congruence import Partition
from univfree.obstruction import (
    BinaryRelation,
    generated_relation,
    graph_algebra,
    independence_condition_check,
    order_quotient,
    property_p_holds,
    s_construction,
    verify_affine_obstruction,
    verify_lemma_abelian_scaffold,
    zero_is_subuniverse,
)

from conftest import klein_four

CASES = [
    ("set2", lambda: set_algebra(2)),
    ("pointed2", lambda: pointed_set(2)),
    ("set3", lambda: set_algebra(3)),
]


def test_binary_relation_basics():
    R = BinaryRelation.from_pairs(3, [(0, 0), (1, 1), (2, 2), (0, 1), (1, 2)])
    assert R.is_reflexive() and not R.is_transitive()
    Rs = R.transitive_closure()
    assert (0, 2) in Rs and Rs.is_transitive() and Rs.is_antisymmetric()
    assert Rs.converse().pairs() == sorted((b, a) for a, b in Rs.pairs())
    assert not BinaryRelation.from_pairs(2, [(0, 1), (1, 0)]).is_antisymmetric()


def test_graph_algebra_examples():
    G = graph_algebra(set_algebra(2), Partition.full(2))
    assert G.algebra.size == 4 and len(G.diagonal) == 2
    A = vector_space(3)
    G = graph_algebra(A, Partition.identity(3))
    assert G.algebra.size == 3 and is_isomorphic(G.algebra, A) is not None
    G = graph_algebra(pointed_set(2), Partition.full(2))
    assert G.algebra.size == 4 and G.algebra.constants()[0] in G.diagonal


def test_graph_algebra_size_is_sum_of_squares():
    A = pointed_set(4)
    theta = Partition.parse("0,1|2,3", 4)
    assert graph_algebra(A, theta).algebra.size == 8
    with pytest.raises(NotACongruence):
        graph_algebra(klein_four(), Partition.parse("0,1", 4))


def test_s_construction_examples():
    sc = s_construction(set_algebra(2), Partition.full(2))
    assert sc.S.size == 3 and sc.diagonal_is_class and sc.nontrivial
    assert sc.zero == int(sc.delta.labels[sc.graph.diagonal[0]])
    assert s_construction(pointed_set(2), Partition.full(2)).S.size == 3
    sc = s_construction(set_algebra(2), Partition.identity(2))
    assert sc.S.size == 1 and not sc.nontrivial


def test_property_p_examples():
    sc = s_construction(set_algebra(2), Partition.full(2))
    assert property_p_holds(sc.S, sc.zero)
    V = vector_space(2)
    p = property_p_holds(V, 0)
    assert not p
    assert p.witness.pair == (1, 0)
    assert p.witness.replay(V)
    assert property_p_holds(pointed_set(1), 0)


def test_property_p_requires_zero_subuniverse():
    with pytest.raises(AlgebraError):
        property_p_holds(vector_space(2), 1)


@pytest.mark.parametrize("A", [vector_space(2), vector_space(3), affine_space(2), affine_space(3), klein_four()],
                         ids=lambda A: A.name)
def test_affine_algebras_fail_property_p(A):
    p = property_p_holds(A, 0)
    assert not p and p.witness.replay(A)


def test_order_quotient_examples():
    sc = s_construction(set_algebra(2), Partition.full(2))
    oq = order_quotient(sc.S, sc.zero)
    assert oq.sigma.is_identity() and oq.passed and not oq.degenerate
    z = sc.zero
    others = [s for s in range(3) if s != z]
    expected = {(z, z), (z, others[0]), (z, others[1]), (others[0], others[0]), (others[1], others[1])}
    assert set(oq.order.pairs()) == expected
    oq = order_quotient(pointed_set(1), 0)
    assert oq.quotient.size == 1 and oq.order.pairs() == [(0, 0)]
    sc = s_construction(pointed_set(2), Partition.full(2))
    oq = order_quotient(sc.S, sc.zero)
    assert oq.sigma.is_identity() and oq.checks["zero_least"]


def test_order_quotient_degenerate_when_property_p_fails():
    oq = order_quotient(vector_space(2), 0)
    assert oq.degenerate
    assert oq.sigma.is_full()


def test_generated_relation_contains_generators():
    sc = s_construction(set_algebra(3), Partition.full(3))
    R = generated_relation(sc.S, sc.zero)
    assert R.is_reflexive() and all((sc.zero, s) in R for s in range(sc.S.size))
    assert R.is_compatible(sc.S)


def test_independence_examples():
    sc = s_construction(set_algebra(2), Partition.full(2))
    assert independence_condition_check(set_algebra(2), sc.S, 3)
    V = vector_space(2)
    ind = independence_condition_check(V, V, 2)
    assert not ind
    w = ind.witness
    assert term_str(w.term, V.signature) == "+(x0,x1)"
    lhs, rhs = w.identity()
    assert (term_str(lhs, V.signature), term_str(rhs, V.signature)) == ("+(x0,x1)", "+(x1,x0)")
    assert w.replay(V, V)


def test_independence_requires_membership():
    from conftest import fake_gf2

    with pytest.raises(PreconditionError):
        independence_condition_check(vector_space(2), fake_gf2(), 2)


def test_independence_vacuous_for_projection_clones():
    assert independence_condition_check(set_algebra(3), set_algebra(3), 3)


@pytest.mark.parametrize("name,make", CASES)
def test_nonaffine_lemma_cases(name, make):
    A = make()
    rep = verify_affine_obstruction(A, A, Partition.full(A.size), 3)
    assert rep.failed_precondition is None
    assert all(rep.items[i].passed for i in "12345"), rep.items
    assert rep.arity_bound == 3
    oq = rep.items["5"].witness
    assert oq.order.is_reflexive() and oq.order.is_transitive() and oq.order.is_antisymmetric()
    assert oq.order.is_compatible(oq.quotient)
    assert oq.order.matrix[oq.zero].all()
    assert zero_is_subuniverse(rep.S, rep.zero)


@pytest.mark.parametrize("name,make", CASES)
def test_obstructions_have_no_maltsev_term(name, make):
    A = make()
    rep = verify_affine_obstruction(A, A, Partition.full(A.size), 3)
    assert rep.passed
    assert maltsev_term(rep.S) is None


@pytest.mark.parametrize("name,make", CASES)
def test_property_p_holds_on_order_quotient(name, make):
    A = make()
    sc = s_construction(A, Partition.full(A.size))
    oq = order_quotient(sc.S, sc.zero)
    assert property_p_holds(oq.quotient, oq.zero)


def test_nonaffine_precondition_failure_on_gf2():
    V = vector_space(2)
    rep = verify_affine_obstruction(V, V, Partition.full(2), 3)
    assert rep.failed_precondition == "strongly_abelian"
    assert rep.precondition_witness.replay(V)
    assert not rep.passed


def test_nonaffine_precondition_nontrivial_theta():
    rep = verify_affine_obstruction(set_algebra(2), set_algebra(2), Partition.identity(2))
    assert rep.failed_precondition == "theta_nontrivial"


def test_nonaffine_with_partial_theta():
    A = set_algebra(3)
    rep = verify_affine_obstruction(A, A, Partition.parse("0,1|2", 3), 3)
    assert rep.passed and rep.S.size == 3


@pytest.mark.parametrize("gen,coatoms", [(pointed_set(2), 3), (vector_space(2), 3), (vector_space(3), 4)],
                         ids=lambda x: getattr(x, "name", str(x)))
def test_abelian_scaffold(gen, coatoms):
    rep = verify_lemma_abelian_scaffold(gen)
    assert rep.passed
    assert rep.eta_is_principal and rep.free_abelian
    assert rep.coatom_count == coatoms


def test_abelian_scaffold_pointed_subalgebra_is_pointed_three_set():
    rep = verify_lemma_abelian_scaffold(pointed_set(2))
    assert rep.sub_size == 3 and rep.mu.is_identity()


def test_abelian_scaffold_degenerate_and_precondition():
    assert verify_lemma_abelian_scaffold(pointed_set(1)).trivial
    with pytest.raises(PreconditionError):
        verify_lemma_abelian_scaffold(set_algebra(2))
