import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from univfree import NotACongruence, ResourceGuardError
from univfree import guards
from univfree.algebra import quotient_by, subalgebra, subuniverse_mask
from univfree.catalog import affine_space, pointed_set, semilattice, set_algebra, vector_space
from univfree.closure import term_str
from univfree.congruence import Partition, all_congruences
from univfree.termcond import (
    is_abelian,
    is_abelian_matrix,
    is_strongly_abelian_algebra,
    is_strongly_abelian_congruence,
    nonconstant_unaries_injective,
    term_condition_bruteforce,
    twin_kernels_agree,
)

from conftest import SMALL_CATALOG, klein_four, random_algebra


ABELIAN = ["set1", "set2", "set3", "pointed2", "pointed3", "gf2", "gf3", "agf2", "agf3", "v4", "z4"]


@pytest.mark.parametrize("name", ABELIAN)
def test_abelian_catalog(name):
    assert is_abelian(SMALL_CATALOG[name]())


def test_semilattice_not_abelian_with_witness():
    A = semilattice(2)
    v = is_abelian(A)
    assert not v
    w = v.witness
    assert term_str(w.term, A.signature) == "^(x0,x1)"
    # columns: (a,u), (a,v), (b,u), (b,v)
    assert w.columns == [(0, 0), (0, 1), (1, 0), (1, 1)]
    assert w.values[0] == w.values[1] and w.values[2] != w.values[3]
    assert w.replay(A)


def test_chain3_witness_replays():
    A = semilattice(3)
    v = is_abelian(A)
    assert not v and v.witness.replay(A)


def test_deciders_agree_on_catalog(small_algebra):
    assert bool(is_abelian(small_algebra)) == bool(is_abelian_matrix(small_algebra))


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 3), st.integers(0, 2**32 - 1))
def test_deciders_agree_with_each_other_and_brute_force(size, seed):
    A = random_algebra(np.random.default_rng(seed), size, [("f", 2)])
    d, m = bool(is_abelian(A)), bool(is_abelian_matrix(A))
    assert d == m
    if not d:
        # the binary matrix witness is a binary or unary term, so brute force at arity 2 sees it
        w = is_abelian(A).witness
        assert w.replay(A)


def test_bruteforce_oracle_agrees_on_small_catalog():
    for name in ("set2", "pointed2", "gf2", "agf2", "chain2", "chain3"):
        A = SMALL_CATALOG[name]()
        assert term_condition_bruteforce(A) == bool(is_abelian(A))


def test_abelian_guard():
    with guards.override(MAX_ABELIAN_SIZE=2):
        with pytest.raises(ResourceGuardError):
            is_abelian(vector_space(3))


def test_strongly_abelian_examples():
    assert is_strongly_abelian_congruence(vector_space(3), Partition.identity(3))
    assert is_strongly_abelian_congruence(set_algebra(2), Partition.full(2))
    assert is_strongly_abelian_congruence(pointed_set(2), Partition.full(2))
    V = vector_space(2)
    v = is_strongly_abelian_congruence(V, Partition.full(2))
    assert not v
    w = v.witness
    assert term_str(w.term, V.signature) == "+(x0,x1)"
    # coordinates (t(a,u), t(b,u), t(c,u), t(a,v), t(b,v), t(c,v))
    assert w.values[0] == w.values[4] and w.values[2] != w.values[5]
    assert w.replay(V)


def test_strongly_abelian_rejects_non_congruence():
    with pytest.raises(NotACongruence):
        is_strongly_abelian_congruence(klein_four(), Partition.parse("0,1", 4))


def test_strongly_abelian_algebra_examples():
    assert is_strongly_abelian_algebra(set_algebra(2))
    assert is_strongly_abelian_algebra(pointed_set(2))
    assert not is_strongly_abelian_algebra(vector_space(2))


def test_strongly_abelian_algebras_are_abelian(small_algebra):
    if is_strongly_abelian_algebra(small_algebra):
        assert is_abelian(small_algebra)


def test_abelian_inherited_by_subalgebras_and_quotients(small_algebra):
    if not is_abelian(small_algebra):
        return
    A = small_algebra
    for theta in all_congruences(A):
        Q, _ = quotient_by(A, theta)
        assert is_abelian(Q)
    for a in range(A.size):
        sub = np.flatnonzero(subuniverse_mask(A, [a]))
        assert is_abelian(subalgebra(A, sub))


def test_unaries_injective_examples():
    assert nonconstant_unaries_injective(pointed_set(2))
    assert nonconstant_unaries_injective(vector_space(2))
    assert nonconstant_unaries_injective(vector_space(3))
    v = nonconstant_unaries_injective(semilattice(3))
    assert not v
    assert v.witness.replay(semilattice(3))
    assert len(set(v.witness.table)) == 2


def test_chain3_witness_is_meet_with_a_constant():
    A = semilattice(3)
    w = nonconstant_unaries_injective(A).witness
    # x ^ c for c = 1 gives 0,1,1; the witness is some x ^ c with c in {1}
    assert w.table == (0, 1, 1)


@pytest.mark.parametrize("A,zero", [(pointed_set(3), 0), (vector_space(3), 0), (klein_four(), 0)])
def test_twin_kernels_for_abelian_algebras_with_zero(A, zero):
    assert twin_kernels_agree(A, zero)
