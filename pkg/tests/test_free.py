import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from univfree import FiniteAlgebra, PreconditionError
from univfree.algebra import greedy_generating_set, hom_violation, is_isomorphic, product, quotient_by
from univfree.catalog import affine_space, matrix_power, pointed_set, semilattice, set_algebra, vector_space
from univfree.closure import clone_table, term_str
from univfree.congruence import all_congruences
from univfree.free import (
    extend_to_hom,
    free_algebra,
    free_hom,
    g_spectrum,
    in_variety,
    is_free_in,
    kernels_of_variable_collapse,
    quotient_types,
    variety_membership,
    verify_lemma_3coatoms,
    verify_lemma_freely,
    verify_lemma_injective,
)

from conftest import fake_gf2, klein_four, random_algebra

GOOD = {
    "set2": lambda: set_algebra(2),
    "pointed2": lambda: pointed_set(2),
    "gf2": lambda: vector_space(2),
    "agf2": lambda: affine_space(2),
}


def test_free_algebra_examples():
    assert free_algebra(pointed_set(2), 2).size == 3
    assert free_algebra(set_algebra(2), 3).size == 3
    assert free_algebra(affine_space(2), 3).size == 4


def test_empty_free_algebra():
    F = free_algebra(set_algebra(2), 0)
    assert F.empty and F.size == 0 and F.algebra is None
    assert free_algebra(pointed_set(2), 0).size == 1


@pytest.mark.parametrize("name", sorted(GOOD) + ["chain2"])
def test_free_size_equals_clone_size(name):
    A = GOOD[name]() if name in GOOD else semilattice(2)
    for n in range(1, 5):
        assert free_algebra(A, n).size == len(clone_table(A, n))


def test_free_generators_generate():
    from univfree.algebra import generates

    F = free_algebra(vector_space(3), 2)
    assert generates(F.algebra, F.generators)
    assert term_str(F.term(F.generators[1]), vector_space(3).signature) == "x1"


def test_membership_examples():
    assert variety_membership(set_algebra(3), set_algebra(2))
    assert variety_membership(klein_four(), vector_space(2))
    m = variety_membership(fake_gf2(), vector_space(2))
    assert not m
    w = m.witness
    assert w.replay(vector_space(2), fake_gf2())


def test_membership_identity_witness_is_x_plus_x():
    V = vector_space(2)
    w = in_variety(fake_gf2(), V).witness
    sig = V.signature
    # the violated identity, up to the choice of generator, is x + x = 0
    assert {term_str(w.left, sig), term_str(w.right, sig)} == {"0", "+(x0,x0)"}
    assert w.replay(V, fake_gf2())


CANDIDATES = [
    (set_algebra(3), set_algebra(2)),
    (klein_four(), vector_space(2)),
    (fake_gf2(), vector_space(2)),
    (semilattice(3), semilattice(2)),
    (pointed_set(3), pointed_set(2)),
    (vector_space(2), FiniteAlgebra.from_ops(2, {"+": (2, [0, 1, 1, 1]), "0": (0, [0])})),
]


@pytest.mark.parametrize("B,A", CANDIDATES)
def test_generating_set_membership_equals_full_membership(B, A):
    full = variety_membership(B, A)
    fast = variety_membership(B, A, greedy_generating_set(B))
    assert bool(full) == bool(fast)
    for m in (full, fast):
        if not m:
            assert m.witness.replay(A, B)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_generating_set_membership_equals_full_membership_random(seed):
    rng = np.random.default_rng(seed)
    A = random_algebra(rng, 2, [("f", 2)])
    B = random_algebra(rng, 3, [("f", 2)])
    assert bool(variety_membership(B, A)) == bool(in_variety(B, A))


def test_is_free_examples():
    assert is_free_in(pointed_set(3), pointed_set(2)).rank == 2
    fr = is_free_in(klein_four(), vector_space(2))
    assert fr.rank == 2 and fr.isomorphism.is_injective()
    assert is_free_in(semilattice(2), semilattice(2)) is None


def test_is_free_requires_membership():
    with pytest.raises(PreconditionError) as e:
        is_free_in(fake_gf2(), vector_space(2))
    assert e.value.witness.replay(vector_space(2), fake_gf2())


def test_semilattice_free_sizes_leave_two_out():
    sizes = [free_algebra(semilattice(2), n).size for n in range(1, 4)]
    assert sizes == [1, 3, 7]


@pytest.mark.parametrize("name,n", [("set2", 3), ("pointed2", 3), ("gf2", 2), ("agf2", 2)])
def test_quotients_of_free_algebras_are_free(name, n):
    A = GOOD[name]()
    F = free_algebra(A, n).algebra
    for theta in all_congruences(F):
        Q, _ = quotient_by(F, theta)
        fr = is_free_in(Q, A)
        assert fr is not None
        assert len(fr.size_matches) == 1


@pytest.mark.parametrize("A,n,expected_sizes", [
    (pointed_set(2), 2, [1, 2, 3]),
    (set_algebra(2), 3, [1, 2, 3]),
    (vector_space(2), 2, [1, 2, 4]),
])
def test_spectrum_examples(A, n, expected_sizes):
    rep = g_spectrum(A, n)
    assert rep.count == len(expected_sizes)
    assert [t.size for t in rep.types] == expected_sizes
    assert rep.all_free


def test_spectrum_monotone():
    for A in (set_algebra(2), pointed_set(2), vector_space(2)):
        G = [g_spectrum(A, n).count for n in range(1, 4)]
        assert G == sorted(G)


def test_spectrum_gf2_sizes_are_powers_of_two():
    rep = g_spectrum(vector_space(2), 3)
    assert [t.size for t in rep.types] == [1, 2, 4, 8]
    assert [free_algebra(vector_space(2), n).size for n in range(4)] == [1, 2, 4, 8]


def test_spectrum_rank_zero_without_constants_is_empty():
    assert g_spectrum(set_algebra(2), 0).count == 0


def test_kernels_examples():
    r = kernels_of_variable_collapse(pointed_set(2), 2)
    assert r.case == "pointed" and r.distinct and r.distinct_count == 3
    assert len(set(r.restrictions)) == 3
    r = kernels_of_variable_collapse(set_algebra(2), 3)
    assert r.case == "idempotent" and r.distinct and r.distinct_count == 3
    r = kernels_of_variable_collapse(set_algebra(2), 1)
    assert not r.applicable and r.distinct is None


def test_kernels_sets_rank_two_maps_are_isomorphisms():
    # with m = 2 the two maps e_1, e_2 : F(2) -> F(2) are bijections, so both kernels are trivial
    r = kernels_of_variable_collapse(set_algebra(2), 2)
    assert len(r.maps) == 2
    assert all(h.is_injective() for h in r.maps)
    assert r.distinct_count == 1


def test_kernels_pointed_rank_three():
    r = kernels_of_variable_collapse(pointed_set(2), 3)
    assert r.distinct and r.distinct_count == 3


def test_collapse_maps_are_homomorphisms():
    for A in (pointed_set(2), vector_space(2)):
        for h in kernels_of_variable_collapse(A, 3).maps:
            assert hom_violation(h.source, h.target, h.map) is None


@pytest.mark.parametrize("A,Bs", [
    (pointed_set(2), [pointed_set(2), pointed_set(3), pointed_set(4)]),
    (vector_space(2), [vector_space(2), klein_four()]),
    (set_algebra(2), [set_algebra(3), set_algebra(4)]),
])
def test_universal_mapping_property(A, Bs):
    for n in (1, 2):
        F = free_algebra(A, n)
        for B in Bs:
            for images in itertools.product(range(B.size), repeat=n):
                h = extend_to_hom(F.algebra, F.generators, B, list(images))
                assert h is not None
                assert [h(g) for g in F.generators] == list(images)


def test_extension_fails_outside_the_variety():
    F = free_algebra(vector_space(2), 1)
    assert extend_to_hom(F.algebra, F.generators, fake_gf2(), [1]) is None


def test_free_hom_matches_extension():
    A = vector_space(3)
    F2, F1 = free_algebra(A, 2), free_algebra(A, 1)
    x = F1.generators[0]
    h = free_hom(F2, F1, [x, x])
    g = extend_to_hom(F2.algebra, F2.generators, F1.algebra, [x, x])
    assert list(h.map) == list(g.map)


def test_lemma_freely_examples():
    A = pointed_set(2)
    rep = verify_lemma_freely(A, free_algebra(A, 3).algebra)
    assert rep.passed and len(rep.checked) == 3
    rep = verify_lemma_freely(vector_space(2), klein_four())
    assert rep.passed
    rep = verify_lemma_freely(pointed_set(2), pointed_set(1))
    assert rep.passed and rep.checked == []


def test_lemma_3coatoms():
    for A in (pointed_set(2), vector_space(2), vector_space(3)):
        assert verify_lemma_3coatoms(A, 3 if A.size == 2 else 2).passed
    with pytest.raises(PreconditionError):
        verify_lemma_3coatoms(set_algebra(2))


def test_lemma_injective():
    assert verify_lemma_injective(pointed_set(2))
    assert verify_lemma_injective(vector_space(3))


def test_quotient_types_deduplicate():
    types = quotient_types(free_algebra(vector_space(2), 2).algebra)
    assert [Q.size for Q, _ in types] == [1, 2, 4]
