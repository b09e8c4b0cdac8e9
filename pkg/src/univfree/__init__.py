"""univfree: finite algebras, clones, congruences, term conditions and free algebras."""
from .algebra import (
    FiniteAlgebra,
    Homomorphism,
    Operation,
    Signature,
    find_surjective_hom,
    is_isomorphic,
    matrix_power,
    min_generating_size,
    product,
    quotient_by,
    subalgebra,
)
from .catalog import (
    CatalogSpec,
    affine_space,
    build,
    build_semiprojection_expansion,
    classify,
    clone_count_formula,
    pointed_set,
    semilattice,
    set_algebra,
    vector_space,
    verify_smallfree,
)
from .closure import App, GeneratedSet, Var, clone_table, generate_subuniverse, joint_generation, unary_polynomials
from .congruence import Partition, all_congruences, atoms, cg_pairs, coatoms, is_congruence, sd_meet_failure
from .errors import AlgebraError, NotACongruence, PreconditionError, ResourceGuardError, SignatureMismatch
from .fileformat import format_algebra, parse_algebra
from .free import (
    free_algebra,
    g_spectrum,
    is_free_in,
    kernels_of_variable_collapse,
    variety_membership,
    verify_lemma_freely,
)
from .obstruction import (
    graph_algebra,
    independence_condition_check,
    order_quotient,
    property_p_holds,
    s_construction,
    verify_affine_obstruction,
    verify_lemma_abelian_scaffold,
)
from .termcond import (
    is_abelian,
    is_abelian_matrix,
    is_strongly_abelian_congruence,
    nonconstant_unaries_injective,
)

__version__ = "0.1.0"
