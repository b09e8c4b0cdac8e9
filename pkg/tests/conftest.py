import sys
import numpy as np
import pytest

from univfree import FiniteAlgebra
from univfree.algebra import product
from univfree.catalog import affine_space, pointed_set, semilattice, set_algebra, vector_space


def klein_four():
    return product(vector_space(2), vector_space(2), "V4")


def z4():
    return FiniteAlgebra.from_ops(
        4, {"+": (2, [(a + b) % 4 for a in range(4) for b in range(4)]), "0": (0, [0])}, "Z4"
    )


def join_semilattice(k=2):
    return FiniteAlgebra.from_ops(k, {"^": (2, [max(a, b) for a in range(k) for b in range(k)])}, f"join{k}")


def fake_gf2():
    """({0,1}; meet in the "+" slot, constant 0): same signature as GF(2), not in its variety."""
    return FiniteAlgebra(2, [("+", 2), ("0", 0)], [[0, 0, 0, 1], [0]], "meet0")


SMALL_CATALOG = {
    "set1": lambda: set_algebra(1),
    "set2": lambda: set_algebra(2),
    "set3": lambda: set_algebra(3),
    "pointed2": lambda: pointed_set(2),
    "pointed3": lambda: pointed_set(3),
    "gf2": lambda: vector_space(2),
    "gf3": lambda: vector_space(3),
    "agf2": lambda: affine_space(2),
    "agf3": lambda: affine_space(3),
    "chain2": lambda: semilattice(2),
    "chain3": lambda: semilattice(3),
    "v4": klein_four,
    "z4": z4,
}


@pytest.fixture(params=sorted(SMALL_CATALOG))
def small_algebra(request):
    return SMALL_CATALOG[request.param]()


def random_algebra(rng, size, symbols):
    tables = [rng.integers(0, size, size**r) for _, r in symbols]
    return FiniteAlgebra(size, symbols, tables, "rand")


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)
