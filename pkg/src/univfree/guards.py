"""Resource guards.

Every guard is a named constant.  ``UNIVFREE_GUARD_SCALE`` (an integer
environment variable) multiplies all of them; :func:`override` changes one
temporarily, which is how tests provoke guard errors.
"""
import contextlib
import os

from .errors import ResourceGuardError

DEFAULTS = {
    # length of a function table |A|^n materialized by clone_table / free_algebra
    "MAX_CLONE_TABLE": 2**20,
    # |A| for unary_polynomials (tables of length |A| in A^A)
    "MAX_POL1_SIZE": 2**10,
    # |A| for all_congruences
    "MAX_CON_SIZE": 12,
    # |A| for the abelianness deciders
    "MAX_ABELIAN_SIZE": 16,
    # number of elements any single generation run may produce
    "MAX_GENERATED": 300_000,
    # universe size of products and matrix powers
    "MAX_PRODUCT_SIZE": 2**16,
    # |A| for classify
    "MAX_CLASSIFY_SIZE": 9,
    # candidate count for exhaustive table / map enumerations
    "MAX_ENUMERATION": 2**20,
}

_scale = int(os.environ.get("UNIVFREE_GUARD_SCALE", "1") or 1)
LIMITS = {name: value * _scale for name, value in DEFAULTS.items()}


def limit(name):
    return LIMITS[name]


def check(name, value):
    if value > LIMITS[name]:
        raise ResourceGuardError(name, value, LIMITS[name])


@contextlib.contextmanager
def override(**limits):
    saved = {k: LIMITS[k] for k in limits}
    LIMITS.update(limits)
    try:
        yield
    finally:
        LIMITS.update(saved)
