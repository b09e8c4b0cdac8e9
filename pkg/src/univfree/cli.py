"""Command-line front end.

Exit codes: 0 a verdict was computed (even a negative one), 1 usage or parse
error, 2 a resource guard was exceeded, 3 a mathematical precondition failed.
"""
from __future__ import annotations

import argparse
import sys

from . import guards
from .algebra import FiniteAlgebra
from .catalog import CatalogSpec, build, classify, verify_smallfree
from .closure import clone_table, term_str
from .congruence import (
    Partition,
    all_congruences,
    atoms,
    coatoms,
    congruence_violation,
    is_simple,
    sd_meet_failure,
)
from .errors import AlgebraError, NotACongruence, PreconditionError, ResourceGuardError
from .fileformat import format_algebra, read_algebra
from .free import (
    free_algebra,
    g_spectrum,
    in_variety,
    is_free_in,
    verify_lemma_3coatoms,
    verify_lemma_freely,
    verify_lemma_injective,
)
from .obstruction import verify_affine_obstruction, verify_lemma_abelian_scaffold
from .reports import Report
from .termcond import is_abelian, is_strongly_abelian_congruence

EPILOG = (
    "Environment: UNIVFREE_GUARD_SCALE=<int> multiplies every resource guard "
    "(" + ", ".join(sorted(guards.DEFAULTS)) + ")."
)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _theta(A: FiniteAlgebra, text: str | None) -> Partition:
    return Partition.full(A.size) if text is None else Partition.parse(text, A.size)


def _require_congruence(A, theta, report):
    bad = congruence_violation(A, theta)
    if bad is not None:
        report.verdicts["theta_congruence"] = False
        report.witness("theta_not_a_congruence", (theta,) + tuple(bad), algebra=A)
        raise PreconditionError("theta is not a congruence", report)


# --- commands -----------------------------------------------------------------------

def cmd_info(args, out):
    A = read_algebra(args.file)
    r = Report("info", file=args.file)
    r.verdicts.update({
        "name": A.name,
        "size": A.size,
        "signature": [[n, a] for n, a in A.signature],
        "idempotent": A.is_idempotent(),
        "simple": is_simple(A),
        "constants": A.constants(),
    })
    return r


def cmd_con(args, out):
    A = read_algebra(args.file)
    r = Report("con", file=args.file)
    lat = all_congruences(A)
    r.verdicts["count"] = len(lat)
    r.verdicts["congruences"] = [t.to_text() for t in lat]
    if args.coatoms:
        r.verdicts["coatoms"] = [t.to_text() for t in coatoms(lat)]
    if args.atoms:
        r.verdicts["atoms"] = [t.to_text() for t in atoms(lat)]
    if args.sdmeet:
        f = sd_meet_failure(lat)
        r.verdicts["sd_meet_holds"] = f is None
        r.verdicts["sd_meet_failure"] = None if f is None else [t.to_text() for t in f]
    return r


def cmd_abelian(args, out):
    A = read_algebra(args.file)
    r = Report("abelian", file=args.file)
    v = is_abelian(A)
    r.verdicts["abelian"] = v.holds
    r.witness("term_condition_failure", v.witness, algebra=A)
    return r


def cmd_strongly_abelian(args, out):
    A = read_algebra(args.file)
    theta = _theta(A, args.theta)
    r = Report("strongly-abelian", file=args.file, theta=theta.to_text())
    _require_congruence(A, theta, r)
    v = is_strongly_abelian_congruence(A, theta)
    r.verdicts["strongly_abelian"] = v.holds
    r.witness("strong_term_condition_failure", v.witness, algebra=A)
    return r


def cmd_obstruction(args, out):
    A = read_algebra(args.file)
    V = read_algebra(args.variety) if args.variety else A
    theta = _theta(A, args.theta)
    r = Report("obstruction", file=args.file, variety=args.variety or args.file,
               theta=theta.to_text(), arity=args.arity)
    _require_congruence(A, theta, r)
    rep = verify_affine_obstruction(V, A, theta, args.arity)
    _obstruction_verdicts(r, rep, V, A)
    return r


def _obstruction_verdicts(r: Report, rep, V, A, prefix=""):
    r.verdicts[prefix + "preconditions"] = rep.preconditions
    r.verdicts[prefix + "failed_precondition"] = rep.failed_precondition
    r.verdicts[prefix + "arity_bound"] = rep.arity_bound
    if rep.precondition_witness is not None:
        r.witness(prefix + "precondition", rep.precondition_witness, algebra=A)
    if rep.S is None:
        r.verdicts[prefix + "obstruction"] = False
        return
    r.algebra(rep.S, prefix + "S")
    r.verdicts[prefix + "S_size"] = rep.S.size
    r.verdicts[prefix + "zero"] = rep.zero
    items = {}
    for name, it in rep.items.items():
        entry = {"passed": it.passed}
        if name == "5" and it.witness is not None:
            oq = it.witness
            entry.update({"sigma": oq.sigma.to_text(), "order": oq.order.pairs(),
                          "degenerate": oq.degenerate, "checks": oq.checks})
        elif name == "4":
            entry["arity_bound"] = it.info["arity_bound"]
            if it.witness is not None:
                r.witness(prefix + "item4", it.witness, variety=V, algebra=rep.S)
        elif name == "3" and it.witness is not None:
            r.witness(prefix + "item3", it.witness, algebra=rep.S)
        items[name] = entry
    r.verdicts[prefix + "items"] = items
    r.verdicts[prefix + "obstruction"] = rep.passed


def cmd_free(args, out):
    A = read_algebra(args.file)
    F = free_algebra(A, args.n)
    r = Report("free", file=args.file, n=args.n)
    r.verdicts["empty"] = F.empty
    r.verdicts["size"] = F.size
    if not F.empty:
        r.algebra(F.algebra, "F")
        r.verdicts["generators"] = F.generators
        r.verdicts["terms"] = [_term(F.term(i), A) for i in range(F.size)]
    return r


def _term(t, A):
    return term_str(t, A.signature)


def cmd_member(args, out):
    B, A = read_algebra(args.file), read_algebra(args.generator)
    r = Report("member", file=args.file, generator=args.generator)
    m = in_variety(B, A)
    r.verdicts["member"] = m.holds
    r.verdicts["generators_used"] = m.generators
    r.witness("violated_identity", m.witness, variety=A, algebra=B)
    return r


def cmd_is_free(args, out):
    B, A = read_algebra(args.file), read_algebra(args.generator)
    r = Report("is-free", file=args.file, generator=args.generator)
    m = in_variety(B, A)
    if not m:
        r.verdicts["member"] = False
        r.witness("violated_identity", m.witness, variety=A, algebra=B)
        raise PreconditionError("the algebra is not in the variety", r)
    fr = is_free_in(B, A)
    r.verdicts["free"] = fr is not None
    r.verdicts["rank"] = None if fr is None else fr.rank
    r.verdicts["ranks_with_matching_size"] = None if fr is None else fr.size_matches
    if fr is not None:
        F = free_algebra(A, fr.rank).algebra
        r.witness("isomorphism", fr.isomorphism, source=B, target=F)
    return r


def cmd_spectrum(args, out):
    A = read_algebra(args.generator)
    r = Report("spectrum", generator=args.generator, n=args.n)
    rep = g_spectrum(A, args.n)
    r.verdicts["G"] = rep.count
    r.verdicts["all_free"] = rep.all_free
    r.verdicts["types"] = [{"size": t.size, "congruence": t.congruence.to_text(), "free_rank": t.free_rank,
                            "min_generators": t.min_generators} for t in rep.types]
    return r


def cmd_clone(args, out):
    A = read_algebra(args.generator)
    r = Report("clone", generator=args.generator, n=args.n)
    cl = clone_table(A, args.n)
    r.verdicts["count"] = len(cl)
    if not args.count_only:
        r.verdicts["operations"] = [{"term": _term(cl.term(i), A), "table": [int(v) for v in cl.rows[i]]}
                                    for i in range(len(cl))]
    return r


def parse_spec(tokens: list[str]) -> tuple[CatalogSpec, list[str]]:
    """``KIND PARAMS`` -> spec; nested kinds read their inner spec first."""
    if not tokens:
        raise UsageError("build: missing KIND")
    kind, rest = tokens[0], tokens[1:]

    def num(what):
        if not rest:
            raise UsageError(f"build {kind}: missing {what}")
        try:
            return int(rest.pop(0))
        except ValueError:
            raise UsageError(f"build {kind}: {what} must be an integer") from None

    if kind in ("set", "pointed_set", "semilattice"):
        return CatalogSpec(kind, k=num("K")), rest
    if kind in ("vector_space", "affine_space"):
        return CatalogSpec(kind, p=num("P")), rest
    if kind == "matrix_power":
        inner, rest = parse_spec(rest)
        return CatalogSpec(kind, d=num("D"), inner=inner), rest
    if kind == "semiprojection_expansion":
        inner, rest = parse_spec(rest)
        m = num("M")
        variant = rest.pop(0) if rest else "projection"
        return CatalogSpec(kind, m=m, variant=variant, inner=inner), rest
    raise UsageError(f"build: unknown kind {kind!r}")


def cmd_build(args, out):
    spec, extra = parse_spec([args.kind] + args.params)
    if extra:
        raise UsageError(f"build: unexpected parameters {extra}")
    text = format_algebra(build(spec))
    if args.output and args.output != "-":
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        out.write(text)
    return None


def cmd_classify(args, out):
    A = read_algebra(args.file)
    r = Report("classify", file=args.file, arity=args.arity)
    c = classify(A, args.arity)
    r.verdicts["kind"] = c.kind
    r.verdicts["verdict"] = str(c)
    r.verdicts["field_size"] = c.field_size
    r.verdicts["constant_realization"] = c.constant
    r.verdicts["verified_arity"] = c.verified_arity
    r.verdicts["notes"] = c.notes
    if c.scalar_structure is not None:
        s = c.scalar_structure
        r.verdicts["zero"] = s.zero
        r.verdicts["addition"] = s.addition.tolist()
        r.verdicts["scalars"] = [list(x) for x in s.scalars]
    return r


LEMMAS = ("nonaffine", "3coatoms", "freely", "abelian-scaffold", "injective", "smallfree")
_NONAFFINE_SUITE = [CatalogSpec("set", k=2), CatalogSpec("pointed_set", k=2), CatalogSpec("set", k=3)]


def cmd_verify(args, out):
    lemma, params = args.lemma, args.params
    r = Report("verify", lemma=lemma, params=params)

    def gen(i=0):
        if len(params) <= i:
            raise UsageError(f"verify {lemma}: missing algebra file")
        return read_algebra(params[i])

    if lemma == "smallfree":
        n = int(params[0]) if params else 2
        rep = verify_smallfree(n)
        r.algebra(rep.B, "B")
        r.algebra(rep.A, "A")
        r.verdicts.update({
            "n": n, "m": rep.m,
            "forced_first_projection": {str(j): {"candidates": c, "all_first_projection": ok}
                                        for j, (c, ok) in rep.forced_projection.items()},
            "surjective_hom_exists": rep.surjective_hom is not None,
            "B_free": False if rep.surjective_hom is None else None,
            "passed": rep.passed,
            "summary": "B not free; no surjective hom" if rep.passed else "lemma check failed",
        })
        if rep.surjective_hom is not None:
            r.witness("surjective_hom", rep.surjective_hom, source=rep.B, target=rep.A)
    elif lemma == "nonaffine":
        cases = ([(read_algebra(p), p) for p in params] if params
                 else [(build(s), str(s)) for s in _NONAFFINE_SUITE])
        results = []
        for k, (A, label) in enumerate(cases):
            theta = _theta(A, args.theta)
            rep = verify_affine_obstruction(A, A, theta, args.arity)
            sub = Report("sub")
            _obstruction_verdicts(sub, rep, A, A)
            for key, text in sub.algebras.items():
                r.algebras[f"c{k}_{key}"] = text
            for w in sub.witnesses:
                w = dict(w)
                for role in ("algebra", "variety", "source", "target"):
                    if role in w:
                        w[role] = f"c{k}_{w[role]}"
                w["label"] = f"{label}:{w['label']}"
                r.witnesses.append(w)
            results.append({"case": label, "theta": theta.to_text(), **sub.verdicts})
        r.verdicts["cases"] = results
        r.verdicts["passed"] = all(c["obstruction"] for c in results)
    elif lemma == "3coatoms":
        rep = verify_lemma_3coatoms(gen(), int(params[1]) if len(params) > 1 else 3)
        r.verdicts.update({"F0_size": rep.empty_free_size, "F1_simple": rep.f1_simple,
                           "coatoms": {str(m): c for m, c in rep.coatoms.items()}, "passed": rep.passed})
    elif lemma == "freely":
        A = gen()
        B = read_algebra(params[1]) if len(params) > 1 else free_algebra(A, 2).algebra
        rep = verify_lemma_freely(A, B)
        r.verdicts.update({"F1_simple": rep.simple_f1, "checked": [[b, ok] for b, ok in rep.checked],
                           "passed": rep.passed})
    elif lemma == "abelian-scaffold":
        rep = verify_lemma_abelian_scaffold(gen())
        r.verdicts.update({
            "free_size": rep.free_size, "trivial": rep.trivial, "subalgebra_size": rep.sub_size,
            "eta_is_principal": rep.eta_is_principal, "mu": None if rep.mu is None else rep.mu.to_text(),
            "coatoms": rep.coatom_count,
            "sd_meet_failure": None if rep.sd_failure is None else [t.to_text() for t in rep.sd_failure],
            "free_abelian": rep.free_abelian, "passed": rep.passed,
        })
    elif lemma == "injective":
        A = gen()
        v = verify_lemma_injective(A)
        r.verdicts["passed"] = v.holds
        r.witness("noninjective_polynomial", v.witness, algebra=free_algebra(A, 1).algebra)
    return r


# --- parser ----------------------------------------------------------------------------

def make_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="univfree", description="Finite universal-algebra workbench.", epilog=EPILOG)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, func, help_):
        sp = sub.add_parser(name, help=help_, description=help_, epilog=EPILOG)
        sp.set_defaults(func=func)
        return sp

    sp = add("info", cmd_info, "size, signature, idempotency and simplicity")
    sp.add_argument("file")
    sp = add("con", cmd_con, "congruence lattice")
    sp.add_argument("file")
    sp.add_argument("--coatoms", action="store_true")
    sp.add_argument("--atoms", action="store_true")
    sp.add_argument("--sdmeet", action="store_true", help="search for a meet-semidistributivity failure")
    sp = add("abelian", cmd_abelian, "term-condition abelianness")
    sp.add_argument("file")
    sp = add("strongly-abelian", cmd_strongly_abelian, "strong term condition for a congruence")
    sp.add_argument("file")
    sp.add_argument("--theta", required=True, help='blocks, e.g. "0,1|2"')
    sp = add("obstruction", cmd_obstruction, "the five properties of S = A(theta)/Delta")
    sp.add_argument("file")
    sp.add_argument("--theta", required=True, help='blocks, e.g. "0,1|2"')
    sp.add_argument("--arity", type=int, default=3, help="term arity bound for item (4)")
    sp.add_argument("--variety", help="generator of the variety (default: FILE itself)")
    sp = add("free", cmd_free, "the free algebra F(n) of the variety generated by FILE")
    sp.add_argument("file")
    sp.add_argument("--n", type=int, required=True)
    sp = add("member", cmd_member, "is FILE in the variety generated by GENFILE")
    sp.add_argument("file")
    sp.add_argument("generator")
    sp = add("is-free", cmd_is_free, "is FILE free in the variety generated by GENFILE")
    sp.add_argument("file")
    sp.add_argument("generator")
    sp = add("spectrum", cmd_spectrum, "isomorphism types of quotients of F(n)")
    sp.add_argument("generator")
    sp.add_argument("--n", type=int, required=True)
    sp = add("clone", cmd_clone, "n-ary term operations")
    sp.add_argument("generator")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--count-only", action="store_true")
    sp = add("build", cmd_build, "write a catalog algebra (KIND: set, pointed_set, vector_space, "
             "affine_space, semilattice, matrix_power INNER D, semiprojection_expansion INNER M VARIANT)")
    sp.add_argument("kind")
    sp.add_argument("params", nargs="*")
    sp.add_argument("-o", "--output")
    sp = add("classify", cmd_classify, "sets, pointed sets, vector space, affine space or unclassified")
    sp.add_argument("file")
    sp.add_argument("--arity", type=int, default=3)
    sp = add("verify", cmd_verify, "replay a lemma at desk scale")
    sp.add_argument("lemma", choices=LEMMAS)
    sp.add_argument("params", nargs="*")
    sp.add_argument("--theta", help="blocks for nonaffine (default: full relation)")
    sp.add_argument("--arity", type=int, default=3)
    return p


def main(argv=None, stdout=None, stderr=None) -> int:
    out = stdout or sys.stdout
    err = stderr or sys.stderr
    report = None
    try:
        args = make_parser().parse_args(argv)
        report = args.func(args, out)
    except UsageError as e:
        print(e, file=err)
        return 1
    except ResourceGuardError as e:
        print(f"resource guard {e.guard}: {e}", file=err)
        return 2
    except (PreconditionError, NotACongruence) as e:
        print(f"precondition failed: {e}", file=err)
        if isinstance(getattr(e, "witness", None), Report):
            out.write(e.witness.dumps() + "\n")
        return 3
    except (AlgebraError, OSError, ValueError) as e:
        print(f"error: {e}", file=err)
        return 1
    if report is not None:
        out.write(report.dumps() + "\n")
    return 0


def main_entry():
    sys.exit(main())
