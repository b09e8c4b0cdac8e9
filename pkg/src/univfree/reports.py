"""JSON reports and the witness replay checker.

A report embeds the text of every algebra its witnesses mention, so it can be
re-checked on its own: :func:`replay_report` re-parses each algebra and each
prefix-form term and re-evaluates every witness.
"""
from __future__ import annotations

import json
import time

import numpy as np

from .algebra import FiniteAlgebra, Homomorphism, hom_violation
from .closure import evaluate, parse_term, term_str
from .congruence import Partition
from .fileformat import format_algebra, parse_algebra
from .free import IdentityWitness
from .obstruction import IndependenceWitness, PairWitness
from .termcond import MatrixWitness, PolynomialWitness


class Report:
    def __init__(self, command: str, **inputs):
        self.command = command
        self.inputs = dict(inputs)
        self.verdicts: dict = {}
        self.witnesses: list = []
        self.algebras: dict[str, str] = {}
        self._keys: dict[int, str] = {}
        self._alive: list = []
        self.timings: dict[str, float] = {}
        self._start = time.perf_counter()

    def algebra(self, A: FiniteAlgebra, key: str | None = None) -> str:
        if id(A) in self._keys:
            return self._keys[id(A)]
        key = key or f"A{len(self.algebras)}"
        self.algebras[key] = format_algebra(A)
        self._keys[id(A)] = key
        self._alive.append(A)  # keeps ids unique for the report's lifetime
        return key

    def witness(self, label: str, obj, **roles) -> dict | None:
        """Encode a witness object; ``roles`` name the algebras it lives in."""
        if obj is None:
            return None
        enc = encode_witness(obj, {k: self.algebra(v) for k, v in roles.items()}, roles)
        enc = {"label": label, **enc}
        self.witnesses.append(enc)
        return enc

    def to_dict(self) -> dict:
        self.timings.setdefault("total_seconds", round(time.perf_counter() - self._start, 6))
        return {
            "command": self.command,
            "inputs": self.inputs,
            "verdicts": self.verdicts,
            "witnesses": self.witnesses,
            "algebras": self.algebras,
            "timings": self.timings,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2, default=_plain)


def _plain(x):
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, Partition):
        return x.to_text()
    raise TypeError(f"not serializable: {type(x).__name__}")


def _ints(seq):
    return [int(v) for v in seq]


def encode_witness(obj, keys: dict, algebras: dict) -> dict:
    if isinstance(obj, MatrixWitness):
        A = algebras["algebra"]
        return {"kind": "term_condition", "algebra": keys["algebra"], "term": term_str(obj.term, A.signature),
                "columns": [_ints(c) for c in obj.columns], "values": _ints(obj.values), "roles": list(obj.roles)}
    if isinstance(obj, PairWitness):
        S = algebras["algebra"]
        return {"kind": "relation_pair", "algebra": keys["algebra"], "term": term_str(obj.term, S.signature),
                "generators": [_ints(g) for g in obj.generators], "pair": _ints(obj.pair)}
    if isinstance(obj, IndependenceWitness):
        S = algebras["algebra"]
        lhs, rhs = obj.identity()
        return {"kind": "independence", "variety": keys["variety"], "algebra": keys["algebra"],
                "term": term_str(obj.term, S.signature), "arity": obj.arity, "position": obj.position,
                "w": _ints(obj.w), "z": _ints(obj.z),
                "identity": [term_str(lhs, S.signature), term_str(rhs, S.signature)],
                "assignment": _ints(obj.assignment), "changed": _ints(obj.changed)}
    if isinstance(obj, IdentityWitness):
        sig = algebras["variety"].signature
        return {"kind": "identity", "variety": keys["variety"], "algebra": keys["algebra"],
                "left": term_str(obj.left, sig), "right": term_str(obj.right, sig), "n": obj.n,
                "assignment": _ints(obj.assignment)}
    if isinstance(obj, PolynomialWitness):
        A = algebras["algebra"]
        return {"kind": "polynomial", "algebra": keys["algebra"], "term": term_str(obj.term, A.signature),
                "table": _ints(obj.table)}
    if isinstance(obj, Homomorphism):
        return {"kind": "homomorphism", "source": keys["source"], "target": keys["target"],
                "mapping": _ints(obj.map), "injective": obj.is_injective(), "surjective": obj.is_surjective()}
    if isinstance(obj, tuple) and len(obj) == 4 and isinstance(obj[0], Partition):
        theta, op, args, other = obj
        A = algebras["algebra"]
        return {"kind": "congruence_violation", "algebra": keys["algebra"], "partition": theta.to_text(),
                "op": A.signature.names[op], "args": _ints(args), "other_args": _ints(other)}
    raise TypeError(f"no witness encoding for {type(obj).__name__}")


# --- replay -------------------------------------------------------------------------

def _table_value(A: FiniteAlgebra, op: int, args) -> int:
    idx = 0
    for a in args:
        idx = idx * A.size + int(a)
    return int(A.tables[op][idx])


def replay_witness(w: dict, algebras: dict[str, FiniteAlgebra]) -> bool:
    kind = w["kind"]
    if kind == "term_condition":
        A = algebras[w["algebra"]]
        t = parse_term(w["term"], A.signature)
        return all(evaluate(t, A, c) == v for c, v in zip(w["columns"], w["values"]))
    if kind == "relation_pair":
        S = algebras[w["algebra"]]
        return PairWitness(parse_term(w["term"], S.signature), [tuple(g) for g in w["generators"]],
                           tuple(w["pair"])).replay(S)
    if kind == "independence":
        V, S = algebras[w["variety"]], algebras[w["algebra"]]
        t = parse_term(w["term"], S.signature)
        wit = IndependenceWitness(t, w["arity"], w["position"], tuple(w["w"]), tuple(w["z"]),
                                  tuple(w["assignment"]), tuple(w["changed"]))
        lhs, rhs = (parse_term(x, S.signature) for x in w["identity"])
        return (wit.replay(V, S) and (lhs, rhs) == wit.identity())
    if kind == "identity":
        V, B = algebras[w["variety"]], algebras[w["algebra"]]
        wit = IdentityWitness(parse_term(w["left"], V.signature), parse_term(w["right"], V.signature),
                              w["n"], tuple(w["assignment"]))
        return wit.replay(V, B)
    if kind == "polynomial":
        A = algebras[w["algebra"]]
        return PolynomialWitness(parse_term(w["term"], A.signature), tuple(w["table"])).replay(A)
    if kind == "homomorphism":
        A, B = algebras[w["source"]], algebras[w["target"]]
        m = np.array(w["mapping"], dtype=np.int64)
        if hom_violation(A, B, m) is not None:
            return False
        return (len(set(m.tolist())) == A.size) == w["injective"] and \
               (len(set(m.tolist())) == B.size) == w["surjective"]
    if kind == "congruence_violation":
        A = algebras[w["algebra"]]
        theta = Partition.parse(w["partition"], A.size)
        op = A.signature.index(w["op"])
        related = all(theta.related(a, b) for a, b in zip(w["args"], w["other_args"]))
        images = (_table_value(A, op, w["args"]), _table_value(A, op, w["other_args"]))
        return related and not theta.related(*images)
    raise ValueError(f"unknown witness kind {kind!r}")


def replay_report(report: dict | str) -> tuple[int, list[str]]:
    """Re-check every witness; returns (number checked, labels that failed)."""
    if isinstance(report, str):
        report = json.loads(report)
    algebras = {k: parse_algebra(v) for k, v in report.get("algebras", {}).items()}
    failed = [w["label"] for w in report.get("witnesses", []) if not replay_witness(w, algebras)]
    return len(report.get("witnesses", [])), failed
