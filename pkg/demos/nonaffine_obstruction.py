"""Walk through the S = A(theta)/Delta construction for a small strongly abelian algebra.

    python3 demos/nonaffine_obstruction.py [set|pointed_set] [K]
"""
import argparse

from univfree.catalog import pointed_set, set_algebra, vector_space
from univfree.closure import term_str
from univfree.congruence import Partition
from univfree.obstruction import property_p_holds, s_construction, verify_affine_obstruction


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("kind", nargs="?", default="set", choices=["set", "pointed_set"])
    ap.add_argument("k", nargs="?", type=int, default=2)
    args = ap.parse_args()

    A = set_algebra(args.k) if args.kind == "set" else pointed_set(args.k)
    theta = Partition.full(A.size)
    sc = s_construction(A, theta)
    print(f"A = {A.name}, theta = {theta.to_text()}")
    print(f"A(theta) has {sc.graph.algebra.size} elements; Delta has {len(sc.delta.blocks())} blocks")
    print(f"S has {sc.S.size} elements, zero = {sc.zero}")

    rep = verify_affine_obstruction(A, A, theta, 3)
    for name, item in rep.items.items():
        print(f"  item ({name}): {'holds' if item.passed else 'fails'}")
    oq = rep.items["5"].witness
    print(f"  order on S/sigma: {oq.order.pairs()}")

    V = vector_space(2)
    p = property_p_holds(V, 0)
    t = p.witness
    print(f"\nControl: GF(2) fails Property P; term {term_str(t.term, V.signature)} "
          f"on generators {t.generators} reaches {t.pair}")


if __name__ == "__main__":
    main()
