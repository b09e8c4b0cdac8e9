"""Free algebra sizes and G-spectra for the catalog generators."""
from univfree.catalog import affine_space, pointed_set, semilattice, set_algebra, vector_space
from univfree.free import free_algebra, g_spectrum


def main():
    gens = [set_algebra(2), pointed_set(2), vector_space(2), affine_space(3), semilattice(2)]
    print(f"{'generator':<10} {'|F(1..3)|':<16} G(1..3)")
    for A in gens:
        sizes = [free_algebra(A, n).size for n in (1, 2, 3)]
        spectrum = [g_spectrum(A, n).count for n in (1, 2, 3)]
        print(f"{A.name:<10} {str(sizes):<16} {spectrum}")
    rep = g_spectrum(semilattice(2), 2)
    nonfree = [t for t in rep.types if t.free_rank is None]
    print(f"\nnon-free 2-generated semilattices: sizes {[t.size for t in nonfree]}")


if __name__ == "__main__":
    main()
