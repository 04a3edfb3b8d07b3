"""Compare the quadratic relations with the flatness condition dB ^ dB = 0
over several kinds of correlator families.

    python3 scripts/commutativity_demo.py --order 4
"""

import argparse

from permutohedral import correlators as corr


def families(n):
    yield "commuting", corr.random_commuting_family(0, 3, 3, n)
    yield "block diagonal", corr.block_diagonal_family(0, n)
    yield "odd indices", corr.random_commutative_valued_family(0, corr.SuperIndexSet(["a", "t", "u"], [0, 1, 1]), 2, n)
    yield "super fibre", corr.supercommutative_family(0, n)
    yield "random", corr.random_family(0, corr.SuperIndexSet.even([1, 2]), corr.FSpace(3), n)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--order", type=int, default=4)
    args = ap.parse_args()
    print(f"{'family':16s} relations  dB^dB=0  round trip")
    for name, fam in families(args.order):
        n = min(args.order, fam.max_n)
        series = corr.build_series(fam, n)
        rel = corr.check_linear_relations(fam, n).ok
        flat = corr.check_commutativity(series).ok
        back = corr.top_from_series(series) == fam.restricted(n)
        print(f"{name:16s} {str(rel):9s}  {str(flat):7s}  {back}")


if __name__ == "__main__":
    main()
