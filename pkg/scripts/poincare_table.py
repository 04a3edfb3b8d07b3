"""Print Poincare polynomials of the permutohedral spaces and cross-check two formulas.

    python3 scripts/poincare_table.py --max-n 10
"""

import argparse
from math import factorial

from permutohedral.enumerative import poincare_gf, poincare_strata


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-n", type=int, default=8)
    args = ap.parse_args()
    for n in range(1, args.max_n + 1):
        p = poincare_gf(n)
        same = p == poincare_strata(n)
        assert p(1) == factorial(n)
        print(f"n={n:2d}  {'ok ' if same else 'BAD'}  {p.as_ints()}")


if __name__ == "__main__":
    main()
