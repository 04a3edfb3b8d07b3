"""Run the module compatibility checks beyond the default range, with timings.

    python3 scripts/deep_lemma.py --max-n 5
"""

import argparse
import time

from permutohedral.homology import flipped_between_action, verify_technical_lemma


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-n", type=int, default=5)
    ap.add_argument("--control", action="store_true", help="also run the sign-flipped action")
    args = ap.parse_args()
    for n in range(1, args.max_n + 1):
        t0 = time.perf_counter()
        rep = verify_technical_lemma(n)
        line = "  ".join(f"{k}={c.checked}/{c.failures}" for k, c in rep.checks.items())
        print(f"|B|={n}  {'ok ' if rep.ok else 'BAD'}  {time.perf_counter() - t0:6.2f}s  checked/failed: {line}")
        if args.control:
            neg = verify_technical_lemma(n, action=flipped_between_action)
            verdict = "caught" if not neg.ok else "identical here (no between breaks)" if n < 3 else "NOT caught"
            print(f"        flipped action: {verdict}")


if __name__ == "__main__":
    main()
