"""Print the graded Betti table of M for each n and compare it with the prediction.

    python3 scripts/betti_tables.py 3 4 5 [--du 1]
"""

import argparse

from hres.generic_data import build_generic
from hres.minimal_complex import build_minimal
from hres.verify import betti_table, expected_betti


def show(table, n):
    twists = sorted({m for row in table.entries.values() for m in row})
    print("  r | " + " ".join(f"{m:>4}" for m in twists) + " | rank")
    for r, row in table.entries.items():
        cells = " ".join(f"{row[m]:>4}" if m in row else "   ." for m in twists)
        print(f"{r:>3} | {cells} | {sum(row.values())}")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("n", type=int, nargs="*", default=[2, 3, 4])
    ap.add_argument("--du", type=int, default=None)
    args = ap.parse_args()
    for n in args.n:
        table = betti_table(build_minimal(build_generic(n, args.du)))
        print(f"n = {n}")
        show(table, n)
        try:
            exp = expected_betti(n, args.du)
        except ValueError:
            print("  no prediction for these parameters\n")
            continue
        diff = table.diff(exp)
        print("  matches prediction\n" if not diff else f"  differs from prediction: {diff}\n")


if __name__ == "__main__":
    main()
