"""Try the Groebner codimension of the unspecialized H(n) over GF(p).

The diagonal specialization is what the acceptance suite checks; this script
attempts the generic ideal (4 variables at n = 2, 15 at n = 3) under a step
budget and reports either the codimension or that the budget ran out.

    python3 scripts/generic_grade.py 3 --budget 2000000
"""

import argparse
import time

from hres.exact_arith import DEFAULT_PRIME
from hres.generic_data import build_generic, h_ideal
from hres.groebner import GroebnerBudgetExceeded, diagonal_grade, ideal_codimension


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("n", type=int, nargs="*", default=[2, 3])
    ap.add_argument("--prime", type=int, default=DEFAULT_PRIME)
    ap.add_argument("--budget", type=int, default=500_000)
    args = ap.parse_args()
    for n in args.n:
        t0 = time.perf_counter()
        diag, _ = diagonal_grade(n, args.prime, args.budget)
        print(f"n={n} diagonal: codim {diag} ({time.perf_counter() - t0:.1f}s)")
        t0 = time.perf_counter()
        try:
            codim, gb = ideal_codimension(h_ideal(build_generic(n)), args.prime, args.budget)
            print(f"n={n} generic:  codim {codim}, {len(gb.polys)} basis elements, {gb.steps} steps "
                  f"({time.perf_counter() - t0:.1f}s)")
        except GroebnerBudgetExceeded as exc:
            print(f"n={n} generic:  budget exhausted after {time.perf_counter() - t0:.1f}s ({exc})")


if __name__ == "__main__":
    main()
