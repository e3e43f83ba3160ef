"""Wall-clock cost of each stage for n = 2..N (default 4).

    python3 scripts/timing.py 5
"""

import sys
import time

from hres.big_complex import build_F
from hres.generic_data import build_generic
from hres.minimal_complex import build_minimal
from hres.verify import certify_exactness, check_d_squared


def timed(fn, *args):
    t0 = time.perf_counter()
    out = fn(*args)
    return out, time.perf_counter() - t0


def main():
    top = int(sys.argv[1]) if len(sys.argv) > 1 else 4
    print(f"{'n':>2} {'build F':>9} {'F d^2':>9} {'build M':>9} {'certify':>9}  ranks")
    for n in range(2, top + 1):
        d = build_generic(n)
        F, t_f = timed(build_F, d)
        _, t_d2 = timed(check_d_squared, F)
        mc, t_m = timed(build_minimal, d)
        cert, t_c = timed(certify_exactness, mc)
        ranks = [cert.ranks[r] for r in sorted(cert.ranks)]
        print(f"{n:>2} {t_f:9.2f} {t_d2:9.2f} {t_m:9.2f} {t_c:9.2f}  {cert.status} {ranks}")


if __name__ == "__main__":
    main()
