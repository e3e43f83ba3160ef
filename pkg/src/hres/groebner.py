"""Buchberger's algorithm over GF(p) and codimension from leading terms.

Polynomials are dictionaries {exponent tuple: coefficient in [0, p)}.  The
order is degrevlex on the ring's variable order: total degree first, ties
broken like ``PolyRing.order_key`` (the smaller exponent in the first
differing variable wins).  Pairs are processed by the normal strategy: lowest
lcm degree first, then by pair indices.

Over a polynomial ring k[x_1..x_N] grade equals height, and
height I = N - dim k[x]/I; the dimension is the largest set of variables
containing the support of no leading monomial.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

from .exact_arith import DEFAULT_PRIME, Poly

Mono = tuple


class GroebnerBudgetExceeded(RuntimeError):
    """More S-pair reductions were needed than the step budget allows."""


def order_key(e: Mono):
    return (sum(e), tuple(-x for x in e))


def divides(a: Mono, b: Mono) -> bool:
    return all(x <= y for x, y in zip(a, b))


def lcm(a: Mono, b: Mono) -> Mono:
    return tuple(max(x, y) for x, y in zip(a, b))


def _sub(a: Mono, b: Mono) -> Mono:
    return tuple(x - y for x, y in zip(a, b))


def _add(a: Mono, b: Mono) -> Mono:
    return tuple(x + y for x, y in zip(a, b))


def leading(f: dict) -> Mono:
    return max(f, key=order_key)


def monic(f: dict, p: int) -> dict:
    inv = pow(f[leading(f)], -1, p)
    return {m: c * inv % p for m, c in f.items()}


def reduce_full(f: dict, basis: Sequence[dict], leads: Sequence[Mono], p: int) -> dict:
    """Remainder of f on division by a list of monic polynomials (every term reduced)."""
    f = dict(f)
    rem: dict = {}
    while f:
        m = leading(f)
        c = f.pop(m)
        for g, lg in zip(basis, leads):
            if divides(lg, m):
                q = _sub(m, lg)
                for mg, cg in g.items():
                    if mg == lg:
                        continue
                    t = _add(mg, q)
                    v = (f.get(t, 0) - c * cg) % p
                    if v:
                        f[t] = v
                    else:
                        f.pop(t, None)
                break
        else:
            rem[m] = c
    return rem


def spoly(f: dict, g: dict, lf: Mono, lg: Mono, p: int) -> dict:
    """S-polynomial of two monic polynomials."""
    L = lcm(lf, lg)
    a, b = _sub(L, lf), _sub(L, lg)
    out: dict = {}
    for m, c in f.items():
        t = _add(m, a)
        out[t] = (out.get(t, 0) + c) % p
    for m, c in g.items():
        t = _add(m, b)
        out[t] = (out.get(t, 0) - c) % p
    return {m: c for m, c in out.items() if c}


@dataclass
class GroebnerBasis:
    """Reduced Groebner basis (monic, sorted by increasing leading monomial)."""

    nvars: int
    p: int
    polys: list
    steps: int = 0

    @property
    def leading_monomials(self) -> list[Mono]:
        return [leading(g) for g in self.polys]

    def reduce(self, f: dict) -> dict:
        return reduce_full({m: c % self.p for m, c in f.items() if c % self.p}, self.polys,
                           self.leading_monomials, self.p)

    def contains(self, f: dict) -> bool:
        return not self.reduce(f)


def buchberger(gens: Sequence[dict], nvars: int, p: int = DEFAULT_PRIME, budget: int = 100_000,
               max_vars: int = 24) -> GroebnerBasis:
    """Reduced Groebner basis of the ideal generated by ``gens``.

    Raises GroebnerBudgetExceeded after ``budget`` S-pair reductions.
    """
    if nvars > max_vars:
        raise ValueError(f"{nvars} variables exceeds the guard of {max_vars}")
    basis: list[dict] = []
    leads: list[Mono] = []
    for f in gens:
        f = {m: c % p for m, c in f.items() if c % p}
        if f:
            basis.append(monic(f, p))
            leads.append(leading(basis[-1]))
    pairs = set(combinations(range(len(basis)), 2))
    done: set = set()
    steps = 0

    def pair_key(ij):
        i, j = ij
        return (sum(lcm(leads[i], leads[j])), i, j)

    while pairs:
        i, j = min(pairs, key=pair_key)
        pairs.discard((i, j))
        done.add((i, j))
        L = lcm(leads[i], leads[j])
        if L == _add(leads[i], leads[j]):
            continue                                   # coprime leading terms
        if any(k not in (i, j) and divides(leads[k], L)
               and (min(i, k), max(i, k)) in done and (min(j, k), max(j, k)) in done
               for k in range(len(basis))):
            continue                                   # chain criterion
        steps += 1
        if steps > budget:
            raise GroebnerBudgetExceeded(f"step budget {budget} exceeded with {len(basis)} polynomials")
        h = reduce_full(spoly(basis[i], basis[j], leads[i], leads[j], p), basis, leads, p)
        if h:
            h = monic(h, p)
            k = len(basis)
            basis.append(h)
            leads.append(leading(h))
            pairs |= {(a, k) for a in range(k)}
    return GroebnerBasis(nvars, p, _reduced(basis, leads, p), steps)


def _reduced(basis: list[dict], leads: list[Mono], p: int) -> list[dict]:
    keep = []
    for k, lk in enumerate(leads):
        if any(divides(lj, lk) and (lj != lk or j < k) for j, lj in enumerate(leads) if j != k):
            continue
        keep.append(k)
    polys = [basis[k] for k in keep]
    lds = [leads[k] for k in keep]
    out = []
    for k, g in enumerate(polys):
        others = polys[:k] + polys[k + 1:]
        olds = lds[:k] + lds[k + 1:]
        tail = reduce_full({m: c for m, c in g.items() if m != lds[k]}, others, olds, p)
        tail[lds[k]] = 1
        out.append(tail)
    out.sort(key=lambda g: order_key(leading(g)))
    return out


def codimension(gb: GroebnerBasis, nvars: int | None = None) -> int:
    """nvars - dim, with dim the largest variable set avoiding every leading monomial."""
    N = gb.nvars if nvars is None else nvars
    supports = [frozenset(k for k, e in enumerate(m) if e) for m in gb.leading_monomials]
    if any(not s for s in supports):
        return N                                       # unit ideal; by convention codim = N
    for size in range(N, -1, -1):
        for S in combinations(range(N), size):
            Sset = set(S)
            if not any(s <= Sset for s in supports):
                return N - size
    return N


# ---------------------------------------------------------------------------
# conversion from Poly


def to_dicts(polys: Sequence[Poly], p: int, drop_unused: bool = True) -> tuple[list[dict], list[int]]:
    """Exponent-tuple dictionaries mod p, restricted to the variables that occur.

    Returns the dictionaries and the ring indices of the kept variables.
    """
    ring = polys[0].ring if polys else None
    if ring is None:
        return [], []
    used = set()
    for f in polys:
        for m in f.terms:
            used |= {k for k, e in enumerate(ring.exponents(m)) if e}
    keep = sorted(used) if drop_unused else list(range(ring.nvars))
    out = []
    for f in polys:
        d = {}
        for m, c in f.terms.items():
            e = ring.exponents(m)
            if isinstance(c, int):
                v = c % p
            else:
                v = c.numerator * pow(c.denominator, -1, p) % p
            if v:
                key = tuple(e[k] for k in keep)
                d[key] = (d.get(key, 0) + v) % p
        out.append({m: c for m, c in d.items() if c})
    return out, keep


def ideal_codimension(polys: Sequence[Poly], p: int = DEFAULT_PRIME, budget: int = 100_000) -> tuple[int, GroebnerBasis]:
    """Codimension of the ideal in the polynomial ring on the variables that occur."""
    gens, keep = to_dicts(polys, p)
    gb = buchberger(gens, len(keep), p, budget)
    return codimension(gb), gb


def diagonal_grade(n: int, p: int = DEFAULT_PRIME, budget: int = 100_000, d_u: int | None = None):
    """Codimension of H with X specialized to a generic diagonal matrix."""
    from .generic_data import apply_specialization, build_generic, h_ideal, make_specialization

    d = build_generic(n, d_u)
    ds = apply_specialization(d, make_specialization("diagonal", n, ring=d.ring))
    return ideal_codimension(h_ideal(ds), p, budget)
