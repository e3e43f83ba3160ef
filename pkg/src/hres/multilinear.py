"""Exterior algebra of a free module F of rank n and of its dual F*.

Basis monomials are bitmasks over {1..n}: bit i-1 set means index i is
present, and the monomial is the wedge of those indices in increasing
order.  Coefficients are anything supporting ``+``, ``*`` and truth testing
(ints or ``Poly``).

Sign conventions
----------------
* A degree-one element acts as a graded derivation:
  ``eps_j(e_{i1} ^ ... ^ e_{ik}) = (-1)^pos e_{...without j...}`` where pos is
  the number of indices smaller than j.
* Higher degree elements act by ``(a ^ b)(x) = a(b(x))``, so the last factor
  of a monomial is applied first.  The same kernel serves F* acting on F
  and F acting on F*.
* The primal orientation is ``e_n = e_1 ^ ... ^ e_n``; the dual orientation
  is ``eps_n ^ ... ^ eps_1``, stored as the increasing monomial together
  with the sign ``(-1)^(n(n-1)/2)``, so that ``e_n(eps_n) = 1``.
* ``X: F -> F*`` sends ``e_j`` to ``sum_i x_ij eps_i``; its transpose plays
  the role of ``X*``.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import combinations
from typing import Iterable, Sequence

PRIMAL = "primal"
DUAL = "dual"


class SideMismatch(ValueError):
    pass


# ---------------------------------------------------------------------------
# index sets


def bit(i: int) -> int:
    return 1 << (i - 1)


def mask_of(indices: Iterable[int]) -> int:
    m = 0
    for i in indices:
        m |= bit(i)
    return m


@lru_cache(maxsize=None)
def members(mask: int) -> tuple[int, ...]:
    out, i = [], 1
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


@lru_cache(maxsize=None)
def subsets(n: int, k: int) -> tuple[int, ...]:
    """All k-subsets of {1..n} as masks, in lexicographic order of index tuples."""
    if k < 0 or k > n:
        return ()
    return tuple(mask_of(c) for c in combinations(range(1, n + 1), k))


def full(n: int) -> int:
    return (1 << n) - 1


@lru_cache(maxsize=None)
def wedge_sign(a: int, b: int) -> int:
    """Sign with e_a ^ e_b = sign * e_{a|b} (0 if they overlap)."""
    if a & b:
        return 0
    inversions = 0
    for j in members(b):
        inversions += (a >> j).bit_count()  # elements of a larger than j
    return -1 if inversions & 1 else 1


@lru_cache(maxsize=None)
def contract_sign(act: int, on: int) -> int:
    """Sign with act(on) = sign * (on minus act) for monomials on opposite sides."""
    if act & ~on:
        return 0
    sign, cur = 1, on
    for j in reversed(members(act)):
        if (cur & (bit(j) - 1)).bit_count() & 1:
            sign = -sign
        cur ^= bit(j)
    return sign


# ---------------------------------------------------------------------------
# elements


class ExtElement:
    """Sparse element of the exterior algebra on F (PRIMAL) or F* (DUAL)."""

    __slots__ = ("side", "n", "terms")

    def __init__(self, side: str, n: int, terms: dict | None = None):
        if side not in (PRIMAL, DUAL):
            raise ValueError(f"unknown side {side}")
        self.side = side
        self.n = n
        self.terms = {m: c for m, c in (terms or {}).items() if c}

    @classmethod
    def basis(cls, side, n, indices: Iterable[int] | int, coeff=1):
        m = indices if isinstance(indices, int) else mask_of(indices)
        return cls(side, n, {m: coeff})

    @classmethod
    def one(cls, side, n, coeff=1):
        return cls(side, n, {0: coeff})

    @property
    def degree(self) -> int:
        degs = {m.bit_count() for m in self.terms}
        if len(degs) > 1:
            raise ValueError("element is not homogeneous")
        return degs.pop() if degs else 0

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def _same(self, other):
        if self.side != other.side or self.n != other.n:
            raise SideMismatch(f"{self.side}/{self.n} vs {other.side}/{other.n}")

    def __add__(self, other: "ExtElement") -> "ExtElement":
        self._same(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out[m] + c if m in out else c
        return ExtElement(self.side, self.n, out)

    def __neg__(self):
        return ExtElement(self.side, self.n, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "ExtElement":
        return ExtElement(self.side, self.n, {m: v * c for m, v in self.terms.items()})

    def map_coeffs(self, fn) -> "ExtElement":
        return ExtElement(self.side, self.n, {m: fn(v) for m, v in self.terms.items()})

    def __eq__(self, other):
        if not isinstance(other, ExtElement):
            return NotImplemented
        return self.side == other.side and self.n == other.n and self.terms == other.terms

    def __repr__(self):
        sym = "e" if self.side == PRIMAL else "eps"
        parts = [f"{c}*{sym}{''.join(map(str, members(m))) or '()'}" for m, c in sorted(self.terms.items())]
        return " + ".join(parts) or "0"


def add_into(acc: dict, key, c):
    """acc[key] += c, dropping zeros."""
    cur = acc.get(key)
    if cur is None:
        if c:
            acc[key] = c
    else:
        s = cur + c
        if s:
            acc[key] = s
        else:
            del acc[key]


def wedge(a: ExtElement, b: ExtElement) -> ExtElement:
    a._same(b)
    out: dict = {}
    for ma, ca in a.terms.items():
        for mb, cb in b.terms.items():
            s = wedge_sign(ma, mb)
            if s:
                add_into(out, ma | mb, ca * cb if s > 0 else -(ca * cb))
    return ExtElement(a.side, a.n, out)


def contract(act: ExtElement, on: ExtElement) -> ExtElement:
    """act(on) for elements on opposite sides; the result lies on on's side."""
    if act.side == on.side:
        raise SideMismatch("contraction needs opposite sides")
    if act.n != on.n:
        raise SideMismatch("rank mismatch")
    out: dict = {}
    for ma, ca in act.terms.items():
        for mb, cb in on.terms.items():
            s = contract_sign(ma, mb)
            if s:
                add_into(out, mb ^ ma, ca * cb if s > 0 else -(ca * cb))
    return ExtElement(on.side, on.n, out)


@lru_cache(maxsize=None)
def comult_basis(mask: int, p: int) -> tuple[tuple[int, int, int], ...]:
    """Delta^(p, q) of a basis monomial: tuples (sign, P, Q) with P a p-subset."""
    idx = members(mask)
    out = []
    for comb in combinations(idx, p):
        pm = mask_of(comb)
        qm = mask ^ pm
        out.append((wedge_sign(pm, qm), pm, qm))
    return tuple(out)


def comult(x: ExtElement, split: tuple[int, int]) -> list[tuple[ExtElement, ExtElement]]:
    """Graded piece of the comultiplication; one pair per subset for each term."""
    p, q = split
    if p < 0 or q < 0:
        raise ValueError("negative split")
    out = []
    for m, c in sorted(x.terms.items()):
        if m.bit_count() != p + q:
            continue
        for s, pm, qm in comult_basis(m, p):
            out.append((ExtElement(x.side, x.n, {pm: c if s > 0 else -c}),
                        ExtElement(x.side, x.n, {qm: 1})))
    return out


# ---------------------------------------------------------------------------
# minors of X


def as_rows(X) -> list[list]:
    """Nested-list view of an n x n matrix (PolyMatrix or sequence of rows)."""
    if hasattr(X, "to_dense"):
        return X.to_dense()
    return [list(r) for r in X]


class Minors:
    """Memoized minors det X[T, S] for row mask T and column mask S."""

    def __init__(self, X, one=1):
        self.rows = as_rows(X)
        self.n = len(self.rows)
        self.one = one
        self.cache: dict[tuple[int, int], object] = {}

    def det(self, T: int, S: int):
        key = (T, S)
        val = self.cache.get(key)
        if val is not None:
            return val
        if T == 0 and S == 0:
            val = self.one
        else:
            r0 = members(T)[0]
            rest = T ^ bit(r0)
            val = 0
            for pos, c in enumerate(members(S)):
                x = self.rows[r0 - 1][c - 1]
                if not x:
                    continue
                term = x * self.det(rest, S ^ bit(c))
                val = val + term if pos % 2 == 0 else val - term
        self.cache[key] = val
        return val

    def apply(self, a: ExtElement, transpose: bool = False) -> ExtElement:
        """(wedge^j X)(a), or (wedge^j X*)(a) when transpose is set; PRIMAL -> DUAL."""
        if a.side != PRIMAL:
            raise SideMismatch("minor maps act on the primal side")
        out: dict = {}
        for S, c in a.terms.items():
            for T in subsets(self.n, S.bit_count()):
                d = self.det(S, T) if transpose else self.det(T, S)
                if d:
                    add_into(out, T, d * c)
        return ExtElement(DUAL, self.n, out)


def minor_map(X, j: int):
    """Matrix of wedge^j X : wedge^j F -> wedge^j F* on the increasing bases."""
    from .chain import PolyMatrix

    rows = as_rows(X)
    n = len(rows)
    sample = rows[0][0]
    ring = sample.ring
    mins = Minors(rows, ring.one())
    basis = subsets(n, j)
    mat = PolyMatrix(ring, len(basis), len(basis))
    for cj, S in enumerate(basis):
        for ri, T in enumerate(basis):
            mat[ri, cj] = mins.det(T, S)
    return mat


def adjoint_entry(X, i: int, j: int):
    """(Adj X)_ij = (-1)^(i+j) det of X without row j and column i.

    The exterior-algebra expression [eps_j ^ (wedge^{n-1} X)(eps_i(e_n))](e_n)
    is computed as well and must equal (-1)^(n(n-1)/2) (Adj X)_ij.
    """
    rows = as_rows(X)
    n = len(rows)
    one = _one_like(rows[0][0])
    mins = Minors(rows, one)
    adj = mins.det(full(n) ^ bit(j), full(n) ^ bit(i))
    if (i + j) % 2:
        adj = -adj
    lhs = adjoint_via_exterior(mins, i, j)
    expected = adj if orientation_sign(n) > 0 else -adj
    if lhs != expected:
        raise AssertionError(f"adjoint identity fails at ({i}, {j})")
    return adj


def adjoint_via_exterior(mins: Minors, i: int, j: int):
    n = mins.n
    o = Orientation(n)
    one = mins.one
    eps_i = ExtElement.basis(DUAL, n, [i], one)
    inner = mins.apply(contract(eps_i, o.primal()))
    w = wedge(ExtElement.basis(DUAL, n, [j], one), inner)
    val = contract(w, o.primal())
    return val.terms.get(0, 0 * one)


def _one_like(c):
    return c.ring.one() if hasattr(c, "ring") else 1


# ---------------------------------------------------------------------------
# orientation


def orientation_sign(n: int) -> int:
    return -1 if (n * (n - 1) // 2) % 2 else 1


class Orientation:
    """e_n = e_1 ^ ... ^ e_n and eps_n = eps_n ^ ... ^ eps_1."""

    def __init__(self, n: int, one=1):
        self.n = n
        self.mask = full(n)
        self.sign = orientation_sign(n)
        self.one = one

    def primal(self) -> ExtElement:
        return ExtElement(PRIMAL, self.n, {self.mask: self.one})

    def dual(self) -> ExtElement:
        return ExtElement(DUAL, self.n, {self.mask: self.one if self.sign > 0 else -self.one})

    def pairing(self):
        return contract(self.primal(), self.dual()).terms.get(0, 0)


def orientation_contract(x: ExtElement, o: Orientation) -> ExtElement:
    """x[e_n] for dual x, or x(eps_n) for primal x."""
    target = o.primal() if x.side == DUAL else o.dual()
    return contract(x, target)


def ext_basis(side: str, n: int, k: int) -> list[ExtElement]:
    return [ExtElement(side, n, {m: 1}) for m in subsets(n, k)]


def evaluate_element(x: ExtElement, fn) -> ExtElement:
    return x.map_coeffs(fn)


def random_element(rng, side: str, n: int, k: int, p: int, density: float = 1.0) -> ExtElement:
    """Random element of degree k with coefficients in [0, p)."""
    terms = {}
    for m in subsets(n, k):
        if density >= 1.0 or rng.random() < density:
            terms[m] = rng.randrange(p)
    return ExtElement(side, n, terms)


def reduce_mod(x: ExtElement, p: int) -> ExtElement:
    def red(c):
        if hasattr(c, "ring"):
            return c
        return c % p
    return ExtElement(x.side, x.n, {m: red(c) for m, c in x.terms.items()})


def basis_pairs(n: int, j: int) -> Sequence[tuple[int, int]]:
    return [(a, b) for a in subsets(n, j) for b in subsets(n, j)]
