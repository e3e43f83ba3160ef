"""Exact coefficients and sparse polynomials over Z, Q or GF(p).

The ring has the variables of the generic data in a fixed order

    u1 < ... < un < v1 < ... < vn < x11 < x12 < ... < xnn   (row-major),

and monomials are compared in degrevlex with respect to it: higher total
degree wins; on a tie the monomial with the smaller exponent in the
smallest variable where they differ is the larger one.

A monomial is packed into a single Python int: the exponent of variable k
occupies bits ``[k*B, (k+1)*B)`` and the total degree sits above all of
them.  Multiplying monomials is then integer addition.  Exponents are
bounded by ``2**B - 1``; exceeding that raises ``ExponentOverflow`` before
any carry can corrupt a neighbouring field.

Canonical text form (used by every export)::

    poly   := "0" | term (("+" | "-") term)*     leading "-" allowed
    term   := coeff | [coeff "*"] factor ("*" factor)*
    factor := var ["^" exponent]
    coeff  := digits ["/" digits]
    var    := "u"i | "v"i | "x"ij            (x{i}_{j} when n >= 10)

Terms are listed from the largest monomial down; a coefficient of 1 is
omitted except on the constant term.  Prime-field coefficients print as
their representative in [0, p).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Sequence, Union

EXP_BITS = 8
INHOMOGENEOUS = "inhomogeneous"
DEFAULT_PRIME = 1_000_003


class ExponentOverflow(OverflowError):
    """A product would exceed the per-variable exponent width."""


class DomainMismatch(TypeError):
    pass


# ---------------------------------------------------------------------------
# coefficient domains


@dataclass(frozen=True)
class Domain:
    """Coefficient domain: ``ZZ``, ``QQ`` or ``GF`` with modulus ``p``."""

    kind: str
    p: int = 0

    def __post_init__(self):
        if self.kind not in ("ZZ", "QQ", "GF"):
            raise ValueError(f"unknown domain {self.kind}")
        if self.kind == "GF":
            if self.p < 3 or self.p >= 2**62 or not _is_probable_prime(self.p):
                raise ValueError(f"GF needs an odd prime below 2^62, got {self.p}")

    def convert(self, c):
        if self.kind == "GF":
            if isinstance(c, Fraction):
                return c.numerator * pow(c.denominator, -1, self.p) % self.p
            return int(c) % self.p
        if self.kind == "QQ":
            return Fraction(c)
        if isinstance(c, Fraction):
            if c.denominator != 1:
                raise DomainMismatch(f"{c} is not an integer")
            return c.numerator
        return int(c)

    def inverse(self, c):
        if self.kind == "GF":
            return pow(c, -1, self.p)
        if self.kind == "QQ":
            return 1 / Fraction(c)
        if c in (1, -1):
            return c
        raise ZeroDivisionError(f"{c} is not a unit in ZZ")

    def __str__(self):
        return f"GF({self.p})" if self.kind == "GF" else self.kind


ZZ = Domain("ZZ")
QQ = Domain("QQ")


@lru_cache(maxsize=None)
def GF(p: int) -> Domain:
    return Domain("GF", p)


def _is_probable_prime(p: int) -> bool:
    if p < 2:
        return False
    for q in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if p % q == 0:
            return p == q
    d, s = p - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, p)
        if x in (1, p - 1):
            continue
        for _ in range(s - 1):
            x = x * x % p
            if x == p - 1:
                break
        else:
            return False
    return True


# ---------------------------------------------------------------------------
# variables and grading


@dataclass(frozen=True)
class VarId:
    """A generic variable: kind "u", "v" or "x" with 1-based indices."""

    kind: str
    i: int
    j: int = 0

    def name(self, n: int) -> str:
        if self.kind != "x":
            return f"{self.kind}{self.i}"
        return f"x{self.i}{self.j}" if n < 10 else f"x{self.i}_{self.j}"


def variable_order(n: int) -> list[VarId]:
    out = [VarId("u", i) for i in range(1, n + 1)]
    out += [VarId("v", i) for i in range(1, n + 1)]
    out += [VarId("x", i, j) for i in range(1, n + 1) for j in range(1, n + 1)]
    return out


@dataclass(frozen=True)
class GradingProfile:
    """deg x_ij = 1, deg u_i = d_u, deg v_i = d_v with d_u + d_v = n - 1."""

    n: int
    d_u: int
    d_v: int = -1

    def __post_init__(self):
        if self.d_v < 0:
            object.__setattr__(self, "d_v", self.n - 1 - self.d_u)
        if self.n < 1 or self.d_u < 0 or self.d_v < 0 or self.d_u + self.d_v != self.n - 1:
            raise ValueError(f"invalid grading n={self.n} d_u={self.d_u} d_v={self.d_v}")

    def weight(self, var: VarId) -> int:
        return {"u": self.d_u, "v": self.d_v, "x": 1}[var.kind]


def default_du(n: int) -> int:
    return (n - 1) // 2


# ---------------------------------------------------------------------------
# polynomial ring


class PolyRing:
    """Polynomial ring in the generic variables for a given n and domain."""

    def __init__(self, n: int, domain: Domain = ZZ, bits: int = EXP_BITS):
        self.n = n
        self.domain = domain
        self.bits = bits
        self.vars = variable_order(n)
        self.nvars = len(self.vars)
        self.index = {v: k for k, v in enumerate(self.vars)}
        self.names = [v.name(n) for v in self.vars]
        self.by_name = {s: k for k, s in enumerate(self.names)}
        self.deg_shift = self.nvars * bits
        self.max_exp = (1 << bits) - 1
        self._mask = self.max_exp
        self._exp_cache: dict[int, tuple] = {}
        self._p = domain.p if domain.kind == "GF" else 0

    # identity: two rings are the same if all parameters agree
    def _key(self):
        return (self.n, self.domain, self.bits)

    def __eq__(self, other):
        return isinstance(other, PolyRing) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        return f"PolyRing(n={self.n}, {self.domain})"

    def with_domain(self, domain: Domain) -> "PolyRing":
        return poly_ring(self.n, domain, self.bits)

    # monomials
    def pack(self, exps: Sequence[int]) -> int:
        m, total = 0, 0
        for k, e in enumerate(exps):
            if e:
                if e > self.max_exp:
                    raise ExponentOverflow(f"exponent {e} exceeds {self.max_exp}")
                m |= e << (k * self.bits)
                total += e
        return m | (total << self.deg_shift)

    def exponents(self, m: int) -> tuple:
        e = self._exp_cache.get(m)
        if e is None:
            b, mask = self.bits, self._mask
            e = tuple((m >> (k * b)) & mask for k in range(self.nvars))
            self._exp_cache[m] = e
        return e

    def mdeg(self, m: int) -> int:
        return m >> self.deg_shift

    def var_monomial(self, k: int) -> int:
        return (1 << (k * self.bits)) | (1 << self.deg_shift)

    def order_key(self, m: int):
        """Sort key: larger key means larger monomial in degrevlex."""
        e = self.exponents(m)
        return (m >> self.deg_shift, tuple(-x for x in e))

    # constructors
    def zero(self) -> "Poly":
        return Poly(self, {})

    def one(self) -> "Poly":
        return self.const(1)

    def const(self, c) -> "Poly":
        c = self.domain.convert(c)
        return Poly(self, {0: c} if c else {})

    def var(self, v: Union[int, VarId]) -> "Poly":
        k = v if isinstance(v, int) else self.index[v]
        return Poly(self, {self.var_monomial(k): self.domain.convert(1)})

    def u(self, i: int) -> "Poly":
        return self.var(VarId("u", i))

    def v(self, i: int) -> "Poly":
        return self.var(VarId("v", i))

    def x(self, i: int, j: int) -> "Poly":
        return self.var(VarId("x", i, j))

    def from_terms(self, terms: Mapping[int, object]) -> "Poly":
        return Poly(self, _clean(self, terms))

    def from_exponents(self, items: Iterable[tuple[Sequence[int], object]]) -> "Poly":
        acc: dict[int, object] = {}
        for exps, c in items:
            m = self.pack(exps)
            acc[m] = acc.get(m, 0) + c
        return self.from_terms(acc)

    def parse(self, text: str) -> "Poly":
        return parse_poly(self, text)


@lru_cache(maxsize=None)
def poly_ring(n: int, domain: Domain = ZZ, bits: int = EXP_BITS) -> PolyRing:
    """Shared ring instance for the given parameters."""
    return PolyRing(n, domain, bits)


def _clean(ring: PolyRing, terms: Mapping[int, object]) -> dict:
    conv = ring.domain.convert
    out = {}
    for m, c in terms.items():
        c = conv(c)
        if c:
            out[m] = c
    return out


class Poly:
    """Immutable sparse polynomial: ``terms`` maps packed monomial -> coefficient."""

    __slots__ = ("ring", "terms", "_deg")

    def __init__(self, ring: PolyRing, terms: dict):
        self.ring = ring
        self.terms = terms
        self._deg = None

    # basic queries
    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and 0 in self.terms)

    def constant_term(self):
        return self.terms.get(0, 0)

    def degree(self) -> int:
        if self._deg is None:
            s = self.ring.deg_shift
            self._deg = max((m >> s for m in self.terms), default=-1)
        return self._deg

    def __len__(self):
        return len(self.terms)

    def sorted_terms(self) -> list:
        """Terms from the largest monomial down (degrevlex)."""
        key = self.ring.order_key
        return sorted(self.terms.items(), key=lambda mc: key(mc[0]), reverse=True)

    def leading_term(self):
        return self.sorted_terms()[0]

    # arithmetic
    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            if other.ring is not self.ring and other.ring != self.ring:
                raise DomainMismatch(f"{self.ring} vs {other.ring}")
            return other
        if isinstance(other, (int, Fraction)):
            return self.ring.const(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not other.terms:
            return self
        if not self.terms:
            return other
        res = dict(self.terms)
        p = self.ring._p
        for m, c in other.terms.items():
            c2 = res.get(m)
            if c2 is None:
                res[m] = c
            else:
                s = c2 + c
                if p:
                    s %= p
                if s:
                    res[m] = s
                else:
                    del res[m]
        return Poly(self.ring, res)

    __radd__ = __add__

    def __neg__(self):
        p = self.ring._p
        if p:
            return Poly(self.ring, {m: p - c for m, c in self.terms.items()})
        return Poly(self.ring, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def scale(self, c) -> "Poly":
        c = self.ring.domain.convert(c)
        if not c:
            return Poly(self.ring, {})
        if c == 1:
            return self
        p = self.ring._p
        if p:
            return Poly(self.ring, {m: v * c % p for m, v in self.terms.items()})
        return Poly(self.ring, {m: v * c for m, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b = self.terms, other.terms
        if not a or not b:
            return Poly(self.ring, {})
        if len(a) == 1 and 0 in a:
            return other.scale(a[0])
        if len(b) == 1 and 0 in b:
            return self.scale(b[0])
        ring = self.ring
        if self.degree() + other.degree() > ring.max_exp:
            raise ExponentOverflow("product degree exceeds the exponent width")
        if len(a) > len(b):
            a, b = b, a
        res: dict[int, object] = {}
        get = res.get
        for ma, ca in a.items():
            for mb, cb in b.items():
                m = ma + mb
                c = get(m)
                res[m] = ca * cb if c is None else c + ca * cb
        p = ring._p
        if p:
            res = {m: c % p for m, c in res.items() if c % p}
        else:
            res = {m: c for m, c in res.items() if c}
        return Poly(ring, res)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power")
        out = self.ring.one()
        base = self
        while k:
            if k & 1:
                out = out * base
            k >>= 1
            if k:
                base = base * base
        return out

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.ring == other.ring and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self.terms == self.ring.const(other).terms
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __str__(self):
        return format_poly(self)

    def __repr__(self):
        return f"Poly({format_poly(self)!r})"


def poly_arith(a: Poly, b: Poly, op: str) -> Poly:
    """Add, subtract or multiply two polynomials of the same ring."""
    if a.ring != b.ring:
        raise DomainMismatch(f"{a.ring} vs {b.ring}")
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown op {op}")


# ---------------------------------------------------------------------------
# text form


def _format_monomial(ring: PolyRing, m: int) -> str:
    parts = []
    for k, e in enumerate(ring.exponents(m)):
        if e == 1:
            parts.append(ring.names[k])
        elif e:
            parts.append(f"{ring.names[k]}^{e}")
    return "*".join(parts)


def format_poly(p: Poly) -> str:
    if not p.terms:
        return "0"
    out = []
    for m, c in p.sorted_terms():
        neg = c < 0
        a = -c if neg else c
        mono = _format_monomial(p.ring, m)
        if not mono:
            body = str(a)
        elif a == 1:
            body = mono
        else:
            body = f"{a}*{mono}"
        if not out:
            out.append(("-" if neg else "") + body)
        else:
            out.append((" - " if neg else " + ") + body)
    return "".join(out)


_TERM_SPLIT = re.compile(r"\s*([+-])\s*")
_COEFF = re.compile(r"^\d+(/\d+)?$")


def parse_poly(ring: PolyRing, text: str) -> Poly:
    s = text.strip()
    if not s:
        raise ValueError("empty polynomial text")
    if s[0] not in "+-":
        s = "+" + s
    pieces = _TERM_SPLIT.split(s)
    # pieces: ['', sign, term, sign, term, ...]
    if pieces[0].strip():
        raise ValueError(f"cannot parse {text!r}")
    acc: dict[int, object] = {}
    for sign, term in zip(pieces[1::2], pieces[2::2]):
        term = term.strip()
        if not term:
            raise ValueError(f"empty term in {text!r}")
        coeff: object = 1
        exps = [0] * ring.nvars
        for fac in term.split("*"):
            fac = fac.strip()
            if _COEFF.match(fac):
                coeff = coeff * Fraction(fac)
                continue
            name, _, e = fac.partition("^")
            if name not in ring.by_name:
                raise ValueError(f"unknown variable {name!r}")
            exps[ring.by_name[name]] += int(e) if e else 1
        if sign == "-":
            coeff = -coeff
        m = ring.pack(exps)
        acc[m] = acc.get(m, 0) + coeff
    return ring.from_terms(acc)


# ---------------------------------------------------------------------------
# grading, substitution, evaluation


def weighted_degree(p: Poly, g: GradingProfile):
    """Common weighted degree of all monomials of p, or INHOMOGENEOUS."""
    if not p.terms:
        raise ValueError("weighted degree of the zero polynomial")
    ring = p.ring
    w = [g.weight(v) for v in ring.vars]
    degs = set()
    for m in p.terms:
        degs.add(sum(wk * e for wk, e in zip(w, ring.exponents(m)) if e))
        if len(degs) > 1:
            return INHOMOGENEOUS
    return degs.pop()


def specialize(p: Poly, s, target: PolyRing | None = None) -> Poly:
    """Substitute variables of p.

    ``s`` maps VarId (or variable index) to a Poly or a scalar; it may also be
    an object with an ``assignment`` attribute holding such a map.  Variables
    not mentioned survive.  The result lives in ``target`` (default: the ring
    of p); coefficients are converted into its domain.
    """
    assignment = getattr(s, "assignment", s)
    src = p.ring
    tgt = target or src
    subs: list = []
    for k, var in enumerate(src.vars):
        val = assignment.get(var, assignment.get(k)) if assignment else None
        if val is None:
            subs.append(tgt.var(var))
        elif isinstance(val, Poly):
            if val.ring != tgt:
                val = change_ring(val, tgt)
            subs.append(val)
        else:
            subs.append(tgt.const(val))
    powers: dict[tuple[int, int], Poly] = {}

    def pw(k, e):
        key = (k, e)
        r = powers.get(key)
        if r is None:
            r = subs[k] if e == 1 else pw(k, e - 1) * subs[k]
            powers[key] = r
        return r

    out = tgt.zero()
    for m, c in p.terms.items():
        term = tgt.const(c)
        for k, e in enumerate(src.exponents(m)):
            if e:
                term = term * pw(k, e)
                if not term:
                    break
        out = out + term
    return out


def change_ring(p: Poly, target: PolyRing) -> Poly:
    """Reinterpret p in another ring with the same n (e.g. reduce mod p)."""
    if p.ring == target:
        return p
    if p.ring.n != target.n:
        raise DomainMismatch("variable universes differ")
    if p.ring.bits == target.bits:
        return target.from_terms(p.terms)
    return target.from_exponents((p.ring.exponents(m), c) for m, c in p.terms.items())


def evaluate(p: Poly, point: Sequence[int], modulus: int, cache: dict | None = None) -> int:
    """Value of p at an integer point (indexed by variable), reduced mod ``modulus``.

    ``cache`` memoizes monomial values across calls with the same point.
    """
    if cache is None:
        cache = {}
    ring = p.ring
    total = 0
    for m, c in p.terms.items():
        val = cache.get(m)
        if val is None:
            val = 1
            for k, e in enumerate(ring.exponents(m)):
                if e:
                    val = val * pow(point[k], e, modulus) % modulus
            cache[m] = val
        total += c * val
    if isinstance(total, Fraction):
        total = total.numerator * pow(total.denominator, -1, modulus)
    return total % modulus
