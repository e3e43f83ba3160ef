"""Generic data (u, X, v), its specializations and the ideal H.

Random choices come from SplitMix64, a 64-bit mixing generator defined by

    state <- state + 0x9E3779B97F4A7C15              (mod 2^64)
    z     <- state
    z     <- (z xor (z >> 30)) * 0xBF58476D1CE4E5B9  (mod 2^64)
    z     <- (z xor (z >> 27)) * 0x94D049BB133111EB  (mod 2^64)
    out   <- z xor (z >> 31)

seeded with the user-facing seed.  Uniform integers in [0, k) are drawn by
rejection from the top of the 64-bit range.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

from .exact_arith import (
    DEFAULT_PRIME, GF, ZZ, Domain, GradingProfile, Poly, PolyRing, VarId,
    default_du, poly_ring, specialize,
)
from .multilinear import Orientation, adjoint_entry, orientation_sign

MASK64 = (1 << 64) - 1


class SplitMix64:
    """Deterministic 64-bit generator; see the module docstring for the formula."""

    def __init__(self, seed: int = 0):
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)

    def randrange(self, k: int) -> int:
        if k <= 0:
            raise ValueError("empty range")
        limit = (1 << 64) - ((1 << 64) % k)
        while True:
            x = self.next_u64()
            if x < limit:
                return x % k

    def random(self) -> float:
        return (self.next_u64() >> 11) / float(1 << 53)

    def choice(self, seq):
        return seq[self.randrange(len(seq))]

    def shuffle(self, seq: list) -> None:
        for i in range(len(seq) - 1, 0, -1):
            j = self.randrange(i + 1)
            seq[i], seq[j] = seq[j], seq[i]

    def fork(self, tag: int) -> "SplitMix64":
        """Independent stream derived from the current state and a tag."""
        return SplitMix64(self.next_u64() ^ (tag * 0xD1B54A32D192ED03 & MASK64))


@dataclass
class GenericData:
    """The triple (u, X, v) over ``ring``; X[i][j] is the entry x_{i+1, j+1}."""

    n: int
    ring: PolyRing
    u: list
    v: list
    X: list
    grading: GradingProfile

    @property
    def orientation(self) -> Orientation:
        return Orientation(self.n, self.ring.one())

    def X_matrix(self):
        from .chain import PolyMatrix
        return PolyMatrix.from_dense(self.ring, self.X)

    def with_v(self, v) -> "GenericData":
        return GenericData(self.n, self.ring, list(self.u), list(v), [list(r) for r in self.X], self.grading)

    def negate_v(self) -> "GenericData":
        return self.with_v([-c for c in self.v])


def build_generic(n: int, d_u: int | None = None, domain: Domain = ZZ) -> GenericData:
    if n < 2:
        raise ValueError("n must be at least 2")
    if d_u is None:
        d_u = default_du(n)
    g = GradingProfile(n, d_u)
    ring = poly_ring(n, domain)
    u = [ring.u(i) for i in range(1, n + 1)]
    v = [ring.v(i) for i in range(1, n + 1)]
    X = [[ring.x(i, j) for j in range(1, n + 1)] for i in range(1, n + 1)]
    return GenericData(n, ring, u, v, X, g)


# ---------------------------------------------------------------------------
# specializations

KINDS = ("random-point", "diagonal", "block", "sign-twist", "custom")


@dataclass
class Specialization:
    kind: str
    params: dict
    seed: int
    assignment: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps({"kind": self.kind, "params": self.params, "seed": self.seed}, sort_keys=True)


def make_specialization(kind: str, n: int, params: dict | None = None, seed: int = 0,
                        ring: PolyRing | None = None) -> Specialization:
    """Deterministic variable assignment of the requested kind.

    random-point: every variable -> uniform element of GF(p), p = params["p"].
    diagonal:     x_ij -> 0 for i != j (x_ii is kept as the diagonal variable).
    block:        x_11 -> 1, x_1j, x_j1 -> 0 for j > 1.
    sign-twist:   v_i -> -v_i.
    custom:       params["assignment"] maps variable names to integers.
    """
    params = dict(params or {})
    ring = ring or poly_ring(n)
    a: dict[VarId, Any] = {}
    if kind == "random-point":
        p = params.setdefault("p", DEFAULT_PRIME)
        rng = SplitMix64(seed)
        for var in ring.vars:
            a[var] = rng.randrange(p)
    elif kind == "diagonal":
        for i in range(1, n + 1):
            for j in range(1, n + 1):
                if i != j:
                    a[VarId("x", i, j)] = 0
    elif kind == "block":
        a[VarId("x", 1, 1)] = 1
        for j in range(2, n + 1):
            a[VarId("x", 1, j)] = 0
            a[VarId("x", j, 1)] = 0
    elif kind == "sign-twist":
        for i in range(1, n + 1):
            a[VarId("v", i)] = -ring.v(i)
    elif kind == "custom":
        for name, val in params.get("assignment", {}).items():
            a[ring.vars[ring.by_name[name]]] = val
    else:
        raise ValueError(f"unknown specialization kind {kind!r}")
    return Specialization(kind, params, seed, a)


def apply_specialization(d: GenericData, s: Specialization) -> GenericData:
    target = d.ring
    if s.kind == "random-point":
        target = d.ring.with_domain(GF(s.params["p"]))

    def sp(c):
        return specialize(c, s, target)

    return GenericData(
        d.n, target, [sp(c) for c in d.u], [sp(c) for c in d.v],
        [[sp(c) for c in row] for row in d.X], d.grading,
    )


def random_point_data(n: int, d_u: int | None = None, p: int = DEFAULT_PRIME, seed: int = 0) -> GenericData:
    d = build_generic(n, d_u)
    return apply_specialization(d, make_specialization("random-point", n, {"p": p}, seed))


# ---------------------------------------------------------------------------
# the ideal H


def h_ideal(d: GenericData, sign_twist: bool = False) -> list[Poly]:
    """Generators of H(u, X, v): entries of uX, of Xv and of vu - Adj X.

    With ``sign_twist`` the vector v is replaced by (-1)^(n(n-1)/2) v.
    Order: (uX)_j for j = 1..n, (Xv)_i for i = 1..n, then (i, j) row-major.
    """
    n = d.n
    v = d.v
    if sign_twist and orientation_sign(n) < 0:
        v = [-c for c in v]
    zero = d.ring.zero()
    gens = []
    for j in range(n):
        gens.append(sum((d.u[i] * d.X[i][j] for i in range(n)), zero))
    for i in range(n):
        gens.append(sum((d.X[i][j] * v[j] for j in range(n)), zero))
    for i in range(n):
        for j in range(n):
            gens.append(v[i] * d.u[j] - adjoint_entry(d.X, i + 1, j + 1))
    return gens
