"""The complex F built from data (u, X, v), and the isomorphisms between its variants.

F_r is the sum of four families of summands, indexed by a stratum t:

    family 1:  wedge^t F* (x) wedge^(r+1-t) F*
    family 2:  wedge^t F  (x) wedge^(r-t)   F*
    family 3:  wedge^t F  (x) wedge^(r-t)   F*
    family 4:  wedge^t F* (x) wedge^(r-1-t) F*

for -1 <= r <= 2n+1.  Each family-j summand maps into four targets; the
sixteen pieces are the functions in ``BLOCKS`` keyed by
(source family, target family, tag).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

from .chain import BasisLabel, ChainComplex, LabeledModule, PolyMatrix, block_matrix
from .exact_arith import PolyRing
from .generic_data import GenericData
from .multilinear import (
    DUAL, PRIMAL, ExtElement, Minors, bit, comult_basis, contract, contract_sign, full,
    subsets, wedge,
)


def sgn(k: int) -> int:
    return -1 if k % 2 else 1


def right_degree(family: int, r: int, t: int) -> int:
    return {1: r + 1 - t, 2: r - t, 3: r - t, 4: r - 1 - t}[family]


def twist(family: int, r: int, t: int, n: int, d_v: int) -> int:
    """Internal degree of a basis vector of F_r(family)^(t)."""
    if family == 1:
        return t * n - t + d_v * (r + 1 - 2 * t)
    if family == 2:
        return t * n + d_v * (r - 2 * t)
    if family == 3:
        return (r - t) * n + (d_v + 1) * (2 * t - r)
    return (t + 1) * n - t + d_v * (r - 1 - 2 * t)


@lru_cache(maxsize=None)
def f_labels(n: int, r: int) -> tuple[BasisLabel, ...]:
    out = []
    for fam in (1, 2, 3, 4):
        for t in range(n + 1):
            s = right_degree(fam, r, t)
            if s < 0 or s > n:
                continue
            for A in subsets(n, t):
                for B in subsets(n, s):
                    out.append(BasisLabel(fam, t, A, B))
    return tuple(out)


def f_module(n: int, r: int, d_v: int) -> LabeledModule:
    labs = f_labels(n, r)
    return LabeledModule(labs, [twist(l.family, r, l.t, n, d_v) for l in labs])


# ---------------------------------------------------------------------------
# evaluation context


class FContext:
    """Cached pieces of the differential for fixed data of rank n."""

    def __init__(self, n: int, ring: PolyRing, u, v, X):
        self.n = n
        self.ring = ring
        self.one = ring.one()
        self.u, self.v, self.X = list(u), list(v), [list(r) for r in X]
        self.mins = Minors(self.X, self.one)
        self.eta = ExtElement(PRIMAL, n, {full(n): self.one})
        self.uvec = ExtElement(PRIMAL, n, {bit(i + 1): c for i, c in enumerate(self.u)})
        self.vvec = ExtElement(PRIMAL, n, {bit(i + 1): c for i, c in enumerate(self.v)})
        zero = ring.zero()
        # X*(u) = sum_i (uX)_i eps_i and X(v) = sum_i (Xv)_i eps_i
        self.Xs_u = ExtElement(DUAL, n, {
            bit(i + 1): sum((self.u[j] * self.X[j][i] for j in range(n)), zero) for i in range(n)})
        self.X_v = ExtElement(DUAL, n, {
            bit(i + 1): sum((self.X[i][j] * self.v[j] for j in range(n)), zero) for i in range(n)})
        self._cache: dict = {}

    @classmethod
    def from_data(cls, d: GenericData) -> "FContext":
        return cls(d.n, d.ring, d.u, d.v, d.X)

    def _memo(self, key, fn):
        val = self._cache.get(key)
        if val is None:
            val = fn()
            self._cache[key] = val
        return val

    def dual(self, mask, c=None) -> ExtElement:
        return ExtElement(DUAL, self.n, {mask: self.one if c is None else c})

    def primal(self, mask, c=None) -> ExtElement:
        return ExtElement(PRIMAL, self.n, {mask: self.one if c is None else c})

    def v_on(self, B: int) -> dict:
        """v(eps_B)."""
        return self._memo(("v", B), lambda: contract(self.vvec, self.dual(B)).terms)

    def u_on(self, A: int) -> dict:
        """u(eps_A)."""
        return self._memo(("u", A), lambda: contract(self.uvec, self.dual(A)).terms)

    def minor_on(self, S: int, transpose: bool) -> dict:
        """(wedge^|S| X)(e_S), or with X* when transpose."""
        return self._memo(("m", S, transpose), lambda: self.mins.apply(self.primal(S), transpose).terms)

    def hodge(self, A: int, transpose: bool) -> ExtElement:
        """(wedge^(n-|A|) X^(*))(eps_A[eta])."""
        def compute():
            inner = contract(self.dual(A), self.eta)
            return self.mins.apply(inner, transpose)
        return self._memo(("h", A, transpose), compute)

    def bracket(self, P: int, A: int, transpose: bool) -> dict:
        """[eps_P ^ (wedge^(n-|A|) X^(*))(eps_A[eta])](eta)."""
        def compute():
            w = wedge(self.dual(P), self.hodge(A, transpose))
            return contract(w, self.eta).terms
        return self._memo(("b", P, A, transpose), compute)

    def hodge_eta(self, A: int, transpose: bool) -> dict:
        """[(wedge^(n-|A|) X^(*))(eps_A[eta])](eta)."""
        return self._memo(("he", A, transpose),
                          lambda: contract(self.hodge(A, transpose), self.eta).terms)


def _add(out: dict, key, c):
    cur = out.get(key)
    if cur is None:
        out[key] = c
    else:
        out[key] = cur + c


# ---------------------------------------------------------------------------
# the sixteen blocks; each returns {target label: coefficient}


def f1_to_1_v(ctx, r, lab):
    out = {}
    for M, c in ctx.v_on(lab.right).items():
        _add(out, BasisLabel(1, lab.t, lab.left, M), c)
    return out


def f1_to_1_u(ctx, r, lab):
    out = {}
    for M, c in ctx.u_on(lab.left).items():
        _add(out, BasisLabel(1, lab.t - 1, M, lab.right), c * sgn(r))
    return out


def f1_to_2_hodge(ctx, r, lab):
    # sum_i [beta_1^i ^ (wedge^(n-t) X*)(alpha[eta])](eta) (x) beta_{s-1}^i
    out = {}
    for sg, P, Q in comult_basis(lab.right, 1):
        for M, c in ctx.bracket(P, lab.left, True).items():
            _add(out, BasisLabel(2, lab.t - 1, M, Q), c * sg)
    return out


def f1_to_3_hodge(ctx, r, lab):
    # sum_j [alpha_1^j ^ (wedge^(n-s) X)(beta[eta])](eta) (x) alpha_{t-1}^j
    out = {}
    s = lab.right.bit_count()
    for sg, P, Q in comult_basis(lab.left, 1):
        for M, c in ctx.bracket(P, lab.right, False).items():
            _add(out, BasisLabel(3, s - 1, M, Q), c * sg)
    return out


def f2_to_1_minor(ctx, r, lab):
    out = {}
    for M, c in ctx.minor_on(lab.left, False).items():
        _add(out, BasisLabel(1, lab.t, M, lab.right), c * sgn(r))
    return out


def f2_to_2_v(ctx, r, lab):
    out = {}
    for M, c in ctx.v_on(lab.right).items():
        _add(out, BasisLabel(2, lab.t, lab.left, M), c)
    return out


def f2_to_2_Xu(ctx, r, lab):
    out = {}
    for M, c in contract(ctx.Xs_u, ctx.primal(lab.left)).terms.items():
        _add(out, BasisLabel(2, lab.t - 1, M, lab.right), c * sgn(r + 1))
    return out


def f2_to_4_minor(ctx, r, lab):
    # sum_j (wedge^(t-1) X)(a_{t-1}^j) (x) a_1^j(beta)
    out = {}
    for sg, P, Q in comult_basis(lab.left, 1):
        cs = contract_sign(P, lab.right)
        if not cs:
            continue
        R = lab.right ^ P
        for M, c in ctx.minor_on(Q, False).items():
            _add(out, BasisLabel(4, lab.t - 1, M, R), c * (sg * cs))
    return out


def f3_to_1_minor(ctx, r, lab):
    out = {}
    s = lab.right.bit_count()
    for M, c in ctx.minor_on(lab.left, True).items():
        _add(out, BasisLabel(1, s, lab.right, M), c * sgn(r + 1))
    return out


def f3_to_3_u(ctx, r, lab):
    out = {}
    for M, c in ctx.u_on(lab.right).items():
        _add(out, BasisLabel(3, lab.t, lab.left, M), c * sgn(r + 1))
    return out


def f3_to_3_Xv(ctx, r, lab):
    out = {}
    for M, c in contract(ctx.X_v, ctx.primal(lab.left)).terms.items():
        _add(out, BasisLabel(3, lab.t - 1, M, lab.right), c)
    return out


def f3_to_4_minor(ctx, r, lab):
    # -sum_j a_1^j(beta) (x) (wedge^(t-1) X*)(a_{t-1}^j)
    out = {}
    s = lab.right.bit_count()
    for sg, P, Q in comult_basis(lab.left, 1):
        cs = contract_sign(P, lab.right)
        if not cs:
            continue
        L = lab.right ^ P
        for M, c in ctx.minor_on(Q, True).items():
            _add(out, BasisLabel(4, s - 1, L, M), c * (-sg * cs))
    return out


def f4_to_2_hodge(ctx, r, lab):
    out = {}
    for M, c in ctx.hodge_eta(lab.left, True).items():
        _add(out, BasisLabel(2, lab.t, M, lab.right), c * sgn(r))
    return out


def f4_to_3_hodge(ctx, r, lab):
    out = {}
    s = lab.right.bit_count()
    for M, c in ctx.hodge_eta(lab.right, False).items():
        _add(out, BasisLabel(3, s, M, lab.left), c * sgn(r))
    return out


def f4_to_4_v(ctx, r, lab):
    out = {}
    for M, c in ctx.v_on(lab.right).items():
        _add(out, BasisLabel(4, lab.t, lab.left, M), c)
    return out


def f4_to_4_u(ctx, r, lab):
    out = {}
    for M, c in ctx.u_on(lab.left).items():
        _add(out, BasisLabel(4, lab.t - 1, M, lab.right), c * sgn(r))
    return out


BLOCKS: dict[tuple[int, int, str], Callable] = {
    (1, 1, "v"): f1_to_1_v,
    (1, 1, "u"): f1_to_1_u,
    (1, 2, "hodge"): f1_to_2_hodge,
    (1, 3, "hodge"): f1_to_3_hodge,
    (2, 1, "minor"): f2_to_1_minor,
    (2, 2, "v"): f2_to_2_v,
    (2, 2, "Xu"): f2_to_2_Xu,
    (2, 4, "minor"): f2_to_4_minor,
    (3, 1, "minor"): f3_to_1_minor,
    (3, 3, "u"): f3_to_3_u,
    (3, 3, "Xv"): f3_to_3_Xv,
    (3, 4, "minor"): f3_to_4_minor,
    (4, 2, "hodge"): f4_to_2_hodge,
    (4, 3, "hodge"): f4_to_3_hodge,
    (4, 4, "v"): f4_to_4_v,
    (4, 4, "u"): f4_to_4_u,
}

# blocks [target, source] negated in the tilde variant
CROSS_BLOCKS = {(1, 2), (1, 3), (4, 2), (4, 3)}


def differential(ctx: FContext, r: int, cross_sign: int = 1,
                 blocks: dict | None = None) -> PolyMatrix:
    """Matrix of f_r : F_r -> F_{r-1}.

    ``cross_sign`` multiplies the blocks from family 1 and 4 into families
    2 and 3 (``-1`` gives the tilde variant).
    """
    n = ctx.n
    src = f_labels(n, r)
    tgt = f_labels(n, r - 1)
    index = {lab: k for k, lab in enumerate(tgt)}
    blocks = blocks or BLOCKS
    mat = PolyMatrix(ctx.ring, len(tgt), len(src))
    for j, lab in enumerate(src):
        col = mat.cols[j]
        for (fs, ft, _), fn in blocks.items():
            if fs != lab.family:
                continue
            sign = cross_sign if (fs, ft) in CROSS_BLOCKS else 1
            for key, c in fn(ctx, r, lab).items():
                if not c:
                    continue
                if sign < 0:
                    c = -c
                i = index[key]
                cur = col.get(i)
                new = c if cur is None else cur + c
                if new:
                    col[i] = new
                else:
                    col.pop(i, None)
    return mat


def build_F_from_context(ctx: FContext, d_v: int, cross_sign: int = 1, name: str = "F") -> ChainComplex:
    n = ctx.n
    lo, hi = -1, 2 * n + 1
    modules = {r: f_module(n, r, d_v) for r in range(lo, hi + 1)}
    diffs = {r: differential(ctx, r, cross_sign) for r in range(lo + 1, hi + 1)}
    return ChainComplex(ctx.ring, lo, hi, modules, diffs, name)


def build_F(d: GenericData) -> ChainComplex:
    return build_F_from_context(FContext.from_data(d), d.grading.d_v, 1, "F")


def build_F_variant(d: GenericData, variant: str) -> ChainComplex:
    """``tilde``: cross blocks negated; ``minus_v``: F rebuilt with v -> -v."""
    if variant == "tilde":
        return build_F_from_context(FContext.from_data(d), d.grading.d_v, -1, "F~")
    if variant == "minus_v":
        return build_F(d.negate_v())
    raise ValueError(f"unknown variant {variant!r}")


def total_rank(n: int) -> int:
    return sum(len(f_labels(n, r)) for r in range(-1, 2 * n + 2))


# ---------------------------------------------------------------------------
# diagonal sign isomorphism F~[u, X, v] -> F[u, X, -v]


def theta_scalar(family: int, r: int, t: int) -> int:
    return {1: sgn(r + 1 - t), 2: sgn(r - t), 3: sgn(t), 4: sgn(r - t)}[family]


def iso_theta_sign(n: int, ring: PolyRing) -> dict[int, PolyMatrix]:
    out = {}
    for r in range(-1, 2 * n + 2):
        labs = f_labels(n, r)
        mat = PolyMatrix(ring, len(labs), len(labs))
        for k, lab in enumerate(labs):
            mat.cols[k][k] = ring.const(theta_scalar(lab.family, r, lab.t))
        out[r] = mat
    return out


# ---------------------------------------------------------------------------
# unimodular basis changes


def _matmul(A, B, zero):
    n = len(A)
    m = len(B[0])
    return [[sum((A[i][k] * B[k][j] for k in range(len(B))), zero) for j in range(m)] for i in range(n)]


def _transpose(A):
    return [list(r) for r in zip(*A)]


def _inverse_unimodular(T: list[list], ring) -> list[list]:
    """Inverse of a determinant-one matrix with constant entries (adjugate)."""
    from .multilinear import adjoint_entry
    n = len(T)
    return [[adjoint_entry(T, i + 1, j + 1) for j in range(n)] for i in range(n)]


class DeterminantError(ValueError):
    pass


@dataclass
class BasisChange:
    """A chain isomorphism between F and a complex built from transformed data."""

    source: ChainComplex
    target: ChainComplex
    maps: dict[int, PolyMatrix]


def _wedge_matrix_apply(mins: Minors, S: int, k: int, n: int):
    """Column of wedge^k M at basis monomial S: {T: det M[T, S]}."""
    out = {}
    for T in subsets(n, k):
        c = mins.det(T, S)
        if c:
            out[T] = c
    return out


def iso_basis_change_maps(n: int, ring: PolyRing, T: list[list], side: str) -> dict[int, PolyMatrix]:
    """Block maps Theta (``side="Theta"``) or Phi (``side="Phi"``) for theta with matrix T."""
    one = ring.one()
    T = [[c if hasattr(c, "ring") else ring.const(c) for c in row] for row in T]
    det = Minors(T, one).det(full(n), full(n))
    if det != 1:
        raise DeterminantError(f"det theta = {det}, expected 1")
    Tinv = _inverse_unimodular(T, ring)
    star = Minors(_transpose(T), one)      # theta* on F* has matrix T^t
    inv = Minors(Tinv, one)                # theta^{-1} on F
    out = {}
    for r in range(-1, 2 * n + 2):
        labs = f_labels(n, r)
        index = {lab: k for k, lab in enumerate(labs)}
        mat = PolyMatrix(ring, len(labs), len(labs))
        for j, lab in enumerate(labs):
            fam, t = lab.family, lab.t
            s = lab.right.bit_count()
            ident = {lab.left: one}
            if side == "Theta":
                if fam in (1, 4):
                    left, right = ident, _wedge_matrix_apply(star, lab.right, s, n)
                elif fam == 2:
                    left, right = _wedge_matrix_apply(inv, lab.left, t, n), _wedge_matrix_apply(star, lab.right, s, n)
                else:
                    left, right = ident, {lab.right: one}
            elif side == "Phi":
                if fam in (1, 4):
                    left, right = _wedge_matrix_apply(star, lab.left, t, n), {lab.right: one}
                elif fam == 3:
                    left, right = _wedge_matrix_apply(inv, lab.left, t, n), _wedge_matrix_apply(star, lab.right, s, n)
                else:
                    left, right = ident, {lab.right: one}
            else:
                raise ValueError(f"unknown side {side!r}")
            col = mat.cols[j]
            for L, a in left.items():
                for R, b in right.items():
                    c = a * b
                    if c:
                        i = index[BasisLabel(fam, t, L, R)]
                        col[i] = col[i] + c if i in col else c
        out[r] = mat
    return out


def transformed_data(d: GenericData, T: list[list], side: str) -> GenericData:
    """Data of the target complex: (u, X T, T^-1 v) for Theta, (T^-1 u, T^t X, v) for Phi."""
    ring = d.ring
    zero = ring.zero()
    Tp = [[c if hasattr(c, "ring") else ring.const(c) for c in row] for row in T]
    Tinv = _inverse_unimodular(Tp, ring)
    col = lambda vec: [[c] for c in vec]
    if side == "Theta":
        X = _matmul(d.X, Tp, zero)
        v = [r[0] for r in _matmul(Tinv, col(d.v), zero)]
        return GenericData(d.n, ring, list(d.u), v, X, d.grading)
    X = _matmul(_transpose(Tp), d.X, zero)
    u = [r[0] for r in _matmul(Tinv, col(d.u), zero)]
    return GenericData(d.n, ring, u, list(d.v), X, d.grading)


def iso_basis_change(d: GenericData, T: list[list], side: str) -> BasisChange:
    src = build_F(d)
    tgt = build_F(transformed_data(d, T, side))
    return BasisChange(src, tgt, iso_basis_change_maps(d.n, d.ring, T, side))


def chain_map_residual(src: ChainComplex, tgt: ChainComplex, maps: dict[int, PolyMatrix]) -> int:
    """Number of nonzero entries of tgt.d @ phi - phi @ src.d over all degrees."""
    total = 0
    for r in src.degrees():
        if r - 1 < src.lo:
            continue
        lhs = tgt.d(r) @ maps[r]
        rhs = maps[r - 1] @ src.d(r)
        total += (lhs - rhs).nnz()
    return total


# ---------------------------------------------------------------------------
# block form X = [[1, 0], [0, X']]


def _shift_mask(mask: int) -> int:
    """Mask over F' (indices 1..n-1) to mask over F (indices 2..n)."""
    return mask << 1


def is_block_form(d: GenericData) -> bool:
    X = d.X
    if X[0][0] != 1:
        return False
    return all(not X[0][j] and not X[j][0] for j in range(1, d.n))


def h_prime(ctx: FContext, r: int) -> PolyMatrix:
    """h'_r : F'_r -> F'_{r+1} for the rank n-1 data in ``ctx`` (ctx.n = n - 1)."""
    m = ctx.n
    n = m + 1
    src = f_labels(m, r)
    tgt = f_labels(m, r + 1)
    index = {lab: k for k, lab in enumerate(tgt)}
    mat = PolyMatrix(ctx.ring, len(tgt), len(src))
    for j, lab in enumerate(src):
        out: dict = {}
        if lab.family == 1:
            for M, c in ctx.hodge_eta(lab.left, True).items():
                _add(out, BasisLabel(2, lab.t, M, lab.right), c * sgn(n - 1 + r))
            s = lab.right.bit_count()
            for M, c in ctx.hodge_eta(lab.right, False).items():
                _add(out, BasisLabel(3, s, M, lab.left), c * sgn(n + 1 + r))
        elif lab.family == 2:
            for M, c in ctx.minor_on(lab.left, False).items():
                _add(out, BasisLabel(4, lab.t, M, lab.right), c * sgn(r - 1))
        elif lab.family == 3:
            s = lab.right.bit_count()
            for M, c in ctx.minor_on(lab.left, True).items():
                _add(out, BasisLabel(4, s, lab.right, M), c * sgn(r))
        for key, c in out.items():
            if c:
                mat.cols[j][index[key]] = c
    return mat


@dataclass
class BlockForm:
    """F-hat (or G for even n), the isomorphism to F, and the pieces used."""

    F: ChainComplex
    G: ChainComplex
    phi: dict[int, PolyMatrix]          # G_r -> F_r
    h: dict[int, PolyMatrix]            # h_r : F'_r -> F'_{r+1}
    prime: ChainComplex                 # (F', f') as it appears in G


def _nat_label(part: str, lab: BasisLabel) -> tuple[int, BasisLabel]:
    """Image under nat of a basis vector of F' placed in part B, C or D (sign, label)."""
    fam = lab.family
    L, R = _shift_mask(lab.left), _shift_mask(lab.right)
    one = 1  # bit for index 1 (e or eps)
    if part == "A":
        return 1, BasisLabel(fam, lab.t, L, R)
    if part == "B":
        if fam == 3:
            return 1, BasisLabel(fam, lab.t, L, R | one)
        return 1, BasisLabel(fam, lab.t + 1, L | one, R)
    if part == "C":
        if fam == 3:
            return 1, BasisLabel(fam, lab.t + 1, L | one, R)
        return 1, BasisLabel(fam, lab.t, L, R | one)
    return 1, BasisLabel(fam, lab.t + 1, L | one, R | one)


def build_G(d: GenericData) -> BlockForm:
    """Block decomposition of F for X = [[1, 0], [0, X']].

    Returns G (which equals F-hat for odd n) together with the chain
    isomorphism G -> F assembled from id, nat o rho, (-1)^r nat and
    (-1)^r nat o rho, composed with the inverse sign isomorphism for even n.
    """
    if not is_block_form(d):
        raise ValueError("X is not of the form [[1, 0], [0, X']]")
    n = d.n
    m = n - 1
    ring = d.ring
    u1, v1 = d.u[0], d.v[0]
    up, vp = d.u[1:], d.v[1:]
    Xp = [row[1:] for row in d.X[1:]]
    ctx = FContext(m, ring, up, vp, Xp)        # f'' (calculations use v')
    cross = sgn(n - 1)                         # frak f = f'' with cross blocks scaled
    fr = {r: differential(ctx, r, cross) for r in range(-1, 2 * m + 2)}
    hp = {r: h_prime(ctx, r) for r in range(-1, 2 * m + 1)}

    def fprime(r):
        if -1 <= r <= 2 * m + 1 and r - 1 >= -1:
            return fr[r]
        return PolyMatrix.zeros(ring, len(f_labels(m, r - 1)), len(f_labels(m, r)))

    def hmap(r):
        if r in hp:
            return hp[r]
        return PolyMatrix.zeros(ring, len(f_labels(m, r + 1)), len(f_labels(m, r)))

    def ident(r, c):
        k = len(f_labels(m, r))
        return PolyMatrix.identity(ring, k).scale(c) if k else PolyMatrix.zeros(ring, 0, 0)

    even = n % 2 == 0
    theta = iso_theta_sign(m, ring) if even else None

    def theta_at(r):
        k = len(f_labels(m, r))
        if not k:
            return PolyMatrix.zeros(ring, 0, 0)
        return theta[r] if even else PolyMatrix.identity(ring, k)

    def hat_sizes(r):
        return [len(f_labels(m, r)), len(f_labels(m, r - 1)), len(f_labels(m, r - 1)), len(f_labels(m, r - 2))]

    lo, hi = -1, 2 * n + 1
    F = build_F(d)
    G_modules, G_diffs, phis, h_out = {}, {}, {}, {}
    for r in range(lo, hi + 1):
        parts = [("A", r), ("B", r - 1), ("C", r - 1), ("D", r - 2)]
        labels, twists = [], []
        for part, deg in parts:
            for lab in f_labels(m, deg):
                labels.append((part, lab))
        # phi: F-hat_r -> F_r
        Fmod = F.module(r)
        phi = PolyMatrix(ring, len(Fmod), len(labels))
        for k, (part, lab) in enumerate(labels):
            sign, image = _nat_label(part, lab)
            rho = -1 if lab.family in (2, 3) else 1
            if part == "B":
                sign *= rho
            elif part == "C":
                sign *= sgn(r)
            elif part == "D":
                sign *= sgn(r) * rho
            idx = Fmod.index[image]
            phi.cols[k][idx] = ring.const(sign)
            twists.append(Fmod.twists[idx])
        G_modules[r] = LabeledModule(labels, twists)
        # theta conjugation for even n: G = diag(theta) F-hat diag(theta)^-1
        diag = block_matrix(ring, hat_sizes(r), hat_sizes(r), {
            (0, 0): theta_at(r), (1, 1): theta_at(r - 1), (2, 2): theta_at(r - 1), (3, 3): theta_at(r - 2)})
        phis[r] = phi @ diag  # diag is its own inverse
        if r > lo:
            rows, cols = hat_sizes(r - 1), hat_sizes(r)
            blocks = {
                (0, 0): fprime(r),
                (0, 1): ident(r - 1, u1 * sgn(r)),
                (0, 2): ident(r - 1, v1 * sgn(r)),
                (0, 3): hmap(r - 2),
                (1, 1): fprime(r - 1),
                (1, 3): ident(r - 2, v1 * sgn(r)),
                (2, 2): fprime(r - 1),
                (2, 3): ident(r - 2, u1 * sgn(r + 1)),
                (3, 3): fprime(r - 2),
            }
            hat = block_matrix(ring, rows, cols, blocks)
            diag_prev = block_matrix(ring, rows, rows, {
                (0, 0): theta_at(r - 1), (1, 1): theta_at(r - 2), (2, 2): theta_at(r - 2), (3, 3): theta_at(r - 3)})
            G_diffs[r] = diag_prev @ hat @ diag
    for r in range(-1, 2 * m + 1):
        h_out[r] = theta_at(r + 1) @ hmap(r) @ theta_at(r)
    prime_ctx = FContext(m, ring, up, [c * sgn(n - 1) for c in vp], Xp)
    prime = build_F_from_context(prime_ctx, 0, 1, "F'")
    G = ChainComplex(ring, lo, hi, G_modules, G_diffs, "G")
    return BlockForm(F, G, phis, h_out, prime)
