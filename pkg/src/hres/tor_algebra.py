"""Products of degree-one Tor classes through a lift gamma: wedge M_1 -> F.

M_1 splits as V_1 + V_2 + V_3 with
V_1 = F_1(1)^(1) (basis alpha (x) beta), V_2 = F_1(2)^(1) (a (x) 1) and
V_3 = F_1(3)^(1) (a (x) 1).  gamma is given on wedge^r V_3 and wedge^r V_2 for
every r and on all of wedge^2 M_1.  The product wedge^2 Tor_1 -> Tor_2 is the
constant part of psi_2 o gamma_2, since M is minimal and Tor = M (x) k.

On wedge^2 V_1 gamma factors through the section x ^ y -> x (x) y (x before y
in the basis order of M_1).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import comb

from .chain import BasisLabel, PolyMatrix
from .exact_arith import Poly
from .linalg import rank_qq
from .minimal_complex import MinimalComplex, _tens, _merge, _scale, build_minimal
from .multilinear import (
    DUAL, PRIMAL, ExtElement, Minors, Orientation, contract, wedge,
)
from .generic_data import GenericData


def _sign_rr(r: int) -> int:
    return -1 if (r * (r - 1) // 2) % 2 else 1


class _GammaEnv:
    def __init__(self, d: GenericData):
        self.n = n = d.n
        self.ring = d.ring
        self.one = d.ring.one()
        self.zero = d.ring.zero()
        self.mins = Minors(d.X, self.one)
        o = Orientation(n, self.one)
        self.e_n = o.primal()
        self.u = ExtElement(PRIMAL, n, {1 << i: c for i, c in enumerate(d.u)})
        self.v = ExtElement(PRIMAL, n, {1 << i: c for i, c in enumerate(d.v)})

    def P(self, mask):
        return ExtElement(PRIMAL, self.n, {mask: self.one})

    def D(self, mask):
        return ExtElement(DUAL, self.n, {mask: self.one})

    def X(self, a: ExtElement) -> ExtElement:
        return self.mins.apply(a, False)

    def Xs(self, a: ExtElement) -> ExtElement:
        return self.mins.apply(a, True)

    def scalar(self, x: ExtElement) -> Poly:
        """Coefficient of a degree-zero element."""
        return x.terms.get(0, self.zero)


def _kind(lab: BasisLabel) -> int:
    """1, 2 or 3 for V_1, V_2, V_3."""
    return lab.family


def gamma_pure(env: _GammaEnv, labels: list[BasisLabel]) -> dict:
    """Blocks (a) and (b): gamma_r on a_1 (x) 1 ^ ... ^ a_r (x) 1, all from V_3 or all from V_2."""
    r = len(labels)
    fam = labels[0].family
    a = env.P(0)
    for lab in labels:
        a = wedge(a, env.P(lab.left))
    one_p, one_d = env.P(0), env.D(0)
    if fam == 3:
        return _merge(_tens(2, one_p, env.Xs(a)), _tens(3, a, one_d))
    s = _sign_rr(r)
    return _merge(_scale(_tens(2, a, one_d), s), _scale(_tens(3, one_p, env.X(a)), s))


def gamma_pair(env: _GammaEnv, x: BasisLabel, y: BasisLabel) -> dict:
    """gamma_2(x ^ y) for basis vectors x before y of M_1."""
    kx, ky = _kind(x), _kind(y)
    one_p, one_d = env.P(0), env.D(0)
    sc = env.scalar
    if kx == ky and kx in (2, 3):
        return gamma_pure(env, [x, y])
    if kx == 1 and ky == 2:                               # block (c)
        al, be, a = env.D(x.left), env.D(x.right), env.P(y.left)
        Xa_al = wedge(env.X(a), al)
        return _merge(
            _scale(_tens(1, Xa_al, be), -1),
            _scale(_tens(2, a, be), -sc(contract(env.u, al))),
            _scale(_tens(3, one_p, Xa_al), -sc(contract(env.v, be))),
            _scale(_tens(4, al, one_d), sc(contract(a, be))),
        )
    if kx == 1 and ky == 3:                               # block (d)
        al, be, a = env.D(x.left), env.D(x.right), env.P(y.left)
        Xs_be = wedge(env.Xs(a), be)
        return _merge(
            _scale(_tens(1, al, Xs_be), -1),
            _scale(_tens(2, one_p, Xs_be), sc(contract(env.u, al))),
            _scale(_tens(3, a, al), sc(contract(env.v, be))),
            _scale(_tens(4, one_d, be), sc(contract(a, al))),
        )
    if kx == 2 and ky == 3:                               # block (e)
        a, b = env.P(x.left), env.P(y.left)
        return _merge(_scale(_tens(2, a, env.Xs(b)), -1), _scale(_tens(3, b, env.X(a)), -1))
    if kx == 1 and ky == 1:                               # block (f) via x (x) y
        al, be = env.D(x.left), env.D(x.right)
        al2, be2 = env.D(y.left), env.D(y.right)
        e_n = env.e_n
        t3 = contract(wedge(be, env.Xs(contract(wedge(al, al2), e_n))), e_n)
        t5 = contract(wedge(al2, env.X(contract(wedge(be, be2), e_n))), e_n)
        u_al, u_al2 = sc(contract(env.u, al)), sc(contract(env.u, al2))
        v_be, v_be2 = sc(contract(env.v, be)), sc(contract(env.v, be2))
        return _merge(
            _scale(_tens(1, wedge(al, al2), be), -v_be2),
            _scale(_tens(1, al2, wedge(be, be2)), -u_al),
            _tens(2, t3, be2),
            _scale(_tens(2, one_p, wedge(be, be2)), u_al * u_al2),
            _scale(_tens(3, t5, al), -1),
            _scale(_tens(3, one_p, wedge(al, al2)), -v_be * v_be2),
        )
    raise ValueError(f"gamma_2 needs x before y in the basis order, got {x}, {y}")


@dataclass
class GammaMap:
    """gamma_r as a matrix F_r <- wedge^r(M_1) on the listed index tuples."""

    r: int
    tuples: list           # increasing index tuples into the M_1 basis
    matrix: PolyMatrix


def _to_column(vec: dict, mod, ring) -> dict:
    col = {}
    for lab, c in vec.items():
        if not c:
            continue
        if lab not in mod.index:
            raise KeyError(f"gamma lands outside F: {lab}")
        col[mod.index[lab]] = c if isinstance(c, Poly) else ring.const(c)
    return col


def build_gamma(mc: MinimalComplex, r: int = 2, pure_family: int | None = None) -> GammaMap:
    """gamma_r on all of wedge^2 M_1 (r = 2), or on wedge^r V_2 / wedge^r V_3 (pure_family 2 or 3)."""
    env = _GammaEnv(mc.data)
    M1 = mc.M.module(1)
    Fr = mc.F.module(r)
    ring = mc.F.ring
    if pure_family is not None:
        idx = [k for k, lab in enumerate(M1.labels) if lab.family == pure_family]
        tuples = list(combinations(idx, r))
        cols = [_to_column(gamma_pure(env, [M1.labels[k] for k in T]), Fr, ring) for T in tuples]
    else:
        if r != 2:
            raise ValueError("the mixed part of gamma is only defined in degree 2")
        tuples = list(combinations(range(len(M1)), 2))
        cols = [_to_column(gamma_pair(env, M1.labels[i], M1.labels[j]), Fr, ring) for i, j in tuples]
    return GammaMap(r, tuples, PolyMatrix(ring, len(Fr), len(cols), cols))


def wedge_boundary(mc: MinimalComplex, tuples: list, r: int) -> tuple[list, PolyMatrix]:
    """Koszul-type boundary of wedge^r M_1 induced by m_1: sum (-1)^(k+1) m_1(x_k) x_1..^x_k..x_r.

    Returns the target tuples (degree r-1) and the matrix.
    """
    ring = mc.F.ring
    m1 = mc.M.d(1)
    targets = sorted({T[:k] + T[k + 1:] for T in tuples for k in range(r)})
    index = {T: i for i, T in enumerate(targets)}
    mat = PolyMatrix(ring, len(targets), len(tuples))
    for j, T in enumerate(tuples):
        for k, x in enumerate(T):
            c = m1[0, x]
            if c:
                mat.add_entry(index[T[:k] + T[k + 1:]], j, c if k % 2 == 0 else -c)
    return targets, mat


def chain_square_residual(mc: MinimalComplex, gamma: GammaMap, lower: GammaMap | PolyMatrix) -> int:
    """Nonzero entries of f_r gamma_r - gamma_(r-1) boundary.

    ``lower`` gives gamma_(r-1); for r = 2 pass rho_1 (gamma_1 = rho_1).
    """
    targets, bd = wedge_boundary(mc, gamma.tuples, gamma.r)
    if isinstance(lower, GammaMap):
        pos = {T: k for k, T in enumerate(lower.tuples)}
        low = lower.matrix.select(None, [pos[T] for T in targets])
    else:
        low = lower.select(None, [T[0] for T in targets])
    diff = mc.F.d(gamma.r) @ gamma.matrix - low @ bd
    return diff.nnz()


def gamma_one(mc: MinimalComplex) -> PolyMatrix:
    """gamma_1 from blocks (a) and (b) at r = 1 on V_2 + V_3, and rho_1 on V_1."""
    env = _GammaEnv(mc.data)
    M1 = mc.M.module(1)
    F1 = mc.F.module(1)
    ring = mc.F.ring
    cols = []
    for k, lab in enumerate(M1.labels):
        if lab.family in (2, 3):
            cols.append(_to_column(gamma_pure(env, [lab]), F1, ring))
        else:
            cols.append(dict(mc.rho[1].cols[k]))
    return PolyMatrix(ring, len(F1), len(cols), cols)


# ---------------------------------------------------------------------------
# the product on Tor_1 and the presentation


@dataclass
class TorSquare:
    n: int
    dim_tor1: int
    pairs: list               # index pairs of the M_1 basis
    rank: int                 # rank of wedge^2 Tor_1 -> Tor_2
    kernel_dim: int
    predicted_zero_ok: bool   # columns in the predicted relation span vanish
    predicted_rank: int       # number of surviving wedge monomials in the presentation

    @property
    def matches(self) -> bool:
        return self.predicted_zero_ok and self.rank == self.predicted_rank

    def to_json(self) -> dict:
        return {"n": self.n, "dim_tor1": self.dim_tor1, "rank": self.rank, "kernel_dim": self.kernel_dim,
                "predicted_rank": self.predicted_rank, "predicted_zero_ok": self.predicted_zero_ok,
                "matches": self.matches}


def _survives(n: int, kinds: tuple) -> bool:
    """Whether a wedge monomial with the given V-kinds is nonzero in the presentation."""
    c = {k: kinds.count(k) for k in (1, 2, 3)}
    if sum(1 for k in (1, 2, 3) if c[k]) > 1:
        return False
    if c[1] >= 2 or c[2] >= n - 1 or c[3] >= n - 1:
        return False
    return True


def tor1_square(mc: MinimalComplex) -> TorSquare:
    """Constant part of psi_2 gamma_2 and its comparison with the presentation."""
    n = mc.n
    gamma = build_gamma(mc, 2)
    prod = mc.psi[2] @ gamma.matrix
    M1 = mc.M.module(1)
    rows = [[Fraction(0)] * prod.ncols for _ in range(prod.nrows)]
    for i, j, v in prod.entries():
        c = v.constant_term()
        if c:
            rows[i][j] = Fraction(c)
    rank = rank_qq(rows)
    kinds = [(M1.labels[i].family, M1.labels[j].family) for i, j in gamma.tuples]
    keep = [k for k, kd in enumerate(kinds) if _survives(n, kd)]
    dead = [k for k in range(len(kinds)) if k not in set(keep)]
    zero_ok = all(not rows[i][k] for k in dead for i in range(len(rows)))
    return TorSquare(n, len(M1), gamma.tuples, rank, len(gamma.tuples) - rank, zero_ok, len(keep))


def hilbert_of_presentation(n: int, top: int | None = None) -> list[int]:
    """Dimensions of the quotient of wedge(V_1 + V_2 + V_3) by the relations, degrees 0..top."""
    if n < 3:
        raise ValueError("the presentation is stated for n >= 3")
    top = 2 * n if top is None else top
    dims = {1: n * n, 2: n, 3: n}
    out = []
    for deg in range(top + 1):
        total = 0
        for a in range(deg + 1):
            for b in range(deg + 1 - a):
                c = deg - a - b
                kinds = (1,) * a + (2,) * b + (3,) * c
                if deg == 0 or _survives(n, kinds):
                    total += comb(dims[1], a) * comb(dims[2], b) * comb(dims[3], c)
        out.append(total)
    return out


def pure_chain_residuals(mc: MinimalComplex, max_r: int | None = None) -> dict:
    """Residual of the chain square for gamma on wedge^r V_2 and wedge^r V_3, 2 <= r <= max_r."""
    n = mc.n
    max_r = n if max_r is None else max_r
    out = {}
    for fam in (2, 3):
        prev = None
        for r in range(1, max_r + 1):
            g = build_gamma(mc, r, pure_family=fam)
            if r == 1:
                prev = g
                # gamma_1 on V_fam must match rho_1 for the square to start
                idx = [T[0] for T in g.tuples]
                out[(fam, 1)] = (g.matrix - mc.rho[1].select(None, idx)).nnz()
                continue
            out[(fam, r)] = chain_square_residual(mc, g, prev)
            prev = g
    return out


def build_all(d: GenericData) -> tuple[MinimalComplex, GammaMap]:
    mc = build_minimal(d)
    return mc, build_gamma(mc, 2)


__all__ = [
    "GammaMap", "TorSquare", "build_gamma", "chain_square_residual", "gamma_one", "gamma_pair",
    "gamma_pure", "hilbert_of_presentation", "pure_chain_residuals", "tor1_square", "wedge_boundary",
]
