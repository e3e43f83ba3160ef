"""Splitting F = L + M + N-hat and the minimal complex M.

Splitting maps on basis monomials:

* ``mu_s(e_k (x) eps_B) = e_k(eps_B)``
* ``sigma_s(eps_A) = sum eps_p(e_n) (x) eps_(A - p)`` over the (1, s-1) comultiplication
* ``ell_s(eps_A) = e_j (x) eps_j ^ eps_A`` with j the smallest index not in A
  (``ell_n = 0``)
* ``lambda_s(e_([n]-j) (x) eps_B) = (-1)^(j-1) eps_j ^ eps_B`` when j < min B, else 0.
  Here ``e_([n]-j)`` is the increasing basis monomial, which equals
  ``(-1)^(j-1) eps_j(e_n)``, so ``lambda o sigma = id``.

Both idempotents ``ell mu`` and ``sigma lambda`` are monomial-local, so the
kernel parts are spanned by explicit vectors indexed by the non-pivot basis
labels and every basis and coordinate matrix is integral.

For n = 2 the module lists, the tau table and the overrides
``ell_0(1) = e_1 (x) eps_1`` and ``lambda_1(e_1 (x) eps_1) = -eps_n`` are used as
given for that case.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .big_complex import build_F, f_labels, sgn
from .chain import BasisLabel, ChainComplex, LabeledModule, PolyMatrix, label_json
from .exact_arith import PolyRing, format_poly
from .generic_data import GenericData
from .multilinear import (
    DUAL, PRIMAL, ExtElement, Orientation, bit, comult_basis, contract, contract_sign, full,
    members, orientation_sign, subsets, wedge, wedge_sign,
)


class RankMismatch(RuntimeError):
    """The pieces of a decomposition do not tile F_r (a splitting bug)."""


@dataclass(frozen=True)
class SplittingChoice:
    """Names of the splitting rules in use.

    Only the rules documented in the module docstring are implemented; the
    n = 2 overrides are applied whenever n = 2.
    """

    ell_rule: str = "min-complement"
    lambda_rule: str = "below-min-support"

    def __post_init__(self):
        if (self.ell_rule, self.lambda_rule) != ("min-complement", "below-min-support"):
            raise ValueError(f"unsupported splitting rules {self}")


CANONICAL = SplittingChoice()


# ---------------------------------------------------------------------------
# splitting maps on basis monomials


def mu_column(k: int, B: int) -> dict[int, int]:
    """mu(e_k (x) eps_B) as {mask: coeff}."""
    s = contract_sign(bit(k), B)
    return {B ^ bit(k): s} if s else {}


def sigma_column(n: int, A: int) -> dict[tuple[int, int], int]:
    """sigma(eps_A) as {(left mask of wedge^(n-1) F, right mask): coeff}."""
    out = {}
    for sg, P, Q in comult_basis(A, 1):
        c = sg * contract_sign(P, full(n))
        out[(full(n) ^ P, Q)] = out.get((full(n) ^ P, Q), 0) + c
    return {k: v for k, v in out.items() if v}


def ell_column(n: int, A: int) -> tuple[int, int, int] | None:
    """ell(eps_A) = sign * e_j (x) eps_(A+j) as (j, mask, sign), or None for ell_n."""
    comp = full(n) ^ A
    if not comp:
        return None
    j = members(comp)[0]
    return j, A | bit(j), wedge_sign(bit(j), A)


def lambda_value(n: int, left: int, B: int) -> tuple[int, int] | None:
    """lambda(e_left (x) eps_B) = coeff * eps_mask, as (mask, coeff) or None."""
    j = members(full(n) ^ left)[0]
    if n == 2 and B.bit_count() == 1:
        # lambda_1(e_1 (x) eps_1) = -eps_n = +eps_12; zero on the other three
        if left == bit(1) and B == bit(1):
            return full(2), -orientation_sign(2)
        return None
    if B and j > members(B)[0]:
        return None
    if B & bit(j):
        return None
    return B | bit(j), sgn(j - 1)


def mu_sigma(n: int, s: int):
    """Matrices of mu_s: F (x) wedge^s F* -> wedge^(s-1) F* and sigma_s: wedge^s F* -> wedge^(n-1) F (x) wedge^(s-1) F*.

    Returned as integer dictionaries {(row key, column key): coeff}.
    """
    mu = {}
    for k in range(1, n + 1):
        for B in subsets(n, s):
            for M, c in mu_column(k, B).items():
                mu[(M, (k, B))] = c
    sigma = {}
    for A in subsets(n, s):
        for key, c in sigma_column(n, A).items():
            sigma[(key, A)] = c
    return mu, sigma


def ell_lambda(n: int, s: int):
    """Integer dictionaries of ell_s and lambda_s in the same format as ``mu_sigma``."""
    ell = {}
    if s != n:
        for A in subsets(n, s):
            got = ell_column(n, A)
            if got:
                j, M, c = got
                ell[((j, M), A)] = c
    lam = {}
    if s != -1:
        for j in range(1, n + 1):
            left = full(n) ^ bit(j)
            for B in subsets(n, s):
                got = lambda_value(n, left, B)
                if got:
                    lam[(got[0], (left, B))] = got[1]
    return ell, lam


# ---------------------------------------------------------------------------
# pieces of F_r


@dataclass
class Part:
    """A piece of F_r with basis vectors (columns) and coordinate functionals (rows).

    ``labels`` are F-labels naming the basis vectors; vectors and rows are
    dictionaries over F_r indices with integer or Poly entries.
    """

    name: str
    family: int
    t: int
    kind: str
    labels: list
    vectors: list
    rows: list


def _summand_labels(n, r, fam, t):
    return [lab for lab in f_labels(n, r) if lab.family == fam and lab.t == t]


def whole_part(n, r, fam, t, index) -> Part:
    labs = _summand_labels(n, r, fam, t)
    vecs = [{index[l]: 1} for l in labs]
    return Part(f"F{r}({fam})^{t}", fam, t, "whole", labs, vecs, [dict(v) for v in vecs])


def mu_parts(n, r, fam, index) -> tuple[Part, Part]:
    """[F_r(fam)^(1)]' = Ker mu_(r-1) and [F_r(fam)^(1)]'' = Im ell_(r-2)."""
    labs = _summand_labels(n, r, fam, 1)
    pivots = {}
    im_labels, im_vecs, im_rows = [], [], []
    if r - 2 >= 0 and r - 2 != n:
        for A in subsets(n, r - 2):
            got = ell_column(n, A)
            if not got:
                continue
            j, M, c = got
            lab = BasisLabel(fam, 1, bit(j), M)
            pivots[lab] = (A, c)
            im_labels.append(lab)
            im_vecs.append({index[lab]: c})
            row = {}
            for l2 in labs:
                k = members(l2.left)[0]
                for Mm, cc in mu_column(k, l2.right).items():
                    if Mm == A:
                        row[index[l2]] = cc
            im_rows.append(row)
    ker_labels, ker_vecs, ker_rows = [], [], []
    for lab in labs:
        if lab in pivots:
            continue
        vec = {index[lab]: 1}
        k = members(lab.left)[0]
        for A, c in mu_column(k, lab.right).items():
            got = ell_column(n, A) if A.bit_count() != n else None
            if got:
                j, M, sg = got
                piv = BasisLabel(fam, 1, bit(j), M)
                vec[index[piv]] = vec.get(index[piv], 0) - c * sg
        ker_labels.append(lab)
        ker_vecs.append({i: v for i, v in vec.items() if v})
        ker_rows.append({index[lab]: 1})
    return (Part(f"[F{r}({fam})^1]'", fam, 1, "ker_mu", ker_labels, ker_vecs, ker_rows),
            Part(f"[F{r}({fam})^1]''", fam, 1, "im_ell", im_labels, im_vecs, im_rows))


def lambda_parts(n, r, fam, index) -> tuple[Part, Part]:
    """[F_r(fam)^(n-1)]' = Ker lambda_(r+1-n) and [F_r(fam)^(n-1)]'' = Im sigma_(r+2-n)."""
    t = n - 1
    labs = _summand_labels(n, r, fam, t)
    piv_value = {}
    for lab in labs:
        got = lambda_value(n, lab.left, lab.right)
        if got:
            piv_value[lab] = got
    s1 = r + 2 - n
    im_labels, im_vecs, im_rows = [], [], []
    sig_cache = {}
    if s1 >= 1:
        for A in subsets(n, s1):
            col = sigma_column(n, A)
            sig_cache[A] = col
            vec = {index[BasisLabel(fam, t, L, R)]: c for (L, R), c in col.items()}
            row = {index[lab]: c for lab, (M, c) in piv_value.items() if M == A}
            # name by the pivot it hits
            pivot = next(lab for lab, (M, c) in piv_value.items() if M == A)
            im_labels.append(pivot)
            im_vecs.append(vec)
            im_rows.append(row)
    ker_labels, ker_vecs, ker_rows = [], [], []
    for lab in labs:
        if lab in piv_value:
            continue
        row = {index[lab]: 1}
        # subtract the lab-coordinate of sigma(lambda(x))
        for p, (M, c) in piv_value.items():
            col = sig_cache.get(M) or sigma_column(n, M)
            coeff = col.get((lab.left, lab.right), 0)
            if coeff:
                row[index[p]] = row.get(index[p], 0) - c * coeff
        ker_labels.append(lab)
        ker_vecs.append({index[lab]: 1})
        ker_rows.append({i: v for i, v in row.items() if v})
    return (Part(f"[F{r}({fam})^{t}]'", fam, t, "ker_lambda", ker_labels, ker_vecs, ker_rows),
            Part(f"[F{r}({fam})^{t}]''", fam, t, "im_sigma", im_labels, im_vecs, im_rows))


# ---------------------------------------------------------------------------
# decomposition


@dataclass
class Decomposition:
    n: int
    F: ChainComplex
    parts: dict = field(default_factory=dict)       # (X, r) -> list[Part]
    B: dict = field(default_factory=dict)           # (X, r) -> PolyMatrix F_r <- X_r
    C: dict = field(default_factory=dict)           # (X, r) -> PolyMatrix X_r <- F_r
    modules: dict = field(default_factory=dict)     # (X, r) -> LabeledModule

    def rank(self, X: str, r: int) -> int:
        return len(self.modules.get((X, r)) or ())

    def projector(self, X: str, r: int) -> PolyMatrix:
        return self.B[(X, r)] @ self.C[(X, r)]


def decomposition_spec(n: int, r: int) -> dict[str, set]:
    """Which pieces of F_r go to L, M and N-hat, as sets of (family, t, kind).

    kind is "whole", "'" (kernel part) or "''" (image part).
    """
    L, M, N = set(), set(), set()
    # M-hat
    for t in range(n + 1):
        if t not in (0, n, r + 1, r + 1 - n):
            M.add((1, t, "whole"))
        if t not in (0, n, r - 1, r - 1 - n):
            M.add((4, t, "whole"))
    for fam in (2, 3):
        M.add((fam, n - 1, "'"))
        for t in range(2, n - 1):
            M.add((fam, t, "whole"))
        M.add((fam, 1, "'"))
    if r == 0:
        M.add((3, 0, "whole"))
    if r == 2:
        M.add((3, 1, "''"))
    if r == 2 * n - 2:
        M.add((3, n - 1, "''"))
    if r == 2 * n:
        M.add((3, n, "whole"))
    # N-hat
    if n <= r <= 2 * n - 1:
        N.add((1, n, "whole"))
    if n <= r <= 2 * n - 2:
        N.add((1, r + 1 - n, "whole"))
    if 0 <= r <= n:
        N.add((2, 0, "whole"))
    if 2 <= r <= n + 1:
        N.add((2, 1, "''"))
    if 1 <= r <= n:
        N.add((3, 0, "whole"))
    if 3 <= r <= n + 1:
        N.add((3, 1, "''"))
    if n + 1 <= r <= 2 * n + 1:
        N.add((4, n, "whole"))
    if n + 1 <= r <= 2 * n:
        N.add((4, r - 1 - n, "whole"))
    # L
    if -1 <= r <= n - 1:
        L.add((1, 0, "whole"))
    if 0 <= r <= n - 1:
        L.add((1, r + 1, "whole"))
    if n - 1 <= r <= 2 * n - 2:
        L.add((2, n - 1, "''"))
    if n <= r <= 2 * n:
        L.add((2, n, "whole"))
    if n - 1 <= r <= 2 * n - 3:
        L.add((3, n - 1, "''"))
    if n <= r <= 2 * n - 1:
        L.add((3, n, "whole"))
    if 1 <= r <= n:
        L.add((4, 0, "whole"))
    if 2 <= r <= n:
        L.add((4, r - 1, "whole"))
    return {"L": L, "M": M, "N": N}


def decomposition_spec_n2(r: int) -> dict[str, set]:
    """Explicit lists for n = 2."""
    L = {
        4: {(2, 2, "whole")},
        3: {(2, 2, "whole"), (3, 2, "whole")},
        2: {(2, 2, "whole"), (3, 2, "whole"), (3, 1, "''"), (4, 1, "whole"), (4, 0, "whole")},
        1: {(1, 2, "whole"), (1, 0, "whole"), (2, 1, "whole"), (3, 1, "whole"), (4, 0, "whole")},
        0: {(1, 1, "whole"), (1, 0, "whole")},
        -1: {(1, 0, "whole")},
    }
    M = {
        4: {(3, 2, "whole")},
        3: {(4, 1, "whole")},
        2: {(2, 1, "'"), (3, 1, "'")},
        1: {(1, 1, "whole")},
        0: {(3, 0, "whole")},
    }
    N = {
        5: {(4, 2, "whole")},
        4: {(4, 2, "whole"), (4, 1, "whole")},
        3: {(1, 2, "whole"), (2, 1, "whole"), (3, 1, "whole"), (4, 2, "whole"), (4, 0, "whole")},
        2: {(1, 2, "whole"), (1, 1, "whole"), (2, 1, "''"), (2, 0, "whole"), (3, 0, "whole")},
        1: {(2, 0, "whole"), (3, 0, "whole")},
        0: {(2, 0, "whole")},
    }
    return {"L": L.get(r, set()), "M": M.get(r, set()), "N": N.get(r, set())}


def _split_kind(n: int, fam: int, t: int) -> str | None:
    """Which splitting applies to F_r(fam)^(t) when a primed piece is requested."""
    if fam not in (2, 3):
        return None
    if n == 2:
        return "mu" if fam == 2 else "lambda"
    if t == 1:
        return "mu"
    if t == n - 1:
        return "lambda"
    return None


def _matrix_from_vectors(ring, nrows, vectors) -> PolyMatrix:
    cols = [{i: ring.const(c) if not hasattr(c, "ring") else c for i, c in v.items() if c} for v in vectors]
    return PolyMatrix(ring, nrows, len(cols), cols)


def _matrix_from_rows(ring, ncols, rows) -> PolyMatrix:
    out = PolyMatrix(ring, len(rows), ncols)
    for i, row in enumerate(rows):
        for j, c in row.items():
            if c:
                out.cols[j][i] = ring.const(c) if not hasattr(c, "ring") else c
    return out


def build_decomposition(F: ChainComplex, n: int, choice: SplittingChoice = CANONICAL) -> Decomposition:
    """Bases and coordinate maps of L_r, M_r and N-hat_r inside every F_r."""
    ring = F.ring
    dec = Decomposition(n, F)
    for r in F.degrees():
        spec = decomposition_spec(n, r) if n >= 3 else decomposition_spec_n2(r)
        mod = F.module(r)
        index = mod.index
        split_cache: dict = {}

        def piece(fam, t, kind):
            if kind == "whole":
                return whole_part(n, r, fam, t, index)
            how = _split_kind(n, fam, t)
            if how is None:
                raise RankMismatch(f"no splitting for F_{r}({fam})^{t}")
            key = (fam, t)
            if key not in split_cache:
                split_cache[key] = mu_parts(n, r, fam, index) if how == "mu" else lambda_parts(n, r, fam, index)
            prime, dprime = split_cache[key]
            return prime if kind == "'" else dprime

        covered: dict = {}
        for X in ("L", "M", "N"):
            parts = []
            for fam, t, kind in sorted(spec[X]):
                if not _summand_labels(n, r, fam, t):
                    continue
                p = piece(fam, t, kind)
                covered.setdefault((fam, t), []).append(kind)
                if p.labels:
                    parts.append(p)
            dec.parts[(X, r)] = parts
            labels = [l for p in parts for l in p.labels]
            twists = [mod.twists[index[l]] for l in labels]
            dec.modules[(X, r)] = LabeledModule(labels, twists)
            dec.B[(X, r)] = _matrix_from_vectors(ring, len(mod), [v for p in parts for v in p.vectors])
            dec.C[(X, r)] = _matrix_from_rows(ring, len(mod), [row for p in parts for row in p.rows])
        # every nonempty summand is covered exactly once
        for lab in mod.labels:
            key = (lab.family, lab.t)
            kinds = sorted(covered.get(key, []))
            if kinds in (["'"], ["''"]):
                other = "''" if kinds == ["'"] else "'"
                if not piece(lab.family, lab.t, other).labels:
                    kinds = ["'", "''"]
            if kinds not in (["whole"], ["'", "''"]):
                raise RankMismatch(f"F_{r}({lab.family})^{lab.t} covered as {kinds}")
        total = sum(dec.rank(X, r) for X in ("L", "M", "N"))
        if total != len(mod):
            raise RankMismatch(f"ranks of L, M, N-hat add to {total}, rank F_{r} = {len(mod)}")
    return dec


# ---------------------------------------------------------------------------
# tau, psi, rho, m


def _tens(fam: int, x: ExtElement, y: ExtElement) -> dict:
    """x (x) y as {BasisLabel: coeff} in family ``fam``."""
    out = {}
    for L, a in x.terms.items():
        for R, b in y.terms.items():
            c = a * b
            if c:
                lab = BasisLabel(fam, L.bit_count(), L, R)
                cur = out.get(lab)
                out[lab] = c if cur is None else cur + c
    return out


def _merge(*dicts) -> dict:
    out = {}
    for d in dicts:
        for k, v in d.items():
            cur = out.get(k)
            out[k] = v if cur is None else cur + v
    return {k: v for k, v in out.items() if v}


def _scale(d: dict, c) -> dict:
    return {k: v * c for k, v in d.items()}


class _Env:
    """Exterior-algebra helpers over the data ring for building tau."""

    def __init__(self, d: GenericData):
        self.n = n = d.n
        self.ring = d.ring
        self.one = d.ring.one()
        self.d = d
        o = Orientation(n, self.one)
        self.e_n = o.primal()
        self.eps_n = o.dual()
        self.u = ExtElement(PRIMAL, n, {bit(i + 1): c for i, c in enumerate(d.u)})
        self.v = ExtElement(PRIMAL, n, {bit(i + 1): c for i, c in enumerate(d.v)})

    def P(self, mask, c=None):
        return ExtElement(PRIMAL, self.n, {mask: self.one if c is None else c})

    def D(self, mask, c=None):
        return ExtElement(DUAL, self.n, {mask: self.one if c is None else c})

    def ell(self, x: ExtElement, fam: int) -> dict:
        """ell applied to a dual element, placed in family ``fam`` stratum 1."""
        out = {}
        for A, c in x.terms.items():
            got = ell_column(self.n, A)
            if not got:
                continue
            j, M, sg = got
            lab = BasisLabel(fam, 1, bit(j), M)
            cur = out.get(lab)
            out[lab] = c * sg if cur is None else cur + c * sg
        return {k: v for k, v in out.items() if v}

    def lam(self, left: ExtElement, right: ExtElement) -> ExtElement:
        """lambda(left (x) right) for left in wedge^(n-1) F and right dual."""
        out = ExtElement(DUAL, self.n, {})
        for L, a in left.terms.items():
            for R, b in right.terms.items():
                got = lambda_value(self.n, L, R)
                if got:
                    out = out + ExtElement(DUAL, self.n, {got[0]: a * b * got[1]})
        return out


def tau_general(env: _Env, r: int, part: Part, k: int) -> dict:
    """tau_r on the k-th basis vector of an L-part (n >= 3)."""
    n = env.n
    lab = part.labels[k]
    fam, kind = part.family, part.kind
    if fam == 1 and lab.t == 0 and part.t == 0:
        return {BasisLabel(2, 0, 0, lab.right): env.one * sgn(r + 1)}
    if fam == 1:
        return {BasisLabel(3, 0, 0, lab.left): env.one * sgn(r)}
    if kind == "im_sigma":
        # basis vector sigma(eps_A); A is recovered from the pivot label
        A = lambda_value(n, lab.left, lab.right)[0]
        if fam == 2:
            out = _tens(1, env.eps_n, env.D(A))
            if r == n - 1:
                vb = contract(env.v, env.D(A))
                out = _merge(out, _scale(_tens(3, vb, env.eps_n), sgn(n)))
            return out
        out = _tens(1, env.D(A), env.eps_n)
        if r == n - 1:
            ub = contract(env.u, env.D(A))
            out = _merge(out, _scale(_tens(2, ub, env.eps_n), -1))
        return out
    if fam in (2, 3) and lab.t == n:
        beta = env.D(lab.right)
        if fam == 2:
            out = _scale(_tens(4, env.eps_n, beta), sgn(r + 1))
            if r == n:
                out = _merge(out, env.ell(contract(env.u, env.eps_n), 3))
            return out
        out = _scale(_tens(4, beta, env.eps_n), sgn(r + 1))
        if r == n:
            out = _merge(out, _scale(env.ell(contract(env.v, env.eps_n), 2), sgn(n)))
        return out
    if fam == 4 and part.t == 0 and lab.t == 0:
        return env.ell(env.D(lab.right), 2)
    if fam == 4:
        return _scale(env.ell(env.D(lab.left), 3), -1)
    raise ValueError(f"no tau for {part.name}")


def tau_n2(env: _Env, r: int, part: Part, k: int) -> dict:
    """tau_r for n = 2, following the explicit table for that case."""
    lab = part.labels[k]
    fam = part.family
    e_n, eps_n = env.e_n, env.eps_n
    one_p = env.P(0)
    one_d = env.D(0)
    if fam == 1:
        if lab.t == 0 and part.t == 0:
            return {BasisLabel(2, 0, 0, lab.right): env.one * sgn(r + 1)}
        return {BasisLabel(3, 0, 0, lab.left): env.one * sgn(r)}
    if r == 1 and fam == 2:
        a = env.P(lab.left)
        return _merge(_tens(1, eps_n, contract(a, eps_n)),
                      _tens(3, contract(wedge(env.v, a), eps_n), eps_n))
    if r == 1 and fam == 3:
        a = env.P(lab.left)
        return _merge(_tens(1, contract(a, eps_n), eps_n),
                      _tens(2, contract(wedge(a, env.u), eps_n), eps_n))
    if r == 1 and fam == 4:
        v1, v2 = env.d.v
        return _merge(_scale(_tens(1, eps_n, env.D(bit(2))), v1),
                      _scale(_tens(3, one_p, eps_n), v1 * v2),
                      env.ell(one_d, 2))
    if r == 2 and fam == 2:  # e_n (x) 1
        lam = env.lam(env.u, contract(env.u, eps_n))
        return _merge(_scale(_tens(4, eps_n, one_d), -1),
                      _tens(3, env.u, eps_n),
                      _scale(_tens(1, lam, eps_n), -1))
    if r == 2 and fam == 3 and part.kind == "im_sigma":
        # basis vector sigma(eps_12) = sign_of(eps_n) * sigma(eps_n)
        return _scale(_tens(1, eps_n, eps_n), sign_of(eps_n))
    if r == 2 and fam == 3:  # e_n (x) 1
        return _merge(_scale(_tens(4, one_d, eps_n), -1), _tens(2, env.v, eps_n))
    if r == 2 and fam == 4 and lab.t == 0:
        alpha = env.D(lab.right)
        return _tens(2, contract(alpha, e_n), eps_n)
    if r == 2 and fam == 4:
        alpha = env.D(lab.left)
        lam = env.lam(contract(alpha, e_n), contract(env.u, eps_n))
        return _merge(_scale(_tens(3, contract(alpha, e_n), eps_n), -1), _tens(1, lam, eps_n))
    if r == 3 and fam == 2:
        return _tens(4, eps_n, env.D(lab.right))
    if r == 3 and fam == 3:
        return _tens(4, env.D(lab.right), eps_n)
    if r == 4 and fam == 2:
        # basis vector e_12 (x) eps_12 = -(e_n (x) eps_n)
        return _scale(_tens(4, eps_n, eps_n), 1)
    raise ValueError(f"no tau for {part.name} at r={r}")


def sign_of(eps_n: ExtElement) -> int:
    """+1 if eps_n is the increasing top monomial, -1 otherwise."""
    c = next(iter(eps_n.terms.values()))
    return 1 if c == 1 else -1


@dataclass
class MinimalComplex:
    M: ChainComplex
    F: ChainComplex
    dec: Decomposition
    tau: dict          # r -> PolyMatrix F_{r+1} <- L_r
    psi: dict          # r -> PolyMatrix M_r <- F_r
    rho: dict          # r -> PolyMatrix F_r <- M_r
    data: GenericData

    @property
    def n(self):
        return self.dec.n


def build_tau(d: GenericData, F: ChainComplex, dec: Decomposition) -> dict[int, PolyMatrix]:
    env = _Env(d)
    n = d.n
    ring = F.ring
    fn = tau_general if n >= 3 else tau_n2
    out = {}
    for r in F.degrees():
        tgt = F.module(r + 1)
        cols = []
        for part in dec.parts[("L", r)]:
            for k in range(len(part.labels)):
                vec = fn(env, r, part, k)
                col = {}
                for lab, c in vec.items():
                    if c:
                        if lab not in tgt.index:
                            raise RankMismatch(f"tau_{r} lands outside F_{r + 1}: {lab}")
                        col[tgt.index[lab]] = c if hasattr(c, "ring") else ring.const(c)
                cols.append(col)
        out[r] = PolyMatrix(ring, len(tgt), len(cols), cols)
    return out


def build_tau_psi_rho_m(d: GenericData, F: ChainComplex, dec: Decomposition) -> MinimalComplex:
    ring = F.ring
    tau = build_tau(d, F, dec)
    psi, rho, modules, diffs = {}, {}, {}, {}
    for r in F.degrees():
        CM, CL = dec.C[("M", r)], dec.C[("L", r)]
        psi[r] = CM - CM @ (F.d(r + 1) @ (tau[r] @ CL)) if r + 1 <= F.hi else CM
        modules[r] = dec.modules[("M", r)]
    for r in F.degrees():
        BM = dec.B[("M", r)]
        fB = F.d(r) @ BM
        if r - 1 >= F.lo:
            rho[r] = BM - tau[r - 1] @ (dec.C[("L", r - 1)] @ fB)
            diffs[r] = psi[r - 1] @ fB
        else:
            rho[r] = BM
    lo = min(r for r in F.degrees() if len(modules[r])) if any(len(m) for m in modules.values()) else 0
    hi = max(r for r in F.degrees() if len(modules[r]))
    M = ChainComplex(ring, lo, hi, {r: modules[r] for r in range(lo, hi + 1)},
                     {r: diffs[r] for r in range(lo + 1, hi + 1)}, "M")
    return MinimalComplex(M, F, dec, tau, psi, rho, d)


def build_minimal(d: GenericData) -> MinimalComplex:
    """Build F, its decomposition and the minimal complex M (n = 2 uses the explicit lists)."""
    F = build_F(d)
    dec = build_decomposition(F, d.n)
    return build_tau_psi_rho_m(d, F, dec)


# ---------------------------------------------------------------------------
# n = 2: the Koszul basis


@dataclass
class KoszulBasis:
    g: list                   # g_1..g_4
    w: dict                   # r -> PolyMatrix (M_r coordinates of w_S, S increasing)
    subsets: dict             # r -> list of index tuples S


def n2_elements(d: GenericData) -> list:
    u, v, X = d.u, d.v, d.X
    return [X[1][1] + v[0] * u[0], -X[1][0] + v[1] * u[0], -X[0][1] + v[0] * u[1], X[0][0] + v[1] * u[1]]


def build_n2(d: GenericData) -> tuple[MinimalComplex, KoszulBasis]:
    """M for n = 2 together with the w-basis and the elements g_1..g_4."""
    from itertools import combinations

    if d.n != 2:
        raise ValueError("build_n2 needs n = 2")
    mc = build_minimal(d)
    ring = d.ring
    F, dec = mc.F, mc.dec
    one = 1
    # vectors in F_r as {label: coeff}
    e1, e2, e12 = bit(1), bit(2), full(2)
    w_vectors = {
        0: [{BasisLabel(3, 0, 0, 0): one}],
        1: [{BasisLabel(1, 1, a, b): -1} for a, b in ((e1, e1), (e1, e2), (e2, e1), (e2, e2))],
        2: [
            {BasisLabel(3, 1, e2, e1): 1},                                   # w12
            {BasisLabel(2, 1, e2, e1): -1},                                  # w13
            {BasisLabel(3, 1, e2, e2): 1},                                   # w14
            {BasisLabel(2, 1, e1, e1): 1, BasisLabel(2, 1, e2, e2): -1,
             BasisLabel(3, 1, e2, e2): -1},                                  # w23
            {BasisLabel(2, 1, e1, e2): 1},                                   # w24
            {BasisLabel(3, 1, e1, e2): -1},                                  # w34
        ],
        3: [
            {BasisLabel(4, 1, e1, e1): 1},                                   # w123
            {BasisLabel(4, 1, e1, e2): 1},                                   # w124
            {BasisLabel(4, 1, e2, e1): -1},                                  # w134
            {BasisLabel(4, 1, e2, e2): -1},                                  # w234
        ],
        # -e_n (x) eps_n with eps_n = -eps_12
        4: [{BasisLabel(3, 2, e12, e12): -orientation_sign(2)}],
    }
    w = {}
    subs = {}
    for r, vecs in w_vectors.items():
        mod = F.module(r)
        cols = [{mod.index[l]: ring.const(c) for l, c in v.items()} for v in vecs]
        Wf = PolyMatrix(ring, len(mod), len(cols), cols)
        w[r] = dec.C[("M", r)] @ Wf
        subs[r] = list(combinations(range(1, 5), r))
    return mc, KoszulBasis(n2_elements(d), w, subs)


def koszul_matrix(ring: PolyRing, g: list, r: int) -> PolyMatrix:
    """Koszul differential on g: w_S -> sum_k (-1)^(k+1) g_(s_k) w_(S - s_k)."""
    from itertools import combinations

    k = len(g)
    src = list(combinations(range(1, k + 1), r))
    tgt = list(combinations(range(1, k + 1), r - 1))
    index = {S: i for i, S in enumerate(tgt)}
    mat = PolyMatrix(ring, len(tgt), len(src))
    for j, S in enumerate(src):
        for pos, s in enumerate(S):
            T = S[:pos] + S[pos + 1:]
            c = g[s - 1] if pos % 2 == 0 else -g[s - 1]
            mat.add_entry(index[T], j, c)
    return mat


# ---------------------------------------------------------------------------
# export


def _matrix_json(mat: PolyMatrix, rows: LabeledModule, cols: LabeledModule) -> list:
    return [[label_json(rows.labels[i]), label_json(cols.labels[j]), format_poly(v)]
            for i, j, v in mat.entries()]


def minimal_to_json(mc: MinimalComplex, koszul: KoszulBasis | None = None) -> dict:
    """Complex export of M plus the tau, psi and rho matrices (and the w-basis for n = 2)."""
    F, dec = mc.F, mc.dec
    out = mc.M.to_json()
    out["tau"] = [{"degree": r, "entries": _matrix_json(mc.tau[r], F.module(r + 1), dec.modules[("L", r)])}
                  for r in sorted(mc.tau)]
    out["psi"] = [{"degree": r, "entries": _matrix_json(mc.psi[r], dec.modules[("M", r)], F.module(r))}
                  for r in sorted(mc.psi)]
    out["rho"] = [{"degree": r, "entries": _matrix_json(mc.rho[r], F.module(r), dec.modules[("M", r)])}
                  for r in sorted(mc.rho)]
    if koszul is not None:
        out["koszul"] = {
            "g": [format_poly(g) for g in koszul.g],
            "w": [{"degree": r, "subsets": [list(S) for S in koszul.subsets[r]],
                   "entries": [[label_json(dec.modules[("M", r)].labels[i]), list(koszul.subsets[r][j]),
                                format_poly(v)] for i, j, v in koszul.w[r].entries()]}
                  for r in sorted(koszul.w)],
        }
    return out
