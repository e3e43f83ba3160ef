"""Dense exact linear algebra over GF(p) and QQ, plus matrix evaluation."""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .chain import PolyMatrix
from .exact_arith import evaluate


def echelon_mod_p(rows: Sequence[Sequence[int]], p: int) -> tuple[list[list[int]], list[int]]:
    """Reduced row echelon form mod p; returns (nonzero rows, pivot columns)."""
    mat = [[x % p for x in row] for row in rows]
    if not mat:
        return [], []
    ncols = len(mat[0])
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(mat)) if mat[i][c]), None)
        if piv is None:
            continue
        mat[r], mat[piv] = mat[piv], mat[r]
        inv = pow(mat[r][c], -1, p)
        prow = [x * inv % p for x in mat[r]]
        mat[r] = prow
        nz = [k for k in range(c, ncols) if prow[k]]
        for i in range(len(mat)):
            if i != r and mat[i][c]:
                f = mat[i][c]
                row = mat[i]
                for k in nz:
                    row[k] = (row[k] - f * prow[k]) % p
        pivots.append(c)
        r += 1
        if r == len(mat):
            break
    return mat[:r], pivots


def rank_mod_p(rows: Sequence[Sequence[int]], p: int) -> int:
    """Rank mod p by forward elimination (no back substitution)."""
    mat = [[x % p for x in row] for row in rows if any(row)]
    if not mat:
        return 0
    ncols = len(mat[0])
    rank = 0
    for c in range(ncols):
        piv = next((i for i in range(rank, len(mat)) if mat[i][c]), None)
        if piv is None:
            continue
        mat[rank], mat[piv] = mat[piv], mat[rank]
        prow = mat[rank]
        inv = pow(prow[c], -1, p)
        nz = [k for k in range(c, ncols) if prow[k]]
        for i in range(rank + 1, len(mat)):
            row = mat[i]
            if row[c]:
                f = row[c] * inv % p
                for k in nz:
                    row[k] = (row[k] - f * prow[k]) % p
        rank += 1
        if rank == len(mat):
            break
    return rank


def nullspace_mod_p(rows: Sequence[Sequence[int]], ncols: int, p: int) -> list[list[int]]:
    """Basis of {x : A x = 0} mod p for A given by its rows."""
    red, pivots = echelon_mod_p(rows, p) if rows else ([], [])
    free = [c for c in range(ncols) if c not in set(pivots)]
    basis = []
    for f in free:
        vec = [0] * ncols
        vec[f] = 1
        for row, pc in zip(red, pivots):
            vec[pc] = (-row[f]) % p
        basis.append(vec)
    return basis


def rank_qq(rows: Sequence[Sequence]) -> int:
    """Rank over QQ with Fraction arithmetic."""
    mat = [[Fraction(x) for x in row] for row in rows if any(row)]
    if not mat:
        return 0
    ncols = len(mat[0])
    rank = 0
    for c in range(ncols):
        piv = next((i for i in range(rank, len(mat)) if mat[i][c]), None)
        if piv is None:
            continue
        mat[rank], mat[piv] = mat[piv], mat[rank]
        prow = mat[rank]
        for i in range(rank + 1, len(mat)):
            if mat[i][c]:
                f = mat[i][c] / prow[c]
                mat[i] = [a - f * b for a, b in zip(mat[i], prow)]
        rank += 1
    return rank


def evaluate_matrix(m: PolyMatrix, point: Sequence[int], p: int, cache: dict | None = None) -> list[list[int]]:
    """Dense integer matrix of m evaluated at ``point`` mod p."""
    if cache is None:
        cache = {}
    out = [[0] * m.ncols for _ in range(m.nrows)]
    for j, col in enumerate(m.cols):
        for i, val in col.items():
            out[i][j] = evaluate(val, point, p, cache)
    return out
