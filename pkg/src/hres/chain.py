"""Labeled free modules, sparse polynomial matrices and chain complexes."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterable, Iterator, NamedTuple, Sequence

from .exact_arith import Poly, PolyRing, format_poly


class BasisLabel(NamedTuple):
    """Basis vector ``left (x) right`` of family ``family`` at stratum ``t``.

    ``left`` and ``right`` are bitmasks over {1..n} (bit i-1 for index i).
    Families 1 and 4 are dual (x) dual, families 2 and 3 primal (x) dual.
    """

    family: int
    t: int
    left: int
    right: int

    def to_json(self):
        return {
            "family": self.family,
            "t": self.t,
            "left": mask_members(self.left),
            "right": mask_members(self.right),
        }

    def __str__(self):
        lft = "".join(map(str, mask_members(self.left))) or "-"
        rgt = "".join(map(str, mask_members(self.right))) or "-"
        return f"F{self.family}^{self.t}[{lft}|{rgt}]"


def mask_members(mask: int) -> list[int]:
    out, i = [], 1
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def label_json(label):
    if hasattr(label, "to_json"):
        return label.to_json()
    if isinstance(label, tuple):
        return [label_json(x) for x in label]
    return label


class LabeledModule:
    """Free module with an ordered list of hashable basis labels and twists."""

    __slots__ = ("labels", "twists", "index")

    def __init__(self, labels: Sequence[Hashable], twists: Sequence[int] | None = None):
        self.labels = list(labels)
        self.twists = list(twists) if twists is not None else [0] * len(self.labels)
        if len(self.twists) != len(self.labels):
            raise ValueError("one twist per label")
        self.index = {lab: k for k, lab in enumerate(self.labels)}
        if len(self.index) != len(self.labels):
            raise ValueError("labels must be unique")

    def __len__(self):
        return len(self.labels)

    @property
    def rank(self) -> int:
        return len(self.labels)

    def sub(self, positions: Sequence[int]) -> "LabeledModule":
        return LabeledModule([self.labels[k] for k in positions], [self.twists[k] for k in positions])

    def __repr__(self):
        return f"LabeledModule(rank={len(self)})"


class PolyMatrix:
    """Sparse matrix stored by columns: ``cols[j]`` maps row index -> nonzero Poly."""

    __slots__ = ("ring", "nrows", "ncols", "cols")

    def __init__(self, ring: PolyRing, nrows: int, ncols: int, cols: list[dict] | None = None):
        self.ring = ring
        self.nrows = nrows
        self.ncols = ncols
        self.cols = cols if cols is not None else [dict() for _ in range(ncols)]

    # construction
    @classmethod
    def zeros(cls, ring, nrows, ncols):
        return cls(ring, nrows, ncols)

    @classmethod
    def identity(cls, ring, n, scalar=1):
        one = ring.const(scalar)
        return cls(ring, n, n, [{k: one} for k in range(n)] if one else None)

    @classmethod
    def from_dense(cls, ring, rows: Sequence[Sequence]):
        nrows = len(rows)
        ncols = len(rows[0]) if rows else 0
        m = cls(ring, nrows, ncols)
        for i, row in enumerate(rows):
            for j, val in enumerate(row):
                m[i, j] = val
        return m

    def copy(self) -> "PolyMatrix":
        return PolyMatrix(self.ring, self.nrows, self.ncols, [dict(c) for c in self.cols])

    # access
    def __getitem__(self, ij):
        i, j = ij
        return self.cols[j].get(i) or self.ring.zero()

    def __setitem__(self, ij, val):
        i, j = ij
        if not isinstance(val, Poly):
            val = self.ring.const(val)
        if val:
            self.cols[j][i] = val
        else:
            self.cols[j].pop(i, None)

    def add_entry(self, i, j, val):
        col = self.cols[j]
        cur = col.get(i)
        new = val if cur is None else cur + val
        if new:
            col[i] = new
        elif cur is not None:
            del col[i]

    def entries(self) -> Iterator[tuple[int, int, Poly]]:
        for j, col in enumerate(self.cols):
            for i in sorted(col):
                yield i, j, col[i]

    @property
    def shape(self):
        return (self.nrows, self.ncols)

    def nnz(self) -> int:
        return sum(len(c) for c in self.cols)

    def is_zero(self) -> bool:
        return all(not c for c in self.cols)

    def first_nonzero(self):
        for j, col in enumerate(self.cols):
            if col:
                i = min(col)
                return i, j, col[i]
        return None

    def to_dense(self) -> list[list[Poly]]:
        z = self.ring.zero()
        out = [[z] * self.ncols for _ in range(self.nrows)]
        for i, j, v in self.entries():
            out[i][j] = v
        return out

    # algebra
    def _check(self, other):
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")

    def __add__(self, other: "PolyMatrix") -> "PolyMatrix":
        self._check(other)
        out = self.copy()
        for j, col in enumerate(other.cols):
            for i, v in col.items():
                out.add_entry(i, j, v)
        return out

    def __neg__(self):
        return PolyMatrix(self.ring, self.nrows, self.ncols, [{i: -v for i, v in c.items()} for c in self.cols])

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "PolyMatrix":
        out = PolyMatrix(self.ring, self.nrows, self.ncols)
        for j, col in enumerate(self.cols):
            for i, v in col.items():
                w = v * c
                if w:
                    out.cols[j][i] = w
        return out

    def __matmul__(self, other: "PolyMatrix") -> "PolyMatrix":
        if self.ncols != other.nrows:
            raise ValueError(f"cannot compose {self.shape} @ {other.shape}")
        acols = self.cols
        out = []
        for bcol in other.cols:
            acc: dict[int, Poly] = {}
            for k, b in bcol.items():
                for i, a in acols[k].items():
                    cur = acc.get(i)
                    prod = a * b
                    acc[i] = prod if cur is None else cur + prod
            out.append({i: v for i, v in acc.items() if v})
        return PolyMatrix(self.ring, self.nrows, other.ncols, out)

    def transpose(self) -> "PolyMatrix":
        out = PolyMatrix(self.ring, self.ncols, self.nrows)
        for j, col in enumerate(self.cols):
            for i, v in col.items():
                out.cols[i][j] = v
        return out

    def map(self, fn: Callable[[Poly], Poly], ring: PolyRing | None = None) -> "PolyMatrix":
        out = PolyMatrix(ring or self.ring, self.nrows, self.ncols)
        for j, col in enumerate(self.cols):
            for i, v in col.items():
                w = fn(v)
                if w:
                    out.cols[j][i] = w
        return out

    def select(self, rows: Sequence[int] | None = None, cols: Sequence[int] | None = None) -> "PolyMatrix":
        """Submatrix on the given row and column positions (in that order)."""
        cols_idx = range(self.ncols) if cols is None else cols
        if rows is None:
            return PolyMatrix(self.ring, self.nrows, len(cols_idx), [dict(self.cols[j]) for j in cols_idx])
        pos = {r: k for k, r in enumerate(rows)}
        out = []
        for j in cols_idx:
            out.append({pos[i]: v for i, v in self.cols[j].items() if i in pos})
        return PolyMatrix(self.ring, len(rows), len(cols_idx), out)

    def __eq__(self, other):
        return isinstance(other, PolyMatrix) and self.shape == other.shape and self.cols == other.cols

    def __repr__(self):
        return f"PolyMatrix({self.nrows}x{self.ncols}, nnz={self.nnz()})"


def block_matrix(ring, row_sizes: Sequence[int], col_sizes: Sequence[int], blocks: dict) -> PolyMatrix:
    """Assemble a matrix from ``blocks[(bi, bj)]`` placed on the given grid."""
    roff = [0]
    for s in row_sizes:
        roff.append(roff[-1] + s)
    coff = [0]
    for s in col_sizes:
        coff.append(coff[-1] + s)
    out = PolyMatrix(ring, roff[-1], coff[-1])
    for (bi, bj), blk in blocks.items():
        if blk is None:
            continue
        if blk.shape != (row_sizes[bi], col_sizes[bj]):
            raise ValueError(f"block {(bi, bj)} has shape {blk.shape}")
        for j, col in enumerate(blk.cols):
            tgt = out.cols[coff[bj] + j]
            for i, v in col.items():
                tgt[roff[bi] + i] = v
    return out


@dataclass
class ChainComplex:
    """Modules C_lo..C_hi and differentials d_r: C_r -> C_{r-1}."""

    ring: PolyRing
    lo: int
    hi: int
    modules: dict[int, LabeledModule]
    diffs: dict[int, PolyMatrix] = field(default_factory=dict)
    name: str = ""

    def module(self, r: int) -> LabeledModule:
        return self.modules.get(r) or LabeledModule([])

    def rank(self, r: int) -> int:
        return len(self.module(r))

    def d(self, r: int) -> PolyMatrix:
        mat = self.diffs.get(r)
        if mat is None:
            return PolyMatrix.zeros(self.ring, self.rank(r - 1), self.rank(r))
        return mat

    def degrees(self) -> range:
        return range(self.lo, self.hi + 1)

    def ranks(self) -> dict[int, int]:
        return {r: self.rank(r) for r in self.degrees()}

    def map_entries(self, fn, ring=None) -> "ChainComplex":
        return ChainComplex(
            ring or self.ring, self.lo, self.hi, dict(self.modules),
            {r: m.map(fn, ring) for r, m in self.diffs.items()}, self.name,
        )

    def to_json(self) -> dict:
        mods = []
        for r in self.degrees():
            mod = self.module(r)
            mods.append({
                "degree": r,
                "rank": len(mod),
                "labels": [label_json(lab) for lab in mod.labels],
                "twists": mod.twists,
            })
        diffs = []
        for r in self.degrees():
            if r - 1 < self.lo:
                continue
            src, tgt = self.module(r), self.module(r - 1)
            entries = [
                [label_json(tgt.labels[i]), label_json(src.labels[j]), format_poly(v)]
                for i, j, v in self.d(r).entries()
            ]
            diffs.append({"degree": r, "entries": entries})
        return {"name": self.name, "n": self.ring.n, "lo": self.lo, "hi": self.hi,
                "modules": mods, "differentials": diffs}


def matrix_from_columns(ring, nrows: int, columns: Iterable[dict]) -> PolyMatrix:
    cols = [dict(c) for c in columns]
    return PolyMatrix(ring, nrows, len(cols), cols)
