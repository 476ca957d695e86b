"""Sparse exact Gaussian elimination over any field (Fraction, RatFunc).

Rows are ``dict[column -> value]`` with no stored zeros.  Pivot choice is
always the smallest column index present in a row, so callers control
canonical forms by choosing the column order.
"""
from __future__ import annotations

from typing import Iterable

Row = dict


def _is_zero(x) -> bool:
    return x == 0


class Echelon:
    """Incrementally maintained reduced row echelon form.

    ``pivot_values`` records every element that was inverted; for Q(k) these
    carry the finitely many levels at which the elimination is invalid.
    """

    def __init__(self):
        self.rows: dict[int, Row] = {}  # pivot column -> row with 1 at pivot
        self.pivot_values: list = []

    def reduce(self, row: Row) -> Row:
        row = dict(row)
        # eliminate pivots in increasing column order; reduced rows keep this stable
        changed = True
        while changed:
            changed = False
            for c in sorted(set(row) & self.rows.keys()):
                if c not in row:
                    continue
                coef = row.pop(c)
                for cc, v in self.rows[c].items():
                    if cc == c:
                        continue
                    nv = row.get(cc, 0) - coef * v
                    if _is_zero(nv):
                        row.pop(cc, None)
                    else:
                        row[cc] = nv
                changed = True
        return row

    def add(self, row: Row) -> int | None:
        """Insert a row; returns the new pivot column or None if dependent."""
        r = self.reduce(row)
        if not r:
            return None
        p = min(r)
        inv = 1 / r[p] if not hasattr(r[p], "inverse") else r[p].inverse()
        self.pivot_values.append(r[p])
        r = {c: v * inv for c, v in r.items()}
        r[p] = r[p] * 0 + 1
        for q, other in self.rows.items():
            if p in other:
                coef = other[p]
                for cc, v in r.items():
                    nv = other.get(cc, 0) - coef * v
                    if _is_zero(nv):
                        other.pop(cc, None)
                    else:
                        other[cc] = nv
        self.rows[p] = r
        return p

    @property
    def rank(self) -> int:
        return len(self.rows)

    def pivots(self) -> list[int]:
        return sorted(self.rows)

    def basis(self) -> list[Row]:
        return [self.rows[p] for p in self.pivots()]


def rref(rows: Iterable[Row]) -> Echelon:
    e = Echelon()
    for r in rows:
        e.add(r)
    return e


def rank(rows: Iterable[Row]) -> int:
    return rref(rows).rank


def nullspace(rows: Iterable[Row], ncols: int, one=1) -> tuple[list[Row], Echelon]:
    """Basis of ``{x : row . x = 0 for all rows}`` over columns ``0..ncols-1``."""
    e = rref(rows)
    pivots = set(e.rows)
    basis = []
    for f in range(ncols):
        if f in pivots:
            continue
        v = {f: one}
        for p, r in e.rows.items():
            if f in r:
                v[p] = -r[f]
        basis.append(v)
    return basis, e


def solve(rows: list[Row], rhs: list, ncols: int):
    """One solution of ``A x = b`` (dict) or None when inconsistent."""
    aug = ncols
    e = Echelon()
    for r, b in zip(rows, rhs):
        rr = dict(r)
        if not _is_zero(b):
            rr[aug] = b
        e.add(rr)
    if aug in e.rows:
        return None
    x = {}
    for p, r in e.rows.items():
        if aug in r:
            x[p] = r[aug]
    return x


def dense_to_rows(mat) -> list[Row]:
    return [{j: v for j, v in enumerate(row) if not _is_zero(v)} for row in mat]


def transpose_rows(rows: list[Row]) -> list[Row]:
    out: dict[int, Row] = {}
    for i, r in enumerate(rows):
        for j, v in r.items():
            out.setdefault(j, {})[i] = v
    n = max(out) + 1 if out else 0
    return [out.get(j, {}) for j in range(n)]


def inverse_dense(mat: list[list]) -> list[list]:
    """Inverse of a square matrix given as a list of rows (exact entries)."""
    n = len(mat)
    a = [list(r) + [1 if i == j else 0 for j in range(n)] for i, r in enumerate(mat)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        a[col], a[piv] = a[piv], a[col]
        inv = 1 / a[col][col]
        a[col] = [v * inv for v in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                c = a[r][col]
                a[r] = [v - c * w for v, w in zip(a[r], a[col])]
    return [row[n:] for row in a]
