"""Matrices over Q[x], Smith normal form and linear solving.

Vectors act as rows: a presented module's relations are the rows of a
matrix and a combination ``u`` of them is ``u @ m``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .errors import DimensionMismatch
from .poly import ONE, ZERO, Poly, PolyLike


class PolyMatrix:
    __slots__ = ("rows", "nrows", "ncols")

    def __init__(self, rows: Iterable[Iterable[PolyLike]], ncols: int | None = None):
        rows = tuple(tuple(Poly.coerce(v) for v in r) for r in rows)
        if ncols is None:
            if not rows:
                raise DimensionMismatch("empty PolyMatrix needs an explicit column count")
            ncols = len(rows[0])
        if any(len(r) != ncols for r in rows):
            raise DimensionMismatch("ragged PolyMatrix rows")
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "nrows", len(rows))
        object.__setattr__(self, "ncols", ncols)

    def __setattr__(self, name, value):
        raise AttributeError("PolyMatrix is immutable")

    @classmethod
    def zeros(cls, n: int, m: int) -> "PolyMatrix":
        return cls(([ZERO] * m for _ in range(n)), ncols=m)

    @classmethod
    def identity(cls, n: int) -> "PolyMatrix":
        return cls(([ONE if i == j else ZERO for j in range(n)] for i in range(n)), ncols=n)

    @classmethod
    def diagonal(cls, diag: Sequence[PolyLike], n: int, m: int) -> "PolyMatrix":
        return cls(
            ([diag[i] if i == j and i < len(diag) else ZERO for j in range(m)] for i in range(n)),
            ncols=m,
        )

    @property
    def shape(self) -> tuple[int, int]:
        return self.nrows, self.ncols

    def __getitem__(self, ij) -> Poly:
        i, j = ij
        return self.rows[i][j]

    def __matmul__(self, other: "PolyMatrix") -> "PolyMatrix":
        if self.ncols != other.nrows:
            raise DimensionMismatch(f"cannot multiply {self.shape} by {other.shape}")
        out = []
        for r in self.rows:
            acc = [ZERO] * other.ncols
            for k, a in enumerate(r):
                if a:
                    for j, b in enumerate(other.rows[k]):
                        if b:
                            acc[j] = acc[j] + a * b
            out.append(acc)
        return PolyMatrix(out, ncols=other.ncols)

    def vecmul(self, u: Sequence[PolyLike]) -> tuple[Poly, ...]:
        """Row vector times matrix."""
        if len(u) != self.nrows:
            raise DimensionMismatch(f"vector of length {len(u)} for {self.shape} matrix")
        acc = [ZERO] * self.ncols
        for k, a in enumerate(u):
            a = Poly.coerce(a)
            if a:
                for j, b in enumerate(self.rows[k]):
                    if b:
                        acc[j] = acc[j] + a * b
        return tuple(acc)

    def stack(self, extra: Iterable[Sequence[PolyLike]]) -> "PolyMatrix":
        return PolyMatrix(list(self.rows) + [list(r) for r in extra], ncols=self.ncols)

    def max_degree(self) -> int:
        return max((v.degree for r in self.rows for v in r), default=-1)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PolyMatrix):
            return NotImplemented
        return self.shape == other.shape and self.rows == other.rows

    def __hash__(self) -> int:
        return hash((self.shape, self.rows))

    def __repr__(self) -> str:
        body = ", ".join("[" + ", ".join(str(v) for v in r) + "]" for r in self.rows)
        return f"PolyMatrix([{body}], ncols={self.ncols})"


@dataclass(frozen=True)
class SmithForm:
    """``U @ m @ V == diag(d)``; ``V_inv`` is the inverse of ``V``."""

    diagonal: tuple[Poly, ...]
    U: PolyMatrix
    V: PolyMatrix
    V_inv: PolyMatrix

    @property
    def rank(self) -> int:
        return sum(1 for d in self.diagonal if d)


def snf(m: PolyMatrix) -> SmithForm:
    """Smith normal form with deterministic pivoting.

    Each stage pivots on a nonzero entry of least degree in the trailing
    submatrix, ties broken by lowest (row, col). Diagonal entries are monic.
    """
    r, c = m.shape
    A = [list(row) for row in m.rows]
    U = [[ONE if i == j else ZERO for j in range(r)] for i in range(r)]
    V = [[ONE if i == j else ZERO for j in range(c)] for i in range(c)]
    Vi = [[ONE if i == j else ZERO for j in range(c)] for i in range(c)]

    def swap_rows(i, j):
        if i != j:
            A[i], A[j] = A[j], A[i]
            U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        if i != j:
            for row in A:
                row[i], row[j] = row[j], row[i]
            for row in V:
                row[i], row[j] = row[j], row[i]
            Vi[i], Vi[j] = Vi[j], Vi[i]

    def add_row(dst, src, q):
        # row_dst += q * row_src
        A[dst] = [a + q * b for a, b in zip(A[dst], A[src])]
        U[dst] = [a + q * b for a, b in zip(U[dst], U[src])]

    def add_col(dst, src, q):
        # col_dst += q * col_src; inverse update: row_src(Vi) -= q * row_dst(Vi)
        for row in A:
            row[dst] = row[dst] + q * row[src]
        for row in V:
            row[dst] = row[dst] + q * row[src]
        Vi[src] = [a - q * b for a, b in zip(Vi[src], Vi[dst])]

    def pivot(t):
        best = None
        for i in range(t, r):
            for j in range(t, c):
                e = A[i][j]
                if e and (best is None or e.degree < best[0]):
                    best = (e.degree, i, j)
        return best

    for t in range(min(r, c)):
        best = pivot(t)
        if best is None:
            break
        while True:
            _, i, j = best
            swap_rows(t, i)
            swap_cols(t, j)
            p = A[t][t]
            clean = True
            for i in range(t + 1, r):
                if A[i][t]:
                    q, rem = divmod(A[i][t], p)
                    add_row(i, t, -q)
                    clean = clean and rem.is_zero()
            for j in range(t + 1, c):
                if A[t][j]:
                    q, rem = divmod(A[t][j], p)
                    add_col(j, t, -q)
                    clean = clean and rem.is_zero()
            if clean:
                bad = next(
                    (i for i in range(t + 1, r) for j in range(t + 1, c) if not p.divides(A[i][j])),
                    None,
                )
                if bad is None:
                    break
                add_row(t, bad, ONE)
            best = pivot(t)
        lc = A[t][t].lc
        if lc != 1:
            A[t] = [a / lc for a in A[t]]
            U[t] = [a / lc for a in U[t]]

    diag = tuple(A[i][i] for i in range(min(r, c)))
    return SmithForm(
        diagonal=diag,
        U=PolyMatrix(U, ncols=r),
        V=PolyMatrix(V, ncols=c),
        V_inv=PolyMatrix(Vi, ncols=c),
    )


def solve_with_form(form: SmithForm, b: Sequence[PolyLike]) -> Optional[tuple[Poly, ...]]:
    """Solve ``u @ m == b`` given ``form = snf(m)``; None if unsolvable."""
    w = form.V.vecmul(b)
    nrows = form.U.nrows
    y = [ZERO] * nrows
    for i, wi in enumerate(w):
        d = form.diagonal[i] if i < len(form.diagonal) else ZERO
        if d.is_zero():
            if wi:
                return None
            continue
        q, rem = divmod(wi, d)
        if rem:
            return None
        y[i] = q
    return form.U.vecmul(y)


def solve_linear(m: PolyMatrix, b: Sequence[PolyLike]) -> Optional[tuple[Poly, ...]]:
    """Return ``u`` with ``u @ m == b`` over Q[x], or None."""
    if len(b) != m.ncols:
        raise DimensionMismatch(f"right-hand side has length {len(b)}, matrix has {m.ncols} columns")
    return solve_with_form(snf(m), b)


def det(m: PolyMatrix) -> Poly:
    """Determinant by fraction-free (Bareiss) elimination."""
    n = m.nrows
    if n != m.ncols:
        raise DimensionMismatch("determinant of a non-square matrix")
    if n == 0:
        return ONE
    A = [list(r) for r in m.rows]
    sign = 1
    prev = ONE
    for k in range(n - 1):
        if not A[k][k]:
            swap = next((i for i in range(k + 1, n) if A[i][k]), None)
            if swap is None:
                return ZERO
            A[k], A[swap] = A[swap], A[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]).exact_div(prev)
        prev = A[k][k]
    return A[n - 1][n - 1] * sign
