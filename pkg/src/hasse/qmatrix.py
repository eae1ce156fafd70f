"""Rational matrices as immutable tuples of rows.

Multiplication skips zero entries, which keeps the Kronecker-structured maps
of the monadic layer cheap.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

from .errors import DimensionMismatch


class QMatrix:
    __slots__ = ("rows", "nrows", "ncols")

    def __init__(self, rows: Iterable[Iterable], ncols: int | None = None):
        rows = tuple(tuple(Fraction(v) for v in r) for r in rows)
        if ncols is None:
            ncols = len(rows[0]) if rows else 0
        if any(len(r) != ncols for r in rows):
            raise DimensionMismatch("ragged matrix rows")
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "nrows", len(rows))
        object.__setattr__(self, "ncols", ncols)

    def __setattr__(self, name, value):
        raise AttributeError("QMatrix is immutable")

    @classmethod
    def zeros(cls, n: int, m: int | None = None) -> "QMatrix":
        m = n if m is None else m
        return cls(([0] * m for _ in range(n)), ncols=m)

    @classmethod
    def identity(cls, n: int) -> "QMatrix":
        return cls(([1 if i == j else 0 for j in range(n)] for i in range(n)), ncols=n)

    @classmethod
    def from_columns(cls, cols: Sequence[Sequence], nrows: int | None = None) -> "QMatrix":
        if not cols:
            return cls.zeros(nrows or 0, 0)
        n = len(cols[0])
        return cls(([c[i] for c in cols] for i in range(n)), ncols=len(cols))

    @property
    def shape(self) -> tuple[int, int]:
        return self.nrows, self.ncols

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def column(self, j: int) -> tuple[Fraction, ...]:
        return tuple(r[j] for r in self.rows)

    def columns(self) -> list[tuple[Fraction, ...]]:
        return [self.column(j) for j in range(self.ncols)]

    def is_zero(self) -> bool:
        return all(v == 0 for r in self.rows for v in r)

    # -- arithmetic ---------------------------------------------------------

    def _check_same(self, other: "QMatrix"):
        if self.shape != other.shape:
            raise DimensionMismatch(f"shapes {self.shape} and {other.shape}")

    def __add__(self, other: "QMatrix") -> "QMatrix":
        self._check_same(other)
        return QMatrix(
            ([a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)),
            ncols=self.ncols,
        )

    def __sub__(self, other: "QMatrix") -> "QMatrix":
        self._check_same(other)
        return QMatrix(
            ([a - b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)),
            ncols=self.ncols,
        )

    def __neg__(self) -> "QMatrix":
        return QMatrix(([-a for a in r] for r in self.rows), ncols=self.ncols)

    def scale(self, c) -> "QMatrix":
        c = Fraction(c)
        return QMatrix(([a * c for a in r] for r in self.rows), ncols=self.ncols)

    def __matmul__(self, other: "QMatrix") -> "QMatrix":
        if self.ncols != other.nrows:
            raise DimensionMismatch(f"cannot compose {self.shape} with {other.shape}")
        out = []
        orows = other.rows
        for r in self.rows:
            acc = [Fraction(0)] * other.ncols
            for k, a in enumerate(r):
                if a:
                    for j, b in enumerate(orows[k]):
                        if b:
                            acc[j] += a * b
            out.append(acc)
        return QMatrix(out, ncols=other.ncols)

    def apply(self, vec: Sequence) -> tuple[Fraction, ...]:
        if len(vec) != self.ncols:
            raise DimensionMismatch(f"vector of length {len(vec)} for {self.shape} matrix")
        nz = [(k, v) for k, v in enumerate(vec) if v]
        return tuple(sum((r[k] * v for k, v in nz), Fraction(0)) for r in self.rows)

    def __pow__(self, e: int) -> "QMatrix":
        if self.nrows != self.ncols:
            raise DimensionMismatch("power of a non-square matrix")
        result = QMatrix.identity(self.nrows)
        for _ in range(e):
            result = result @ self
        return result

    def kron(self, other: "QMatrix") -> "QMatrix":
        out = []
        for r in self.rows:
            for s in other.rows:
                out.append([a * b for a in r for b in s])
        return QMatrix(out, ncols=self.ncols * other.ncols)

    def transpose(self) -> "QMatrix":
        return QMatrix(zip(*self.rows), ncols=self.nrows) if self.rows else QMatrix.zeros(self.ncols, 0)

    # -- comparison ---------------------------------------------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, QMatrix):
            return NotImplemented
        return self.shape == other.shape and self.rows == other.rows

    def __hash__(self) -> int:
        return hash((self.shape, self.rows))

    def tolist(self) -> list[list[Fraction]]:
        return [list(r) for r in self.rows]

    def __repr__(self) -> str:
        body = ", ".join("[" + ", ".join(str(v) for v in r) + "]" for r in self.rows)
        return f"QMatrix([{body}])"


def kron_all(*mats: QMatrix) -> QMatrix:
    out = mats[0]
    for m in mats[1:]:
        out = out.kron(m)
    return out


def vec_add(u: Sequence, v: Sequence) -> tuple[Fraction, ...]:
    return tuple(Fraction(a) + b for a, b in zip(u, v))


def vec_scale(c, u: Sequence) -> tuple[Fraction, ...]:
    return tuple(Fraction(c) * a for a in u)


def unit_vector(n: int, i: int) -> tuple[Fraction, ...]:
    return tuple(Fraction(1 if j == i else 0) for j in range(n))
