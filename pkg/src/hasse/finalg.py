"""Finite-dimensional Q-algebras given by structure constants, and their
finite-dimensional left modules."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Optional, Sequence

from .errors import AlgebraAxiomError, DimensionMismatch
from .qmatrix import QMatrix, unit_vector

Vec = tuple[Fraction, ...]


def _vec(v: Sequence, n: int) -> Vec:
    if len(v) != n:
        raise DimensionMismatch(f"expected a vector of length {n}, got {len(v)}")
    return tuple(Fraction(a) for a in v)


@dataclass(frozen=True, eq=False)
class FinAlgebra:
    """``table[i][j][k]`` is the coefficient of e_k in e_i * e_j."""

    dim: int
    table: tuple[tuple[tuple[Fraction, ...], ...], ...]
    unit: Vec
    name: str = ""

    @classmethod
    def from_table(cls, table, unit, name: str = "", check: bool = True) -> "FinAlgebra":
        d = len(unit)
        t = tuple(tuple(_vec(table[i][j], d) for j in range(d)) for i in range(d))
        if len(table) != d or any(len(row) != d for row in table):
            raise DimensionMismatch("structure table must be dim x dim x dim")
        alg = cls(d, t, _vec(unit, d), name)
        if check:
            alg.check_axioms()
        return alg

    @classmethod
    def truncated_poly(cls, m: int) -> "FinAlgebra":
        """Q[x]/(x^m) on the basis 1, x, ..., x^(m-1)."""
        table = [[[1 if (k == i + j and i + j < m) else 0 for k in range(m)] for j in range(m)] for i in range(m)]
        return cls.from_table(table, unit_vector(m, 0), name=f"Q[x]/(x^{m})")

    @classmethod
    def matrix_algebra(cls, n: int = 2) -> "FinAlgebra":
        """n x n matrices on the basis E_ij, index n*i + j."""
        d = n * n
        table = [[[0] * d for _ in range(d)] for _ in range(d)]
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    # E_ij E_jk = E_ik
                    table[n * i + j][n * j + k][n * i + k] = 1
        unit = [1 if (a // n) == (a % n) else 0 for a in range(d)]
        return cls.from_table(table, unit, name=f"M{n}(Q)")

    @classmethod
    def rationals(cls) -> "FinAlgebra":
        return cls.from_table([[[1]]], [1], name="Q")

    def basis(self, i: int) -> Vec:
        return unit_vector(self.dim, i)

    def mul(self, u: Sequence, v: Sequence) -> Vec:
        out = [Fraction(0)] * self.dim
        for i, a in enumerate(u):
            if not a:
                continue
            for j, b in enumerate(v):
                if not b:
                    continue
                ab = a * b
                for k, c in enumerate(self.table[i][j]):
                    if c:
                        out[k] += ab * c
        return tuple(out)

    def left_mult(self, a: Sequence) -> QMatrix:
        return QMatrix.from_columns([self.mul(a, self.basis(j)) for j in range(self.dim)])

    def right_mult(self, a: Sequence) -> QMatrix:
        return QMatrix.from_columns([self.mul(self.basis(j), a) for j in range(self.dim)])

    @cached_property
    def multiplication(self) -> QMatrix:
        """theta at the base object: A (x) A -> A, basis index i*dim + j."""
        cols = [self.table[i][j] for i in range(self.dim) for j in range(self.dim)]
        return QMatrix.from_columns(cols)

    def power(self, a: Sequence, k: int) -> Vec:
        out = self.unit
        for _ in range(k):
            out = self.mul(a, out)
        return out

    def check_axioms(self) -> Optional[str]:
        """Raise AlgebraAxiomError on the first failing basis triple or unit law."""
        d = self.dim
        for i in range(d):
            ei = self.basis(i)
            if self.mul(self.unit, ei) != ei or self.mul(ei, self.unit) != ei:
                raise AlgebraAxiomError(f"unit law fails at e_{i}")
        for i in range(d):
            for j in range(d):
                eij = self.table[i][j]
                for k in range(d):
                    ek = self.basis(k)
                    if self.mul(eij, ek) != self.mul(self.basis(i), self.table[j][k]):
                        raise AlgebraAxiomError(f"associativity fails at (e_{i}, e_{j}, e_{k})")
        return None

    def is_commutative(self) -> bool:
        return all(self.table[i][j] == self.table[j][i] for i in range(self.dim) for j in range(self.dim))

    def __repr__(self) -> str:
        return f"FinAlgebra({self.name or self.dim})"


@dataclass(frozen=True, eq=False)
class FinModule:
    """Left module of dimension ``dim``; ``actions[a]`` is the matrix of e_a."""

    algebra: FinAlgebra
    dim: int
    actions: tuple[QMatrix, ...]
    name: str = ""

    @classmethod
    def from_actions(cls, algebra: FinAlgebra, actions: Sequence[QMatrix], name: str = "", check: bool = True):
        if len(actions) != algebra.dim:
            raise DimensionMismatch("one action matrix per algebra basis element is required")
        dim = actions[0].nrows
        if any(m.shape != (dim, dim) for m in actions):
            raise DimensionMismatch("action matrices must be square of equal size")
        mod = cls(algebra, dim, tuple(actions), name)
        if check:
            mod.check_axioms()
        return mod

    @classmethod
    def regular(cls, algebra: FinAlgebra) -> "FinModule":
        return cls.from_actions(algebra, [algebra.left_mult(algebra.basis(a)) for a in range(algebra.dim)], "regular")

    @classmethod
    def column_vectors(cls, n: int = 2) -> "FinModule":
        """Q^n as a module over the n x n matrix algebra."""
        alg = FinAlgebra.matrix_algebra(n)
        acts = []
        for a in range(n * n):
            i, j = divmod(a, n)
            acts.append(QMatrix([[1 if (r == i and c == j) else 0 for c in range(n)] for r in range(n)]))
        return cls.from_actions(alg, acts, f"Q^{n}")

    def action(self, a: Sequence) -> QMatrix:
        out = QMatrix.zeros(self.dim)
        for k, c in enumerate(a):
            if c:
                out = out + self.actions[k].scale(c)
        return out

    def act(self, a: Sequence, u: Sequence) -> Vec:
        return self.action(a).apply(u)

    def basis(self, i: int) -> Vec:
        return unit_vector(self.dim, i)

    def check_axioms(self):
        alg = self.algebra
        if self.action(alg.unit) != QMatrix.identity(self.dim):
            raise AlgebraAxiomError("unit does not act as the identity")
        for i in range(alg.dim):
            for j in range(alg.dim):
                if self.action(alg.table[i][j]) != self.actions[i] @ self.actions[j]:
                    raise AlgebraAxiomError(f"action not multiplicative at (e_{i}, e_{j})")

    def __repr__(self) -> str:
        return f"FinModule({self.name or self.dim} over {self.algebra!r})"
