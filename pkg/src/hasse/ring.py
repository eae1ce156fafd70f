"""Higher derivations on Q[x] and on finite-dimensional algebras.

On Q[x] a higher derivation of order n is determined by the values
v_k = D_k(x), because x |-> x + v_1 t + ... + v_n t^n extends uniquely to a
ring map Q[x] -> Q[x][t]/(t^(n+1)). On a FinAlgebra the components are
arbitrary matrices together with a checked Leibniz certificate.
"""

from __future__ import annotations

import random
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Callable, Optional, Sequence, Union

from .errors import IndexOutOfRange, InvalidArgument, LeibnizViolation, MismatchedDerivation
from .finalg import FinAlgebra
from .poly import ONE, X, ZERO, Poly, PolyLike
from .qmatrix import QMatrix

Element = Union[Poly, tuple]


@dataclass(frozen=True)
class LeibnizReport:
    """Outcome of a Leibniz sweep. ``pair`` names the first failing pair of
    basis indices (FinAlgebra) or monomial exponents (Q[x])."""

    ok: bool
    checked: int
    k: Optional[int] = None
    pair: Optional[tuple[int, int]] = None
    lhs: object = None
    rhs: object = None

    def __bool__(self) -> bool:
        return self.ok


# -- ordinary derivations ---------------------------------------------------


@dataclass(frozen=True)
class PolyDerivation:
    """The derivation p |-> p' * value of Q[x]."""

    value: Poly

    def __post_init__(self):
        object.__setattr__(self, "value", Poly.coerce(self.value))

    def __call__(self, p: PolyLike) -> Poly:
        return Poly.coerce(p).derivative() * self.value

    def check(self) -> LeibnizReport:
        return LeibnizReport(True, 0)


@dataclass(frozen=True)
class FinDerivation:
    algebra: FinAlgebra
    matrix: QMatrix

    def __call__(self, v) -> tuple:
        return self.matrix.apply(v)

    def check(self) -> LeibnizReport:
        alg = self.algebra
        n = 0
        for i in range(alg.dim):
            for j in range(alg.dim):
                n += 1
                lhs = self(alg.table[i][j])
                rhs = tuple(
                    a + b
                    for a, b in zip(alg.mul(self(alg.basis(i)), alg.basis(j)), alg.mul(alg.basis(i), self(alg.basis(j))))
                )
                if lhs != rhs:
                    return LeibnizReport(False, n, 1, (i, j), lhs, rhs)
        return LeibnizReport(True, n)


OrdinaryDerivation = Union[PolyDerivation, FinDerivation]


@dataclass(frozen=True)
class OrdinaryDerivationSequence:
    entries: tuple
    algebra: Optional[FinAlgebra] = None

    @property
    def order(self) -> int:
        return len(self.entries)

    def __getitem__(self, k: int) -> OrdinaryDerivation:
        """1-based access: ``seq[k]`` is delta_k."""
        if not 1 <= k <= self.order:
            raise IndexOutOfRange(f"delta_{k} outside 1..{self.order}")
        return self.entries[k - 1]

    def check(self) -> LeibnizReport:
        total = 0
        for k, d in enumerate(self.entries, start=1):
            rep = d.check()
            total += rep.checked
            if not rep.ok:
                return LeibnizReport(False, total, k, rep.pair, rep.lhs, rep.rhs)
        return LeibnizReport(True, total)


# -- higher derivations -----------------------------------------------------


class HigherRingDerivation:
    order: int

    def apply(self, k: int, a):
        raise NotImplementedError

    def eval(self, k: int, a):
        return self.apply(k, a)

    def _check_index(self, k: int):
        if not 0 <= k <= self.order:
            raise IndexOutOfRange(f"component {k} outside 0..{self.order}")

    def truncate(self, k: int) -> "HigherRingDerivation":
        raise NotImplementedError


@dataclass(frozen=True, eq=False)
class PolyHigherDerivation(HigherRingDerivation):
    values: tuple[Poly, ...]
    _powers: list = field(default_factory=list, repr=False, compare=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(Poly.coerce(v) for v in self.values))

    @classmethod
    def identity(cls, order: int = 0) -> "PolyHigherDerivation":
        return cls((ZERO,) * order)

    @property
    def order(self) -> int:
        return len(self.values)

    def value(self, k: int) -> Poly:
        self._check_index(k)
        return X if k == 0 else self.values[k - 1]

    def _power_row(self, m: int) -> list[Poly]:
        # row m holds D_0(x^m), ..., D_n(x^m)
        rows = self._powers
        if len(rows) > m:
            return rows[m]
        n = self.order
        v = [X] + list(self.values)
        with self._lock:
            if not rows:
                rows.append([ONE] + [ZERO] * n)
            while len(rows) <= m:
                prev = rows[-1]
                rows.append([sum((v[i] * prev[j - i] for i in range(j + 1)), ZERO) for j in range(n + 1)])
        return rows[m]

    def apply(self, k: int, a: PolyLike) -> Poly:
        self._check_index(k)
        a = Poly.coerce(a)
        if k == 0:
            return a
        out = ZERO
        for m, c in enumerate(a.coeffs):
            if c:
                out = out + self._power_row(m)[k] * c
        return out

    def truncate(self, k: int) -> "PolyHigherDerivation":
        self._check_index(k)
        return PolyHigherDerivation(self.values[:k])

    def __eq__(self, other) -> bool:
        if not isinstance(other, PolyHigherDerivation):
            return NotImplemented
        return self.values == other.values

    def __hash__(self) -> int:
        return hash(self.values)

    def __repr__(self) -> str:
        return "PolyHigherDerivation(" + ", ".join(f"D{k}(x)={v}" for k, v in enumerate(self.values, 1)) + ")"


@dataclass(frozen=True, eq=False)
class FinHigherDerivation(HigherRingDerivation):
    algebra: FinAlgebra
    matrices: tuple[QMatrix, ...]

    def __post_init__(self):
        d = self.algebra.dim
        for m in self.matrices:
            if m.shape != (d, d):
                raise InvalidArgument(f"component of shape {m.shape} on an algebra of dimension {d}")

    @classmethod
    def identity(cls, algebra: FinAlgebra, order: int = 0) -> "FinHigherDerivation":
        return cls(algebra, (QMatrix.zeros(algebra.dim),) * order)

    @property
    def order(self) -> int:
        return len(self.matrices)

    def matrix(self, k: int) -> QMatrix:
        self._check_index(k)
        return QMatrix.identity(self.algebra.dim) if k == 0 else self.matrices[k - 1]

    def apply(self, k: int, a) -> tuple:
        return self.matrix(k).apply(a)

    def truncate(self, k: int) -> "FinHigherDerivation":
        self._check_index(k)
        return FinHigherDerivation(self.algebra, self.matrices[:k])

    def __eq__(self, other) -> bool:
        if not isinstance(other, FinHigherDerivation):
            return NotImplemented
        return self.algebra is other.algebra and self.matrices == other.matrices

    def __hash__(self) -> int:
        return hash(self.matrices)


# -- validation -------------------------------------------------------------


def monomial_pairs(count: int = 200, max_degree: int = 8, seed: int = 0) -> list[tuple[int, int]]:
    """All pairs with p + q <= 4, then ``count`` seeded random pairs."""
    pairs = [(p, q) for p in range(5) for q in range(5 - p)]
    rng = random.Random(seed)
    pairs += [(rng.randint(0, max_degree), rng.randint(0, max_degree)) for _ in range(count)]
    return pairs


def check_poly_chain(
    component: Callable[[int, Poly], Poly],
    order: int,
    pairs: Sequence[tuple[int, int]],
) -> LeibnizReport:
    """Check D_k(x^p x^q) = sum_i D_i(x^p) D_(k-i)(x^q) for the given maps."""
    memo: dict[tuple[int, int], Poly] = {}

    def at(k: int, m: int) -> Poly:
        # only monomials occur, so each D_k(x^m) is computed once
        if (k, m) not in memo:
            memo[k, m] = component(k, X**m)
        return memo[k, m]

    n = 0
    for k in range(1, order + 1):
        for p, q in pairs:
            n += 1
            lhs = at(k, p + q)
            rhs = sum((at(i, p) * at(k - i, q) for i in range(k + 1)), ZERO)
            if lhs != rhs:
                return LeibnizReport(False, n, k, (p, q), lhs, rhs)
    return LeibnizReport(True, n)


def validate_higher_leibniz(delta: HigherRingDerivation, samples: int = 200, seed: int = 0) -> LeibnizReport:
    if isinstance(delta, PolyHigherDerivation):
        return check_poly_chain(delta.apply, delta.order, monomial_pairs(samples, 8, seed))
    alg = delta.algebra
    mats = [delta.matrix(k) for k in range(delta.order + 1)]
    images = [[m.column(i) for i in range(alg.dim)] for m in mats]
    n = 0
    for k in range(1, delta.order + 1):
        for i in range(alg.dim):
            for j in range(alg.dim):
                n += 1
                lhs = mats[k].apply(alg.table[i][j])
                rhs = [Fraction(0)] * alg.dim
                for t in range(k + 1):
                    for c, v in enumerate(alg.mul(images[t][i], images[k - t][j])):
                        rhs[c] += v
                rhs = tuple(rhs)
                if lhs != rhs:
                    return LeibnizReport(False, n, k, (i, j), lhs, rhs)
    return LeibnizReport(True, n)


def require_valid(delta: HigherRingDerivation) -> HigherRingDerivation:
    rep = validate_higher_leibniz(delta)
    if not rep.ok:
        raise LeibnizViolation(f"higher Leibniz rule fails at k={rep.k}, pair {rep.pair}", rep)
    return delta


# -- conversion to and from ordinary derivation sequences --------------------


def _poly_recursion_map(delta: PolyHigherDerivation, seq: Sequence[PolyDerivation], n: int) -> Callable[[Poly], Poly]:
    """The map (n+1) D_(n+1) - sum_(k<n) delta_(k+1) o D_(n-k), as a map."""

    def fn(a: Poly) -> Poly:
        out = delta.apply(n + 1, a) * (n + 1)
        for k in range(n):
            out = out - seq[k](delta.apply(n - k, a))
        return out

    return fn


def to_ordinary_sequence(delta: HigherRingDerivation, samples: int = 60, seed: int = 0) -> OrdinaryDerivationSequence:
    """Extract delta_1..delta_n with
    delta_(n+1) = (n+1) D_(n+1) - sum_(k=0)^(n-1) delta_(k+1) o D_(n-k).

    Each assembled map is re-validated as an ordinary derivation.
    """
    if isinstance(delta, PolyHigherDerivation):
        seq: list[PolyDerivation] = []
        pairs = monomial_pairs(samples, 6, seed)
        for n in range(delta.order):
            fn = _poly_recursion_map(delta, seq, n)
            rep = check_poly_chain(lambda k, a: a if k == 0 else fn(a), 1, pairs)
            if not rep.ok:
                raise LeibnizViolation(f"delta_{n + 1} is not a derivation", LeibnizReport(False, rep.checked, n + 1, rep.pair, rep.lhs, rep.rhs))
            seq.append(PolyDerivation(fn(X)))
        return OrdinaryDerivationSequence(tuple(seq))

    alg = delta.algebra
    mats: list[QMatrix] = []
    for n in range(delta.order):
        m = delta.matrix(n + 1).scale(n + 1)
        for k in range(n):
            m = m - mats[k] @ delta.matrix(n - k)
        d = FinDerivation(alg, m)
        rep = d.check()
        if not rep.ok:
            raise LeibnizViolation(f"delta_{n + 1} is not a derivation", LeibnizReport(False, rep.checked, n + 1, rep.pair, rep.lhs, rep.rhs))
        mats.append(m)
    return OrdinaryDerivationSequence(tuple(FinDerivation(alg, m) for m in mats), alg)


def from_ordinary_sequence(seq: OrdinaryDerivationSequence) -> HigherRingDerivation:
    """D_(i+1) = 1/(i+1) * sum_(k=0)^(i) delta_(k+1) o D_(i-k)."""
    rep = seq.check()
    if not rep.ok:
        raise LeibnizViolation(f"delta_{rep.k} is not a derivation", rep)
    if seq.algebra is None:
        vals = [X]
        for i in range(seq.order):
            s = sum((seq.entries[k](vals[i - k]) for k in range(i + 1)), ZERO)
            vals.append(s / (i + 1))
        return PolyHigherDerivation(tuple(vals[1:]))
    alg = seq.algebra
    mats = [QMatrix.identity(alg.dim)]
    for i in range(seq.order):
        s = QMatrix.zeros(alg.dim)
        for k in range(i + 1):
            s = s + seq.entries[k].matrix @ mats[i - k]
        mats.append(s.scale(Fraction(1, i + 1)))
    return FinHigherDerivation(alg, tuple(mats[1:]))


def check_reconstruction(delta: HigherRingDerivation, seq: OrdinaryDerivationSequence, max_degree: int = 6) -> Optional[tuple[int, object]]:
    """Check (i+1) D_(i+1) = sum_k delta_(k+1) o D_(i-k) as maps.

    Evaluated on 1, x, ..., x^max_degree for Q[x] and on every basis vector
    for a FinAlgebra. Returns None, or the first failing (i, argument).
    """
    if seq.order != delta.order:
        raise MismatchedDerivation("sequence and derivation orders differ")
    if isinstance(delta, PolyHigherDerivation):
        args = [X**p for p in range(max_degree + 1)]
    else:
        args = [delta.algebra.basis(j) for j in range(delta.algebra.dim)]
    for i in range(delta.order):
        for a in args:
            lhs = delta.apply(i + 1, a)
            if isinstance(lhs, Poly):
                lhs = lhs * (i + 1)
                rhs = sum((seq.entries[k](delta.apply(i - k, a)) for k in range(i + 1)), ZERO)
            else:
                lhs = tuple(v * (i + 1) for v in lhs)
                acc = [Fraction(0)] * len(lhs)
                for k in range(i + 1):
                    for c, v in enumerate(seq.entries[k](delta.apply(i - k, a))):
                        acc[c] += v
                rhs = tuple(acc)
            if lhs != rhs:
                return i, a
    return None


# -- constructions ----------------------------------------------------------


def make_exp(delta: OrdinaryDerivation, n: int) -> HigherRingDerivation:
    """D_k = delta^k / k!."""
    if n < 0:
        raise InvalidArgument("order must be non-negative")
    rep = delta.check()
    if not rep.ok:
        raise LeibnizViolation("the seed map is not a derivation", rep)
    if isinstance(delta, PolyDerivation):
        vals, cur = [], X
        for k in range(1, n + 1):
            cur = delta(cur)
            vals.append(cur / factorial(k))
        return PolyHigherDerivation(tuple(vals))
    mats, cur = [], QMatrix.identity(delta.algebra.dim)
    for k in range(1, n + 1):
        cur = delta.matrix @ cur
        mats.append(cur.scale(Fraction(1, factorial(k))))
    return FinHigherDerivation(delta.algebra, tuple(mats))


def make_rescaled(delta: HigherRingDerivation, k: int) -> HigherRingDerivation:
    """D'_t = D_(t/k) when k divides t, zero otherwise; same order as ``delta``."""
    if k < 1:
        raise InvalidArgument("stride must be at least 1")
    n = delta.order
    if isinstance(delta, PolyHigherDerivation):
        return PolyHigherDerivation(tuple(delta.value(t // k) if t % k == 0 else ZERO for t in range(1, n + 1)))
    zero = QMatrix.zeros(delta.algebra.dim)
    return FinHigherDerivation(delta.algebra, tuple(delta.matrix(t // k) if t % k == 0 else zero for t in range(1, n + 1)))


def make_inner_higher(algebra: FinAlgebra, a: Sequence, n: int) -> FinHigherDerivation:
    """D_1 = L_a - R_a and D_m = L_a o D_(m-1)."""
    la = algebra.left_mult(a)
    cur = la - algebra.right_mult(a)
    mats = []
    for _ in range(n):
        mats.append(cur)
        cur = la @ cur
    return FinHigherDerivation(algebra, tuple(mats))


def d_dx() -> PolyDerivation:
    return PolyDerivation(ONE)
