"""Dense univariate polynomials over the rationals.

Coefficients are stored low degree first as a tuple of ``Fraction``; the zero
polynomial is the empty tuple. Instances are immutable and hashable.
"""

from __future__ import annotations

from fractions import Fraction
from functools import reduce
from typing import Iterable, Union

Scalar = Union[int, Fraction]
PolyLike = Union["Poly", int, Fraction]


def _trim(coeffs: Iterable[Scalar]) -> tuple[Fraction, ...]:
    out = [Fraction(c) for c in coeffs]
    while out and out[-1] == 0:
        out.pop()
    return tuple(out)


class Poly:
    __slots__ = ("coeffs", "_hash")

    def __init__(self, coeffs: Iterable[Scalar] = ()):
        object.__setattr__(self, "coeffs", _trim(coeffs))
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, name, value):
        raise AttributeError("Poly is immutable")

    # -- constructors -------------------------------------------------------

    @classmethod
    def const(cls, c: Scalar) -> "Poly":
        return cls((c,))

    @classmethod
    def monomial(cls, degree: int, c: Scalar = 1) -> "Poly":
        if degree < 0:
            raise ValueError("negative degree")
        return cls([0] * degree + [c])

    @classmethod
    def coerce(cls, value: PolyLike) -> "Poly":
        if isinstance(value, Poly):
            return value
        if isinstance(value, (int, Fraction)):
            return cls.const(value)
        raise TypeError(f"cannot coerce {type(value).__name__} to Poly")

    # -- basic properties ---------------------------------------------------

    @property
    def degree(self) -> int:
        """Degree, with -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    @property
    def lc(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_unit(self) -> bool:
        return len(self.coeffs) == 1

    def is_constant(self) -> bool:
        return len(self.coeffs) <= 1

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __getitem__(self, i: int) -> Fraction:
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return Fraction(0)

    def monic(self) -> "Poly":
        if not self.coeffs:
            return self
        lc = self.coeffs[-1]
        if lc == 1:
            return self
        return Poly(c / lc for c in self.coeffs)

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other: PolyLike) -> "Poly":
        try:
            o = Poly.coerce(other)
        except TypeError:
            return NotImplemented
        a, b = self.coeffs, o.coeffs
        if len(a) < len(b):
            a, b = b, a
        return Poly([x + (b[i] if i < len(b) else 0) for i, x in enumerate(a)])

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly(-c for c in self.coeffs)

    def __sub__(self, other: PolyLike) -> "Poly":
        try:
            o = Poly.coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other: PolyLike) -> "Poly":
        return Poly.coerce(other) - self

    def __mul__(self, other: PolyLike) -> "Poly":
        if isinstance(other, (int, Fraction)):
            if other == 0:
                return ZERO
            return Poly(c * other for c in self.coeffs)
        if not isinstance(other, Poly):
            return NotImplemented
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return ZERO
        out = [Fraction(0)] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x == 0:
                continue
            for j, y in enumerate(b):
                out[i + j] += x * y
        return Poly(out)

    __rmul__ = __mul__

    def __truediv__(self, other: Scalar) -> "Poly":
        if isinstance(other, Poly):
            if not other.is_unit():
                raise TypeError("use divmod() for polynomial division")
            other = other.coeffs[0]
        return Poly(c / other for c in self.coeffs)

    def __pow__(self, e: int) -> "Poly":
        if e < 0:
            raise ValueError("negative exponent")
        result, base = ONE, self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __divmod__(self, other: PolyLike) -> tuple["Poly", "Poly"]:
        d = Poly.coerce(other)
        if d.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dd = d.degree
        if len(rem) - 1 < dd:
            return ZERO, self
        quot = [Fraction(0)] * (len(rem) - dd)
        inv_lc = 1 / d.lc
        for i in range(len(rem) - 1, dd - 1, -1):
            c = rem[i]
            if c == 0:
                continue
            q = c * inv_lc
            quot[i - dd] = q
            for j, dc in enumerate(d.coeffs):
                rem[i - dd + j] -= q * dc
        return Poly(quot), Poly(rem[:dd])

    def __floordiv__(self, other: PolyLike) -> "Poly":
        return divmod(self, other)[0]

    def __mod__(self, other: PolyLike) -> "Poly":
        return divmod(self, other)[1]

    def divides(self, other: PolyLike) -> bool:
        """True iff ``self`` divides ``other`` (zero divides only zero)."""
        o = Poly.coerce(other)
        if self.is_zero():
            return o.is_zero()
        return (o % self).is_zero()

    def exact_div(self, other: PolyLike) -> "Poly":
        q, r = divmod(self, other)
        if r:
            raise ArithmeticError(f"{other} does not divide {self}")
        return q

    # -- calculus and evaluation -------------------------------------------

    def derivative(self) -> "Poly":
        return Poly(i * c for i, c in enumerate(self.coeffs) if i > 0)

    def __call__(self, value):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * value + c
        return acc

    def compose(self, inner: "Poly") -> "Poly":
        acc = ZERO
        for c in reversed(self.coeffs):
            acc = acc * inner + c
        return acc

    # -- comparison ---------------------------------------------------------

    def __eq__(self, other) -> bool:
        if isinstance(other, Poly):
            return self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self.coeffs == _trim((other,))
        return NotImplemented

    def __hash__(self) -> int:
        h = self._hash
        if h is None:
            h = hash(self.coeffs)
            object.__setattr__(self, "_hash", h)
        return h

    # -- printing -----------------------------------------------------------

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        terms = []
        for i in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[i]
            if c == 0:
                continue
            sign = "-" if c < 0 else "+"
            a = abs(c)
            if i == 0:
                body = str(a)
            else:
                mono = "x" if i == 1 else f"x^{i}"
                body = mono if a == 1 else f"{a}*{mono}"
            terms.append((sign, body))
        first_sign, first_body = terms[0]
        out = ("-" if first_sign == "-" else "") + first_body
        for sign, body in terms[1:]:
            out += f" {sign} {body}"
        return out

    def __repr__(self) -> str:
        return f"Poly({str(self)!r})"


ZERO = Poly()
ONE = Poly((1,))
X = Poly((0, 1))


def gcd(a: PolyLike, b: PolyLike) -> Poly:
    """Monic gcd; gcd(0, 0) = 0."""
    a, b = Poly.coerce(a), Poly.coerce(b)
    while b:
        a, b = b, a % b
    return a.monic()


def xgcd(a: PolyLike, b: PolyLike) -> tuple[Poly, Poly, Poly]:
    """Return (g, s, t) with s*a + t*b = g and g monic (or zero)."""
    a, b = Poly.coerce(a), Poly.coerce(b)
    r0, r1 = a, b
    s0, s1 = ONE, ZERO
    t0, t1 = ZERO, ONE
    while r1:
        q, r = divmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if r0.is_zero():
        return r0, s0, t0
    lc = r0.lc
    return r0 / lc, s0 / lc, t0 / lc


def lcm(a: PolyLike, b: PolyLike) -> Poly:
    a, b = Poly.coerce(a), Poly.coerce(b)
    if a.is_zero() or b.is_zero():
        return ZERO
    return (a * b).exact_div(gcd(a, b)).monic()


def gcd_all(polys: Iterable[PolyLike]) -> Poly:
    return reduce(gcd, polys, ZERO)


def lcm_all(polys: Iterable[PolyLike]) -> Poly:
    return reduce(lcm, polys, ONE)


def split_f_part(d: PolyLike, f: PolyLike) -> tuple[Poly, Poly]:
    """Split nonzero ``d`` as (a, b) with d = a*b, every irreducible factor of
    ``a`` dividing ``f`` and ``b`` coprime to ``f``. Factoring-free.

    ``a`` is monic; ``b`` carries the leading coefficient of ``d``.
    """
    d, f = Poly.coerce(d), Poly.coerce(f)
    if d.is_zero():
        raise ValueError("zero has no f-part")
    b = d
    while True:
        g = gcd(b, f)
        if g.is_constant():
            break
        b = b.exact_div(g)
    return d.exact_div(b).monic(), b


def multiplicity_bound(a: PolyLike, f: PolyLike) -> int:
    """Least k with a | f^k, for ``a`` whose factors all divide ``f``."""
    a, f = Poly.coerce(a), Poly.coerce(f)
    if a.is_zero():
        raise ValueError("zero divides no power of f")
    k, power = 0, ONE
    while not a.divides(power):
        if k > a.degree:
            raise ValueError(f"{a} has a factor coprime to {f}")
        k += 1
        power = power * f
    return k
