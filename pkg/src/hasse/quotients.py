"""Modules of quotients for a principal filter and the lifting of higher
derivations to them.

For the filter at f the module of quotients of M is the f-localization of
the torsion-free quotient M/M_tau. A hom (f^p) -> M/M_tau is fixed by the
image m of f^p, and we write it as the fraction m/f^p.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .errors import (
    InvalidArgument,
    LeibnizViolation,
    MismatchedDerivation,
    NotHigherDifferential,
    RepresentativeDependence,
)
from .module import HigherModuleDerivation, random_element, random_poly, validate_module_derivation
from .poly import ZERO, Poly, PolyLike, multiplicity_bound
from .polymatrix import PolyMatrix, snf, solve_linear
from .presented import ModuleElement, PresentedModule
from .torsion import (
    GabrielFilterSpec,
    IdealSpec,
    TorsionDecomposition,
    filter_delta_invariant,
    torsion_submodule,
)

Coords = tuple[Poly, ...]


def _coords(v) -> Coords:
    return v.coords if isinstance(v, ModuleElement) else tuple(Poly.coerce(c) for c in v)


@dataclass(frozen=True, eq=False)
class QuotientModule:
    torsion: TorsionDecomposition

    @property
    def base(self) -> PresentedModule:
        """M / M_tau."""
        return self.torsion.quotient

    @property
    def f(self) -> Poly:
        return self.torsion.filter.f

    @property
    def source(self) -> PresentedModule:
        return self.torsion.parent

    def fraction(self, numerator, exponent: int = 0) -> "LocalizedElement":
        if exponent < 0:
            raise InvalidArgument("negative exponent")
        return LocalizedElement(self, _coords(numerator), exponent)

    def zero(self) -> "LocalizedElement":
        return self.fraction(self.base.zero())

    def is_zero_module(self) -> bool:
        return all(self.base.contains(e.coords) for e in self.base.gens())

    def divide_by_f(self, m: Coords) -> Optional[Coords]:
        """m' with f m' = m in M/M_tau, if one exists."""
        g = self.base.generator_count
        if g == 0:
            return ()
        stacked = self.base.relations.stack([[self.f if i == j else ZERO for j in range(g)] for i in range(g)])
        u = solve_linear(stacked, m)
        if u is None:
            return None
        return tuple(u[self.base.relations.nrows:])


def build_quotient(M: PresentedModule, F: GabrielFilterSpec) -> QuotientModule:
    return QuotientModule(torsion_submodule(M, F))


@dataclass(frozen=True, eq=False)
class LocalizedElement:
    """numerator / f^exponent with the numerator in M/M_tau."""

    parent: QuotientModule
    numerator: Coords
    exponent: int

    def _lift(self, k: int) -> Coords:
        p = self.parent.f ** (k - self.exponent)
        return tuple(p * c for c in self.numerator)

    def __add__(self, other: "LocalizedElement") -> "LocalizedElement":
        k = max(self.exponent, other.exponent)
        return LocalizedElement(self.parent, tuple(a + b for a, b in zip(self._lift(k), other._lift(k))), k)

    def __neg__(self) -> "LocalizedElement":
        return LocalizedElement(self.parent, tuple(-c for c in self.numerator), self.exponent)

    def __sub__(self, other: "LocalizedElement") -> "LocalizedElement":
        return self + (-other)

    def __rmul__(self, a: PolyLike) -> "LocalizedElement":
        a = Poly.coerce(a)
        return LocalizedElement(self.parent, tuple(a * c for c in self.numerator), self.exponent)

    __mul__ = __rmul__

    def divided_by_f(self, times: int = 1) -> "LocalizedElement":
        return LocalizedElement(self.parent, self.numerator, self.exponent + times)

    def is_zero(self) -> bool:
        return self.parent.base.contains(self.numerator)

    def __eq__(self, other) -> bool:
        if not isinstance(other, LocalizedElement):
            return NotImplemented
        # f^k' m = f^k m' in M/M_tau; no extra power of f is needed there
        return self.parent.base.contains(
            tuple(a - b for a, b in zip(self._lift(max(self.exponent, other.exponent)), other._lift(max(self.exponent, other.exponent))))
        )

    def __hash__(self) -> int:
        n = self.normalized()
        return hash((n.numerator, n.exponent))

    def normalized(self) -> "LocalizedElement":
        """Least exponent, canonical numerator."""
        base = self.parent.base
        m, k = base.canonical(self.numerator), self.exponent
        if base.contains(m):
            return LocalizedElement(self.parent, m, 0)
        while k > 0:
            q = self.parent.divide_by_f(m)
            if q is None:
                break
            m, k = base.canonical(q), k - 1
        return LocalizedElement(self.parent, m, k)

    def __str__(self) -> str:
        n = self.normalized()
        num = "(" + ", ".join(str(c) for c in n.numerator) + ")"
        if n.exponent == 0:
            return num
        return f"{num}/({self.parent.f})^{n.exponent}"

    def __repr__(self) -> str:
        return f"LocalizedElement{self}"


# -- the canonical map ------------------------------------------------------


@dataclass(frozen=True, eq=False)
class CanonicalMap:
    source: PresentedModule
    target: QuotientModule

    def __call__(self, v) -> LocalizedElement:
        return self.target.fraction(_coords(v), 0)

    def kernel_generators(self) -> list[Coords]:
        """Generators of {v : f^N v = 0 in M} for N past the stabilization
        point, found as a left kernel of the stacked matrix [f^N I; -R]."""
        M = self.source
        g = M.generator_count
        R = M.relations
        N = sum(max(d.degree, 0) for d in M.smith.diagonal) + 1
        fN = self.target.f**N
        S = PolyMatrix(
            [[fN if i == j else ZERO for j in range(g)] for i in range(g)] + [[-c for c in row] for row in R.rows],
            ncols=g,
        )
        form = snf(S)
        gens = []
        for i in range(S.nrows):
            d = form.diagonal[i] if i < len(form.diagonal) else ZERO
            if d.is_zero():
                v = form.U.rows[i][:g]
                if not M.contains(v):
                    gens.append(tuple(v))
        return gens

    def kernel_matches_torsion(self) -> bool:
        """ker = M_tau, both inclusions by membership."""
        M = self.source
        T = self.target.torsion
        ker = self.kernel_generators()
        forward = all(self(v).is_zero() for v in ker)
        span = PresentedModule(M.generator_count, M.relations.stack(ker))
        backward = all(span.contains(t.coords) for t in T.torsion_generators)
        return forward and backward

    def is_injective(self) -> bool:
        return not self.kernel_generators()


def canonical_map(M: PresentedModule, Q: QuotientModule) -> CanonicalMap:
    if Q.source != M:
        raise InvalidArgument("quotient module was built from a different module")
    return CanonicalMap(M, Q)


# -- lifting ----------------------------------------------------------------


def check_preserves_torsion(D: HigherModuleDerivation, T: TorsionDecomposition) -> Optional[tuple[int, int]]:
    """First (i, generator index) with D_i(t) not torsion, or None."""
    for j, t in enumerate(T.torsion_generators):
        for i in range(1, D.order + 1):
            if not T.is_torsion(D.raw(i, t.coords)):
                return i, j
    return None


@dataclass(frozen=True, eq=False)
class ExtendedHigherDerivation:
    base: HigherModuleDerivation
    quotient: QuotientModule
    bar: HigherModuleDerivation  # D pushed to M/M_tau
    method: str = "fraction"
    gap: int = 1
    witness: Optional[IdealSpec] = None

    @property
    def order(self) -> int:
        return self.base.order

    @property
    def ring(self):
        return self.base.ring

    def components(self, q: LocalizedElement, upto: Optional[int] = None) -> list[LocalizedElement]:
        """[D~_0(q), ..., D~_upto(q)]."""
        upto = self.order if upto is None else upto
        if self.method == "lemma":
            return self._lemma(q, upto)
        return self._fraction(q, upto)

    def apply(self, k: int, q: LocalizedElement) -> LocalizedElement:
        if not 0 <= k <= self.order:
            raise InvalidArgument(f"component {k} outside 0..{self.order}")
        return self.components(q, k)[k]

    def _fraction(self, q: LocalizedElement, upto: int) -> list[LocalizedElement]:
        # D~_k(m/f^p) = [Dbar_k(m) - sum_(i=1..k) Delta_i(f^p) D~_(k-i)(m/f^p)] / f^p
        Q, delta = self.quotient, self.ring
        fp = Q.f**q.exponent
        out = [q]
        for k in range(1, upto + 1):
            acc = Q.fraction(self.bar.raw(k, q.numerator), 0)
            for i in range(1, k + 1):
                c = delta.apply(i, fp)
                if c:
                    acc = acc - c * out[k - i]
            out.append(acc.divided_by_f(q.exponent))
        return out

    def _lemma(self, q: LocalizedElement, upto: int) -> list[LocalizedElement]:
        # the hom phi: (f^p) -> M/M_tau with phi(f^p) = m; D~_t phi lives on
        # K_t = (f^(p + t w)) and is stored by y_t = D~_t phi(f^(p + t w))
        Q, delta, w, p = self.quotient, self.ring, self.gap, q.exponent
        f, m = Q.f, q.numerator
        ys: list[Coords] = [m]

        def on(t: int, c: Poly) -> Coords:
            gen = f ** (p + t * w)
            r, rem = divmod(c, gen)
            if rem:
                raise RepresentativeDependence(f"{c} is outside the domain ({gen}) of the level-{t} map")
            return tuple(r * v for v in ys[t])

        for k in range(1, upto + 1):
            c = f ** (p + k * w)
            y = self.bar.raw(k, tuple((f ** (k * w)) * v for v in m))
            y = tuple(a - b for a, b in zip(y, on(0, delta.apply(k, c))))
            for t in range(1, k):
                y = tuple(a - b for a, b in zip(y, on(t, delta.apply(k - t, c))))
            ys.append(y)
        return [Q.fraction(y, p + t * w) for t, y in enumerate(ys)]

    def truncate(self, k: int) -> "ExtendedHigherDerivation":
        return extend_derivation(self.base.truncate(k), self.quotient, self.method, self.gap)


def extend_derivation(
    D: HigherModuleDerivation,
    Q: QuotientModule,
    method: str = "fraction",
    gap: Optional[int] = None,
) -> ExtendedHigherDerivation:
    """Lift D to the module of quotients.

    ``method='fraction'`` solves the triangular system in the localization;
    ``method='lemma'`` evaluates the recursion on nested filter ideals whose
    exponents step by ``gap`` (defaulting to the exponent of the invariance
    witness found for the ideal (f)).
    """
    if method not in ("fraction", "lemma"):
        raise InvalidArgument(f"unknown lifting method {method!r}")
    if D.module != Q.source:
        raise MismatchedDerivation("derivation and quotient module come from different modules")
    rep = validate_module_derivation(D, samples=10)
    if not rep.ok:
        raise LeibnizViolation("module derivation fails validation", rep)
    T = Q.torsion
    bad = check_preserves_torsion(D, T)
    if bad is not None:
        raise NotHigherDifferential(f"D_{bad[0]} sends torsion generator {bad[1]} outside the torsion submodule")
    F = T.filter
    witness = filter_delta_invariant(F, D.ring, IdealSpec.principal(F.f))
    if gap is None:
        gap = 1 if witness is None else max(1, multiplicity_bound(witness.gcd.monic(), F.f))
    if gap < 1:
        raise InvalidArgument("gap must be at least 1")
    bar = HigherModuleDerivation.build(
        D.ring, Q.base, [[D.images[k][j] for j in range(Q.base.generator_count)] for k in range(D.order)]
    )
    return ExtendedHigherDerivation(D, Q, bar, method, gap, witness)


# -- checks -----------------------------------------------------------------


@dataclass
class CheckReport:
    ok: bool
    checked: int = 0
    witness: object = None
    details: dict = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.ok


def spanning_fractions(Q: QuotientModule, bound: int) -> list[LocalizedElement]:
    g = Q.base.generator_count
    return [Q.fraction(Q.base.gen(j), p) for p in range(bound + 1) for j in range(g)]


def default_bound(E: ExtendedHigherDerivation) -> int:
    return E.order + E.quotient.torsion.bound + 2


def verify_uniqueness(E1, E2, bound: Optional[int] = None) -> CheckReport:
    """Compare two lifts of the same D on generators / f^p, p <= bound."""
    if E1.order != E2.order or not E1.base.same_as(E2.base):
        raise MismatchedDerivation("the two lifts extend different derivations")
    bound = default_bound(E1) if bound is None else bound
    n = 0
    for q in spanning_fractions(E1.quotient, bound):
        a, b = E1.components(q), E2.components(q)
        for k in range(E1.order + 1):
            n += 1
            if a[k] != b[k]:
                return CheckReport(False, n, (k, str(q)), {"left": str(a[k]), "right": str(b[k])})
    return CheckReport(True, n)


@dataclass(frozen=True, eq=False)
class PerturbedExtension:
    """A lift altered at one component on one fraction (a negative control)."""

    inner: ExtendedHigherDerivation
    k: int
    at: LocalizedElement
    shift: LocalizedElement

    def __getattr__(self, name):
        return getattr(self.inner, name)

    def components(self, q: LocalizedElement, upto: Optional[int] = None) -> list[LocalizedElement]:
        out = self.inner.components(q, upto)
        if q == self.at and self.k < len(out):
            out[self.k] = out[self.k] + self.shift
        return out

    def apply(self, k: int, q: LocalizedElement) -> LocalizedElement:
        return self.components(q, k)[k]


def check_compatibility(E: ExtendedHigherDerivation) -> CheckReport:
    """D~_k o Phi = Phi o D_k on every generator of M."""
    M = E.base.module
    phi = CanonicalMap(M, E.quotient)
    n = 0
    for j in range(M.generator_count):
        e = M.gen(j)
        lifted = E.components(phi(e))
        for k in range(E.order + 1):
            n += 1
            if lifted[k] != phi(E.base.raw(k, e.coords)):
                return CheckReport(False, n, (k, j))
    return CheckReport(True, n)


def check_extension_leibniz(E: ExtendedHigherDerivation, samples: int = 10, seed: int = 0) -> CheckReport:
    """D~_k(a q) = sum_i Delta_i(a) D~_(k-i)(q) on sampled a and q, with a = f
    always included."""
    Q = E.quotient
    rng = random.Random(seed)
    bound = default_bound(E)
    n = 0
    for s in range(samples):
        q = Q.fraction(random_element(Q.base, rng, 2), rng.randint(0, bound))
        for a in (Q.f, random_poly(rng, 3)):
            left = E.components(a * q)
            right = E.components(q)
            for k in range(E.order + 1):
                n += 1
                acc = Q.zero()
                for i in range(k + 1):
                    c = E.ring.apply(i, a)
                    if c:
                        acc = acc + c * right[k - i]
                if left[k] != acc:
                    return CheckReport(False, n, (k, str(a), str(q)))
    return CheckReport(True, n)


def check_representative_independence(E: ExtendedHigherDerivation, samples: int = 10, seed: int = 0, shifts: Sequence[int] = (1, 2)) -> CheckReport:
    Q = E.quotient
    rng = random.Random(seed)
    n = 0
    for _ in range(samples):
        m = random_element(Q.base, rng, 2)
        p = rng.randint(0, 3)
        base = E.components(Q.fraction(m, p))
        for t in shifts:
            other = E.components(Q.fraction(tuple((Q.f**t) * c for c in m), p + t))
            for k in range(E.order + 1):
                n += 1
                if base[k] != other[k]:
                    return CheckReport(False, n, (k, t, str(Q.fraction(m, p))))
    return CheckReport(True, n)


def classical_quotient_rule(E: ExtendedHigherDerivation, m, p: int) -> LocalizedElement:
    """(Dbar_1(m) f^p - Delta_1(f^p) m) / f^(2p)."""
    Q = E.quotient
    m = _coords(m)
    fp = Q.f**p
    d1 = E.bar.raw(1, m)
    c = E.ring.apply(1, fp)
    num = tuple(a * fp - c * b for a, b in zip(d1, m))
    return Q.fraction(num, 2 * p)


@dataclass
class Thm55Report:
    higher_differential: bool
    extension_exists: bool
    forward: bool
    converse: bool
    details: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.forward and self.converse


def check_thm55(M: PresentedModule, D: HigherModuleDerivation, F: GabrielFilterSpec) -> Thm55Report:
    """Forward: preserving torsion gives a lift that is compatible, Leibniz
    and unique. Converse: a compatible lift forces D_i(M_tau) in M_tau,
    since Phi(D_i t) = D~_i(Phi t) = 0 and ker Phi = M_tau."""
    from .torsion import check_thm48_instance

    thm48 = check_thm48_instance(M, D.ring, D, F)
    Q = build_quotient(M, F)
    phi = canonical_map(M, Q)
    details: dict = {"conditions": {k: c.holds for k, c in thm48.conditions.items()}}
    try:
        E = extend_derivation(D, Q)
    except NotHigherDifferential as exc:
        details["extension"] = str(exc)
        return Thm55Report(thm48.higher_differential, False, not thm48.higher_differential, True, details)

    compat = check_compatibility(E)
    leib = check_extension_leibniz(E)
    uniq = verify_uniqueness(E, extend_derivation(D, Q, "lemma"))
    details.update(compatibility=compat.ok, leibniz=leib.ok, uniqueness=uniq.ok)
    forward = thm48.higher_differential and compat.ok and leib.ok and uniq.ok

    kernel_ok = phi.kernel_matches_torsion()
    images_vanish = all(
        E.apply(i, phi(t)).is_zero() and phi(D.raw(i, t.coords)).is_zero()
        for t in Q.torsion.torsion_generators
        for i in range(1, D.order + 1)
    )
    details.update(kernel_is_torsion=kernel_ok, torsion_images_vanish=images_vanish)
    converse = (not compat.ok) or (kernel_ok and images_vanish and thm48.higher_differential)
    return Thm55Report(thm48.higher_differential, True, forward, converse, details)
