"""Principal Gabriel filters on Q[x] and the torsion theories they define.

The filter at f consists of the ideals containing a power of f; a module
element is torsion iff some power of f kills it.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional, Sequence

from .errors import InvalidArgument, LeibnizViolation, NotInFilter
from .module import HigherModuleDerivation, validate_module_derivation
from .poly import ONE, ZERO, Poly, PolyLike, gcd, gcd_all, multiplicity_bound, split_f_part
from .presented import ModuleElement, PresentedModule
from .ring import PolyHigherDerivation


@dataclass(frozen=True)
class IdealSpec:
    generators: tuple[Poly, ...]

    def __post_init__(self):
        object.__setattr__(self, "generators", tuple(Poly.coerce(g) for g in self.generators))

    @classmethod
    def principal(cls, g: PolyLike) -> "IdealSpec":
        return cls((Poly.coerce(g),))

    @cached_property
    def gcd(self) -> Poly:
        return gcd_all(self.generators)

    def contains(self, p: PolyLike) -> bool:
        g = self.gcd
        p = Poly.coerce(p)
        return p.is_zero() if g.is_zero() else g.divides(p)

    def __str__(self) -> str:
        return f"({self.gcd})"


@dataclass(frozen=True)
class GabrielFilterSpec:
    f: Poly

    def __post_init__(self):
        f = Poly.coerce(self.f)
        if f.is_zero():
            raise InvalidArgument("the filter polynomial must be nonzero")
        object.__setattr__(self, "f", f)

    def contains(self, ideal) -> bool:
        return in_filter(self, ideal if isinstance(ideal, IdealSpec) else IdealSpec.principal(ideal))

    def exponent(self, ideal) -> int:
        """Least k with f^k in the ideal."""
        g = ideal.gcd if isinstance(ideal, IdealSpec) else Poly.coerce(ideal)
        if not self.contains(g):
            raise NotInFilter(f"({g}) is not in the filter at {self.f}")
        return multiplicity_bound(g.monic(), self.f)

    def preimage(self, ideal: IdealSpec, g: PolyLike) -> IdealSpec:
        """g^-1(I) = {a : a g in I} = (I.gcd / gcd(I.gcd, g))."""
        d = ideal.gcd
        if d.is_zero():
            return IdealSpec.principal(ZERO if Poly.coerce(g) else ONE)
        return IdealSpec.principal(d.exact_div(gcd(d, g)))


def in_filter(F: GabrielFilterSpec, I: IdealSpec) -> bool:
    """Strip common factors with f until none remain; in the filter iff what
    is left is a unit."""
    g = I.gcd
    if g.is_zero():
        return False
    while True:
        c = gcd(g, F.f)
        if c.is_constant():
            break
        g = g.exact_div(c)
    return g.is_unit()


# -- torsion submodule ------------------------------------------------------


@dataclass(frozen=True, eq=False)
class TorsionDecomposition:
    parent: PresentedModule
    filter: GabrielFilterSpec
    torsion_generators: tuple[ModuleElement, ...]
    exponents: tuple[int, ...]  # f^exponents[i] kills torsion_generators[i]
    torsion_factors: tuple[Poly, ...]  # f-parts of the invariant factors
    quotient: PresentedModule

    @property
    def bound(self) -> int:
        return max(self.exponents, default=0)

    @property
    def torsion_dimension(self) -> int:
        return sum(a.degree for a in self.torsion_factors)

    def is_torsion(self, v) -> bool:
        return is_torsion_element(self.parent, self.filter, v, self.bound)

    def project(self, v) -> ModuleElement:
        coords = v.coords if isinstance(v, ModuleElement) else v
        return self.quotient.element(coords)

    def certify(self) -> bool:
        fk = [self.filter.f**k for k in self.exponents]
        return all(self.parent.contains((p * c for c in t.coords)) for p, t in zip(fk, self.torsion_generators))


def is_torsion_element(M: PresentedModule, F: GabrielFilterSpec, v, bound: int) -> bool:
    coords = v.coords if isinstance(v, ModuleElement) else tuple(Poly.coerce(c) for c in v)
    p = F.f**bound
    return M.contains(tuple(p * c for c in coords))


def torsion_submodule(M: PresentedModule, F: GabrielFilterSpec) -> TorsionDecomposition:
    """Split each cyclic factor Q[x]/(d_i) of the Smith decomposition as
    d_i = a_i b_i with a_i its f-part; the torsion part is generated by
    b_i times the i-th Smith generator."""
    form = M.smith
    gens, exps, factors = [], [], []
    for i, d in enumerate(form.diagonal):
        if d.is_zero() or d.is_unit():
            continue
        a, b = split_f_part(d, F.f)
        if a.is_unit():
            continue
        g = M.element([b * c for c in form.V_inv.rows[i]])
        gens.append(g)
        exps.append(multiplicity_bound(a, F.f))
        factors.append(a)
    quotient = PresentedModule(M.generator_count, M.relations.stack(g.coords for g in gens))
    return TorsionDecomposition(M, F, tuple(gens), tuple(exps), tuple(factors), quotient)


def random_torsion_element(T: TorsionDecomposition, rng: random.Random, max_degree: int = 3) -> ModuleElement:
    out = T.parent.zero()
    for g in T.torsion_generators:
        c = Poly([rng.randint(-3, 3) for _ in range(rng.randint(0, max_degree) + 1)])
        out = out + c * g
    return out


# -- Delta-invariance -------------------------------------------------------


def _principal_invariant(delta: PolyHigherDerivation, g: Poly, target: IdealSpec, order: int) -> bool:
    """Delta_i((g)) in target for all i <= order; by the chain rule it is
    enough to test Delta_i(g) itself."""
    return all(target.contains(delta.apply(i, g)) for i in range(order + 1))


def filter_delta_invariant(
    F: GabrielFilterSpec,
    delta: PolyHigherDerivation,
    I: IdealSpec,
    slack: int = 4,
    order: Optional[int] = None,
) -> Optional[IdealSpec]:
    """A witness J in the filter with Delta_i(J) contained in I for every
    i <= n, or None when the bounded search is exhausted."""
    if not in_filter(F, I):
        raise NotInFilter(f"{I} is not in the filter at {F.f}")
    n = delta.order if order is None else order
    if _principal_invariant(delta, I.gcd, I, n):
        return I
    k = F.exponent(I)
    for m in range(k, k + n * k + slack + 1):
        fm = F.f**m
        if _principal_invariant(delta, fm, I, n):
            return IdealSpec.principal(fm)
    return None


# -- the four equivalent conditions -----------------------------------------


@dataclass
class Condition:
    holds: bool
    witnesses: list = field(default_factory=list)
    failure: object = None


@dataclass
class Thm48Report:
    conditions: dict[str, Condition]
    torsion: TorsionDecomposition
    order: int

    @property
    def agree(self) -> bool:
        return len({c.holds for c in self.conditions.values()}) == 1

    @property
    def higher_differential(self) -> bool:
        return self.conditions["ii"].holds


def _kills_after(delta: PolyHigherDerivation, j: int, K: Poly, h: Poly) -> bool:
    """Delta_j(K) inside (h) for the principal ideal K = (K).

    q |-> Delta_j(q K) mod h vanishes on (h^(j+1)), so testing the monomials
    x^p with p < (j+1) deg h is exact.
    """
    if h.is_unit():
        return True
    span = (j + 1) * h.degree
    xp = ONE
    x = Poly((0, 1))
    for _ in range(span):
        if not h.divides(delta.apply(j, xp * K)):
            return False
        xp = xp * x
    return True


def _search_K(F, delta, h: Poly, js: Sequence[int], limit: int) -> Optional[int]:
    for m in range(limit + 1):
        K = F.f**m
        if all(_kills_after(delta, j, K, h) for j in js):
            return m
    return None


def check_thm48_instance(
    M: PresentedModule,
    delta: PolyHigherDerivation,
    D: HigherModuleDerivation,
    F: GabrielFilterSpec,
    samples: int = 4,
    seed: int = 0,
    slack: int = 4,
) -> Thm48Report:
    if D.module != M or D.ring != delta:
        raise InvalidArgument("the derivation does not belong to this module and ring derivation")
    rep = validate_module_derivation(D, samples=10, seed=seed)
    if not rep.ok:
        raise LeibnizViolation("module derivation fails validation", rep)
    n = delta.order
    T = torsion_submodule(M, F)
    conds: dict[str, Condition] = {}

    # (i) the filter is Delta-invariant on the ideals (f^k)
    c = Condition(True)
    for k in range(0, max(T.bound, 1) + 1):
        J = filter_delta_invariant(F, delta, IdealSpec.principal(F.f**k), slack)
        c.witnesses.append((k, None if J is None else str(J.gcd)))
        if J is None:
            c.holds, c.failure = False, k
            break
    conds["i"] = c

    # (ii) D_i sends every torsion generator to a torsion element
    c = Condition(True)
    for t_index, t in enumerate(T.torsion_generators):
        for i in range(1, n + 1):
            img = D.raw(i, t.coords)
            if not T.is_torsion(img):
                c.holds, c.failure = False, (i, t_index, str(M.element(M.canonical(img))))
                break
        if not c.holds:
            break
    conds["ii"] = c

    # (iii), (iv): for cyclic N = <t> in M_tau, the kernel of 1 |-> t is ann(t)
    rng = random.Random(seed)
    probes = list(T.torsion_generators) + [random_torsion_element(T, rng) for _ in range(samples if T.torsion_generators else 0)]
    limit = T.bound + n + slack
    c3, c4 = Condition(True), Condition(True)
    for t in probes:
        h = M.annihilator(t)
        if h.is_zero() or h.is_unit():
            continue
        per_j = [_search_K(F, delta, h, [j], limit) for j in range(n + 1)]
        c3.witnesses.append((str(h), per_j))
        if any(m is None for m in per_j) and c3.holds:
            c3.holds, c3.failure = False, str(t)
        m = _search_K(F, delta, h, list(range(n + 1)), limit)
        c4.witnesses.append((str(h), m))
        if m is None and c4.holds:
            c4.holds, c4.failure = False, str(t)
    conds["iii"], conds["iv"] = c3, c4
    return Thm48Report(conds, T, n)
