import random

import pytest

from hasse.errors import InvalidArgument, LeibnizViolation, MismatchedDerivation
from hasse.module import HigherModuleDerivation, make_module_exp, ordinary_module_derivation
from hasse.poly import ONE, X, ZERO, Poly
from hasse.presented import PresentedModule
from hasse.quotients import (
    PerturbedExtension,
    build_quotient,
    canonical_map,
    check_compatibility,
    check_extension_leibniz,
    check_representative_independence,
    check_thm55,
    classical_quotient_rule,
    extend_derivation,
    spanning_fractions,
    verify_uniqueness,
)
from hasse.ring import PolyDerivation, d_dx, make_exp
from hasse.torsion import GabrielFilterSpec

from catalog import build_catalog
from strategies import rand_poly
from test_torsion import GOLDEN, golden_derivation

FX = GabrielFilterSpec(X)
R = PresentedModule.free(1)


def trivial_lift(n: int = 5, method: str = "fraction", gap=None):
    D = HigherModuleDerivation.identity(make_exp(d_dx(), n), R)
    return extend_derivation(D, build_quotient(R, FX), method, gap)


def test_quotient_examples():
    Q = build_quotient(R, FX)
    assert Q.fraction([X], 1) == Q.fraction([ONE], 0)
    assert Q.fraction([ONE], 1) != Q.fraction([ONE], 0)
    assert str(Q.fraction([X + 1], 2)) == "(x + 1)/(x)^2"
    G = build_quotient(PresentedModule.cyclic(X**2 * (X - 1)), FX)
    assert [p for p in G.base.invariant_factors if not p.is_unit()] == [X - 1]
    assert G.fraction([ONE], 1) == G.fraction([ONE], 0)
    T = build_quotient(PresentedModule.cyclic(X**2), FX)
    assert T.is_zero_module() and T.fraction([ONE], 3).is_zero()
    with pytest.raises(InvalidArgument):
        Q.fraction([ONE], -1)


def test_fraction_arithmetic():
    Q = build_quotient(R, FX)
    a, b = Q.fraction([ONE], 1), Q.fraction([X + 2], 2)
    assert a + b == Q.fraction([2 * X + 2], 2)
    assert X * b == Q.fraction([X + 2], 1)
    assert (a - a).is_zero() and -a + a == Q.zero()
    assert a.divided_by_f(2) == Q.fraction([ONE], 3)


def test_canonical_map_examples():
    Q = build_quotient(R, FX)
    assert canonical_map(R, Q).is_injective()
    M = PresentedModule.cyclic(X**2 * (X - 1))
    phi = canonical_map(M, build_quotient(M, FX))
    assert phi.kernel_matches_torsion()
    ker = phi.kernel_generators()
    assert len(ker) == 1 and M.annihilator(ker[0]) == X**2
    Z = PresentedModule.cyclic(ONE)
    phi = canonical_map(Z, build_quotient(Z, FX))
    assert phi([X]).is_zero() and phi.kernel_matches_torsion()


def test_lift_of_one_over_x():
    for method, gap in (("fraction", None), ("lemma", 1), ("lemma", 2), ("lemma", 3)):
        E = trivial_lift(5, method, gap)
        Q = E.quotient
        got = E.components(Q.fraction([ONE], 1))
        assert got == [Q.fraction([Poly.const((-1) ** k)], k + 1) for k in range(6)]


def test_classical_quotient_rule():
    rng = random.Random(3)
    ring = make_exp(PolyDerivation(X**2 + 1), 2)
    M = PresentedModule.free(2)
    D = HigherModuleDerivation.build(ring, M, [[(X, ONE), (ZERO, X**2)], [(ONE, ZERO), (X, X)]])
    E = extend_derivation(D, build_quotient(M, FX))
    for _ in range(50):
        m = (rand_poly(rng, 3), rand_poly(rng, 3))
        p = rng.randint(0, 4)
        assert E.apply(1, E.quotient.fraction(m, p)) == classical_quotient_rule(E, m, p)


def test_exponent_zero_is_compatibility():
    D = golden_derivation()
    Q = build_quotient(GOLDEN, FX)
    E = extend_derivation(D, Q)
    phi = canonical_map(GOLDEN, Q)
    for v in ((ONE, ZERO), (X, ONE), (ZERO, X**2 + 1)):
        for k in range(4):
            assert E.apply(k, Q.fraction(v, 0)) == phi(D.raw(k, v))


def test_uniqueness_examples():
    D = golden_derivation()
    Q = build_quotient(GOLDEN, FX)
    E1 = extend_derivation(D, Q)
    for gap in (1, 2, 3, 4):
        assert verify_uniqueness(E1, extend_derivation(D, Q, "lemma", gap)).ok
    q = spanning_fractions(Q, 1)[-1]
    bad = PerturbedExtension(E1, 2, q, Q.fraction(Q.base.gen(0), 0))
    rep = verify_uniqueness(E1, bad)
    assert not rep.ok and rep.witness == (2, str(q))
    E0 = extend_derivation(D.truncate(0), Q)
    assert verify_uniqueness(E0, extend_derivation(D.truncate(0), Q, "lemma", 2)).ok
    other = HigherModuleDerivation.identity(D.ring, GOLDEN)
    with pytest.raises(MismatchedDerivation):
        verify_uniqueness(E1, extend_derivation(other, Q))


def test_extension_rejects_invalid_derivation():
    Q2 = PresentedModule.cyclic(X**2)
    D = HigherModuleDerivation.build(make_exp(d_dx(), 1), Q2, [[(ONE,)]], strict=False)
    with pytest.raises(LeibnizViolation):
        extend_derivation(D, build_quotient(Q2, FX))


def test_thm55_examples():
    rep = check_thm55(GOLDEN, golden_derivation(), FX)
    assert rep.ok and rep.forward and rep.converse and rep.extension_exists
    free = HigherModuleDerivation.identity(make_exp(d_dx(), 3), R)
    assert check_thm55(R, free, FX).ok
    C = PresentedModule.cyclic(X**3)
    D = make_module_exp(ordinary_module_derivation(PolyDerivation(X), C, [(ZERO,)]), 2)
    rep = check_thm55(C, D, FX)
    assert rep.ok
    E = extend_derivation(D, build_quotient(C, FX))
    assert E.quotient.is_zero_module()


def test_truncation_compatibility():
    D = golden_derivation()
    Q = build_quotient(GOLDEN, FX)
    E = extend_derivation(D, Q)
    for k in range(4):
        Ek = extend_derivation(D.truncate(k), Q)
        for q in spanning_fractions(Q, 3):
            assert Ek.components(q) == E.components(q)[: k + 1]
        assert E.truncate(k).order == k


CATALOG = build_catalog(20, seed=9)


@pytest.mark.parametrize("inst", CATALOG, ids=lambda i: i.label)
def test_catalog_lifts(inst):
    Q = build_quotient(inst.module, inst.filter)
    E = extend_derivation(inst.D, Q)
    assert check_compatibility(E).ok
    assert check_extension_leibniz(E, samples=4).ok
    assert check_representative_independence(E, samples=4).ok
    assert canonical_map(inst.module, Q).kernel_matches_torsion()
    assert verify_uniqueness(E, extend_derivation(inst.D, Q, "lemma", E.gap + 1)).ok
