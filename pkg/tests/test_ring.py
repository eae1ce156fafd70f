import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from hasse.errors import LeibnizViolation
from hasse.finalg import FinAlgebra
from hasse.poly import ONE, X, ZERO, Poly
from hasse.qmatrix import QMatrix
from hasse.ring import (
    FinDerivation,
    FinHigherDerivation,
    OrdinaryDerivationSequence,
    PolyDerivation,
    PolyHigherDerivation,
    check_reconstruction,
    d_dx,
    from_ordinary_sequence,
    make_exp,
    make_inner_higher,
    make_rescaled,
    to_ordinary_sequence,
    validate_higher_leibniz,
)

from strategies import rand_poly
from test_exact_core import from_sympy, to_sympy

M2 = FinAlgebra.matrix_algebra(2)
E11, E12, E21, E22 = ([1 if i == j else 0 for i in range(4)] for j in range(4))
sx, st_ = sympy.symbols("x t")


def oracle_apply(delta: PolyHigherDerivation, k: int, a: Poly) -> Poly:
    """Delta is the ring map x |-> sum_k Delta_k(x) t^k into Q[x][t]/(t^(n+1));
    read off the t^k coefficient of a(that series)."""
    series = sx + sum((to_sympy(delta.value(j)) * st_**j for j in range(1, delta.order + 1)), sympy.S.Zero)
    img = sympy.expand(to_sympy(a).subs(sx, series))
    coeff = sympy.Poly(img, st_).coeff_monomial(st_**k) if img != 0 else 0
    return from_sympy(sympy.expand(coeff)) if coeff != 0 else ZERO


def rand_higher(rng: random.Random, order: int, degree: int = 5) -> PolyHigherDerivation:
    return PolyHigherDerivation(tuple(rand_poly(rng, degree) for _ in range(order)))


# -- evaluation --------------------------------------------------------------


def test_apply_examples():
    e = make_exp(d_dx(), 3)
    assert e.apply(2, X**3) == 3 * X
    assert e.apply(0, X**2 + 1) == X**2 + 1
    d = PolyHigherDerivation((X**2, ZERO))
    assert d.apply(2, X**2) == X**4
    assert e.apply(3, X**3) == ONE


@settings(max_examples=40)
@given(st.integers(0, 10**6), st.integers(1, 4))
def test_apply_matches_series_oracle(seed, order):
    rng = random.Random(seed)
    d = rand_higher(rng, order, 3)
    a = rand_poly(rng, 5)
    for k in range(order + 1):
        assert d.apply(k, a) == oracle_apply(d, k, a)


def test_exp_matches_divided_derivatives():
    e = make_exp(d_dx(), 5)
    a = 3 * X**6 - X**2 + 7
    for k in range(6):
        want = from_sympy(sympy.diff(to_sympy(a), sx, k) / sympy.factorial(k)) if k <= 6 else ZERO
        assert e.apply(k, a) == want


# -- validation --------------------------------------------------------------


def test_validate_examples():
    assert validate_higher_leibniz(PolyHigherDerivation.identity(0)).ok
    ad = M2.left_mult(E12) - M2.right_mult(E12)
    bad = FinHigherDerivation(M2, (ad, QMatrix.zeros(4)))
    rep = validate_higher_leibniz(bad)
    assert not rep.ok and rep.k == 2
    assert validate_higher_leibniz(make_exp(FinDerivation(M2, ad), 3)).ok


def test_non_derivation_rejected():
    m = QMatrix.identity(4)
    with pytest.raises(LeibnizViolation):
        make_exp(FinDerivation(M2, m), 2)
    rep = validate_higher_leibniz(FinHigherDerivation(M2, (m,)))
    assert not rep.ok and rep.k == 1 and rep.pair == (0, 0)


# -- conversion --------------------------------------------------------------


def values(seq):
    return [e.value for e in seq.entries]


def test_to_ordinary_examples():
    w = X**2 - 3
    assert values(to_ordinary_sequence(make_exp(PolyDerivation(w), 5))) == [w, 0, 0, 0, 0]
    assert values(to_ordinary_sequence(PolyHigherDerivation((w,)))) == [w]
    resc = make_rescaled(make_exp(d_dx(), 4), 2)
    assert resc.values == (ZERO, ONE, ZERO, ZERO)
    assert values(to_ordinary_sequence(resc)) == [0, 2, 0, 0]


def test_from_ordinary_examples():
    seq = OrdinaryDerivationSequence((d_dx(), d_dx()))
    d = from_ordinary_sequence(seq)
    assert d.value(1) == ONE and d.value(2) == Poly.const(Fraction(1, 2))
    assert d.apply(2, X**2) == X + 1
    assert from_ordinary_sequence(OrdinaryDerivationSequence(())) == PolyHigherDerivation.identity(0)
    exp = from_ordinary_sequence(OrdinaryDerivationSequence((PolyDerivation(X), PolyDerivation(ZERO), PolyDerivation(ZERO))))
    assert exp == make_exp(PolyDerivation(X), 3)


def test_fin_conversion():
    ad = FinDerivation(M2, M2.left_mult(E12) - M2.right_mult(E12))
    e = make_exp(ad, 3)
    seq = to_ordinary_sequence(e)
    assert seq.entries[0].matrix == ad.matrix
    assert all(s.matrix.is_zero() for s in seq.entries[1:])
    assert from_ordinary_sequence(seq) == e
    assert check_reconstruction(e, seq) is None


@settings(max_examples=30)
@given(st.integers(0, 10**6), st.integers(0, 6))
def test_round_trip_and_recursion(seed, order):
    d = rand_higher(random.Random(seed), order)
    seq = to_ordinary_sequence(d)
    assert check_reconstruction(d, seq) is None
    assert from_ordinary_sequence(seq) == d


# -- constructions -----------------------------------------------------------


def test_make_exp_examples():
    assert make_exp(PolyDerivation(ZERO), 3) == PolyHigherDerivation.identity(3)
    ad = M2.left_mult(E12) - M2.right_mult(E12)
    e = make_exp(FinDerivation(M2, ad), 2)
    assert e.matrix(2) == (ad @ ad).scale(Fraction(1, 2))
    assert validate_higher_leibniz(e).ok


def test_make_rescaled_examples():
    e = make_exp(d_dx(), 4)
    assert make_rescaled(e, 1) == e
    r = make_rescaled(e, 2)
    # (id, 0, d/dx, 0, (d/dx)^2 / 2)
    assert r.apply(1, X**3) == ZERO and r.apply(2, X**3) == 3 * X**2
    assert r.apply(3, X**3) == ZERO and r.apply(4, X**3) == 3 * X
    assert make_rescaled(e, 5) == PolyHigherDerivation.identity(4)


def test_make_inner_examples():
    T3 = FinAlgebra.truncated_poly(3)
    inner = make_inner_higher(T3, [1, 2, 3], 3)
    assert all(inner.matrix(k).is_zero() for k in range(1, 4))
    d = make_inner_higher(M2, E12, 2)
    assert validate_higher_leibniz(d).ok
    x = M2.basis(2)  # E21
    assert d.apply(1, x) == tuple(a - b for a, b in zip(M2.mul(E12, x), M2.mul(x, E12)))
    # E12 (E12 E21 - E21 E12) = E12 (E11 - E22) = -E12
    assert d.apply(2, x) == tuple(Fraction(-v) for v in E12)


def test_constructions_validate():
    rng = random.Random(4)
    for _ in range(10):
        w = rand_poly(rng, 3)
        n = rng.randint(0, 5)
        for d in (make_exp(PolyDerivation(w), n), make_rescaled(make_exp(PolyDerivation(w), n), rng.randint(1, 3))):
            assert validate_higher_leibniz(d).ok
    for a in (E12, [1, 0, 0, 2], [1, 2, 3, 4]):
        assert validate_higher_leibniz(make_inner_higher(M2, a, 4)).ok


@settings(max_examples=8)
@given(st.integers(0, 10**6))
def test_truncation_and_unit(seed):
    rng = random.Random(seed)
    d = rand_higher(rng, 5)
    for k in range(6):
        t = d.truncate(k)
        assert t.order == k and validate_higher_leibniz(t, samples=40).ok
    assert all(d.apply(k, ONE) == ZERO for k in range(1, 6))
    inner = make_inner_higher(M2, [rng.randint(-2, 2) for _ in range(4)], 3)
    assert all(not any(inner.apply(k, M2.unit)) for k in range(1, 4))
