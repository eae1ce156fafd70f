from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from hasse.errors import DimensionMismatch
from hasse.poly import ONE, X, ZERO, Poly, gcd, multiplicity_bound, split_f_part, xgcd
from hasse.polymatrix import PolyMatrix, det, snf, solve_linear
from hasse.presented import PresentedModule

from strategies import poly_matrices, polys

sx = sympy.Symbol("x")


def to_sympy(p: Poly):
    return sum((sympy.Rational(c.numerator, c.denominator) * sx**i for i, c in enumerate(p.coeffs)), sympy.S.Zero)


def from_sympy(e) -> Poly:
    coeffs = sympy.Poly(e, sx).all_coeffs()[::-1]
    return Poly([Fraction(int(sympy.fraction(c)[0]), int(sympy.fraction(c)[1])) for c in coeffs])


# -- polynomials -------------------------------------------------------------


def test_poly_arithmetic():
    p = 3 * X**2 - X + 1
    assert str(p) == "3*x^2 - x + 1"
    assert p.degree == 2 and p.lc == 3
    q, r = divmod(p, X - 1)
    assert q * (X - 1) + r == p and r == Poly.const(3)
    assert Poly().degree == -1 and not Poly()
    assert (X**2 - 1).exact_div(X - 1) == X + 1


def test_gcd_and_split():
    assert gcd(X**2 * (X - 1), X**3) == X**2
    g, s, t = xgcd(X**2, X + 1)
    assert g == ONE and s * X**2 + t * (X + 1) == ONE
    a, b = split_f_part(X**3 * (X - 1), X)
    assert a == X**3 and b == X - 1
    assert multiplicity_bound(X**3, X * (X - 1)) == 3
    assert multiplicity_bound(X**2 * (X - 1), X * (X - 1)) == 2


@given(polys, polys)
def test_poly_ring_matches_sympy(p, q):
    assert to_sympy(p * q).expand() == (to_sympy(p) * to_sympy(q)).expand()
    if q:
        quo, rem = divmod(p, q)
        sq, sr = sympy.div(to_sympy(p), to_sympy(q), sx)
        assert to_sympy(quo) - sq == 0 and to_sympy(rem) - sr == 0


@given(polys, polys)
def test_gcd_matches_sympy(p, q):
    g = gcd(p, q)
    if p or q:
        assert g == from_sympy(sympy.gcd(to_sympy(p), to_sympy(q))).monic()


# -- Smith normal form -------------------------------------------------------


def diag_of(m):
    return snf(PolyMatrix(m)).diagonal


def test_snf_examples():
    assert diag_of([[X, 0], [0, X**2]]) == (X, X**2)
    assert diag_of([[X**2, X]]) == (X,)
    assert diag_of([[0, 0], [0, 0]]) == (ZERO, ZERO)


def _check_form(m: PolyMatrix):
    form = snf(m)
    n, k = m.shape
    assert form.U @ m @ form.V == PolyMatrix.diagonal(form.diagonal, n, k)
    assert form.V @ form.V_inv == PolyMatrix.identity(k)
    for M in (form.U, form.V):
        d = det(M)
        assert d.is_constant() and d
    nz = [d for d in form.diagonal if d]
    assert all(d.lc == 1 for d in nz)
    for a, b in zip(form.diagonal, form.diagonal[1:]):
        assert (a.divides(b) if a else not b)
    return form


@settings(max_examples=60, deadline=None)
@given(poly_matrices())
def test_snf_invariants(m):
    _check_form(m)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 3).flatmap(lambda n: st.lists(st.lists(polys, min_size=n, max_size=n), min_size=n, max_size=n)))
def test_snf_product_is_determinant(rows):
    # oracle: product of invariant factors equals det up to a unit
    m = PolyMatrix(rows)
    form = _check_form(m)
    prod = ONE
    for d in form.diagonal:
        prod = prod * d
    sd = sympy.Matrix([[to_sympy(a) for a in r] for r in m.rows]).det()
    sd = sympy.expand(sd)
    if sd == 0:
        assert not prod
    else:
        assert prod == from_sympy(sd).monic()


def test_snf_deterministic():
    m = PolyMatrix([[X + 1, X**2], [X, 1]])
    a, b = snf(m), snf(m)
    assert (a.diagonal, a.U, a.V) == (b.diagonal, b.U, b.V)
    assert a.diagonal == (ONE, X**3 - X - 1)


# -- membership and solving --------------------------------------------------


def test_membership_examples():
    M = PresentedModule.from_rows(1, [[X**2]])
    res = M.membership([X**3])
    assert res.member and res.witness == (X,)
    assert not M.contains([X])
    N = PresentedModule.from_rows(2, [[X, 1]])
    res = N.membership([X * (1 + X), 1 + X])
    assert res.member and res.witness == (1 + X,)


def test_solve_linear_examples():
    assert solve_linear(PolyMatrix([[X]]), [X**2]) == (X,)
    assert solve_linear(PolyMatrix([[X]]), [ONE]) is None
    assert solve_linear(PolyMatrix([[X, 1]]), [X**2 + X, X + 1]) == (X + 1,)


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        solve_linear(PolyMatrix([[X]]), [X, X])


@settings(max_examples=100, deadline=None)
@given(poly_matrices(), st.data())
def test_membership_agrees_with_solve(m, data):
    n, k = m.shape
    M = PresentedModule(k, m)
    if data.draw(st.booleans()):
        u = [data.draw(polys) for _ in range(n)]
        v = m.vecmul(u)
    else:
        v = tuple(data.draw(polys) for _ in range(k))
    res = M.membership(v)
    sol = solve_linear(m, v)
    assert res.member == (sol is not None)
    if res.member:
        assert m.vecmul(res.witness) == tuple(v)


def test_canonical_representatives():
    M = PresentedModule.from_rows(2, [[X**2 * (X - 1), 0]])
    assert M.invariant_factors == (X**3 - X**2, ZERO)
    a = M.element([X**3, X])
    b = M.element([X**2, X])
    assert a == b
    assert M.canonical([X**3 - X**2, 0]) == (ZERO, ZERO)
    assert M.annihilator([ONE, ZERO]) == X**3 - X**2


def sympy_invariants(m: PolyMatrix) -> list[Poly]:
    """Oracle: sympy's Smith form over Q[x], normalized monic."""
    from sympy.matrices.normalforms import smith_normal_form

    sm = smith_normal_form(sympy.Matrix([[to_sympy(a) for a in r] for r in m.rows]), domain=sympy.QQ[sx])
    out = []
    for i in range(min(sm.shape)):
        e = sympy.expand(sm[i, i])
        out.append(from_sympy(e).monic() if e != 0 else ZERO)
    return out


@settings(max_examples=40)
@given(poly_matrices(3, 3))
def test_snf_matches_sympy(m):
    assert list(snf(m).diagonal) == sympy_invariants(m)
