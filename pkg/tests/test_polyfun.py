"""Polynomials, rational functions, series and residues."""
import pytest
import sympy
from hypothesis import given, settings, strategies as st

from spectralcover.exactfield import GF, make_extension
from spectralcover.polyfun import (LaurentSeries, Poly, RatFun, factor, gcd, is_square_ratfun, poly_sqrt,
                                   residue, resultant, series_solve_curve, squarefree_and_roots, xgcd)

F7, F11, F101 = GF(7), GF(11), GF(101)
X = sympy.symbols("x")

coeff_lists = st.lists(st.integers(0, 100), min_size=1, max_size=9)


def P(F, coeffs):
    return Poly(F, [c % F.p for c in coeffs])


def to_sympy(f: Poly):
    return sympy.Poly(list(reversed(f.c)) or [0], X, modulus=f.field.p)


def from_sympy(g, F):
    return Poly(F, [int(c) % F.p for c in reversed(g.all_coeffs())])


def test_squarefree_part_and_roots():
    f = P(F7, [0, 0, 1]) * P(F7, [-1, 1])
    sqf, roots = squarefree_and_roots(f)
    assert sqf == P(F7, [0, -1, 1])
    assert roots == {0: 2, 1: 1}


def test_five_simple_roots_of_stated_quintic():
    f = Poly.from_roots(F11, [0, 1, 3, 5, 2])
    sqf, roots = squarefree_and_roots(f)
    assert sqf == f
    assert roots == {0: 1, 1: 1, 2: 1, 3: 1, 5: 1}


def test_x2_plus_1_roots_only_in_extension():
    f = P(F7, [1, 0, 1])
    assert squarefree_and_roots(f)[1] == {}
    K = make_extension(F7, 2)
    roots = squarefree_and_roots(f, K)[1]
    scan = [a for a in K.elements() if K.add(K.mul(a, a), K.one) == K.zero]
    assert sorted(roots) == sorted(scan) and len(scan) == 2


def test_zero_polynomial_rejected():
    with pytest.raises(ValueError):
        squarefree_and_roots(Poly(F7, []))


@settings(max_examples=500, deadline=None)
@given(coeff_lists, coeff_lists)
def test_gcd_divides_and_is_a_combination(a, b):
    f, g = P(F101, a), P(F101, b)
    if f.is_zero() and g.is_zero():
        return
    d, u, v = xgcd(f, g)
    assert (f % d).is_zero() and (g % d).is_zero()
    assert u * f + v * g == d
    assert d == gcd(f, g)
    assert d == from_sympy(sympy.gcd(to_sympy(f), to_sympy(g)), F101).monic()


@settings(max_examples=200, deadline=None)
@given(coeff_lists, coeff_lists, st.integers(0, 100), st.booleans())
def test_resultant_vanishes_iff_common_factor(a, b, r, plant):
    f, g = P(F101, a + [1]), P(F101, b + [1])
    if plant:
        f = f * P(F101, [-r, 1])
        g = g * P(F101, [-r, 1])
    res = resultant(f, g)
    assert (res == 0) == (gcd(f, g).degree > 0)
    if plant:
        assert res == 0
    assert res == sylvester_det(f, g)


def sylvester_det(f: Poly, g: Poly) -> int:
    """Independent oracle: determinant of the Sylvester matrix."""
    m, n = f.degree, g.degree
    fc, gc = list(reversed(f.c)), list(reversed(g.c))
    rows = [[0] * i + fc + [0] * (n - 1 - i) for i in range(n)]
    rows += [[0] * i + gc + [0] * (m - 1 - i) for i in range(m)]
    if not rows:
        return 1
    return int(sympy.Matrix(rows).det()) % f.field.p


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(0, 10), min_size=2, max_size=8))
def test_factorization_matches_sympy(coeffs):
    f = P(F11, coeffs + [1])
    ours = sorted((g.c, e) for g, e in factor(f))
    _, theirs = sympy.factor_list(to_sympy(f))
    theirs = sorted((from_sympy(g, F11).monic().c, e) for g, e in theirs)
    assert ours == theirs


def test_is_square_ratfun_examples():
    x = RatFun.x(F7)
    one = RatFun.const(F7, 1)
    h = (x - one) ** 2 / x ** 2
    w = is_square_ratfun(h)
    assert w * w == h and w in ((x - one) / x, -(x - one) / x)
    assert is_square_ratfun(x * (x - one)) is None
    h = RatFun.const(F7, 4) * (x * x + one) ** 2 / (x - RatFun.const(F7, 3)) ** 4
    w = is_square_ratfun(h)
    assert w is not None and w * w == h


def test_square_up_to_nonsquare_constant():
    x = RatFun.x(F7)
    h = RatFun.const(F7, 3) * x * x          # 3 is not a square mod 7
    assert is_square_ratfun(h) is None
    assert is_square_ratfun(h, geometric=True) is not None


@settings(max_examples=100, deadline=None)
@given(coeff_lists, coeff_lists)
def test_square_of_random_ratfun_is_detected(a, b):
    num, den = P(F101, a), P(F101, b + [1])
    if num.is_zero():
        return
    h = RatFun(num, den)
    w = is_square_ratfun(h * h)
    assert w is not None and w * w == h * h


def test_poly_sqrt_rejects_nonsquares():
    assert poly_sqrt(P(F7, [0, 1])) is None
    assert poly_sqrt(P(F7, [1, 2, 1])) in (P(F7, [1, 1]), P(F7, [-1, -1]))


def test_series_solve_linear_case():
    s = series_solve_curve(P(F7, [0, 1]), 0, 8)
    assert s.val == 2 and s.coeffs[0] == 1 and all(c == 0 for c in s.coeffs[1:])


def test_series_solve_substitutes_back():
    f = P(F7, [0, -1, 1])                     # x(x - 1), f'(0) = -1
    s = series_solve_curve(f, 0, 6)
    assert s.val == 2 and s.coeffs[0] == F7.neg(1)
    back = s.compose_into(f).truncate(6)
    y2 = LaurentSeries(F7, 2, [1], 6, "y")
    diff = back - y2
    assert diff.is_zero()


def test_series_solve_rejects_non_root():
    with pytest.raises(ValueError):
        series_solve_curve(P(F7, [1, 1]), 0, 6)


def test_residue_examples():
    x = RatFun.x(F101)
    one = RatFun.const(F101, 1)
    assert residue(one / x, 0) == 1
    chart = LaurentSeries(F101, 2, [1], 12, "y")     # x = y^2
    assert residue(one / x, chart=chart) == 2
    om = x / ((x - one) * (x - RatFun.const(F101, 2)))
    assert residue(om, 1) == -1                # partial fractions: -1/(x-1) + 2/(x-2)
    assert residue(om, 2) == 2
    assert residue(om, "inf") == -1


@settings(max_examples=200, deadline=None)
@given(st.lists(st.integers(0, 100), min_size=1, max_size=6),
       st.lists(st.integers(0, 100), min_size=1, max_size=4, unique=True), st.integers(1, 3))
def test_residue_theorem_on_the_line(num, roots, mult):
    F = F101
    den = Poly.from_roots(F, roots) * P(F, [-roots[0], 1]) ** (mult - 1)
    om = RatFun(P(F, num), den)
    if om.is_zero():
        return
    total = residue(om, "inf")
    for r in roots:
        total = total + residue(om, r)
    assert total == 0


def test_ratfun_canonical_form():
    x = RatFun.x(F7)
    r = (x * x - RatFun.const(F7, 1)) / (RatFun.const(F7, 2) * (x - RatFun.const(F7, 1)))
    assert r.den.lc == 1 and gcd(r.num, r.den).degree == 0
    assert r == (x + RatFun.const(F7, 1)) / RatFun.const(F7, 2)
