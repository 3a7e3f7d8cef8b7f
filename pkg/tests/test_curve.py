"""Base curves, covers, Hitchin sections and spectral curves."""
import pytest
from hypothesis import given, settings, strategies as st

from spectralcover.curve import (INF, CeilingError, Curve, CurveError, Limits, SigmaSection, affine_product,
                                 branch_and_ramification, closed_points, genus, hyperelliptic_cover,
                                 line_point, pullback_sigma, random_sigma, sigma_dimension, sigma_from_coeffs,
                                 spectral_curve, spectral_over_line)
from spectralcover.divisor import pullback_divisor
from spectralcover.exactfield import GF, RngStream, make_extension
from spectralcover.families import build_curves, family_points
from spectralcover.polyfun import Poly, RatFun, squarefree_and_roots

F7, F11, F101 = GF(7), GF(11), GF(101)


def test_branch_data_elliptic_over_f7():
    Y, pi = hyperelliptic_cover(F7, [0, 1, 3, INF])
    assert Y.genus == 1
    B, R = branch_and_ramification(pi)
    assert len(B.mult) == 4 and B.degree == 4
    assert {q.chart for q in B.support()} == {"aff", "inf"}
    assert len(R.mult) == 4 and all(q.ram_index == 0 for q in R.support())
    assert pullback_divisor(pi, B) == R * 2


def test_branch_data_sextic():
    Y, pi = hyperelliptic_cover(F101, range(6))
    B, R = branch_and_ramification(pi)
    assert Y.genus == 2 and B.degree == 6
    assert pullback_divisor(pi, B) == R * 2


def test_cover_rejects_wrong_parity():
    with pytest.raises(CurveError):
        hyperelliptic_cover(F7, [0, 1, 3])


def test_quintic_spectral_curve_roots():
    # h of degree 1 contributes the sixth branch point rho of q_s
    s = sigma_from_coeffs(F11, [0, 1, 3, INF, 5], [4, 2])        # h = 4 + 2x, root rho = 9
    Xs = spectral_over_line(F11, s)
    sqf, roots = squarefree_and_roots(Xs.disc)
    assert Xs.disc.degree == 5 and sorted(roots) == [0, 1, 3, 5, 9]
    assert all(m == 1 for m in roots.values())
    assert Xs.ok and genus(Xs) == 2


def test_square_discriminant_is_not_integral():
    P1 = Curve.projective_line(F101)
    D = [0, 1, 2, 3, 4]
    PD = affine_product(F101, D)
    r1, r2 = Poly(F101, [3, 1]), Poly(F101, [7, 0, 1])
    s = SigmaSection(P1, D, P1.from_base(RatFun(-(r1 + r2), PD)), P1.from_base(RatFun(r1 * r2, PD * PD)))
    c = spectral_curve(P1, s, frame_poly=PD)
    assert not c.integral and c.curve is None


def test_square_s2_alone_is_not_integral():
    P1 = Curve.projective_line(F101)
    D = [0, 1, 2, 3, 4, 5]
    PD = affine_product(F101, D)
    sq = Poly(F101, [5, 1]) ** 2 * Poly(F101, [-1])      # -s2 a perfect square
    s = SigmaSection(P1, D, P1.function({}), P1.from_base(RatFun(sq, PD * PD)))
    assert not spectral_curve(P1, s, frame_poly=PD).integral


@pytest.mark.parametrize("kind,gx,gz", [("p1-five", 2, 3), ("p1-six", 3, 5)])
def test_genus_pairs(kind, gx, gz):
    B, T = family_points(kind, 101)
    rng = RngStream(3, "genus")
    while True:
        Xs, Y, pi, r, Yr = build_curves(kind, 101, random_sigma(F101, B + T, rng), B, T)
        if Xs.ok and Yr.ok:
            break
    assert (genus(Xs), genus(Yr)) == (gx, gz)
    assert Xs.genus_formula == Xs.curve.genus and Yr.genus_formula == Yr.curve.genus


def test_genus_formula_values():
    # deg L + 2(g - 1) + 1
    cases = [(3, 0, 2), (2, 1, 3), (2, 2, 5), (4, 0, 3)]
    for degL, g, expect in cases:
        assert degL + 2 * (g - 1) + 1 == expect


def test_sigma_dimension():
    assert sigma_dimension(5) == 2 and sigma_dimension(6) == 3 and sigma_dimension(3) == 0
    with pytest.raises(CurveError):
        sigma_from_coeffs(F101, [0, 1, 2, 3, 4], [1, 2, 3])


def test_pullback_of_dx2_over_x_is_four_dy2():
    P1 = Curve.projective_line(F101)
    Y, pi = hyperelliptic_cover(F101, [0, 1])                    # y^2 = x(x - 1), local model y^2 ~ -x at 0
    x = Poly.x(F101)
    s = SigmaSection(P1, [0, 1, INF], P1.function({}), P1.from_base(RatFun(Poly(F101, [1]), x)))
    r = pullback_sigma(pi, s, [INF])
    q = Y.points_over_value(0)[0]
    le = q.local()
    ser = le.expand(r.s2, 2)
    vdx, dx = le.dx_series(2)
    # x = -y^2 + ..., so dx^2/x = 4y^2 dy^2/(-y^2) + ... : order 0, leading coefficient -4
    assert ser.val + 2 * vdx == 0
    assert F101.mul(ser.coeffs[0], F101.mul(dx[0], dx[0])) == F101.neg(4)


def test_pullback_keeping_a_pole_is_rejected():
    P1 = Curve.projective_line(F101)
    Y, pi = hyperelliptic_cover(F101, [0, 1])
    x = Poly.x(F101)
    s = SigmaSection(P1, [0, 1, INF], P1.function({}), P1.from_base(RatFun(Poly(F101, [1]), x * x)))
    with pytest.raises(CurveError):
        pullback_sigma(pi, s, [INF])


def test_pullback_holomorphic_when_poles_only_on_branch_locus():
    Y, pi = hyperelliptic_cover(F101, range(6))
    s = random_sigma(F101, list(range(6)), RngStream(0, "holo"))
    r = pullback_sigma(pi, s, [])
    for q in Y.ramification_points() + Y.infinity_points():
        le = q.local()
        assert le.ord(r.s2) + 2 * le.dx_series(1)[0] >= 0


@settings(max_examples=25, deadline=None)
@given(st.lists(st.integers(0, 100), min_size=2, max_size=2), st.lists(st.integers(0, 100), min_size=2, max_size=2))
def test_pullback_sigma_is_linear(a, b):
    B, T = family_points("p1-five", 101)
    Y, pi = hyperelliptic_cover(F101, B)
    sa, sb = sigma_from_coeffs(F101, B + T, a), sigma_from_coeffs(F101, B + T, b)
    lhs = pullback_sigma(pi, sa + sb, T).s2
    assert lhs == pullback_sigma(pi, sa, T).s2 + pullback_sigma(pi, sb, T).s2


def test_xi_fiber_solves_yz_equal_w(five):
    fam, _ = five
    xi = fam.maps["xi"]
    rng = RngStream(5, "fiber")
    seen = 0
    while seen < 20:
        x0 = rng.randrange(101)
        for P in fam.X.points_over_value(x0):
            if P.degree != 1 or P.ram_index is not None:
                continue
            fib = xi.fiber(P)
            K = fib[0].field
            assert sum(q.degree for q in fib) == 2
            y0 = fam.Y.polys[0].evaluate(K.lift(x0), K)
            for q in fib:
                y, z = q.etas
                assert K.mul(y, y) == y0
                assert K.mul(y, z) == K.lift(P.etas[0])
            if len(fib) == 2:
                a, b = fib
                assert a.etas[0] == K.neg(b.etas[0]) and a.etas[1] == K.neg(b.etas[1])
            seen += 1


def test_diagram_commutes_on_random_points(five):
    fam, _ = five
    qs, xi, pi, qr = (fam.maps[k] for k in ("q_s", "xi", "pi", "q_r"))
    rng = RngStream(6, "commute")
    count = 0
    while count < 100:
        pts = fam.Z.points_over_value(rng.randrange(101))
        for P in pts:
            assert qs.image(xi.image(P)) == pi.image(qr.image(P))
            count += 1


def test_rational_point_counts_fiber_consistently(five):
    fam, _ = five
    xi = fam.maps["xi"]
    total = 0
    for P in fam.X.rational_points():
        total += sum(1 for q in xi.fiber(P) if q.degree == 1)
    assert total == fam.Z.count_points(F101)


def test_point_count_matches_brute_force():
    Y, _ = hyperelliptic_cover(F11, [0, 1, 3, INF])
    affine = sum(1 for x in range(11) for y in range(11) if (y * y - x * (x - 1) * (x - 3)) % 11 == 0)
    assert Y.count_points(F11) == affine + 1


def test_points_satisfy_chart_equations(six):
    fam, _ = six
    for P in closed_points(fam.Z, 1):
        K = P.field
        for phi, eta in zip(fam.Z.chart_polys(P.chart), P.etas):
            assert K.mul(eta, eta) == phi.evaluate(P.c0, K)
    with pytest.raises(CurveError):
        fam.Y.point(2, [1])


def test_ceiling_is_enforced():
    old = Limits.ext_ceiling
    try:
        Limits.ext_ceiling = 1000
        with pytest.raises(CeilingError):
            list(closed_points(Curve.hyperelliptic(Poly(F101, [0, 1, 0, 1])), 2))
        with pytest.raises(CeilingError):
            Curve.projective_line(F101).count_points(make_extension(F101, 2))
    finally:
        Limits.ext_ceiling = old


@pytest.mark.parametrize("kind", ["p1-five", "p1-six"])
def test_genericity_majority(kind):
    B, T = family_points(kind, 101)
    rng = RngStream(9, f"generic/{kind}")
    good = 0
    for _ in range(200):
        Xs, Y, pi, r, Yr = build_curves(kind, 101, random_sigma(F101, B + T, rng), B, T)
        good += Xs.ok and Yr.ok
    assert good >= 100
