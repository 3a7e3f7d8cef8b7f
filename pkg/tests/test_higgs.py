"""Framed bundles, parabolic Higgs fields and the operations on them."""
from fractions import Fraction

import pytest

from spectralcover.bnr import pushforward_bundle
from spectralcover.curve import Curve, hyperelliptic_cover, line_point, pullback_sigma
from spectralcover.divisor import Divisor, random_class_of_degree
from spectralcover.exactfield import GF, RngStream
from spectralcover.higgs import (FrameBundle, HiggsError, LedgerEntry, ParabolicHiggs, elem, hitchin,
                                 invariant_subbundles, mat, mat_det, mat_tr, phi_map, pullback_higgs, slope,
                                 slope_sub, twist, upper_triangular_higgs)
from spectralcover.polyfun import Poly, RatFun

F101 = GF(101)
HALF = Fraction(1, 2)


def model_field(entries, polar_pts=(0,), F=F101):
    """theta = entries * dx / x on P^1 in a trivial frame."""
    P1 = Curve.projective_line(F)
    x = Poly.x(F)
    bundle = FrameBundle(P1, {}, (LedgerEntry("split", None, 0),), (0, 0))
    polar = Divisor(P1, {line_point(F, t): 1 for t in polar_pts})
    return ParabolicHiggs(bundle, mat(P1, *entries), P1.from_base(RatFun(Poly(F, [1]), x)), polar)


def test_residue_of_model_field():
    x = Poly.x(F101)
    H = model_field((0, 1, x, 0))
    t = line_point(F101, 0)
    res, nil = H.residue_matrix(t)
    assert res == (0, 1, 0, 0) and nil
    assert H.kernel_direction(t) == (1, 0)


def test_holomorphic_point_has_zero_residue():
    x = Poly.x(F101)
    H = model_field((x, x, x, x))
    res, nil = H.residue_matrix(line_point(F101, 0))
    assert res == (0, 0, 0, 0) and nil


def test_double_pole_is_rejected():
    P1 = Curve.projective_line(F101)
    H = model_field((0, 1, 1, 0))
    H = H.replace(phi=P1.from_base(RatFun(Poly(F101, [1]), Poly.x(F101) ** 2)))
    with pytest.raises(HiggsError):
        H.residue_matrix(line_point(F101, 0))


def test_determinant_of_model_field():
    x = Poly.x(F101)
    H = model_field((0, 1, x, 0))
    s2 = mat_det(H.theta) * H.phi * H.phi
    assert s2.base_part() == -RatFun(Poly(F101, [1]), x)
    assert mat_tr(H.theta).is_zero()


def test_residue_doubles_under_ramified_pullback():
    x = Poly.x(F101)
    H = model_field((0, 1, x, 0), polar_pts=(0, 1, "inf"))
    Y, pi = hyperelliptic_cover(F101, [0, 1])
    G = pullback_higgs(pi, H)
    t = line_point(F101, 0)
    q = pi.fiber(t)[0]
    down, _ = H.residue_matrix(t)
    up, nil = G.residue_matrix(q)
    assert nil and up == tuple(F101.mul(2, v) for v in down)


def test_slopes():
    assert slope(0, [HALF] * 5) == Fraction(5, 4)
    assert slope_sub(0, [False] * 5, [HALF] * 5) == 0
    assert slope_sub(-1, [True] * 5, [HALF] * 5) == Fraction(3, 2)


def test_elem_model_matrix():
    x = Poly.x(F101)
    a, b, c, d = (Poly(F101, [2, 1]), Poly(F101, [5]), Poly(F101, [3, 0, 1]), Poly(F101, [7]))
    H = model_field((a, b, x * c, d))
    t = line_point(F101, 0)
    H2, flags = elem(H, [(t, (1, 0))])
    P1 = H.base
    expect = mat(P1, a, x * b, c, d)
    assert tuple(H2.local_matrix(t)) == tuple(expect)
    assert H.degree - H2.degree == 1
    H2.bundle.check_ledger()


def test_elem_twice_is_twist_by_minus_point(five):
    fam, _ = five
    H = pushforward_bundle(fam.x_side, random_class_of_degree(fam.X, RngStream(1, "twice"), fam.n_frak))
    t = H.polar.support()[0]
    H1, _ = elem(H, [(t, H.directions[t])])
    H2, _ = elem(H1, [(t, H1.directions[t])])
    assert H.degree - H2.degree == 2
    H2.bundle.check_ledger()
    # elem twice at the kernel direction equals the twist by O(-t) as a framed field
    Ht = twist(H, Divisor.point(t, -1))
    M2, Mt = H2.local_matrix(t), Ht.local_matrix(t)
    le = t.local()
    for u, v in zip(M2, Mt):
        assert (u - v).is_zero() or le.ord(u - v) >= 0


def test_elem_center_count_and_hitchin(five):
    fam, _ = five
    rng = RngStream(2, "centers")
    H = pushforward_bundle(fam.x_side, random_class_of_degree(fam.X, rng, fam.n_frak))
    s = hitchin(H)
    for k in range(1, 5):
        centers = H.polar.support()[:k]
        centers = [q for q in centers if q.chart != "inf"] or centers
        H2, flags = elem(H, [(q, H.directions[q]) for q in centers])
        assert not flags
        assert H.degree - H2.degree == len(centers)
        assert hitchin(H2).s2 == s.s2
        H2.bundle.check_ledger()


def test_elem_off_kernel_is_rejected(five):
    # a direction off the residue kernel produces a double pole after the transformation
    fam, _ = five
    H = pushforward_bundle(fam.x_side, random_class_of_degree(fam.X, RngStream(3, "flag"), fam.n_frak))
    t = next(q for q in H.polar.support() if q.chart != "inf")
    l = H.directions[t]
    other = (1, 0) if l[1] else (0, 1)
    with pytest.raises(HiggsError):
        elem(H, [(t, other)])


def test_hitchin_generic_quintic_zero_is_rho(five):
    fam, _ = five
    H = pushforward_bundle(fam.x_side, random_class_of_degree(fam.X, RngStream(4, "rho"), fam.n_frak))
    s = hitchin(H)
    assert s.s2 == fam.s.s2
    assert s.h().degree == 1
    assert [list(s.h().monic().c)] == fam.rho()


def test_hitchin_rejects_double_pole():
    x = Poly.x(F101)
    # residue (1 0; 0 -1) is not nilpotent: det theta acquires a double pole at 0
    H = model_field((1, 0, 0, -1), polar_pts=(0, 1, 2, 3, 4))
    with pytest.raises(HiggsError):
        hitchin(H)


def test_pullback_properties(five):
    fam, _ = five
    pi = fam.maps["pi"]
    H = pushforward_bundle(fam.x_side, random_class_of_degree(fam.X, RngStream(5, "pull"), fam.n_frak))
    G = pullback_higgs(pi, H)
    assert hitchin(G).s2 == pullback_sigma(pi, fam.s, fam.T).s2
    for t in H.polar.support():
        fib = pi.fiber(t)
        if t in fam.B.mult:
            assert len(fib) == 1
            down, _ = H.residue_matrix(t)
            up, nil = G.residue_matrix(fib[0])
            assert nil and any(not fib[0].field.is_zero(v) for v in up)
        else:
            assert sum(q.degree for q in fib) == 2 and all(G.polar.get(q) == 1 for q in fib)
    G.bundle.check_ledger()


@pytest.mark.parametrize("which,before", [("five", -4), ("six", -6)])
def test_phi_degrees_and_hitchin(which, before, request):
    fam, _ = request.getfixturevalue(which)
    pi = fam.maps["pi"]
    H = pushforward_bundle(fam.x_side, random_class_of_degree(fam.X, RngStream(6, which), fam.n_frak))
    G = phi_map(pi, H)
    assert G.degree == before
    G.bundle.check_ledger()
    assert not G.check_regular()
    assert all(G.polar.get(q) == 0 for q in fam.R.support())
    assert hitchin(G).s2 == pullback_sigma(pi, fam.s, fam.T).s2
    G0 = phi_map(pi, H, fam.L0)
    assert G0.degree == 0
    G0.bundle.check_ledger()


def test_strong_parabolicity_certificate_both_ways(five):
    fam, _ = five
    rng = RngStream(7, "strong")
    for _ in range(5):
        H = pushforward_bundle(fam.x_side, random_class_of_degree(fam.X, rng, fam.n_frak))
        assert H.is_strongly_parabolic()
        assert mat_tr(H.theta).is_zero()
        one = H.base.const(rng.randrange(1, 101))
        shifted = H.replace(theta=(H.theta[0] + one, H.theta[1], H.theta[2], H.theta[3] + one))
        assert not shifted.is_strongly_parabolic()
        assert not mat_tr(shifted.theta).is_zero()


def test_invariant_line_search(five):
    fam, _ = five
    D = fam.D
    H = upper_triangular_higgs(F101, D, (1, -3), Poly(F101, [2, 1]), Poly(F101, [1, 1, 1]))
    found = invariant_subbundles(H, bound=10)
    assert any(deg == 1 and prim[1].is_zero() for deg, prim in found)
    Hx = pushforward_bundle(fam.x_side, random_class_of_degree(fam.X, RngStream(8, "inv"), fam.n_frak))
    assert invariant_subbundles(Hx, bound=20) == []


def test_weights_flip_under_elem(five):
    fam, _ = five
    H = pushforward_bundle(fam.x_side, random_class_of_degree(fam.X, RngStream(9, "mu"), fam.n_frak))
    t = next(q for q in H.polar.support() if q.chart != "inf")
    H.weights[t] = Fraction(1, 3)
    H2, _ = elem(H, [(t, H.directions[t])])
    assert H2.weights[t] == Fraction(2, 3)
