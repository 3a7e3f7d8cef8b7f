import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from spectralcover.bnr import (calibrate, check_base_twist, check_elem_twist, check_pullback, eigen_divisor,
                               eigenvalue_point, higgs_isomorphic, line_bundle_test, nowhere_holomorphic,
                               pushforward_bundle, reduced_preimage, resplit, verify_theorem_main, w_divisor)
from spectralcover.curve import line_point
from spectralcover.divisor import Divisor, linear_equiv, pullback_divisor, random_class_of_degree
from spectralcover.exactfield import RngStream
from spectralcover.higgs import hitchin, mat_det, mat_tr


def _cls(fam, tag, degree=None, size=None):
    d = fam.n_frak if degree is None else degree
    return random_class_of_degree(fam.X, RngStream(11, tag), d, size=size)


@pytest.mark.parametrize("which", ["five", "six"])
def test_direct_image_has_spectral_char_poly(which, request):
    fam, _ = request.getfixturevalue(which)
    for i in range(4):
        m = _cls(fam, f"cp/{which}/{i}")
        H = pushforward_bundle(fam.x_side, m)
        assert mat_tr(H.theta).is_zero()
        assert mat_det(H.theta) == H.base.from_base(-fam.x_side.curve.polys[0])
        assert H.degree == m.degree - fam.x_side.spectral.twist_degree
        assert hitchin(H).s2 == fam.s.s2
        H.bundle.check_ledger()


def test_degree_of_direct_image_tracks_class_degree(five):
    fam, _ = five
    for shift in (0, 1, 2):
        m = _cls(fam, f"deg/{shift}", fam.n_frak + shift)
        H = pushforward_bundle(fam.x_side, m)
        assert H.degree == fam.n_frak + shift - fam.x_side.spectral.twist_degree
        a1, a2 = H.bundle.splitting
        assert a1 >= a2 and a1 + a2 == H.degree


def test_splitting_shifts_by_one_under_fiber_at_infinity(five):
    fam, _ = five
    m = _cls(fam, "inf-shift")
    inf = fam.x_side.base.infinity_points()[0]
    fiber = pullback_divisor(fam.x_side.q, Divisor.point(inf))
    H, H2 = pushforward_bundle(fam.x_side, m), pushforward_bundle(fam.x_side, m + fiber)
    assert sorted(H2.bundle.splitting) == sorted(a + 1 for a in H.bundle.splitting)


def test_calibration_sign_and_offset(five):
    fam, calib = five
    assert calib.sign in (1, -1)
    assert calib.sign == 1
    for i in range(3):
        m = _cls(fam, f"cal/{i}")
        e = eigen_divisor(pushforward_bundle(fam.x_side, m), fam.x_side)
        assert linear_equiv(e, calib.predicted(m))[0]
        assert linear_equiv(calib.class_of(e), m)[0]


def test_calibration_independent_of_samples(five):
    fam, calib = five
    other = calibrate(fam.x_side, [_cls(fam, f"recal/{i}") for i in range(3)])
    assert other.sign == calib.sign
    assert linear_equiv(other.offset, calib.offset)[0]


def test_calibration_needs_three_samples(five):
    fam, _ = five
    with pytest.raises(ValueError):
        calibrate(fam.x_side, [_cls(fam, "few")])


def test_eigen_divisor_detects_inequivalent_classes(five):
    fam, calib = five
    m1, m2 = _cls(fam, "neq/1"), _cls(fam, "neq/2")
    if linear_equiv(m1, m2)[0]:
        pytest.skip("drew equivalent classes")
    e1 = eigen_divisor(pushforward_bundle(fam.x_side, m1), fam.x_side)
    e2 = eigen_divisor(pushforward_bundle(fam.x_side, m2), fam.x_side)
    assert not linear_equiv(e1, e2)[0]


def test_isomorphism_of_direct_images(five):
    fam, _ = five
    m = _cls(fam, "iso")
    H1 = pushforward_bundle(fam.x_side, m)
    ok, g = higgs_isomorphic(H1, pushforward_bundle(fam.x_side, m))
    assert ok
    other = _cls(fam, "iso/other")
    if not linear_equiv(m, other)[0]:
        assert not higgs_isomorphic(H1, pushforward_bundle(fam.x_side, other))[0]


def test_resplit_roundtrip(five):
    fam, _ = five
    H = pushforward_bundle(fam.x_side, _cls(fam, "resplit"))
    R = resplit(H)
    assert sorted(R.bundle.splitting) == sorted(H.bundle.splitting)
    assert higgs_isomorphic(R, H)[0]


@pytest.mark.parametrize("which", ["five", "six"])
def test_line_bundle_and_nowhere_holomorphic(which, request):
    fam, _ = request.getfixturevalue(which)
    H = pushforward_bundle(fam.x_side, _cls(fam, f"lb/{which}"))
    assert line_bundle_test(H)
    assert nowhere_holomorphic(H)
    assert H.is_strongly_parabolic()


@pytest.mark.parametrize("which", ["five", "six"])
def test_eigenvalue_points_lie_over_centers(which, request):
    fam, _ = request.getfixturevalue(which)
    side = fam.x_side
    H = pushforward_bundle(side, _cls(fam, f"ev/{which}"))
    for t in H.polar.support():
        q = eigenvalue_point(H, side, t, H.directions[t])
        assert side.q.image(q) == t
    assert w_divisor(H, side) == reduced_preimage(side, H.polar.support())


def test_eigenvalue_point_rejects_non_eigendirection(five):
    from spectralcover.higgs import HiggsError
    fam, _ = five
    H = pushforward_bundle(fam.x_side, _cls(fam, "ev/bad"))
    t = next(q for q in H.polar.support() if q.chart != "inf")
    l = H.directions[t]
    other = (1, 0) if l[1] else (0, 1)
    with pytest.raises(HiggsError):
        eigenvalue_point(H, fam.x_side, t, other)


@pytest.mark.parametrize("which", ["five", "six"])
@pytest.mark.parametrize("mode", ["all", "none", "one"])
def test_elementary_transformation_lowers_class(which, mode, request):
    fam, calib = request.getfixturevalue(which)
    m = _cls(fam, f"elem/{which}/{mode}")
    D = pushforward_bundle(fam.x_side, m).polar.support()
    centers = {"all": D, "none": [], "one": D[:1]}[mode]
    res = check_elem_twist(fam.x_side, calib, m, centers)
    assert res["pass"], res
    assert res["degree_drop"] == len(centers)
    assert res["w_is_reduced_preimage"] and res["strongly_parabolic"]


@pytest.mark.parametrize("which", ["five", "six"])
def test_pullback_eigen_divisor(which, request):
    fam, calib = request.getfixturevalue(which)
    for i in range(2):
        res = check_pullback(fam, calib, _cls(fam, f"pull/{which}/{i}"))
        assert res["exact"] and res["class"]


def test_base_twist_moves_class(five):
    fam, calib = five
    F = fam.X.field
    for i, c in enumerate((7, 13)):
        delta = Divisor.point(line_point(F, c)) * (i + 1)
        res = check_base_twist(fam, calib, _cls(fam, f"twist/{i}"), delta)
        assert res["pass"], res


@pytest.mark.parametrize("which", ["five", "six"])
def test_main_theorem_with_control(which, request):
    fam, calib = request.getfixturevalue(which)
    m1, m2 = _cls(fam, f"thm/{which}/1"), _cls(fam, f"thm/{which}/2")
    ctrl = _cls(fam, f"thm/{which}/ctrl", 0, size=4)
    if linear_equiv(ctrl, Divisor(fam.X))[0] or linear_equiv(ctrl, fam.eps)[0]:
        ctrl = None
    res = verify_theorem_main(fam, calib, m1, m2, ctrl)
    assert res["pass"], res
    assert res["degree_det_twisted"] == 0
    assert res["prym_degree"] == 2
    assert res["degree_det"] == {"p1-five": -4, "p1-six": -6}[fam.kind]
    if ctrl is not None:
        assert res["c_control"] is False


def test_equivalent_representatives_give_isomorphic_fields(five):
    from spectralcover.divisor import principal_divisor
    fam, _ = five
    m = _cls(fam, "iso/equiv")
    f = fam.X.x() - fam.X.const(17)
    H1 = pushforward_bundle(fam.x_side, m)
    H2 = pushforward_bundle(fam.x_side, m + principal_divisor(f))
    assert higgs_isomorphic(H1, H2)[0]


@settings(max_examples=12, deadline=None, suppress_health_check=[HealthCheck.function_scoped_fixture])
@given(seed=st.integers(0, 10 ** 6))
def test_round_trip_recovers_class(five, seed):
    fam, calib = five
    m = random_class_of_degree(fam.X, RngStream(seed, "roundtrip"), fam.n_frak)
    H = pushforward_bundle(fam.x_side, m)
    assert linear_equiv(calib.class_of(eigen_divisor(H, fam.x_side)), m)[0]
