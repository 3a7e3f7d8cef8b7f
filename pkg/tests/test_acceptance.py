"""Acceptance criteria 1-9, each reported as one PASS/FAIL line at the end of the run."""
import time

import pytest

from spectralcover.curve import Limits, closed_points, genus, sigma_dimension
from spectralcover.divisor import Divisor, linear_equiv, pullback_divisor, random_class_of_degree
from spectralcover.exactfield import RngStream
from spectralcover.bnr import verify_theorem_main
from spectralcover.suites import (Recorder, Scenario, _genericity, degree_ledger, suite_elem,
                                  suite_integrality, suite_pullback, suite_twist)

from conftest import ACCEPTANCE, family_at

pytestmark = pytest.mark.acceptance

KINDS = ("p1-five", "p1-six")
THEOREM_PRIMES = (101, 103)
EXPECTED_GENERA = {"p1-five": (2, 3), "p1-six": (3, 5)}
EXPECTED_DIM = {"p1-five": 2, "p1-six": 3}
EXPECTED_LEDGER = {"p1-five": (3, -4), "p1-six": (4, -6)}


def report(number: int, ok: bool, what: str, detail: str) -> None:
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {what} ({detail})"
    ACCEPTANCE[number] = line
    print(line)
    assert ok, line


def _failures(rec: Recorder) -> list:
    return [c["name"] for c in rec.checks if not c["pass"]]


def test_criterion_1_genus_table():
    fams = {k: family_at(k, 101)[0] for k in KINDS}
    t0 = time.perf_counter()
    got = {}
    for kind, fam in fams.items():
        gx, gz = genus(fam.Xs), genus(fam.Yr)
        # xi is an unramified double cover, so Riemann-Hurwitz forces g(Y_r) = 2 g(X_s) - 1
        rh = 2 * fam.X.genus - 1
        got[kind] = (gx, gz, fam.Xs.genus_formula, fam.Yr.genus_formula, rh)
    elapsed = time.perf_counter() - t0
    ok = all(g[:2] == EXPECTED_GENERA[k] and g[2:4] == g[:2] and g[4] == g[1] for k, g in got.items())
    report(1, ok and elapsed < 1.0, "genus table by formula and Riemann-Hurwitz",
           f"{ {k: g[:2] for k, g in got.items()} }, {elapsed:.3f}s")


def test_criterion_2_hitchin_base_dimension():
    t0 = time.perf_counter()
    got = {k: sigma_dimension(len(family_at(k, 101)[0].D)) for k in KINDS}
    elapsed = time.perf_counter() - t0
    report(2, got == EXPECTED_DIM and elapsed < 1.0, "dimension of the Hitchin base", f"{got}")


def test_criterion_3_degree_ledger():
    rows = {}
    t0 = time.perf_counter()
    for kind in KINDS:
        fam, _ = family_at(kind, 101)
        m = random_class_of_degree(fam.X, RngStream(3, f"acceptance/ledger/{kind}"), fam.n_frak)
        rows[kind] = degree_ledger(fam, m)
    elapsed = time.perf_counter() - t0
    ok = all((d["n_frak"], d["deg_det_before"]) == EXPECTED_LEDGER[k] and d["deg_det_after"] == 0
             and d["predicted_degree"] == 2 and d["ledger_before"] == d["deg_det_before"]
             for k, d in rows.items())
    summary = {k: (d["n_frak"], d["deg_det_before"], d["deg_det_after"], d["predicted_degree"])
               for k, d in rows.items()}
    report(3, ok and elapsed < 1.0, "degree ledger", f"{summary}, {elapsed:.3f}s")


@pytest.mark.slow
def test_criterion_4_elementary_transformation():
    fam, calib = family_at("p1-five", 101)
    scn = Scenario(family="p1-five", prime=101, trials=20)
    rec = Recorder()
    suite_elem(rec, scn, fam, calib, RngStream(4, "acceptance/elem"))
    trials = [c for c in rec.checks if c["name"].startswith("elementary")]
    both_routes = all(c["witness"]["route_eigen"] and c["witness"]["route_isomorphism"]
                      and c["witness"]["reduced_preimage_form"] for c in trials)
    bad = _failures(rec)
    report(4, not bad and both_routes and len(trials) >= 20, "elementary transformation suite",
           f"{len(trials)} classes, failures {bad}")


@pytest.mark.slow
def test_criterion_5_pullback_and_twist():
    fam, calib = family_at("p1-five", 101)
    scn = Scenario(family="p1-five", prime=101, trials=20)
    rec = Recorder()
    suite_pullback(rec, scn, fam, calib, RngStream(5, "acceptance/pullback"))
    suite_twist(rec, scn, fam, calib, RngStream(5, "acceptance/twist"))
    counts = {s: sum(1 for c in rec.checks if c["suite"] == s) for s in ("pullback", "twist")}
    bad = _failures(rec)
    report(5, not bad and min(counts.values()) >= 20, "pullback and base twist suites",
           f"{counts}, failures {bad}")


@pytest.mark.slow
def test_criterion_6_etale_cover_and_kernel():
    fam, _ = family_at("p1-five", 101)
    xi = fam.maps["xi"]
    # the ceiling for this run admits every place of degree at most two
    saved = Limits.ext_ceiling
    Limits.ext_ceiling = 101 ** 2
    try:
        places, bad_fibers = 0, 0
        for P in closed_points(fam.X, 2):
            fib = xi.fiber(P)
            places += 1
            if sum(q.degree for q in fib) != 2 * P.degree or any(xi.ram_index(q) != 1 for q in fib):
                bad_fibers += 1
    finally:
        Limits.ext_ceiling = saved
    zero_X, zero_Z = Divisor(fam.X), Divisor(fam.Z)
    eps = fam.eps
    eps_ok = (linear_equiv(eps * 2, zero_X)[0] and not linear_equiv(eps, zero_X)[0]
              and linear_equiv(pullback_divisor(xi, eps), zero_Z)[0])
    rng = RngStream(6, "acceptance/controls")
    controls, killed = 0, 0
    while controls < 20:
        delta = random_class_of_degree(fam.X, rng, 0, size=4)
        if linear_equiv(delta * 2, zero_X)[0]:
            continue
        controls += 1
        killed += linear_equiv(pullback_divisor(xi, delta), zero_Z)[0]
    ok = bad_fibers == 0 and eps_ok and killed == 0 and all(fam.eps_checks.values())
    report(6, ok, "xi unramified, eps is the kernel",
           f"{places} places, {bad_fibers} bad fibers, eps {eps_ok}, {killed}/{controls} controls killed")


@pytest.mark.slow
@pytest.mark.parametrize("prime", THEOREM_PRIMES)
@pytest.mark.parametrize("kind", KINDS)
def test_criterion_7_transformation_theorem(kind, prime):
    fam, calib = family_at(kind, prime)
    rng = RngStream(7, f"acceptance/theorem/{kind}/{prime}")
    positives, negatives, failed, control_passes = 0, 0, [], 0
    while positives < 10:
        m1 = random_class_of_degree(fam.X, rng, fam.n_frak)
        m2 = random_class_of_degree(fam.X, rng, fam.n_frak)
        ctrl = random_class_of_degree(fam.X, rng, 0, size=4)
        if linear_equiv(ctrl * 2, Divisor(fam.X))[0]:
            ctrl = None
        res = verify_theorem_main(fam, calib, m1, m2, ctrl)
        positives += 1
        if not all(res[k] for k in "abcde") or res["prym_degree"] != 2 or res["degree_det_twisted"] != 0:
            failed.append(positives)
        if ctrl is not None:
            negatives += 1
            control_passes += bool(res["c_control"])
    ok = not failed and control_passes == 0 and negatives > 0
    line = (f"{kind} over F_{prime}: {positives} pairs, failures {failed}, "
            f"{control_passes}/{negatives} controls passed (c)")
    TheoremTally.rows[(kind, prime)] = (ok, line)
    if len(TheoremTally.rows) == len(KINDS) * len(THEOREM_PRIMES):
        all_ok = all(v[0] for v in TheoremTally.rows.values())
        report(7, all_ok, "transformation theorem (a)-(e)",
               "; ".join(v[1] for _, v in sorted(TheoremTally.rows.items())))
    assert ok, line


class TheoremTally:
    rows: dict = {}


def test_criterion_8_integrality_detectors():
    rows = []
    t0 = time.perf_counter()
    for kind in KINDS:
        fam, _ = family_at(kind, 101)
        rec = Recorder()
        suite_integrality(rec, Scenario(family=kind, prime=101, trials=20), fam,
                          RngStream(8, f"acceptance/integrality/{kind}"))
        rows.append((kind, _failures(rec), [c["witness"].get("cases") for c in rec.checks]))
    elapsed = time.perf_counter() - t0
    ok = all(not bad and all(n >= 10 for n in cases) for _, bad, cases in rows) and elapsed < 60
    report(8, ok, "integrality detectors", f"{rows}, {elapsed:.1f}s")


def test_criterion_9_genericity():
    t0 = time.perf_counter()
    got = {k: _genericity(k, 101, 200, RngStream(9, f"acceptance/genericity/{k}")) for k in KINDS}
    elapsed = time.perf_counter() - t0
    ok = all(v * 2 >= 200 for v in got.values()) and elapsed < 60
    report(9, ok, "smooth integral share of 200 draws over F_101", f"{got}, {elapsed:.1f}s")
