"""Property suites run by the command line front end, producing report records."""
from __future__ import annotations

import time
from dataclasses import dataclass, field as dc_field
from typing import Callable

from .bnr import (calibrate, check_base_twist, check_elem_twist, check_pullback, eigen_divisor,
                  line_bundle_test, nowhere_holomorphic, pushforward_bundle, verify_theorem_main)
from .curve import (CeilingError, Curve, Limits, affine_product, branch_and_ramification, closed_points,
                    irreducible_polys, line_point, pullback_sigma, sigma_dimension, sigma_from_coeffs,
                    spectral_curve, SigmaSection)
from .divisor import (Divisor, canonical_divisor, ell, linear_equiv, principal_divisor, pushforward,
                      pullback_divisor, random_class_of_degree, random_divisor, random_rational_point)
from .exactfield import GF, RngStream, make_extension
from .families import Family, build_curves, build_family, family_points
from .higgs import (hitchin, invariant_subbundles, mat_det, mat_scale, mat_tr, pullback_higgs,
                    upper_triangular_higgs)
from .polyfun import Poly, RatFun, gcd, resultant, residue, xgcd

SCHEMA_VERSION = "spectralcover.report/1"

# reference tags attached to every check record
REFERENCE_TAGS = (
    "artifact",
    "spectral-construction",
    "genus-formula",
    "bnr-module",
    "line-bundle-lemma",
    "elementary-transformation",
    "eigendirection-divisor",
    "pullback-spectral-data",
    "twist-spectral-data",
    "parabolic-slope",
    "strong-parabolicity",
    "hitchin-map",
    "hitchin-base-dimension",
    "square-discriminant",
    "invariant-subbundle",
    "irreducible-higgs",
    "nowhere-holomorphic",
    "section-pullback",
    "cover-smoothness",
    "etale-cover",
    "kernel-two-torsion",
    "transformation-phi",
    "main-theorem",
    "elliptic-example",
    "genus-two-example",
)

SUITES = ("fields", "curves", "divisors", "elem", "pullback", "twist", "etale", "theorem", "integrality")


@dataclass
class Scenario:
    family: str = "p1-five"
    prime: int = 101
    seed: int = 42
    trials: int = 20
    ext_ceiling: int = 10 ** 7
    lam: int | None = None
    t: int | None = None
    branch: list | None = None
    suites: tuple = SUITES
    enum_degree: int = 2
    genericity_draws: int = 200

    def to_json(self) -> dict:
        return {"family": self.family, "prime": self.prime, "seed": self.seed, "trials": self.trials,
                "ext_ceiling": self.ext_ceiling, "lambda": self.lam, "t": self.t,
                "branch": None if self.branch is None else [str(b) for b in self.branch],
                "suites": list(self.suites), "enum_degree": self.enum_degree,
                "genericity_draws": self.genericity_draws}


@dataclass
class Recorder:
    checks: list = dc_field(default_factory=list)

    def add(self, suite: str, name: str, ref: str, passed: bool, witness=None, timing: float = 0.0):
        if ref not in REFERENCE_TAGS:
            raise ValueError(f"unknown reference tag {ref!r}")
        self.checks.append({"suite": suite, "name": name, "ref": ref, "pass": bool(passed),
                            "witness": witness if witness is not None else {}, "timing": round(timing, 6)})

    def run(self, suite: str, name: str, ref: str, fn: Callable[[], tuple]):
        """fn returns (passed, witness)."""
        t0 = time.perf_counter()
        passed, witness = fn()
        self.add(suite, name, ref, passed, witness, time.perf_counter() - t0)
        return passed

    def summary(self) -> dict:
        total = len(self.checks)
        passed = sum(1 for c in self.checks if c["pass"])
        return {"total": total, "passed": passed, "failed": total - passed}


def _example_ref(fam: Family) -> str:
    return "elliptic-example" if fam.kind == "p1-five" else "genus-two-example"


# --- suites ------------------------------------------------------------------------------

def suite_fields(rec: Recorder, scn: Scenario, rng: RngStream) -> None:
    p = scn.prime
    fields = [GF(p), make_extension(GF(p), 2), make_extension(GF(p), 3)]
    n = 10 * scn.trials
    for K in fields:
        r = rng.split(f"axioms-{K.k}")

        def axioms(K=K, r=r):
            for _ in range(n):
                a, b, c = (K.random_raw(r.random) for _ in range(3))
                if K.mul(a, K.add(b, c)) != K.add(K.mul(a, b), K.mul(a, c)):
                    return False, {"a": str(a), "b": str(b), "c": str(c)}
                if K.mul(K.mul(a, b), c) != K.mul(a, K.mul(b, c)):
                    return False, {"a": str(a), "b": str(b), "c": str(c)}
                if not K.is_zero(a) and K.mul(a, K.inv(a)) != K.one:
                    return False, {"a": str(a)}
                if K.pow(a, K.order) != a:
                    return False, {"frobenius": str(a)}
                s = K.sqrt_raw(a)
                if s is not None and K.mul(s, s) != a:
                    return False, {"sqrt": str(a)}
            return True, {"samples": n, "order": K.order}
        rec.run("fields", f"field axioms and Frobenius over GF({p}^{K.k})", "artifact", axioms)

    def square_count():
        K = GF(p)
        count = sum(1 for a in K.elements() if K.sqrt_raw(a) is not None)
        return count == (K.order + 1) // 2, {"squares": count, "order": K.order}
    rec.run("fields", "square count (q+1)/2", "artifact", square_count)

    F = GF(p)
    r = rng.split("polys")

    def poly_gcd():
        for _ in range(scn.trials * 5):
            a = Poly(F, [r.randrange(p) for _ in range(r.randrange(1, 8))])
            b = Poly(F, [r.randrange(p) for _ in range(r.randrange(1, 8))])
            if a.is_zero() or b.is_zero():
                continue
            g, u, v = xgcd(a, b)
            if not (a % g).is_zero() or not (b % g).is_zero() or u * a + v * b != g:
                return False, {"a": a.c, "b": b.c}
            common = Poly(F, [r.randrange(p), 1])
            ra = resultant(a * common, b * common)
            if ra != 0 or (resultant(a, b) == 0) != (gcd(a, b).degree > 0):
                return False, {"a": a.c, "b": b.c}
        return True, {"pairs": scn.trials * 5}
    rec.run("fields", "gcd combination and resultant criterion", "artifact", poly_gcd)

    def residue_sum():
        for _ in range(scn.trials * 2):
            roots = r.sample(range(p), 3)
            den = Poly.from_roots(F, roots) * Poly(F, [(-roots[0]) % p, 1])
            num = Poly(F, [r.randrange(p) for _ in range(r.randrange(1, 6))])
            if num.is_zero():
                continue
            om = RatFun(num, den)
            total = residue(om, "inf").v
            for t in roots:
                total = (total + residue(om, t).v) % p
            if total:
                return False, {"num": num.c, "roots": roots}
        return True, {"trials": scn.trials * 2}
    rec.run("fields", "residue theorem on P^1", "artifact", residue_sum)


def _genericity(kind: str, p: int, draws: int, rng: RngStream, lam=None, t=None, branch=None):
    from .curve import random_sigma
    F = GF(p)
    B, T = family_points(kind, p, lam, t, branch)
    good = 0
    for _ in range(draws):
        s = random_sigma(F, B + T, rng)
        Xs, Y, pi, r, Yr = build_curves(kind, p, s, B, T)
        good += bool(Xs.ok and Yr.ok)
    return good


def suite_curves(rec: Recorder, scn: Scenario, fam: Family, rng: RngStream) -> None:
    ref = _example_ref(fam)
    expect = {"p1-five": (2, 3, 2), "p1-six": (3, 5, 3)}[fam.kind]

    def genus_table():
        from .curve import genus
        gx, gz = genus(fam.Xs), genus(fam.Yr)
        return (gx, gz) == expect[:2], {"genus_X_s": gx, "genus_Y_r": gz,
                                        "formula": [fam.Xs.genus_formula, fam.Yr.genus_formula]}
    rec.run("curves", "genus table", "genus-formula", genus_table)

    def sigma_dim():
        d = sigma_dimension(len(fam.D))
        return d == expect[2], {"dim": d, "marked_points": len(fam.D)}
    rec.run("curves", "dimension of the Hitchin base", "hitchin-base-dimension", sigma_dim)

    def ramification():
        B, R = fam.B, fam.R
        ok = pullback_divisor(fam.maps["pi"], B) == R * 2 and len(B.mult) == len(fam.branch)
        return ok, {"branch_points": len(B.mult), "genus_Y": fam.Y.genus}
    rec.run("curves", "pi^* B = 2R", ref, ramification)

    def genericity():
        draws = scn.genericity_draws
        good = _genericity(fam.kind, scn.prime, draws, rng.split("genericity"), scn.lam, scn.t, scn.branch)
        return good * 2 >= draws, {"smooth_integral": good, "draws": draws}
    rec.run("curves", "generic s gives smooth integral curves", "cover-smoothness", genericity)

    def commute():
        qs, xi, pi, qr = fam.maps["q_s"], fam.maps["xi"], fam.maps["pi"], fam.maps["q_r"]
        r = rng.split("commute")
        for i in range(scn.trials * 5):
            P = random_rational_point(fam.Z, r) if i % 2 else None
            if P is None:
                x0 = r.randrange(scn.prime)
                pts = fam.Z.points_over_value(x0)
                P = pts[r.randrange(len(pts))]
            if qs.image(xi.image(P)) != pi.image(qr.image(P)):
                return False, {"point": P.to_json()}
        return True, {"points": scn.trials * 5}
    rec.run("curves", "q_s o xi = pi o q_r", "etale-cover", commute)

    def sigma_linear():
        F = GF(scn.prime)
        r = rng.split("linear")
        n = sigma_dimension(len(fam.D))
        for _ in range(scn.trials):
            a = sigma_from_coeffs(F, fam.D, [r.randrange(scn.prime) for _ in range(n)])
            b = sigma_from_coeffs(F, fam.D, [r.randrange(scn.prime) for _ in range(n)])
            lhs = pullback_sigma(fam.maps["pi"], a + b, fam.T)
            ra = pullback_sigma(fam.maps["pi"], a, fam.T)
            rb = pullback_sigma(fam.maps["pi"], b, fam.T)
            if lhs.s2 != ra.s2 + rb.s2:
                return False, {"a": list(a.coeffs), "b": list(b.coeffs)}
        return True, {"pairs": scn.trials}
    rec.run("curves", "pullback of sections is linear", "section-pullback", sigma_linear)


def suite_divisors(rec: Recorder, scn: Scenario, fam: Family, rng: RngStream) -> None:
    r = rng.split("divisors")
    X, Y, Z = fam.X, fam.Y, fam.Z

    def riemann_roch():
        for C in (X, Y):
            K = canonical_divisor(C)
            g = C.genus
            for _ in range(scn.trials):
                deg = r.randrange(-2, 2 * g + 3)
                D = random_class_of_degree(C, r, deg, size=3)
                lhs = ell(D) - ell(K - D)
                if lhs != deg + 1 - g:
                    return False, {"curve": str(C), "D": D.to_json()}
        return True, {"trials": 2 * scn.trials}
    rec.run("divisors", "Riemann-Roch on random divisors", "artifact", riemann_roch)

    def translation():
        for _ in range(scn.trials):
            D1 = random_class_of_degree(X, r, 2, size=2)
            D2 = random_class_of_degree(X, r, 2, size=2)
            E = random_divisor(X, r, 1, 1)
            if linear_equiv(D1, D2)[0] != linear_equiv(D1 + E, D2 + E)[0]:
                return False, {"D1": D1.to_json(), "D2": D2.to_json()}
            if not linear_equiv(D1, D1)[0]:
                return False, {"D1": D1.to_json()}
        return True, {"trials": scn.trials}
    rec.run("divisors", "linear equivalence is reflexive and translation invariant", "artifact", translation)

    def norm_pullback():
        xi, qs, pi, qr = fam.maps["xi"], fam.maps["q_s"], fam.maps["pi"], fam.maps["q_r"]
        for _ in range(max(1, scn.trials // 2)):
            E = random_divisor(X, r, 2, 1)
            if not linear_equiv(pushforward(xi, pullback_divisor(xi, E)), E * 2)[0]:
                return False, {"E": E.to_json()}
            m = random_divisor(X, r, 2, 1)
            lhs = pushforward(qr, pullback_divisor(xi, m))
            rhs = pullback_divisor(pi, pushforward(qs, m))
            if not linear_equiv(lhs, rhs)[0]:
                return False, {"m": m.to_json()}
            G = X.x() - X.const(r.randrange(scn.prime)) + X.gen(0)
            if not linear_equiv(pushforward(qs, principal_divisor(G)), Divisor(qs.target))[0]:
                return False, {"function": str(G)}
        return True, {"trials": max(1, scn.trials // 2)}
    rec.run("divisors", "norm of pullback is doubling; norm square commutes", "kernel-two-torsion", norm_pullback)


def _centers(H, r: RngStream, trial: int):
    D = H.polar.support()
    if trial == 0:
        return D
    if trial == 1:
        return []
    k = r.randrange(1, len(D) + 1)
    return sorted(r.sample(D, k), key=lambda q: q.sort_key())


def suite_elem(rec: Recorder, scn: Scenario, fam: Family, calib, rng: RngStream) -> None:
    r = rng.split("elem")
    for i in range(scn.trials):
        m = random_class_of_degree(fam.X, r, fam.n_frak)
        H = pushforward_bundle(fam.x_side, m)
        centers = _centers(H, r, i)

        def run(m=m, centers=centers, H=H):
            res = check_elem_twist(fam.x_side, calib, m, centers)
            res["line_bundle"] = line_bundle_test(H) and nowhere_holomorphic(H)
            res["hitchin_base"] = hitchin(H).s2 == fam.s.s2
            ok = res["pass"] and res["line_bundle"] and res["hitchin_base"] and res["strongly_parabolic"]
            res.update({"trial": i, "centers": len(centers), "m": m.to_json()})
            return ok, res
        rec.run("elem", f"elementary transformation trial {i}", "elementary-transformation", run)

    def zero_residue():
        m = random_class_of_degree(fam.X, r, fam.n_frak)
        H = pushforward_bundle(fam.x_side, m)
        t = next(q for q in H.polar.support() if q.chart != "inf")
        F = H.base.field
        c = next(v for v in range(scn.prime) if v not in fam.D)
        # theta * (x - t) / (x - c): residue killed at t, new simple pole at c
        factor = H.base.from_base(RatFun(t.place, Poly(F, [(-c) % scn.prime, 1])))
        polar = H.polar + Divisor.point(line_point(F, c))
        H0 = H.replace(theta=mat_scale(H.theta, factor), polar=polar)
        lb, nh = line_bundle_test(H0), nowhere_holomorphic(H0)
        return (not lb) and (not nh), {"line_bundle": lb, "nowhere_holomorphic": nh, "point": str(t)}
    rec.run("elem", "vanishing residue makes theta scalar somewhere", "nowhere-holomorphic", zero_residue)


def suite_pullback(rec: Recorder, scn: Scenario, fam: Family, calib, rng: RngStream) -> None:
    r = rng.split("pullback")
    for i in range(scn.trials):
        m = random_class_of_degree(fam.X, r, fam.n_frak)

        def run(m=m):
            res = check_pullback(fam, calib, m)
            H = pushforward_bundle(fam.x_side, m)
            G = pullback_higgs(fam.maps["pi"], H)
            res["hitchin_commutes"] = hitchin(G).s2 == pullback_sigma(fam.maps["pi"], fam.s, fam.T).s2
            nil = all(G.residue_matrix(q)[1] for q in fam.R.support())
            res["nilpotent_over_R"] = nil
            ok = res["pass"] and res["hitchin_commutes"] and nil
            res.update({"trial": i, "m": m.to_json()})
            return ok, res
        rec.run("pullback", f"pullback trial {i}", "pullback-spectral-data", run)


def suite_twist(rec: Recorder, scn: Scenario, fam: Family, calib, rng: RngStream) -> None:
    r = rng.split("twist")
    F = GF(scn.prime)
    for i in range(scn.trials):
        m = random_class_of_degree(fam.X, r, fam.n_frak)
        x0 = "inf" if i % 5 == 4 else r.randrange(scn.prime)
        k = r.choice([-1, 1, 2])
        delta = Divisor.point(line_point(F, x0), k)

        def run(m=m, delta=delta, x0=x0, k=k):
            res = check_base_twist(fam, calib, m, delta)
            res.update({"trial": i, "point": str(x0), "multiplicity": k})
            return res["pass"], res
        rec.run("twist", f"base twist trial {i}", "twist-spectral-data", run)


def etale_enumeration(fam: Family, max_degree: int) -> tuple[int, list]:
    xi = fam.maps["xi"]
    count, bad = 0, []
    for P in closed_points(fam.X, max_degree):
        fib = xi.fiber(P)
        count += 1
        if sum(q.degree for q in fib) != 2 * P.degree or any(xi.ram_index(q) != 1 for q in fib):
            bad.append(P.to_json())
    return count, bad


def suite_etale(rec: Recorder, scn: Scenario, fam: Family, rng: RngStream) -> None:
    xi = fam.maps["xi"]

    def enumeration():
        degree = scn.enum_degree
        while degree > 0 and scn.prime ** degree > Limits.ext_ceiling:
            degree -= 1
        count, bad = etale_enumeration(fam, degree)
        return not bad, {"points": count, "max_place_degree": degree, "failures": bad[:5]}
    rec.run("etale", "xi fibers are two unramified points", "etale-cover", enumeration)

    def sampled_places():
        from .exactfield import is_irreducible_mod_p
        r = rng.split("cubic-places")
        p = scn.prime
        done, bad = 0, []
        while done < scn.trials:
            low = [r.randrange(p) for _ in range(3)]
            if not is_irreducible_mod_p(low + [1], p):
                continue
            for P in fam.X.points_over_place(Poly(GF(p), low + [1])):
                fib = xi.fiber(P)
                if sum(q.degree for q in fib) != 2 * P.degree or any(xi.ram_index(q) != 1 for q in fib):
                    bad.append(P.to_json())
            done += 1
        return not bad, {"places": done, "place_degree": 3, "failures": bad[:5]}
    rec.run("etale", "xi fibers over sampled cubic places", "etale-cover", sampled_places)

    def eps():
        return all(fam.eps_checks.values()), dict(fam.eps_checks, eps=fam.eps.to_json())
    rec.run("etale", "two-torsion class of xi", "kernel-two-torsion", eps)

    def alternative():
        from .divisor import alternative_balancing
        F = GF(scn.prime)
        over_B = [q for b in fam.branch for q in fam.maps["q_s"].fiber(line_point(F, b))]
        alt = alternative_balancing(fam.X, over_B, len(over_B) // 2)
        return linear_equiv(alt, fam.eps)[0], {"points": len(over_B)}
    rec.run("etale", "alternative balancing gives the same class", "kernel-two-torsion", alternative)

    r = rng.split("controls")
    zero_Z = Divisor(fam.Z)
    for i in range(scn.trials):
        delta = random_class_of_degree(fam.X, r, 0, size=4)

        def run(delta=delta):
            if linear_equiv(delta, Divisor(fam.X))[0] or linear_equiv(delta, fam.eps)[0]:
                return True, {"skipped": "sample in {0, eps}"}
            if linear_equiv(delta * 2, Divisor(fam.X))[0]:
                return True, {"skipped": "two-torsion sample"}
            killed = linear_equiv(pullback_divisor(xi, delta), zero_Z)[0]
            return not killed, {"trial": i, "delta": delta.to_json()}
        rec.run("etale", f"xi^* is injective off eps, control {i}", "kernel-two-torsion", run)


def degree_ledger(fam: Family, m: Divisor) -> dict:
    from .bnr import transform
    G = transform(fam, m)
    G0 = transform(fam, m, twisted=True)
    xi, qr = fam.maps["xi"], fam.maps["q_r"]
    predicted = pullback_divisor(xi, m) + pullback_divisor(qr, fam.L0 - fam.R)
    return {"n_frak": m.degree, "deg_det_before": G.degree, "deg_det_after": G0.degree,
            "ledger_before": G.bundle.ledger_degree(), "predicted_degree": predicted.degree}


def suite_theorem(rec: Recorder, scn: Scenario, fam: Family, calib, rng: RngStream) -> None:
    ref = _example_ref(fam)
    expect = {"p1-five": (3, -4), "p1-six": (4, -6)}[fam.kind]
    r = rng.split("theorem")

    def ledger():
        m = random_class_of_degree(fam.X, r, fam.n_frak)
        d = degree_ledger(fam, m)
        ok = (d["n_frak"], d["deg_det_before"]) == expect and d["deg_det_after"] == 0 \
            and d["predicted_degree"] == 2 and d["ledger_before"] == d["deg_det_before"]
        return ok, d
    rec.run("theorem", "degree ledger", ref, ledger)

    for i in range(scn.trials):
        m1 = random_class_of_degree(fam.X, r, fam.n_frak)
        m2 = random_class_of_degree(fam.X, r, fam.n_frak)
        ctrl = random_class_of_degree(fam.X, r, 0, size=4)

        def run(m1=m1, m2=m2, ctrl=ctrl):
            if linear_equiv(ctrl, Divisor(fam.X))[0] or linear_equiv(ctrl, fam.eps)[0]:
                ctrl_used = None
            else:
                ctrl_used = ctrl
            res = verify_theorem_main(fam, calib, m1, m2, ctrl_used)
            res.pop("timing", None)
            res.update({"trial": i, "m1": m1.to_json(), "m2": m2.to_json()})
            return res["pass"], res
        rec.run("theorem", f"main theorem trial {i}", "main-theorem", run)


def _planted_square_sigma(F, D, r: RngStream) -> SigmaSection:
    P1 = Curve.projective_line(F)
    PD = affine_product(F, D)
    p = F.p
    r1 = Poly(F, [r.randrange(p) for _ in range(3)])
    r2 = Poly(F, [r.randrange(p) for _ in range(3)])
    s1 = P1.from_base(RatFun(-(r1 + r2), PD))
    s2 = P1.from_base(RatFun(r1 * r2, PD * PD))
    return SigmaSection(P1, D, s1, s2, None)


def suite_integrality(rec: Recorder, scn: Scenario, fam: Family, rng: RngStream) -> None:
    F = GF(scn.prime)
    r = rng.split("integrality")
    n = max(10, scn.trials // 2)

    def planted_square():
        for i in range(n):
            s = _planted_square_sigma(F, fam.D, r)
            c = spectral_curve(s.base, s, frame_poly=affine_product(F, fam.D))
            if c.integral:
                return False, {"case": i}
        return True, {"cases": n}
    rec.run("integrality", "square discriminant is detected", "square-discriminant", planted_square)

    def planted_invariant():
        for i in range(n):
            diag = Poly(F, [r.randrange(scn.prime) for _ in range(2)])
            upper = Poly(F, [r.randrange(scn.prime) for _ in range(3)])
            split = (r.randrange(-1, 3), r.randrange(-3, 0))
            H = upper_triangular_higgs(F, fam.D, split, diag, upper)
            s2 = mat_det(H.theta) * H.phi * H.phi
            s = SigmaSection(H.base, fam.D, H.base.function({}), s2, None)
            c = spectral_curve(H.base, s, frame_poly=affine_product(F, fam.D))
            found = invariant_subbundles(H, bound=10)
            if c.integral or not any(deg == split[0] for deg, _ in found):
                return False, {"case": i, "found": [d for d, _ in found]}
        return True, {"cases": n}
    rec.run("integrality", "planted invariant line forces a reducible spectral curve",
            "invariant-subbundle", planted_invariant)

    def integral_search():
        for i in range(n):
            m = random_class_of_degree(fam.X, r, fam.n_frak)
            H = pushforward_bundle(fam.x_side, m)
            if invariant_subbundles(H, bound=10):
                return False, {"case": i}
        return True, {"cases": n}
    rec.run("integrality", "integral spectral curve admits no invariant line", "irreducible-higgs",
            integral_search)

    def strong_parabolic_certificate():
        for i in range(n):
            m = random_class_of_degree(fam.X, r, fam.n_frak)
            H = pushforward_bundle(fam.x_side, m)
            if not (H.is_strongly_parabolic() and mat_tr(H.theta).is_zero() and hitchin(H).s2 == fam.s.s2):
                return False, {"case": i}
            # a scalar shift has non-nilpotent residues, so the certificate must reject it
            one = H.base.const(1)
            bad = H.replace(theta=(H.theta[0] + one, H.theta[1], H.theta[2], H.theta[3] + one))
            if bad.is_strongly_parabolic():
                return False, {"case": i, "negative": True}
        return True, {"cases": n}
    rec.run("integrality", "strong parabolicity certificate", "strong-parabolicity",
            strong_parabolic_certificate)


# --- orchestration ---------------------------------------------------------------------------

def run_suite(scn: Scenario) -> dict:
    Limits.ext_ceiling = scn.ext_ceiling
    rng = RngStream(scn.seed, f"suite/{scn.family}/{scn.prime}")
    rec = Recorder()
    fam = None
    calib = None
    needs_family = [s for s in scn.suites if s != "fields"]
    if needs_family:
        t0 = time.perf_counter()
        fam = build_family(scn.family, scn.prime, rng.split("family"), scn.lam, scn.t, scn.branch)
        rec.add("setup", "smooth integral spectral pair", "spectral-construction", fam.Xs.ok and fam.Yr.ok,
                {"draws": fam.draws, "s": list(fam.s.coeffs), "X_s": fam.Xs.equation(),
                 "Y_r": str(fam.Z)}, time.perf_counter() - t0)
    if any(s in scn.suites for s in ("elem", "pullback", "twist", "theorem")):
        t0 = time.perf_counter()
        samples = [random_class_of_degree(fam.X, rng.split(f"calibration-{i}"), fam.n_frak) for i in range(3)]
        calib = calibrate(fam.x_side, samples)
        rec.add("setup", "calibration", "bnr-module", calib.sign in (1, -1),
                {"sign": calib.sign, "offset": calib.offset.to_json()}, time.perf_counter() - t0)
    for name in SUITES:
        if name not in scn.suites:
            continue
        srng = rng.split(name)
        if name == "fields":
            suite_fields(rec, scn, srng)
        elif name == "curves":
            suite_curves(rec, scn, fam, srng)
        elif name == "divisors":
            suite_divisors(rec, scn, fam, srng)
        elif name == "elem":
            suite_elem(rec, scn, fam, calib, srng)
        elif name == "pullback":
            suite_pullback(rec, scn, fam, calib, srng)
        elif name == "twist":
            suite_twist(rec, scn, fam, calib, srng)
        elif name == "etale":
            suite_etale(rec, scn, fam, srng)
        elif name == "theorem":
            suite_theorem(rec, scn, fam, calib, srng)
        elif name == "integrality":
            suite_integrality(rec, scn, fam, srng)
    return {"schema": SCHEMA_VERSION, "scenario": scn.to_json(), "checks": rec.checks,
            "summary": rec.summary()}
