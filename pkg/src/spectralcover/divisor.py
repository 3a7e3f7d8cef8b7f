"""Divisors, Riemann-Roch spaces and divisor classes on the curves in play."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from . import linalg
from .curve import (CPoint, CoverMap, Curve, CurveError, CurveFunction, LocalExpansion,
                    mask_bits)
from .exactfield import RngStream
from .polyfun import Poly, RatFun, factor, ps_mul, ps_pow


class Divisor:
    """Formal sum of closed points with integer multiplicities."""

    __slots__ = ("curve", "mult")

    def __init__(self, curve: Curve, mult: dict | None = None):
        clean = {}
        for pt, n in (mult or {}).items():
            if pt.curve != curve:
                raise CurveError("point on a different curve")
            if n:
                clean[pt] = clean.get(pt, 0) + int(n)
        self.curve = curve
        self.mult = {pt: n for pt, n in clean.items() if n}

    @classmethod
    def point(cls, pt: CPoint, n: int = 1) -> "Divisor":
        return cls(pt.curve, {pt: n})

    @classmethod
    def sum_of(cls, curve: Curve, pts: Iterable[CPoint]) -> "Divisor":
        out: dict = {}
        for pt in pts:
            out[pt] = out.get(pt, 0) + 1
        return cls(curve, out)

    @property
    def degree(self) -> int:
        return sum(n * pt.degree for pt, n in self.mult.items())

    def get(self, pt: CPoint) -> int:
        return self.mult.get(pt, 0)

    def items(self):
        return sorted(self.mult.items(), key=lambda t: t[0].sort_key())

    def support(self) -> list[CPoint]:
        return sorted(self.mult, key=lambda q: q.sort_key())

    def is_zero(self) -> bool:
        return not self.mult

    def is_effective(self) -> bool:
        return all(n > 0 for n in self.mult.values())

    def positive_part(self) -> "Divisor":
        return Divisor(self.curve, {p: n for p, n in self.mult.items() if n > 0})

    def negative_part(self) -> "Divisor":
        return Divisor(self.curve, {p: -n for p, n in self.mult.items() if n < 0})

    def __add__(self, other: "Divisor") -> "Divisor":
        if other.curve != self.curve:
            raise CurveError("divisors on different curves")
        out = dict(self.mult)
        for p, n in other.mult.items():
            out[p] = out.get(p, 0) + n
        return Divisor(self.curve, out)

    def __neg__(self) -> "Divisor":
        return Divisor(self.curve, {p: -n for p, n in self.mult.items()})

    def __sub__(self, other: "Divisor") -> "Divisor":
        return self + (-other)

    def __mul__(self, k: int) -> "Divisor":
        return Divisor(self.curve, {p: k * n for p, n in self.mult.items()})

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, Divisor) and self.curve == other.curve and self.mult == other.mult

    def __hash__(self):
        return hash((self.curve.key, frozenset(self.mult.items())))

    def __repr__(self):
        if not self.mult:
            return "0"
        return " + ".join(f"{n}*{p}" for p, n in self.items())

    def to_json(self) -> list:
        return [{"point": p.to_json(), "mult": n} for p, n in self.items()]


class DivClass:
    """Linear-equivalence class carried by a representative divisor."""

    def __init__(self, rep: Divisor):
        self.rep = rep

    @property
    def degree(self) -> int:
        return self.rep.degree

    def __add__(self, other: "DivClass") -> "DivClass":
        return DivClass(self.rep + other.rep)

    def __sub__(self, other: "DivClass") -> "DivClass":
        return DivClass(self.rep - other.rep)

    def __mul__(self, k: int) -> "DivClass":
        return DivClass(self.rep * k)

    __rmul__ = __mul__

    def equiv(self, other: "DivClass") -> bool:
        return linear_equiv(self.rep, other.rep)[0]

    def __repr__(self):
        return f"[{self.rep}]"


# --- valuations and principal divisors ---------------------------------------

def _chart_norm(curve: Curve, nums: dict, chart: str) -> Poly:
    from .curve import _alg_conj, _alg_mul
    prods = curve.products(chart)
    cur = dict(nums)
    for i in range(curve.m):
        cur = _alg_mul(cur, _alg_conj(cur, i), prods)
    return cur.get(0, Poly(curve.field, []))


def ord_at(F: CurveFunction, pt: CPoint) -> int:
    return pt.local().ord(F)


def principal_divisor(F: CurveFunction) -> Divisor:
    """div(F), locating zeros and poles through the norm of the numerator."""
    if F.is_zero():
        raise ZeroDivisionError("div of the zero function")
    C = F.curve
    nums, den = F.chart_parts("aff")
    nrm = _chart_norm(C, nums, "aff")
    places = {}
    for poly in (nrm, den):
        if poly.degree > 0:
            for irr, _ in factor(poly):
                places[irr.c] = irr
    out = {}
    for irr in places.values():
        for pt in C.points_over_place(irr):
            v = pt.local().ord(F)
            if v:
                out[pt] = v
    for pt in C.points_over_place("inf"):
        v = pt.local().ord(F)
        if v:
            out[pt] = v
    D = Divisor(C, out)
    if D.degree != 0:
        raise AssertionError(f"principal divisor of degree {D.degree}")
    return D


def dx_divisor(C: Curve) -> Divisor:
    """div(dx) on C."""
    out = {}
    for pt in C.ramification_points() + [q for q in C.infinity_points() if q.ram_index is None]:
        v = pt.local().dx_series(1)[0]
        if v:
            out[pt] = out.get(pt, 0) + v
    return Divisor(C, out)


def differential_divisor(phi: CurveFunction) -> Divisor:
    """div(phi dx)."""
    return principal_divisor(phi) + dx_divisor(phi.curve)


def canonical_divisor(C: Curve) -> Divisor:
    """div(dx / y_last) (div(dx) on the projective line)."""
    if C.m == 0:
        return dx_divisor(C)
    return differential_divisor(C.gen(C.m - 1).inverse())


# --- Riemann-Roch spaces --------------------------------------------------------

def _series_rows(le: LocalExpansion, unknowns, lo: int, hi: int, p: int):
    """Rows asserting that coefficients t^lo .. t^(hi-1) of sum c_u * mono_u vanish."""
    if hi <= lo:
        return []
    K = le.K
    e = le.e
    need = hi - lo
    by_exp = {}
    if le.chart == "aff":
        n = hi
        xs = le.x_series(n)[1]
        max_i = max(i for _, i in unknowns)
        powers = [[K.one] + [K.zero] * (n - 1)]
        for _ in range(max_i):
            powers.append(ps_mul(K, powers[-1], xs, n))
        for col, (S, i) in enumerate(unknowns):
            s = powers[i] if not S else ps_mul(K, powers[i], le.eta_mask(S, n), n)
            by_exp[col] = (0, s)
    else:
        curve = le.curve
        amax = 0
        for S, i in unknowns:
            amax = max(amax, i + sum(curve.delta[j] for j in mask_bits(S)))
        n = hi + e * amax
        if n <= 0:
            return []
        _, V = le.x_series(n)
        vpowers = [[K.one] + [K.zero] * (n - 1)]
        for _ in range(amax):
            vpowers.append(ps_mul(K, vpowers[-1], V, n))
        for col, (S, i) in enumerate(unknowns):
            a = i + sum(curve.delta[j] for j in mask_bits(S))
            s = vpowers[a] if not S else ps_mul(K, vpowers[a], le.eta_mask(S, n), n)
            by_exp[col] = (-e * a, s)
    rows = []
    ncols = len(unknowns)
    for j in range(lo, hi):
        coeff_vecs = []
        nonzero = False
        for col in range(ncols):
            val, s = by_exp[col]
            idx = j - val
            c = s[idx] if 0 <= idx < len(s) else K.zero
            coeff_vecs.append(K.to_vector(c))
            nonzero = nonzero or not K.is_zero(c)
        if not nonzero:
            continue
        for r in range(K.k):
            rows.append([coeff_vecs[col][r] for col in range(ncols)])
    return rows


@dataclass
class RRSpace:
    """L(D) as numerator vectors: F = sum_S A_S y_S / denominator."""

    divisor: Divisor
    denominator: Poly
    unknowns: list
    vectors: list

    @property
    def curve(self) -> Curve:
        return self.divisor.curve

    def __len__(self):
        return len(self.vectors)

    def numerators(self, vec) -> dict:
        """mask -> numerator polynomial of one vector."""
        F = self.curve.field
        coeffs: dict = {}
        for (S, i), c in zip(self.unknowns, vec):
            if c:
                cs = coeffs.setdefault(S, [])
                if len(cs) <= i:
                    cs.extend([0] * (i + 1 - len(cs)))
                cs[i] = c
        return {S: Poly(F, cs) for S, cs in coeffs.items()}

    def function(self, vec) -> CurveFunction:
        F = self.curve.field
        Qinv = RatFun(Poly(F, [1]), self.denominator)
        return self.curve.function({S: RatFun(A) * Qinv for S, A in self.numerators(vec).items()})

    def functions(self) -> list[CurveFunction]:
        return [self.function(v) for v in self.vectors]


def rr_space(D: Divisor) -> RRSpace:
    """L(D) = {F : div F + D >= 0} by interpolation.

    F = sum_S A_S y_S / Q where Q clears the affine poles allowed by D; the
    degrees of the A_S are bounded through the allowed poles at infinity and
    the vanishing orders become linear conditions on their coefficients.
    """
    C = D.curve
    Fp = C.field
    p = C.p
    aff: dict = {}
    for pt, n in D.mult.items():
        if pt.chart == "aff":
            aff.setdefault(pt.place.c, (pt.place, {}))[1][pt] = n
    Q = Poly(Fp, [1])
    kP = {}
    for key, (place, pts) in aff.items():
        k = max([math.ceil(n / pt.e) for pt, n in pts.items() if n > 0], default=0)
        if k > 0:
            Q = Q * place ** k
            kP[key] = k
    degQ = Q.degree
    inf_pts = C.points_over_place("inf")
    maxinf = max(Fraction(D.get(pt), pt.e) for pt in inf_pts)
    unknowns = []
    for S in range(1 << C.m):
        w = Fraction(sum(C.polys[i].degree for i in mask_bits(S)), 2)
        b = math.floor(degQ + maxinf - w)
        unknowns.extend((S, i) for i in range(b + 1))
    vectors: list = []
    if unknowns:
        rows = []
        for key, (place, pts) in aff.items():
            k = kP.get(key, 0)
            fiber = C.points_over_place(place) if k > 0 else [pt for pt, n in pts.items() if n < 0]
            for pt in fiber:
                need = k * pt.e - D.get(pt)
                if need > 0:
                    rows.extend(_series_rows(pt.local(), unknowns, 0, need, p))
        for pt in inf_pts:
            need = -D.get(pt) - pt.e * degQ
            le = pt.local()
            lo = min(-le.e * (i + sum(C.delta[j] for j in mask_bits(S))) for S, i in unknowns)
            rows.extend(_series_rows(le, unknowns, lo, need, p))
        if rows:
            vectors = linalg.nullspace(rows, len(unknowns), p)
        else:
            vectors = [[int(j == i) for j in range(len(unknowns))] for i in range(len(unknowns))]
    deg = D.degree
    g = C.genus
    if deg < 0 and vectors:
        raise AssertionError("nonzero section of a negative-degree divisor")
    if deg > 2 * g - 2 and len(vectors) != deg + 1 - g:
        raise AssertionError(f"l(D) = {len(vectors)} but Riemann-Roch forces {deg + 1 - g}")
    return RRSpace(D, Q, unknowns, vectors)


def rr_basis(D: Divisor) -> list[CurveFunction]:
    """Basis of L(D) = {F : div F + D >= 0}."""
    return rr_space(D).functions()


def ell(D: Divisor) -> int:
    return len(rr_basis(D))


def linear_equiv(D1: Divisor, D2: Divisor):
    """(True, F) with div F = D2 - D1 when D1 ~ D2, else (False, None)."""
    if D1.curve != D2.curve:
        raise CurveError("divisors on different curves")
    if D1.degree != D2.degree:
        raise ValueError(f"degree mismatch: {D1.degree} vs {D2.degree}")
    diff = D1 - D2
    if diff.is_zero():
        return True, D1.curve.const(1)
    basis = rr_basis(diff)
    if len(basis) != 1:
        return False, None
    F = basis[0]
    for pt, n in diff.mult.items():
        if pt.local().ord(F) != -n:
            raise AssertionError("witness function has the wrong order on the support")
    return True, F


def is_principal(D: Divisor) -> bool:
    return linear_equiv(D, Divisor(D.curve))[0]


# --- maps ------------------------------------------------------------------------

def pullback_divisor(c: CoverMap, D: Divisor) -> Divisor:
    out: dict = {}
    for pt, n in D.mult.items():
        for q in c.fiber(pt):
            out[q] = out.get(q, 0) + n * c.ram_index(q)
    return Divisor(c.source, out)


def pushforward(c: CoverMap, D: Divisor) -> Divisor:
    """Norm of a divisor along c."""
    out: dict = {}
    for q, n in D.mult.items():
        img = c.image(q)
        out[img] = out.get(img, 0) + n * (q.degree // img.degree)
    return Divisor(c.target, out)


def pull_class(c: CoverMap, cls: DivClass) -> DivClass:
    return DivClass(pullback_divisor(c, cls.rep))


def two_torsion_class(xi: CoverMap, f: Poly):
    """epsilon = div(f)/2 on X_s with its three verifications.

    Returns (epsilon, checks) where checks records 2e ~ 0, e !~ 0,
    xi^* e ~ 0 and agreement with an alternative half-split balancing.
    """
    Xs, Yr = xi.target, xi.source
    fX = Xs.from_base(f)
    div_f = principal_divisor(fX)
    if any(n % 2 for n in div_f.mult.values()):
        raise AssertionError("div(f) on X_s is not divisible by two")
    eps = Divisor(Xs, {p: n // 2 for p, n in div_f.mult.items()})
    zero = Divisor(Xs)
    checks = {}
    checks["twice_principal"] = principal_divisor(fX) == eps * 2
    checks["nontrivial"] = not linear_equiv(eps, zero)[0]
    pulled = pullback_divisor(xi, eps)
    y = Yr.gen(0)
    checks["pullback_trivial_witness"] = principal_divisor(y) == pulled
    checks["pullback_trivial"] = linear_equiv(pulled, Divisor(Yr))[0]
    return eps, checks


def alternative_balancing(Xs: Curve, branch_points: list[CPoint], split: int) -> Divisor:
    """sum of the first `split` ramification points minus the rest."""
    pos = branch_points[:split]
    neg = branch_points[split:]
    return Divisor.sum_of(Xs, pos) - Divisor.sum_of(Xs, neg)


def prym_test(M: Divisor, qr: CoverMap, Nclass: Divisor) -> bool:
    """Nm_{q_r}(M) ~ N on the base curve."""
    norm = pushforward(qr, M)
    if norm.degree != Nclass.degree:
        raise ValueError(f"degree mismatch: Nm has degree {norm.degree}, N has {Nclass.degree}")
    return linear_equiv(norm, Nclass)[0]


# --- sampling ----------------------------------------------------------------------

def random_rational_point(C: Curve, rng: RngStream, avoid=()) -> CPoint:
    avoid = set(avoid)
    while True:
        x0 = rng.randrange(C.p)
        pts = [q for q in C.points_over_value(x0) if q.degree == 1 and q.ram_index is None and q not in avoid]
        if pts:
            return pts[rng.randrange(len(pts))]


def random_divisor(C: Curve, rng: RngStream, positive: int, negative: int, avoid=()) -> Divisor:
    """Difference of random effective divisors of rational points."""
    pos = [random_rational_point(C, rng, avoid) for _ in range(positive)]
    neg = [random_rational_point(C, rng, avoid) for _ in range(negative)]
    return Divisor.sum_of(C, pos) - Divisor.sum_of(C, neg)


def infinity_divisor(C: Curve) -> Divisor:
    """Pullback of the point at infinity of P^1 (pole divisor of x)."""
    return Divisor(C, {q: q.e for q in C.infinity_points()})


def random_class_of_degree(C: Curve, rng: RngStream, degree: int, size: int | None = None,
                           avoid=()) -> Divisor:
    """A - B + k * (pullback of infinity) of the requested degree."""
    g = C.genus
    size = size if size is not None else g + 1
    inf_deg = infinity_divisor(C).degree
    neg = size // 2
    pos = size - neg
    while (degree - (pos - neg)) % inf_deg:
        pos += 1
    k = (degree - (pos - neg)) // inf_deg
    return random_divisor(C, rng, pos, neg, avoid) + infinity_divisor(C) * k
