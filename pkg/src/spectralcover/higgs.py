"""Rank-2 parabolic Higgs fields as framed matrices of functions.

A bundle is carried by a rational working frame over the function field of
the base together with local frames at finitely many special points: the
columns of ``frames[P]`` (working-frame coordinates) form a basis of the
fiber module at P; everywhere else the working frame itself is a basis.
The Higgs field is a matrix ``theta`` against the working frame, with values
in L = omega(polar) trivialized generically by e = phi * dx.
"""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Sequence

from .curve import CPoint, CoverMap, Curve, CurveError, CurveFunction, SigmaSection, sigma_dimension
from .divisor import Divisor, dx_divisor, principal_divisor
from .polyfun import Poly, RatFun, is_square_ratfun, ps_mul

Matrix = tuple  # (a, b, c, d) row-major, entries CurveFunction


class HiggsError(ValueError):
    pass


# --- 2x2 matrices of functions ---------------------------------------------------

def mat(C: Curve, a, b, c, d) -> Matrix:
    def f(v):
        if isinstance(v, CurveFunction):
            return v
        if isinstance(v, (Poly, RatFun)):
            return C.from_base(v)
        return C.const(v)
    return (f(a), f(b), f(c), f(d))


def identity(C: Curve) -> Matrix:
    return mat(C, 1, 0, 0, 1)


def mat_mul(A: Matrix, B: Matrix) -> Matrix:
    a, b, c, d = A
    e, f, g, h = B
    return (a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)


def mat_det(A: Matrix) -> CurveFunction:
    return A[0] * A[3] - A[1] * A[2]


def mat_tr(A: Matrix) -> CurveFunction:
    return A[0] + A[3]


def mat_inv(A: Matrix) -> Matrix:
    dinv = mat_det(A).inverse()
    a, b, c, d = A
    return (d * dinv, -b * dinv, -c * dinv, a * dinv)


def mat_scale(A: Matrix, s: CurveFunction) -> Matrix:
    return tuple(x * s for x in A)


def mat_apply(A: Matrix, v) -> tuple:
    return (A[0] * v[0] + A[1] * v[1], A[2] * v[0] + A[3] * v[1])


def conjugate(theta: Matrix, G: Matrix) -> Matrix:
    return mat_mul(mat_inv(G), mat_mul(theta, G))


def pull_matrix(c: CoverMap, A: Matrix) -> Matrix:
    return tuple(c.pull_function(x) for x in A)


def diag_power_x(C: Curve, exps: Sequence[int]) -> Matrix:
    x = C.x()
    return (x ** exps[0], C.const(0), C.const(0), x ** exps[1])


# --- local data ----------------------------------------------------------------

def _coeff_times_dx(G: CurveFunction, pt: CPoint, j: int):
    """Coefficient of t^j in G * dx/dt at pt (raw, residue field)."""
    le = pt.local()
    K = le.K
    if G.is_zero():
        return K.zero
    v = le.ord(G)
    vd, _ = le.dx_series(1)
    idx = j - v - vd
    if idx < 0:
        return K.zero
    s = le.expand(G, idx + 1)
    _, dser = le.dx_series(idx + 1)
    coeffs = (s.coeffs + [K.zero] * (idx + 1))[:idx + 1]
    return ps_mul(K, coeffs, dser, idx + 1)[idx]


def _min_ord(vec, pt: CPoint) -> int:
    le = pt.local()
    return min(le.ord(g) for g in vec if not g.is_zero())


def _kernel(K, m) -> tuple | None:
    """Generator of the kernel of a rank-one 2x2 matrix over K (raw)."""
    a, b, c, d = m
    if not (K.is_zero(a) and K.is_zero(b)):
        return (b, K.neg(a)) if not K.is_zero(b) else (K.zero, K.one)
    if not (K.is_zero(c) and K.is_zero(d)):
        return (d, K.neg(c)) if not K.is_zero(d) else (K.zero, K.one)
    return None


def _normalize_direction(K, v) -> tuple:
    """Scale so the first nonzero coordinate is 1."""
    for c in v:
        if not K.is_zero(c):
            inv = K.inv(c)
            return tuple(K.mul(inv, x) for x in v)
    raise HiggsError("zero vector is not a direction")


def _same_direction(K, u, v) -> bool:
    return K.is_zero(K.sub(K.mul(u[0], v[1]), K.mul(u[1], v[0])))


@dataclass(frozen=True)
class LedgerEntry:
    kind: str          # "split", "pullback", "elem", "twist", "resplit"
    point: CPoint | None
    amount: int        # contribution to deg det (or the multiplier for pullback)
    note: str = ""


@dataclass
class FrameBundle:
    """Rank-2 bundle as working frame plus local frames at special points."""

    base: Curve
    frames: dict
    ledger: tuple = ()
    splitting: tuple | None = None

    def frame_at(self, pt: CPoint) -> Matrix:
        return self.frames.get(pt) or identity(self.base)

    def degree(self) -> int:
        """deg det E from the frames: the working determinant has order -ord det Fr_P."""
        return -sum(pt.degree * pt.local().ord(mat_det(Fr)) for pt, Fr in self.frames.items())

    def ledger_degree(self) -> int:
        deg = 0
        for entry in self.ledger:
            if entry.kind in ("split", "resplit"):
                deg = entry.amount
            elif entry.kind == "pullback":
                deg *= entry.amount
            else:
                deg += entry.amount
        return deg

    def check_ledger(self) -> None:
        if self.degree() != self.ledger_degree():
            raise AssertionError(f"ledger degree {self.ledger_degree()} != frame degree {self.degree()}")


@dataclass
class ParabolicHiggs:
    """theta: E -> E (x) L with L = omega(polar) and e = phi dx generic frame of L."""

    bundle: FrameBundle
    theta: Matrix
    phi: CurveFunction
    polar: Divisor
    directions: dict = dc_field(default_factory=dict)   # point -> raw vector (local frame) or None
    weights: dict = dc_field(default_factory=dict)      # point -> Fraction

    @property
    def base(self) -> Curve:
        return self.bundle.base

    @property
    def degree(self) -> int:
        return self.bundle.degree()

    def local_matrix(self, pt: CPoint) -> Matrix:
        Fr = self.bundle.frames.get(pt)
        return self.theta if Fr is None else conjugate(self.theta, Fr)

    def local_form(self, pt: CPoint) -> Matrix:
        """Local matrix times phi, so theta = (this) dx near pt."""
        return mat_scale(self.local_matrix(pt), self.phi)

    def order_at(self, pt: CPoint) -> int:
        """Order of theta at pt as an End(E) (x) L section (>= 0 means regular)."""
        M = self.local_form(pt)
        ords = [pt.local().ord(g) for g in M if not g.is_zero()]
        if not ords:
            return 10 ** 9
        return min(ords) + pt.local().dx_series(1)[0] + self.polar.get(pt)

    def residue_matrix(self, pt: CPoint):
        """(raw 2x2 residue over the residue field, nilpotent flag)."""
        M = self.local_form(pt)
        K = pt.field
        ords = [pt.local().ord(g) + pt.local().dx_series(1)[0] for g in M if not g.is_zero()]
        if ords and min(ords) < -1:
            raise HiggsError(f"pole of order {-min(ords)} at {pt}")
        res = tuple(_coeff_times_dx(g, pt, -1) for g in M)
        tr = K.add(res[0], res[3])
        det = K.sub(K.mul(res[0], res[3]), K.mul(res[1], res[2]))
        return res, K.is_zero(tr) and K.is_zero(det)

    def value_matrix(self, pt: CPoint):
        """theta at pt against the local generator t^(-k) dt of L, k = polar multiplicity."""
        if self.order_at(pt) < 0:
            raise HiggsError(f"theta has a pole at {pt} as an L-valued field")
        k = self.polar.get(pt)
        return tuple(_coeff_times_dx(g, pt, -k) for g in self.local_form(pt))

    def kernel_direction(self, pt: CPoint):
        res, nil = self.residue_matrix(pt)
        if not nil:
            return None
        return _kernel(pt.field, res)

    def parabolic_points(self) -> list[CPoint]:
        return self.polar.support()

    def is_strongly_parabolic(self) -> bool:
        for pt in self.parabolic_points():
            res, nil = self.residue_matrix(pt)
            if not nil:
                return False
            ker = _kernel(pt.field, res)
            l = self.directions.get(pt)
            if ker is not None:
                if l is None or not _same_direction(pt.field, ker, l):
                    return False
        return True

    def special_points(self) -> list[CPoint]:
        """Points where theta could fail to be regular (candidates for pole checks)."""
        C = self.base
        pts = set(self.bundle.frames) | set(self.polar.mult) | set(dx_divisor(C).mult)
        for g in list(self.theta) + [self.phi]:
            if not g.is_zero():
                pts |= set(principal_divisor(g).negative_part().mult)
        return sorted(pts, key=lambda q: q.sort_key())

    def check_regular(self) -> list:
        """Points where theta has a pole beyond the allowed polar divisor."""
        return [(pt, o) for pt in self.special_points() if (o := self.order_at(pt)) < 0]

    def replace(self, **kw) -> "ParabolicHiggs":
        data = dict(bundle=self.bundle, theta=self.theta, phi=self.phi, polar=self.polar,
                    directions=dict(self.directions), weights=dict(self.weights))
        data.update(kw)
        return ParabolicHiggs(**data)


# --- Hitchin map and slopes ------------------------------------------------------------

def hitchin(H: ParabolicHiggs) -> SigmaSection:
    """(-tr theta, det theta) as coefficients of dx and dx^2, with membership checked."""
    C = H.base
    s1 = -(mat_tr(H.theta) * H.phi)
    s2 = mat_det(H.theta) * H.phi * H.phi
    D = [("inf" if pt.chart == "inf" else pt.c0) for pt in H.polar.support() if pt.degree == 1]
    if C.m == 0:
        if not s1.is_zero():
            raise HiggsError("trace of a Higgs field on P^1 must vanish")
        from .curve import affine_product, sigma_from_coeffs
        F = C.field
        h = s2.base_part() * RatFun(affine_product(F, D))
        if not h.is_poly() or h.num.degree > len(D) - 4:
            raise HiggsError("det theta is not in the parabolic Hitchin base")
        coeffs = (list(h.num.c) + [0] * sigma_dimension(len(D)))[:sigma_dimension(len(D))]
        s = sigma_from_coeffs(F, D, coeffs)
        if s.s2 != s2:
            raise AssertionError("Hitchin base coordinates do not reproduce det theta")
        return s
    for pt in set(principal_divisor(s2).negative_part().mult) | set(dx_divisor(C).mult) | set(H.polar.mult):
        le = pt.local()
        vdx = le.dx_series(1)[0]
        if not s2.is_zero() and le.ord(s2) + 2 * vdx + H.polar.get(pt) < 0:
            raise HiggsError(f"det theta has a double pole at {pt}")
        if not s1.is_zero() and le.ord(s1) + vdx < 0:
            raise HiggsError(f"tr theta has a pole at {pt}")
    return SigmaSection(C, D, s1, s2, None)


def slope(degree: int, weights: Sequence[Fraction]) -> Fraction:
    return (Fraction(degree) + sum((Fraction(m) for m in weights), Fraction(0))) / 2


def slope_sub(sub_degree: int, passes: Sequence[bool], weights: Sequence[Fraction]) -> Fraction:
    """deg N plus the weights of the parabolic points where N meets the direction."""
    return Fraction(sub_degree) + sum((Fraction(m) for m, hit in zip(weights, passes) if hit), Fraction(0))


# --- operations ------------------------------------------------------------------------

def _complement(K, c) -> tuple:
    return (K.zero, K.one) if not K.is_zero(c[0]) else (K.one, K.zero)


def elem(H: ParabolicHiggs, centers: Sequence) -> tuple[ParabolicHiggs, list]:
    """Elementary transformation at rational centers.

    centers: points, or (point, direction) pairs; a missing direction means the
    kernel of the residue. Returns (new field, flags) where flags lists centers
    whose direction is not a kernel direction of a nonzero nilpotent residue.
    """
    C = H.base
    frames = dict(H.bundle.frames)
    directions = dict(H.directions)
    weights = dict(H.weights)
    ledger = list(H.bundle.ledger)
    flags = []
    s_before = (mat_tr(H.theta), mat_det(H.theta))
    for item in centers:
        pt, l = (item, None) if isinstance(item, CPoint) else item
        if pt.degree != 1:
            raise HiggsError("elementary transformations are supported at rational points")
        K = pt.field
        ker = H.kernel_direction(pt)
        if l is None:
            l = directions.get(pt) if directions.get(pt) is not None else ker
            if l is None:
                raise HiggsError(f"no direction available at {pt} (free direction)")
        l = _normalize_direction(K, l)
        if ker is None or not _same_direction(K, ker, l):
            flags.append(pt)
        k = _complement(K, l)
        t = pt.local().uniformizer()
        G = mat(C, l[0], k[0] * 1, l[1], k[1] * 1)
        G = (G[0], G[1] * t, G[2], G[3] * t)
        frames[pt] = mat_mul(frames.get(pt) or identity(C), G)
        ledger.append(LedgerEntry("elem", pt, -pt.degree, f"direction {list(l)}"))
        if pt in weights:
            weights[pt] = 1 - weights[pt]
        directions[pt] = None
    bundle = FrameBundle(C, frames, tuple(ledger), None)
    out = H.replace(bundle=bundle, directions=directions, weights=weights)
    for item in centers:
        pt = item if isinstance(item, CPoint) else item[0]
        if out.polar.get(pt):
            res, nil = out.residue_matrix(pt)
            out.directions[pt] = _kernel(pt.field, res) if nil else None
    if (mat_tr(out.theta), mat_det(out.theta)) != s_before:
        raise AssertionError("elementary transformation changed trace or determinant")
    return out, flags


def twist(H: ParabolicHiggs, delta: Divisor) -> ParabolicHiggs:
    """H tensored with O(delta): local frames pick up t^(-delta_P)."""
    C = H.base
    frames = dict(H.bundle.frames)
    ledger = list(H.bundle.ledger)
    for pt, n in delta.items():
        t = pt.local().uniformizer()
        frames[pt] = mat_scale(frames.get(pt) or identity(C), t ** (-n))
        ledger.append(LedgerEntry("twist", pt, 2 * n * pt.degree))
    return H.replace(bundle=FrameBundle(C, frames, tuple(ledger), None))


def pullback_higgs(pi: CoverMap, H: ParabolicHiggs) -> ParabolicHiggs:
    """pi^* H over (Y, reduced pi^* polar)."""
    Y = pi.source
    frames = {}
    for pt, Fr in H.bundle.frames.items():
        pFr = pull_matrix(pi, Fr)
        for q in pi.fiber(pt):
            frames[q] = pFr
    polar = {}
    directions = {}
    weights = {}
    for pt in H.polar.support():
        for q in pi.fiber(pt):
            polar[q] = 1
            l = H.directions.get(pt)
            directions[q] = None if l is None else tuple(q.field.lift(c) for c in l)
            if pt in H.weights:
                weights[q] = H.weights[pt]
    ledger = tuple(H.bundle.ledger) + (LedgerEntry("pullback", None, pi.degree),)
    bundle = FrameBundle(Y, frames, ledger, None)
    G = ParabolicHiggs(bundle, pull_matrix(pi, H.theta), pi.pull_function(H.phi), Divisor(Y, polar),
                       directions, weights)
    return G


def phi_map(pi: CoverMap, H: ParabolicHiggs, twist_by: Divisor | None = None) -> ParabolicHiggs:
    """Pull back along pi, then elementary transformation over R at the kernel directions.

    The result is regular over R, whose points leave the parabolic divisor;
    twist_by (a divisor on Y) is applied afterwards when given.
    """
    from .curve import branch_and_ramification
    G = pullback_higgs(pi, H)
    _, R = branch_and_ramification(pi)
    centers = [(pt, G.kernel_direction(pt)) for pt in R.support()]
    for pt, ker in centers:
        if ker is None:
            raise HiggsError(f"residue at ramification point {pt} is zero or not nilpotent")
    G2, _ = elem(G, centers)
    polar = Divisor(G2.base, {pt: n for pt, n in G2.polar.mult.items() if pt not in R.mult})
    directions = {pt: l for pt, l in G2.directions.items() if pt not in R.mult}
    weights = {pt: w for pt, w in G2.weights.items() if pt not in R.mult}
    G3 = G2.replace(polar=polar, directions=directions, weights=weights)
    bad = [(pt, G3.order_at(pt)) for pt in R.support() if G3.order_at(pt) < 0]
    if bad:
        raise AssertionError(f"transformed field keeps poles over R: {bad}")
    if twist_by is not None and not twist_by.is_zero():
        G3 = twist(G3, twist_by)
    return G3


# --- invariant subbundles (split bundles on P^1) ---------------------------------------------

def _primitive(v: Sequence[RatFun]) -> list[Poly]:
    from .polyfun import gcd, lcm
    F = v[0].field
    den = Poly(F, [1])
    for r in v:
        den = lcm(den, r.den)
    nums = [(r * RatFun(den)).num for r in v]
    g = Poly(F, [])
    for n in nums:
        g = gcd(g, n)
    return [n.exact_div(g) for n in nums]


def invariant_subbundles(H: ParabolicHiggs, bound: int) -> list[tuple[int, list[Poly]]]:
    """theta-invariant line subbundles of degree >= -bound of a split bundle on P^1.

    An invariant line is an eigenline over F(x), so it exists only when the
    discriminant is a square; its saturation is read off from a primitive
    polynomial generator and the frame at infinity.
    """
    C = H.base
    if C.m != 0 or H.bundle.splitting is None:
        raise HiggsError("invariant subbundle search needs a split bundle on P^1")
    a, b, c, d = (g.base_part() for g in H.theta)
    disc = (a - d) * (a - d) + RatFun.const(C.field, 4) * b * c
    if disc.is_zero():
        roots = [RatFun.const(C.field, 0)]
    else:
        r = is_square_ratfun(disc)
        if r is None:
            return []
        roots = [r, -r]
    half = RatFun.const(C.field, C.field.inv(2))
    out = []
    splitting = H.bundle.splitting
    seen = set()
    for r in roots:
        lam = (a + d + r) * half
        if not b.is_zero():
            v = [b, lam - a]
        elif not c.is_zero():
            v = [lam - d, c]
        else:
            v = [RatFun.const(C.field, 1), RatFun.const(C.field, 0)] if lam == a else \
                [RatFun.const(C.field, 0), RatFun.const(C.field, 1)]
        prim = _primitive(v)
        key = tuple(tuple(p.monic().c) if not p.is_zero() else () for p in prim)
        if key in seen:
            continue
        seen.add(key)
        deg = min(splitting[i] - prim[i].degree for i in range(2) if not prim[i].is_zero())
        if deg >= -bound:
            out.append((deg, prim))
    return out


def upper_triangular_higgs(F, D, a_split: Sequence[int], diag: Poly, upper: Poly) -> ParabolicHiggs:
    """Split bundle on P^1 with theta = [[diag, upper], [0, -diag]] against dx/P_D (planted invariant line)."""
    from .curve import affine_product, line_point
    P1 = Curve.projective_line(F)
    PD = affine_product(F, D)
    theta = mat(P1, diag, upper, 0, -diag)
    inf = P1.infinity_points()[0]
    frames = {inf: diag_power_x(P1, a_split)}
    bundle = FrameBundle(P1, frames, (LedgerEntry("split", None, sum(a_split)),), tuple(a_split))
    polar = Divisor(P1, {line_point(F, t): 1 for t in D})
    return ParabolicHiggs(bundle, theta, P1.from_base(RatFun(Poly(F, [1]), PD)), polar)
