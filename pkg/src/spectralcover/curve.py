"""Curves y_i^2 = f_i(x) over the projective line, their points, maps and spectral covers.

Every curve in play is a "multi-quadratic" cover of P^1: the function field is
F(x)(y_1, ..., y_m) with y_i^2 = f_i(x), m <= 2, the f_i squarefree, pairwise
coprime, and at most one of odd degree.  m = 0 is P^1 itself, m = 1 a
hyperelliptic curve (or a spectral curve over P^1), m = 2 the spectral cover
of a hyperelliptic curve.  Such a model is smooth in both charts:

* affine chart: coordinates (x, y_1, ..., y_m);
* infinity chart: u = 1/x, y~_i = y_i u^{delta_i}, delta_i = ceil(deg f_i / 2),
  with y~_i^2 = f~_i(u) = u^{2 delta_i} f_i(1/u).
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Iterable, Sequence

from . import linalg
from .exactfield import (Field, FieldError, GF, RngStream, ext_field,
                         is_irreducible_mod_p)
from .polyfun import (Poly, RatFun, factor, gcd, is_square_ratfun, ps_compose_poly,
                      ps_inv, ps_mul, ps_revert_quadratic, ps_sqrt, LaurentSeries)


class CurveError(ValueError):
    pass


class CeilingError(RuntimeError):
    """A residue field or enumeration would exceed the configured bound."""


class Limits:
    """Process-wide resource bounds (set by the CLI)."""

    ext_ceiling = 10 ** 7      # bound on q^k for exhaustive scans
    max_point_degree = 30      # bound on residue degrees of closed points


def _mask_bits(mask: int) -> list[int]:
    return [i for i in range(mask.bit_length()) if mask >> i & 1]


def _taylor_prefix(poly: Poly, c0, K: Field, n: int) -> list:
    """First n Taylor coefficients of poly at c0, in K."""
    coeffs = poly.lifted(K)
    out = []
    for _ in range(n):
        if not coeffs:
            out.append(K.zero)
            continue
        acc = K.zero
        quo = []
        for v in reversed(coeffs):
            acc = K.add(K.mul(acc, c0), v)
            quo.append(acc)
        out.append(quo.pop())
        coeffs = quo[::-1]
    return out


def _alg_mul(a: dict, b: dict, prods: dict) -> dict:
    out: dict = {}
    for S, A in a.items():
        for T, B in b.items():
            term = A * B
            both = S & T
            if both:
                term = term * prods[both]
            M = S ^ T
            out[M] = out[M] + term if M in out else term
    return {k: v for k, v in out.items() if not v.is_zero()}


def _alg_conj(a: dict, i: int) -> dict:
    return {S: (-A if S >> i & 1 else A) for S, A in a.items()}


class Curve:
    """Smooth projective curve y_i^2 = f_i(x) (i < m) over P^1."""

    def __init__(self, field: Field, polys: Sequence[Poly] = (), names: Sequence[str] | None = None,
                 label: str = ""):
        if field.kind != "prime":
            raise CurveError("curves are defined over a prime field")
        polys = tuple(polys)
        if len(polys) > 2:
            raise CurveError("at most two square roots supported")
        for f in polys:
            if f.degree < 1:
                raise CurveError("defining polynomials must be nonconstant")
            if not f.is_squarefree():
                raise CurveError("defining polynomial is not squarefree")
        for f, g in itertools.combinations(polys, 2):
            if gcd(f, g).degree > 0:
                raise CurveError("defining polynomials share a root")
        if sum(f.degree % 2 for f in polys) > 1:
            raise CurveError("at most one defining polynomial may have odd degree")
        self.field = field
        self.p = field.p
        self.polys = polys
        self.m = len(polys)
        self.names = tuple(names) if names else ("y", "z")[: self.m]
        self.label = label
        self.delta = tuple((f.degree + 1) // 2 for f in polys)
        self.inf_polys = tuple(f.reverse(2 * d) for f, d in zip(polys, self.delta))
        self.key = (self.p, tuple(f.c for f in polys))
        self._prods = {"aff": self._products(polys), "inf": self._products(self.inf_polys)}
        self._fibers: dict = {}
        self._points_cache: dict = {}

    def _products(self, polys) -> dict:
        out = {}
        for mask in range(1, 1 << self.m):
            acc = Poly(self.field, [1])
            for i in _mask_bits(mask):
                acc = acc * polys[i]
            out[mask] = acc
        return out

    # structure -------------------------------------------------------------
    @classmethod
    def projective_line(cls, field: Field) -> "Curve":
        return cls(field, (), label="P1")

    @classmethod
    def hyperelliptic(cls, f: Poly, name: str = "y", label: str = "") -> "Curve":
        return cls(f.field, (f,), names=(name,), label=label)

    def __eq__(self, other):
        return isinstance(other, Curve) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        if not self.polys:
            return f"P1/GF({self.p})"
        eqs = ", ".join(f"{n}^2 = {f}" for n, f in zip(self.names, self.polys))
        return f"Curve[{eqs}]/GF({self.p})"

    @property
    def degree_over_line(self) -> int:
        return 1 << self.m

    @property
    def odd_index(self) -> int | None:
        for i, f in enumerate(self.polys):
            if f.degree % 2:
                return i
        return None

    @property
    def genus(self) -> int:
        """Riemann-Hurwitz count for the (Z/2)^m cover of P^1."""
        if self.m == 0:
            return 0
        branch = sum(f.degree for f in self.polys) + (1 if self.odd_index is not None else 0)
        two_g_minus_2 = (1 << self.m) * (-2) + (1 << (self.m - 1)) * branch
        return two_g_minus_2 // 2 + 1

    def chart_polys(self, chart: str):
        return self.polys if chart == "aff" else self.inf_polys

    def products(self, chart: str) -> dict:
        return self._prods[chart]

    # functions -------------------------------------------------------------
    def function(self, coeffs: dict) -> "CurveFunction":
        return CurveFunction(self, coeffs)

    def const(self, c) -> "CurveFunction":
        return CurveFunction(self, {0: RatFun.const(self.field, c)})

    def x(self) -> "CurveFunction":
        return CurveFunction(self, {0: RatFun.x(self.field)})

    def gen(self, i: int) -> "CurveFunction":
        return CurveFunction(self, {1 << i: RatFun.const(self.field, 1)})

    def from_base(self, r) -> "CurveFunction":
        if isinstance(r, Poly):
            r = RatFun(r)
        elif not isinstance(r, RatFun):
            r = RatFun.const(self.field, r)
        return CurveFunction(self, {0: r})

    # points ----------------------------------------------------------------
    def points_over_place(self, place) -> list["CPoint"]:
        """Closed points above an x-place (monic irreducible Poly or 'inf')."""
        key = "inf" if isinstance(place, str) else place.c
        pts = self._fibers.get(key)
        if pts is None:
            pts = _fiber_points(self, place)
            self._fibers[key] = pts
        return pts

    def points_over_value(self, x0) -> list["CPoint"]:
        """Closed points with x-coordinate x0 in F_p (or 'inf')."""
        if isinstance(x0, str):
            return self.points_over_place("inf")
        place = Poly(self.field, [(-int(x0)) % self.p, 1])
        return self.points_over_place(place)

    def rational_points(self) -> list["CPoint"]:
        pts = []
        for x0 in range(self.p):
            pts.extend(q for q in self.points_over_value(x0) if q.degree == 1)
        pts.extend(q for q in self.points_over_place("inf") if q.degree == 1)
        return pts

    def infinity_points(self) -> list["CPoint"]:
        return self.points_over_place("inf")

    def ramification_points(self, index: int | None = None) -> list["CPoint"]:
        """Points where some y_i (or the given one) vanishes."""
        out = []
        places = []
        for i, f in enumerate(self.polys):
            if index is not None and i != index:
                continue
            for irr, _ in factor(f):
                places.append(irr)
        for pl in places:
            for q in self.points_over_place(pl):
                if q.ram_index is not None and (index is None or q.ram_index == index):
                    out.append(q)
        for q in self.points_over_place("inf"):
            if q.ram_index is not None and (index is None or q.ram_index == index):
                out.append(q)
        return out

    def point(self, x0, etas: Sequence[int] = (), chart: str = "aff") -> "CPoint":
        """Rational point from integer coordinates (x0 ignored at infinity)."""
        K = self.field
        c0 = 0 if chart == "inf" else int(x0) % self.p
        return make_point(self, chart, K, [c0] + [int(e) % self.p for e in etas])

    def count_points(self, K: Field) -> int:
        """Number of K-rational points by scanning the x-line of K."""
        if K.order > Limits.ext_ceiling:
            raise CeilingError(f"point count over a field of size {K.order} exceeds ceiling {Limits.ext_ceiling}")
        total = 0
        for chart, values in (("aff", K.elements()), ("inf", [K.zero])):
            phis = self.chart_polys(chart)
            for a in values:
                n = 1
                for phi in phis:
                    v = phi.evaluate(a, K)
                    if K.is_zero(v):
                        continue
                    n *= 2 if K.is_square(v) else 0
                total += n
        return total


class CurveFunction:
    """Element sum_S R_S(x) y_S of the function field, y_S = prod_{i in S} y_i."""

    __slots__ = ("curve", "coeffs")

    def __init__(self, curve: Curve, coeffs: dict):
        clean = {}
        for mask, r in coeffs.items():
            if isinstance(r, Poly):
                r = RatFun(r)
            elif not isinstance(r, RatFun):
                r = RatFun.const(curve.field, r)
            if mask >= (1 << curve.m):
                raise CurveError("coefficient mask outside the curve's generators")
            if not r.is_zero():
                clean[mask] = r
        self.curve = curve
        self.coeffs = clean

    def is_zero(self) -> bool:
        return not self.coeffs

    def coefficient(self, mask: int) -> RatFun:
        return self.coeffs.get(mask, RatFun.const(self.curve.field, 0))

    def __eq__(self, other):
        if isinstance(other, CurveFunction):
            return self.curve == other.curve and self.coeffs == other.coeffs
        return NotImplemented

    def __hash__(self):
        return hash((self.curve.key, tuple(sorted((k, hash(v)) for k, v in self.coeffs.items()))))

    def __repr__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for mask in sorted(self.coeffs):
            gens = "*".join(self.curve.names[i] for i in _mask_bits(mask))
            parts.append(f"{self.coeffs[mask]}" + (f"*{gens}" if gens else ""))
        return " + ".join(parts)

    def _co(self, other) -> "CurveFunction":
        if isinstance(other, CurveFunction):
            if other.curve != self.curve:
                raise CurveError("functions live on different curves")
            return other
        return self.curve.from_base(other)

    def __add__(self, other):
        o = self._co(other)
        out = dict(self.coeffs)
        for k, v in o.coeffs.items():
            out[k] = out[k] + v if k in out else v
        return CurveFunction(self.curve, out)

    __radd__ = __add__

    def __neg__(self):
        return CurveFunction(self.curve, {k: -v for k, v in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-self._co(other))

    def __rsub__(self, other):
        return self._co(other) - self

    def __mul__(self, other):
        o = self._co(other)
        return CurveFunction(self.curve, _alg_mul(self.coeffs, o.coeffs, self.curve.products("aff")))

    __rmul__ = __mul__

    def conj(self, i: int) -> "CurveFunction":
        return CurveFunction(self.curve, _alg_conj(self.coeffs, i))

    def norm(self) -> RatFun:
        """Norm down to F(x)."""
        cur = self.coeffs
        prods = self.curve.products("aff")
        for i in range(self.curve.m):
            cur = _alg_mul(cur, _alg_conj(cur, i), prods)
        return cur.get(0, RatFun.const(self.curve.field, 0))

    def inverse(self) -> "CurveFunction":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero function")
        prods = self.curve.products("aff")
        cof = {0: RatFun.const(self.curve.field, 1)}
        cur = self.coeffs
        for i in range(self.curve.m):
            c = _alg_conj(cur, i)
            cof = _alg_mul(cof, c, prods)
            cur = _alg_mul(cur, c, prods)
        nrm = cur[0]
        inv = nrm.inverse()
        return CurveFunction(self.curve, {k: v * inv for k, v in cof.items()})

    def __truediv__(self, other):
        return self * self._co(other).inverse()

    def __rtruediv__(self, other):
        return self._co(other) * self.inverse()

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        result = self.curve.const(1)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def is_base(self) -> bool:
        return all(k == 0 for k in self.coeffs)

    def base_part(self) -> RatFun:
        if not self.is_base():
            raise CurveError("function is not pulled back from the x-line")
        return self.coefficient(0)

    def derivative_x(self) -> "CurveFunction":
        """d/dx using dy_i/dx = f_i'/(2 y_i)."""
        curve = self.curve
        F = curve.field
        half = F.inv(2)
        out = self.curve.function({})
        for mask, r in self.coeffs.items():
            term = curve.function({mask: r.derivative()})
            # d(y_S)/dx = y_S * sum_{i in S} f_i'/(2 f_i)
            extra = RatFun.const(F, 0)
            for i in mask_bits(mask):
                f = curve.polys[i]
                extra = extra + RatFun(f.derivative().scale(half), f)
            out = out + term + curve.function({mask: r * extra})
        return out

    def chart_parts(self, chart: str):
        """(numerators {mask: Poly}, denominator Poly) in chart coordinates."""
        if chart == "aff":
            if not self.coeffs:
                return {}, Poly(self.curve.field, [1])
            den = Poly(self.curve.field, [1])
            for r in self.coeffs.values():
                if r.den.degree > 0:
                    den = (den * r.den).exact_div(gcd(den, r.den))
            nums = {k: r.num * den.exact_div(r.den) for k, r in self.coeffs.items()}
            return nums, den
        curve = self.curve
        F = curve.field
        terms = {}
        lcm_den = Poly(F, [1])
        shift_max = 0
        for mask, r in self.coeffs.items():
            sh, rn, rd = r.in_u()
            dS = sum(curve.delta[i] for i in _mask_bits(mask))
            e = sh - dS
            terms[mask] = (e, rn, rd)
            lcm_den = (lcm_den * rd).exact_div(gcd(lcm_den, rd))
            shift_max = max(shift_max, -e)
        den = lcm_den.shift_up(shift_max)
        nums = {}
        for mask, (e, rn, rd) in terms.items():
            nums[mask] = (rn * lcm_den.exact_div(rd)).shift_up(shift_max + e)
        return nums, den


def mask_bits(mask: int) -> list[int]:
    return _mask_bits(mask)


# --- closed points ---------------------------------------------------------------

class CPoint:
    """Closed point stored through a canonical geometric representative.

    coords = (c0, eta_1, ..., eta_m) are raw values of the residue field K,
    with c0 = x in the affine chart and c0 = u = 0 in the infinity chart.
    """

    __slots__ = ("curve", "chart", "field", "coords", "_key", "_place", "__weakref__")

    def __init__(self, curve: Curve, chart: str, field: Field, coords):
        if chart not in ("aff", "inf"):
            raise CurveError(f"unknown chart {chart!r}")
        coords = tuple(coords)
        if len(coords) != curve.m + 1:
            raise CurveError("coordinate tuple has the wrong length")
        K = field
        if chart == "inf" and not K.is_zero(coords[0]):
            raise CurveError("infinity chart points have u = 0")
        for phi, eta in zip(curve.chart_polys(chart), coords[1:]):
            if K.mul(eta, eta) != phi.evaluate(coords[0], K):
                raise CurveError("coordinates do not satisfy the chart equation")
        self.curve = curve
        self.chart = chart
        self.field = field
        self.coords = coords
        self._key = (curve.key, chart, field.key, coords)
        self._place = None

    @property
    def degree(self) -> int:
        return self.field.k

    @property
    def c0(self):
        return self.coords[0]

    @property
    def etas(self):
        return self.coords[1:]

    @property
    def is_infinite(self) -> bool:
        return self.chart == "inf"

    @property
    def ram_index(self) -> int | None:
        for i, eta in enumerate(self.etas):
            if self.field.is_zero(eta):
                return i
        return None

    @property
    def e(self) -> int:
        """Ramification index over P^1."""
        return 1 if self.ram_index is None else 2

    @property
    def place(self):
        if self._place is None:
            if self.chart == "inf":
                self._place = "inf"
            else:
                self._place = Poly(self.curve.field, self.field.minpoly(self.c0))
        return self._place

    def x_value(self):
        """Raw x-coordinate in the residue field, or None at infinity."""
        return None if self.chart == "inf" else self.c0

    def __eq__(self, other):
        return isinstance(other, CPoint) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __lt__(self, other):
        return self.sort_key() < other.sort_key()

    def sort_key(self):
        def enc(v):
            return v if isinstance(v, int) else tuple(v)
        return (self.chart == "inf", self.degree, self.field.modulus or (), tuple(enc(c) for c in self.coords))

    def __repr__(self):
        where = "inf" if self.chart == "inf" else f"x={self.c0}"
        etas = ",".join(f"{n}={v}" for n, v in zip(self.curve.names, self.etas))
        fld = "" if self.degree == 1 else f" over GF({self.curve.p}^{self.degree})"
        return f"<{where}{',' if etas else ''}{etas}{fld}>"

    def to_json(self) -> dict:
        def enc(v):
            return v if isinstance(v, int) else list(v)
        out = {"chart": self.chart, "degree": self.degree, "coords": [enc(c) for c in self.coords]}
        if self.degree > 1:
            out["modulus"] = list(self.field.modulus)
        return out

    def local(self) -> "LocalExpansion":
        return local_expansion(self)


def _digits(n: int, base: int, length: int) -> list[int]:
    out = []
    for _ in range(length):
        n, r = divmod(n, base)
        out.append(r)
    return out


def make_point(curve: Curve, chart: str, K: Field, vals) -> CPoint:
    """Canonical closed point from a geometric point with coordinates in K."""
    vals = list(vals)
    if K.kind == "prime":
        return CPoint(curve, chart, K, vals)
    if chart == "aff" and vals[0] == K.gen():
        return CPoint(curve, chart, K, vals)
    p = K.p
    degs = [len(K.minpoly(v)) - 1 for v in vals]
    d = 1
    for g in degs:
        d = d * g // math.gcd(d, g)
    if d == 1:
        F = GF(p)
        return CPoint(curve, chart, F, [v[0] for v in vals])
    m = len(vals) - 1
    n = 0
    while True:
        js = _digits(n, p, m)
        theta = vals[0]
        for j, v in zip(js, vals[1:]):
            if j:
                theta = K.add(theta, K.scale(v, j))
        mp = K.minpoly(theta)
        if len(mp) - 1 == d:
            break
        n += 1
        if n > p ** m:
            raise FieldError("no primitive element found")
    if d > Limits.max_point_degree:
        raise CeilingError(f"closed point of degree {d} exceeds max point degree {Limits.max_point_degree}")
    L = ext_field(p, mp)
    coords = K.power_basis_coords(theta, d, vals)
    return CPoint(curve, chart, L, [tuple(c) for c in coords])


def _quadratic_extension(L: Field, alpha, c):
    """Field of degree 2[L:F_p] containing sqrt(c), and the image of alpha."""
    p = L.p
    k = L.k

    def tmul(a, b):
        return (L.add(L.mul(a[0], b[0]), L.mul(L.mul(a[1], b[1]), c)),
                L.add(L.mul(a[0], b[1]), L.mul(a[1], b[0])))

    def vec(a):
        return L.to_vector(a[0]) + L.to_vector(a[1])

    for j in range(1, p):
        theta = (alpha, L.lift(j))
        powers = [vec((L.one, L.zero))]
        cur = (L.one, L.zero)
        mp = None
        for deg in range(1, 2 * k + 1):
            cur = tmul(cur, theta)
            rows = [[powers[t][i] for t in range(deg)] for i in range(2 * k)]
            sol = linalg.solve(rows, vec(cur), deg, p)
            if sol is not None:
                mp = [(-s) % p for s in sol] + [1]
                break
            powers.append(vec(cur))
        if mp is None or len(mp) - 1 != 2 * k:
            continue
        if 2 * k > Limits.max_point_degree:
            raise CeilingError(f"closed point of degree {2 * k} exceeds max point degree {Limits.max_point_degree}")
        L2 = ext_field(p, mp)
        rows = [[powers[t][i] for t in range(2 * k)] for i in range(2 * k)]
        a_coords = linalg.solve(rows, vec((alpha, L.zero)), 2 * k, p)
        return L2, L2.from_vector(a_coords)
    raise FieldError("quadratic extension construction failed")


def _fiber_points(curve: Curve, place) -> list[CPoint]:
    F = curve.field
    p = curve.p
    if isinstance(place, str):
        chart = "inf"
        L, alpha = F, 0
    else:
        chart = "aff"
        if place.lc != 1 or place.degree < 1:
            raise CurveError("place must be a monic irreducible polynomial")
        if place.degree == 1:
            L, alpha = F, (-place.c[0]) % p
        else:
            if place.degree > Limits.max_point_degree:
                raise CeilingError(f"place of degree {place.degree} exceeds max point degree {Limits.max_point_degree}")
            L = ext_field(p, place.c)
            alpha = L.gen()
    phis = curve.chart_polys(chart)
    vals = [phi.evaluate(alpha, L) for phi in phis]
    K, a = L, alpha
    for v in vals:
        if not L.is_zero(v) and not L.is_square(v):
            K, a = _quadratic_extension(L, alpha, v)
            break
    roots = []
    for phi in phis:
        v = phi.evaluate(a, K)
        r = K.sqrt_raw(v)
        if r is None:
            raise FieldError("square root missing after extension")
        roots.append(r)
    seen: dict = {}
    for signs in itertools.product((1, -1), repeat=curve.m):
        etas = []
        for s, r in zip(signs, roots):
            etas.append(r if s == 1 else K.neg(r))
        if any(s == -1 and K.is_zero(r) for s, r in zip(signs, roots)):
            continue
        pt = make_point(curve, chart, K, [a] + etas)
        seen.setdefault(pt, None)
    return sorted(seen)


# --- local expansions ---------------------------------------------------------

_LOCAL_CACHE: dict = {}


def local_expansion(pt: CPoint) -> "LocalExpansion":
    le = _LOCAL_CACHE.get(pt._key)
    if le is None:
        le = LocalExpansion(pt)
        _LOCAL_CACHE[pt._key] = le
    return le


class LocalExpansion:
    """Power series of the chart coordinates in a uniformizer t at a point.

    Unramified points use t = c - c0; at a zero of y_j the uniformizer is
    t = y_j (or y~_j at infinity).
    """

    def __init__(self, pt: CPoint):
        self.point = pt
        self.K = pt.field
        self.chart = pt.chart
        self.curve = pt.curve
        self.ram = pt.ram_index
        self.e = pt.e
        self.c0 = pt.c0
        self.phis = pt.curve.chart_polys(pt.chart)
        self._n = 0
        self._X: list = []
        self._etas: list = []
        self._eta_masks: dict = {}
        self._norm_bounds: dict = {}

    def ensure(self, n: int) -> None:
        if n <= self._n:
            return
        n = max(n, 2 * self._n, 6)
        K = self.K
        if self.ram is None:
            X = [K.zero, K.one] + [K.zero] * (n - 2)
        else:
            taylor = _taylor_prefix(self.phis[self.ram], self.c0, K, self.phis[self.ram].degree + 1)
            X = ps_revert_quadratic(K, taylor, n)
        etas = []
        for i, phi in enumerate(self.phis):
            if i == self.ram:
                etas.append([K.zero, K.one] + [K.zero] * (n - 2))
                continue
            tay = _taylor_prefix(phi, self.c0, K, phi.degree + 1)
            if self.ram is None:
                series = (tay + [K.zero] * n)[:n]
            else:
                series = ps_compose_poly(K, tay, X, n)
            etas.append(ps_sqrt(K, series, n, self.point.etas[i]))
        self._n = n
        self._X = X
        self._etas = etas
        self._eta_masks = {}

    def X(self, n: int) -> list:
        """Series of c - c0, n terms."""
        self.ensure(n)
        return self._X[:n]

    def eta(self, i: int, n: int) -> list:
        self.ensure(n)
        return self._etas[i][:n]

    def eta_mask(self, mask: int, n: int) -> list:
        self.ensure(n)
        key = (mask, n)
        s = self._eta_masks.get(key)
        if s is None:
            K = self.K
            s = [K.one] + [K.zero] * (n - 1)
            for i in _mask_bits(mask):
                s = ps_mul(K, s, self._etas[i], n)
            self._eta_masks[key] = s
        return s

    def poly_series(self, poly: Poly, n: int) -> list:
        """Series of poly(c) for a polynomial in the chart coordinate."""
        K = self.K
        if self.ram is None:
            return _taylor_prefix(poly, self.c0, K, n)
        tay = _taylor_prefix(poly, self.c0, K, min(poly.degree + 1, n) if poly.degree >= 0 else 1)
        return ps_compose_poly(K, tay, self.X(n), n)

    def x_series(self, n: int):
        """(valuation, n-term series) of the function x."""
        K = self.K
        if self.chart == "aff":
            return 0, ps_add_const(K, self.X(n), self.c0)
        # x = 1/u, u = X(t) with ord e
        X = self.X(n + self.e)
        unit = X[self.e:self.e + n]
        return -self.e, ps_inv(K, unit, n)

    def place_order(self, poly: Poly) -> int:
        """Order at this point of a nonzero polynomial in the chart coordinate."""
        if self.chart == "inf":
            place = Poly.x(self.curve.field)
        else:
            place = self.point.place
        return self.e * poly.ord_at(place)

    def _numerator_series(self, nums: dict, n: int) -> list:
        K = self.K
        acc = [K.zero] * n
        for mask, A in nums.items():
            s = self.poly_series(A, n)
            if mask:
                s = ps_mul(K, s, self.eta_mask(mask, n), n)
            acc = [K.add(a, b) for a, b in zip(acc, s)]
        return acc

    def _numerator_bound(self, nums: dict) -> int:
        """Upper bound for the order of sum A_S eta_S from its norm."""
        curve = self.curve
        prods = curve.products(self.chart)
        cur = dict(nums)
        for i in range(curve.m):
            cur = _alg_mul(cur, _alg_conj(cur, i), prods)
        nrm = cur.get(0)
        if nrm is None or nrm.is_zero():
            raise ZeroDivisionError("function is zero")
        return self.place_order(nrm)

    def expand(self, G: CurveFunction, rel: int = 1) -> LaurentSeries:
        """Laurent expansion of G with rel correct terms from its valuation."""
        if G.is_zero():
            raise ZeroDivisionError("expansion of the zero function")
        K = self.K
        nums, den = G.chart_parts(self.chart)
        qord = self.place_order(den)
        n = max(8, rel + 2)
        bound = None
        while True:
            s = self._numerator_series(nums, n)
            v = next((i for i, c in enumerate(s) if not K.is_zero(c)), None)
            if v is not None and n - v >= rel:
                break
            if v is None:
                if bound is None:
                    bound = self._numerator_bound(nums)
                if n > bound:
                    raise ArithmeticError("numerator series vanished beyond its norm bound")
            n = max(2 * n, (bound or 0) + rel + 1)
        dser = self.poly_series(den, qord + rel)
        unit = dser[qord:qord + rel]
        coeffs = ps_mul(K, s[v:v + rel], ps_inv(K, unit, rel), rel)
        val = v - qord
        return LaurentSeries(K, val, coeffs, val + rel)

    def ord(self, G: CurveFunction) -> int:
        return self.expand(G, 1).val

    def value(self, G: CurveFunction):
        """Value of G at the point (raw), which must be regular there."""
        s = self.expand(G, 1) if not G.is_zero() else None
        if s is None or s.val > 0:
            return self.K.zero
        if s.val < 0:
            raise ZeroDivisionError("function has a pole at the point")
        return s.coefficient(0)

    def dx_series(self, n: int):
        """(valuation, n-term series) of dx/dt."""
        K = self.K
        if self.chart == "aff":
            d = [K.mul(K.lift(i), c) for i, c in enumerate(self.X(n + self.e))][1:]
            return self.e - 1, d[self.e - 1:self.e - 1 + n]
        # x = 1/u: dx/dt = -u'/u^2
        X = self.X(n + 2 * self.e + 1)
        du = [K.mul(K.lift(i), c) for i, c in enumerate(X)][1:]
        unit = X[self.e:]
        inv2 = ps_inv(K, ps_mul(K, unit, unit, n + 1), n + 1)
        # du has valuation e - 1
        du_unit = du[self.e - 1:]
        ser = ps_mul(K, du_unit, inv2, n)
        return (self.e - 1) - 2 * self.e, [K.neg(c) for c in ser]

    def uniformizer(self) -> CurveFunction:
        """A function with a simple zero at the point."""
        curve = self.curve
        pt = self.point
        if self.ram is not None:
            g = curve.gen(self.ram)
            if self.chart == "inf":
                g = g * curve.from_base(RatFun(Poly(curve.field, [1]), Poly.x(curve.field) ** curve.delta[self.ram]))
            return g
        if self.chart == "inf":
            return curve.from_base(RatFun(Poly(curve.field, [1]), Poly.x(curve.field)))
        return curve.from_base(pt.place)


def ps_add_const(K: Field, s: list, c) -> list:
    out = list(s)
    if out:
        out[0] = K.add(out[0], c)
    return out


# --- maps between curves --------------------------------------------------------

class CoverMap:
    """x-preserving map source -> target of curves over the same P^1.

    images[i] = (mask, coefficient) sends the target generator i to
    coefficient(x) * y_mask on the source.
    """

    def __init__(self, source: Curve, target: Curve, images: Sequence[tuple[int, RatFun]], name: str = ""):
        if len(images) != target.m:
            raise CurveError("one image per target generator required")
        imgs = []
        for i, (mask, coef) in enumerate(images):
            if not isinstance(coef, RatFun):
                coef = RatFun(coef) if isinstance(coef, Poly) else RatFun.const(source.field, coef)
            img = CurveFunction(source, {mask: coef})
            sq = img * img
            if sq != source.from_base(target.polys[i]):
                raise CurveError("generator image does not satisfy the target equation")
            imgs.append((mask, coef))
        self.source = source
        self.target = target
        self.images = tuple(imgs)
        self.name = name
        self.degree = source.degree_over_line // target.degree_over_line
        if self.degree < 1:
            raise CurveError("map would have degree below one")

    def __repr__(self):
        return f"CoverMap[{self.name}: {self.source} -> {self.target}, degree {self.degree}]"

    def pull_function(self, G: CurveFunction) -> CurveFunction:
        if G.curve != self.target:
            raise CurveError("function not on the target curve")
        src = self.source
        gens = [src.function({mask: coef}) for mask, coef in self.images]
        out = src.function({})
        for mask, r in G.coeffs.items():
            term = src.from_base(r)
            for i in _mask_bits(mask):
                term = term * gens[i]
            out = out + term
        return out

    def image(self, pt: CPoint) -> CPoint:
        if pt.curve != self.source:
            raise CurveError("point not on the source curve")
        K = pt.field
        etas = []
        for i, (mask, coef) in enumerate(self.images):
            prod = K.one
            for j in _mask_bits(mask):
                prod = K.mul(prod, pt.etas[j])
            if pt.chart == "aff":
                c = coef.evaluate(pt.c0, K)
            else:
                dmask = sum(self.source.delta[j] for j in _mask_bits(mask))
                if coef.den.degree or coef.num.degree or dmask != self.target.delta[i]:
                    raise CurveError("map not monomial at infinity")
                c = K.lift(coef.num.c[0])
            etas.append(K.mul(c, prod))
        return make_point(self.target, pt.chart, K, [pt.c0] + etas)

    def fiber(self, pt: CPoint) -> list[CPoint]:
        if pt.curve != self.target:
            raise CurveError("point not on the target curve")
        return [q for q in self.source.points_over_place(pt.place) if self.image(q) == pt]

    def ram_index(self, q: CPoint) -> int:
        return q.e // self.image(q).e

    def compose(self, other: "CoverMap") -> "CoverMap":
        """self after other."""
        if other.target != self.source:
            raise CurveError("maps do not compose")
        imgs = []
        for mask, coef in self.images:
            f = other.source.from_base(coef)
            for j in _mask_bits(mask):
                m2, c2 = other.images[j]
                f = f * other.source.function({m2: c2})
            (m_out, c_out), = f.coeffs.items() if f.coeffs else ((0, RatFun.const(other.source.field, 0)),)
            imgs.append((m_out, c_out))
        return CoverMap(other.source, self.target, imgs, name=f"{self.name}o{other.name}")


def structure_map(curve: Curve) -> CoverMap:
    """The map (x, y...) -> x to P^1."""
    return CoverMap(curve, Curve.projective_line(curve.field), (), name="x")


# --- places and enumeration ---------------------------------------------------

def irreducible_polys(field: Field, k: int) -> Iterable[Poly]:
    """All monic irreducible polynomials of degree k, in scan order."""
    p = field.p
    if p ** k > Limits.ext_ceiling:
        raise CeilingError(f"enumerating degree-{k} places needs p^k = {p ** k} > ceiling {Limits.ext_ceiling}")
    for n in range(p ** k):
        low = _digits(n, p, k)
        if k > 1 and low[0] == 0:
            continue
        if is_irreducible_mod_p(low + [1], p):
            yield Poly(field, low + [1])


def closed_points(curve: Curve, max_degree: int) -> Iterable[CPoint]:
    """Closed points whose x-place has degree <= max_degree (and infinity)."""
    for pt in curve.points_over_place("inf"):
        yield pt
    for k in range(1, max_degree + 1):
        for place in irreducible_polys(curve.field, k):
            yield from curve.points_over_place(place)


# --- base data: branch points, sections, spectral curves ----------------------

INF = "inf"


def _normalize_points(F: Field, pts) -> list:
    out = []
    for t in pts:
        if isinstance(t, str):
            if t not in ("inf", "oo", "∞"):
                raise CurveError(f"unknown point {t!r}")
            out.append(INF)
        else:
            out.append(int(t) % F.p)
    if len(set(out)) != len(out):
        raise CurveError("points are not pairwise distinct")
    return out


def affine_product(F: Field, pts) -> Poly:
    acc = Poly(F, [1])
    for t in pts:
        if t != INF:
            acc = acc * Poly(F, [(-t) % F.p, 1])
    return acc


def line_point(F: Field, t) -> CPoint:
    line = Curve.projective_line(F)
    if t == INF:
        return line.points_over_place("inf")[0]
    return line.points_over_value(t)[0]


def hyperelliptic_cover(F: Field, branch) -> tuple[Curve, CoverMap]:
    """Y: y^2 = prod_{finite b}(x - b), branched exactly over the given points."""
    branch = _normalize_points(F, branch)
    f = affine_product(F, branch)
    if (INF in branch) != (f.degree % 2 == 1):
        raise CurveError("infinity is a branch point exactly when the count of finite branch points is odd")
    if len(branch) % 2 or len(branch) < 2:
        raise CurveError("a double cover of P^1 needs an even positive number of branch points")
    Y = Curve.hyperelliptic(f, "y", label="Y")
    return Y, structure_map(Y)


def branch_and_ramification(pi: CoverMap):
    """(B on the target, R on the source) for a double cover of P^1 by its y-structure."""
    from .divisor import Divisor
    if pi.degree != 2:
        raise CurveError("not a double cover")
    Y, X = pi.source, pi.target
    R = {}
    for q in Y.ramification_points():
        if pi.ram_index(q) == 2:
            R[q] = 1
    B = {}
    for q in R:
        B[pi.image(q)] = 1
    return Divisor(X, B), Divisor(Y, R)


@dataclass
class SigmaSection:
    """(s1, s2) with s1 = a * dx and s2 = b * dx^2, a and b functions on the base.

    On P^1 with parabolic points D, s1 = 0 and b = h(x) / prod_{affine t in D}(x - t)
    with deg h <= n - 4; coeffs is the vector of h against x^j.
    """

    base: Curve
    D: list
    s1: CurveFunction
    s2: CurveFunction
    coeffs: tuple | None = None

    @property
    def n(self) -> int:
        return len(self.D)

    def __add__(self, other: "SigmaSection") -> "SigmaSection":
        c = None
        if self.coeffs is not None and other.coeffs is not None:
            F = self.base.field
            c = tuple(F.add(a, b) for a, b in zip(self.coeffs, other.coeffs))
        return SigmaSection(self.base, self.D, self.s1 + other.s1, self.s2 + other.s2, c)

    def h(self) -> Poly:
        """Numerator h of s2 on P^1."""
        F = self.base.field
        return (self.s2.base_part() * affine_product(F, self.D)).num


def sigma_dimension(n: int) -> int:
    """dim of Gamma(omega^2(D)) on P^1 for |D| = n >= 3."""
    return max(0, n - 3)


def sigma_from_coeffs(F: Field, D, coeffs, s1=None) -> SigmaSection:
    """Section h(x) dx^2 / prod (x - t) from the coefficient vector of h."""
    D = _normalize_points(F, D)
    n = len(D)
    if len(coeffs) != sigma_dimension(n):
        raise CurveError(f"expected {sigma_dimension(n)} coefficients for |D| = {n}")
    P1 = Curve.projective_line(F)
    h = Poly(F, [int(c) % F.p for c in coeffs])
    s2 = P1.from_base(RatFun(h, affine_product(F, D)))
    if s1 is None:
        s1f = P1.function({})
    else:
        s1f = P1.from_base(s1)
    return SigmaSection(P1, D, s1f, s2, tuple(int(c) % F.p for c in coeffs))


def random_sigma(F: Field, D, rng: RngStream) -> SigmaSection:
    n = len(D)
    return sigma_from_coeffs(F, D, [rng.randrange(F.p) for _ in range(sigma_dimension(n))])


@dataclass
class SpectralCurve:
    """Spectral cover w^2 = F over a base curve, with certificates."""

    base: Curve
    s: SigmaSection
    twist_degree: int
    frame_mask: int           # twist frame e = dx / (y_mask * frame_poly)
    frame_poly: Poly
    disc: Poly                # w^2 = disc with w = zeta + s1/2
    smooth: bool
    integral: bool
    curve: Curve | None
    genus_formula: int
    notes: list = dc_field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.smooth and self.integral and self.curve is not None

    def require(self) -> Curve:
        if not self.ok:
            raise CurveError("spectral curve is not smooth and integral")
        return self.curve

    @property
    def zeta(self) -> CurveFunction:
        """The tautological section z as a function (coefficient against the frame)."""
        C = self.require()
        return C.gen(C.m - 1) - self._half_s1_on(C)

    def _half_s1_on(self, C: Curve) -> CurveFunction:
        a = self.s1_coefficient()
        return C.from_base(a * RatFun.const(C.field, C.field.inv(2)))

    def s1_coefficient(self) -> RatFun:
        """s1 against the frame e (a function of x)."""
        F = self.base.field
        if self.s.s1.is_zero():
            return RatFun.const(F, 0)
        # s1 = a dx = a * y_S * P * e
        coef = self.s.s1 * self.base.function({self.frame_mask: RatFun(self.frame_poly)})
        return coef.base_part()

    def s2_coefficient(self) -> RatFun:
        coef = self.s.s2 * self.base.function({self.frame_mask: RatFun(self.frame_poly)}) ** 2
        return coef.base_part()

    def equation(self) -> str:
        return f"w^2 = {self.disc}"

    def genus(self) -> int:
        return genus(self)


def spectral_curve(base: Curve, s: SigmaSection, twistdeg: int | None = None,
                   frame_mask: int = 0, frame_poly: Poly | None = None) -> SpectralCurve:
    """Spectral curve of s over base with twist line of degree twistdeg.

    The twisting line bundle is trivialized on the affine chart by
    e = dx / (y_mask * frame_poly); the curve is w^2 = disc with
    disc = (s1/e)^2 / 4 - s2/e^2.
    """
    F = base.field
    if frame_poly is None:
        frame_poly = Poly(F, [1])
    frame = base.function({frame_mask: RatFun(frame_poly)})
    b = (s.s2 * frame * frame)
    a = (s.s1 * frame) if not s.s1.is_zero() else base.function({})
    if not b.is_base() or not a.is_base():
        raise CurveError("characteristic coefficients are not functions of x in this frame")
    a0, b0 = a.coefficient(0), b.coefficient(0)
    quarter = F.inv(4)
    disc_r = a0 * a0 * RatFun.const(F, quarter) - b0
    if not disc_r.is_poly():
        raise CurveError("characteristic coefficients have poles in the affine chart")
    disc = disc_r.num
    if twistdeg is None:
        twistdeg = 2 * base.genus - 2 + sum(1 for _ in s.D) if base.m == 0 else None
        if twistdeg is None:
            raise CurveError("twist degree required over a curve of positive genus")
    g_formula = twistdeg + 2 * (base.genus - 1) + 1
    notes = []
    if disc.is_zero():
        return SpectralCurve(base, s, twistdeg, frame_mask, frame_poly, disc, False, False, None,
                             g_formula, ["discriminant vanishes identically"])
    # integrality over the algebraic closure of the base function field
    integral = is_square_ratfun(RatFun(disc), geometric=True) is None
    if integral:
        for mask in range(1, 1 << base.m):
            prod = disc * base.products("aff")[mask]
            if is_square_ratfun(RatFun(prod), geometric=True) is not None:
                integral = False
    if not integral:
        notes.append("discriminant is a square in the base function field")
    polys = list(base.polys) + [disc]
    smooth = disc.degree >= 1 and disc.is_squarefree()
    if not smooth:
        notes.append("discriminant has a repeated affine root")
    curve = None
    if smooth:
        try:
            names = tuple(base.names) + (("w",) if base.m == 0 else ("z",))
            curve = Curve(F, polys, names=names, label="spectral")
        except CurveError as exc:
            smooth = False
            notes.append(f"model is singular: {exc}")
    if curve is not None and curve.genus != g_formula:
        smooth = False
        notes.append(f"singular over infinity (model genus {curve.genus} vs expected {g_formula})")
    if not (smooth and integral):
        curve = None if not smooth else curve
    return SpectralCurve(base, s, twistdeg, frame_mask, frame_poly, disc, smooth, integral,
                         curve if smooth and integral else None, g_formula, notes)


def genus(c: SpectralCurve) -> int:
    """Genus by the twist-degree formula, cross-checked by Riemann-Hurwitz."""
    C = c.require()
    rh = C.genus
    if rh != c.genus_formula:
        raise AssertionError(f"genus mismatch: formula {c.genus_formula}, Riemann-Hurwitz {rh}")
    return rh


def spectral_over_line(F: Field, s: SigmaSection) -> SpectralCurve:
    """X_s over P^1 with L = omega(D) trivialized by dx / prod(x - t)."""
    P1 = s.base
    n = len(s.D)
    return spectral_curve(P1, s, twistdeg=n - 2, frame_mask=0, frame_poly=affine_product(F, s.D))


def pullback_sigma(pi: CoverMap, s: SigmaSection, T) -> SigmaSection:
    """pi^* s as a section over (Y, pi^*T); checks holomorphy over the branch locus."""
    Y = pi.source
    F = Y.field
    r1 = pi.pull_function(s.s1) if not s.s1.is_zero() else Y.function({})
    r2 = pi.pull_function(s.s2)
    T = _normalize_points(F, T)
    allowed = set()
    for t in T:
        for q in pi.fiber(line_point(F, t)):
            allowed.add(q)
    bad = []
    for q in Y.ramification_points() + [pt for pt in Y.infinity_points()]:
        if q in allowed:
            continue
        le = q.local()
        if not r2.is_zero():
            order = le.ord(r2) + 2 * le.dx_series(1)[0]
            if order < 0:
                bad.append((q, order))
        if not r1.is_zero():
            order = le.ord(r1) + le.dx_series(1)[0]
            if order < 0:
                bad.append((q, order))
    if bad:
        raise CurveError(f"pullback keeps poles at ramification points: {bad}")
    return SigmaSection(Y, T, r1, r2, s.coeffs)


def spectral_over_cover(Y: Curve, r: SigmaSection) -> SpectralCurve:
    """Y_r over Y with N = omega_Y(pi^* T) trivialized by dx / (y * prod_{t in T}(x - t))."""
    F = Y.field
    if Y.m != 1:
        raise CurveError("expected a hyperelliptic base")
    twist = 2 * Y.genus - 2 + 2 * len(r.D)
    return spectral_curve(Y, r, twistdeg=twist, frame_mask=1, frame_poly=affine_product(F, r.D))


def xi_maps(Xs: SpectralCurve, Yr: SpectralCurve) -> CoverMap:
    """xi: Y_r -> X_s, (x, y, z) -> (x, y z)."""
    X, Yc = Xs.require(), Yr.require()
    F = X.field
    if X.polys[0] != Yc.polys[0] * Yc.polys[1]:
        raise CurveError("Y_r is not the pullback spectral cover of X_s")
    return CoverMap(Yc, X, [(0b11, RatFun.const(F, 1))], name="xi")


def cover_maps(Y: Curve, Xs: Curve, Yr: Curve) -> dict:
    """pi: Y -> P1, q_s: X_s -> P1, q_r: Y_r -> Y, xi: Y_r -> X_s."""
    F = Y.field
    pi = structure_map(Y)
    pi.name = "pi"
    qs = structure_map(Xs)
    qs.name = "q_s"
    qr = CoverMap(Yr, Y, [(0b01, RatFun.const(F, 1))], name="q_r")
    xi = CoverMap(Yr, Xs, [(0b11, RatFun.const(F, 1))], name="xi")
    return {"pi": pi, "q_s": qs, "q_r": qr, "xi": xi}
