"""Univariate polynomials, rational functions and truncated Laurent series."""
from __future__ import annotations

from typing import Iterable

from .exactfield import Field, FieldElement, FieldError, GF, RngStream


def _raw(field: Field, c):
    if isinstance(c, FieldElement):
        return field(c).v
    return field.coerce(c)


class Poly:
    """Dense polynomial with raw coefficients, lowest degree first."""

    __slots__ = ("field", "c", "_hash")

    def __init__(self, field: Field, coeffs: Iterable = (), raw: bool = True):
        if raw:
            c = list(coeffs)
        else:
            c = [_raw(field, x) for x in coeffs]
        zero = field.zero
        while c and c[-1] == zero:
            c.pop()
        self.field = field
        self.c = tuple(c)
        self._hash = None

    # constructors ----------------------------------------------------------
    @classmethod
    def from_ints(cls, field: Field, coeffs) -> "Poly":
        return cls(field, [field.coerce(x) for x in coeffs])

    @classmethod
    def x(cls, field: Field) -> "Poly":
        return cls(field, [field.zero, field.one])

    @classmethod
    def const(cls, field: Field, value) -> "Poly":
        return cls(field, [_raw(field, value)])

    @classmethod
    def from_roots(cls, field: Field, roots) -> "Poly":
        out = cls(field, [field.one])
        for r in roots:
            out = out * cls(field, [field.neg(_raw(field, r)), field.one])
        return out

    # basics ----------------------------------------------------------------
    @property
    def degree(self) -> int:
        return len(self.c) - 1

    def is_zero(self) -> bool:
        return not self.c

    @property
    def lc(self):
        return self.c[-1] if self.c else self.field.zero

    def coeff(self, i: int):
        return self.c[i] if 0 <= i < len(self.c) else self.field.zero

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.c == other.c and self.field.key == other.field.key
        if isinstance(other, int):
            return self.c == Poly.const(self.field, other).c
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.field.key, self.c))
        return self._hash

    def __repr__(self):
        if not self.c:
            return "0"
        terms = []
        for i, a in enumerate(self.c):
            if a != self.field.zero:
                terms.append(f"{a}*x^{i}" if i else f"{a}")
        return " + ".join(terms)

    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            return other
        return Poly.const(self.field, other)

    # arithmetic ------------------------------------------------------------
    def __add__(self, other):
        o = self._coerce(other)
        f = self.field
        a, b = self.c, o.c
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, v in enumerate(b):
            out[i] = f.add(out[i], v)
        return Poly(f, out)

    __radd__ = __add__

    def __neg__(self):
        f = self.field
        return Poly(f, [f.neg(v) for v in self.c])

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, Poly):
            if isinstance(other, FieldElement) or isinstance(other, int):
                return self.scale(_raw(self.field, other))
            return NotImplemented
        f = self.field
        a, b = self.c, other.c
        if not a or not b:
            return Poly(f, [])
        if f.kind == "prime":
            p = f.p
            out = [0] * (len(a) + len(b) - 1)
            for i, ai in enumerate(a):
                if ai:
                    for j, bj in enumerate(b):
                        out[i + j] += ai * bj
            return Poly(f, [v % p for v in out])
        out = [f.zero] * (len(a) + len(b) - 1)
        for i, ai in enumerate(a):
            if f.is_zero(ai):
                continue
            for j, bj in enumerate(b):
                out[i + j] = f.add(out[i + j], f.mul(ai, bj))
        return Poly(f, out)

    def __rmul__(self, other):
        return self.__mul__(other)

    def scale(self, c) -> "Poly":
        f = self.field
        return Poly(f, [f.mul(v, c) for v in self.c])

    def __pow__(self, e: int) -> "Poly":
        if e < 0:
            raise ValueError("negative power of a polynomial")
        result = Poly(self.field, [self.field.one])
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def shift_up(self, n: int) -> "Poly":
        """Multiply by x^n."""
        if not self.c:
            return self
        return Poly(self.field, [self.field.zero] * n + list(self.c))

    def __divmod__(self, other: "Poly"):
        other = self._coerce(other)
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        f = self.field
        r = list(self.c)
        db = other.degree
        if len(r) - 1 < db:
            return Poly(f, []), self
        q = [f.zero] * (len(r) - db)
        inv = f.inv(other.lc)
        b = other.c
        if f.kind == "prime":
            p = f.p
            for s in range(len(r) - 1 - db, -1, -1):
                c = r[s + db] * inv % p
                q[s] = c
                if c:
                    for i in range(db + 1):
                        r[s + i] = (r[s + i] - c * b[i]) % p
        else:
            for s in range(len(r) - 1 - db, -1, -1):
                c = f.mul(r[s + db], inv)
                q[s] = c
                if not f.is_zero(c):
                    for i in range(db + 1):
                        r[s + i] = f.sub(r[s + i], f.mul(c, b[i]))
        return Poly(f, q), Poly(f, r[:db])

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def exact_div(self, other: "Poly") -> "Poly":
        q, r = divmod(self, other)
        if not r.is_zero():
            raise ArithmeticError("division is not exact")
        return q

    def monic(self) -> "Poly":
        if not self.c:
            return self
        return self.scale(self.field.inv(self.lc))

    def derivative(self) -> "Poly":
        f = self.field
        return Poly(f, [f.mul(f.lift(i), v) for i, v in enumerate(self.c)][1:])

    def __call__(self, a, K: Field | None = None):
        """Evaluate at a raw value a of K (default: own field)."""
        if isinstance(a, FieldElement):
            K = a.field
            return FieldElement(K, self.evaluate(a.v, K))
        return self.evaluate(a, K)

    def evaluate(self, a, K: Field | None = None):
        f = self.field
        if K is None or K is f:
            acc = f.zero
            for v in reversed(self.c):
                acc = f.add(f.mul(acc, a), v)
            return acc
        acc = K.zero
        for v in reversed(self.c):
            acc = K.add(K.mul(acc, a), K.lift(v))
        return acc

    def lifted(self, K: Field) -> list:
        """Coefficients as raw values of the extension K."""
        if K is self.field:
            return list(self.c)
        return [K.lift(v) for v in self.c]

    def compose(self, g: "Poly") -> "Poly":
        acc = Poly(self.field, [])
        for v in reversed(self.c):
            acc = acc * g + Poly(self.field, [v])
        return acc

    def reverse(self, d: int | None = None) -> "Poly":
        """x^d * self(1/x) with d >= degree (default d = degree)."""
        if d is None:
            d = self.degree
        if d < self.degree:
            raise ValueError("reverse degree below polynomial degree")
        c = list(self.c) + [self.field.zero] * (d + 1 - len(self.c))
        return Poly(self.field, c[::-1])

    def taylor(self, a, K: Field | None = None) -> list:
        """Raw coefficients of self(a + X) in K."""
        K = K or self.field
        c = self.lifted(K)
        n = len(c)
        c = list(c)
        for i in range(n):
            for j in range(n - 2, i - 1, -1):
                c[j] = K.add(c[j], K.mul(a, c[j + 1]))
        return c

    def powmod(self, e: int, mod: "Poly") -> "Poly":
        result = Poly(self.field, [self.field.one])
        base = self % mod
        while e:
            if e & 1:
                result = (result * base) % mod
            base = (base * base) % mod
            e >>= 1
        return result

    def ord_at(self, place: "Poly") -> int:
        """Multiplicity of an irreducible factor."""
        if self.is_zero():
            raise ValueError("order of zero polynomial")
        n, q = 0, self
        while True:
            d, r = divmod(q, place)
            if not r.is_zero():
                return n
            n += 1
            q = d

    def is_squarefree(self) -> bool:
        return gcd(self, self.derivative()).degree == 0


def gcd(a: Poly, b: Poly) -> Poly:
    while not b.is_zero():
        a, b = b, a % b
    return a.monic()


def xgcd(a: Poly, b: Poly):
    """Return (g, s, t) with s*a + t*b = g monic."""
    f = a.field
    r0, r1 = a, b
    s0, s1 = Poly(f, [f.one]), Poly(f, [])
    t0, t1 = Poly(f, []), Poly(f, [f.one])
    while not r1.is_zero():
        q, r = divmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if r0.is_zero():
        return r0, s0, t0
    inv = f.inv(r0.lc)
    return r0.scale(inv), s0.scale(inv), t0.scale(inv)


def lcm(a: Poly, b: Poly) -> Poly:
    return (a * b).exact_div(gcd(a, b)).monic()


def resultant(a: Poly, b: Poly):
    """Resultant via the Euclidean algorithm (raw field value)."""
    f = a.field
    if a.is_zero() or b.is_zero():
        return f.zero
    res = f.one
    while b.degree > 0:
        da, db = a.degree, b.degree
        r = a % b
        if r.is_zero():
            return f.zero
        if (da * db) % 2 == 1:
            res = f.neg(res)
        res = f.mul(res, f.pow(b.lc, da - r.degree))
        a, b = b, r
    return f.mul(res, f.pow(b.lc, a.degree))


# --- factorization over F_p --------------------------------------------------

def squarefree_decomposition(a: Poly) -> list[tuple[Poly, int]]:
    """Monic squarefree factors with multiplicities (prime fields)."""
    f = a.field
    p = f.p
    if a.degree < 1:
        return []
    out: dict[int, Poly] = {}

    def rec(poly: Poly, mult: int):
        poly = poly.monic()
        if poly.degree < 1:
            return
        d = poly.derivative()
        if d.is_zero():
            # poly = g(x^p) = (g')^p in characteristic p
            root = Poly(f, [poly.c[i] for i in range(0, len(poly.c), p)])
            rec(root, mult * p)
            return
        c = gcd(poly, d)
        w = poly.exact_div(c)
        i = 1
        while w.degree > 0:
            y = gcd(w, c)
            z = w.exact_div(y)
            if z.degree > 0:
                prev = out.get(mult * i)
                out[mult * i] = z if prev is None else prev * z
            w = y
            c = c.exact_div(y)
            i += 1
        if c.degree > 0:
            rec(c, mult)

    rec(a, 1)
    return sorted(((v.monic(), k) for k, v in out.items()), key=lambda t: t[1])


def distinct_degree(a: Poly) -> list[tuple[Poly, int]]:
    f = a.field
    p = f.p
    x = Poly.x(f)
    out = []
    h = x
    rest = a.monic()
    d = 0
    while rest.degree >= 2 * (d + 1):
        d += 1
        h = h.powmod(p, rest)
        g = gcd(rest, h - x)
        if g.degree > 0:
            out.append((g, d))
            rest = rest.exact_div(g)
            h = h % rest
    if rest.degree > 0:
        out.append((rest, rest.degree))
    return out


def equal_degree(a: Poly, d: int, rng: RngStream) -> list[Poly]:
    if a.degree == d:
        return [a.monic()]
    f = a.field
    p = f.p
    exp = (p ** d - 1) // 2
    while True:
        r = Poly(f, [rng.randrange(p) for _ in range(a.degree)])
        if r.degree < 1:
            continue
        g = gcd(a, r.powmod(exp, a) - 1)
        if 0 < g.degree < a.degree:
            return equal_degree(g, d, rng) + equal_degree(a.exact_div(g), d, rng)


def factor(a: Poly, rng: RngStream | None = None) -> list[tuple[Poly, int]]:
    """Monic irreducible factors with multiplicity, sorted canonically."""
    if a.field.kind != "prime":
        raise FieldError("factorization is implemented over prime fields")
    if a.is_zero():
        raise ValueError("cannot factor zero")
    rng = rng or RngStream(0, "factor")
    out = []
    for sq, mult in squarefree_decomposition(a):
        for part, d in distinct_degree(sq):
            for irr in equal_degree(part, d, rng):
                out.append((irr, mult))
    out.sort(key=lambda t: (t[0].degree, t[0].c))
    return out


def roots_scan(a: Poly, K: Field) -> dict:
    """Roots in K with multiplicity by exhaustive scan."""
    if a.is_zero():
        raise ValueError("zero polynomial has every root")
    out = {}
    for r in K.elements():
        if a.evaluate(r, K) == K.zero:
            m = 0
            coeffs = a.lifted(K)
            while True:
                # synthetic division by (x - r)
                acc = K.zero
                quo = []
                for v in reversed(coeffs):
                    acc = K.add(K.mul(acc, r), v)
                    quo.append(acc)
                rem = quo.pop()
                if rem != K.zero:
                    break
                m += 1
                coeffs = quo[::-1]
            out[r] = m
    return out


def squarefree_and_roots(a: Poly, K: Field | None = None):
    """(a / gcd(a, a'), {root: multiplicity}) with roots found by scanning K."""
    if a.is_zero():
        raise ValueError("zero polynomial rejected")
    K = K or a.field
    g = gcd(a, a.derivative())
    sqf = a.exact_div(g) if g.degree > 0 else a
    return sqf, roots_scan(a, K)


def poly_sqrt(a: Poly) -> Poly | None:
    """Square root of a polynomial over its coefficient field, or None."""
    f = a.field
    if a.is_zero():
        return a
    if a.degree % 2:
        return None
    r0 = f.sqrt_raw(a.lc)
    if r0 is None:
        return None
    m = a.monic()
    n = m.degree // 2
    rev = list(reversed(m.c))
    s = ps_sqrt(f, rev, n + 1, f.one)
    cand = Poly(f, list(reversed(s)))
    if cand * cand != m:
        return None
    return cand.scale(r0)


# --- rational functions -----------------------------------------------------

class RatFun:
    __slots__ = ("num", "den")

    def __init__(self, num: Poly, den: Poly | None = None, reduce: bool = True):
        f = num.field
        if den is None:
            den = Poly(f, [f.one])
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if reduce and den.degree > 0:
            g = gcd(num, den)
            if g.degree > 0:
                num = num.exact_div(g)
                den = den.exact_div(g)
        if den.lc != f.one:
            inv = f.inv(den.lc)
            num = num.scale(inv)
            den = den.scale(inv)
        self.num = num
        self.den = den

    @property
    def field(self) -> Field:
        return self.num.field

    @classmethod
    def const(cls, field: Field, value) -> "RatFun":
        return cls(Poly.const(field, value))

    @classmethod
    def x(cls, field: Field) -> "RatFun":
        return cls(Poly.x(field))

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_poly(self) -> bool:
        return self.den.degree == 0

    def __eq__(self, other):
        if isinstance(other, RatFun):
            return self.num == other.num and self.den == other.den
        if isinstance(other, (Poly, int)):
            return self == RatFun(self._cp(other))
        return NotImplemented

    def __hash__(self):
        return hash((self.num, self.den))

    def __repr__(self):
        if self.den.degree == 0:
            return f"({self.num})"
        return f"({self.num})/({self.den})"

    def _cp(self, other) -> Poly:
        if isinstance(other, Poly):
            return other
        return Poly.const(self.field, other)

    def _co(self, other) -> "RatFun":
        if isinstance(other, RatFun):
            return other
        return RatFun(self._cp(other))

    def __add__(self, other):
        o = self._co(other)
        if self.den == o.den:
            return RatFun(self.num + o.num, self.den)
        return RatFun(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFun(-self.num, self.den, reduce=False)

    def __sub__(self, other):
        return self + (-self._co(other))

    def __rsub__(self, other):
        return self._co(other) - self

    def __mul__(self, other):
        o = self._co(other)
        if o.den.degree == 0 and self.den.degree == 0:
            return RatFun(self.num * o.num, self.den * o.den, reduce=False)
        return RatFun(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def inverse(self) -> "RatFun":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero rational function")
        return RatFun(self.den, self.num, reduce=False)

    def __truediv__(self, other):
        return self * self._co(other).inverse()

    def __rtruediv__(self, other):
        return self._co(other) * self.inverse()

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        return RatFun(self.num ** e, self.den ** e, reduce=False)

    def derivative(self) -> "RatFun":
        return RatFun(self.num.derivative() * self.den - self.num * self.den.derivative(),
                      self.den * self.den)

    def evaluate(self, a, K: Field | None = None):
        K = K or self.field
        d = self.den.evaluate(a, K)
        if d == K.zero:
            raise ZeroDivisionError("pole at evaluation point")
        return K.div(self.num.evaluate(a, K), d)

    def __call__(self, a, K: Field | None = None):
        if isinstance(a, FieldElement):
            return FieldElement(a.field, self.evaluate(a.v, a.field))
        return self.evaluate(a, K)

    def degree_at_infinity(self) -> int:
        """deg num - deg den (pole order at infinity)."""
        return self.num.degree - self.den.degree

    def in_u(self):
        """Rewrite R(1/u) as (u-power, numerator, denominator) in u."""
        dn, dd = self.num.degree, self.den.degree
        return dd - dn, self.num.reverse(), self.den.reverse()


def is_square_ratfun(h: RatFun, geometric: bool = False) -> RatFun | None:
    """A square root of h in F(x), or None.

    With geometric=True the leading coefficient is ignored, which decides
    squareness over the algebraic closure of the coefficient field; the
    returned root is then of h / lc.
    """
    if h.is_zero():
        raise ValueError("zero rational function")
    num = h.num
    if geometric:
        num = num.monic()
    a = poly_sqrt(num)
    if a is None:
        return None
    b = poly_sqrt(h.den)
    if b is None:
        return None
    return RatFun(a, b)


# --- truncated power series on raw coefficient lists ------------------------

def ps_mul(K: Field, a: list, b: list, n: int) -> list:
    out = [K.zero] * n
    if K.kind == "prime":
        p = K.p
        acc = [0] * n
        for i, ai in enumerate(a[:n]):
            if ai:
                for j in range(min(len(b), n - i)):
                    acc[i + j] += ai * b[j]
        return [v % p for v in acc]
    for i, ai in enumerate(a[:n]):
        if K.is_zero(ai):
            continue
        for j in range(min(len(b), n - i)):
            bj = b[j]
            if not K.is_zero(bj):
                out[i + j] = K.add(out[i + j], K.mul(ai, bj))
    return out


def ps_inv(K: Field, a: list, n: int) -> list:
    if not a or K.is_zero(a[0]):
        raise ZeroDivisionError("series not invertible")
    inv0 = K.inv(a[0])
    out = [inv0]
    for m in range(1, n):
        acc = K.zero
        for j in range(1, min(m, len(a) - 1) + 1):
            acc = K.add(acc, K.mul(a[j], out[m - j]))
        out.append(K.neg(K.mul(acc, inv0)))
    return out


def ps_sqrt(K: Field, a: list, n: int, s0) -> list:
    """Series s with s^2 = a and s(0) = s0 (s0 nonzero, s0^2 = a(0))."""
    if K.is_zero(s0) or K.mul(s0, s0) != (a[0] if a else K.zero):
        raise ValueError("bad initial square root")
    inv2s0 = K.inv(K.add(s0, s0))
    out = [s0]
    for m in range(1, n):
        acc = a[m] if m < len(a) else K.zero
        for j in range(1, m):
            acc = K.sub(acc, K.mul(out[j], out[m - j]))
        out.append(K.mul(acc, inv2s0))
    return out


def ps_pow(K: Field, a: list, e: int, n: int) -> list:
    result = [K.one] + [K.zero] * (n - 1)
    base = list(a[:n])
    while e:
        if e & 1:
            result = ps_mul(K, result, base, n)
        e >>= 1
        if e:
            base = ps_mul(K, base, base, n)
    return result


def ps_compose_poly(K: Field, coeffs: list, s: list, n: int) -> list:
    """Evaluate a polynomial (raw K coefficients) at a power series s."""
    acc = [K.zero] * n
    for v in reversed(coeffs):
        acc = ps_mul(K, acc, s, n)
        acc[0] = K.add(acc[0], v)
    return acc


def ps_deriv(K: Field, a: list) -> list:
    return [K.mul(K.lift(i), a[i]) for i in range(1, len(a))]


def ps_revert_quadratic(K: Field, taylor: list, n: int) -> list:
    """Solve sum_{k>=1} taylor[k] X^k = t^2 for X = O(t^2), n terms."""
    a1 = taylor[1] if len(taylor) > 1 else K.zero
    if K.is_zero(a1):
        raise ValueError("singular point: derivative vanishes")
    inv1 = K.inv(a1)
    X = [K.zero] * n
    for _ in range(n // 2 + 1):
        # X <- (t^2 - sum_{k>=2} a_k X^k) / a_1
        acc = [K.zero] * n
        power = X
        for k in range(2, len(taylor)):
            power = ps_mul(K, power, X, n)
            if not K.is_zero(taylor[k]):
                for i in range(n):
                    acc[i] = K.add(acc[i], K.mul(taylor[k], power[i]))
        new = [K.neg(v) for v in acc]
        if n > 2:
            new[2] = K.add(new[2], K.one)
        X = [K.mul(v, inv1) for v in new]
    return X


class LaurentSeries:
    """Truncated Laurent series sum c_i t^(val+i) + O(t^prec).

    prec is None for exact (finite) series.
    """

    __slots__ = ("field", "val", "coeffs", "prec", "symbol")

    def __init__(self, field: Field, val: int, coeffs, prec: int | None, symbol: str = "t"):
        c = list(coeffs)
        zero = field.zero
        lead = 0
        while lead < len(c) and c[lead] == zero:
            lead += 1
        c = c[lead:]
        val += lead
        if prec is not None:
            keep = max(0, prec - val)
            c = c[:keep]
            if not c:
                val = prec
        else:
            while c and c[-1] == zero:
                c.pop()
            if not c:
                val = 0
        self.field = field
        self.val = val
        self.coeffs = c
        self.prec = prec
        self.symbol = symbol

    @classmethod
    def from_poly_at(cls, poly: Poly, center, K: Field | None = None, symbol: str = "t"):
        """Exact expansion of poly(center + t)."""
        K = K or poly.field
        return cls(K, 0, poly.taylor(center, K), None, symbol)

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def valuation(self) -> int:
        if not self.coeffs:
            if self.prec is None:
                raise ValueError("valuation of exact zero")
            raise ValueError(f"series is zero to order {self.prec}")
        return self.val

    def coefficient(self, e: int):
        if self.prec is not None and e >= self.prec:
            raise ValueError(f"coefficient t^{e} beyond truncation order {self.prec}")
        i = e - self.val
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return self.field.zero

    def _rel(self):
        return None if self.prec is None else self.prec - self.val

    def __add__(self, other: "LaurentSeries"):
        K = self.field
        if self.prec is None:
            prec = other.prec
        elif other.prec is None:
            prec = self.prec
        else:
            prec = min(self.prec, other.prec)
        lo = min(self.val if self.coeffs else other.val, other.val if other.coeffs else self.val)
        hi_s = self.val + len(self.coeffs)
        hi_o = other.val + len(other.coeffs)
        hi = max(hi_s, hi_o)
        if prec is not None:
            hi = min(hi, prec)
        out = [K.zero] * max(0, hi - lo)
        for i, v in enumerate(self.coeffs):
            e = self.val + i - lo
            if 0 <= e < len(out):
                out[e] = K.add(out[e], v)
        for i, v in enumerate(other.coeffs):
            e = other.val + i - lo
            if 0 <= e < len(out):
                out[e] = K.add(out[e], v)
        return LaurentSeries(K, lo, out, prec, self.symbol)

    def __neg__(self):
        K = self.field
        return LaurentSeries(K, self.val, [K.neg(v) for v in self.coeffs], self.prec, self.symbol)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other: "LaurentSeries"):
        K = self.field
        if isinstance(other, (int, FieldElement)):
            c = _raw(K, other)
            return LaurentSeries(K, self.val, [K.mul(v, c) for v in self.coeffs], self.prec, self.symbol)
        r1, r2 = self._rel(), other._rel()
        val = self.val + other.val
        if self.is_zero() and self.prec is None or other.is_zero() and other.prec is None:
            return LaurentSeries(K, 0, [], None, self.symbol)
        if r1 is None and r2 is None:
            n = len(self.coeffs) + len(other.coeffs) - 1
            return LaurentSeries(K, val, ps_mul(K, self.coeffs, other.coeffs, n), None, self.symbol)
        rel = min(r for r in (r1, r2) if r is not None)
        if self.is_zero() or other.is_zero():
            # a truncated zero times anything stays zero to the combined order
            return LaurentSeries(K, val + rel, [], val + rel, self.symbol)
        return LaurentSeries(K, val, ps_mul(K, self.coeffs, other.coeffs, rel), val + rel, self.symbol)

    def inverse(self, terms: int | None = None) -> "LaurentSeries":
        if self.is_zero():
            raise ZeroDivisionError("inverse of a zero series")
        rel = self._rel()
        if rel is None:
            if terms is None:
                raise ValueError("inverse of an exact series needs a term count")
            rel = terms
        return LaurentSeries(self.field, -self.val, ps_inv(self.field, self.coeffs, rel),
                             -self.val + rel, self.symbol)

    def derivative(self) -> "LaurentSeries":
        K = self.field
        out = [K.mul(K.coerce(self.val + i), v) for i, v in enumerate(self.coeffs)]
        prec = None if self.prec is None else self.prec - 1
        return LaurentSeries(K, self.val - 1, out, prec, self.symbol)

    def truncate(self, prec: int) -> "LaurentSeries":
        if self.prec is not None and self.prec < prec:
            prec = self.prec
        return LaurentSeries(self.field, self.val, self.coeffs, prec, self.symbol)

    def compose_into(self, poly: Poly) -> "LaurentSeries":
        """poly(self) via Horner."""
        K = self.field
        acc = LaurentSeries(K, 0, [], None, self.symbol)
        for v in reversed(poly.lifted(K)):
            acc = acc * self + LaurentSeries(K, 0, [v], None, self.symbol)
        return acc

    def __repr__(self):
        return f"LaurentSeries(val={self.val}, coeffs={self.coeffs}, O({self.symbol}^{self.prec}))"


def series_solve_curve(f: Poly, x0, N: int, K: Field | None = None) -> LaurentSeries:
    """Series X(y) = x - x0 with f(x0 + X(y)) = y^2 + O(y^N)."""
    K = K or f.field
    if f.evaluate(x0, K) != K.zero:
        raise ValueError("center is not a root of f")
    taylor = f.taylor(x0, K)
    X = ps_revert_quadratic(K, taylor, N)
    return LaurentSeries(K, 0, X, N, "y")


def _residue_at_zero(num: Poly, den: Poly, K: Field):
    """Residue at 0 of num(t)/den(t) dt with coefficients already in K."""
    m = 0
    dc = list(den.lifted(K))
    while dc and dc[0] == K.zero:
        dc.pop(0)
        m += 1
    if m == 0:
        return K.zero
    inv = ps_inv(K, dc, m)
    nc = num.lifted(K)
    return ps_mul(K, nc, inv, m)[m - 1]


def residue(omega: RatFun, at="inf", chart: LaurentSeries | None = None, K: Field | None = None):
    """Residue of omega(x) dx at a point, returned as a FieldElement.

    at is a raw value of K (finite point) or the string "inf".  With a chart,
    x = chart(t) and the residue is taken in the uniformizer t.
    """
    K = K or (chart.field if chart is not None else omega.field)
    if chart is not None:
        dx = chart.derivative()
        nser = chart.compose_into(omega.num)
        dser = chart.compose_into(omega.den)
        if dser.is_zero():
            raise ValueError("denominator vanishes identically along chart")
        terms = max(2, (chart.prec or 8) - dser.val + 2)
        val = (nser * dser.inverse(terms) * dx)
        if val.prec is not None and val.prec <= -1:
            raise ValueError("chart precision too low for residue")
        return FieldElement(K, val.coefficient(-1))
    if isinstance(at, str):
        if at != "inf":
            raise ValueError(f"unknown point {at!r}")
        shift, rn, rd = omega.in_u()
        # omega(1/u) * (-1/u^2) du = -u^(shift-2) rn/rd du
        e = shift - 2
        num = -rn
        den = rd
        if e >= 0:
            num = num.shift_up(e)
        else:
            den = den.shift_up(-e)
        return FieldElement(K, _residue_at_zero(num, den, K))
    f = omega.field
    ln = Poly(K, omega.num.taylor(at, K))
    ld = Poly(K, omega.den.taylor(at, K))
    return FieldElement(K, _residue_at_zero(ln, ld, K))
