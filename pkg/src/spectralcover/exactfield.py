"""Exact coefficient fields: prime fields F_p (p odd), extensions F_{p^k}, and Q.

Each field exposes "raw" arithmetic on canonical representatives (int for
F_p, k-tuple of ints for F_{p^k}, Fraction for Q).  Polynomials, series and
linear algebra work on raw values for speed; FieldElement wraps a raw value
for the user-facing API.
"""
from __future__ import annotations

import hashlib
import math
import random
from fractions import Fraction
from typing import Iterator

from . import linalg


class FieldError(ValueError):
    pass


_NONRESIDUES: dict = {}


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    small = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
    for q in small:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in small:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _prime_divisors(n: int) -> list[int]:
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


# --- dense polynomials over F_p as int lists (low degree first) -------------

def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmod(a: list[int], m: list[int], p: int) -> list[int]:
    a = _trim([c % p for c in a])
    dm = len(m) - 1
    inv = pow(m[-1], p - 2, p)
    while len(a) - 1 >= dm:
        c = a[-1] * inv % p
        shift = len(a) - 1 - dm
        for i, mi in enumerate(m):
            a[shift + i] = (a[shift + i] - c * mi) % p
        _trim(a)
    return a


def _pmulmod(a: list[int], b: list[int], m: list[int], p: int) -> list[int]:
    if not a or not b:
        return []
    prod = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                prod[i + j] += ai * bj
    return _pmod(prod, m, p)


def _ppowmod(a: list[int], e: int, m: list[int], p: int) -> list[int]:
    result = [1]
    base = _pmod(list(a), m, p)
    while e:
        if e & 1:
            result = _pmulmod(result, base, m, p)
        base = _pmulmod(base, base, m, p)
        e >>= 1
    return result


def _pgcd(a: list[int], b: list[int], p: int) -> list[int]:
    a = _trim([c % p for c in a])
    b = _trim([c % p for c in b])
    while b:
        a, b = b, _pmod(a, b, p)
    if a:
        inv = pow(a[-1], p - 2, p)
        a = [c * inv % p for c in a]
    return a


def _psub(a: list[int], b: list[int], p: int) -> list[int]:
    n = max(len(a), len(b))
    out = [((a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0)) % p for i in range(n)]
    return _trim(out)


def is_irreducible_mod_p(coeffs: list[int], p: int) -> bool:
    """Rabin's test for a monic polynomial over F_p."""
    m = _trim([c % p for c in coeffs])
    k = len(m) - 1
    if k < 1:
        return False
    if k == 1:
        return True
    x = [0, 1]
    if _psub(_ppowmod(x, p ** k, m, p), x, p):
        return False
    for r in _prime_divisors(k):
        h = _psub(_ppowmod(x, p ** (k // r), m, p), x, p)
        if len(_pgcd(m, h, p)) > 1:
            return False
    return True


# --- fields -----------------------------------------------------------------

class Field:
    kind: str
    p: int
    k: int
    modulus: tuple[int, ...] | None
    zero: object
    one: object

    @property
    def order(self) -> int | None:
        return None if self.p == 0 else self.p ** self.k

    @property
    def is_finite(self) -> bool:
        return self.p != 0

    def __call__(self, value) -> "FieldElement":
        if isinstance(value, FieldElement):
            if value.field is self:
                return value
            if value.field.p == self.p and value.field.k == 1:
                return FieldElement(self, self.lift(value.v))
            raise FieldError("cannot coerce between these fields")
        return FieldElement(self, self.coerce(value))

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def pow(self, a, e: int):
        if e < 0:
            a, e = self.inv(a), -e
        result = self.one
        while e:
            if e & 1:
                result = self.mul(result, a)
            a = self.mul(a, a)
            e >>= 1
        return result

    def is_zero(self, a) -> bool:
        return a == self.zero

    def square(self, a):
        return self.mul(a, a)

    def gen(self):
        """Raw value of the modulus root (x) for extensions, 1 otherwise."""
        return self.one

    def element(self, raw) -> "FieldElement":
        return FieldElement(self, raw)

    # finite-field services ------------------------------------------------

    def frobenius(self, a):
        return self.pow(a, self.p)

    def is_square(self, a) -> bool:
        if self.is_zero(a):
            return True
        return self.pow(a, (self.order - 1) // 2) == self.one

    def _nonresidue(self):
        cached = getattr(self, "_nonres", None)
        if cached is None:
            cached = _NONRESIDUES.get(self.key)
        if cached is None:
            # every element of F_p is a square in an even-degree extension
            n = self.p if self.k > 1 else 2
            while True:
                cand = self.decode(n % self.order)
                if not self.is_zero(cand) and not self.is_square(cand):
                    break
                n += 1
            cached = cand
            _NONRESIDUES[self.key] = cached
        self._nonres = cached
        return cached

    def sqrt_raw(self, a):
        """Square root with the smaller encoding, or None."""
        if self.is_zero(a):
            return self.zero
        q = self.order
        if not self.is_square(a):
            return None
        if q % 4 == 3:
            r = self.pow(a, (q + 1) // 4)
        else:
            s, e = q - 1, 0
            while s % 2 == 0:
                s //= 2
                e += 1
            z = self.pow(self._nonresidue(), s)
            x = self.pow(a, (s + 1) // 2)
            b = self.pow(a, s)
            while b != self.one:
                m, t = 0, b
                while t != self.one:
                    t = self.mul(t, t)
                    m += 1
                g = z
                for _ in range(e - m - 1):
                    g = self.mul(g, g)
                x = self.mul(x, g)
                z = self.mul(g, g)
                b = self.mul(b, z)
                e = m
            r = x
        other = self.neg(r)
        return r if self.encode(r) <= self.encode(other) else other

    def elements(self) -> Iterator:
        for n in range(self.order):
            yield self.decode(n)

    def random_raw(self, rng: random.Random):
        return self.decode(rng.randrange(self.order))

    # linear algebra over the prime field -----------------------------------

    def to_vector(self, a) -> list[int]:
        raise NotImplementedError

    def from_vector(self, v) -> object:
        raise NotImplementedError

    def minpoly(self, a) -> list[int]:
        """Minimal polynomial of a over F_p (monic, low degree first)."""
        cache = self.__dict__.setdefault("_minpolys", {})
        hit = cache.get(a)
        if hit is not None:
            return list(hit)
        cols = [self.to_vector(self.one)]
        cur = self.one
        for _ in range(self.k):
            cur = self.mul(cur, a)
            cols.append(self.to_vector(cur))
        rows = [[cols[j][i] for j in range(self.k + 1)] for i in range(self.k)]
        red, pivots = linalg.rref(rows, self.k + 1, self.p)
        d = next(j for j in range(self.k + 1) if j >= len(pivots) or pivots[j] != j)
        out = [int(-red[i, d]) % self.p for i in range(d)] + [1]
        if len(cache) < 100_000:
            cache[a] = tuple(out)
        return out

    def power_basis_coords(self, theta, d: int, values) -> list[list[int]]:
        """Write each value as a polynomial of degree < d in theta."""
        powers = [self.to_vector(self.one)]
        cur = self.one
        for _ in range(1, d):
            cur = self.mul(cur, theta)
            powers.append(self.to_vector(cur))
        rows = [[powers[j][i] for j in range(d)] for i in range(self.k)]
        out = []
        for v in values:
            sol = linalg.solve(rows, self.to_vector(v), d, self.p)
            if sol is None:
                raise FieldError("value outside the subfield generated by theta")
            out.append(sol)
        return out


class PrimeField(Field):
    kind = "prime"

    def __init__(self, p: int):
        if p == 2:
            raise FieldError("characteristic 2 is not supported")
        if not is_prime(p):
            raise FieldError(f"{p} is not prime")
        self.p = p
        self.k = 1
        self.modulus = None
        self.zero = 0
        self.one = 1

    def __repr__(self):
        return f"GF({self.p})"

    @property
    def key(self):
        return ("F", self.p)

    def coerce(self, value) -> int:
        if isinstance(value, Fraction):
            return value.numerator * pow(value.denominator, -1, self.p) % self.p
        return int(value) % self.p

    def lift(self, c: int) -> int:
        return c % self.p

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def neg(self, a):
        return -a % self.p

    def mul(self, a, b):
        return a * b % self.p

    def inv(self, a):
        if a % self.p == 0:
            raise ZeroDivisionError("inverse of zero")
        return pow(a, self.p - 2, self.p)

    def div(self, a, b):
        return a * self.inv(b) % self.p

    def pow(self, a, e: int):
        if e < 0:
            return pow(self.inv(a), -e, self.p)
        return pow(a, e, self.p)

    def is_zero(self, a) -> bool:
        return a == 0

    def encode(self, a) -> int:
        return a

    def decode(self, n: int) -> int:
        return n % self.p

    def frobenius(self, a):
        return a

    def is_square(self, a) -> bool:
        return a == 0 or pow(a, (self.p - 1) // 2, self.p) == 1

    def to_vector(self, a):
        return [a]

    def from_vector(self, v):
        return v[0] % self.p

    def minpoly(self, a):
        return [(-a) % self.p, 1]

    def rand(self, rng: random.Random) -> int:
        return rng.randrange(self.p)


class ExtField(Field):
    """F_p[x]/(modulus) for a monic irreducible modulus of degree k >= 2."""

    kind = "extension"

    def __init__(self, p: int, modulus, check: bool = True):
        if p == 2:
            raise FieldError("characteristic 2 is not supported")
        mod = tuple(c % p for c in modulus)
        if mod[-1] != 1:
            raise FieldError("modulus must be monic")
        k = len(mod) - 1
        if k < 2:
            raise FieldError("use PrimeField for degree 1")
        if check and not is_irreducible_mod_p(list(mod), p):
            raise FieldError("modulus is reducible")
        self.p = p
        self.k = k
        self.modulus = mod
        self.zero = (0,) * k
        self.one = (1,) + (0,) * (k - 1)
        # x^j mod modulus for j = k .. 2k-2
        table = []
        cur = [(-c) % p for c in mod[:k]]
        for _ in range(k - 1):
            table.append(tuple(cur))
            top = cur[-1]
            cur = [0] + cur[:-1]
            if top:
                cur = [(cur[i] - top * mod[i]) % p for i in range(k)]
        table.append(tuple(cur))
        self._red = table

    def __repr__(self):
        return f"GF({self.p}^{self.k})"

    @property
    def key(self):
        return ("E", self.p, self.modulus)

    def gen(self):
        return (0, 1) + (0,) * (self.k - 2)

    def coerce(self, value):
        if isinstance(value, (tuple, list)):
            v = [int(c) % self.p for c in value]
            if len(v) > self.k:
                v = _pmod(v, list(self.modulus), self.p)
            return tuple(v) + (0,) * (self.k - len(v))
        if isinstance(value, Fraction):
            value = value.numerator * pow(value.denominator, -1, self.p)
        return self.lift(int(value))

    def lift(self, c: int):
        return (c % self.p,) + (0,) * (self.k - 1)

    def add(self, a, b):
        p = self.p
        return tuple((x + y) % p for x, y in zip(a, b))

    def sub(self, a, b):
        p = self.p
        return tuple((x - y) % p for x, y in zip(a, b))

    def neg(self, a):
        p = self.p
        return tuple(-x % p for x in a)

    def scale(self, a, c: int):
        p = self.p
        return tuple(x * c % p for x in a)

    def mul(self, a, b):
        p, k = self.p, self.k
        prod = [0] * (2 * k - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    if bj:
                        prod[i + j] += ai * bj
        out = prod[:k]
        for j in range(k, 2 * k - 1):
            c = prod[j] % p
            if c:
                row = self._red[j - k]
                for i in range(k):
                    out[i] += c * row[i]
        return tuple(x % p for x in out)

    def inv(self, a):
        if not any(a):
            raise ZeroDivisionError("inverse of zero")
        p = self.p
        r0, r1 = list(self.modulus), _trim(list(a))
        s0, s1 = [], [1]
        while r1:
            inv_lead = pow(r1[-1], p - 2, p)
            q = [0] * max(0, len(r0) - len(r1) + 1)
            r = list(r0)
            while len(r) >= len(r1) and r:
                c = r[-1] * inv_lead % p
                shift = len(r) - len(r1)
                q[shift] = c
                for i, v in enumerate(r1):
                    r[shift + i] = (r[shift + i] - c * v) % p
                _trim(r)
            qs1 = [0] * (len(q) + len(s1)) if q and s1 else []
            for i, qi in enumerate(q):
                for j, sj in enumerate(s1):
                    qs1[i + j] += qi * sj
            s_new = _psub(s0, qs1, p)
            r0, r1 = r1, r
            s0, s1 = s1, s_new
        c = pow(r0[0], p - 2, p)
        res = [x * c % p for x in s0]
        res = _pmod(res, list(self.modulus), p)
        return tuple(res) + (0,) * (self.k - len(res))

    def is_zero(self, a) -> bool:
        return not any(a)

    def encode(self, a) -> int:
        n = 0
        for c in reversed(a):
            n = n * self.p + c
        return n

    def decode(self, n: int):
        out = []
        for _ in range(self.k):
            n, r = divmod(n, self.p)
            out.append(r)
        return tuple(out)

    def to_vector(self, a):
        return list(a)

    def from_vector(self, v):
        return tuple(int(c) % self.p for c in v)

    def rand(self, rng: random.Random):
        return tuple(rng.randrange(self.p) for _ in range(self.k))


class RationalField(Field):
    kind = "rational"

    def __init__(self):
        self.p = 0
        self.k = 1
        self.modulus = None
        self.zero = Fraction(0)
        self.one = Fraction(1)

    def __repr__(self):
        return "QQ"

    @property
    def key(self):
        return ("Q",)

    def coerce(self, value):
        return Fraction(value)

    def lift(self, c):
        return Fraction(c)

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def neg(self, a):
        return -a

    def mul(self, a, b):
        return a * b

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return 1 / a

    def is_square(self, a) -> bool:
        return self.sqrt_raw(a) is not None

    def sqrt_raw(self, a):
        if a < 0:
            return None
        n, d = a.numerator, a.denominator
        rn, rd = math.isqrt(n), math.isqrt(d)
        if rn * rn == n and rd * rd == d:
            return Fraction(rn, rd)
        return None

    def encode(self, a):
        raise FieldError("Q has no finite encoding")


_PRIME_CACHE: dict[int, PrimeField] = {}
_EXT_CACHE: dict[tuple, ExtField] = {}
_CANON_CACHE: dict[tuple[int, int], Field] = {}
QQ = RationalField()


def GF(p: int) -> PrimeField:
    field = _PRIME_CACHE.get(p)
    if field is None:
        field = PrimeField(p)
        _PRIME_CACHE[p] = field
    return field


def ext_field(p: int, modulus) -> Field:
    """Field F_p[x]/(modulus); degree one moduli give the prime field."""
    mod = tuple(int(c) % p for c in modulus)
    if len(mod) == 2:
        return GF(p)
    field = _EXT_CACHE.get((p, mod))
    if field is None:
        field = ExtField(p, mod)
        _EXT_CACHE[(p, mod)] = field
    return field


def make_extension(base: Field, k: int) -> Field:
    """F_{p^k} with the first irreducible monic modulus in scan order.

    Candidates x^k + c_{k-1}x^{k-1} + ... + c_0 are scanned by the integer
    sum c_i p^i, so the lexicographically smallest coefficient vector
    (c_{k-1}, ..., c_0) wins.
    """
    if base.kind != "prime":
        raise FieldError("extensions are built over a prime field")
    if k < 1:
        raise FieldError("extension degree must be positive")
    if k == 1:
        return base
    p = base.p
    cached = _CANON_CACHE.get((p, k))
    if cached is not None:
        return cached
    n = 0
    while True:
        low = []
        m = n
        for _ in range(k):
            m, r = divmod(m, p)
            low.append(r)
        coeffs = low + [1]
        if low[0] != 0 and is_irreducible_mod_p(coeffs, p):
            break
        n += 1
    field = _EXT_CACHE.get((p, tuple(coeffs)))
    if field is None:
        field = ExtField(p, coeffs, check=False)
        _EXT_CACHE[(p, tuple(coeffs))] = field
    _CANON_CACHE[(p, k)] = field
    return field


class FieldElement:
    __slots__ = ("field", "v")

    def __init__(self, field: Field, v):
        self.field = field
        self.v = v

    def _other(self, other):
        if isinstance(other, FieldElement):
            if other.field is not self.field:
                return self.field(other).v
            return other.v
        return self.field.coerce(other)

    def __add__(self, other):
        return FieldElement(self.field, self.field.add(self.v, self._other(other)))

    __radd__ = __add__

    def __sub__(self, other):
        return FieldElement(self.field, self.field.sub(self.v, self._other(other)))

    def __rsub__(self, other):
        return FieldElement(self.field, self.field.sub(self._other(other), self.v))

    def __mul__(self, other):
        return FieldElement(self.field, self.field.mul(self.v, self._other(other)))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return FieldElement(self.field, self.field.div(self.v, self._other(other)))

    def __rtruediv__(self, other):
        return FieldElement(self.field, self.field.div(self._other(other), self.v))

    def __neg__(self):
        return FieldElement(self.field, self.field.neg(self.v))

    def __pow__(self, e: int):
        return FieldElement(self.field, self.field.pow(self.v, e))

    def inverse(self):
        return FieldElement(self.field, self.field.inv(self.v))

    def is_zero(self) -> bool:
        return self.field.is_zero(self.v)

    def __bool__(self):
        return not self.is_zero()

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.field.key == other.field.key and self.v == other.v
        if isinstance(other, (int, Fraction)):
            return self.v == self.field.coerce(other)
        return NotImplemented

    def __hash__(self):
        return hash((self.field.key, self.v))

    def __int__(self):
        if self.field.kind != "prime":
            raise TypeError("only prime-field elements convert to int")
        return self.v

    def encode(self) -> int:
        return self.field.encode(self.v)

    def __repr__(self):
        return f"{self.v!r}@{self.field!r}"


def sqrt(a: FieldElement) -> FieldElement | None:
    """Square root of a (the one with smaller encoding), or None."""
    r = a.field.sqrt_raw(a.v)
    return None if r is None else FieldElement(a.field, r)


class RngStream:
    """Deterministic random stream keyed by (seed, label)."""

    def __init__(self, seed: int, label: str):
        self.seed = int(seed)
        self.label = label
        digest = hashlib.sha256(f"{self.seed}:{label}".encode()).digest()
        self._rng = random.Random(int.from_bytes(digest[:16], "big"))

    def split(self, sublabel: str) -> "RngStream":
        return RngStream(self.seed, f"{self.label}/{sublabel}")

    def randrange(self, *args) -> int:
        return self._rng.randrange(*args)

    def choice(self, seq):
        return seq[self._rng.randrange(len(seq))]

    def sample(self, seq, k: int):
        return self._rng.sample(list(seq), k)

    def shuffle(self, seq) -> None:
        self._rng.shuffle(seq)

    def element(self, field: Field) -> FieldElement:
        return FieldElement(field, field.random_raw(self._rng))

    def raw(self, field: Field):
        return field.random_raw(self._rng)

    @property
    def random(self) -> random.Random:
        return self._rng


def rng_stream(seed: int, label: str) -> RngStream:
    return RngStream(seed, label)
