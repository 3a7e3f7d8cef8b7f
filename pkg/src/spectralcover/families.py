"""The two worked families: P^1 with five marked points over an elliptic cover,
and P^1 with six marked points over a genus-2 cover."""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field

from .bnr import SpectralSide, side_over_cover, side_over_line
from .curve import (INF, CoverMap, Curve, CurveError, SigmaSection, SpectralCurve, _normalize_points,
                    branch_and_ramification, cover_maps, hyperelliptic_cover, line_point, pullback_sigma,
                    random_sigma, sigma_from_coeffs, spectral_over_cover, spectral_over_line)
from .divisor import Divisor, canonical_divisor, linear_equiv, pullback_divisor, two_torsion_class
from .exactfield import GF, RngStream
from .polyfun import factor

FAMILIES = ("p1-five", "p1-six")


class ConfigError(ValueError):
    """Invalid scenario parameters (exit status 2 at the command line)."""


@dataclass
class Family:
    kind: str
    p: int
    branch: list
    T: list
    D: list
    s: SigmaSection
    Xs: SpectralCurve
    Y: Curve
    r: SigmaSection
    Yr: SpectralCurve
    maps: dict
    x_side: SpectralSide
    y_side: SpectralSide
    B: Divisor
    R: Divisor
    L0: Divisor
    N: Divisor
    eps: Divisor
    eps_checks: dict
    draws: int = 1
    notes: list = dc_field(default_factory=list)

    @property
    def X(self) -> Curve:
        return self.Xs.curve

    @property
    def Z(self) -> Curve:
        return self.Yr.curve

    @property
    def n_frak(self) -> int:
        """Degree of the line bundles on X_s matching deg E = 0."""
        return self.Xs.twist_degree

    @property
    def n_frak_cover(self) -> int:
        """Degree of the transformed classes on Y_r before the twist."""
        return 2 * len(self.T) - len(self.branch) + 2 * self.Y.genus - 2

    def rho(self) -> list:
        """Branch points of q_s outside D (roots of the Hitchin numerator)."""
        h = self.s.h()
        return sorted([list(f.c) for f, _ in factor(h)]) if h.degree > 0 else []


def validate_points(p: int, pts) -> list:
    F = GF(p)
    try:
        norm = _normalize_points(F, pts)
    except CurveError as exc:
        raise ConfigError(f"branch-point collision modulo {p}: {pts} ({exc})") from None
    if len(set(map(str, norm))) != len(norm):
        raise ConfigError(f"branch-point collision modulo {p}: {pts}")
    return norm


def _check_prime(p: int) -> None:
    from .exactfield import is_prime
    if p == 2:
        raise ConfigError("characteristic 2 is not supported")
    if not is_prime(p):
        raise ConfigError(f"{p} is not prime")


def family_points(kind: str, p: int, lam=None, t=None, branch=None):
    """(branch points, T) for a family, validated."""
    _check_prime(p)
    if kind == "p1-five":
        lam = 3 if lam is None else lam
        t = 5 if t is None else t
        B = [0, 1, lam % p, INF]
        pts = validate_points(p, B + [t % p])
        return pts[:4], pts[4:]
    if kind == "p1-six":
        branch = list(range(6)) if branch is None else list(branch)
        if len(branch) != 6:
            raise ConfigError("the genus-2 family needs six branch points")
        pts = validate_points(p, [b if b == INF else b % p for b in branch])
        return pts, []
    raise ConfigError(f"unknown family {kind!r}; choose from {FAMILIES}")


def build_curves(kind: str, p: int, s: SigmaSection, branch, T):
    F = GF(p)
    Xs = spectral_over_line(F, s)
    Y, pi = hyperelliptic_cover(F, branch)
    r = pullback_sigma(pi, s, T)
    Yr = spectral_over_cover(Y, r)
    return Xs, Y, pi, r, Yr


def build_family(kind: str, p: int, rng: RngStream, lam=None, t=None, branch=None,
                 coeffs=None, max_draws: int = 200) -> Family:
    """Draw s until both spectral curves are smooth and integral (or use coeffs)."""
    F = GF(p)
    branch, T = family_points(kind, p, lam, t, branch)
    D = branch + T
    draws = 0
    while True:
        draws += 1
        s = sigma_from_coeffs(F, D, coeffs) if coeffs is not None else random_sigma(F, D, rng)
        Xs, Y, pi, r, Yr = build_curves(kind, p, s, branch, T)
        if Xs.ok and Yr.ok:
            break
        if coeffs is not None:
            raise ConfigError(f"s = {list(coeffs)} gives a singular or reducible spectral curve: "
                              f"{Xs.notes + Yr.notes}")
        if draws >= max_draws:
            raise CurveError(f"no smooth integral spectral pair in {max_draws} draws")
    X, Z = Xs.curve, Yr.curve
    maps = cover_maps(Y, X, Z)
    x_side = side_over_line(Xs)
    y_side = side_over_cover(Yr, maps["q_r"], D)
    Bdiv, R = branch_and_ramification(maps["pi"])
    if kind == "p1-five":
        w_inf = [q for q in R.support() if q.chart == "inf"]
        L0 = Divisor.point(w_inf[0], 2)
    else:
        L0 = Divisor.point(R.support()[0], 3)
    if not linear_equiv(L0 * 2, R)[0]:
        raise AssertionError("the chosen L0 is not a square root of O(R)")
    Tdiv = Divisor(maps["pi"].target, {line_point(F, x): 1 for x in T})
    N = canonical_divisor(Y) + pullback_divisor(maps["pi"], Tdiv)
    eps, checks = two_torsion_class(maps["xi"], Y.polys[0])
    return Family(kind, p, branch, T, D, s, Xs, Y, r, Yr, maps, x_side, y_side, Bdiv, R, L0, N, eps,
                  checks, draws)
