"""Command line front end: suites, curve data and the two worked examples."""
from __future__ import annotations

import json
import sys

import click
from click.core import ParameterSource

from .curve import (INF, CeilingError, CurveError, Limits, branch_and_ramification, cover_maps, genus,
                    random_sigma, sigma_dimension, sigma_from_coeffs)
from .exactfield import GF, RngStream, make_extension
from .families import FAMILIES, ConfigError, build_curves, family_points
from .suites import SCHEMA_VERSION, SUITES, Scenario, run_suite

EXIT_OK, EXIT_VIOLATION, EXIT_CONFIG, EXIT_CEILING = 0, 1, 2, 3

EXAMPLE_SUITES = ("curves", "etale", "theorem")


def _parse_branch(text: str | None):
    if text is None:
        return None
    out = []
    for item in text.split(","):
        item = item.strip()
        if item.lower() in ("inf", "infinity", "oo"):
            out.append(INF)
        else:
            try:
                out.append(int(item))
            except ValueError:
                raise ConfigError(f"branch point {item!r} is neither an integer nor 'inf'") from None
    return out


def _parse_suites(text: str | None) -> tuple:
    if text is None:
        return SUITES
    chosen = tuple(s.strip() for s in text.split(",") if s.strip())
    unknown = [s for s in chosen if s not in SUITES]
    if unknown:
        raise ConfigError(f"unknown suites {unknown}; choose from {list(SUITES)}")
    return chosen


def _int_list(text: str | None):
    if text is None:
        return None
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise ConfigError(f"could not parse integer list {text!r}") from None


SCENARIO_KEYS = {"family": "family", "prime": "prime", "seed": "seed", "trials": "trials",
                 "ext_ceiling": "ext_ceiling", "lambda": "lam", "t": "t", "branch": "branch", "suites": "suites",
                 "enum_degree": "enum_degree", "genericity_draws": "genericity_draws", "s": "coeffs"}

_INT_PARAMS = {"prime", "seed", "trials", "ext_ceiling", "enum_degree", "genericity_draws", "lam", "t"}


def _load_scenario(path: str) -> dict:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read scenario {path}: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError("a scenario file holds one JSON object")
    unknown = sorted(set(data) - set(SCENARIO_KEYS) - {"schema"})
    if unknown:
        raise ConfigError(f"unknown scenario keys {unknown}")
    return data


def _with_scenario(ctx: click.Context, path: str | None) -> dict:
    """Command-line flags override the scenario file, which overrides built-in defaults."""
    params = dict(ctx.params)
    if path is None:
        return params
    for key, value in _load_scenario(path).items():
        name = SCENARIO_KEYS.get(key)
        if name not in params or ctx.get_parameter_source(name) is ParameterSource.COMMANDLINE:
            continue
        if isinstance(value, list):
            value = ",".join(str(v) for v in value)
        elif name in _INT_PARAMS and not (isinstance(value, int) or (value is None and name in ("lam", "t"))):
            raise ConfigError(f"scenario key {key!r} must be an integer, got {value!r}")
        params[name] = value
    if params["family"] not in FAMILIES:
        raise ConfigError(f"unknown family {params['family']!r}")
    return params


def _emit(report: dict, json_path: str | None) -> None:
    text = json.dumps(report, indent=2, sort_keys=False)
    if json_path:
        with open(json_path, "w") as fh:
            fh.write(text + "\n")
        summary = report.get("summary")
        if summary is not None:
            for c in report.get("checks", []):
                click.echo(f"{'PASS' if c['pass'] else 'FAIL'}  [{c['suite']}] {c['name']}")
            click.echo(f"{summary['passed']}/{summary['total']} checks passed; report written to {json_path}")
    else:
        click.echo(text)


def _guarded(fn):
    """Map library errors to exit codes."""
    try:
        return fn()
    except ConfigError as exc:
        click.echo(f"configuration error: {exc}", err=True)
        return EXIT_CONFIG
    except CeilingError as exc:
        click.echo(f"resource ceiling hit: {exc}", err=True)
        return EXIT_CEILING
    except CurveError as exc:
        click.echo(f"configuration error: {exc}", err=True)
        return EXIT_CONFIG


def _status(report: dict) -> int:
    return EXIT_OK if report["summary"]["failed"] == 0 else EXIT_VIOLATION


# --- curve info ----------------------------------------------------------------------------

def _spectral_json(sc) -> dict:
    out = {"equation": sc.equation(), "smooth": sc.smooth, "integral": sc.integral,
           "genus_formula": sc.genus_formula, "notes": list(sc.notes)}
    if sc.ok:
        out["genus"] = genus(sc)
    return out


def _point_counts(C, max_degree: int = 2) -> dict:
    counts = {}
    base = GF(C.p)
    for k in range(1, max_degree + 1):
        if C.p ** k > Limits.ext_ceiling:
            break
        K = base if k == 1 else make_extension(base, k)
        counts[str(k)] = C.count_points(K)
    return counts


def curve_info(kind: str, p: int, coeffs=None, seed: int = 0, lam=None, t=None, branch=None) -> dict:
    """Equations, certificates, genera, ramification and point counts for one section s."""
    F = GF(p)
    B, T = family_points(kind, p, lam, t, branch)
    D = B + T
    if coeffs is None:
        s = random_sigma(F, D, RngStream(seed, f"curve-info/{kind}/{p}"))
    else:
        if len(coeffs) != sigma_dimension(len(D)):
            raise ConfigError(f"expected {sigma_dimension(len(D))} coefficients of s, got {len(coeffs)}")
        s = sigma_from_coeffs(F, D, coeffs)
    Xs, Y, pi, r, Yr = build_curves(kind, p, s, B, T)
    Bdiv, R = branch_and_ramification(pi)
    out = {"schema": SCHEMA_VERSION, "family": kind, "prime": p,
           "marked_points": [str(d) for d in D], "s": list(s.coeffs),
           "X_s": _spectral_json(Xs),
           "Y": {"equation": f"y^2 = {Y.polys[0]}", "genus": Y.genus,
                 "branch_divisor": Bdiv.to_json(), "ramification_divisor": R.to_json()},
           "Y_r": _spectral_json(Yr),
           "certificates": {"X_s": Xs.ok, "Y_r": Yr.ok}}
    h = s.h()
    extra = [int(c) for c in h.monic().c] if h.degree > 0 else []
    out["extra_branch_numerator"] = {"monic_coefficients": extra, "degree": max(h.degree, 0)}
    if Xs.ok and Yr.ok:
        maps = cover_maps(Y, Xs.curve, Yr.curve)
        out["point_counts"] = {"X_s": _point_counts(Xs.curve), "Y": _point_counts(Y),
                               "Y_r": _point_counts(Yr.curve)}
        xi = maps["xi"]
        out["xi_degree"] = xi.degree
    return out


# --- commands ------------------------------------------------------------------------------

def _scenario_options(fn):
    opts = [
        click.option("--prime", type=int, default=101, show_default=True, help="Odd prime p."),
        click.option("--seed", type=int, default=42, show_default=True),
        click.option("--family", type=click.Choice(FAMILIES), default="p1-five", show_default=True),
        click.option("--lambda", "lam", type=int, default=None, help="Fourth branch point of the elliptic family."),
        click.option("--t", "t", type=int, default=None, help="Extra parabolic point of the elliptic family."),
        click.option("--branch", default=None, help="Six branch points a,b,c,d,e,f (integers or inf)."),
        click.option("--ext-ceiling", type=int, default=10 ** 7, show_default=True,
                     help="Largest field size q^k scanned exhaustively."),
        click.option("--json", "json_path", type=click.Path(dir_okay=False), default=None,
                     help="Write the report here instead of stdout."),
        click.option("--scenario", "scenario_path", type=click.Path(dir_okay=False), default=None,
                     help="JSON scenario file; explicit flags take precedence."),
    ]
    for opt in reversed(opts):
        fn = opt(fn)
    return fn


@click.group()
def main():
    """Exact checks of spectral-cover constructions for rank-2 parabolic Higgs fields."""


@main.command()
@_scenario_options
@click.option("--trials", type=int, default=20, show_default=True, help="Trials per randomized suite.")
@click.option("--suites", default=None, help=f"Comma-separated subset of {','.join(SUITES)}.")
@click.option("--enum-degree", type=int, default=2, show_default=True,
              help="Largest place degree in the exhaustive unramifiedness scan.")
@click.option("--genericity-draws", type=int, default=200, show_default=True)
@click.pass_context
def suite(ctx, scenario_path, **_):
    """Run property suites and emit a JSON report."""
    def go():
        o = _with_scenario(ctx, scenario_path)
        if o["trials"] < 1 or o["ext_ceiling"] < o["prime"]:
            raise ConfigError("trials must be positive and the ceiling at least p")
        scn = Scenario(family=o["family"], prime=o["prime"], seed=o["seed"], trials=o["trials"],
                       ext_ceiling=o["ext_ceiling"], lam=o["lam"], t=o["t"], branch=_parse_branch(o["branch"]),
                       suites=_parse_suites(o["suites"]), enum_degree=o["enum_degree"],
                       genericity_draws=o["genericity_draws"])
        family_points(scn.family, scn.prime, scn.lam, scn.t, scn.branch)
        report = run_suite(scn)
        _emit(report, o["json_path"])
        return _status(report)
    sys.exit(_guarded(go))


@main.command("curve-info")
@_scenario_options
@click.option("--s", "coeffs", default=None, help="Coefficients of the Hitchin numerator, comma separated.")
@click.pass_context
def curve_info_cmd(ctx, scenario_path, **_):
    """Print spectral curve data for one section s (random from the seed if not given)."""
    def go():
        o = _with_scenario(ctx, scenario_path)
        Limits.ext_ceiling = o["ext_ceiling"]
        info = curve_info(o["family"], o["prime"], _int_list(o["coeffs"]), o["seed"], o["lam"], o["t"],
                          _parse_branch(o["branch"]))
        _emit(info, o["json_path"])
        return EXIT_OK
    sys.exit(_guarded(go))


@main.command()
@click.argument("which", type=click.Choice(FAMILIES))
@click.option("--prime", type=int, default=101, show_default=True)
@click.option("--seed", type=int, default=42, show_default=True)
@click.option("--trials", type=int, default=10, show_default=True)
@click.option("--ext-ceiling", type=int, default=10 ** 7, show_default=True)
@click.option("--lambda", "lam", type=int, default=None)
@click.option("--t", "t", type=int, default=None)
@click.option("--branch", default=None)
@click.option("--enum-degree", type=int, default=1, show_default=True)
@click.option("--json", "json_path", type=click.Path(dir_okay=False), default=None)
def example(which, prime, seed, trials, ext_ceiling, lam, t, branch, enum_degree, json_path):
    """Worked example pipeline: curve data, cover checks and the transformation theorem."""
    def go():
        scn = Scenario(family=which, prime=prime, seed=seed, trials=trials, ext_ceiling=ext_ceiling,
                       lam=lam, t=t, branch=_parse_branch(branch), suites=EXAMPLE_SUITES,
                       enum_degree=enum_degree, genericity_draws=50)
        report = run_suite(scn)
        Limits.ext_ceiling = ext_ceiling
        coeffs = report["checks"][0]["witness"]["s"]
        report["curve_info"] = curve_info(which, prime, coeffs, seed, lam, t, scn.branch)
        _emit(report, json_path)
        return _status(report)
    sys.exit(_guarded(go))


if __name__ == "__main__":
    main()
