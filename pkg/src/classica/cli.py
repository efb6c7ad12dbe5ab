"""``classica`` command-line front end.

Every command writes JSON (or a table, for the check-running commands
without ``--json``) to standard output.  Floats are printed with 17
significant digits and exact rationals as ``"p/q"``, so identical inputs
give byte-identical output.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import re
import sys
from fractions import Fraction

import numpy as np

from . import first_order as fo
from . import hypergeom as hg
from . import linear_const as lc
from . import phase_plane as pp
from . import second_order as so
from . import verifier as vf
from .demo import run_demo
from .newton import SeriesIVP, cross_validate_rk4, solve_series_ivp
from .series import BivariatePolynomial, default_order, is_exact, parse_scalar, scalar_to_json


class PolySpecError(ValueError):
    """Malformed polynomial text; ``position`` is the 0-based character offset."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


# -- parsing -------------------------------------------------------------------

def _maybe_file(text: str) -> str:
    if os.path.isfile(text):
        with open(text, encoding="utf-8") as fh:
            return fh.read()
    return text


def parse_poly_spec(text: str):
    """Univariate ``"2,-3,1"`` (ascending) or a bivariate JSON term list.

    ``text`` may also name a file holding either form.
    """
    text = _maybe_file(text).strip()
    if text.startswith("[") or text.startswith("{"):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise PolySpecError(f"invalid JSON: {exc.msg}", exc.pos) from exc
        if isinstance(data, dict) and "terms" in data:
            data = data["terms"]
        if not isinstance(data, list):
            raise PolySpecError("expected a list of {i, j, c} terms", 0)
        try:
            return BivariatePolynomial.from_json(data)
        except (KeyError, TypeError, ValueError) as exc:
            raise PolySpecError(f"bad term ({exc})", 0) from exc
    return parse_number_list(text)


def parse_number_list(text: str) -> list:
    if not text.strip():
        raise PolySpecError("empty coefficient list", 0)
    out, pos = [], 0
    for field in text.split(","):
        token = field.strip()
        if not token:
            raise PolySpecError("empty coefficient", pos)
        try:
            out.append(parse_scalar(token))
        except (ValueError, ZeroDivisionError) as exc:
            raise PolySpecError(f"cannot parse {token!r}", pos) from exc
        pos += len(field) + 1
    return out


def parse_params(text: str | None) -> dict:
    """``"a=1,b=2"`` -> ``{"a": 1.0, "b": 2.0}``."""
    if not text:
        return {}
    out = {}
    for item in text.split(","):
        if "=" not in item:
            raise ValueError(f"parameter {item!r} is not of the form name=value")
        k, v = item.split("=", 1)
        out[k.strip()] = float(parse_scalar(v))
    return out


def parse_grid(text: str) -> list:
    a, b, n = text.split(",")
    a, b, n = parse_scalar(a), parse_scalar(b), int(n)
    if n < 2:
        raise ValueError("grid needs at least two points")
    if is_exact(a) and is_exact(b):
        return [a + (b - a) * Fraction(k, n - 1) for k in range(n)]
    a, b = float(a), float(b)
    return [a + (b - a) * k / (n - 1) for k in range(n)]


def _load_json(text: str):
    return json.loads(_maybe_file(text))


# -- output --------------------------------------------------------------------

def _plain(obj):
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, Fraction):
        return scalar_to_json(obj)
    if isinstance(obj, int):
        return obj
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    return str(obj)


def _encode(obj) -> str:
    if isinstance(obj, float):
        if math.isnan(obj):
            return '"NaN"'
        if math.isinf(obj):
            return '"Infinity"' if obj > 0 else '"-Infinity"'
        return format(obj, ".17g")
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(k)}: {_encode(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, list):
        return "[" + ", ".join(_encode(v) for v in obj) + "]"
    return json.dumps(obj)


def dumps(obj) -> str:
    """Deterministic JSON with 17-significant-digit floats."""
    return _encode(_plain(obj))


def _emit(obj) -> None:
    print(dumps(obj))


# -- commands ------------------------------------------------------------------

def cmd_newton(args) -> int:
    f = parse_poly_spec(args.f)
    if not isinstance(f, BivariatePolynomial):
        raise ValueError("--f must be a bivariate JSON term list")
    order = args.order if args.order is not None else (args.seed_order or default_order())
    prob = SeriesIVP(f, parse_scalar(args.x0), parse_scalar(args.y0), order)
    y = solve_series_ivp(prob)
    out = {"coeffs": list(y.coeffs)}
    if args.eval is not None:
        cv = cross_validate_rk4(prob, float(args.eval), args.dt)
        out["eval"] = {"x": float(args.eval), "series": cv.series_value, "rk4": cv.rk4_value,
                       "gap": cv.gap}
    _emit(out)
    return 0


def cmd_const_ode(args) -> int:
    coeffs = parse_number_list(args.coeffs)
    rhs = parse_number_list(args.rhs) if args.rhs else [0]
    roots = lc.characteristic_roots(coeffs)
    cf = lc.complementary_function(roots)
    pi = lc.particular_integral_poly(coeffs, rhs)
    constants = None
    if args.ic:
        ic = [float(v) for v in parse_number_list(args.ic)]
        sol = lc.solve_ivp_constants(cf, pi, ic[0], ic[1:])
        constants = list(sol.constants)
    _emit({
        "roots": [{"re": z.real, "im": z.imag, "multiplicity": m} for z, m in roots.roots],
        "cf_terms": [dict(t.to_json(), label=t.label()) for t in cf.terms],
        "pi": list(pi),
        "constants": constants,
    })
    return 0


def cmd_divergence(args) -> int:
    _emit(lc.divergent_pi_demo(float(parse_scalar(args.x)), args.n).to_json())
    return 0


def cmd_separable(args) -> int:
    ode = fo.separable_preset(args.preset, **parse_params(args.params))
    y = fo.solve_separable(ode, float(args.x0), float(args.y0), float(args.x),
                           tol=args.tol or 1e-12)
    _emit({"preset": args.preset, "x": float(args.x), "y": y})
    return 0


def cmd_ifactor(args) -> int:
    M, N = parse_poly_spec(args.M), parse_poly_spec(args.N)
    if not (isinstance(M, BivariatePolynomial) and isinstance(N, BivariatePolynomial)):
        raise ValueError("--M and --N must be bivariate JSON term lists")
    form = fo.DifferentialForm(M, N)
    found = fo.find_monomial_integrating_factor(form, args.range, allow_log=args.allow_log)
    if found is None:
        _emit({"found": False})
    else:
        _emit({"alpha": found[0], "beta": found[1]})
    return 0


def cmd_elastica(args) -> int:
    a, x = float(parse_scalar(args.a)), float(parse_scalar(args.x))
    _emit({"a": a, "x": x, "y": fo.elastica_quadrature(a, x, tol=args.tol or 1e-12)})
    return 0


def cmd_ivp2(args) -> int:
    params = parse_params(args.params)
    if args.preset == "catenary":
        ivp = so.catenary_ivp(params.get("a", 1.0))
    else:
        ivp = so.bernoulli1716_ivp(params.get("x0", 1.0), params.get("alpha", 1.0),
                                   params.get("beta", 2.0))
    traj = so.integrate_second_order(ivp, float(args.x_end), args.step)
    out = {"preset": args.preset, "x_end": float(traj.grid[-1]), "y_end": float(traj.y[-1]),
           "yp_end": float(traj.yp[-1]), "points": len(traj.grid)}
    if args.out:
        traj.to_csv(args.out)
        out["out"] = args.out
    _emit(out)
    return 0


def _poly_fn(coeffs):
    cs = [float(c) for c in coeffs]
    return lambda x: float(lc.poly_eval(cs, x))


def cmd_wronskian(args) -> int:
    spec = _load_json(args.eq)
    P, Q = _poly_fn(spec.get("P", [0])), _poly_fn(spec.get("Q", [0]))
    x0, x_end = float(spec.get("x0", 0.0)), float(spec.get("x_end", args.x_end))
    a1, b1 = (float(v) for v in parse_number_list(args.ic1))
    a2, b2 = (float(v) for v in parse_number_list(args.ic2))
    t1 = so.integrate_second_order(so.linear_ivp(P, Q, x0=x0, alpha=a1, beta=b1), x_end, args.step)
    t2 = so.integrate_second_order(so.linear_ivp(P, Q, x0=x0, alpha=a2, beta=b2), x_end, args.step)
    tol = args.tol or 1e-5
    rep = so.abel_check(P, t1, t2, tol)
    w = so.wronskian_of(t1, t2)
    _emit({"deviation": rep.deviation, "tolerance": tol, "passed": rep.passed,
           "identically_zero": rep.identically_zero, "never_vanished": rep.never_vanished,
           "W_start": float(w[0]), "W_end": float(w[-1])})
    return 0 if rep.passed else 1


_ODE_PRESETS = {
    "parabola": vf.parabola_ode,
    "taylor": vf.taylor_ode,
    "taylor-printed": vf.taylor_ode_as_printed,
}


def _preset_call(text: str):
    m = re.fullmatch(r"\s*([\w-]+)\s*(?:\((.*)\))?\s*", text)
    if not m:
        raise ValueError(f"cannot parse preset {text!r}")
    args = [parse_scalar(v) for v in m.group(2).split(",")] if m.group(2) else []
    return m.group(1), args


def _spec_name(text: str):
    text = _maybe_file(text).strip()
    if text.startswith("{"):
        data = json.loads(text)
        return data["preset"], [parse_scalar(str(v)) for v in data.get("params", [])]
    return _preset_call(text)


def build_candidate(text: str):
    name, params = _spec_name(text)
    if name == "parabola-family":
        return vf.parabola_candidate(params[0] if params else 0)
    if name == "zero":
        return vf.zero_candidate()
    if name == "splice":
        return vf.splice_candidate(*params)
    if name == "taylor-general":
        return vf.taylor_general(float(params[0]))
    if name == "taylor-one":
        return vf.constant_candidate(1)
    raise ValueError(f"unknown candidate preset {name!r}")


def cmd_verify(args) -> int:
    name, _ = _spec_name(args.ode)
    if name not in _ODE_PRESETS:
        raise ValueError(f"unknown equation preset {name!r}; choose from {sorted(_ODE_PRESETS)}")
    ode = _ODE_PRESETS[name]()
    cand = build_candidate(args.candidate)
    grid = parse_grid(args.grid)
    if isinstance(cand, vf.PiecewiseCandidate):
        res = vf.residual_piecewise(ode, cand, grid)
        out = {"max_residual": res.max_residual,
               "glue": [{"knot": g.knot, "value_gap": g.value_gap,
                         "derivative_gap": g.derivative_gap} for g in res.glue]}
        worst = max(res.max_residual, res.max_glue_gap)
    else:
        worst = vf.residual_max(ode, cand, grid)
        out = {"max_residual": worst, "glue": []}
    tol = args.tol if args.tol is not None else 1e-10
    out["passed"] = bool(worst <= tol)
    _emit(out)
    return 0 if out["passed"] else 1


def cmd_hypergeom(args) -> int:
    p = hg.HypergeomParams(parse_scalar(args.a), parse_scalar(args.b), parse_scalar(args.c),
                           parse_scalar(args.x))
    res = hg.hypergeom_series(p, tol=args.tol or 1e-15)
    _emit({"F": res.value, "terms_used": res.terms_used})
    return 0


def cmd_identities(args) -> int:
    rows = hg.run_identity_suite(tol=args.tol or 1e-10, printed_arctan=args.printed_arctan)
    ok = all(r.passed for r in rows if "printed variant" not in r.name)
    if args.json:
        _emit({"ok": ok, "rows": [r._asdict() for r in rows]})
    else:
        width = max(len(r.name) for r in rows)
        for r in rows:
            print(f"{r.name:<{width}}  {'PASS' if r.passed else 'FAIL'}  gap={r.gap:.3g}  tol={r.tol:g}")
    return 0 if ok else 1


def _system_from(text: str) -> pp.AutonomousSystem2D:
    raw = _maybe_file(text).strip()
    if raw.startswith("{"):
        return pp.AutonomousSystem2D.from_json(json.loads(raw))
    name, params = _preset_call(raw)
    if name == "volterra":
        return pp.volterra_system(*(params or [1, 1, 1, 1]))
    raise ValueError(f"unknown system {text!r}")


def cmd_phase(args) -> int:
    tol = args.tol or 1e-9
    if args.phase_cmd == "classify":
        c = pp.LinearSystemCoeffs(*parse_number_list(args.coeffs))
        _emit(pp.classify_linear(c, tol).to_json())
        return 0
    system = _system_from(args.system)
    box = [float(v) for v in parse_number_list(args.box)]
    bundle = pp.phase_portrait(system, box, args.seeds, args.dt, args.t_end, tol=tol)
    out = {"critical_points": bundle.reports_json(),
           "paths": [{"seed_id": p.seed_id, "direction": p.direction, "points": len(p.path.t),
                      "blew_up": p.path.blew_up} for p in bundle.paths]}
    if args.out:
        bundle.to_csv(args.out)
        out["out"] = args.out
    _emit(out)
    return 0


def cmd_demo(args) -> int:
    manifest = run_demo()
    if args.json:
        _emit(manifest.to_json())
    else:
        print(manifest.table())
    return 0 if manifest.ok else 1


# -- parser --------------------------------------------------------------------

def _common() -> argparse.ArgumentParser:
    # the global flags are also accepted after the subcommand name
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--json", action="store_true", default=argparse.SUPPRESS,
                   help="machine-readable output")
    p.add_argument("--tol", type=float, default=argparse.SUPPRESS, help="tolerance override")
    p.add_argument("--seed-order", type=int, default=argparse.SUPPRESS,
                   help="default series truncation order")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="classica", description=__doc__.splitlines()[0])
    parser.add_argument("--json", action="store_true", default=False, help="machine-readable output")
    parser.add_argument("--tol", type=float, default=None, help="tolerance override")
    parser.add_argument("--seed-order", type=int, default=None,
                        help="default series truncation order (else CLASSICA_DEFAULT_ORDER or 16)")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.set_defaults(func=fn)
        return p

    p = add("newton", cmd_newton, "series solution of y' = f(x, y)")
    p.add_argument("--f", required=True, help="bivariate JSON term list or file")
    p.add_argument("--x0", default="0")
    p.add_argument("--y0", default="0")
    p.add_argument("--order", type=int)
    p.add_argument("--eval", type=float)
    p.add_argument("--dt", type=float, default=1e-3)

    p = add("const-ode", cmd_const_ode, "constant-coefficient linear ODE")
    p.add_argument("--coeffs", required=True, help="a0,a1,...,an of a0 y + a1 y' + ...")
    p.add_argument("--rhs", help="polynomial forcing c0,c1,...")
    p.add_argument("--ic", help="x0,y(x0),y'(x0),...")

    p = add("divergence-demo", cmd_divergence, "divergent operator series table")
    p.add_argument("--x", required=True)
    p.add_argument("--n", type=int, default=50)

    p = add("separable", cmd_separable, "separable first-order IVP")
    p.add_argument("--preset", required=True, choices=["leibniz", "isochrone", "catenary-p"])
    p.add_argument("--params")
    p.add_argument("--x0", type=float, default=0.0)
    p.add_argument("--y0", type=float, required=True)
    p.add_argument("--x", type=float, required=True)

    p = add("ifactor", cmd_ifactor, "monomial integrating factor search")
    p.add_argument("--M", required=True)
    p.add_argument("--N", required=True)
    p.add_argument("--range", type=int, default=4)
    p.add_argument("--allow-log", action="store_true")

    p = add("elastica", cmd_elastica, "elastica quadrature")
    p.add_argument("--a", required=True)
    p.add_argument("--x", required=True)

    p = add("ivp2", cmd_ivp2, "second-order IVP by RK4")
    p.add_argument("--preset", required=True, choices=["catenary", "bernoulli1716"])
    p.add_argument("--params")
    p.add_argument("--x-end", type=float, required=True)
    p.add_argument("--step", type=float, default=1e-3)
    p.add_argument("--out")

    p = add("wronskian", cmd_wronskian, "Wronskian and Abel check")
    p.add_argument("--eq", required=True, help='JSON {"P": [...], "Q": [...]} or file')
    p.add_argument("--ic1", required=True)
    p.add_argument("--ic2", required=True)
    p.add_argument("--step", type=float, default=1e-3)
    p.add_argument("--x-end", type=float, default=1.0)

    p = add("verify", cmd_verify, "residual of a candidate solution")
    p.add_argument("--ode", required=True, help="parabola | taylor | taylor-printed")
    p.add_argument("--candidate", required=True)
    p.add_argument("--grid", required=True, help="a,b,n")

    p = add("hypergeom", cmd_hypergeom, "Gauss hypergeometric series")
    for name in ("a", "b", "c", "x"):
        p.add_argument(f"--{name}", required=True)

    p = add("hypergeom-identities", cmd_identities, "elementary-function identity table")
    p.add_argument("--printed-arctan", action="store_true",
                   help="also show the F(1/2,1/2,1,-x^2) inverse-tangent variant")

    p = add("phase", cmd_phase, "phase-plane tools")
    psub = p.add_subparsers(dest="phase_cmd", required=True)
    q = psub.add_parser("classify", parents=[common])
    q.add_argument("--coeffs", required=True, help="a1,b1,a2,b2")
    q = psub.add_parser("portrait", parents=[common])
    q.add_argument("--system", required=True, help="JSON {F, G}, file, or volterra(a,b,c,d)")
    q.add_argument("--box", required=True, help="x0,x1,y0,y1")
    q.add_argument("--seeds", type=int, default=3)
    q.add_argument("--dt", type=float, default=1e-2)
    q.add_argument("--t-end", type=float, default=10.0)
    q.add_argument("--out")

    add("demo", cmd_demo, "run every reproduction check")
    return parser


_NEGATIVE_VALUE = re.compile(r"^-[\d.]")


def _glue_negative_values(argv: list) -> list:
    """Turn ``--grid -5,5,41`` into ``--grid=-5,5,41`` so argparse accepts it."""
    out, i = [], 0
    while i < len(argv):
        tok = argv[i]
        if (tok.startswith("--") and "=" not in tok and i + 1 < len(argv)
                and _NEGATIVE_VALUE.match(argv[i + 1])):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def main(argv=None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    args = parser.parse_args(_glue_negative_values(argv))
    try:
        return args.func(args)
    except (ValueError, ArithmeticError, TypeError, KeyError, OSError) as exc:
        print(f"classica {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
