"""Command-line entry point: harmlab {decompose,eval,verify,zeros,path,render}."""
from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import limits, paths, render, zeros
from .boundary import load_boundary_csv
from .errors import BadParam, HarmlabError
from .geometry import StolzAngle
from .maps import parse_map_spec
from .poisson import DEFAULT_DEGREE, decompose

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_HYPOTHESIS = 2
EXIT_USAGE = 64


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return [_jsonable(v) for v in x.tolist()]
    if isinstance(x, (complex, np.complexfloating)):
        return [_jsonable(x.real), _jsonable(x.imag)]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        return float(x) if math.isfinite(x) else None
    return x


def _emit(doc, out: str | None):
    text = json.dumps(_jsonable(doc), indent=2, sort_keys=True, allow_nan=False) + "\n"
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def parse_angle(text: str) -> float:
    text = text.strip()
    if text.startswith("deg:"):
        return math.radians(float(text[4:]))
    return float(text)


def parse_stolz(text: str) -> StolzAngle:
    """`theta0:alpha` in radians, or `deg:theta0:alpha`."""
    deg = text.startswith("deg:")
    body = text[4:] if deg else text
    parts = body.split(":")
    if len(parts) != 2:
        raise BadParam(f"Stolz spec must be theta0:alpha, got {text!r}")
    theta0 = float(parts[0])
    return StolzAngle(math.radians(theta0) if deg else theta0, float(parts[1]))


def _floats(text: str) -> list:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise BadParam(f"bad number list {text!r}") from exc


def _complex(text: str) -> complex:
    try:
        return complex(text.strip().replace(" ", "").replace("i", "j"))
    except ValueError as exc:
        raise BadParam(f"bad complex number {text!r}") from exc


# subcommands

def cmd_decompose(args) -> int:
    phi = load_boundary_csv(args.boundary)
    m = decompose(phi, args.degree)
    _emit(m.to_json(), args.out)
    return EXIT_OK


def cmd_eval(args) -> int:
    m = parse_map_spec(args.map)
    pts = np.array([_complex(s) for s in args.z.split(",")])
    rows = []
    for z in pts:
        zz = np.array([z])
        rows.append({
            "z": z,
            "f": m.f(zz)[0],
            "h_prime": m.h_prime(zz)[0],
            "g_prime": m.g_prime(zz)[0],
            "omega": m.omega(zz)[0],
            "jacobian": m.jacobian(zz)[0],
            "f_theta": m.f_theta(zz)[0],
        })
    _emit({"map": args.map, "points": rows}, args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    m = parse_map_spec(args.map)
    theta0 = parse_angle(args.theta0)
    s = StolzAngle(theta0, args.alpha)
    k_range = (args.kmin, args.kmax)
    phi = load_boundary_csv(args.boundary) if args.boundary else None
    if args.identity == "f_theta":
        if phi is None:
            raise BadParam("f_theta needs --boundary")
        doc = limits.verify_ftheta_limit(m, phi, theta0, s, args.slopes, args.tol, k_range).to_json()
        ok = doc["hypothesis_ok"]
    elif args.identity == "hprime_bounds":
        doc = limits.verify_hprime_bounds(m, s, args.eps, tol=args.tol, k_range=k_range)
        ok = not doc["flags"]
    else:
        doc = limits.verify_boundary_identity(m, args.identity, theta0, s, args.slopes,
                                              args.tol, k_range, phi).to_json()
        ok = doc["hypothesis_ok"]
    doc["map"] = args.map
    _emit(doc, args.out)
    return EXIT_HYPOTHESIS if args.strict and not ok else EXIT_OK


def cmd_zeros(args) -> int:
    m = parse_map_spec(args.map)
    s = parse_stolz(args.stolz)
    rep = zeros.count_dilatation_zeros(m, s, args.ladder, args.n_side)
    region = zeros.truncated_stolz_contour(s, min(args.ladder), args.n_side)
    fz = zeros.grid_zero_scan(m.f_prime, region, args.cell)
    doc = {
        "map": args.map,
        "stolz": {"theta0": s.theta0, "alpha": s.alpha},
        "ladder": args.ladder,
        "counts": [c for _, c in rep.eps_history],
        "stabilized": rep.stabilized,
        "status": rep.status,
        "winding_residual": rep.winding_residual,
        "fprime_zeros": fz,
        "cell": args.cell,
    }
    _emit(doc, args.out)
    return EXIT_OK


def cmd_path(args) -> int:
    branch = {"const": paths.ARG_FPRIME_CONSTANT, "general": paths.GENERAL}[args.branch]
    p = paths.PathParams(a=args.a, c=args.c, theta0=args.theta0, phi=args.phi, branch=branch)
    if args.mode == "compare":
        _emit(paths.compare_branches(p, (args.r0, args.r1), args.steps), args.out)
        return EXIT_OK
    if args.mode == "closed":
        r = np.linspace(args.r0, args.r1, args.steps + 1)
        th = np.atleast_1d(paths.theta_closed_form(p, r))
    else:
        start = paths.theta_closed_form(p, args.r0)
        r, th = paths.theta_ode(p.driver(), start, args.r0, args.r1, args.steps)
    lines = ["r,theta"] + [f"{a:.17g},{b:.17g}" for a, b in zip(r, th)]
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _parse_grid(text: str) -> tuple:
    try:
        r, t = text.lower().split("x")
        return int(r), int(t)
    except ValueError as exc:
        raise BadParam(f"grid must be RxT, got {text!r}") from exc


def cmd_render(args) -> int:
    m = parse_map_spec(args.map)
    n_radii, n_rays = _parse_grid(args.grid)
    spec = render.RenderSpec(n_radii=n_radii, n_rays=n_rays, r_max=args.rmax,
                             samples_per_curve=args.samples)
    ps = render.image_grid(m, spec, of=args.of)
    out = render.render_svg(ps, args.out, spec)
    b = ps.boundary
    summary = {
        "map": args.map,
        "of": args.of,
        "out": str(out),
        "polylines": len(ps),
        "boundary_simple": render.is_simple(b),
        "boundary_convex": render.is_convex(b),
        "boundary_straight_sides": render.count_straight_sides(b),
        "boundary_quadrilateral": render.is_quadrilateral(b),
    }
    _emit(summary, None)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    fmt = argparse.ArgumentDefaultsHelpFormatter
    p = _Parser(prog="harmlab", description="Numerical toolkit for harmonic maps of the unit disk.")
    sub = p.add_subparsers(dest="command", required=True)

    d = sub.add_parser("decompose", help="fit h and g to sampled boundary data", formatter_class=fmt)
    d.add_argument("--boundary", required=True, help="CSV with header theta,re,im")
    d.add_argument("--degree", type=int, default=DEFAULT_DEGREE, help="truncation degree")
    d.add_argument("--out", default=None, help="output JSON, stdout when omitted")
    d.set_defaults(fn=cmd_decompose)

    e = sub.add_parser("eval", help="evaluate a map and its derivatives", formatter_class=fmt)
    e.add_argument("--map", required=True, help="map spec, e.g. shear:k=0.5")
    e.add_argument("--z", required=True, help="comma-separated points, e.g. 0.1+0.2j,0.5")
    e.add_argument("--out", default=None, help="output JSON, stdout when omitted")
    e.set_defaults(fn=cmd_eval)

    v = sub.add_parser("verify", help="measure a boundary-limit identity", formatter_class=fmt)
    v.add_argument("--map", required=True, help="map spec")
    v.add_argument("--identity", required=True,
                   choices=limits.IDENTITIES + ("f_theta", "hprime_bounds"), help="identity to measure")
    v.add_argument("--theta0", default="0", help="vertex angle in radians, or deg:<value>")
    v.add_argument("--alpha", type=float, default=2.0, help="Stolz opening")
    v.add_argument("--slopes", type=_floats, default="-1,0,1", help="comma-separated path slopes")
    v.add_argument("--tol", type=float, default=1e-6, help="tail tolerance")
    v.add_argument("--kmin", type=int, default=limits.DEFAULT_K[0], help="first path index")
    v.add_argument("--kmax", type=int, default=limits.DEFAULT_K[1], help="last path index")
    v.add_argument("--boundary", default=None, help="boundary CSV for derivative hypotheses")
    v.add_argument("--eps", type=float, default=0.1, help="truncation for hprime_bounds")
    v.add_argument("--strict", action="store_true", help="exit 2 when hypotheses are unmet")
    v.add_argument("--out", default=None, help="output JSON, stdout when omitted")
    v.set_defaults(fn=cmd_verify)

    z = sub.add_parser("zeros", help="count dilatation zeros in truncated Stolz regions", formatter_class=fmt)
    z.add_argument("--map", required=True, help="map spec")
    z.add_argument("--stolz", default="0:2", help="theta0:alpha, or deg:theta0:alpha")
    z.add_argument("--ladder", type=_floats, default="0.1,0.05,0.02", help="decreasing eps values")
    z.add_argument("--n-side", type=int, default=64, help="contour resolution per side")
    z.add_argument("--cell", type=float, default=0.01, help="grid cell for the f' scan")
    z.add_argument("--out", default=None, help="output JSON, stdout when omitted")
    z.set_defaults(fn=cmd_zeros)

    pa = sub.add_parser("path", help="constant-argument path branches", formatter_class=fmt)
    pa.add_argument("--branch", choices=("const", "general"), default="const", help="closed-form branch")
    pa.add_argument("--a", type=float, default=0.0, help="constant a")
    pa.add_argument("--c", type=float, default=0.0, help="constant c")
    pa.add_argument("--theta0", type=float, default=0.0, help="constant value of arg f")
    pa.add_argument("--phi", type=float, default=0.0, help="constant arg(f'/f) for the general branch")
    pa.add_argument("--r0", type=float, default=0.5, help="start radius")
    pa.add_argument("--r1", type=float, default=0.9, help="end radius")
    pa.add_argument("--steps", type=int, default=1000, help="fixed RK4 steps")
    pa.add_argument("--mode", choices=("closed", "ode", "compare"), default="compare", help="output kind")
    pa.add_argument("--out", default=None, help="output file, stdout when omitted")
    pa.set_defaults(fn=cmd_path)

    r = sub.add_parser("render", help="SVG image of the polar grid", formatter_class=fmt)
    r.add_argument("--map", required=True, help="map spec")
    r.add_argument("--grid", default="8x16", help="circles x rays")
    r.add_argument("--rmax", type=float, default=0.999, help="radius of the outline curve")
    r.add_argument("--samples", type=int, default=256, help="samples per curve")
    r.add_argument("--of", choices=("f", "omega"), default="f", help="which function to image")
    r.add_argument("--out", required=True, help="output SVG")
    r.set_defaults(fn=cmd_render)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (HarmlabError, OSError, ValueError) as exc:
        print(f"harmlab: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
