"""Command-line front end.

Subcommands: reduce, taylor, puiseux, eval, verify, mb-residues, amoeba.
Every output starts with a header line carrying the tool version, the seed
and a sha256 hash of the resolved inputs, so any reported number can be
reproduced from the command alone.  Exit codes: 0 success, 2 validation
error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from . import __version__
from . import mellinbarnes as mb
from . import oracle
from .amoeba import amoeba_scan
from .errors import (
    NoConvergenceError,
    NonSimplePoleError,
    PathSingularError,
    PoleError,
    TrinoseriesError,
)
from .ioutil import (
    format_complex,
    format_fraction,
    format_rat_matrix,
    header_line,
    parse_complex_vector,
    parse_fraction_vector,
    input_hash,
)
from .puiseux import PuiseuxSeries, best_branch, evaluate_puiseux
from .puiseux import write_coefficients_csv as write_puiseux_csv
from .systems import build_reduction, system_from_json, system_to_json
from .taylor import TaylorSeries, evaluate_taylor
from .taylor import write_coefficients_csv as write_taylor_csv

NUMERICAL_ERRORS = (NoConvergenceError, PathSingularError, NonSimplePoleError, PoleError)


def _load_system(path):
    with open(path) as fh:
        return system_from_json(fh.read())


def _out_stream(args):
    if args.output and args.output != "-":
        return open(args.output, "w", newline="")
    return sys.stdout


def _workers() -> int:
    try:
        return max(1, int(os.environ.get("TRINOSERIES_THREADS", "1")))
    except ValueError:
        return 1


def _payload(args, system_text, extra=None):
    payload = {"command": args.command, "system": system_text}
    for key, val in sorted(vars(args).items()):
        if key in ("command", "func", "output"):
            continue
        payload[key] = str(val)
    if extra:
        payload.update(extra)
    return payload


def cmd_reduce(args):
    system = _load_system(args.system)
    red = build_reduction(system, args.pairs)
    out = _out_stream(args)
    out.write(header_line(__version__, args.seed, _payload(args, system_to_json(system))))
    out.write(f"kappa = {json.dumps([list(r) for r in red.kappa])}\n")
    out.write(f"beta_bar = {json.dumps([list(r) for r in red.beta_bar])}\n")
    out.write(f"J = {sorted(i + 1 for i in red.j_set)}\n")
    out.write(f"L = {sorted(i + 1 for i in red.l_set)}\n")
    out.write(f"T = {sorted(i + 1 for i in red.t_set)}\n")
    out.write(f"kappa_inv = {format_rat_matrix(red.kappa_inv)}\n")
    out.write(f"phi = {format_rat_matrix(red.phi)}\n")
    out.write(f"psi = {format_rat_matrix(red.psi)}\n")
    out.write(f"branches = {red.branch_count}\n")
    return 0


def cmd_taylor(args):
    system = _load_system(args.system)
    red = build_reduction(system, args.pairs)
    series = TaylorSeries(red, parse_fraction_vector(args.d))
    out = _out_stream(args)
    hdr = header_line(__version__, args.seed, _payload(args, system_to_json(system)))
    write_taylor_csv(series, args.max_degree, out, header=hdr)
    return 0


def cmd_puiseux(args):
    system = _load_system(args.system)
    red = build_reduction(system, args.pairs)
    series = PuiseuxSeries(red, parse_fraction_vector(args.d))
    out = _out_stream(args)
    hdr = header_line(__version__, args.seed, _payload(args, system_to_json(system)))
    write_puiseux_csv(series, args.max_degree, out, header=hdr)
    return 0


def cmd_eval(args):
    system = _load_system(args.system)
    red = build_reduction(system, args.pairs)
    d = parse_fraction_vector(args.d)
    x = parse_complex_vector(args.x)
    out = _out_stream(args)
    out.write(header_line(__version__, args.seed, _payload(args, system_to_json(system))))
    if all(t == "w0" for t in red.tags):
        val = evaluate_taylor(TaylorSeries(red, d), x, args.max_degree, workers=_workers())
        out.write(f"series = taylor\nvalue = {format_complex(val)}\n")
        return 0
    series = PuiseuxSeries(red, d)
    if args.branch == "best":
        ref = oracle.monomial_of_solution(
            oracle.principal_solution(system, x, steps=args.steps, tol=args.tol), d
        )
        b, val, err = best_branch(series, x, args.max_degree, ref)
        out.write(
            f"series = puiseux\nbranch = {b} (best of {series.branch_count})\n"
            f"value = {format_complex(val)}\noracle_delta = {err:.3e}\n"
        )
    else:
        val = evaluate_puiseux(series, x, args.max_degree, int(args.branch))
        out.write(
            f"series = puiseux\nbranch = {int(args.branch)} of {series.branch_count}\n"
            f"value = {format_complex(val)}\n"
        )
    return 0


def cmd_verify(args):
    system = _load_system(args.system)
    red = build_reduction(system, args.pairs)
    d = parse_fraction_vector(args.d)
    x = parse_complex_vector(args.x)
    ref = oracle.monomial_of_solution(
        oracle.principal_solution(system, x, steps=args.steps, tol=args.tol), d
    )
    out = _out_stream(args)
    out.write(header_line(__version__, args.seed, _payload(args, system_to_json(system))))
    if all(t == "w0" for t in red.tags):
        val = evaluate_taylor(TaylorSeries(red, d), x, args.max_degree, workers=_workers())
        delta = abs(val - ref)
        out.write(f"series = taylor\nvalue = {format_complex(val)}\n")
    else:
        series = PuiseuxSeries(red, d)
        b, val, delta = best_branch(series, x, args.max_degree, ref)
        out.write(f"series = puiseux\nbranch = {b} of {series.branch_count}\n")
        out.write(f"value = {format_complex(val)}\n")
    out.write(f"oracle = {format_complex(ref)}\n")
    out.write(f"max_abs_delta = {delta:.17g}\n")
    verdict = "PASS" if delta < args.tolerance else "FAIL"
    out.write(f"verdict = {verdict} (tol = {args.tolerance:g})\n")
    if verdict == "FAIL":
        raise NoConvergenceError(
            f"series/oracle mismatch {delta:.3e} exceeds tolerance {args.tolerance:g}"
        )
    return 0


def cmd_mb_residues(args):
    system = _load_system(args.system)
    d = parse_fraction_vector(args.d)
    data = mb.MBIntegralData(system, d)
    pairing = mb.DivisorPairing.parse(args.divisors)
    apex = (
        parse_fraction_vector(args.apex)
        if args.apex
        else data.default_gamma_point()
    )
    rays = tuple(parse_fraction_vector(part) for part in args.cone.split("|"))
    cone = mb.ResidueCone(apex=apex, rays=rays)
    terms = mb.residue_coefficients(data, pairing, cone, args.bound)
    out = _out_stream(args)
    out.write(header_line(__version__, args.seed, _payload(args, system_to_json(system))))
    n = system.n
    cols = (
        [f"k{i + 1}" for i in range(n)]
        + [f"z{i + 1}" for i in range(n)]
        + [f"m{i + 1}" for i in range(n)]
        + ["numerator", "denominator"]
    )
    out.write(",".join(cols) + "\n")
    for t in terms:
        if t.coefficient is not None:
            num, den = t.coefficient.numerator, t.coefficient.denominator
        else:
            num, den = format_complex(t.coefficient_float), "float"
        row = (
            [str(v) for v in t.k]
            + [format_fraction(v) for v in t.z]
            + [format_fraction(v) for v in t.exponent]
            + [str(num), str(den)]
        )
        out.write(",".join(row) + "\n")
    if args.x:
        x = parse_complex_vector(args.x)
        val = mb.residue_sum(data, pairing, cone, x, args.bound)
        out.write(f"# residue_sum({args.x}) = {format_complex(val)}\n")
    if args.plot:
        _plot_lattice(data, pairing, cone, args.bound, args.plot)
        out.write(f"# figure written to {args.plot}\n")
    return 0


def cmd_amoeba(args):
    system = _load_system(args.system)
    bounds = tuple(
        tuple(float(v) for v in part.split(":")) for part in args.bounds.split(",")
    )
    grid = amoeba_scan(
        system,
        bounds,
        args.resolution,
        attempts=args.attempts,
        tol=args.tol,
        seed=args.seed,
        workers=_workers(),
    )
    out = _out_stream(args)
    hdr = header_line(__version__, args.seed, _payload(args, system_to_json(system)))
    grid.to_csv(out, header=hdr)
    if args.plot:
        _plot_amoeba(grid, args.plot)
        out.write(f"# figure written to {args.plot}\n")
    return 0


def _plot_amoeba(grid, path):
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(5.0, 4.2))
    if len(grid.axes) == 1:
        ax.plot(grid.axes[0], grid.score, "k-", lw=1)
        ax.set_xlabel(r"$\log|x|$")
        ax.set_ylabel("membership score")
    else:
        extent = (
            grid.axes[0][0],
            grid.axes[0][-1],
            grid.axes[1][0],
            grid.axes[1][-1],
        )
        ax.imshow(
            grid.score.T,
            origin="lower",
            extent=extent,
            cmap="inferno",
            aspect="auto",
        )
        ax.set_xlabel(r"$\log|x_1|$")
        ax.set_ylabel(r"$\log|x_2|$")
    ax.set_title("discriminant amoeba (sampled)")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def _plot_lattice(data, pairing, cone, bound, path):
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    import numpy as np

    if data.n != 2:
        raise ValueError("lattice plot supports n = 2 only")
    pts = [z for _k, z in mb.residue_lattice(data, pairing, cone, bound)]
    fig, ax = plt.subplots(figsize=(5.0, 4.6))
    span = 1.0
    if pts:
        span = max(
            max(abs(float(z[0])) for z in pts), max(abs(float(z[1])) for z in pts)
        )
    lim = max(4.0, span + 2.0)
    zs = np.linspace(-lim, lim, 2)
    for idx in range(1, 5):
        fam = data.family(idx)
        for nu in range(0, bound + 2):
            c = float(fam.const) + nu
            a, b = float(fam.lin[0]), float(fam.lin[1])
            # a z1 + b z2 + c = 0
            if abs(b) > 1e-12:
                ax.plot(zs, (-c - a * zs) / b, lw=0.5, color="gray", alpha=0.6)
            else:
                ax.axvline(-c / a, lw=0.5, color="gray", alpha=0.6)
    apex = (float(cone.apex[0]), float(cone.apex[1]))
    for ray in cone.rays:
        r = (float(ray[0]), float(ray[1]))
        norm = max(abs(r[0]), abs(r[1]), 1e-12)
        ax.plot(
            [apex[0], apex[0] + r[0] / norm * lim],
            [apex[1], apex[1] + r[1] / norm * lim],
            "b-",
            lw=1.2,
        )
    if pts:
        ax.plot(
            [float(z[0]) for z in pts],
            [float(z[1]) for z in pts],
            "ko",
            ms=4,
        )
    ax.plot([apex[0]], [apex[1]], "r^", ms=6)
    ax.set_xlim(-lim, lim)
    ax.set_ylim(-lim, lim)
    ax.set_xlabel(r"$\mathrm{Re}\, z_1$")
    ax.set_ylabel(r"$\mathrm{Re}\, z_2$")
    ax.set_title("polar lines, residue lattice and cone")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="trinoseries",
        description="Series expansions for monomials of principal solutions "
        "to reduced trinomial systems",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, pairs_default=None):
        p.add_argument("--system", required=True, help="system JSON file")
        p.add_argument("--output", default="-", help="output file (default stdout)")
        p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("reduce", help="print kappa, J/L/T, phi, psi for a selection")
    common(p)
    p.add_argument("--pairs", required=True, help="comma-separated tags, e.g. s0,w0")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("taylor", help="dump exact Taylor coefficients as CSV")
    common(p)
    p.add_argument("--pairs", default=None, help="pair tags (default all w0)")
    p.add_argument("--d", required=True)
    p.add_argument("--max-degree", type=int, default=6)
    p.set_defaults(func=cmd_taylor)

    p = sub.add_parser("puiseux", help="dump Puiseux support and coefficients as CSV")
    common(p)
    p.add_argument("--pairs", required=True)
    p.add_argument("--d", required=True)
    p.add_argument("--max-degree", type=int, default=6)
    p.set_defaults(func=cmd_puiseux)

    p = sub.add_parser("eval", help="evaluate a series at a point")
    common(p)
    p.add_argument("--pairs", default=None)
    p.add_argument("--d", required=True)
    p.add_argument("--x", required=True)
    p.add_argument("--max-degree", type=int, default=20)
    p.add_argument("--branch", default="best", help='branch index or "best"')
    p.add_argument("--steps", type=int, default=64)
    p.add_argument("--tol", type=float, default=1e-12)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("verify", help="compare a series against the Newton oracle")
    common(p)
    p.add_argument("--pairs", default=None)
    p.add_argument("--d", required=True)
    p.add_argument("--x", required=True)
    p.add_argument("--max-degree", type=int, default=20)
    p.add_argument("--tol", dest="tolerance", type=float, default=1e-8)
    p.add_argument("--oracle-tol", dest="tol", type=float, default=1e-12)
    p.add_argument("--steps", type=int, default=64)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("mb-residues", help="residue lattice and coefficient dump")
    common(p)
    p.add_argument("--d", required=True)
    p.add_argument(
        "--divisors",
        required=True,
        help='divisor groups "3,2|4,1"; first of each group is designated',
    )
    p.add_argument("--cone", required=True, help='rays, e.g. "2,-1|-1,2"')
    p.add_argument("--apex", default=None, help="cone apex (default: interior of U)")
    p.add_argument("--bound", type=int, default=8)
    p.add_argument("--x", default=None, help="also evaluate the residue sum here")
    p.add_argument("--plot", default=None, help="write a lattice/cone figure (PNG)")
    p.set_defaults(func=cmd_mb_residues)

    p = sub.add_parser("amoeba", help="sample the discriminant amoeba on a grid")
    common(p)
    p.add_argument("--bounds", default="-3:3,-3:3", help='"lo:hi" per axis')
    p.add_argument("--resolution", type=float, default=0.1)
    p.add_argument("--attempts", type=int, default=24)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--plot", default=None, help="write a heat-map figure (PNG)")
    p.set_defaults(func=cmd_amoeba)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "pairs", None) is None and hasattr(args, "pairs"):
        # default selection: the system's own coordinates (all w0)
        with open(args.system) as fh:
            n = system_from_json(fh.read()).n
        args.pairs = ",".join(["w0"] * n)
    try:
        return args.func(args)
    except NUMERICAL_ERRORS as exc:
        print(f"error [{exc.module}]: {exc}", file=sys.stderr)
        return 3
    except (TrinoseriesError, ValueError, OSError, json.JSONDecodeError, KeyError) as exc:
        module = getattr(exc, "module", "cli")
        print(f"error [{module}]: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
