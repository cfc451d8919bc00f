"""Command-line front end.

Exit codes: 0 pass, 1 check failure, 2 usage or schema error, 3 domain error.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from . import axb, semigroup, spine, verify, xform
from .cone import ConeSemicharacter, ProductCone, eval_cone
from .errors import DomainError, EberleinError, InvalidInput, InvalidSpec, InvalidSpine, UnsupportedFamily
from .io import (csv_text, dump_report, format_complex, load_json, parse_complex,
                 semigroup_from_spec, spine_from_spec)

EXIT_OK, EXIT_CHECK, EXIT_USAGE, EXIT_DOMAIN = 0, 1, 2, 3
TOL_ENV = "EBERLEIN_TOL"


class UsageError(Exception):
    pass


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _tolerance(args) -> float:
    raw = args.tol if args.tol is not None else os.environ.get(TOL_ENV)
    if raw is None:
        return verify.DEFAULT_TOL
    try:
        tol = float(raw)
    except ValueError:
        raise UsageError(f"tolerance {raw!r} is not a number") from None
    if not tol > 0:
        raise UsageError(f"tolerance must be positive, got {raw}")
    return tol


def _load_semigroup(args):
    if not args.input:
        raise UsageError("--input is required")
    return semigroup_from_spec(load_json(args.input))


def _vector(text: str | None) -> np.ndarray:
    if text is None or text == "":
        return np.zeros(0, dtype=complex)
    return np.array([parse_complex(t) for t in text.split(",")], dtype=complex)


# -- subcommands -----------------------------------------------------------

def cmd_spectrum(args) -> int:
    S = _load_semigroup(args)
    n = args.grid or 8
    if isinstance(S, semigroup.NumericalSemigroup):
        header = semigroup.classify_dual(S).describe()
        s = int(args.s) if args.s is not None else S.generators[0]
        radii = np.linspace(0.0, 1.0, n)
        angles = np.linspace(0.0, 2 * np.pi, n, endpoint=False)
        zs = [r * np.exp(1j * t) for r in radii for t in angles]
        rows = [(z.real, z.imag, *_parts(semigroup.eval_disc(semigroup.DiscSemicharacter(z), S, s)))
                for z in zs]
    else:
        header = S.dual_description()
        k = S.n - S.l
        s = (np.asarray([float(v) for v in args.s.split(",")]) if args.s is not None
             else S.basis.T @ np.concatenate([np.zeros(S.l), np.asarray(S.thresholds) + 1.0]))
        grid = xform.halfplane_grid(n, n, xmax=4.0, ymin=0.0 + 1e-2, ymax=4.0)
        rows = []
        for z in grid:
            sig = ConeSemicharacter(np.zeros(S.l), np.full(k, z))
            rows.append((z.real, z.imag, *_parts(eval_cone(sig, S, s))))
    sys.stdout.write(header + "\n")
    _emit(csv_text(rows), args.out)
    return EXIT_OK


def _parts(v: complex):
    return complex(v).real, complex(v).imag


def cmd_eval(args) -> int:
    S = _load_semigroup(args)
    if args.s is None:
        raise UsageError("--s is required")
    if isinstance(S, semigroup.NumericalSemigroup):
        try:
            s = int(args.s)
        except ValueError:
            raise UsageError(f"--s {args.s!r} is not an integer") from None
        sigma = (semigroup.DiscSemicharacter(zero_flag=True) if args.zero
                 else semigroup.DiscSemicharacter(parse_complex(args.z if args.z is not None else "1")))
        value = semigroup.eval_disc(sigma, S, s)
    else:
        x = _vector(args.x).real
        z = _vector(args.z)
        point = np.array([float(t) for t in args.s.split(",")])
        value = eval_cone(ConeSemicharacter(x, z), S, point)
    sys.stdout.write(format_complex(value) + "\n")
    return EXIT_OK


def cmd_verify(args) -> int:
    suite = args.suite_name or args.suite or "all"
    if suite not in verify.SUITES + ("all",):
        raise UsageError(f"unknown suite {suite!r}; choose from {', '.join(verify.SUITES + ('all',))}")
    grid = args.grid or 16
    if grid < 8:
        raise UsageError("--grid must be at least 8")
    report = verify.run_suite(suite, seed=args.seed, tol=_tolerance(args), grid=grid)
    _emit(dump_report(report.to_json()), args.out)
    return EXIT_OK if report.passed else EXIT_CHECK


def cmd_transform(args) -> int:
    z = parse_complex(args.z) if args.z is not None else None
    if args.kind in ("laplace", "gn"):
        if args.n is None:
            raise UsageError("--n is required")
        func = (lambda w: xform.laplace_basis(args.n, w)) if args.kind == "laplace" \
            else (lambda w: xform.gn_pullback(args.n, w))
    elif args.kind == "cayley":
        func = xform.cayley
    else:
        raise UsageError(f"unknown transform {args.kind!r}")
    if args.grid:
        pts = xform.halfplane_grid(args.grid, args.grid)
        vals = np.atleast_1d(func(pts))
        _emit(csv_text(xform.sample_spectrum_csv_rows(pts, vals)), args.out)
        return EXIT_OK
    if z is None:
        raise UsageError("--z or --grid is required")
    _emit(format_complex(func(z)) + "\n", args.out)
    return EXIT_OK


def cmd_axb(args) -> int:
    p = axb.TildeAxb(float(args.a), parse_complex(args.z))
    grid = args.grid or 32
    if args.polar:
        pieces = {
            "unitary": lambda G: axb.polar_match(G, p).unitary_residual,
            "positive": lambda G: axb.polar_match(G, p).positive_residual,
        }
    else:
        pieces = {"walter": lambda G: axb.walter_residual_axb(G, p)}
    grids = (grid, 2 * grid) if args.refine else (grid,)
    body = {"v": 1, "a": p.a, "z": [p.z.real, p.z.imag]}
    passed = True
    for name, measure in pieces.items():
        if args.refine:
            rep = axb.refinement_study(measure, grids).to_json()
        else:
            res = float(measure(axb.GridRep(grid)))
            rep = {"grids": [grid], "residuals": [res], "ratio": None, "pass": bool(np.isfinite(res))}
        passed &= rep["pass"]
        body[name] = rep
    if len(pieces) == 1:
        body.update(body.pop(next(iter(pieces))))
    body["pass"] = bool(passed)
    _emit(dump_report(body), args.out)
    return EXIT_OK if passed else EXIT_CHECK


def cmd_spine(args) -> int:
    if not args.input:
        raise UsageError("--input is required")
    S = spine_from_spec(load_json(args.input))
    ideal = spine.complement_is_ideal(S, rng=np.random.default_rng(args.seed))
    body = {
        "v": 1,
        "nodes": [str(n) for n in S.nodes],
        "maximum": None if S.maximum() is None else str(S.maximum()),
        "no_common_lower_bound": sorted([str(i), str(j)] for k, i in enumerate(S.nodes)
                                        for j in S.nodes[k + 1:] if spine.meet(S, i, j) is None),
        "complement_is_ideal": {"pass": ideal.passed, "checked": ideal.checked, "message": ideal.message},
        "notes": list(S.notes),
    }
    if args.product:
        p, q = (_spine_point(S, t) for t in args.product)
        r = spine.spine_product(S, p, q)
        body["product"] = "ZERO" if r is spine.ZERO else {"node": str(r.node),
                                                          "value": np.asarray(r.value).tolist()}
    _emit(dump_report(body), args.out)
    return EXIT_OK


def _spine_point(S, text: str):
    node, _, values = text.partition(":")
    name = spine._node_name(node, list(S.nodes))
    vals = [float(v) for v in values.split(",")] if values else []
    return S.point(name, vals)


# -- parser ----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", help="JSON spec file")
    common.add_argument("--out", help="write output here instead of stdout")
    common.add_argument("--tol", help=f"tolerance (> 0); default from ${TOL_ENV} or 1e-10")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--grid", type=int, help="grid size")
    common.add_argument("--refine", action="store_true", help="also run on the refined grid")

    parser = argparse.ArgumentParser(prog="eberlein", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("spectrum", parents=[common], help="dual classification and CSV sample grid")
    sp.add_argument("--s", help="semigroup point for the CSV values")
    sp.set_defaults(func=cmd_spectrum)

    ev = sub.add_parser("eval", parents=[common], help="evaluate a semicharacter at a point")
    ev.add_argument("--z", help="disc coordinate, or comma-separated half-plane parameters")
    ev.add_argument("--x", help="comma-separated line parameters (cones)")
    ev.add_argument("--s", help="point (integer, or comma-separated vector for cones)")
    ev.add_argument("--zero", action="store_true", help="the zero functional")
    ev.set_defaults(func=cmd_eval)

    vf = sub.add_parser("verify", parents=[common], help="run invariant checks")
    vf.add_argument("suite_name", nargs="?")
    vf.add_argument("--suite")
    vf.set_defaults(func=cmd_verify)

    tf = sub.add_parser("transform", parents=[common], help="Laplace, g_n and Cayley values")
    tf.add_argument("kind", choices=["laplace", "gn", "cayley"])
    tf.add_argument("--n", type=int)
    tf.add_argument("--z")
    tf.set_defaults(func=cmd_transform)

    ax = sub.add_parser("axb", parents=[common], help="ax+b grid residuals")
    ax.add_argument("--a", type=float, required=True)
    ax.add_argument("--z", default="0")
    mode = ax.add_mutually_exclusive_group()
    mode.add_argument("--walter", action="store_true", help="tensor-square residual (default)")
    mode.add_argument("--polar", action="store_true", help="polar decomposition match")
    ax.set_defaults(func=cmd_axb)

    sn = sub.add_parser("spine", parents=[common], help="validate a spine system")
    sn.add_argument("--product", nargs=2, metavar="NODE:V1,V2", help="multiply two points")
    sn.set_defaults(func=cmd_spine)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command != "verify":
            _tolerance(args)
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (InvalidSpec, InvalidSpine, InvalidInput, UnsupportedFamily) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DomainError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except OSError as exc:
        print(f"cannot read input: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except EberleinError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CHECK


if __name__ == "__main__":
    sys.exit(main())
