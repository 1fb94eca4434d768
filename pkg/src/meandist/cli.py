"""Command-line front end.

Exit codes: 0 success, 1 usage or input error, 2 failed verification.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from decimal import ROUND_HALF_EVEN, Decimal

import numpy as np

from .errors import MeanDistError
from .results import CLOSED_FORM, MONTE_CARLO, Normalize

FORMATS = ("text", "csv", "markdown", "json")
TABLES = ("unit-volume", "normalised", "intrinsic")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit with 2
        raise UsageError(f"{self.prog}: error: {message}")


# --- number formatting ---------------------------------------------------------


def round_fixed(x: float, digits: int) -> str:
    """Round half-even to ``digits`` places after the point."""
    if not math.isfinite(x):
        return str(x)
    q = Decimal(1).scaleb(-digits)
    return str(Decimal(repr(float(x))).quantize(q, rounding=ROUND_HALF_EVEN))


def round_significant(x: float, digits: int) -> str:
    """Round half-even to ``digits`` significant figures, plain notation when sensible."""
    if not math.isfinite(x) or x == 0:
        return "0" if x == 0 else str(x)
    d = Decimal(repr(float(x)))
    exp = d.adjusted()
    q = Decimal(1).scaleb(exp - digits + 1)
    r = d.quantize(q, rounding=ROUND_HALF_EVEN)
    if -6 <= exp < digits:
        return format(r, "f")
    return format(r, "E")


# --- output --------------------------------------------------------------------


def _emit_rows(headers, rows, fmt: str, out) -> None:
    if fmt == "csv":
        out.write(",".join(headers) + "\n")
        for r in rows:
            out.write(",".join(str(c) for c in r) + "\n")
    elif fmt == "markdown":
        out.write("| " + " | ".join(headers) + " |\n")
        out.write("|" + "|".join("---" for _ in headers) + "|\n")
        for r in rows:
            out.write("| " + " | ".join(str(c) for c in r) + " |\n")
    else:
        widths = [max(len(str(x)) for x in col) for col in zip(headers, *rows)]
        out.write("  ".join(str(h).ljust(w) for h, w in zip(headers, widths)).rstrip() + "\n")
        for r in rows:
            out.write("  ".join(str(c).ljust(w) for c, w in zip(r, widths)).rstrip() + "\n")


def _emit_json(obj, out) -> None:
    out.write(json.dumps(obj, sort_keys=True) + "\n")


def _emit_result(args, payload: dict, out) -> None:
    """payload: value, provenance, error and extra fields."""
    fmt = args.format
    value = payload["value"]
    shown = round_fixed(value, args.digits)
    if fmt == "json":
        _emit_json({**payload, "rounded": shown}, out)
        return
    if fmt == "text":
        line = f"{shown} ({payload['provenance']})"
        if payload.get("error") and payload["provenance"] != CLOSED_FORM:
            line += f" +/- {round_significant(payload['error'], 3)}"
        out.write(line + "\n")
        return
    headers = ["quantity", "value", "provenance", "error"]
    rows = [[payload.get("quantity", "value"), shown, payload["provenance"], repr(float(payload.get("error", 0.0)))]]
    _emit_rows(headers, rows, fmt, out)


# --- input helpers -------------------------------------------------------------------


def _read_points(args):
    if args.file and args.vertices:
        raise UsageError("give either --file or --vertices, not both")
    if args.file:
        with open(args.file, encoding="utf-8") as fh:
            text = fh.read()
        data = json.loads(text)
        if isinstance(data, dict):
            return np.asarray(data["vertices"], dtype=float), text
        return np.asarray(data, dtype=float), None
    if args.vertices:
        pts = [[float(c) for c in row.split(",")] for row in args.vertices.split(";") if row.strip()]
        return np.asarray(pts, dtype=float), None
    raise UsageError("need --file or --vertices")


def _load_polytope(args):
    from .geom import Polytope

    pts, text = _read_points(args)
    if text is not None and '"faces"' in text:
        return Polytope.from_json(text)
    if pts.ndim != 2 or pts.shape[1] != 3:
        raise UsageError("vertices must be rows of three coordinates")
    return Polytope.convex_hull(pts)


def _int_p(value: str) -> int:
    try:
        f = float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {value!r}") from None
    if not f.is_integer():
        raise argparse.ArgumentTypeError("p must be an integer")
    return int(f)


def _solid_name(value: str) -> str:
    from .catalog import get_recipe

    if value.lower() == "ball":
        return "ball"
    try:
        return get_recipe(value).name
    except MeanDistError:
        raise argparse.ArgumentTypeError(f"unknown solid {value!r}") from None


# --- subcommands -------------------------------------------------------------------


def cmd_moments(args, out) -> int:
    from .catalog import ball_moment, platonic_moment

    mode = Normalize.parse(args.normalize)
    if args.solid == "ball":
        value = ball_moment(args.p, mode)
        payload = {"value": value, "provenance": CLOSED_FORM, "error": 0.0}
    else:
        payload = platonic_moment(args.solid, args.p, mode).to_dict()
        payload.pop("details", None)
    payload.update({"quantity": f"L^({args.p}) {args.solid}", "solid": args.solid, "p": args.p, "normalize": mode.value})
    _emit_result(args, payload, out)
    return 0


def cmd_tetra(args, out) -> int:
    from .reduction import tetrahedron_moment

    V, _ = _read_points(args)
    value = tetrahedron_moment(V, args.p)
    payload = {"value": value, "provenance": CLOSED_FORM, "error": 0.0, "quantity": f"L^({args.p}) tetrahedron", "p": args.p}
    _emit_result(args, payload, out)
    return 0


def cmd_general(args, out) -> int:
    from .catalog import get_recipe
    from .reduction import general_moment

    if args.solid:
        K = get_recipe(args.solid).polytope()
    else:
        K = _load_polytope(args)
    res = general_moment(K, args.p, budget=args.budget, seed=args.seed)
    payload = {
        "value": res.value,
        "provenance": res.provenance,
        "error": res.error,
        "quantity": f"L^({args.p}) polyhedron",
        "p": args.p,
        "seed": args.seed,
    }
    _emit_result(args, payload, out)
    return 0


def cmd_polygon(args, out) -> int:
    from . import polygon2d as pg

    if args.limit:
        report = pg.polygon_limit_checks(args.n)
        if args.format == "json":
            _emit_json(report.to_dict(), out)
        else:
            rows = [[k, round_fixed(v, args.digits) if isinstance(v, float) else v] for k, v in report.to_dict().items()]
            _emit_rows(["quantity", "value"], rows, args.format, out)
        return 0
    if args.p is None:
        raise UsageError("polygon needs --p unless --limit is given")
    if args.closed_form:
        value = pg.even_moment_closed(args.n, args.p)
    else:
        value = pg.polygon_moment(args.n, args.p)
    payload = {"value": value, "provenance": CLOSED_FORM, "error": 0.0, "quantity": f"L^({args.p}) {args.n}-gon", "n": args.n, "p": args.p}
    _emit_result(args, payload, out)
    return 0


def cmd_auxint(args, out) -> int:
    from .auxint import I, parse_expr

    q = parse_expr(args.q)
    gamma = parse_expr(args.gamma)
    res = I(args.p, args.i, args.j, q, gamma)
    if args.format == "json":
        _emit_json({"value": res.value, "provenance": res.method, "error": res.error, "rounded": round_significant(res.value, 15)}, out)
    elif args.format == "text":
        out.write(f"{round_significant(res.value, 15)} ({res.method})\n")
    else:
        _emit_rows(["quantity", "value", "provenance"], [[f"I{args.i}{args.j}", round_significant(res.value, 15), res.method]], args.format, out)
    return 0


def cmd_verify(args, out) -> int:
    from .catalog import get_recipe, platonic_moment
    from .oracle import estimate_moment
    from .reduction import general_moment, tetrahedron_moment

    if args.solid:
        K = get_recipe(args.solid).polytope()
        closed = platonic_moment(args.solid, args.p).value
        closed_err = 0.0
        label = args.solid
    else:
        pts, text = _read_points(args)
        K = _load_polytope(args)
        if len(K.vertices) == 4:
            closed, closed_err = tetrahedron_moment(K.vertices, args.p), 0.0
            label = "tetrahedron"
        else:
            res = general_moment(K, args.p, seed=args.seed)
            closed, closed_err = res.value, res.error
            label = "polyhedron"
    est = estimate_moment(K, K, args.p, args.samples, seed=args.seed)
    sigma = math.hypot(est.stderr, closed_err)
    ok = abs(closed - est.mean) <= 4 * sigma if sigma > 0 else closed == est.mean
    verdict = "PASS" if ok else "FAIL"
    if args.format == "json":
        _emit_json(
            {
                "closed_form": closed,
                "monte_carlo": est.mean,
                "stderr": est.stderr,
                "samples": est.n_samples,
                "seed": est.seed,
                "result": verdict,
                "provenance": [CLOSED_FORM, MONTE_CARLO],
            },
            out,
        )
    else:
        rows = [[label, round_fixed(closed, args.digits), round_fixed(est.mean, args.digits), round_significant(est.stderr, 3), verdict]]
        _emit_rows(["body", "closed-form", "monte-carlo", "stderr", "result"], rows, args.format, out)
    return 0 if ok else 2


def cmd_table(args, out) -> int:
    from .catalog import table_rows

    rows = table_rows(args.which)
    if args.format == "json":
        _emit_json({"table": args.which, "rows": [{"body": n, "value": v} for n, v in rows]}, out)
        return 0
    header = {"unit-volume": "mean distance", "normalised": "Gamma", "intrinsic": "V1 / edge"}[args.which]
    _emit_rows(["body", header], [[n, round_fixed(v, args.digits)] for n, v in rows], args.format, out)
    return 0


# --- parser ----------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="meandist", description="Distance moments in polytopes.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp, digits=12):
        sp.add_argument("--format", choices=FORMATS, default="text")
        sp.add_argument("--digits", type=int, default=digits)

    def file_args(sp):
        sp.add_argument("--file", help="JSON file: a list of points or an object with 'vertices' (and 'faces')")
        sp.add_argument("--vertices", help="points as 'x,y,z;x,y,z;...'")

    sp = sub.add_parser("moments", help="closed-form moment of a Platonic solid or the ball")
    sp.add_argument("--solid", type=_solid_name, required=True)
    sp.add_argument("--p", type=_int_p, required=True)
    sp.add_argument("--normalize", choices=[m.value for m in Normalize], default="none")
    common(sp)
    sp.set_defaults(func=cmd_moments)

    sp = sub.add_parser("tetra", help="moment of an arbitrary tetrahedron")
    file_args(sp)
    sp.add_argument("--p", type=_int_p, required=True)
    common(sp)
    sp.set_defaults(func=cmd_tetra)

    sp = sub.add_parser("general", help="moment of a polyhedron via face-pair reduction")
    file_args(sp)
    sp.add_argument("--solid", type=_solid_name)
    sp.add_argument("--p", type=_int_p, required=True)
    sp.add_argument("--budget", type=int, default=4_000_000)
    sp.add_argument("--seed", type=int, default=0)
    common(sp, digits=8)
    sp.set_defaults(func=cmd_general)

    sp = sub.add_parser("polygon", help="moment of a regular polygon with circumradius one")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--p", type=_int_p)
    sp.add_argument("--closed-form", action="store_true", help="use the even-moment cosine polynomial")
    sp.add_argument("--limit", action="store_true", help="report p -> -2 and large-n limits")
    common(sp)
    sp.set_defaults(func=cmd_polygon)

    sp = sub.add_parser("auxint", help="auxiliary integral I_ij^(p)(q, gamma)")
    sp.add_argument("--p", type=float, required=True)
    sp.add_argument("--i", type=int, required=True)
    sp.add_argument("--j", type=int, required=True)
    sp.add_argument("--q", required=True)
    sp.add_argument("--gamma", required=True)
    sp.add_argument("--format", choices=FORMATS, default="text")
    sp.set_defaults(func=cmd_auxint)

    sp = sub.add_parser("verify", help="compare a closed form with Monte Carlo at 4 sigma")
    sp.add_argument("--solid", type=_solid_name)
    file_args(sp)
    sp.add_argument("--p", type=_int_p, required=True)
    sp.add_argument("--samples", type=int, default=1_000_000)
    sp.add_argument("--seed", type=int, required=True)
    common(sp, digits=8)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("table", help="reference tables")
    sp.add_argument("--which", choices=TABLES, required=True)
    common(sp, digits=8)
    sp.set_defaults(func=cmd_table)
    return parser


def run(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "solid", None) == "ball" and args.command != "moments":
            raise UsageError("the ball is only available in 'moments'")
        if args.command == "verify" and not args.solid and not (args.file or args.vertices):
            raise UsageError("verify needs --solid, --file or --vertices")
        if args.command == "general" and not args.solid and not (args.file or args.vertices):
            raise UsageError("general needs --solid, --file or --vertices")
        return args.func(args, out)
    except UsageError as exc:
        err.write(parser.format_usage())
        err.write(f"{exc}\n")
        return 1
    except MeanDistError as exc:
        err.write(f"meandist: {exc}\n")
        return 1
    except (OSError, ValueError, KeyError) as exc:
        err.write(f"meandist: {exc}\n")
        return 1
    except SystemExit as exc:  # --help
        return int(exc.code or 0)


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
