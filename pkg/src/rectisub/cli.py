"""Command-line front end.

Exit codes: 0 success, 1 verification failure (or Frenet-undefined points),
2 bad input or parameters, 3 irregular immersion or failed evaluation,
4 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys

from .exprdsl import DslError, format_spec, parse_immersion
from .exprdsl.evaluate import EvaluationError
from .geometry import GeometryError
from .immersion import BuiltinError, RegularityError, builtin, from_spec, parse_builtin
from .jets import JetDomainError
from .rectify import Tolerances, classify, frenet_report, make_grid, property_report, sample_rows

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2
EXIT_IRREGULAR = 3
EXIT_IO = 4


class UsageError(Exception):
    pass


def _positive_float(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not v > 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return v


def _grid_sizes(text: str) -> tuple[int, ...]:
    try:
        sizes = tuple(int(k) for k in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"grid must be n1[,n2,...], got {text!r}") from None
    if any(k < 2 for k in sizes):
        raise argparse.ArgumentTypeError(f"grid sizes must be at least 2, got {text}")
    return sizes


def _pair(text: str) -> tuple[float, float]:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected T0,T1, got {text!r}")
    try:
        return float(parts[0]), float(parts[1])
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected T0,T1, got {text!r}") from None


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="rectisub", description="Verify and construct rectifying submanifolds of Euclidean space.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    common = _Parser(add_help=False)
    common.add_argument("--out", metavar="PATH", help="write output here instead of stdout")
    common.add_argument("--jobs", type=int, default=1, metavar="N", help="worker processes for grid evaluation")

    source = _Parser(add_help=False)
    source.add_argument("input", nargs="?", help=".imm file")
    source.add_argument("--builtin", metavar="NAME[:k=v,...]", help="use a built-in immersion")
    source.add_argument("--grid", type=_grid_sizes, metavar="n1[,n2,...]", help="grid points per chart dimension")
    source.add_argument("--tol-exact", type=_positive_float, default=Tolerances.exact, help="tolerance for identities exact in jets")
    source.add_argument("--tol-third", type=_positive_float, default=Tolerances.third, help="tolerance for identities using third derivatives")
    source.add_argument("--tol-degenerate", type=_positive_float, default=Tolerances.degenerate,
                        help="threshold for conic, spherical and zero-curvature tests")

    fmt = _Parser(add_help=False)
    fmt.add_argument("--format", choices=("text", "json"), default="text")

    sub.add_parser("verify", parents=[source, fmt, common], help="classify and check all rectifying properties")
    sub.add_parser("classify", parents=[source, fmt, common], help="conic / spherical / proper / rectifying verdicts")
    sub.add_parser("frenet", parents=[source, fmt, common], help="Frenet data along a space curve")
    sub.add_parser("sample", parents=[source, common], help="export grid samples as CSV")

    con = sub.add_parser("construct", parents=[common], help="write an explicit rectifying example as .imm")
    con.add_argument("--c", type=float, default=1.0, help="length of the normal component (c > 0)")
    con.add_argument("--base", default="circle", help="spherical fibre: circle, small_circle, ellipse, clifford, sphere; "
                     "with --curve: small_circle, great_circle")
    con.add_argument("--curve", action="store_true", help="construct a rectifying space curve")
    con.add_argument("--m", type=int, help="ambient dimension")
    con.add_argument("--theta", type=float, help="latitude of small-circle bases")
    con.add_argument("--a", type=float, help="ellipse semi-axis")
    con.add_argument("--b", type=float, help="ellipse semi-axis")
    con.add_argument("--d", type=float, help="ellipse height")
    con.add_argument("--t-range", type=_pair, metavar="T0,T1", help="angle range inside (0, pi/2)")
    return parser


def load_immersion(args):
    if (args.input is None) == (args.builtin is None):
        raise UsageError("give exactly one of an input file or --builtin")
    if args.builtin is not None:
        return parse_builtin(args.builtin)
    with open(args.input, encoding="utf-8") as fh:
        text = fh.read()
    return from_spec(parse_immersion(text), label=args.input)


def _tolerances(args) -> Tolerances:
    return Tolerances(exact=args.tol_exact, third=args.tol_third, degenerate=args.tol_degenerate)


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _render(report, args) -> str:
    return report.to_json() if args.format == "json" else report.to_text()


def cmd_verify(args) -> int:
    imm = load_immersion(args)
    report = property_report(imm, make_grid(imm, args.grid), _tolerances(args), args.jobs)
    _emit(_render(report, args), args.out)
    return EXIT_OK if report.passed else EXIT_FAILED


def cmd_classify(args) -> int:
    imm = load_immersion(args)
    report = classify(imm, make_grid(imm, args.grid), _tolerances(args), args.jobs)
    _emit(_render(report, args), args.out)
    return EXIT_OK


def cmd_frenet(args) -> int:
    imm = load_immersion(args)
    if imm.chart_dim != 1 or imm.ambient_dim != 3:
        raise UsageError(f"frenet needs a curve in E^3, got n={imm.chart_dim}, m={imm.ambient_dim}")
    report = frenet_report(imm, make_grid(imm, args.grid), _tolerances(args), args.jobs)
    _emit(_render(report, args), args.out)
    if report.degenerate:
        print(f"Frenet frame undefined at {len(report.degenerate)} grid points", file=sys.stderr)
        return EXIT_FAILED
    return EXIT_OK


def cmd_sample(args) -> int:
    imm = load_immersion(args)
    header, rows = sample_rows(imm, make_grid(imm, args.grid), args.jobs)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([repr(float(v)) for v in row])
    _emit(buf.getvalue(), args.out)
    return EXIT_OK


def cmd_construct(args) -> int:
    params = {"c": args.c, "base": args.base}
    optional = {"theta": args.theta, "t0": None, "t1": None}
    if args.t_range is not None:
        optional["t0"], optional["t1"] = args.t_range
    if not args.curve:
        optional.update(m=args.m, a=args.a, b=args.b, d=args.d)
    elif any(v is not None for v in (args.m, args.a, args.b, args.d)):
        raise UsageError("--m, --a, --b, --d do not apply to curves")
    params.update({k: v for k, v in optional.items() if v is not None})
    if not args.c > 0:
        raise UsageError("c must be positive")
    imm = builtin("rectifying_curve" if args.curve else "rectifying", **params)
    kind = "curve" if args.curve else "submanifold"
    comment = f"rectifying {kind} sqrt(s^2 + c^2) Y with c = {args.c:g}, base {args.base}"
    _emit(format_spec(imm.to_spec(), comment=comment), args.out)
    return EXIT_OK


COMMANDS = {
    "verify": cmd_verify,
    "classify": cmd_classify,
    "frenet": cmd_frenet,
    "sample": cmd_sample,
    "construct": cmd_construct,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "jobs", 1) < 1:
        print("rectisub: error: --jobs must be at least 1", file=sys.stderr)
        return EXIT_USAGE
    try:
        return COMMANDS[args.command](args)
    except OSError as exc:
        print(f"rectisub: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except DslError as exc:
        where = args.input or "<input>"
        print(f"{where}: {exc}\n{exc.excerpt()}", file=sys.stderr)
        return EXIT_USAGE
    except (RegularityError, GeometryError, EvaluationError, JetDomainError) as exc:
        print(f"rectisub: {exc}", file=sys.stderr)
        return EXIT_IRREGULAR
    except (UsageError, BuiltinError, ValueError) as exc:
        print(f"rectisub: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
