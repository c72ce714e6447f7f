"""Command-line front end: E2, Frobenius, sigma, multiples and heights."""
import argparse
import logging
import sys
from fractions import Fraction

from sympy import isprime

from src.pipelines.frobenius_e2 import (
    compute_e2,
    frobenius_trace,
    kedlaya_frobenius_matrix,
    kedlaya_with_column_trick,
)
from src.pipelines.height_pipeline import HeightJob, padic_height
from src.pipelines.sigma_function import compute_sigma
from src.utils.benchmarks import run_benchmarks
from src.utils.config import get_settings
from src.utils.division_polynomials import make_context, multiple_coords
from src.utils.elliptic_curves import CurveQ, RationalPoint, short_weierstrass_model
from src.utils.errors import PadicHeightError, PreconditionViolated
from src.utils.fixtures import HeightReport
from src.utils.golden_suite import run_golden_suite
from src.utils.padic_numbers import PadicNumber

logger = logging.getLogger("padic_heights")


def parse_curve(text):
    """'a1,a2,a3,a4,a6' -> CurveQ"""
    try:
        return CurveQ.from_list([int(part) for part in text.split(",")])
    except ValueError as error:
        raise argparse.ArgumentTypeError(f"invalid curve {text!r}: {error}")


def parse_point(text):
    """'xn/xd,yn/yd' -> RationalPoint"""
    try:
        x, y = (Fraction(part.strip()) for part in text.split(","))
        return RationalPoint.from_xy(x, y)
    except (ValueError, ZeroDivisionError) as error:
        raise argparse.ArgumentTypeError(f"invalid point {text!r}: {error}")


def _check_prime(p):
    if p < 5 or not isprime(p):
        raise PreconditionViolated(f"p must be a prime >= 5, got {p}")


def cmd_e2(args):
    _check_prime(args.p)
    e2 = compute_e2(args.curve, args.p, args.prec, use_column_trick=args.column_trick)
    print(PadicNumber.from_int(e2.value, args.p, args.prec).render())


def cmd_frobenius(args):
    _check_prime(args.p)
    A, B = short_weierstrass_model(args.curve)
    if args.column_trick:
        F = kedlaya_with_column_trick(A, B, args.p, args.prec, frobenius_trace(args.curve, args.p))
    else:
        F = kedlaya_frobenius_matrix(A, B, args.p, args.prec)
    print(F.render())


def cmd_sigma(args):
    _check_prime(args.p)
    N = args.prec
    e2 = compute_e2(args.curve, args.p, N - 3) if N >= 4 else None
    print(compute_sigma(args.curve, args.p, N, e2).render())


def cmd_multiple(args):
    if not args.curve.contains(args.point):
        raise PreconditionViolated(f"{args.point} is not on {args.curve}")
    ctx = make_context(args.curve, args.point, args.mod)
    alpha, beta, d = multiple_coords(ctx, args.m)
    print(f"alpha={alpha} beta=±{beta} d=±{d}")


def cmd_height(args):
    job = HeightJob.create(args.curve, args.point, args.p, args.prec, args.tamagawa_lcm,
                           "mst" if args.mst_normalization else "standard")
    result = padic_height(job)
    if args.json:
        print(HeightReport.from_result(result).model_dump_json(indent=2))
    else:
        print(result.render())


def cmd_golden(args):
    path = args.fixtures or get_settings().fixtures_path
    report = run_golden_suite(path, jobs=args.jobs)
    if len(report):
        print(report[["line", "label", "stage", "p", "prec", "passed", "index", "error"]].to_string(index=False))
    failures = int((~report["passed"]).sum()) if len(report) else 0
    print(f"{len(report)} checks, {failures} failures")
    return 1 if failures else 0


def cmd_bench(args):
    table, slopes = run_benchmarks(quick=args.quick, output_dir=args.output_dir, plot=args.plot)
    print(table.to_string(index=False))
    for operation, slope in slopes.items():
        print(f"{operation}: log-log slope {slope:.2f}")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="padic-heights",
        description="Cyclotomic p-adic heights on elliptic curves over Q.")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="-v logs at INFO, -vv at DEBUG")
    sub = parser.add_subparsers(dest="command", required=True)

    def with_curve(name, help_text):
        command = sub.add_parser(name, help=help_text)
        command.add_argument("--curve", type=parse_curve, required=True, help="a1,a2,a3,a4,a6")
        return command

    for name, help_text, handler in (
        ("e2", "E2(E, omega) mod p^N", cmd_e2),
        ("frobenius", "Frobenius matrix on {dx/y, x dx/y} mod p^N", cmd_frobenius),
        ("sigma", "p-adic sigma function mod I_N", cmd_sigma),
    ):
        command = with_curve(name, help_text)
        command.add_argument("--p", type=int, required=True)
        command.add_argument("--prec", type=int, required=True, help="N")
        if name != "sigma":
            command.add_argument("--column-trick", action="store_true",
                                 help="compute one column and complete it from trace and determinant")
        command.set_defaults(handler=handler)

    multiple = with_curve("multiple", "coordinates of mQ mod R")
    multiple.add_argument("--point", type=parse_point, required=True, help="xn/xd,yn/yd")
    multiple.add_argument("--m", type=int, required=True)
    multiple.add_argument("--mod", type=int, required=True, help="odd modulus R")
    multiple.set_defaults(handler=cmd_multiple)

    height = with_curve("height", "p-adic height h_p(P) mod p^M")
    height.add_argument("--point", type=parse_point, required=True, help="xn/xd,yn/yd")
    height.add_argument("--p", type=int, required=True)
    height.add_argument("--prec", type=int, required=True, help="M")
    height.add_argument("--tamagawa-lcm", type=int, required=True)
    height.add_argument("--mst-normalization", action="store_true", help="divide by 2p")
    height.add_argument("--json", action="store_true")
    height.set_defaults(handler=cmd_height)

    golden = sub.add_parser("golden", help="replay the fixture file")
    golden.add_argument("--fixtures", default=None)
    golden.add_argument("--jobs", type=int, default=1)
    golden.set_defaults(handler=cmd_golden)

    bench = sub.add_parser("bench", help="time compute_sigma and multiple_coords")
    bench.add_argument("--quick", action="store_true", help="N in {25, 50, 100}")
    bench.add_argument("--plot", action="store_true")
    bench.add_argument("--output-dir", default=None)
    bench.set_defaults(handler=cmd_bench)
    return parser


VALUE_FLAGS = ("--curve", "--point")


def _attach_values(argv):
    """Rewrite `--curve -1,0,...` as `--curve=-1,0,...` so argparse keeps the minus"""
    out = []
    tokens = iter(argv)
    for token in tokens:
        if token in VALUE_FLAGS:
            token = f"{token}={next(tokens, '')}"
        out.append(token)
    return out


def cli_main(argv=None):
    """Run one subcommand; returns the process exit code"""
    argv = sys.argv[1:] if argv is None else argv
    args = build_parser().parse_args(_attach_values(argv))
    try:
        level = {0: get_settings().log_level, 1: "INFO"}.get(args.verbose, "DEBUG")
        logging.basicConfig(level=level, format="%(asctime)s %(levelname)s %(name)s: %(message)s")
        return args.handler(args) or 0
    except PadicHeightError as error:
        logger.debug("%s failed", args.command, exc_info=True)
        print(str(error), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(cli_main())
