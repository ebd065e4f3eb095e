"""``certify`` command line front end.

Exit codes: 0 for a completed run, 1 for input or parse errors, 2 for
internal errors.  With ``--exit-on-verdict`` a completed run exits 10 when
unbounded and 11 when inconclusive.
"""

from __future__ import annotations

import argparse
import logging
import sys
import time

from . import __version__
from .asymptotics import Tolerance
from .certify import run_certificate
from .errors import CertifyError, InputError
from .parser import load_problem
from .probe import ProbeConfig
from .report import build_report, format_human
from .sampling import SampleConfig, estimate_alpha, resolve_threads

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_INTERNAL = 2
EXIT_UNBOUNDED = 10
EXIT_INCONCLUSIVE = 11

log = logging.getLogger("polycert")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise InputError(message)


def _direction(text: str):
    try:
        values = [float(v) for v in text.replace(" ", "").split(",") if v != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(f"--direction {text!r}: expected comma-separated numbers")
    if not values:
        raise argparse.ArgumentTypeError(f"--direction {text!r}: empty vector")
    return values


def _positive_int(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {v}")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(
        prog="certify",
        description="Certify that a polynomial optimization problem is unbounded below "
                    "by finding a feasible direction of descent at infinity.",
    )
    p.add_argument("problem", help="problem file (dim / objective: / constraint: lines)")
    p.add_argument("--samples", type=_positive_int, default=10_000, metavar="N",
                   help="uniform directions to test (default 10000)")
    p.add_argument("--seed", type=int, default=0, metavar="S", help="sampling seed (default 0)")
    p.add_argument("--delta", type=float, metavar="D",
                   help="report the N needed for miss probability <= D at each alpha_0")
    p.add_argument("--alpha-floor", type=float, metavar="A",
                   help="extra alpha_0 row for the residual table")
    p.add_argument("--direction", type=_direction, action="append", default=[],
                   metavar="V1,V2,...", help="direction to test before sampling (repeatable)")
    p.add_argument("--probe", action="store_true",
                   help="search degenerate strata when sampling finds nothing (heuristic)")
    p.add_argument("--estimate-alpha", action="store_true",
                   help="estimate the certifying fraction of the sphere from the same samples")
    p.add_argument("--exhaustive", action="store_true",
                   help="test all samples and record every certifying index")
    p.add_argument("--tol-abs", type=float, default=Tolerance.abs, metavar="X",
                   help=f"absolute zero tolerance (default {Tolerance.abs:g})")
    p.add_argument("--tol-rel", type=float, default=Tolerance.rel, metavar="X",
                   help=f"relative zero tolerance (default {Tolerance.rel:g})")
    p.add_argument("--format", choices=("human", "machine"), default="human")
    p.add_argument("--threads", type=int, default=0, metavar="K",
                   help="worker threads, 0 = all cores; CERTIFY_THREADS overrides")
    p.add_argument("--exit-on-verdict", action="store_true",
                   help="exit 10 when unbounded, 11 when inconclusive")
    p.add_argument("--figure", metavar="PATH",
                   help="also write a diagnostic figure (png, pdf or svg)")
    p.add_argument("-v", "--verbose", action="store_true")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    return p


def run(args) -> int:
    if not 0 <= args.seed < 2**64:
        raise InputError(f"--seed must be an unsigned 64-bit integer, got {args.seed}")
    try:
        config = SampleConfig(args.samples, args.seed, args.delta, args.alpha_floor)
    except InputError as exc:
        raise InputError(f"--samples/--seed/--delta/--alpha-floor: {exc}") from None
    try:
        tol = Tolerance(args.tol_abs, args.tol_rel)
    except InputError as exc:
        raise InputError(f"--tol-abs/--tol-rel: {exc}") from None
    threads = resolve_threads(args.threads)
    problem = load_problem(args.problem)
    for k, v in enumerate(args.direction):
        if len(v) != problem.dimension:
            raise InputError(f"--direction #{k + 1} has {len(v)} entries, "
                             f"problem {args.problem} has dimension {problem.dimension}")

    t0 = time.perf_counter()
    outcome = run_certificate(
        problem, config, tol, extra_directions=args.direction,
        probe=ProbeConfig() if args.probe else None,
        threads=threads, exhaustive=args.exhaustive,
    )
    estimate = None
    if args.estimate_alpha:
        estimate = estimate_alpha(problem, config, tol, threads=threads)
    wall_ms = (time.perf_counter() - t0) * 1e3

    report = build_report(problem, outcome, config=config, tol=tol, probe_enabled=args.probe,
                          alpha_estimate=estimate, exhaustive=args.exhaustive, wall_ms=wall_ms)
    if args.format == "machine":
        sys.stdout.write(report.to_json())
    else:
        sys.stdout.write(format_human(report))
    if args.figure:
        from .plotting import render_figure

        render_figure(problem, report, args.figure, tol)
    if args.exit_on_verdict:
        return EXIT_UNBOUNDED if report.verdict == "unbounded" else EXIT_INCONCLUSIVE
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except InputError as exc:
        print(f"certify: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return run(args)
    except (InputError, CertifyError) as exc:
        print(f"certify: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except Exception as exc:  # noqa: BLE001
        log.debug("internal error", exc_info=True)
        print(f"certify: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
