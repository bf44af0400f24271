"""
jlbialg — Coboundary Jacobi-Lie bialgebras in low dimension
===========================================================
Exact verification of the classified 2D/3D catalog: defining equations,
r-matrices and their classification, invariant vector fields, Jacobi
brackets on the groups and the integrable-system example.

Run:  python app.py verify-catalog
      python app.py classify "((II,0),(V,bX1))" --params b=3 --format markdown
"""

import argparse
import sys
import time
from typing import List, Optional, Sequence

from config import get_settings, override_settings
from config.logging import command_trace, setup_logging
from models.report import Report, TaskRecord
from services import report_service, verification_service
from utils.error_boundary import EXIT_FAILED, EXIT_OK, log_command, safe_command
from utils.validators import JLBError, validate_format, validate_param_binding


# ─── Parser ────────────────────────────────────────────────
def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, help="sampling seed")
    common.add_argument("--samples", type=int, help="random points per numeric check")
    common.add_argument("--tol", type=float, help="relative tolerance of numeric checks")
    common.add_argument("--params", help="parameter binding, e.g. b=3,a=1/2")
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--format", choices=["json", "markdown", "xlsx"], help="report format")
    common.add_argument("--log-level", help="DEBUG, INFO, WARNING or ERROR")

    # global flags follow the subcommand
    parser = argparse.ArgumentParser(prog="jlbialg", description="Coboundary Jacobi-Lie bialgebra toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify-catalog", parents=[common], help="defining equations, printed r and residues")
    p.add_argument("label", nargs="?", help="restrict to one catalog row")

    p = sub.add_parser("solve-r", parents=[common], help="solution space of the coboundary equation")
    p.add_argument("label")
    p.add_argument("--side", choices=["primal", "dual"])

    p = sub.add_parser("classify", parents=[common], help="triangular / quasitriangular classification")
    p.add_argument("label")

    p = sub.add_parser("equiv", parents=[common], help="equivalence under a supplied automorphism")
    p.add_argument("label1")
    p.add_argument("label2")
    p.add_argument("--C", dest="c_file", required=True, help="automorphism file")

    sub.add_parser("charts-check", parents=[common], help="invariant vector field checks")

    p = sub.add_parser("brackets", parents=[common], help="Jacobi brackets against the golden tables")
    p.add_argument("label", nargs="?")
    p.add_argument("--all", action="store_true", help="every golden row")
    p.add_argument("--side", choices=["primal", "dual"])

    p = sub.add_parser("axioms", parents=[common], help="Jacobi structure axioms of a row")
    p.add_argument("label")

    p = sub.add_parser("integrable", parents=[common], help="constants of motion of a system")
    p.add_argument("system", help="system name or a systems .dat file")
    p.add_argument("--kmax", type=int, default=4)

    p = sub.add_parser("describe", parents=[common], help="print a Lie algebra")
    p.add_argument("name")

    p = sub.add_parser("report", parents=[common], help="every verification task in one report")
    p.add_argument("--kmax", type=int, default=4)
    return parser


# ─── Commands ──────────────────────────────────────────────
@log_command()
def run_command(args: argparse.Namespace) -> List[TaskRecord]:
    settings = get_settings()
    params = validate_param_binding(args.params)
    seed = settings.seed
    samples = settings.samples
    vs = verification_service

    if args.command == "verify-catalog":
        return vs.verify_catalog(args.label, params, seed=seed)
    if args.command == "solve-r":
        return vs.solve_records(args.label, args.side, params, seed=seed)
    if args.command == "classify":
        return vs.classify_records(args.label, params, seed=seed)
    if args.command == "equiv":
        return vs.equivalence_records(args.label1, args.label2, args.c_file, params, seed)
    if args.command == "charts-check":
        return vs.chart_records(samples, seed, settings.tol)
    if args.command == "brackets":
        label = None if args.all else args.label
        if label is None and not args.all:
            raise JLBError("brackets", "give a label or --all")
        return vs.bracket_records(label, args.side, samples, seed, settings.tol)
    if args.command == "axioms":
        return vs.axiom_records(args.label, params, samples, seed)
    if args.command == "integrable":
        return vs.integrable_records(args.system, args.kmax, samples, seed)
    if args.command == "describe":
        return vs.describe_records(args.name, params, seed)
    return vs.full_report(samples, seed, settings.tol, args.kmax)


def _emit(report: Report, fmt: str, out: Optional[str]) -> None:
    if report_service.write(report, fmt, out) is None:
        sys.stdout.write(report_service.render(report, fmt).decode())


@safe_command("Verification aborted.")
def run(args: argparse.Namespace) -> int:
    settings = override_settings(seed=args.seed, samples=args.samples, tol=args.tol,
                                 log_level=args.log_level, report_format=args.format)
    fmt = validate_format(settings.report_format, args.out)
    start = time.monotonic()
    records = run_command(args)
    report = Report(seed=settings.seed, command=args.command, records=records,
                    schema_version=settings.report_schema_version,
                    elapsed_ms=(time.monotonic() - start) * 1000)
    _emit(report, fmt, args.out)
    for failure in report.failures:
        print(f"FAIL {failure.task} {failure.label} [{failure.side}] {failure.binding}: "
              f"{'; '.join(failure.notes)}", file=sys.stderr)
    return EXIT_OK if report.ok else EXIT_FAILED


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Parse ``argv`` and run one command under a fresh trace id; returns the exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    setup_logging(level=args.log_level or get_settings().log_level)
    with command_trace(args.command):
        return run(args)


if __name__ == "__main__":
    sys.exit(main())
