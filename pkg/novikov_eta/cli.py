"""Command-line entry point: ``novikov-eta <subcommand> [options]``.

Passing checks are printed to stdout as ``check: detail``; failures go to stderr as one
JSON object per line (``{"check": ..., "status": "fail", "detail": ...}``). The exit status
is 0 iff every requested check passed, 1 when a check failed and 2 for a bad invocation.
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from novikov_eta.config import CONTEXT_CHOICES, load_config, set_config
from novikov_eta.exceptions import NovikovEtaError
from novikov_eta.jobs import JOBS, SUITES

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2


def _add_common(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("run configuration")
    group.add_argument("--config", type=Path, default=None, help="Plain-text key=value config file.")
    group.add_argument("--max-u", type=int, default=None, help="Largest internal degree u (MAX_U).")
    group.add_argument("--max-s", type=int, default=None, help="Largest cohomological degree s.")
    group.add_argument("--max-t", type=int, default=None, help="Largest Novikov degree t.")
    group.add_argument("--block-budget", type=int, default=None, help="Largest complex block allowed.")
    group.add_argument("--cache-dir", type=Path, default=None, help="Directory of the block cache.")
    group.add_argument("--no-cache", action="store_true", help="Neither read nor write the block cache.")
    group.add_argument("--output-dir", type=Path, default=None, help="Directory for artifacts.")
    group.add_argument("--workers", type=int, default=None, help="Processes used to compute blocks.")
    group.add_argument("--multiplicity-threshold", type=int, default=None, help="Charts: boxes above this.")
    group.add_argument("--stability-depth", type=int, default=None, help="Motivic h0-tower stability depth.")
    group.add_argument("-v", "--verbose", action="store_true", help="Log at DEBUG level.")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="novikov-eta",
        description="Cohomology, algebraic Novikov and localized motivic computations around η.",
    )
    commands = parser.add_subparsers(dest="command", required=True, metavar="command")

    ext = commands.add_parser("ext", help="Compute Ext over the configured region.")
    ext.add_argument("--context", action="append", choices=CONTEXT_CHOICES, default=None, help="Repeatable.")
    _add_common(ext)

    d1 = commands.add_parser("novikov-d1", help="d1 of the algebraic Novikov spectral sequence.")
    d1.add_argument("--context", choices=("sphere", "mod2"), default="sphere")
    d1.add_argument(
        "--generator",
        type=int,
        action="append",
        default=None,
        help="Derive d1 of q_{n+1} from its minimal lift (repeatable, default n=2).",
    )
    _add_common(d1)

    localize = commands.add_parser("localize", help="Localize at h0 and assemble E∞.")
    localize.add_argument("--context", choices=("sphere", "mod2"), default="sphere")
    _add_common(localize)

    verify = commands.add_parser("verify", help="Run a verification suite.")
    verify.add_argument("suite", choices=SUITES)
    _add_common(verify)

    massey = commands.add_parser("massey", help="Triple Massey product ⟨a, b, c⟩ of cocycles.")
    massey.add_argument("a")
    massey.add_argument("b")
    massey.add_argument("c")
    massey.add_argument("--context", choices=("sphere", "mod2"), default="sphere")
    massey.add_argument("--contains", default=None, help="Check that this cocycle's class lies in the coset.")
    _add_common(massey)

    motivic = commands.add_parser("motivic", help="Localized motivic routes.")
    motivic.add_argument("route", choices=("anss", "adams", "compare"))
    motivic.add_argument("--max-coweight", type=int, default=12)
    motivic.add_argument("--max-stem", type=int, default=24)
    _add_common(motivic)

    chart = commands.add_parser("chart", help="Emit an SVG or TSV chart.")
    chart.add_argument("--context", choices=("sphere", "mod2"), default="sphere")
    chart.add_argument("--projection", choices=("novikov", "adams"), default="novikov")
    chart.add_argument("--format", dest="fmt", choices=("svg", "tsv"), default="svg")
    chart.add_argument("--page", choices=("ext", "einf"), default="ext")
    chart.add_argument("--max-x", type=int, default=15)
    chart.add_argument("--max-y", type=int, default=8)
    chart.add_argument("--d1", action="store_true", help="Overlay d1 arrows.")
    _add_common(chart)

    return parser


def _job_arguments(args: argparse.Namespace) -> dict:
    if args.command == "ext":
        return {"contexts": args.context}
    if args.command == "novikov-d1":
        return {"context": args.context, "generators": tuple(args.generator or (2,))}
    if args.command == "localize":
        return {"context": args.context}
    if args.command == "verify":
        return {"suite": args.suite}
    if args.command == "massey":
        return {"a": args.a, "b": args.b, "c": args.c, "context": args.context, "member": args.contains}
    if args.command == "motivic":
        return {"route": args.route, "max_coweight": args.max_coweight, "max_stem": args.max_stem}
    return {
        "context": args.context,
        "projection": args.projection,
        "fmt": args.fmt,
        "page": args.page,
        "max_x": args.max_x,
        "max_y": args.max_y,
        "d1": args.d1,
    }


def _report_failure(check: str, detail: str) -> None:
    print(json.dumps({"check": check, "status": "fail", "detail": detail}, ensure_ascii=False), file=sys.stderr)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )

    try:
        config = load_config(
            args.config,
            max_u=args.max_u,
            max_s=args.max_s,
            max_t=args.max_t,
            block_budget=args.block_budget,
            cache_dir=args.cache_dir,
            output_dir=args.output_dir,
            workers=args.workers,
            multiplicity_threshold=args.multiplicity_threshold,
            stability_depth=args.stability_depth,
            use_cache=False if args.no_cache else None,
        )
    except (OSError, ValueError) as exc:
        _report_failure("config", str(exc))
        return EXIT_USAGE
    set_config(config)

    job = JOBS[args.command](config)
    try:
        job.run(**_job_arguments(args))
    except NovikovEtaError as exc:
        job.fail(args.command, exc)

    for result in job.results:
        if result.passed:
            print(f"{result.check}: {result.detail}")
        else:
            print(result.as_json(), file=sys.stderr)
    if not job.results:
        _report_failure(args.command, "no checks were run")
        return EXIT_FAILED
    return EXIT_OK if job.passed else EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
