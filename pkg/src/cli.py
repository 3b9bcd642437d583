#!/usr/bin/env python3
"""
Coprime Toolkit CLI

Usage:
    python -m src.cli constant --m1 6 --m2 10
    python -m src.cli constant --curve1 140.b1 --curve2 34020.c1
    python -m src.cli constant --generic --cutoff 1000000
    python -m src.cli bounds --level-bound 30030
    python -m src.cli empirical --curve1 297.a1 --curve2 405.a1 --limit 1000000
    python -m src.cli verify --suite matcount --max-ell 13
    python -m src.cli average --draws 10000 --t 1
    python -m src.cli checkpoint run.jsonl

JSON goes to stdout (or --out); logs go to stderr.
"""

import argparse
import json
import os
import sys
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional

from .average import FAMILIES, sample_average
from .catalog import Catalog, load_catalog, resolve_curve
from .config import THREADS_ENV, get_settings, load_settings, reset_settings
from .constants import (
    GenericConstant,
    SerrePairProfile,
    bounds_search,
    classical_coprime_density,
    constant_from_table,
    deviation_terms,
    generic_constant,
    serre_pair_constant,
)
from .empirical import (
    compare_report,
    divisibility_profile,
    inclusion_exclusion_check,
    obstruction_scan,
    read_checkpoint,
    write_csv,
    write_json,
)
from .errors import EXIT_OK, EXIT_USAGE, EXIT_VERIFY_FAILED, CoprimeError, DomainError, exit_code_for
from .output import log_chain_status, log_error, log_info, set_quiet
from .serre import pair_profile, serre_level
from .types import BoundsReport, ConstantReport, ExactValue, Interval
from .verify import SUITES, VerifyOptions, run_suite


def _catalog(args) -> Catalog:
    return load_catalog(Path(args.catalog) if args.catalog else None)


def _out(args) -> Optional[Path]:
    return Path(args.out) if args.out else None


def _workers(args) -> int:
    """COPRIME_THREADS beats --workers, which beats the settings file."""
    if os.environ.get(THREADS_ENV):
        return get_settings().empirical.workers
    if args.workers:
        return args.workers
    return get_settings().empirical.workers


def _interval(g: GenericConstant, value, low, high) -> Interval:
    return Interval(value=g.render(value), low=g.render(low), high=g.render(high))


def _constant_report(kind: str, g: GenericConstant, value, low, high, **fields) -> ConstantReport:
    classical = classical_coprime_density()
    return ConstantReport(
        kind=kind, cutoff=g.cutoff,
        generic=_interval(g, g.value, g.low, g.high),
        generic_heuristic=g.render(g.heuristic),
        final=_interval(g, value, low, high),
        classical_density=g.render(classical),
        below_classical=high < classical,
        **fields,
    )


def _read_table(path: Path) -> Dict[int, Fraction]:
    """{"d": "num/den" | number} -> {d: f(d)}."""
    try:
        raw = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as e:
        raise DomainError(f"cannot read table {path}: {e}") from e
    try:
        return {int(d): Fraction(str(v)) for d, v in raw.items()}
    except (AttributeError, ValueError, ZeroDivisionError) as e:
        raise DomainError(f"table {path} must map divisors to rationals: {e}") from e


def cmd_constant(args) -> int:
    """Predicted coprimality constant for a level pair, a curve pair, a table, or the generic case."""
    if args.table:
        if not args.level:
            log_error("--table needs --level M")
            return EXIT_USAGE
        result = constant_from_table(_read_table(args.table), args.level, args.cutoff)
        g = generic_constant(args.cutoff)
        report = _constant_report("table", g, result.value, result.low, result.high,
                                  M=result.M, finite_sum=ExactValue.of(result.finite_sum))
        write_json(report, _out(args))
        return EXIT_OK

    if args.generic:
        g = generic_constant(args.cutoff)
        write_json(_constant_report("generic", g, g.value, g.low, g.high), _out(args))
        return EXIT_OK

    curves: Optional[List[str]] = None
    if args.curve1 and args.curve2:
        catalog = _catalog(args)
        E1, E2 = resolve_curve(args.curve1, catalog), resolve_curve(args.curve2, catalog)
        profile = pair_profile(serre_level(E1), serre_level(E2))
        curves = [E1.name, E2.name]
    elif args.m1 and args.m2:
        profile = SerrePairProfile.from_levels(args.m1, args.m2)
    else:
        log_error("give --m1/--m2, --curve1/--curve2, --generic, or --table/--level")
        return EXIT_USAGE

    breakdown = serre_pair_constant(profile, args.cutoff)
    report = _constant_report(
        "serre_pair", breakdown.generic, breakdown.value, breakdown.low, breakdown.high,
        curves=curves, m1=profile.m1, m2=profile.m2, m=profile.m, m_prime=profile.m_prime,
        M=profile.M, ratio=ExactValue.of(breakdown.ratio),
        finite_sum=ExactValue.of(breakdown.finite_sum), routes_agree=breakdown.routes_agree,
        deviation_bound=ExactValue.of(deviation_terms(profile)), serre_assumed=curves is not None,
    )
    write_json(report, _out(args))
    return EXIT_OK


def cmd_bounds(args) -> int:
    """Extremal ratios over all admissible level pairs with lcm <= --level-bound."""
    result = bounds_search(args.level_bound, workers=_workers(args))
    report = BoundsReport(
        level_bound=result.level_bound, pair_count=result.pair_count,
        ratio_one_count=result.ratio_one_count,
        min_pair=list(result.min_pair), min_ratio=ExactValue.of(result.min_ratio),
        max_pair=list(result.max_pair), max_ratio=ExactValue.of(result.max_ratio),
        outside=[list(pair) for pair in result.outside],
    )
    write_json(report, _out(args))
    if result.outside:
        log_error(f"{len(result.outside)} pairs fall outside the ratio bounds, first {result.outside[0]}")
        return EXIT_VERIFY_FAILED
    return EXIT_OK


def cmd_empirical(args) -> int:
    """Prime scan of two curves."""
    if args.resume and not args.checkpoint:
        log_error("--resume needs --checkpoint PATH")
        return EXIT_USAGE
    catalog = _catalog(args)
    E1, E2 = resolve_curve(args.curve1, catalog), resolve_curve(args.curve2, catalog)
    workers = _workers(args)
    log_info(f"{args.scan} scan of {E1.name} x {E2.name} up to {args.limit} with {workers} worker(s)")

    if args.scan == "obstruction":
        write_json(obstruction_scan(E1, E2, args.limit, workers=workers, seed=args.seed), _out(args))
        return EXIT_OK

    if args.scan == "inclexcl":
        write_json(inclusion_exclusion_check(E1, E2, args.limit, workers=workers, seed=args.seed), _out(args))
        return EXIT_OK

    if args.scan == "divisibility":
        divisors = [int(d) for d in args.divisors.split(",") if d.strip()]
        try:
            profile = pair_profile(serre_level(E1), serre_level(E2))
        except CoprimeError as e:
            log_error(f"no prediction: {e}")
            profile = None
        report = divisibility_profile(E1, E2, args.limit, divisors, profile, workers=workers, seed=args.seed)
        write_json(report, _out(args))
        return EXIT_OK

    comparison = compare_report(
        E1, E2, args.limit, workers=workers, seed=args.seed,
        checkpoint=Path(args.checkpoint) if args.checkpoint else None,
        resume=args.resume, cutoff=args.cutoff,
    )
    write_json(comparison.report, _out(args))
    if args.csv:
        write_csv(comparison.count.checkpoints, Path(args.csv))
        log_info(f"checkpoint rows written to {args.csv}")
    if comparison.error is not None:
        return exit_code_for(comparison.error)
    return EXIT_OK


def cmd_verify(args) -> int:
    """Run one invariant suite; exit 1 on any failed check."""
    options = VerifyOptions(catalog=_catalog(args))
    if args.max_ell:
        options.max_ell = args.max_ell
    if args.level_bound:
        options.level_bound = args.level_bound
    report = run_suite(args.suite, options)
    if args.out:
        write_json(report, _out(args))
    log_info(f"{args.suite}: {sum(c.passed for c in report.checks)}/{len(report.checks)} checks passed "
             f"in {report.elapsed_ms / 1000:.1f}s")
    return EXIT_OK if report.passed else EXIT_VERIFY_FAILED


def cmd_average(args) -> int:
    """Monte-Carlo average of per-pair constants."""
    report = sample_average(
        a_bound=args.abound, b_bound=args.bbound, draws=args.draws, t=args.t,
        seed=args.seed, family=args.family, height=args.height, cutoff=args.cutoff,
        workers=_workers(args),
    )
    write_json(report, _out(args))
    return EXIT_OK


def cmd_checkpoint(args) -> int:
    """Verify a checkpoint file's hash chain."""
    header, records = read_checkpoint(Path(args.path))
    log_chain_status(len(records), records[-1]["hash"] if records else "GENESIS")
    log_info(f"run {header.run_id}: bound {header.bound}, chunk size {header.chunk_size}, "
             f"{len(records)} chunks recorded")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description="Coprime Toolkit: coprimality of elliptic curve reductions"
    )
    parser.add_argument("--catalog", help="User catalog JSON merged over the built-in one")
    parser.add_argument("--out", help="Write the JSON report here instead of stdout")
    parser.add_argument("--quiet", action="store_true", help="Silence info logging")
    parser.add_argument("--config", help="Settings YAML (default: coprime.yaml)")
    subparsers = parser.add_subparsers(dest="command", required=True)

    # constant
    constant = subparsers.add_parser("constant", help="Predicted coprimality constant")
    constant.add_argument("--m1", type=int, help="Adelic level of the first curve")
    constant.add_argument("--m2", type=int, help="Adelic level of the second curve")
    constant.add_argument("--curve1", help="Catalog label or a-invariants")
    constant.add_argument("--curve2", help="Catalog label or a-invariants")
    constant.add_argument("--generic", action="store_true", help="Generic constant only")
    constant.add_argument("--cutoff", type=int, help="Euler product prime cutoff")
    constant.add_argument("--table", help="JSON table of f(d) for a non-Serre pair")
    constant.add_argument("--level", type=int, help="M for --table")
    constant.set_defaults(func=cmd_constant)

    # bounds
    bounds = subparsers.add_parser("bounds", help="Extremal ratios over admissible level pairs")
    bounds.add_argument("--level-bound", type=int, default=30030, help="lcm(m1, m2) bound")
    bounds.add_argument("--workers", type=int, help=f"Worker processes ({THREADS_ENV} overrides)")
    bounds.set_defaults(func=cmd_bounds)

    # empirical
    empirical = subparsers.add_parser("empirical", help="Prime scan of two curves")
    empirical.add_argument("--curve1", required=True, help="Catalog label or a-invariants")
    empirical.add_argument("--curve2", required=True, help="Catalog label or a-invariants")
    empirical.add_argument("--limit", type=int, required=True, help="Scan primes p <= limit")
    empirical.add_argument("--workers", type=int, help=f"Worker processes ({THREADS_ENV} overrides)")
    empirical.add_argument("--seed", type=int, help="Seed for point counting")
    empirical.add_argument("--checkpoint", help="JSON-lines checkpoint file")
    empirical.add_argument("--resume", action="store_true", help="Continue the checkpointed run")
    empirical.add_argument("--csv", help="Write one CSV row per checkpoint here")
    empirical.add_argument("--cutoff", type=int, help="Euler product prime cutoff for the prediction")
    empirical.add_argument("--scan", default="compare",
                           choices=["compare", "obstruction", "inclexcl", "divisibility"],
                           help="Which scan to run")
    empirical.add_argument("--divisors", default="2,3,5", help="Comma-separated d for --scan divisibility")
    empirical.set_defaults(func=cmd_empirical)

    # verify
    verify = subparsers.add_parser("verify", help="Run an invariant suite")
    verify.add_argument("--suite", required=True, choices=sorted(SUITES), help="Suite to run")
    verify.add_argument("--max-ell", type=int, help="Largest prime for matcount")
    verify.add_argument("--level-bound", type=int, help="lcm bound for the bounds suite")
    verify.set_defaults(func=cmd_verify)

    # average
    average = subparsers.add_parser("average", help="Monte-Carlo average over curve pairs")
    average.add_argument("--draws", type=int, help="Number of curve pairs")
    average.add_argument("--abound", type=int, help="|a| bound (box family)")
    average.add_argument("--bbound", type=int, help="|b| bound (box family)")
    average.add_argument("--t", type=int, help="Highest central moment")
    average.add_argument("--seed", type=int, help="Sampling seed")
    average.add_argument("--family", default="box", choices=list(FAMILIES), help="Sampling family")
    average.add_argument("--height", type=int, help="T for the height family")
    average.add_argument("--cutoff", type=int, help="Euler product prime cutoff")
    average.add_argument("--workers", type=int, help=f"Worker processes ({THREADS_ENV} overrides)")
    average.set_defaults(func=cmd_average)

    # checkpoint
    checkpoint = subparsers.add_parser("checkpoint", help="Verify a checkpoint chain")
    checkpoint.add_argument("path", help="Checkpoint file")
    checkpoint.set_defaults(func=cmd_checkpoint)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    set_quiet(args.quiet)
    if args.config:
        reset_settings(load_settings(Path(args.config)))
    try:
        return args.func(args)
    except (CoprimeError, OSError, ValueError) as e:
        log_error(str(e))
        return exit_code_for(e)


if __name__ == "__main__":
    sys.exit(main())
