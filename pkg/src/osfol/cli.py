"""Command-line front end.

Exit codes for `prove` and `saturate`: 0 proved, 1 saturated, 2 resource
limit, 3 send failure, 4 input error. `validate` exits 0 iff the network is
a certified signature tree.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .language import FreshNames, WellSortednessError, format_formula
from .network import combined_kb, combined_signature, validate_tree
from .parser import ParseError, parse_formula, parse_problem
from .report import ReportInputError, prove_centralized, run_report_safe
from .saturation import Limits, Proved, Saturated, format_trace, saturate
from .sorts import SortModuleError
from .transform import UnskolemizeFailure, unskolemize

EXIT_PROVED = 0
EXIT_SATURATED = 1
EXIT_RESOURCE_LIMIT = 2
EXIT_SEND_FAILURE = 3
EXIT_INPUT_ERROR = 4


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="osfol",
        description="Order-sorted resolution proving over distributed agent networks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser) -> None:
        p.add_argument("file", help="problem file")
        p.add_argument("--synthesize-glbs", action="store_true",
                       help="insert synthetic meets instead of rejecting glb gaps")

    p_validate = sub.add_parser("validate", help="check the signature-tree conditions")
    add_common(p_validate)
    p_validate.add_argument("--exhaustive-peak", action="store_true",
                            help="also brute-force the peak property over symbol subsets")

    p_prove = sub.add_parser("prove", help="run the distributed report procedure")
    add_common(p_prove)
    p_prove.add_argument("--query", help="file holding the query formula")
    p_prove.add_argument("--centralized", action="store_true",
                         help="saturate the combined knowledge base instead")
    p_prove.add_argument("--max-clauses", type=int, default=100_000)
    p_prove.add_argument("--timeout-secs", type=float, default=60.0)
    p_prove.add_argument("--trace", help="write the proof trace to this file")
    p_prove.add_argument("--seed", type=int, help="permute same-distance agent order")
    p_prove.add_argument("--allow-non-tree", action="store_true",
                         help="run on a pointed non-tree network (no completeness guarantee)")

    p_saturate = sub.add_parser("saturate", help="saturate the combined clause set")
    add_common(p_saturate)
    p_saturate.add_argument("--max-clauses", type=int, default=100_000)
    p_saturate.add_argument("--timeout-secs", type=float, default=60.0)
    p_saturate.add_argument("--trace", help="write the proof trace to this file")

    p_unsk = sub.add_parser("unskolemize", help="un-Skolemize the combined clause set")
    add_common(p_unsk)
    p_unsk.add_argument("--skolems", required=True,
                        help="comma-separated function symbols to treat as Skolem symbols")

    return parser


def _load_problem(args):
    text = Path(args.file).read_text()
    return parse_problem(text, synthesize_glbs_flag=args.synthesize_glbs)


def _result_exit(result) -> int:
    if isinstance(result, Proved):
        print("result: proved")
        return EXIT_PROVED
    if isinstance(result, Saturated):
        print("result: saturated")
        return EXIT_SATURATED
    print(f"result: resource limit ({result.kind})")
    return EXIT_RESOURCE_LIMIT


def _write_trace(trace_path: str | None, trace) -> None:
    text = format_trace(trace)
    if trace_path:
        Path(trace_path).write_text(text + "\n")
    else:
        print(text)


def _cmd_validate(args) -> int:
    problem = _load_problem(args)
    report = validate_tree(problem.network, exhaustive_peak=args.exhaustive_peak)
    print(report.format())
    return 0 if report.certified else 1


def _cmd_prove(args) -> int:
    problem = _load_problem(args)
    if args.query:
        query_sig = problem.network.agents[problem.network.decider].signature
        query = parse_formula(Path(args.query).read_text().strip(), query_sig)
    else:
        query = problem.query
    if query is None:
        print("error: no query (give a [query] section or --query)", file=sys.stderr)
        return EXIT_INPUT_ERROR
    limits = Limits(max_clauses=args.max_clauses, timeout_secs=args.timeout_secs)

    if args.centralized:
        result = prove_centralized(problem.network, query, limits)
        code = _result_exit(result)
        if isinstance(result, Proved):
            _write_trace(args.trace, result.trace)
        return code

    outcome = run_report_safe(
        problem.network, query, limits, seed=args.seed,
        allow_non_tree=args.allow_non_tree,
    )
    for line in outcome.log:
        print(line)
    if outcome.status == "send-failure":
        print(f"result: send failure ({outcome.failure.reason})")
        return EXIT_SEND_FAILURE
    code = _result_exit(outcome.result)
    if isinstance(outcome.result, Proved):
        _write_trace(args.trace, outcome.result.trace)
    return code


def _cmd_saturate(args) -> int:
    problem = _load_problem(args)
    sig = combined_signature(problem.network).copy()
    limits = Limits(max_clauses=args.max_clauses, timeout_secs=args.timeout_secs)
    result, db = saturate(combined_kb(problem.network), sig, limits)
    code = _result_exit(result)
    if isinstance(result, Proved):
        _write_trace(args.trace, result.trace)
    return code


def _cmd_unskolemize(args) -> int:
    problem = _load_problem(args)
    sig = combined_signature(problem.network).copy()
    fresh = FreshNames(sig.non_logical_symbols())
    skolems = [s.strip() for s in args.skolems.split(",") if s.strip()]
    unknown = [s for s in skolems if sig.function_decl(s) is None]
    if unknown:
        print(f"error: undeclared function symbols: {', '.join(unknown)}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    outcome = unskolemize(combined_kb(problem.network), skolems, sig, fresh)
    if isinstance(outcome, UnskolemizeFailure):
        print(f"error: {outcome}", file=sys.stderr)
        return EXIT_SEND_FAILURE
    for i, group in enumerate(outcome, start=1):
        for f in group.formulas:
            print(f"{i}: {format_formula(f)}")
    return 0


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "validate":
            return _cmd_validate(args)
        if args.command == "prove":
            return _cmd_prove(args)
        if args.command == "saturate":
            return _cmd_saturate(args)
        return _cmd_unskolemize(args)
    except (ParseError, SortModuleError, WellSortednessError, ReportInputError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
