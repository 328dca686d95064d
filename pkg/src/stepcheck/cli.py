"""Command-line entry point: ``stepcheck <command> ...``.

Exit status: 0 all steps valid, 1 some step invalid, 2 inconclusive (or no
candidate selected), 3 operational error such as a missing or malformed file.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import __version__
from .config import Settings, load_settings
from .context import print_context
from .critic import Critic
from .errors import ContextError, FormalizationFailed, ParseError, StepcheckError
from .formalizer import FormalizationRequest, formalize
from .graph import build_graph, to_dot
from .pipeline import (
    EmptyCorpus, bench, bench_table, dump_json, endpoints, load_context, refine, select,
    write_atomic,
)

EXIT_ERROR = 3
log = logging.getLogger("stepcheck")


def _emit(text: str, settings: Settings) -> None:
    if settings.report_out is not None:
        write_atomic(settings.report_out, text)
    else:
        sys.stdout.write(text)


def cmd_verify(args, settings: Settings) -> int:
    report = Critic(settings.critic_config()).verify_context(load_context(args.context))
    _emit(dump_json(report.to_json()), settings)
    print(f"{report.overall.value}"
          + (f" (first invalid step {report.first_invalid})"
             if report.first_invalid is not None else ""), file=sys.stderr)
    return report.exit_code


def cmd_formalize(args, settings: Settings) -> int:
    problem = Path(args.problem).read_text(encoding="utf-8")
    solution = Path(args.solution).read_text(encoding="utf-8")
    _, formalizer = endpoints(settings, args.problem)
    result = formalize(FormalizationRequest(problem, solution), formalizer, args.transcript)
    text = print_context(result.context)
    if args.context_out:
        write_atomic(args.context_out, text)
    else:
        sys.stdout.write(text)
    report = Critic(settings.critic_config()).verify_context(result.context)
    if settings.report_out is not None:
        write_atomic(settings.report_out, dump_json(report.to_json()))
    print(f"formalized in {result.attempts} attempt(s); {report.overall.value}",
          file=sys.stderr)
    return report.exit_code


def cmd_refine(args, settings: Settings) -> int:
    problem = Path(args.problem).read_text(encoding="utf-8")
    generator, formalizer = endpoints(settings, args.problem)
    outcome = refine(problem, generator, formalizer, settings.max_iter,
                     Critic(settings.critic_config()), args.transcript)
    _emit(dump_json(outcome.to_json()), settings)
    status = outcome.report.overall.value if outcome.report else "no valid formalization"
    print(f"{outcome.iterations} iteration(s); {status}", file=sys.stderr)
    return outcome.exit_code


def cmd_select(args, settings: Settings) -> int:
    outcome = select(args.candidates, Critic(settings.critic_config()))
    if settings.report_out is not None:
        write_atomic(settings.report_out, dump_json(outcome.to_json()))
    print("none" if outcome.chosen is None else str(outcome.chosen))
    return 0 if outcome.chosen is not None else 2


def cmd_bench(args, settings: Settings) -> int:
    summary = bench(args.corpus, Critic(settings.critic_config()),
                    record_latency=not settings.mock)
    text = dump_json(summary)
    if settings.report_out is not None:
        write_atomic(settings.report_out, text)
        sys.stdout.write(bench_table(summary))
    else:
        sys.stderr.write(bench_table(summary))
        sys.stdout.write(text)
    return 0 if summary["label_agreement"] == len(summary["results"]) else 1


def cmd_graph(args, settings: Settings) -> int:
    _emit(to_dot(build_graph(load_context(args.context))), settings)
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="INI configuration file")
    common.add_argument("--solver-path", help="SMT solver executable (default z3)")
    common.add_argument("--timeout-ms", type=int, help="per-query solver timeout")
    common.add_argument("--max-iter", type=int, help="refinement iteration cap")
    common.add_argument("--seed", type=int, help="seed for the solver and sampling")
    common.add_argument("--report-out", type=Path, help="write the JSON output here")
    common.add_argument("--mock", action="store_true",
                        help="use scripted endpoints and omit timings")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="stepcheck", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", parents=[common], help="check every step of a context file")
    p.add_argument("context", type=Path)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("formalize", parents=[common],
                       help="translate a solution into a context, then verify it")
    p.add_argument("problem", type=Path)
    p.add_argument("solution", type=Path)
    p.add_argument("--context-out", type=Path)
    p.add_argument("--transcript", type=Path, help="append JSON-lines transcript here")
    p.set_defaults(func=cmd_formalize)

    p = sub.add_parser("refine", parents=[common], help="generate, verify and repair a solution")
    p.add_argument("problem", type=Path)
    p.add_argument("--transcript", type=Path)
    p.set_defaults(func=cmd_refine)

    p = sub.add_parser("select", parents=[common],
                       help="pick the shortest fully valid candidate")
    p.add_argument("candidates", type=Path, nargs="+")
    p.set_defaults(func=cmd_select)

    p = sub.add_parser("bench", parents=[common], help="score a labeled fixture corpus")
    p.add_argument("corpus", type=Path)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("graph", parents=[common], help="export the solution graph as DOT")
    p.add_argument("context", type=Path)
    p.set_defaults(func=cmd_graph)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        settings = load_settings(args.config, overrides={
            "solver_path": args.solver_path, "timeout_ms": args.timeout_ms,
            "max_iter": args.max_iter, "seed": args.seed,
            "report_out": args.report_out, "mock": args.mock or None,
        })
        return args.func(args, settings)
    except (OSError, ParseError, ContextError, FormalizationFailed, EmptyCorpus,
            StepcheckError, ValueError) as exc:
        print(f"stepcheck: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
