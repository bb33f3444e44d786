"""Command line entry point: ``sclplan <command> ...``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from ..controller import Budgets, Mode
from ..llm.backends import BackendError
from ..pddl import PDDLError, ground, parse_domain, parse_problem, validate_plan
from ..search import SearchConfig, Solved, solve, solve_oracle
from ..sim.tasks import ConfigError
from .metrics import delta_report
from .runner import run_suite, write_run

MODES = [m.value for m in Mode]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sclplan", description="Hybrid LLM and symbolic planning benchmark")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a task suite and write metrics and transcripts")
    run.add_argument("--suite", required=True, help="simple, complex, robot or a suite JSON path")
    run.add_argument("--mode", action="append", choices=MODES + ["all"],
                     help="controller mode; repeat the flag for several (default: all)")
    run.add_argument("--backend", required=True,
                     help="scripted:PATH, record:PATH, live or synthetic:PROFILE[:SEED[:VARIANTS]]")
    run.add_argument("--repeats", type=int, default=1)
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--jobs", type=int, default=1)
    run.add_argument("--sample", type=int, help="number of tasks to draw (default: all, or 10 when repeating)")
    run.add_argument("--max-steps", type=int, help="override the suite's step budget")
    run.add_argument("--out", required=True, type=Path)

    report = sub.add_parser("report", help="print candidate-minus-baseline deltas")
    report.add_argument("--baseline", required=True, type=Path)
    report.add_argument("--candidate", required=True, type=Path)

    check = sub.add_parser("validate-domain", help="parse a PDDL domain and summarize it")
    check.add_argument("file", type=Path)

    plan = sub.add_parser("solve", help="solve a PDDL problem with BFS(f)")
    plan.add_argument("--domain", required=True, type=Path)
    plan.add_argument("--problem", required=True, type=Path)
    plan.add_argument("--width", type=int, choices=(1, 2), default=2)
    plan.add_argument("--node-budget", type=int, default=SearchConfig.node_budget)
    plan.add_argument("--oracle", action="store_true", help="also run breadth-first search and compare")
    plan.add_argument("--dump-frontier", type=Path, help="write one line per expanded node to this file")

    scripts = sub.add_parser("make-scripts", help="re-record the shipped replay scripts")
    scripts.add_argument("--out", type=Path, help="output directory (default: the bundled scripts)")
    scripts.add_argument("--jobs", type=int, default=1)
    scripts.add_argument("--profile", action="append", help="only these profiles")
    scripts.add_argument("--suite", action="append", help="only these suites")
    scripts.add_argument("--no-sampled", action="store_true", help="skip the sampled-variant scripts")
    return parser


def cmd_run(args) -> int:
    modes = args.mode or ["all"]
    modes = list(Mode) if "all" in modes else [Mode(m) for m in dict.fromkeys(modes)]
    budgets = Budgets(max_steps=args.max_steps)
    runs = []
    for mode in modes:
        run = run_suite(args.suite, mode, args.backend, args.repeats, args.seed, args.jobs, args.sample, budgets)
        for err in run.errors:
            print(f"error: {err}", file=sys.stderr)
        runs.append(run)
    if not any(r.results for r in runs):
        print("error: no episode finished", file=sys.stderr)
        return 1
    table = write_run(runs, args.out)
    print(table.to_text(), end="")
    print(f"wrote {args.out / 'metrics.csv'}")
    return 1 if any(r.errors for r in runs) else 0


def cmd_report(args) -> int:
    print(delta_report(args.baseline.read_text(), args.candidate.read_text()), end="")
    return 0


def cmd_validate_domain(args) -> int:
    domain = parse_domain(args.file.read_text())
    print(f"domain {domain.name}: {len(domain.types)} types, {len(domain.predicates)} predicates, "
          f"{len(domain.actions)} actions")
    for act in domain.actions:
        print(f"  {act.name}/{len(act.params)}")
    return 0


def cmd_solve(args) -> int:
    domain = parse_domain(args.domain.read_text())
    task = ground(domain, parse_problem(args.problem.read_text(), domain))
    config = SearchConfig(max_novelty_width=args.width, node_budget=args.node_budget)
    if args.dump_frontier:
        with open(args.dump_frontier, "w") as trace:
            outcome = solve(task, config, trace)
    else:
        outcome = solve(task, config)
    if isinstance(outcome, Solved):
        for act in outcome.plan:
            print(act)
        trace = validate_plan(task, outcome.plan)
        print(f"; cost {outcome.plan.cost}, expanded {outcome.expanded}, "
              f"{'valid' if trace.valid else 'INVALID'}")
    else:
        print(f"; no plan: {type(outcome).__name__.lower()} after {outcome.expanded} expansions")
    if args.oracle:
        ref = solve_oracle(task)
        agree = isinstance(ref, Solved) == isinstance(outcome, Solved)
        cost = ref.plan.cost if isinstance(ref, Solved) else "none"
        print(f"; oracle: optimal cost {cost}, {'agrees' if agree else 'DISAGREES'}")
        if not agree:
            return 1
    return 0 if isinstance(outcome, Solved) else 2


def cmd_make_scripts(args) -> int:
    from .scripts import PROFILES, SUITES, make_scripts

    paths = make_scripts(args.out, tuple(args.profile or PROFILES), tuple(args.suite or SUITES), args.jobs,
                         stochastic=not args.no_sampled)
    for p in paths:
        print(p)
    return 0


COMMANDS = {
    "run": cmd_run,
    "report": cmd_report,
    "validate-domain": cmd_validate_domain,
    "solve": cmd_solve,
    "make-scripts": cmd_make_scripts,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, BackendError, PDDLError, OSError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
