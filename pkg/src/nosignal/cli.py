"""Command line front end.

Subcommands: ``simulate`` (run one scenario and print the trace, verdicts,
and diagram), ``search`` (synthesize a strategy for the document's
requirements or certify impossibility), ``check`` (evaluate a strategy
file against every requirement), and ``diagram`` (print just the picture).

Exit codes: 0 ok/found, 1 usage error, 2 invalid input, 3 requirements
unsatisfiable or unsatisfied, 4 search aborted on limits.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from typing import Any

from .config import (
    ConfigDocument,
    load_config,
    load_strategy,
    strategy_rows,
)
from .diagram import render_diagram
from .errors import SimulationError
from .protocol import Scenario, Strategy, Trace, execute, obedient_strategy
from .search import Aborted, Found, Impossible, SearchLimits, find_strategy
from .tasks import RequirementReport, evaluate_requirement, evaluate_task

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INVALID = 2
EXIT_UNSATISFIED = 3
EXIT_ABORTED = 4


class _Parser(argparse.ArgumentParser):
    """argparse with the usage-error exit code pinned to 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", required=True, help="path to a JSON config document")
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--limits-branches", type=int, metavar="N",
                        help="cap on explored complete strategies")
    common.add_argument("--limits-decisions", type=int, metavar="N",
                        help="cap on distinct decision points")

    parser = _Parser(prog="nosignal",
                     description="simulate and search local signaling strategies")
    sub = parser.add_subparsers(dest="command", required=True)

    simulate = sub.add_parser("simulate", parents=[common],
                              help="execute one scenario and report verdicts")
    simulate.add_argument("--scenario", required=True, help="scenario name from the config")
    simulate.add_argument("--strategy", default="obedient",
                          help="'obedient' or a strategy file path (default: obedient)")
    simulate.set_defaults(func=cmd_simulate)

    search = sub.add_parser("search", parents=[common],
                            help="find a strategy for all requirements or certify impossibility")
    search.set_defaults(func=cmd_search)

    check = sub.add_parser("check", parents=[common],
                           help="evaluate a strategy against every requirement")
    check.add_argument("--strategy", required=True,
                       help="'obedient' or a strategy file path")
    check.set_defaults(func=cmd_check)

    diagram = sub.add_parser("diagram", parents=[common],
                             help="print the spacetime diagram of one scenario")
    diagram.add_argument("--scenario", required=True)
    diagram.add_argument("--strategy", default="obedient")
    diagram.set_defaults(func=cmd_diagram)
    return parser


def _load_document(path: str) -> ConfigDocument:
    with open(path, encoding="utf-8") as handle:
        return load_config(handle.read())


def _pick_scenario(doc: ConfigDocument, name: str) -> Scenario:
    if name not in doc.scenarios:
        raise SimulationError(f"unknown scenario {name!r}")
    return doc.scenarios[name]


def _pick_strategy(source: str, doc: ConfigDocument) -> Strategy:
    if source == "obedient":
        return obedient_strategy(doc.spacetime, doc.tasks)
    with open(source, encoding="utf-8") as handle:
        return load_strategy(handle.read(), doc.spacetime, doc.tasks)


def _pick_limits(args, doc: ConfigDocument) -> SearchLimits:
    limits = doc.limits or SearchLimits()
    if args.limits_branches is not None:
        limits = dataclasses.replace(limits, max_branches=args.limits_branches)
    if args.limits_decisions is not None:
        limits = dataclasses.replace(limits, max_decision_points=args.limits_decisions)
    return limits


def _trace_lines(trace: Trace) -> list[str]:
    rows = [(t, 0, f"t={t}  request {task} at {loc}") for task, loc, t in trace.requests]
    rows += [(t, 1, f"t={t}  depart  {o} -> {d}") for o, d, t in trace.departures]
    rows += [(t, 2, f"t={t}  arrive  {o} -> {d}") for o, d, t in trace.arrivals]
    return [text for _, _, text in sorted(rows)] or ["(empty trace)"]


def _trace_json(trace: Trace) -> dict[str, Any]:
    return {
        "requests": sorted(list(r) for r in trace.requests),
        "departures": sorted(list(d) for d in trace.departures),
        "arrivals": sorted(list(a) for a in trace.arrivals),
    }


def _history_label(history) -> str:
    if not history.events:
        return "[]"
    parts = []
    for event in history.events:
        if event.kind == "request":
            parts.append(f"request {event.label} @{event.time}")
        else:
            parts.append(f"signal from {event.label} @{event.time}")
    return "[" + ", ".join(parts) + "]"


def _print_strategy(strategy: Strategy) -> None:
    if not strategy.table:
        print("  (empty table: every agent always does nothing)")
        return
    ordered = sorted(strategy.table.items(),
                     key=lambda kv: (kv[0][0], kv[0][1].upto, kv[0][1].events))
    for (agent, history), action in ordered:
        sends = ", ".join(sorted(action.sends)) or "nothing"
        print(f"  {agent}  t={history.upto}  {_history_label(history)}  -> send {sends}")


def _report_json(report: RequirementReport, label: str) -> dict[str, Any]:
    return {
        "scenario": label,
        "rule": report.requirement.rule.value,
        "verdicts": dict(sorted(report.verdicts.items())),
        "satisfied": report.satisfied,
    }


def cmd_simulate(args) -> int:
    doc = _load_document(args.config)
    scenario = _pick_scenario(doc, args.scenario)
    strategy = _pick_strategy(args.strategy, doc)
    trace = execute(doc.spacetime, scenario, strategy)
    verdicts = {
        task_id: evaluate_task(trace, task, doc.spacetime)
        for task_id, task in sorted(doc.tasks.items())
    }
    picture = render_diagram(trace, doc.spacetime)
    if args.json:
        print(json.dumps({
            "scenario": args.scenario,
            "strategy": args.strategy,
            "trace": _trace_json(trace),
            "verdicts": verdicts,
            "diagram": picture,
        }, indent=2))
        return EXIT_OK
    print(f"scenario {args.scenario!r} with strategy {args.strategy!r}")
    for line in _trace_lines(trace):
        print(f"  {line}")
    print("verdicts:")
    for task_id, ok in verdicts.items():
        print(f"  {task_id}: {'satisfied' if ok else 'unsatisfied'}")
    print()
    print(picture, end="")
    return EXIT_OK


def cmd_search(args) -> int:
    doc = _load_document(args.config)
    if not doc.requirements:
        raise SimulationError("config document declares no requirements")
    requirements = doc.resolve_requirements()
    outcome = find_strategy(doc.spacetime, requirements, doc.tasks, _pick_limits(args, doc))

    if isinstance(outcome, Found):
        if args.json:
            print(json.dumps({
                "outcome": "found",
                "strategy": {"rows": strategy_rows(outcome.strategy)},
                "reports": [
                    _report_json(report, named.scenario)
                    for report, named in zip(outcome.reports, doc.requirements)
                ],
            }, indent=2))
        else:
            print(f"found a strategy satisfying all {len(requirements)} requirements:")
            _print_strategy(outcome.strategy)
        return EXIT_OK

    if isinstance(outcome, Impossible):
        cert = outcome.certificate
        if args.json:
            print(json.dumps({
                "outcome": "impossible",
                "strategies_explored": cert.strategies_explored,
                "decision_points": len(cert.decision_points),
                "failures_by_requirement": {
                    str(idx): count
                    for idx, count in sorted(cert.failures_by_requirement().items())
                },
            }, indent=2))
        else:
            print(f"impossible: all {cert.strategies_explored} complete strategies over "
                  f"{len(cert.decision_points)} decision points fail some requirement")
            for idx, count in sorted(cert.failures_by_requirement().items()):
                named = doc.requirements[idx]
                print(f"  requirement {idx + 1} ({named.rule.value} of {named.scenario!r}): "
                      f"first failure on {count} strategies")
        return EXIT_UNSATISFIED

    assert isinstance(outcome, Aborted)
    if args.json:
        print(json.dumps({
            "outcome": "aborted",
            "limit": outcome.limit,
            "strategies_explored": outcome.strategies_explored,
            "decision_points": outcome.decision_points,
        }, indent=2))
    else:
        print(f"aborted: {outcome.limit} limit hit after {outcome.strategies_explored} "
              f"strategies and {outcome.decision_points} decision points")
    return EXIT_ABORTED


def cmd_check(args) -> int:
    doc = _load_document(args.config)
    strategy = _pick_strategy(args.strategy, doc)
    reports = []
    for named, requirement in zip(doc.requirements, doc.resolve_requirements()):
        reports.append((named, evaluate_requirement(doc.spacetime, strategy, requirement, doc.tasks)))
    all_ok = all(report.satisfied for _, report in reports)
    if args.json:
        print(json.dumps({
            "reports": [_report_json(report, named.scenario) for named, report in reports],
            "all_satisfied": all_ok,
        }, indent=2))
    else:
        for i, (named, report) in enumerate(reports, 1):
            verdicts = ", ".join(f"{tid}={'ok' if ok else 'fail'}"
                                 for tid, ok in sorted(report.verdicts.items()))
            status = "satisfied" if report.satisfied else "UNSATISFIED"
            print(f"requirement {i} ({named.rule.value} of {named.scenario!r}): "
                  f"{status}  [{verdicts or 'no tasks requested'}]")
        print("all requirements satisfied" if all_ok else "some requirements unsatisfied")
    return EXIT_OK if all_ok else EXIT_UNSATISFIED


def cmd_diagram(args) -> int:
    doc = _load_document(args.config)
    scenario = _pick_scenario(doc, args.scenario)
    strategy = _pick_strategy(args.strategy, doc)
    picture = render_diagram(execute(doc.spacetime, scenario, strategy), doc.spacetime)
    if args.json:
        print(json.dumps({"diagram": picture}, indent=2))
    else:
        print(picture, end="")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exit_:
        return exit_.code if isinstance(exit_.code, int) else EXIT_USAGE
    try:
        return args.func(args)
    except (SimulationError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
