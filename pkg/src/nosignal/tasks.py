"""Task predicates, requirement bundles, and their evaluation against traces.

A task succeeds on a trace when its single delivery atom is matched by an
arrival at exactly the requested time and none of its silence bans is
broken by any departure over the whole run. A requirement pairs a scenario
with a rule saying whether every requested task must succeed or any one
suffices; a set of requirements is the requester's whole range of freedom.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Mapping

from .errors import DuplicateTask, ValidationError
from .protocol import Scenario, Strategy, TaskRequest, Trace, execute
from .spacetime import SpacetimeConfig


@dataclass(frozen=True)
class Deliver:
    """Require an arrival ``origin -> dest`` at exactly time ``at``."""

    origin: str
    dest: str
    at: int

    def __post_init__(self):
        if self.origin == self.dest:
            raise ValidationError("deliver endpoints must differ")


@dataclass(frozen=True)
class Silence:
    """Forbid any departure ``origin -> dest`` at any time in the run."""

    origin: str
    dest: str

    def __post_init__(self):
        if self.origin == self.dest:
            raise ValidationError("silence endpoints must differ")


@dataclass(frozen=True)
class TaskSpec:
    """Success predicate over traces: one exact delivery plus silence bans."""

    id: str
    deliver: Deliver
    silence: tuple[Silence, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "silence", tuple(self.silence))


class Rule(str, Enum):
    ALL = "all"
    AT_LEAST_ONE = "at_least_one"


@dataclass(frozen=True)
class Requirement:
    """One scenario plus how many of its requested tasks must succeed."""

    scenario: Scenario
    rule: Rule

    def __post_init__(self):
        if self.rule is Rule.AT_LEAST_ONE and not self.scenario.requests:
            raise ValidationError("at_least_one requires a non-empty scenario")


@dataclass(frozen=True)
class RequirementReport:
    """Per-task verdicts for one requirement and the combined outcome."""

    requirement: Requirement
    verdicts: dict[str, bool]
    satisfied: bool


def check_task(task: TaskSpec, cfg: SpacetimeConfig) -> None:
    cfg.coord(task.deliver.origin)
    cfg.coord(task.deliver.dest)
    if not 0 <= task.deliver.at <= cfg.horizon:
        raise ValidationError(
            f"task {task.id!r}: deliver.at {task.deliver.at} outside [0, {cfg.horizon}]"
        )
    for ban in task.silence:
        cfg.coord(ban.origin)
        cfg.coord(ban.dest)


def evaluate_task(trace: Trace, task: TaskSpec, cfg: SpacetimeConfig) -> bool:
    """Pure predicate: delivery arrived exactly on time and silence held."""
    check_task(task, cfg)
    deliver = task.deliver
    if (deliver.origin, deliver.dest, deliver.at) not in trace.arrivals:
        return False
    banned = {(ban.origin, ban.dest) for ban in task.silence}
    return not any((origin, dest) in banned for origin, dest, _ in trace.departures)


def report_for_trace(
    trace: Trace,
    requirement: Requirement,
    tasks: Mapping[str, TaskSpec],
    cfg: SpacetimeConfig,
) -> RequirementReport:
    """Judge one requirement against an already-computed trace."""
    verdicts = {}
    for task_id in requirement.scenario.task_ids():
        if task_id not in tasks:
            raise ValidationError(f"scenario references undefined task {task_id!r}")
        verdicts[task_id] = evaluate_task(trace, tasks[task_id], cfg)
    combine = all if requirement.rule is Rule.ALL else any
    return RequirementReport(requirement, verdicts, combine(verdicts.values()))


def evaluate_requirement(
    cfg: SpacetimeConfig,
    strategy: Strategy,
    requirement: Requirement,
    tasks: Mapping[str, TaskSpec],
) -> RequirementReport:
    """Execute the requirement's scenario once and judge each requested task."""
    trace = execute(cfg, requirement.scenario, strategy)
    return report_for_trace(trace, requirement, tasks, cfg)


def paradox_requirements(
    cfg: SpacetimeConfig, task1: TaskSpec, task2: TaskSpec
) -> list[Requirement]:
    """The three-way bundle that creates the choice trap.

    Each task alone must succeed (rules All), and when both are requested
    at t=0 either one would do (rule AtLeastOne). Requests are submitted at
    each task's delivery origin.
    """
    if task1.id == task2.id:
        raise DuplicateTask(f"need two distinct tasks, got {task1.id!r} twice")
    check_task(task1, cfg)
    check_task(task2, cfg)
    single = [
        Requirement(
            Scenario(frozenset({TaskRequest(t.id, t.deliver.origin, 0)})), Rule.ALL
        )
        for t in (task1, task2)
    ]
    both = Requirement(
        Scenario(
            frozenset(
                {
                    TaskRequest(task1.id, task1.deliver.origin, 0),
                    TaskRequest(task2.id, task2.deliver.origin, 0),
                }
            )
        ),
        Rule.AT_LEAST_ONE,
    )
    return [*single, both]
