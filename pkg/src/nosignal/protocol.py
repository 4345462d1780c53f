"""Agents, local observation histories, strategies, and the executor.

The no-signaling constraint is structural rather than checked after the
fact: a strategy is a lookup table keyed by an agent's ``LocalHistory``,
and a local history contains only requests submitted at the agent's own
location and signals that have already arrived there. There is simply no
channel through which an action could depend on remote or future state.

Execution is a synchronous lockstep loop. Within one step, delivery
happens before decisions, so a request submitted at time t is visible to
the decision taken at time t.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Mapping

from .errors import InvalidScenario, SameLocation, UnachievableTask
from .spacetime import SpacetimeConfig, distance

if TYPE_CHECKING:
    from .tasks import TaskSpec

KIND_REQUEST = "request"
KIND_SIGNAL = "signal"  # sorts after "request", giving the canonical order for free


@dataclass(frozen=True, order=True)
class ReceivedEvent:
    """One observable item: a submitted request or an arriving signal.

    Field order makes tuple comparison the canonical history order:
    ascending time, requests before signal arrivals, then label lexically.
    The label is a task id for requests and the origin location for arrivals.
    """

    time: int
    kind: str
    label: str

    @classmethod
    def request(cls, time: int, task: str) -> "ReceivedEvent":
        return cls(time, KIND_REQUEST, task)

    @classmethod
    def signal(cls, time: int, origin: str) -> "ReceivedEvent":
        return cls(time, KIND_SIGNAL, origin)


@dataclass(frozen=True)
class LocalHistory:
    """Everything one agent may condition on at time ``upto``.

    Events are kept in canonical order, so structural equality decides
    whether two histories are the same observation record.
    """

    agent: str
    upto: int
    events: tuple[ReceivedEvent, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "events", tuple(sorted(self.events)))
        for ev in self.events:
            if ev.time > self.upto:
                raise ValueError(f"event at t={ev.time} after history cutoff {self.upto}")


@dataclass(frozen=True)
class Action:
    """Destinations to send a content-free light signal to; empty means idle."""

    sends: frozenset[str] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "sends", frozenset(self.sends))


NOOP = Action()


@dataclass
class Strategy:
    """Deterministic map from (agent, local history) to an action.

    Unmapped histories fall back to the empty action, which makes every
    table a total strategy and "do nothing" the base case.
    """

    table: dict[tuple[str, LocalHistory], Action] = field(default_factory=dict)

    def action_for(self, agent: str, history: LocalHistory) -> Action:
        return self.table.get((agent, history), NOOP)


@dataclass(frozen=True, order=True)
class TaskRequest:
    """A single request: which task, submitted where, submitted when."""

    task: str
    location: str
    time: int


@dataclass(frozen=True)
class Scenario:
    """The requester's choice of which tasks to ask for, where and when."""

    requests: frozenset[TaskRequest] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "requests", frozenset(self.requests))
        slots = {(r.location, r.time) for r in self.requests}
        if len(slots) != len(self.requests):
            raise InvalidScenario("at most one request per (location, time) slot")

    def task_ids(self) -> tuple[str, ...]:
        return tuple(sorted({r.task for r in self.requests}))


@dataclass(frozen=True)
class Trace:
    """Complete record of one execution.

    An arrival is listed only when it lands at or before the horizon; a
    departure too late to arrive still shows up in ``departures``.
    Triples are (task, location, time) for requests and
    (origin, dest, time) for departures and arrivals.
    """

    requests: frozenset[tuple[str, str, int]] = frozenset()
    departures: frozenset[tuple[str, str, int]] = frozenset()
    arrivals: frozenset[tuple[str, str, int]] = frozenset()


def check_scenario(scenario: Scenario, cfg: SpacetimeConfig) -> None:
    for r in scenario.requests:
        if r.location not in cfg.locations:
            raise InvalidScenario(f"request for {r.task!r} at unknown location {r.location!r}")
        if not 0 <= r.time <= cfg.horizon:
            raise InvalidScenario(f"request for {r.task!r} at t={r.time} outside [0, {cfg.horizon}]")


def check_trace(trace: Trace, cfg: SpacetimeConfig) -> None:
    """Assert the departure/arrival matching invariants of a trace."""
    for origin, dest, at in trace.arrivals:
        if (origin, dest, at - distance(origin, dest, cfg)) not in trace.departures:
            raise ValueError(f"arrival {(origin, dest, at)} has no matching departure")
    for origin, dest, t in trace.departures:
        arrives = t + distance(origin, dest, cfg)
        if arrives <= cfg.horizon and (origin, dest, arrives) not in trace.arrivals:
            raise ValueError(f"departure {(origin, dest, t)} lost its arrival at t={arrives}")


def local_history(trace: Trace, agent: str, t: int, cfg: SpacetimeConfig) -> LocalHistory:
    """The canonical observation record for ``agent`` at time ``t``.

    Contains exactly the requests submitted at the agent's location and the
    signal arrivals delivered there, up to and including ``t``.
    """
    cfg.coord(agent)
    if not 0 <= t <= cfg.horizon:
        raise ValueError(f"time {t} outside [0, {cfg.horizon}]")
    events = [
        ReceivedEvent.request(time, task)
        for task, loc, time in trace.requests
        if loc == agent and time <= t
    ]
    events += [
        ReceivedEvent.signal(at, origin)
        for origin, dest, at in trace.arrivals
        if dest == agent and at <= t
    ]
    return LocalHistory(agent, t, tuple(events))


def execute(cfg: SpacetimeConfig, scenario: Scenario, strategy: Strategy) -> Trace:
    """Run the synchronous loop over t = 0..horizon and return the trace.

    Per step: deliver requests submitted at t and signals arriving at t,
    then let every agent look up the action for its history up to t, then
    turn each send into a departure at t arriving at t + distance.
    Identical inputs yield identical traces.
    """
    check_scenario(scenario, cfg)
    received: dict[str, list[ReceivedEvent]] = {a: [] for a in cfg.agents}
    pending: dict[int, list[tuple[str, str]]] = {}
    departures: set[tuple[str, str, int]] = set()
    arrivals: set[tuple[str, str, int]] = set()
    requests_at: dict[int, list[TaskRequest]] = {}
    for r in sorted(scenario.requests):
        requests_at.setdefault(r.time, []).append(r)

    for t in range(cfg.horizon + 1):
        for r in requests_at.get(t, ()):
            received[r.location].append(ReceivedEvent.request(t, r.task))
        for origin, dest in pending.pop(t, ()):
            arrivals.add((origin, dest, t))
            received[dest].append(ReceivedEvent.signal(t, origin))
        for agent in cfg.agents:
            history = LocalHistory(agent, t, tuple(received[agent]))
            for dest in sorted(strategy.action_for(agent, history).sends):
                if dest == agent:
                    raise SameLocation(f"agent {agent!r} cannot send to itself")
                arrives = t + distance(agent, dest, cfg)
                departures.add((agent, dest, t))
                if arrives <= cfg.horizon:
                    pending.setdefault(arrives, []).append((agent, dest))

    return Trace(
        requests=frozenset((r.task, r.location, r.time) for r in scenario.requests),
        departures=frozenset(departures),
        arrivals=frozenset(arrivals),
    )


def obedient_strategy(cfg: SpacetimeConfig, tasks: Mapping[str, "TaskSpec"]) -> Strategy:
    """The strategy where each agent does exactly what a request asks.

    For a task delivering origin -> dest at time ``at``, the request is
    expected at the origin lab at s = at - distance(origin, dest); the
    history holding just that request maps to a send, everything else to
    the empty action.
    """
    table: dict[tuple[str, LocalHistory], Action] = {}
    for task_id in sorted(tasks):
        deliver = tasks[task_id].deliver
        submit = deliver.at - distance(deliver.origin, deliver.dest, cfg)
        if submit < 0 or deliver.at > cfg.horizon:
            raise UnachievableTask(
                f"task {task_id!r}: delivery at t={deliver.at} cannot be scheduled "
                f"within horizon {cfg.horizon}"
            )
        history = LocalHistory(
            deliver.origin, submit, (ReceivedEvent.request(submit, task_id),)
        )
        table[(deliver.origin, history)] = Action(frozenset({deliver.dest}))
    return Strategy(table)
