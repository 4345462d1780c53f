import pytest

from nosignal import Deliver, Silence, SpacetimeConfig, TaskSpec
from nosignal.tasks import paradox_requirements


def make_instance(gap: int):
    """Canonical two-lab instance: labs a distance ``gap`` apart, horizon ``gap``."""
    cfg = SpacetimeConfig({"L": 0, "R": gap}, horizon=gap)
    task1 = TaskSpec("task1", Deliver("L", "R", gap), (Silence("R", "L"),))
    task2 = TaskSpec("task2", Deliver("R", "L", gap), (Silence("L", "R"),))
    tasks = {"task1": task1, "task2": task2}
    return cfg, tasks, paradox_requirements(cfg, task1, task2)


def oracle_scenarios(requirements, tasks):
    """Requirements in the plain-tuple form the test oracles consume."""
    out = []
    for req in requirements:
        requests = [(r.task, r.location, r.time) for r in req.scenario.requests]
        rows = [
            (
                (tasks[tid].deliver.origin, tasks[tid].deliver.dest, tasks[tid].deliver.at),
                {(b.origin, b.dest) for b in tasks[tid].silence},
            )
            for tid in req.scenario.task_ids()
        ]
        out.append((requests, req.rule.value, rows))
    return out


def raw_points(certificate):
    """Certificate decision points in the oracle key encoding."""
    return [
        (agent, t, tuple((e.time, e.kind, e.label) for e in history.events))
        for agent, t, history in certificate.decision_points
    ]


@pytest.fixture(scope="session")
def d3():
    return make_instance(3)
