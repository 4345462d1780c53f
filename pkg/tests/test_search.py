"""Strategy search, impossibility certificates, and the audit operations."""

import pytest
from hypothesis import given, settings

from conftest import make_instance, oracle_scenarios, raw_points
from nosignal import (
    Aborted,
    Deliver,
    Found,
    Impossible,
    Requirement,
    Rule,
    Scenario,
    SearchLimits,
    Silence,
    SpaceTooLarge,
    SpacetimeConfig,
    Strategy,
    TaskRequest,
    TaskSpec,
    evaluate_requirement,
    find_strategy,
    indistinguishable,
    mutually_exclusive,
    no_signaling_audit,
    obedient_strategy,
)
from oracles import brute_force_joint_satisfiable, recount_leaves


def scenario(*requests):
    return Scenario(frozenset(TaskRequest(*r) for r in requests))


class TestFindStrategy:
    def test_single_request_bundle_found(self, d3):
        cfg, tasks, (r1, r2, _) = d3
        outcome = find_strategy(cfg, [r1, r2], tasks)
        assert isinstance(outcome, Found)
        assert all(report.satisfied for report in outcome.reports)
        # independent re-check of the returned strategy
        for req in (r1, r2):
            assert evaluate_requirement(cfg, outcome.strategy, req, tasks).satisfied
        # the obedient strategy is among the valid answers
        obedient = obedient_strategy(cfg, tasks)
        for req in (r1, r2):
            assert evaluate_requirement(cfg, obedient, req, tasks).satisfied

    def test_full_bundle_impossible(self, d3):
        cfg, tasks, bundle = d3
        outcome = find_strategy(cfg, bundle, tasks)
        assert isinstance(outcome, Impossible)
        cert = outcome.certificate
        assert cert.strategies_explored >= 1
        assert len(cert.leaf_failures) == cert.strategies_explored
        assert all(0 <= idx < len(bundle) for idx in cert.leaf_failures)

    def test_dual_scenario_alone_found(self, d3):
        cfg, tasks, (_, _, r3) = d3
        outcome = find_strategy(cfg, [r3], tasks)
        assert isinstance(outcome, Found)
        assert evaluate_requirement(cfg, outcome.strategy, r3, tasks).satisfied

    def test_more_freedom_flips_found_to_impossible(self):
        for gap in (1, 2, 3):
            cfg, tasks, (r1, r2, r3) = make_instance(gap)
            assert isinstance(find_strategy(cfg, [r1, r2], tasks), Found)
            assert isinstance(find_strategy(cfg, [r3], tasks), Found)
            assert isinstance(find_strategy(cfg, [r1, r2, r3], tasks), Impossible)

    def test_deterministic_outcomes(self):
        cfg, tasks, bundle = make_instance(2)
        assert find_strategy(cfg, bundle, tasks) == find_strategy(cfg, bundle, tasks)
        r1, r2, _ = bundle
        assert find_strategy(cfg, [r1, r2], tasks) == find_strategy(cfg, [r1, r2], tasks)

    def test_branch_limit_aborts(self, d3):
        cfg, tasks, bundle = d3
        outcome = find_strategy(cfg, bundle, tasks, SearchLimits(max_branches=1))
        assert outcome == Aborted("branches", 1, outcome.decision_points)

    def test_decision_limit_aborts(self, d3):
        cfg, tasks, bundle = d3
        outcome = find_strategy(cfg, bundle, tasks, SearchLimits(max_decision_points=1))
        assert isinstance(outcome, Aborted)
        assert outcome.limit == "decision_points"

    def test_no_requirements_is_trivially_found(self, d3):
        cfg, tasks, _ = d3
        outcome = find_strategy(cfg, [], tasks)
        assert isinstance(outcome, Found)
        assert outcome.strategy.table == {}

    def test_three_locations(self):
        cfg = SpacetimeConfig({"A": 0, "B": 1, "C": 2}, horizon=2)
        task = TaskSpec("t", Deliver("A", "C", 2), (Silence("C", "A"),))
        requirement = Requirement(
            Scenario(frozenset({TaskRequest("t", "A", 0)})), Rule.ALL
        )
        outcome = find_strategy(cfg, [requirement], {"t": task})
        assert isinstance(outcome, Found)
        assert evaluate_requirement(cfg, outcome.strategy, requirement, {"t": task}).satisfied


class TestCertificateSoundness:
    def test_counts_match_independent_recount(self):
        """The lazy recount re-derives the leaf count with its own executor
        and a different traversal order."""
        for gap in (1, 2, 3):
            cfg, tasks, bundle = make_instance(gap)
            outcome = find_strategy(cfg, bundle, tasks)
            assert isinstance(outcome, Impossible)
            leaves, any_winner = recount_leaves(
                cfg.locations, cfg.horizon, oracle_scenarios(bundle, tasks)
            )
            assert leaves == outcome.certificate.strategies_explored
            assert not any_winner

    def test_decision_points_well_formed(self, d3):
        cfg, tasks, bundle = d3
        outcome = find_strategy(cfg, bundle, tasks)
        points = raw_points(outcome.certificate)
        assert len(points) == len(set(points))
        for agent, t, history in outcome.certificate.decision_points:
            assert agent in cfg.locations
            assert 0 <= t <= cfg.horizon
            assert history.agent == agent and history.upto == t


class TestMutuallyExclusive:
    def test_canonical_pair_for_small_gaps(self):
        for gap in (1, 2, 3):
            cfg, tasks, _ = make_instance(gap)
            assert mutually_exclusive(cfg, tasks["task1"], tasks["task2"])

    def test_self_pair_jointly_satisfiable(self, d3):
        cfg, tasks, _ = d3
        assert not mutually_exclusive(cfg, tasks["task1"], tasks["task1"])

    def test_silence_free_variants_jointly_satisfiable(self, d3):
        """With both silence bans removed, {(L,R,0), (R,L,0)} satisfies both;
        removing only one ban leaves the other task's ban in force."""
        cfg, _, _ = d3
        bare1 = TaskSpec("task1", Deliver("L", "R", 3))
        bare2 = TaskSpec("task2", Deliver("R", "L", 3))
        assert not mutually_exclusive(cfg, bare1, bare2)
        still_banned = TaskSpec("task1", Deliver("L", "R", 3), (Silence("R", "L"),))
        assert mutually_exclusive(cfg, still_banned, bare2)

    def test_agrees_with_independent_enumeration(self, d3):
        cfg, tasks, _ = d3
        rows = [
            (("L", "R", 3), {("R", "L")}),
            (("R", "L", 3), {("L", "R")}),
        ]
        assert not brute_force_joint_satisfiable(cfg.locations, cfg.horizon, rows)
        assert brute_force_joint_satisfiable(
            cfg.locations, cfg.horizon, [(("L", "R", 3), set()), (("R", "L", 3), set())]
        )

    def test_budget_guard(self):
        cfg = SpacetimeConfig({"A": 0, "B": 1, "C": 2, "D": 3}, horizon=4)
        a = TaskSpec("a", Deliver("A", "B", 1))
        b = TaskSpec("b", Deliver("B", "A", 1))
        with pytest.raises(SpaceTooLarge):
            mutually_exclusive(cfg, a, b)  # 12 pairs x 5 times -> 2^60 subsets


class TestIndistinguishable:
    def test_left_agent_blind_at_zero(self, d3):
        cfg, tasks, _ = d3
        single = scenario(("task1", "L", 0))
        dual = scenario(("task1", "L", 0), ("task2", "R", 0))
        for strategy in (obedient_strategy(cfg, tasks), Strategy()):
            assert indistinguishable(cfg, strategy, single, dual, "L", 0)

    def test_crossing_signal_distinguishes_later(self, d3):
        cfg, tasks, _ = d3
        single = scenario(("task1", "L", 0))
        dual = scenario(("task1", "L", 0), ("task2", "R", 0))
        assert not indistinguishable(
            cfg, obedient_strategy(cfg, tasks), single, dual, "L", 3
        )

    def test_identical_scenarios_always_indistinguishable(self, d3):
        cfg, tasks, _ = d3
        s = scenario(("task1", "L", 0))
        for agent in cfg.agents:
            for t in range(cfg.horizon + 1):
                assert indistinguishable(cfg, obedient_strategy(cfg, tasks), s, s, agent, t)


class TestNoSignalingAudit:
    def test_obedient_is_clean(self, d3):
        cfg, tasks, _ = d3
        single = scenario(("task1", "L", 0))
        dual = scenario(("task1", "L", 0), ("task2", "R", 0))
        report = no_signaling_audit(cfg, obedient_strategy(cfg, tasks), [(single, dual)])
        assert report.ok and report.checks > 0

    def test_idle_strategy_is_clean(self, d3):
        cfg, tasks, _ = d3
        pairs = [
            (scenario(("task1", "L", 0)), scenario(("task2", "R", 0))),
            (Scenario(), scenario(("task1", "L", 0), ("task2", "R", 0))),
        ]
        assert no_signaling_audit(cfg, Strategy(), pairs).ok


from test_protocol import worlds  # noqa: E402  (reuse the randomized world builder)


@given(worlds())
@settings(max_examples=200, deadline=None)
def test_audit_property(world):
    cfg, s1, s2, strategy = world
    assert no_signaling_audit(cfg, strategy, [(s1, s2)]).ok
