"""Evaluation machinery: throughput, attack-count distributions, baselines.

Throughput is the expected probability that a vehicle survives its route:
each traversed edge that Red actually interdicted multiplies survival by one
minus that edge's kill probability. All quantities here are exact
expectations over the finite strategy supports, never simulations.
"""

from dataclasses import dataclass

import numpy as np

from .blue import best_response_blue
from .errors import ContractViolationError
from .game import MixedStrategy, check_blue_mix, check_red_mix
from .graph import EMPTY_INTERDICTION, RoutePlan, Scenario, interdicted_edges
from .red import best_response_red
from .solver import EquilibriumResult, solve

PROB_MASS_TOL = 1e-9
HIGH_PENALTY_THRESHOLD = 3.0


@dataclass(frozen=True)
class AttackCountDistribution:
    """Joint distribution of (low, high) interdicted-edge encounter counts.

    An edge counts as high when its interdiction penalty is at or above the
    classification threshold. The (0, 0) entry is the no-attack mass.
    """

    entries: dict[tuple[int, int], float]
    threshold: float = HIGH_PENALTY_THRESHOLD

    def __post_init__(self):
        total = sum(self.entries.values())
        if abs(total - 1.0) > PROB_MASS_TOL or any(p < 0 for p in self.entries.values()):
            raise ContractViolationError(f"attack-count masses sum to {total}")

    @property
    def no_attack_mass(self) -> float:
        return self.entries.get((0, 0), 0.0)


def _as_blue_mix(blue) -> MixedStrategy:
    if isinstance(blue, RoutePlan):
        return MixedStrategy.pure(blue)
    return blue


def throughput(scenario: Scenario, blue, red_mix: MixedStrategy) -> float:
    """Expected survival probability of Blue's routes against ``red_mix``.

    Accepts a pure ``RoutePlan`` or a mixed strategy for ``blue``.
    """
    blue_mix = _as_blue_mix(blue)
    check_blue_mix(scenario, blue_mix)
    check_red_mix(scenario, red_mix)
    graph = scenario.graph
    red_support = [(interdicted_edges(graph, y), pr) for y, pr in red_mix.items()]
    total = 0.0
    for f, pb in blue_mix.items():
        on_route = set(f.edge_ids)
        for hit_edges, pr in red_support:
            survival = 1.0
            for eid in hit_edges:
                if eid in on_route:
                    survival *= 1.0 - graph.edge(eid).kill_prob
            total += pb * pr * survival
    return total


def attack_distribution(
    scenario: Scenario,
    blue_mix: MixedStrategy,
    red_mix: MixedStrategy,
    threshold: float = HIGH_PENALTY_THRESHOLD,
) -> AttackCountDistribution:
    """Distribution of low/high encounter counts over independent strategy draws."""
    blue_mix = _as_blue_mix(blue_mix)
    check_blue_mix(scenario, blue_mix)
    check_red_mix(scenario, red_mix)
    graph = scenario.graph
    red_support = [(interdicted_edges(graph, y), pr) for y, pr in red_mix.items()]
    entries: dict[tuple[int, int], float] = {}
    for f, pb in blue_mix.items():
        on_route = set(f.edge_ids)
        for hit_edges, pr in red_support:
            low = high = 0
            for eid in hit_edges:
                if eid in on_route:
                    if graph.edge(eid).interdiction_penalty >= threshold:
                        high += 1
                    else:
                        low += 1
            key = (low, high)
            entries[key] = entries.get(key, 0.0) + pb * pr
    return AttackCountDistribution(entries, threshold)


def fastest_route(scenario: Scenario) -> RoutePlan:
    """Minimum traverse-penalty route, ignoring interdiction entirely."""
    plan, _ = best_response_blue(scenario, MixedStrategy.pure(EMPTY_INTERDICTION))
    return plan


def worst_case_utility(scenario: Scenario, plan: RoutePlan) -> float:
    """Expected cost of a fixed route against Red's best response to it."""
    _, worst = best_response_red(scenario, MixedStrategy.pure(plan))
    return worst


def red_aware_route(scenario: Scenario, eq: EquilibriumResult) -> RoutePlan:
    """Deterministic single route with the best worst-case cost.

    Candidates are the equilibrium support routes plus the fastest route;
    ties resolve to the lexicographically smallest edge sequence.
    """
    candidates = {plan.key: plan for plan in eq.blue_mix.support}
    fastest = fastest_route(scenario)
    candidates[fastest.key] = fastest
    ranked = sorted(
        candidates.values(), key=lambda plan: (worst_case_utility(scenario, plan), plan.key)
    )
    return ranked[0]


def robustness_table(scenario: Scenario, budgets, max_iters=None) -> np.ndarray:
    """Throughput of budget-b solutions against best-responding budget-b' Reds.

    Entry (i, j): solve the game at budgets[i], then let a Red with true
    budget budgets[j] best-respond to that fixed Blue mix, and report the
    resulting throughput. Each row's solve runs once; Red re-responds per
    column.
    """
    budgets = list(budgets)
    if not budgets:
        raise ContractViolationError("budgets must be nonempty")
    table = np.zeros((len(budgets), len(budgets)))
    for i, planned in enumerate(budgets):
        kwargs = {} if max_iters is None else {"max_iters": max_iters}
        eq = solve(scenario.with_budget(planned), **kwargs)
        for j, actual in enumerate(budgets):
            true_scenario = scenario.with_budget(actual)
            response, _ = best_response_red(true_scenario, eq.blue_mix)
            table[i, j] = throughput(true_scenario, eq.blue_mix, MixedStrategy.pure(response))
    return table
