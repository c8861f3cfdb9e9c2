"""Strategy generation: restricted equilibria plus best responses until the gap closes.

Each iteration solves the current restricted matrix game exactly, then asks
both oracles for best responses against the restricted equilibrium. Red's
best-response utility upper-bounds the full-game value and Blue's lower-bounds
it; their difference is the equilibrium gap. Once the gap is at most epsilon
the restricted equilibrium is a 2*epsilon-approximate equilibrium of the full
game. New best responses are deduplicated by canonical plan encoding, and the
loop provably terminates because both pure-strategy spaces are finite.
"""

import math
from dataclasses import dataclass

import numpy as np

from .blue import best_response_blue
from .errors import ContractViolationError, IterationBudgetError, SolverFailureError
from .game import MixedStrategy, RestrictedGame, solve_zero_sum
from .graph import (
    EMPTY_INTERDICTION,
    InterdictionPlan,
    RoutePlan,
    Scenario,
    interdicted_edges,
)
from .red import best_response_red

GAP_SLACK = 1e-6
DEFAULT_MAX_ITERS = 10_000


@dataclass(frozen=True)
class IterationRecord:
    """One loop iteration: bounds, gap, and subgame size before growth."""

    iteration: int
    value: float
    lower: float
    upper: float
    gap: float
    best_lower: float  # running max of lower bounds
    best_upper: float  # running min of upper bounds
    blue_count: int
    red_count: int


@dataclass(frozen=True)
class EquilibriumResult:
    value: float
    blue_mix: MixedStrategy
    red_mix: MixedStrategy
    gap: float
    iterations: int
    lower_bound: float
    upper_bound: float
    trace: tuple[IterationRecord, ...]

    def __post_init__(self):
        if self.gap < -GAP_SLACK:
            raise SolverFailureError(f"negative equilibrium gap {self.gap}")
        if not (
            self.lower_bound - GAP_SLACK <= self.value <= self.upper_bound + GAP_SLACK
        ):
            raise SolverFailureError(
                f"value {self.value} escapes bounds "
                f"[{self.lower_bound}, {self.upper_bound}]"
            )


def initial_subgame(scenario: Scenario) -> tuple[list[RoutePlan], list[InterdictionPlan]]:
    """Seed strategies: the fastest route and the empty interdiction.

    The empty plan keeps Red's restricted set nonempty at any budget, and the
    fastest route is exactly Blue's best response to it.
    """
    fastest, _ = best_response_blue(scenario, MixedStrategy.pure(EMPTY_INTERDICTION))
    return [fastest], [EMPTY_INTERDICTION]


class _FastUtility:
    """Incremental payoff evaluation over plans already validated by the oracles."""

    def __init__(self, scenario: Scenario):
        self._graph = scenario.graph
        self._route_cost: dict[tuple, float] = {}
        self._route_pmap: dict[tuple, dict[int, float]] = {}
        self._plan_edges: dict[tuple, tuple[int, ...]] = {}

    def _route(self, f: RoutePlan):
        info = self._route_pmap.get(f.key)
        if info is None:
            graph = self._graph
            info = {}
            total = 0.0
            for eid in f.edge_ids:
                e = graph.edge(eid)
                total += e.traverse_penalty
                if e.interdiction_penalty > 0.0:
                    info[eid] = info.get(eid, 0.0) + e.interdiction_penalty
            self._route_pmap[f.key] = info
            self._route_cost[f.key] = total
        return self._route_cost[f.key], self._route_pmap[f.key]

    def _edges(self, y: InterdictionPlan) -> tuple[int, ...]:
        edges = self._plan_edges.get(y.key)
        if edges is None:
            edges = interdicted_edges(self._graph, y)
            self._plan_edges[y.key] = edges
        return edges

    def __call__(self, f: RoutePlan, y: InterdictionPlan) -> float:
        t_cost, pmap = self._route(f)
        return t_cost + sum(pmap.get(eid, 0.0) for eid in self._edges(y))


def solve(scenario: Scenario, max_iters: int = DEFAULT_MAX_ITERS) -> EquilibriumResult:
    """Run the strategy-generation loop to an epsilon-certified equilibrium.

    Raises ``IterationBudgetError`` (carrying the best result so far) if the
    gap has not closed after ``max_iters`` iterations.
    """
    if max_iters < 1:
        raise ContractViolationError("max_iters must be >= 1")
    epsilon = scenario.epsilon
    blue_list, red_list = initial_subgame(scenario)
    blue_seen = {blue_list[0].key}
    red_seen = {red_list[0].key}
    fast_utility = _FastUtility(scenario)
    rows = [[fast_utility(blue_list[0], red_list[0])]]

    best_lower = -math.inf
    best_upper = math.inf
    trace: list[IterationRecord] = []

    def result(value, blue_mix, red_mix, gap, lower, upper):
        return EquilibriumResult(
            value=value,
            blue_mix=blue_mix,
            red_mix=red_mix,
            gap=gap,
            iterations=len(trace),
            lower_bound=lower,
            upper_bound=upper,
            trace=tuple(trace),
        )

    for iteration in range(1, max_iters + 1):
        game = RestrictedGame(tuple(blue_list), tuple(red_list), np.array(rows))
        blue_mix, red_mix, value = solve_zero_sum(game)

        blue_br, lower = best_response_blue(scenario, red_mix)
        red_br, upper = best_response_red(scenario, blue_mix)
        gap = upper - lower

        best_lower = max(best_lower, lower)
        best_upper = min(best_upper, upper)
        trace.append(
            IterationRecord(
                iteration=iteration,
                value=value,
                lower=lower,
                upper=upper,
                gap=gap,
                best_lower=best_lower,
                best_upper=best_upper,
                blue_count=len(blue_list),
                red_count=len(red_list),
            )
        )

        if gap <= epsilon:
            return result(value, blue_mix, red_mix, gap, lower, upper)

        added = False
        if blue_br.key not in blue_seen:
            blue_seen.add(blue_br.key)
            blue_list.append(blue_br)
            rows.append([fast_utility(blue_br, y) for y in red_list])
            added = True
        if red_br.key not in red_seen:
            red_seen.add(red_br.key)
            red_list.append(red_br)
            for i, f in enumerate(blue_list):
                rows[i].append(fast_utility(f, red_br))
            added = True
        if not added:
            # Both best responses already in the subgame: the restricted
            # equilibrium is a full equilibrium, so the gap is numerical noise.
            if gap > GAP_SLACK:
                raise SolverFailureError(
                    f"stalled with gap {gap} despite duplicate best responses",
                    matrix=game.payoff,
                )
            return result(value, blue_mix, red_mix, gap, lower, upper)

    best = result(
        trace[-1].value, blue_mix, red_mix, trace[-1].gap, trace[-1].lower, trace[-1].upper
    )
    raise IterationBudgetError(
        f"gap {trace[-1].gap:.6g} > epsilon {epsilon} after {max_iters} iterations",
        result=best,
    )


def evaluate_exploitability(scenario: Scenario, blue_mix: MixedStrategy) -> float:
    """Worst-case expected cost of a fixed Blue strategy against any feasible Red."""
    _, worst = best_response_red(scenario, blue_mix)
    return worst
