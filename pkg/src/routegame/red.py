"""Red best response: a 0/1 knapsack over interdiction groups.

Against a fixed Blue mixed strategy, each group's payoff for Red is the
expected interdiction penalty it inflicts, which depends only on how much
probability mass Blue's routes put on the group's edges. Feasibility is a
single budget constraint with integral costs, so the best response is an
exact pseudo-polynomial knapsack DP. The expected traverse cost of Blue's
mix is independent of Red's choice; it is excluded from item values and
added back to the reported utility.
"""

from dataclasses import dataclass

from .errors import ContractViolationError
from .game import MixedStrategy, check_blue_mix
from .graph import InterdictionPlan, Scenario, make_interdiction

# Equality slack when reconstructing an optimal item set from the DP table;
# covers summation-order rounding only, never a real value difference.
RECONSTRUCT_TOL = 1e-12


@dataclass(frozen=True)
class KnapsackItem:
    group: int
    weight: int
    value: float


@dataclass(frozen=True)
class KnapsackInstance:
    items: tuple[KnapsackItem, ...]
    capacity: int

    def __post_init__(self):
        object.__setattr__(self, "items", tuple(self.items))
        if self.capacity < 0:
            raise ContractViolationError("capacity must be >= 0")
        groups = [it.group for it in self.items]
        if len(set(groups)) != len(groups):
            raise ContractViolationError("duplicate group ids in knapsack items")
        for it in self.items:
            if not isinstance(it.weight, int) or it.weight < 1:
                raise ContractViolationError(f"item {it.group}: weight must be an integer >= 1")
            if it.value < 0:
                raise ContractViolationError(f"item {it.group}: negative value")


def build_knapsack(scenario: Scenario, blue_mix: MixedStrategy) -> KnapsackInstance:
    """One item per group that Blue's support actually touches.

    value(group) = sum over routes of route probability times the total
    interdiction penalty of the group's edges lying on that route. Groups
    with zero value are dropped; they can never improve the optimum.
    """
    check_blue_mix(scenario, blue_mix)
    graph = scenario.graph
    gains: dict[int, float] = {}
    for plan, prob in blue_mix.items():
        for eid in plan.edge_ids:
            e = graph.edge(eid)
            contribution = prob * e.interdiction_penalty
            if contribution > 0.0:
                gains[e.group] = gains.get(e.group, 0.0) + contribution
    items = tuple(
        KnapsackItem(g, graph.group_cost(g), v) for g, v in sorted(gains.items()) if v > 0.0
    )
    return KnapsackInstance(items, scenario.budget)


def solve_knapsack(inst: KnapsackInstance) -> tuple[tuple[int, ...], float]:
    """Exact DP over the capacity dimension.

    Among optimal subsets, returns the one whose sorted group-id tuple is
    lexicographically smallest (so the empty set wins when value 0 is
    optimal). The greedy reconstruction below realizes that order: stop as
    soon as the chosen prefix is already optimal, otherwise take the
    smallest group id that still admits an optimal completion.
    """
    items = sorted(inst.items, key=lambda it: it.group)
    cap = inst.capacity
    n = len(items)
    # suffix[i][c]: best value achievable with items[i:] under capacity c.
    suffix = [[0.0] * (cap + 1) for _ in range(n + 1)]
    for i in range(n - 1, -1, -1):
        w, v = items[i].weight, items[i].value
        row, nxt = suffix[i], suffix[i + 1]
        for c in range(cap + 1):
            best = nxt[c]
            if w <= c:
                cand = v + nxt[c - w]
                if cand > best:
                    best = cand
            row[c] = best
    optimum = suffix[0][cap]
    tol = RECONSTRUCT_TOL * (1.0 + abs(optimum))
    chosen: list[int] = []
    value = 0.0
    c = cap
    for i in range(n):
        if value >= optimum - tol:
            break
        it = items[i]
        if it.weight <= c and value + it.value + suffix[i + 1][c - it.weight] >= optimum - tol:
            chosen.append(it.group)
            value += it.value
            c -= it.weight
    return tuple(chosen), optimum


def best_response_red(scenario: Scenario, blue_mix: MixedStrategy) -> tuple[InterdictionPlan, float]:
    """Red's optimal interdiction against a fixed Blue mixed strategy.

    The utility is Blue's full expected cost under the plan: the mix's
    expected traverse cost plus the knapsack optimum.
    """
    instance = build_knapsack(scenario, blue_mix)
    groups, gain = solve_knapsack(instance)
    base = sum(prob * scenario.graph.route_cost(plan) for plan, prob in blue_mix.items())
    return make_interdiction(scenario.graph, groups), base + gain
