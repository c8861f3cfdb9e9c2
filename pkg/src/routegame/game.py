"""Utility evaluation and exact equilibria of restricted zero-sum subgames.

The payoff convention throughout: entries are costs to Blue, so Blue (rows)
minimizes and Red (columns) maximizes. ``solve_zero_sum`` formulates the
dense min-max linear program for both sides and checks the equilibrium
certificate on every solve; a solution is never returned unverified.
"""

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from .errors import ContractViolationError, SolverFailureError
from .graph import (
    InterdictionPlan,
    RoutePlan,
    Scenario,
    interdicted_edges,
    validate_interdiction,
    validate_route,
)

PROB_SUM_TOL = 1e-9
SUPPORT_PRUNE = 1e-9
CERTIFICATE_TOL = 1e-7


@dataclass(frozen=True)
class MixedStrategy:
    """A finite-support probability distribution over pure strategies."""

    support: tuple
    probs: tuple[float, ...]

    @classmethod
    def of(cls, pairs) -> "MixedStrategy":
        """Build from (strategy, probability) pairs or a dict.

        Probabilities at or below the pruning threshold are dropped and the
        rest renormalized, so ``support`` is the true support.
        """
        if isinstance(pairs, dict):
            pairs = list(pairs.items())
        kept = [(s, float(p)) for s, p in pairs if p > SUPPORT_PRUNE]
        if not kept:
            raise ContractViolationError("mixed strategy has empty support")
        total = sum(p for _, p in kept)
        if abs(total - 1.0) > 1e-6:
            # Renormalization only absorbs pruning loss, never bad input.
            raise ContractViolationError(f"probabilities sum to {total}, expected 1")
        return cls(tuple(s for s, _ in kept), tuple(p / total for _, p in kept))

    @classmethod
    def pure(cls, strategy) -> "MixedStrategy":
        return cls((strategy,), (1.0,))

    def items(self):
        return zip(self.support, self.probs)

    def check(self) -> None:
        if len(self.support) != len(self.probs):
            raise ContractViolationError("support/probs length mismatch")
        if len(set(self.support)) != len(self.support):
            raise ContractViolationError("duplicate strategies in support")
        if any(p <= SUPPORT_PRUNE for p in self.probs):
            raise ContractViolationError("support contains pruned-size probabilities")
        if abs(sum(self.probs) - 1.0) > PROB_SUM_TOL:
            raise ContractViolationError("probabilities do not sum to 1")


def check_blue_mix(scenario: Scenario, mix: MixedStrategy) -> None:
    mix.check()
    for plan in mix.support:
        if not isinstance(plan, RoutePlan) or not validate_route(scenario.graph, plan):
            raise ContractViolationError(f"infeasible route in support: {plan}")


def check_red_mix(scenario: Scenario, mix: MixedStrategy) -> None:
    mix.check()
    for plan in mix.support:
        if not isinstance(plan, InterdictionPlan) or not validate_interdiction(scenario, plan):
            raise ContractViolationError(f"infeasible interdiction in support: {plan}")


def utility(scenario: Scenario, f: RoutePlan, y: InterdictionPlan) -> float:
    """Cost to Blue of route f against interdiction y.

    Traverse penalties accrue on every edge of f; interdiction penalties
    only on edges of f covered by y.
    """
    graph = scenario.graph
    if not validate_route(graph, f):
        raise ContractViolationError(f"invalid route plan {f}")
    if not validate_interdiction(scenario, y):
        raise ContractViolationError(f"invalid interdiction plan {y}")
    hit = set(interdicted_edges(graph, y))
    total = 0.0
    for eid in f.edge_ids:
        e = graph.edge(eid)
        total += e.traverse_penalty
        if eid in hit:
            total += e.interdiction_penalty
    return total


@dataclass(frozen=True)
class RestrictedGame:
    """The matrix game over explicit strategy lists."""

    blue_strategies: tuple[RoutePlan, ...]
    red_strategies: tuple[InterdictionPlan, ...]
    payoff: np.ndarray  # shape (len(blue), len(red)), cost to Blue

    def __post_init__(self):
        if self.payoff.shape != (len(self.blue_strategies), len(self.red_strategies)):
            raise ContractViolationError("payoff shape does not match strategy lists")


def payoff_matrix(scenario: Scenario, blue_strategies, red_strategies) -> RestrictedGame:
    blue = tuple(blue_strategies)
    red = tuple(red_strategies)
    if not blue or not red:
        raise ContractViolationError("strategy lists must be nonempty")
    payoff = np.empty((len(blue), len(red)))
    for i, f in enumerate(blue):
        for j, y in enumerate(red):
            payoff[i, j] = utility(scenario, f, y)
    return RestrictedGame(blue, red, payoff)


def equilibrium_residual(payoff: np.ndarray, xb: np.ndarray, xr: np.ndarray, value: float) -> float:
    """Worst violation of the equilibrium certificate (0 means exact).

    Blue's mix must cap every column at ``value`` and Red's mix must floor
    every row at ``value``.
    """
    col_payoffs = xb @ payoff
    row_payoffs = payoff @ xr
    return max(float(np.max(col_payoffs) - value), float(value - np.min(row_payoffs)), 0.0)


def _minimax_lp(payoff: np.ndarray):
    """Solve min_x max_j (x^T A)_j over the simplex; returns (x, value)."""
    m, n = payoff.shape
    c = np.zeros(m + 1)
    c[-1] = 1.0
    a_ub = np.hstack([payoff.T, -np.ones((n, 1))])
    a_eq = np.zeros((1, m + 1))
    a_eq[0, :m] = 1.0
    bounds = [(0.0, None)] * m + [(None, None)]
    res = linprog(c, A_ub=a_ub, b_ub=np.zeros(n), A_eq=a_eq, b_eq=[1.0], bounds=bounds,
                  method="highs")
    if not res.success:
        raise SolverFailureError(f"linear program failed: {res.message}", matrix=payoff)
    x = np.maximum(res.x[:m], 0.0)
    return x / x.sum(), float(res.x[m])


def solve_zero_sum(game: RestrictedGame) -> tuple[MixedStrategy, MixedStrategy, float]:
    """Equilibrium of the restricted game, certified before returning.

    Raises ``SolverFailureError`` (carrying the matrix) if the LP fails or
    the certificate misses the 1e-7 tolerance.
    """
    payoff = game.payoff
    if not np.all(np.isfinite(payoff)):
        raise SolverFailureError("payoff matrix contains non-finite entries", matrix=payoff)
    xb, value_blue = _minimax_lp(payoff)
    xr, neg_value_red = _minimax_lp(-payoff.T)
    value = 0.5 * (value_blue - neg_value_red)
    residual = equilibrium_residual(payoff, xb, xr, value)
    if residual > CERTIFICATE_TOL:
        raise SolverFailureError(
            f"equilibrium certificate violated by {residual:.3e}", matrix=payoff
        )
    blue_mix = MixedStrategy.of(list(zip(game.blue_strategies, xb)))
    red_mix = MixedStrategy.of(list(zip(game.red_strategies, xr)))
    return blue_mix, red_mix, value
