"""Equilibrium solving for adversarial route planning on directed graphs.

A route planner (Blue) picks a start-to-release path while a budgeted
interdictor (Red) picks edge groups to disrupt; both move simultaneously and
the game is zero-sum in Blue's expected cost. The solver generates strategies
incrementally with exact combinatorial best-response oracles (shortest path
for Blue, knapsack for Red) until the equilibrium gap closes.
"""

from .blue import EdgeLengthField, astar_heuristic, best_response_blue, expected_lengths
from .errors import (
    ContractViolationError,
    HeuristicUnavailableError,
    IterationBudgetError,
    NoPathError,
    RouteGameError,
    ScenarioFormatError,
    ScenarioValidationError,
    SolverFailureError,
    UnknownReferenceError,
    UnsupportedFormatError,
)
from .game import (
    MixedStrategy,
    RestrictedGame,
    payoff_matrix,
    solve_zero_sum,
    utility,
)
from .graph import (
    EMPTY_INTERDICTION,
    EdgeRecord,
    InterdictionPlan,
    NodeRecord,
    PhysicalGraph,
    RoutePlan,
    Scenario,
    interdicted_edges,
    make_interdiction,
    validate_interdiction,
    validate_route,
)
from .metrics import (
    AttackCountDistribution,
    attack_distribution,
    fastest_route,
    red_aware_route,
    robustness_table,
    throughput,
    worst_case_utility,
)
from .red import KnapsackInstance, KnapsackItem, best_response_red, build_knapsack, solve_knapsack
from .scenario_io import (
    assign_costs,
    assign_penalties,
    export_solution,
    generate_grid,
    generate_line_knapsack,
    load_scenario,
    save_scenario,
)
from .solver import (
    EquilibriumResult,
    IterationRecord,
    evaluate_exploitability,
    initial_subgame,
    solve,
)

__version__ = "0.1.0"
