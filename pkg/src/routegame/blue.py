"""Blue best response: shortest start-to-release route under expected lengths.

A fixed Red mixed strategy turns the game into a deterministic shortest-path
problem: each edge's length becomes its traverse penalty plus its interdiction
penalty weighted by the probability the edge is interdicted. Lengths stay
nonnegative, so a label-setting search solves the best response exactly.

Tie-break: among minimum-length routes the lexicographically smallest edge-id
sequence is returned. The search computes exact distances-to-release first and
then walks the optimal-path DAG greedily, which keeps the tie-break exact
without carrying whole paths through the priority queue.
"""

import heapq
import math
from dataclasses import dataclass

import numpy as np

from .errors import ContractViolationError, HeuristicUnavailableError, NoPathError
from .game import MixedStrategy, check_red_mix
from .graph import PhysicalGraph, RoutePlan, Scenario, interdicted_edges

# Slack when testing whether an edge lies on some optimal path. Exact ties
# (the only ones the tie-break must resolve) agree to machine precision;
# genuinely distinct path lengths this close are indistinguishable anyway.
TIE_TOL = 1e-9


@dataclass(frozen=True)
class EdgeLengthField:
    """Expected edge lengths induced by a Red mixed strategy."""

    graph: PhysicalGraph
    lengths: np.ndarray  # aligned with graph.edges order

    def length(self, edge_id: int) -> float:
        return float(self.lengths[self.graph.edge_pos(edge_id)])

    __getitem__ = length


def expected_lengths(scenario: Scenario, red_mix: MixedStrategy) -> EdgeLengthField:
    """Per-edge expected cost: traverse penalty plus expected interdiction penalty."""
    check_red_mix(scenario, red_mix)
    graph = scenario.graph
    lengths = graph.traverse_array.copy()
    hit_prob: dict[int, float] = {}
    for plan, prob in red_mix.items():
        for eid in interdicted_edges(graph, plan):
            pos = graph.edge_pos(eid)
            hit_prob[pos] = hit_prob.get(pos, 0.0) + prob
    for pos, prob in hit_prob.items():
        lengths[pos] += graph.edges[pos].interdiction_penalty * prob
    lengths.flags.writeable = False
    return EdgeLengthField(graph, lengths)


def _distances_to_release(graph: PhysicalGraph, weights: list[float]) -> list[float]:
    """Dijkstra over reversed edges; dist[v] = cheapest v-to-release cost."""
    dist = [math.inf] * len(graph.nodes)
    release = graph.node_pos(graph.release)
    dist[release] = 0.0
    in_index = graph.in_index
    heap = [(0.0, release)]
    push, pop = heapq.heappush, heapq.heappop
    while heap:
        d, v = pop(heap)
        if d > dist[v]:
            continue
        for epos, tail in in_index[v]:
            nd = d + weights[epos]
            if nd < dist[tail]:
                dist[tail] = nd
                push(heap, (nd, tail))
    return dist


def _extract_route(graph, weights, dist, d_star):
    """Walk the optimal-path DAG from start, lex-smallest edge first.

    Returns (edge positions, cost) or None if every optimal continuation
    revisits a node (possible only amid zero-length cycles).
    """
    tol = TIE_TOL * (1.0 + abs(d_star))
    out_index = graph.out_index
    release = graph.node_pos(graph.release)
    v = graph.node_pos(graph.start)
    visited = {v}
    route: list[int] = []
    cost = 0.0
    while v != release:
        step = None
        for epos, head in out_index[v]:
            if head in visited:
                continue
            if cost + weights[epos] + dist[head] <= d_star + tol:
                step = (epos, head)
                break
        if step is None:
            return None
        epos, v = step
        route.append(epos)
        cost += weights[epos]
        visited.add(v)
    return route, cost


def _forward_route(graph, weights):
    """Plain forward Dijkstra with parent pointers; deterministic fallback."""
    n = len(graph.nodes)
    start = graph.node_pos(graph.start)
    release = graph.node_pos(graph.release)
    dist = [math.inf] * n
    parent: list[tuple[int, int] | None] = [None] * n
    dist[start] = 0.0
    heap = [(0.0, start)]
    out_index = graph.out_index
    while heap:
        d, v = heapq.heappop(heap)
        if d > dist[v]:
            continue
        for epos, head in out_index[v]:
            nd = d + weights[epos]
            if nd < dist[head]:
                dist[head] = nd
                parent[head] = (epos, v)
                heapq.heappush(heap, (nd, head))
    if math.isinf(dist[release]):
        raise NoPathError("release node is not reachable from start")
    route: list[int] = []
    v = release
    while v != start:
        epos, v = parent[v]
        route.append(epos)
    route.reverse()
    return route, dist[release]


def shortest_route(graph: PhysicalGraph, field: EdgeLengthField) -> tuple[RoutePlan, float]:
    """Minimum-length start-to-release route under the given length field."""
    weights = field.lengths.tolist()
    dist = _distances_to_release(graph, weights)
    d_star = dist[graph.node_pos(graph.start)]
    if math.isinf(d_star):
        raise NoPathError("release node is not reachable from start")
    extracted = _extract_route(graph, weights, dist, d_star)
    if extracted is None:
        extracted = _forward_route(graph, weights)
    route, cost = extracted
    plan = RoutePlan(tuple(graph.edges[epos].id for epos in route))
    return plan, cost


def best_response_blue(scenario: Scenario, red_mix: MixedStrategy) -> tuple[RoutePlan, float]:
    """Blue's optimal pure route against a fixed Red mixed strategy.

    The returned value is the route's total expected length, which equals
    Blue's expected cost against ``red_mix``.
    """
    field = expected_lengths(scenario, red_mix)
    return shortest_route(scenario.graph, field)


def astar_heuristic(graph: PhysicalGraph, target: int, kappa: float) -> dict[int, float]:
    """Scaled straight-line distance to ``target`` for every node.

    Admissible for any expected-length field produced here as long as the
    caller's ``kappa`` satisfies traverse_penalty >= kappa * euclidean length
    on every edge; expected lengths only ever exceed traverse penalties.
    """
    if kappa < 0:
        raise ContractViolationError("kappa must be >= 0")
    if not graph.has_coordinates:
        raise HeuristicUnavailableError(
            "nodes carry no coordinates; fall back to an uninformed search"
        )
    tx, ty = graph.node(target).xy
    return {
        n.id: kappa * math.hypot(n.xy[0] - tx, n.xy[1] - ty) for n in graph.nodes
    }
