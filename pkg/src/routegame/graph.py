"""Game arena: directed graph, edge attributes, and pure-strategy validation.

The graph is immutable once constructed, so every solver component can read
it concurrently. Blue's pure strategies are simple directed paths from the
start node to the release node (``RoutePlan``); Red's pure strategies are
budget-feasible sets of interdiction groups (``InterdictionPlan``). A group
is Red's atomic choice and covers one or more directed edges; by default
every edge sits in its own group, which recovers per-edge interdiction.
"""

import math
import warnings
from dataclasses import dataclass, replace

import numpy as np

from .errors import ContractViolationError, ScenarioValidationError, UnknownReferenceError

EARTH_RADIUS_M = 6371008.8


@dataclass(frozen=True)
class NodeRecord:
    """A graph node; ``xy`` holds planar coordinates in meters when known."""

    id: int
    lat: float | None = None
    lon: float | None = None
    xy: tuple[float, float] | None = None


@dataclass(frozen=True)
class EdgeRecord:
    """A directed edge with traversal/interdiction attributes.

    ``traverse_penalty`` is the cost Blue always pays on the edge,
    ``interdiction_penalty`` the extra cost when the edge is interdicted,
    ``interdiction_cost`` what Red pays to interdict the edge's group, and
    ``kill_prob`` the per-traversal survival complement used by throughput.
    """

    id: int
    tail: int
    head: int
    traverse_penalty: float
    interdiction_penalty: float
    interdiction_cost: int
    group: int
    kill_prob: float = 0.0
    tags: frozenset[str] = frozenset()


@dataclass(frozen=True)
class RoutePlan:
    """Blue pure strategy: an ordered chain of edge ids forming a simple path."""

    edge_ids: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "edge_ids", tuple(self.edge_ids))

    @property
    def key(self) -> tuple[int, ...]:
        return self.edge_ids


@dataclass(frozen=True)
class InterdictionPlan:
    """Red pure strategy: a set of group ids plus their total cost."""

    group_ids: frozenset[int]
    total_cost: int

    def __post_init__(self):
        object.__setattr__(self, "group_ids", frozenset(self.group_ids))

    @property
    def key(self) -> tuple[int, ...]:
        return tuple(sorted(self.group_ids))


EMPTY_INTERDICTION = InterdictionPlan(frozenset(), 0)


class PhysicalGraph:
    """Directed graph with per-edge game attributes, frozen after construction.

    Construction validates: unique ids, endpoints exist, start != release,
    release reachable from start, integral positive interdiction costs,
    consistent cost within each group, and all-or-nothing coordinates.
    """

    def __init__(self, nodes, edges, start, release):
        nodes = self._with_projection(nodes)
        self.nodes = tuple(sorted(nodes, key=lambda n: n.id))
        self.edges = tuple(sorted(edges, key=lambda e: e.id))
        self.start = start
        self.release = release
        self._validate_records()

        self._node_by_id = {n.id: n for n in self.nodes}
        self._edge_by_id = {e.id: e for e in self.edges}
        self._node_index = {n.id: i for i, n in enumerate(self.nodes)}
        self._edge_index = {e.id: i for i, e in enumerate(self.edges)}

        # Adjacency in id space (public) and index space (for the search core).
        adjacency: dict[int, list[int]] = {n.id: [] for n in self.nodes}
        out_idx: list[list[tuple[int, int]]] = [[] for _ in self.nodes]
        in_idx: list[list[tuple[int, int]]] = [[] for _ in self.nodes]
        for e in self.edges:
            adjacency[e.tail].append(e.id)
            ei = self._edge_index[e.id]
            out_idx[self._node_index[e.tail]].append((ei, self._node_index[e.head]))
            in_idx[self._node_index[e.head]].append((ei, self._node_index[e.tail]))
        self.adjacency = {nid: tuple(eids) for nid, eids in adjacency.items()}
        self._out_idx = tuple(tuple(lst) for lst in out_idx)
        self._in_idx = tuple(tuple(lst) for lst in in_idx)

        groups: dict[int, list[int]] = {}
        for e in self.edges:
            groups.setdefault(e.group, []).append(e.id)
        self.groups = {g: tuple(eids) for g, eids in sorted(groups.items())}
        self._group_cost = {}
        for g, eids in self.groups.items():
            costs = {self._edge_by_id[eid].interdiction_cost for eid in eids}
            if len(costs) > 1:
                raise ScenarioValidationError(
                    f"group {g}: member edges disagree on interdiction cost {sorted(costs)}"
                )
            self._group_cost[g] = costs.pop()

        self._t = np.array([e.traverse_penalty for e in self.edges], dtype=float)
        self._t.flags.writeable = False

        self._check_reachable()

    @staticmethod
    def _with_projection(nodes):
        lats = [n.lat for n in nodes if n.lat is not None and n.lon is not None and n.xy is None]
        if not lats:
            return list(nodes)
        # Equirectangular projection around the mean latitude; distances between
        # nearby nodes come out in meters, which is all the cost formulas need.
        scale_x = EARTH_RADIUS_M * math.cos(math.radians(sum(lats) / len(lats)))
        out = []
        for n in nodes:
            if n.lat is not None and n.lon is not None and n.xy is None:
                x = scale_x * math.radians(n.lon)
                y = EARTH_RADIUS_M * math.radians(n.lat)
                n = replace(n, xy=(x, y))
            out.append(n)
        return out

    def _validate_records(self):
        ids = [n.id for n in self.nodes]
        if len(set(ids)) != len(ids):
            raise ScenarioValidationError("duplicate node ids")
        eids = [e.id for e in self.edges]
        if len(set(eids)) != len(eids):
            raise ScenarioValidationError("duplicate edge ids")
        known = set(ids)
        for e in self.edges:
            if e.tail not in known or e.head not in known:
                raise ScenarioValidationError(f"edge {e.id}: endpoint does not exist")
            if e.traverse_penalty < 0:
                raise ScenarioValidationError(f"edge {e.id}: negative traverse penalty")
            if e.traverse_penalty == 0:
                warnings.warn(
                    f"edge {e.id} has zero traverse penalty; cycle elimination "
                    "relies on the simple-path invariant alone",
                    stacklevel=3,
                )
            if e.interdiction_penalty < 0:
                raise ScenarioValidationError(f"edge {e.id}: negative interdiction penalty")
            if not isinstance(e.interdiction_cost, int) or e.interdiction_cost < 1:
                raise ScenarioValidationError(
                    f"edge {e.id}: interdiction cost must be an integer >= 1"
                )
            if not 0.0 <= e.kill_prob <= 1.0:
                raise ScenarioValidationError(f"edge {e.id}: kill_prob outside [0, 1]")
        if self.start not in known:
            raise ScenarioValidationError(f"start node {self.start} does not exist")
        if self.release not in known:
            raise ScenarioValidationError(f"release node {self.release} does not exist")
        if self.start == self.release:
            raise ScenarioValidationError("start and release must differ")
        with_xy = sum(1 for n in self.nodes if n.xy is not None)
        if with_xy not in (0, len(self.nodes)):
            raise ScenarioValidationError("coordinates must be present on all nodes or none")

    def _check_reachable(self):
        seen = {self.start}
        stack = [self.start]
        while stack:
            v = stack.pop()
            for eid in self.adjacency[v]:
                head = self._edge_by_id[eid].head
                if head not in seen:
                    seen.add(head)
                    stack.append(head)
        if self.release not in seen:
            raise ScenarioValidationError("release node is not reachable from start")

    # -- lookups ---------------------------------------------------------

    def node(self, node_id: int) -> NodeRecord:
        try:
            return self._node_by_id[node_id]
        except KeyError:
            raise UnknownReferenceError(f"unknown node id {node_id}") from None

    def edge(self, edge_id: int) -> EdgeRecord:
        try:
            return self._edge_by_id[edge_id]
        except KeyError:
            raise UnknownReferenceError(f"unknown edge id {edge_id}") from None

    def group_members(self, group_id: int) -> tuple[int, ...]:
        try:
            return self.groups[group_id]
        except KeyError:
            raise UnknownReferenceError(f"unknown group id {group_id}") from None

    def group_cost(self, group_id: int) -> int:
        try:
            return self._group_cost[group_id]
        except KeyError:
            raise UnknownReferenceError(f"unknown group id {group_id}") from None

    @property
    def has_coordinates(self) -> bool:
        return bool(self.nodes) and self.nodes[0].xy is not None

    def route_cost(self, plan: RoutePlan) -> float:
        """Total traverse penalty along a route."""
        return sum(self._edge_by_id[eid].traverse_penalty for eid in plan.edge_ids)

    # -- dense views used by the search core -------------------------------

    def node_pos(self, node_id: int) -> int:
        try:
            return self._node_index[node_id]
        except KeyError:
            raise UnknownReferenceError(f"unknown node id {node_id}") from None

    def edge_pos(self, edge_id: int) -> int:
        try:
            return self._edge_index[edge_id]
        except KeyError:
            raise UnknownReferenceError(f"unknown edge id {edge_id}") from None

    @property
    def out_index(self) -> tuple[tuple[tuple[int, int], ...], ...]:
        """Per node position: (edge position, head position) pairs, ascending edge id."""
        return self._out_idx

    @property
    def in_index(self) -> tuple[tuple[tuple[int, int], ...], ...]:
        """Per node position: (edge position, tail position) pairs, ascending edge id."""
        return self._in_idx

    @property
    def traverse_array(self) -> np.ndarray:
        """Traverse penalties aligned with ``edges`` order (read-only)."""
        return self._t


@dataclass(frozen=True)
class Scenario:
    """A full game instance: graph, Red budget, and solve tolerance."""

    graph: PhysicalGraph
    budget: int
    epsilon: float = 0.1
    format_version: str = "1"
    meters_to_t: float | None = None

    def __post_init__(self):
        if self.budget < 0:
            raise ScenarioValidationError("budget must be >= 0")
        if not self.epsilon > 0:
            raise ScenarioValidationError("epsilon must be > 0")

    def with_budget(self, budget: int) -> "Scenario":
        return replace(self, budget=budget)


def validate_route(graph: PhysicalGraph, plan: RoutePlan) -> bool:
    """True iff the plan is a simple start-to-release path in the graph.

    Unknown edge ids raise ``UnknownReferenceError`` rather than returning
    False, so typos are never silently treated as infeasible strategies.
    """
    if not plan.edge_ids:
        raise ContractViolationError("route plan must contain at least one edge")
    edges = [graph.edge(eid) for eid in plan.edge_ids]
    if edges[0].tail != graph.start or edges[-1].head != graph.release:
        return False
    visited = [edges[0].tail]
    for prev, nxt in zip(edges, edges[1:]):
        if prev.head != nxt.tail:
            return False
    visited.extend(e.head for e in edges)
    return len(set(visited)) == len(visited)


def make_interdiction(graph: PhysicalGraph, group_ids) -> InterdictionPlan:
    """Build an InterdictionPlan with its cost recomputed from the graph."""
    gids = frozenset(group_ids)
    return InterdictionPlan(gids, sum(graph.group_cost(g) for g in gids))


def validate_interdiction(scenario: Scenario, plan: InterdictionPlan) -> bool:
    """True iff the plan's groups exist, its cost is consistent and within budget."""
    cost = sum(scenario.graph.group_cost(g) for g in plan.group_ids)
    return cost == plan.total_cost and cost <= scenario.budget


def interdicted_edges(graph: PhysicalGraph, plan: InterdictionPlan) -> tuple[int, ...]:
    """Edge ids covered by the plan's groups, ascending."""
    out: set[int] = set()
    for g in plan.group_ids:
        out.update(graph.group_members(g))
    return tuple(sorted(out))
