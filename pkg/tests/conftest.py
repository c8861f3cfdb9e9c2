"""Shared builders and independent brute-force oracles for the test suite.

The oracles here deliberately avoid the library's solvers: routes are
enumerated by DFS, knapsacks by subset enumeration, and full games by listing
every pure strategy. Expected values in tests come from these, never from the
code under test.
"""

import itertools
import random

import pytest

from routegame.graph import (
    EdgeRecord,
    InterdictionPlan,
    NodeRecord,
    PhysicalGraph,
    RoutePlan,
    Scenario,
    make_interdiction,
)


def build_graph(edge_specs, start, release, nodes=None, coords=None):
    """Graph from (id, tail, head, T, P, C[, group[, kill[, tags]]]) tuples."""
    edges = []
    node_ids = set()
    for spec in edge_specs:
        eid, tail, head, t, p, c = spec[:6]
        group = spec[6] if len(spec) > 6 else eid
        kill = spec[7] if len(spec) > 7 else 0.0
        tags = frozenset(spec[8]) if len(spec) > 8 else frozenset()
        edges.append(
            EdgeRecord(
                id=eid, tail=tail, head=head, traverse_penalty=float(t),
                interdiction_penalty=float(p), interdiction_cost=int(c),
                group=group, kill_prob=kill, tags=tags,
            )
        )
        node_ids.update((tail, head))
    if nodes is None:
        nodes = sorted(node_ids)
    records = []
    for nid in nodes:
        xy = coords.get(nid) if coords else None
        records.append(NodeRecord(id=nid, xy=xy))
    return PhysicalGraph(records, edges, start, release)


def line_scenario(penalties=(3.0, 4.0), costs=(2, 3), budget=3, traverse=1.0):
    """The single-route fixture: edge i has cost costs[i] and penalty penalties[i]."""
    specs = [
        (i, i, i + 1, traverse, p, c)
        for i, (p, c) in enumerate(zip(penalties, costs))
    ]
    graph = build_graph(specs, start=0, release=len(penalties))
    return Scenario(graph=graph, budget=budget, epsilon=0.01)


def diamond_scenario(budget=1, top_p=3.0, epsilon=0.01):
    """Two disjoint routes: top traverse cost 2, bottom 3.

    Edge 0 (first top edge) carries interdiction penalty ``top_p``; all other
    penalties are 1. All interdiction costs are 1.
    """
    specs = [
        (0, 0, 1, 1.0, top_p, 1),
        (1, 1, 3, 1.0, 1.0, 1),
        (2, 0, 2, 1.5, 1.0, 1),
        (3, 2, 3, 1.5, 1.0, 1),
    ]
    graph = build_graph(specs, start=0, release=3)
    return Scenario(graph=graph, budget=budget, epsilon=epsilon)


def enumerate_routes(graph):
    """Every simple start-to-release path, by DFS over edges, sorted by key."""
    routes = []
    out = graph.adjacency

    def dfs(node, used_nodes, path):
        if node == graph.release:
            routes.append(RoutePlan(tuple(path)))
            return
        for eid in out[node]:
            head = graph.edge(eid).head
            if head in used_nodes:
                continue
            used_nodes.add(head)
            path.append(eid)
            dfs(head, used_nodes, path)
            path.pop()
            used_nodes.remove(head)

    dfs(graph.start, {graph.start}, [])
    return sorted(routes, key=lambda r: r.key)


def enumerate_interdictions(scenario):
    """Every feasible group subset (cost within budget), sorted by key."""
    graph = scenario.graph
    group_ids = sorted(graph.groups)
    plans = []
    for r in range(len(group_ids) + 1):
        for combo in itertools.combinations(group_ids, r):
            cost = sum(graph.group_cost(g) for g in combo)
            if cost <= scenario.budget:
                plans.append(InterdictionPlan(frozenset(combo), cost))
    return sorted(plans, key=lambda p: p.key)


def brute_force_knapsack(items, capacity):
    """(best value, lexicographically smallest optimal group set) by enumeration."""
    best_value = 0.0
    best_set = ()
    ordered = sorted(items, key=lambda it: it.group)
    for r in range(len(ordered) + 1):
        for combo in itertools.combinations(ordered, r):
            if sum(it.weight for it in combo) > capacity:
                continue
            value = sum(it.value for it in combo)
            key = tuple(it.group for it in combo)
            if value > best_value or (value == best_value and key < best_set):
                best_value = value
                best_set = key
    return best_value, best_set


def route_length(graph, plan, field):
    return sum(field.length(eid) for eid in plan.edge_ids)


def random_small_scenario(rng: random.Random, max_nodes=12, max_budget=4,
                          dyadic=False, grouped=True):
    """Random sparse scenario with a guaranteed start-to-release route.

    ``dyadic`` restricts penalties to multiples of 1/4 so sums are exact in
    floating point; ``grouped`` occasionally pairs two edges into one group.
    """
    n = rng.randint(4, max_nodes)
    order = list(range(1, n - 1))
    rng.shuffle(order)
    backbone = [0] + order[: rng.randint(1, max(1, len(order)))] + [n - 1]
    pairs = set()
    for a, b in zip(backbone, backbone[1:]):
        pairs.add((a, b))
    extra = rng.randint(n, 2 * n)
    for _ in range(extra):
        a, b = rng.randint(0, n - 1), rng.randint(0, n - 1)
        if a != b:
            pairs.add((a, b))

    def draw_penalty():
        if dyadic:
            return rng.randint(0, 16) / 4.0
        return rng.uniform(0.1, 4.0)

    specs = []
    for eid, (a, b) in enumerate(sorted(pairs)):
        t = rng.randint(1, 8) / 4.0 if dyadic else rng.uniform(0.25, 2.5)
        specs.append([eid, a, b, t, draw_penalty(), 1])
    # Group assignment: mostly singletons, sometimes pairs sharing one cost.
    eids = [s[0] for s in specs]
    rng.shuffle(eids)
    group_of = {}
    next_group = 0
    while eids:
        members = [eids.pop()]
        if grouped and eids and rng.random() < 0.25:
            members.append(eids.pop())
        cost = rng.randint(1, 3)
        for m in members:
            group_of[m] = (next_group, cost)
        next_group += 1
    for s in specs:
        gid, cost = group_of[s[0]]
        s[5] = cost
        s.append(gid)
    graph = build_graph([tuple(s) for s in specs], start=0, release=n - 1)
    return Scenario(graph=graph, budget=rng.randint(0, max_budget), epsilon=0.01)


@pytest.fixture
def diamond():
    return diamond_scenario()


@pytest.fixture
def line():
    return line_scenario()


def pure_interdiction(graph, groups):
    return make_interdiction(graph, groups)
