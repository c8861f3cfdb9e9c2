"""Scenario files, cost/penalty assignment, synthetic generators, and export.

Scenario files are versioned JSON documents. Saving always canonicalizes:
keys sorted, floats printed with nine significant digits, two-space indent,
trailing newline. Canonical text is a fixed point of save(load(.)), so files
diff cleanly and tests can compare outputs byte for byte.
"""

import csv
import json
import math
import random
from dataclasses import replace
from pathlib import Path

from .errors import ContractViolationError, ScenarioFormatError, UnsupportedFormatError
from .graph import EdgeRecord, NodeRecord, PhysicalGraph, Scenario, interdicted_edges
from .solver import EquilibriumResult

FORMAT_VERSION = "1"

# Minimum edge-midpoint distance (meters) admitted by the cost formula; a
# midpoint sitting exactly on an endpoint would otherwise divide by zero.
MIN_MIDPOINT_DISTANCE_M = 1.0

GRID_SPACING_M = 100.0
GRID_BRIDGE_SHARE = 0.1
GRID_T_RANGE = (1.0, 2.0)


# -- canonical JSON ----------------------------------------------------------


def format_float(x: float) -> str:
    """Nine significant digits; reparsing and reformatting is a fixed point."""
    return format(float(x), ".9g")


def canonical_dumps(doc) -> str:
    out: list[str] = []
    _emit(doc, out, 0)
    out.append("\n")
    return "".join(out)


def _emit(value, out: list[str], depth: int) -> None:
    pad = "  " * depth
    inner = "  " * (depth + 1)
    if value is None:
        out.append("null")
    elif isinstance(value, bool):
        out.append("true" if value else "false")
    elif isinstance(value, int):
        out.append(repr(value))
    elif isinstance(value, float):
        out.append(format_float(value))
    elif isinstance(value, str):
        out.append(json.dumps(value))
    elif isinstance(value, dict):
        if not value:
            out.append("{}")
            return
        out.append("{\n")
        keys = sorted(value)
        for i, k in enumerate(keys):
            out.append(f"{inner}{json.dumps(str(k))}: ")
            _emit(value[k], out, depth + 1)
            out.append(",\n" if i + 1 < len(keys) else "\n")
        out.append(pad + "}")
    elif isinstance(value, (list, tuple)):
        if not value:
            out.append("[]")
            return
        out.append("[\n")
        for i, item in enumerate(value):
            out.append(inner)
            _emit(item, out, depth + 1)
            out.append(",\n" if i + 1 < len(value) else "\n")
        out.append(pad + "]")
    else:
        raise TypeError(f"cannot serialize {type(value).__name__}")


# -- scenario <-> document ---------------------------------------------------


def scenario_to_document(scenario: Scenario) -> dict:
    graph = scenario.graph
    nodes = []
    for n in graph.nodes:
        record: dict = {"id": n.id}
        if n.lat is not None:
            record["lat"] = float(n.lat)
        if n.lon is not None:
            record["lon"] = float(n.lon)
        nodes.append(record)
    edges = [
        {
            "id": e.id,
            "tail": e.tail,
            "head": e.head,
            "T": float(e.traverse_penalty),
            "P": float(e.interdiction_penalty),
            "C": e.interdiction_cost,
            "group": e.group,
            "kill_prob": float(e.kill_prob),
            "tags": sorted(e.tags),
        }
        for e in graph.edges
    ]
    doc = {
        "format_version": scenario.format_version,
        "nodes": nodes,
        "edges": edges,
        "start": graph.start,
        "release": graph.release,
        "budget": scenario.budget,
        "epsilon": scenario.epsilon,
    }
    if scenario.meters_to_t is not None:
        doc["meters_to_T"] = scenario.meters_to_t
    return doc


class _Field:
    """Typed field access with path-located error messages."""

    def __init__(self, obj: dict, where: str):
        if not isinstance(obj, dict):
            raise ScenarioFormatError(f"{where}: expected an object")
        self.obj = obj
        self.where = where

    def _get(self, name, required):
        if name not in self.obj:
            if required:
                raise ScenarioFormatError(f"{self.where}.{name}: missing required field")
            return None
        return self.obj[name]

    def integer(self, name, required=True, minimum=None):
        raw = self._get(name, required)
        if raw is None:
            return None
        if not isinstance(raw, int) or isinstance(raw, bool):
            raise ScenarioFormatError(f"{self.where}.{name}: expected an integer, got {raw!r}")
        if minimum is not None and raw < minimum:
            raise ScenarioFormatError(f"{self.where}.{name}: must be >= {minimum}, got {raw}")
        return raw

    def number(self, name, required=True, minimum=None, maximum=None):
        raw = self._get(name, required)
        if raw is None:
            return None
        if isinstance(raw, bool) or not isinstance(raw, (int, float)):
            raise ScenarioFormatError(f"{self.where}.{name}: expected a number, got {raw!r}")
        value = float(raw)
        if not math.isfinite(value):
            raise ScenarioFormatError(f"{self.where}.{name}: must be finite, got {raw!r}")
        if minimum is not None and value < minimum:
            raise ScenarioFormatError(f"{self.where}.{name}: must be >= {minimum}, got {raw}")
        if maximum is not None and value > maximum:
            raise ScenarioFormatError(f"{self.where}.{name}: must be <= {maximum}, got {raw}")
        return value

    def string(self, name, required=True):
        raw = self._get(name, required)
        if raw is None:
            return None
        if not isinstance(raw, str):
            raise ScenarioFormatError(f"{self.where}.{name}: expected a string, got {raw!r}")
        return raw

    def array(self, name, required=True):
        raw = self._get(name, required)
        if raw is None:
            return None
        if not isinstance(raw, list):
            raise ScenarioFormatError(f"{self.where}.{name}: expected an array")
        return raw

    def string_list(self, name):
        raw = self._get(name, required=False)
        if raw is None:
            return []
        if not isinstance(raw, list) or not all(isinstance(s, str) for s in raw):
            raise ScenarioFormatError(f"{self.where}.{name}: expected an array of strings")
        return raw


def document_to_scenario(doc) -> Scenario:
    top = _Field(doc, "scenario")
    version = top.string("format_version")
    if version != FORMAT_VERSION:
        raise ScenarioFormatError(
            f"scenario.format_version: unsupported version {version!r}"
        )
    nodes = []
    for i, raw in enumerate(top.array("nodes")):
        f = _Field(raw, f"nodes[{i}]")
        nodes.append(
            NodeRecord(
                id=f.integer("id"),
                lat=f.number("lat", required=False),
                lon=f.number("lon", required=False),
            )
        )
    edges = []
    for i, raw in enumerate(top.array("edges")):
        f = _Field(raw, f"edges[{i}]")
        eid = f.integer("id")
        group = f.integer("group", required=False)
        edges.append(
            EdgeRecord(
                id=eid,
                tail=f.integer("tail"),
                head=f.integer("head"),
                traverse_penalty=f.number("T", minimum=0.0),
                interdiction_penalty=f.number("P", minimum=0.0),
                interdiction_cost=f.integer("C", minimum=1),
                group=eid if group is None else group,
                kill_prob=f.number("kill_prob", required=False, minimum=0.0, maximum=1.0) or 0.0,
                tags=frozenset(f.string_list("tags")),
            )
        )
    graph = PhysicalGraph(nodes, edges, top.integer("start"), top.integer("release"))
    epsilon = top.number("epsilon", required=False, minimum=0.0)
    return Scenario(
        graph=graph,
        budget=top.integer("budget", minimum=0),
        epsilon=0.1 if epsilon is None else epsilon,
        format_version=version,
        meters_to_t=top.number("meters_to_T", required=False, minimum=0.0),
    )


def load_scenario(path) -> Scenario:
    text = Path(path).read_text(encoding="utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioFormatError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    return document_to_scenario(doc)


def save_scenario(scenario: Scenario, path) -> None:
    Path(path).write_text(canonical_dumps(scenario_to_document(scenario)), encoding="utf-8")


# -- cost / penalty assignment ------------------------------------------------


def assign_penalties(graph: PhysicalGraph) -> PhysicalGraph:
    """Bridge-tagged edges become high-penalty, high-kill; the rest low."""
    edges = [
        replace(e, interdiction_penalty=3.0, kill_prob=0.5)
        if "bridge" in e.tags
        else replace(e, interdiction_penalty=1.0, kill_prob=0.2)
        for e in graph.edges
    ]
    return PhysicalGraph(graph.nodes, edges, graph.start, graph.release)


def assign_costs(graph: PhysicalGraph, budget: int) -> PhysicalGraph:
    """Interdiction costs from proximity to the start and release points.

    The raw score of an edge is the reciprocal of its midpoint's distance to
    the nearer of start and release (clamped to one meter), normalized to
    ceil(0.8 + (raw - min raw) * (budget + 1.3) / (max raw - min raw)).
    Edges near either endpoint are thus expensive; distant ones cost 1. When
    every raw score is equal the normalization is undefined and all costs
    become 1.
    """
    if not graph.has_coordinates:
        raise ContractViolationError("cost assignment requires node coordinates")
    sx, sy = graph.node(graph.start).xy
    rx, ry = graph.node(graph.release).xy
    raws = []
    for e in graph.edges:
        tx, ty = graph.node(e.tail).xy
        hx, hy = graph.node(e.head).xy
        mx, my = (tx + hx) / 2.0, (ty + hy) / 2.0
        d = min(math.hypot(mx - sx, my - sy), math.hypot(mx - rx, my - ry))
        raws.append(1.0 / max(d, MIN_MIDPOINT_DISTANCE_M))
    rmin, rmax = min(raws), max(raws)
    if rmax == rmin:
        costs = [1] * len(raws)
    else:
        scale = (budget + 1.3) / (rmax - rmin)
        costs = [math.ceil(0.8 + (raw - rmin) * scale) for raw in raws]
    edges = [replace(e, interdiction_cost=c) for e, c in zip(graph.edges, costs)]
    return PhysicalGraph(graph.nodes, edges, graph.start, graph.release)


# -- synthetic generators ------------------------------------------------------


def generate_grid(rows: int, cols: int, seed: int, budget: int = 4,
                  epsilon: float = 0.1) -> Scenario:
    """Seeded 4-connected directed grid from corner to corner.

    Traverse penalties are uniform in [1, 2], ten percent of road segments
    (both directions of a segment together) are bridge-tagged, and the
    standard penalty and cost assignment pipeline is applied.
    """
    if rows < 2 or cols < 2:
        raise ContractViolationError("grid needs rows >= 2 and cols >= 2")
    rng = random.Random(seed)
    dlat = math.degrees(GRID_SPACING_M / 6371008.8)
    nodes = [
        NodeRecord(id=r * cols + c, lat=r * dlat, lon=c * dlat)
        for r in range(rows)
        for c in range(cols)
    ]
    edges: list[EdgeRecord] = []

    def add_segment(a: int, b: int) -> None:
        bridge = frozenset(["bridge"]) if rng.random() < GRID_BRIDGE_SHARE else frozenset()
        for tail, head in ((a, b), (b, a)):
            eid = len(edges)
            edges.append(
                EdgeRecord(
                    id=eid,
                    tail=tail,
                    head=head,
                    traverse_penalty=rng.uniform(*GRID_T_RANGE),
                    interdiction_penalty=0.0,
                    interdiction_cost=1,
                    group=eid,
                    tags=bridge,
                )
            )

    for r in range(rows):
        for c in range(cols):
            here = r * cols + c
            if c + 1 < cols:
                add_segment(here, here + 1)
            if r + 1 < rows:
                add_segment(here, here + cols)

    graph = PhysicalGraph(nodes, edges, start=0, release=rows * cols - 1)
    graph = assign_costs(assign_penalties(graph), budget)
    return Scenario(
        graph=graph,
        budget=budget,
        epsilon=epsilon,
        meters_to_t=GRID_T_RANGE[0] / GRID_SPACING_M,
    )


def generate_line_knapsack(weights, values, budget: int, traverse_penalty: float = 1.0,
                           epsilon: float = 0.1) -> Scenario:
    """Line graph whose single route makes Red's problem a pure knapsack.

    Edge i carries interdiction cost weights[i] and penalty values[i]; the
    only route crosses every edge, so Red packs groups under the budget.
    """
    weights = list(weights)
    values = list(values)
    if len(weights) != len(values) or not weights:
        raise ContractViolationError("weights and values must be nonempty, same length")
    nodes = [NodeRecord(id=i) for i in range(len(weights) + 1)]
    edges = []
    for i, (w, v) in enumerate(zip(weights, values)):
        if not isinstance(w, int) or w < 1:
            raise ContractViolationError(f"weights[{i}] must be an integer >= 1")
        edges.append(
            EdgeRecord(
                id=i,
                tail=i,
                head=i + 1,
                traverse_penalty=traverse_penalty,
                interdiction_penalty=float(v),
                interdiction_cost=w,
                group=i,
            )
        )
    graph = PhysicalGraph(nodes, edges, start=0, release=len(weights))
    return Scenario(graph=graph, budget=budget, epsilon=epsilon)


# -- solution export -----------------------------------------------------------


def solution_document(eq: EquilibriumResult) -> dict:
    return {
        "value": eq.value,
        "gap": eq.gap,
        "lower_bound": eq.lower_bound,
        "upper_bound": eq.upper_bound,
        "iterations": eq.iterations,
        "blue": [
            {"probability": p, "edge_ids": list(f.edge_ids)} for f, p in eq.blue_mix.items()
        ],
        "red": [
            {"probability": p, "group_ids": sorted(y.group_ids), "total_cost": y.total_cost}
            for y, p in eq.red_mix.items()
        ],
        "trace": [
            {
                "iteration": r.iteration,
                "value": r.value,
                "lower": r.lower,
                "upper": r.upper,
                "gap": r.gap,
                "blue_count": r.blue_count,
                "red_count": r.red_count,
            }
            for r in eq.trace
        ],
    }


def export_solution(eq: EquilibriumResult, scenario: Scenario, path, fmt: str):
    """Write the solution as json (full result), csv (attack counts), or geojson."""
    path = Path(path)
    if fmt == "json":
        # Default float repr round-trips exactly; exactness matters more than
        # pretty canonical digits for solution values.
        path.write_text(
            json.dumps(solution_document(eq), indent=2, sort_keys=True) + "\n",
            encoding="utf-8",
        )
    elif fmt == "csv":
        from .metrics import attack_distribution

        dist = attack_distribution(scenario, eq.blue_mix, eq.red_mix)
        with path.open("w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle)
            writer.writerow(["low_attacks", "high_attacks", "probability"])
            for (low, high), prob in sorted(dist.entries.items()):
                writer.writerow([low, high, repr(prob)])
    elif fmt == "geojson":
        path.write_text(
            json.dumps(_geojson_document(eq, scenario), indent=2, sort_keys=True) + "\n",
            encoding="utf-8",
        )
    else:
        raise UnsupportedFormatError(f"unknown export format {fmt!r}")
    return path


def _geojson_document(eq: EquilibriumResult, scenario: Scenario) -> dict:
    graph = scenario.graph
    if any(n.lat is None or n.lon is None for n in graph.nodes):
        raise UnsupportedFormatError("geojson export requires lat/lon on every node")

    def lonlat(node_id):
        n = graph.node(node_id)
        return [n.lon, n.lat]

    features = []
    for f, prob in eq.blue_mix.items():
        coords = [lonlat(graph.edge(f.edge_ids[0]).tail)]
        coords.extend(lonlat(graph.edge(eid).head) for eid in f.edge_ids)
        features.append(
            {
                "type": "Feature",
                "geometry": {"type": "LineString", "coordinates": coords},
                "properties": {"kind": "route", "probability": prob},
            }
        )
    hit_prob: dict[int, float] = {}
    for y, prob in eq.red_mix.items():
        for eid in interdicted_edges(graph, y):
            hit_prob[eid] = hit_prob.get(eid, 0.0) + prob
    for eid in sorted(hit_prob):
        e = graph.edge(eid)
        features.append(
            {
                "type": "Feature",
                "geometry": {
                    "type": "LineString",
                    "coordinates": [lonlat(e.tail), lonlat(e.head)],
                },
                "properties": {
                    "kind": "interdiction",
                    "edge_id": eid,
                    "probability": hit_prob[eid],
                },
            }
        )
    return {"type": "FeatureCollection", "features": features}
