"""Command-line interface.

Exit codes: 0 success, 2 validation failure (bad file or arguments),
3 iteration budget exhausted, 4 I/O error.
"""

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

from . import metrics, scenario_io, solver
from .errors import (
    IterationBudgetError,
    RouteGameError,
)
from .game import MixedStrategy

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_ITERATIONS = 3
EXIT_IO = 4


def _parse_budgets(text: str) -> list[int]:
    if ".." in text:
        lo, hi = text.split("..", 1)
        return list(range(int(lo), int(hi) + 1))
    return [int(part) for part in text.split(",") if part]


def _load(args):
    scenario = scenario_io.load_scenario(args.scenario)
    if getattr(args, "budget", None) is not None:
        scenario = scenario.with_budget(args.budget)
    if getattr(args, "epsilon", None) is not None:
        scenario = replace(scenario, epsilon=args.epsilon)
    return scenario


def _cmd_solve(args) -> int:
    scenario = _load(args)
    eq = solver.solve(scenario, max_iters=args.max_iters)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    target = scenario_io.export_solution(eq, scenario, out_dir / f"solution.{args.format}",
                                         args.format)
    print(f"value={eq.value:.6f} gap={eq.gap:.6f} iterations={eq.iterations}")
    print(f"wrote {target}")
    return EXIT_OK


def _cmd_baseline(args) -> int:
    scenario = _load(args)
    if args.which == "fastest":
        route = metrics.fastest_route(scenario)
    else:
        eq = solver.solve(scenario, max_iters=args.max_iters)
        route = metrics.red_aware_route(scenario, eq)
    worst = metrics.worst_case_utility(scenario, route)
    from .red import best_response_red

    response, _ = best_response_red(scenario, MixedStrategy.pure(route))
    report = {
        "which": args.which,
        "edge_ids": list(route.edge_ids),
        "traverse_cost": scenario.graph.route_cost(route),
        "worst_case_utility": worst,
        "throughput_vs_best_response": metrics.throughput(
            scenario, route, MixedStrategy.pure(response)
        ),
    }
    print(json.dumps(report, indent=2, sort_keys=True))
    return EXIT_OK


def _cmd_robustness(args) -> int:
    scenario = _load(args)
    budgets = _parse_budgets(args.budgets)
    table = metrics.robustness_table(scenario, budgets)
    lines = ["planned\\true," + ",".join(str(b) for b in budgets)]
    for i, b in enumerate(budgets):
        lines.append(f"{b}," + ",".join(repr(x) for x in table[i].tolist()))
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _cmd_gen(args) -> int:
    if args.kind == "grid":
        scenario = scenario_io.generate_grid(
            args.rows, args.cols, args.seed, budget=args.budget, epsilon=args.epsilon
        )
    else:
        weights = [int(w) for w in args.weights.split(",")]
        values = [float(v) for v in args.values.split(",")]
        scenario = scenario_io.generate_line_knapsack(
            weights, values, budget=args.budget, traverse_penalty=args.traverse,
            epsilon=args.epsilon,
        )
    scenario_io.save_scenario(scenario, args.out)
    graph = scenario.graph
    print(f"wrote {args.out} ({len(graph.nodes)} nodes, {len(graph.edges)} edges)")
    return EXIT_OK


def _cmd_validate(args) -> int:
    scenario = scenario_io.load_scenario(args.scenario)
    graph = scenario.graph
    print(
        f"ok: {len(graph.nodes)} nodes, {len(graph.edges)} edges, "
        f"{len(graph.groups)} groups, budget={scenario.budget}, "
        f"epsilon={scenario.epsilon}"
    )
    return EXIT_OK


def _cmd_prepare(args) -> int:
    scenario = scenario_io.load_scenario(args.scenario)
    graph = scenario_io.assign_costs(
        scenario_io.assign_penalties(scenario.graph), args.budget
    )
    prepared = replace(scenario, graph=graph, budget=args.budget)
    scenario_io.save_scenario(prepared, args.out)
    print(f"wrote {args.out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="routegame",
        description="Solve route-vs-interdiction games on directed graphs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="compute an epsilon-approximate equilibrium")
    p.add_argument("--scenario", required=True)
    p.add_argument("--budget", type=int)
    p.add_argument("--epsilon", type=float, help="equilibrium gap tolerance (default 0.1)")
    p.add_argument("--max-iters", type=int, default=solver.DEFAULT_MAX_ITERS)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--format", choices=["json", "csv", "geojson"], default="json")
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("baseline", help="evaluate a deterministic baseline route")
    p.add_argument("--scenario", required=True)
    p.add_argument("--budget", type=int)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--max-iters", type=int, default=solver.DEFAULT_MAX_ITERS)
    p.add_argument("--which", choices=["fastest", "redaware"], required=True)
    p.set_defaults(func=_cmd_baseline)

    p = sub.add_parser("robustness", help="throughput across planned vs true budgets")
    p.add_argument("--scenario", required=True)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--budgets", required=True, help="e.g. 1..6 or 1,3,5")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_robustness)

    p = sub.add_parser("gen", help="generate a synthetic scenario")
    gen_sub = p.add_subparsers(dest="kind", required=True)
    g = gen_sub.add_parser("grid")
    g.add_argument("--rows", type=int, required=True)
    g.add_argument("--cols", type=int, required=True)
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--budget", type=int, default=4)
    g.add_argument("--epsilon", type=float, default=0.1)
    g.add_argument("--out", required=True)
    g.set_defaults(func=_cmd_gen)
    li = gen_sub.add_parser("line")
    li.add_argument("--weights", required=True, help="comma-separated integers")
    li.add_argument("--values", required=True, help="comma-separated numbers")
    li.add_argument("--budget", type=int, required=True)
    li.add_argument("--traverse", type=float, default=1.0)
    li.add_argument("--epsilon", type=float, default=0.1)
    li.add_argument("--out", required=True)
    li.set_defaults(func=_cmd_gen)

    p = sub.add_parser("validate", help="check a scenario file")
    p.add_argument("--scenario", required=True)
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("prepare", help="apply penalty and cost assignment to a scenario")
    p.add_argument("--scenario", required=True)
    p.add_argument("--budget", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_prepare)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except IterationBudgetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ITERATIONS
    except RouteGameError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
