"""Command-line entry point: ``ppcolor {color,enumerate,simulate,compare,replay}``.

Exit codes: 0 success (including runs with handled planner infeasibility),
2 input or configuration error, 3 exhaustive-search budget exceeded.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .coloring import (
    BudgetError,
    PrioritizationStrategy,
    color_to_priority,
    enumerate_prioritizations,
    greedy_color,
    orient_edges,
    prioritize,
    MAX_BRUTE_FORCE,
    chromatic_number_bruteforce,
)
from .graph import CouplingDag, compute_levels
from .io import (
    AGENT_COLUMNS,
    SCHEMA_VERSION,
    STEP_COLUMNS,
    ConfigError,
    agent_rows,
    graph_to_dict,
    load_graph,
    load_scenario,
    step_row,
    write_csv,
)
from .simulator import STRATEGIES, ExperimentResult, Scenario, build_coupling, normalized_costs, run_experiment

EXIT_INPUT = 2
EXIT_BUDGET = 3

COMPARE_COLUMNS = [
    "strategy",
    "median_t_ncs_modeled_ms",
    "max_t_ncs_modeled_ms",
    "median_t_ncs_measured_ms",
    "max_t_ncs_measured_ms",
    "median_levels",
    "max_levels",
    "total_cost",
    "normalized_cost",
    "infeasible_solves",
    "executed_collisions",
    "consistency_violations",
    "all_reached",
    "chi_step0",
    "max_degree_bound",
]


def _write_manifest(args: argparse.Namespace, argv: list[str], seeds: list[int]) -> None:
    manifest = {
        "command": args.command,
        "argv": argv,
        "config": getattr(args, "scenario", None) or getattr(args, "graph", None),
        "seeds": seeds,
        "out_dir": str(args.out_dir),
        "version": __version__,
        "schema_version": SCHEMA_VERSION,
        "timestamp": datetime.now(timezone.utc).isoformat(),
    }
    (Path(args.out_dir) / "manifest.json").write_text(json.dumps(manifest, indent=1) + "\n")


def _dump(path: Path, doc) -> None:
    path.write_text(json.dumps(doc, indent=1, sort_keys=True) + "\n")


def cmd_color(args: argparse.Namespace) -> int:
    g = load_graph(args.graph)
    if isinstance(g, CouplingDag):
        raise ConfigError("color expects an undirected graph ('edges', not 'arcs')")
    coloring = greedy_color(g)
    plain = compute_levels(orient_edges(g, color_to_priority(coloring)))
    priority = prioritize(PrioritizationStrategy("coloring"), g)
    dag = orient_edges(g, priority)
    levels = compute_levels(dag)
    equal = coloring.n_colors == plain.n_levels
    _dump(
        Path(args.out_dir) / "coloring.json",
        {
            "n_colors": coloring.n_colors,
            "n_levels": levels.n_levels,
            "coloring": {str(i): coloring.color[i] for i in g.vertices},
            "priority": {str(i): priority.priority[i] for i in g.vertices},
            "level": {str(i): levels.level[i] for i in g.vertices},
            "dag": graph_to_dict(dag),
            "colors_equal_levels": equal,
        },
    )
    print(f"n_colors {coloring.n_colors}")
    print(f"n_levels {levels.n_levels}")
    print(f"n_colors == n_levels: {'PASS' if equal else 'FAIL'}")
    return 0


def cmd_enumerate(args: argparse.Namespace) -> int:
    g = load_graph(args.graph)
    if isinstance(g, CouplingDag):
        g = g.undirected()
    hist = enumerate_prioritizations(g)
    write_csv(Path(args.out_dir) / "histogram.csv", ["n_levels", "count"], ({"n_levels": k, "count": v} for k, v in hist.items()))
    for k, v in hist.items():
        print(f"{k},{v}")
    return 0


def _scenario(args: argparse.Namespace) -> Scenario:
    if args.scenario == "intersection":
        from .scenarios import intersection_scenario

        sc = intersection_scenario()
    else:
        sc = load_scenario(args.scenario)
    changes = {}
    if getattr(args, "strategy", None):
        changes["strategy"] = args.strategy
    for key, attr in (("seed", "seed"), ("steps", "n_steps"), ("n_exp", "n_expansions")):
        value = getattr(args, key, None)
        if value is not None:
            changes[attr] = value
    try:
        sc = sc.with_(**changes)
    except ValueError as e:
        raise ConfigError(str(e)) from e
    args.effective_seed = sc.seed
    return sc


def _summary_doc(result: ExperimentResult, measured: bool) -> dict:
    doc = dataclasses.asdict(result.summary)
    doc["reached"] = {str(k): v for k, v in doc["reached"].items()}
    if not measured:
        doc["max_t_ncs_measured_ms"] = None
        doc["median_t_ncs_measured_ms"] = None
    return doc


def _write_steps(out: Path, result: ExperimentResult, measured: bool, suffix: str = "") -> None:
    write_csv(out / f"steps{suffix}.csv", STEP_COLUMNS, (step_row(r, measured) for r in result.records))
    write_csv(
        out / f"agents{suffix}.csv",
        AGENT_COLUMNS,
        (row for r in result.records for row in agent_rows(r, measured)),
    )


def cmd_simulate(args: argparse.Namespace) -> int:
    sc = _scenario(args)
    result = run_experiment(sc)
    out = Path(args.out_dir)
    _write_steps(out, result, args.measure_time)
    _dump(out / "summary.json", _summary_doc(result, args.measure_time))
    s = result.summary
    print(f"strategy {s.strategy}: steps {s.n_steps}, max levels {s.max_levels}, median levels {s.median_levels}")
    print(f"total cost {s.total_cost:.6g}, infeasible solves {s.infeasible_solves}, collisions {s.executed_collisions}")
    print(f"all vehicles reached their path ends: {s.all_reached}")
    return 0


def cmd_compare(args: argparse.Namespace) -> int:
    sc = _scenario(args)
    mpa = sc.build_mpa()
    g0 = build_coupling([v.state for v in sc.vehicles], mpa, sc.horizon)
    chi0 = chromatic_number_bruteforce(g0) if g0.n <= MAX_BRUTE_FORCE else ""
    results = {name: run_experiment(sc.with_(strategy=name)) for name in args.strategies}
    norm = normalized_costs(results) if "constant" in results else {k: "" for k in results}
    out = Path(args.out_dir)
    rows = []
    for name, res in results.items():
        s = res.summary
        rows.append(
            {
                "strategy": name,
                "median_t_ncs_modeled_ms": repr(float(s.median_t_ncs_modeled_ms)),
                "max_t_ncs_modeled_ms": repr(float(s.max_t_ncs_modeled_ms)),
                "median_t_ncs_measured_ms": repr(float(s.median_t_ncs_measured_ms)) if args.measure_time else "",
                "max_t_ncs_measured_ms": repr(float(s.max_t_ncs_measured_ms)) if args.measure_time else "",
                "median_levels": s.median_levels,
                "max_levels": s.max_levels,
                "total_cost": repr(float(s.total_cost)),
                "normalized_cost": repr(float(norm[name])) if norm[name] != "" else "",
                "infeasible_solves": s.infeasible_solves,
                "executed_collisions": s.executed_collisions,
                "consistency_violations": s.consistency_violations,
                "all_reached": s.all_reached,
                "chi_step0": chi0,
                "max_degree_bound": max((r.graph.max_degree() + 1 for r in res.records), default=""),
            }
        )
        _write_steps(out, res, args.measure_time, suffix=f"_{name}")
    write_csv(out / "compare.csv", COMPARE_COLUMNS, rows)
    for row in rows:
        print(
            f"{row['strategy']:>10}: levels max {row['max_levels']} median {row['median_levels']}, "
            f"T_NCS modeled max {float(row['max_t_ncs_modeled_ms']):.1f} ms, cost x{row['normalized_cost'] or '?'}"
        )
    return 0


def cmd_replay(args: argparse.Namespace) -> int:
    manifest = json.loads(Path(args.manifest).read_text())
    argv = list(manifest["argv"])
    if args.out_dir:
        k = argv.index("--out-dir")
        argv[k + 1] = args.out_dir
    return main(argv)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ppcolor", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("color", help="greedy-color a graph file and report levels")
    c.add_argument("--graph", required=True)
    c.add_argument("--out-dir", default=".")
    c.set_defaults(func=cmd_color)

    e = sub.add_parser("enumerate", help="level histogram over all n! prioritizations")
    e.add_argument("--graph", required=True)
    e.add_argument("--out-dir", default=".")
    e.set_defaults(func=cmd_enumerate)

    for name, func, help_ in (
        ("simulate", cmd_simulate, "run one strategy on a scenario"),
        ("compare", cmd_compare, "run all four strategies with common seeds"),
    ):
        s = sub.add_parser(name, help=help_)
        s.add_argument("--scenario", required=True, help="scenario JSON file, or 'intersection' for the built-in one")
        if name == "simulate":
            s.add_argument("--strategy", choices=STRATEGIES)
        else:
            s.add_argument("--strategies", nargs="+", choices=STRATEGIES, default=list(STRATEGIES))
        s.add_argument("--seed", type=int)
        s.add_argument("--steps", type=int)
        s.add_argument("--n-exp", type=int)
        s.add_argument("--measure-time", action="store_true", help="record wall-clock solve times (not reproducible)")
        s.add_argument("--out-dir", default=".")
        s.set_defaults(func=func)

    r = sub.add_parser("replay", help="re-run the command recorded in a manifest")
    r.add_argument("manifest")
    r.add_argument("--out-dir")
    r.set_defaults(func=cmd_replay)
    return p


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        if args.command != "replay":
            Path(args.out_dir).mkdir(parents=True, exist_ok=True)
        code = args.func(args)
    except BudgetError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_BUDGET
    except (ConfigError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    if args.command != "replay":
        seed = getattr(args, "effective_seed", None)
        seeds = [] if seed is None else [seed]
        _write_manifest(args, argv, seeds)
    return code


if __name__ == "__main__":
    sys.exit(main())
