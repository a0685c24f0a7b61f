"""JSON documents for graphs and scenarios, CSV writers for metrics."""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path
from typing import Any, Iterable, Mapping

from .graph import CouplingDag, CouplingGraph, GraphError
from .paths import Polyline
from .simulator import MpaSpec, Scenario, StepRecord, VehicleSpec
from .vehicle import VehicleState

SCHEMA_VERSION = 1

STEP_COLUMNS = [
    "step",
    "strategy",
    "n_vertices",
    "n_edges",
    "n_levels",
    "t_ncs_modeled_ms",
    "t_ncs_measured_ms",
    "cost_step",
    "infeasible_agents",
]
AGENT_COLUMNS = [
    "step",
    "strategy",
    "agent",
    "priority",
    "level",
    "cost",
    "solve_ms",
    "infeasible",
    "x",
    "y",
    "yaw",
    "speed",
]


class ConfigError(ValueError):
    pass


def read_json(path: str | Path) -> Any:
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"cannot read {path}: {e}") from e


def graph_from_dict(doc: Mapping) -> CouplingGraph | CouplingDag:
    """``{"n": 3, "edges": [[1, 2], ...]}`` or, for a directed graph, ``"arcs"``."""
    try:
        n = doc["n"]
        if not isinstance(n, int) or isinstance(n, bool):
            raise ConfigError("field 'n' must be an integer")
        if "arcs" in doc:
            arcs = [tuple(_pair(a)) for a in doc["arcs"]]
            return CouplingDag(n, frozenset(arcs))
        return CouplingGraph.from_edges(n, [_pair(e) for e in doc.get("edges", [])])
    except (KeyError, TypeError) as e:
        raise ConfigError(f"malformed graph document: {e}") from e
    except GraphError as e:
        raise ConfigError(str(e)) from e


def _pair(e) -> list[int]:
    if not isinstance(e, (list, tuple)) or len(e) != 2 or not all(isinstance(v, int) for v in e):
        raise ConfigError(f"edge {e!r} must be a two-element integer list")
    return list(e)


def graph_to_dict(g: CouplingGraph | CouplingDag) -> dict:
    if isinstance(g, CouplingDag):
        return {"n": g.n, "arcs": [list(a) for a in sorted(g.arcs)]}
    return {"n": g.n, "edges": [list(e) for e in sorted(g.edges)]}


def load_graph(path: str | Path) -> CouplingGraph | CouplingDag:
    return graph_from_dict(read_json(path))


def scenario_to_dict(sc: Scenario) -> dict:
    mpa = sc.mpa
    return {
        "name": sc.name,
        "dt": sc.dt,
        "n_steps": sc.n_steps,
        "horizon": sc.horizon,
        "n_expansions": sc.n_expansions,
        "strategy": sc.strategy,
        "seed": sc.seed,
        "planning_ms": sc.planning_ms,
        "prioritization_ms": sc.prioritization_ms,
        "speed_weight": sc.speed_weight,
        "goal_tolerance": sc.goal_tolerance,
        "avoid_successor_plans": sc.avoid_successor_plans,
        "mpa": {
            "speed_levels": list(mpa.speed_levels),
            "steering_levels": list(mpa.steering_levels),
            "max_speed_change": mpa.max_speed_change,
            "max_steering_change": None if math.isinf(mpa.max_steering_change) else mpa.max_steering_change,
            "n_samples": mpa.n_samples,
            "wheelbase": mpa.wheelbase,
            "length": mpa.length,
            "width": mpa.width,
        },
        "boundaries": [[list(p) for p in poly] for poly in sc.boundaries],
        "vehicles": [
            {
                "state": dict(zip(("x", "y", "yaw", "speed"), v.state.as_tuple())),
                "path": [list(p) for p in v.path.points],
                "ref_speed": v.ref_speed,
            }
            for v in sc.vehicles
        ],
    }


def scenario_from_dict(doc: Mapping) -> Scenario:
    try:
        m = dict(doc.get("mpa", {}))
        if m.get("max_steering_change") is None:
            m["max_steering_change"] = math.inf
        for key in ("speed_levels", "steering_levels"):
            if key in m:
                m[key] = tuple(float(v) for v in m[key])
        vehicles = tuple(
            VehicleSpec(
                VehicleState(**{k: float(v["state"][k]) for k in ("x", "y", "yaw", "speed")}),
                Polyline(tuple(tuple(p) for p in v["path"])),
                float(v["ref_speed"]),
            )
            for v in doc["vehicles"]
        )
        simple = {
            k: doc[k]
            for k in (
                "name",
                "dt",
                "n_steps",
                "horizon",
                "n_expansions",
                "strategy",
                "seed",
                "planning_ms",
                "prioritization_ms",
                "speed_weight",
                "goal_tolerance",
                "avoid_successor_plans",
            )
            if k in doc
        }
        boundaries = tuple(tuple(tuple(p) for p in poly) for poly in doc.get("boundaries", []))
        return Scenario(vehicles=vehicles, boundaries=boundaries, mpa=MpaSpec(**m), **simple)
    except (KeyError, TypeError, ValueError) as e:
        raise ConfigError(f"malformed scenario: {e!r}") from e


def load_scenario(path: str | Path) -> Scenario:
    return scenario_from_dict(read_json(path))


def save_scenario(sc: Scenario, path: str | Path) -> None:
    Path(path).write_text(json.dumps(scenario_to_dict(sc), indent=1) + "\n")


def _fmt(x: float | None) -> str:
    if x is None:
        return ""
    return repr(float(x))


def step_row(r: StepRecord, measured: bool) -> dict:
    return {
        "step": r.step,
        "strategy": r.strategy,
        "n_vertices": r.graph.n,
        "n_edges": len(r.graph.edges),
        "n_levels": r.n_levels,
        "t_ncs_modeled_ms": _fmt(r.timing_modeled.total),
        "t_ncs_measured_ms": _fmt(r.timing_measured.total) if measured else "",
        "cost_step": _fmt(r.cost),
        "infeasible_agents": " ".join(map(str, r.infeasible)),
    }


def agent_rows(r: StepRecord, measured: bool) -> Iterable[dict]:
    for i in sorted(r.costs):
        s = r.states[i]
        yield {
            "step": r.step,
            "strategy": r.strategy,
            "agent": i,
            "priority": r.priority.priority[i],
            "level": r.levels.level[i],
            "cost": _fmt(r.costs[i]),
            "solve_ms": _fmt(r.solve_ms[i]) if measured else "",
            "infeasible": int(i in r.infeasible),
            "x": _fmt(s.x),
            "y": _fmt(s.y),
            "yaw": _fmt(s.yaw),
            "speed": _fmt(s.speed),
        }


def write_csv(path: str | Path, columns: list[str], rows: Iterable[Mapping]) -> None:
    with open(path, "w", newline="") as f:
        w = csv.DictWriter(f, fieldnames=columns, lineterminator="\n")
        w.writeheader()
        for row in rows:
            w.writerow(row)
