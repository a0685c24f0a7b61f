"""Level histogram over every prioritization of the intersection's step-0 coupling graph.

Prints how many of the 8! priority orders give each number of computation
levels, alongside what the constant and coloring strategies achieve.
"""

import argparse
import csv
import sys
from pathlib import Path

from ppcolor.coloring import (
    PrioritizationStrategy,
    chromatic_number_bruteforce,
    enumerate_prioritizations,
    levels_for,
    prioritize,
)
from ppcolor.io import load_scenario
from ppcolor.simulator import build_coupling

ROOT = Path(__file__).resolve().parent.parent


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--scenario", default=str(ROOT / "configs" / "intersection.json"))
    ap.add_argument("--out", help="optional CSV path for the histogram")
    args = ap.parse_args()

    sc = load_scenario(args.scenario)
    g = build_coupling([v.state for v in sc.vehicles], sc.build_mpa(), sc.horizon)
    hist = enumerate_prioritizations(g)
    total = sum(hist.values())
    print(f"coupling graph: {g.n} vertices, {len(g.edges)} edges, max degree {g.max_degree()}")
    print(f"chromatic number {chromatic_number_bruteforce(g)}")
    for name in ("constant", "coloring"):
        print(f"{name} strategy: {levels_for(g, prioritize(PrioritizationStrategy(name), g))} levels")
    print("n_levels,count,share")
    for k, v in hist.items():
        print(f"{k},{v},{v / total:.4f}")
    if args.out:
        with open(args.out, "w", newline="") as f:
            w = csv.writer(f, lineterminator="\n")
            w.writerow(["n_levels", "count"])
            w.writerows(hist.items())


if __name__ == "__main__":
    sys.exit(main())
