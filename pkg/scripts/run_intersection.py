"""Four-strategy comparison on the shipped intersection at the full expansion budget.

Writes compare.csv and per-strategy step/agent CSVs through the CLI, then
prints the per-step level counts side by side.
"""

import argparse
import csv
from pathlib import Path

from ppcolor.cli import main as cli

ROOT = Path(__file__).resolve().parent.parent


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out-dir", default=str(ROOT / "results" / "intersection"))
    ap.add_argument("--n-exp", type=int, default=2500)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--measure-time", action="store_true")
    args = ap.parse_args()

    argv = [
        "compare",
        "--scenario",
        str(ROOT / "configs" / "intersection.json"),
        "--n-exp",
        str(args.n_exp),
        "--seed",
        str(args.seed),
        "--out-dir",
        args.out_dir,
    ]
    if args.measure_time:
        argv.append("--measure-time")
    code = cli(argv)
    if code:
        return code

    out = Path(args.out_dir)
    levels = {}
    for name in ("constant", "random", "constraint", "coloring"):
        with open(out / f"steps_{name}.csv") as f:
            levels[name] = [int(r["n_levels"]) for r in csv.DictReader(f)]
    print("step " + " ".join(f"{n:>10}" for n in levels))
    for k in range(len(levels["constant"])):
        print(f"{k:>4} " + " ".join(f"{levels[n][k]:>10}" for n in levels))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
