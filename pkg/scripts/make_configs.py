"""Regenerate the shipped scenario configs under configs/."""

from pathlib import Path

from ppcolor.io import save_scenario
from ppcolor.scenarios import intersection_scenario

ROOT = Path(__file__).resolve().parent.parent


def main() -> None:
    out = ROOT / "configs"
    out.mkdir(exist_ok=True)
    save_scenario(intersection_scenario(), out / "intersection.json")
    # CI-sized variant: same geometry, reduced expansion budget
    save_scenario(intersection_scenario(n_expansions=500, name="intersection8-ci"), out / "intersection_ci.json")
    print(f"wrote configs to {out}")


if __name__ == "__main__":
    main()
