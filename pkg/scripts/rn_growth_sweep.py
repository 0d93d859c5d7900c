"""Exploratory sweep of R(n) growth on transient families.

Prints median R(n), R(n)/log n and R(n)/log^2 n per checkpoint for each family
and writes the full tables next to each other.  Nothing is asserted: whether
some f(n) = o(n) with limsup R(n)/f(n) > 0 exists is open.

    python scripts/rn_growth_sweep.py --walks 20 --cp-max 16 --workers 4
"""
import argparse
from pathlib import Path

import numpy as np

from ohmtrace.experiments import ExperimentConfig, run_experiment

FAMILIES = ["lattice(3)", "wedge(0.3333333333333333)", "b-ary-tree(2)"]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--walks", type=int, default=20)
    ap.add_argument("--cp-min", type=int, default=6)
    ap.add_argument("--cp-max", type=int, default=14)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out", default="results")
    args = ap.parse_args()
    Path(args.out).mkdir(parents=True, exist_ok=True)
    for fam in FAMILIES:
        cfg = ExperimentConfig("rn-growth", family=fam, trials=args.walks, seed=args.seed, workers=args.workers,
                               params={"cp_min": args.cp_min, "cp_max": args.cp_max})
        rep = run_experiment(cfg)
        tag = fam.split("(")[0]
        rep.write(Path(args.out) / f"rn-growth-{tag}.csv")
        print(f"\n{fam}")
        print(f"{'n':>8s} {'walks':>6s} {'median R':>10s} {'R/log n':>9s} {'R/log^2 n':>10s}")
        walks = [r for r in rep.rows if r["kind"] == "walk"]
        for n in sorted({r["n"] for r in walks}):
            rs = np.array([r["r"] for r in walks if r["n"] == n])
            med = float(np.median(rs))
            print(f"{n:8d} {rs.size:6d} {med:10.2f} {med / np.log(n):9.3f} {med / np.log(n) ** 2:10.3f}")


if __name__ == "__main__":
    main()
