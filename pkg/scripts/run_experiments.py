"""Run every experiment at its reference configuration and write one CSV each.

    python scripts/run_experiments.py --out results --workers 4
"""
import argparse
import time
from pathlib import Path

from ohmtrace.experiments import ExperimentConfig, run_experiment

REFERENCE = {
    "crossings": dict(family="b-ary-tree(2)", depths=[6], trials=10_000, seed=1),
    "superlevel": dict(trials=50, seed=1),
    "level-boundary": dict(family="b-ary-tree(2)", depths=list(range(4, 17)), tgrid=[0.2, 0.5, 0.8]),
    "ball-growth": dict(family="b-ary-tree(2)", depths=[20], params={"m": 5}),
    "trace": dict(family="lattice(3)", depths=[30], trials=10, seed=1),
    "rn-growth": dict(family="lattice(3)", trials=20, seed=1, params={"cp_min": 6, "cp_max": 14}),
}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="results")
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--only", nargs="*", choices=sorted(REFERENCE))
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    worst = 0
    for name in args.only or REFERENCE:
        t0 = time.perf_counter()
        rep = run_experiment(ExperimentConfig(name, workers=args.workers, **REFERENCE[name]))
        path = out / f"{name}.csv"
        rep.write(path)
        print(f"{name:15s} status {rep.status}  {len(rep.rows):5d} rows  {time.perf_counter() - t0:7.1f}s  -> {path}")
        for note in rep.notes:
            print(f"{'':15s} {note}")
        worst = max(worst, rep.status)
    return worst


if __name__ == "__main__":
    raise SystemExit(main())
