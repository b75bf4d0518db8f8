#!/usr/bin/env python3
"""Solve-rate curves for the Glauber k-sized satisfying-set solver.

Sweeps the inverse rate at p=3375 (k = cuberoot) and writes the three
success counters per point; render with `plots optimization <csv>`.
"""

import argparse

from gtsearch import ExperimentSpec, run_sweep


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--p", type=int, default=3375)
    ap.add_argument("--trials", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--out", default="optimization.csv")
    args = ap.parse_args()

    spec = ExperimentSpec(
        p_values=(args.p,),
        rates=tuple(1.0 / (1.0 + 0.1 * i) for i in range(11)),
        decoders=("glauber",),
        trials_per_point=args.trials,
        base_seed=args.seed,
    )
    records = run_sweep(spec, out_path=args.out, jobs=args.jobs)
    for r in records:
        print(f"R^-1={1 / r.rate:.1f}: satisfying={r.satisfying}/{r.trials} "
              f"exact={r.exact} approx={r.approx}")
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
