#!/usr/bin/env python3
"""Recovery success versus population size at a fixed rate.

Grows p over cubes (k = cuberoot) at R = 1/1.3 for the smallest-satisfying-
set search and the greedy cover baseline; render with `plots scaling <csv>`.
"""

import argparse

from gtsearch import ExperimentSpec, run_sweep


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--p-values", default="1000,3375,8000",
                    help="comma-separated population sizes")
    ap.add_argument("--inverse-rate", type=float, default=1.3)
    ap.add_argument("--trials", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--out", default="scaling.csv")
    args = ap.parse_args()

    spec = ExperimentSpec(
        p_values=tuple(int(x) for x in args.p_values.split(",")),
        rates=(1.0 / args.inverse_rate,),
        decoders=("sss", "scomp"),
        trials_per_point=args.trials,
        base_seed=args.seed,
    )
    records = run_sweep(spec, out_path=args.out, jobs=args.jobs)
    for r in records:
        print(f"{r.decoder:6s} p={r.p}: approx={r.approx}/{r.trials}")
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
