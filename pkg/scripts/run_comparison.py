#!/usr/bin/env python3
"""Decoder comparison on the 90%-approximate recovery task.

Runs the smallest-satisfying-set search against the four baseline decoders
over an inverse-rate sweep; render with `plots comparison <csv>`.
"""

import argparse

from gtsearch import ExperimentSpec, run_sweep


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--p", type=int, default=3375)
    ap.add_argument("--trials", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--out", default="comparison.csv")
    args = ap.parse_args()

    spec = ExperimentSpec(
        p_values=(args.p,),
        rates=tuple(1.0 / (1.0 + 0.1 * i) for i in range(11)),
        decoders=("sss", "scomp", "comp", "dd", "md"),
        trials_per_point=args.trials,
        base_seed=args.seed,
    )
    records = run_sweep(spec, out_path=args.out, jobs=args.jobs)
    for r in records:
        print(f"{r.decoder:6s} R^-1={1 / r.rate:.1f}: approx={r.approx}/{r.trials}")
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
