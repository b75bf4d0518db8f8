"""Command-line entry point: generation, decoding, landscape analytics, sweeps.

Machine-readable output goes to stdout by default; ``--out`` redirects to a
file.  Exit codes: 0 success, 1 validation error, 2 I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import landscape as ls
from .decoders import comp, dd, md, scomp
from .harness import DECODER_NAMES, ExperimentSpec, records_to_csv, run_sweep
from .model import (
    load_instance,
    make_params,
    generate,
    reduce_instance,
    save_instance,
    score,
)
from .search import GlauberConfig, glauber_kss, greedy_local_search, sss


class _Parser(argparse.ArgumentParser):
    """argparse variant that exits 1 (validation) instead of 2 on bad flags."""

    def error(self, message):
        self.exit(1, f"{self.prog}: error: {message}\n")


def _emit(text: str, out_path) -> None:
    if out_path is None:
        sys.stdout.write(text)
    else:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _comma_list(cast):
    def parse(value):
        return tuple(cast(part) for part in value.split(",") if part)

    return parse


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gtsearch", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a Bernoulli test instance", parents=[])
    gen.add_argument("--p", type=int, required=True, help="population size")
    gen.add_argument("--k", type=int, required=True, help="number of defective items")
    gen.add_argument("--n", type=int, help="test count (give this or --rate)")
    gen.add_argument("--rate", type=float, help="information rate R; n = floor(log2 C(p,k) / R)")
    gen.add_argument("--nu", type=float, help="participation intensity (default: solves the half-positive equation)")
    gen.add_argument("--seed", type=int, default=0, help="RNG seed (default: %(default)s)")
    gen.add_argument("--out", required=True, help="output path for the instance JSON")

    dec = sub.add_parser("decode", help="run one decoder on a stored instance")
    dec.add_argument("--instance", required=True, help="instance JSON path")
    dec.add_argument("--decoder", required=True, choices=DECODER_NAMES, help="decoder name")
    dec.add_argument("--k", type=int, help="target set size for md/glauber/greedy (default: instance k)")
    dec.add_argument("--beta", type=float, default=5.0, help="inverse temperature (default: %(default)s)")
    dec.add_argument("--steps", type=int, help="step budget override (default: ceil(20 p' ln p'))")
    dec.add_argument("--restarts", type=int, default=3, help="extra runs on failure (default: %(default)s)")
    dec.add_argument("--seed", type=int, default=0, help="decoder RNG seed (default: %(default)s)")
    dec.add_argument("--gamma", type=float, default=0.1, help="approximate-recovery level (default: %(default)s)")
    dec.add_argument("--json", action="store_true", help="emit a JSON report instead of text")
    dec.add_argument("--out", help="write the report to a file instead of stdout")

    land = sub.add_parser("landscape", help="first-moment curves, swap exponent, rate bound")
    land.add_argument("mode", choices=("F", "Ftilde", "Q", "ratebound", "phi"))
    land.add_argument("--k", type=int, help="defective count (mode F)")
    land.add_argument("--p-prime", type=int, help="PD count (mode F)")
    land.add_argument("--n-pos", type=int, help="positive-test count (mode F)")
    land.add_argument("--rate", "--R", dest="rate", type=float, help="rate R (modes F/Ftilde)")
    land.add_argument("--points", type=int, default=1000, help="grid size for F/Ftilde (default: %(default)s)")
    land.add_argument("--lambda", dest="lam", type=float, default=0.0, help="swap tilt lambda (mode Q; default: %(default)s)")
    land.add_argument("--nu", type=float, help="participation intensity (modes Q/ratebound)")
    land.add_argument("--eps", type=float, default=0.01, help="size slack epsilon (default: %(default)s)")
    land.add_argument("--delta", type=float, default=0.0, help="overlap slack delta (default: %(default)s)")
    land.add_argument("--step", type=float, default=1e-3, help="zeta grid step (mode Q; default: %(default)s)")
    land.add_argument("--instance", help="instance JSON path (mode phi)")
    land.add_argument("--cap", type=int, default=10**7, help="enumeration cap (mode phi; default: %(default)s)")
    land.add_argument("--out", help="write CSV/record to a file instead of stdout")

    exp = sub.add_parser("experiment", help="run a Monte-Carlo sweep and write CSV")
    exp.add_argument("--config", help="JSON spec file; flags below override its fields")
    exp.add_argument("--preset", choices=("optimization", "comparison", "scaling"),
                     help="start from a canned figure-style spec")
    exp.add_argument("--p-values", type=_comma_list(int), help="comma-separated population sizes")
    exp.add_argument("--rates", type=_comma_list(float), help="comma-separated rates R")
    exp.add_argument("--inverse-rates", type=_comma_list(float), help="comma-separated inverse rates 1/R")
    exp.add_argument("--decoders", type=_comma_list(str), help="comma-separated decoder names")
    exp.add_argument("--k-rule", help='"cuberoot" or an explicit integer (default: cuberoot)')
    exp.add_argument("--trials", type=int, help="trials per point (default: 100)")
    exp.add_argument("--gamma", type=float, help="approximate-recovery level (default: 0.1)")
    exp.add_argument("--seed", type=int, help="base seed (default: 0)")
    exp.add_argument("--beta", type=float, help="Glauber inverse temperature (default: 5)")
    exp.add_argument("--restarts", type=int, help="Glauber restarts (default: 3)")
    exp.add_argument("--jobs", type=int, default=1, help="parallel worker processes (default: %(default)s)")
    exp.add_argument("--no-timings", action="store_true", help="write mean_ms as 0 for byte-stable output")
    exp.add_argument("--out", help="CSV output path (default: stdout)")

    return parser


def _cmd_gen(args) -> int:
    params = make_params(p=args.p, k=args.k, n=args.n, rate=args.rate, nu=args.nu, seed=args.seed)
    instance = generate(params)
    save_instance(instance, args.out)
    return 0


def _cmd_decode(args) -> int:
    instance = load_instance(args.instance)
    reduced = reduce_instance(instance)
    k = args.k if args.k is not None else instance.params.k
    steps_used = 0
    if args.decoder == "comp":
        items = comp(reduced)
    elif args.decoder == "dd":
        items = dd(reduced)
    elif args.decoder == "scomp":
        items = scomp(reduced, np.random.default_rng(args.seed))
    elif args.decoder == "md":
        items = md(reduced, k, np.random.default_rng(args.seed))
    else:
        cfg = GlauberConfig(beta=args.beta, step_budget=args.steps,
                            restarts=args.restarts, seed=args.seed)
        if args.decoder == "glauber":
            outcome = glauber_kss(reduced, k, cfg)
        elif args.decoder == "sss":
            outcome = sss(reduced, cfg)
        else:
            outcome = greedy_local_search(reduced, k, seed=args.seed)
        items = outcome.items
        steps_used = outcome.steps_used
    est = score(items, instance, args.gamma)
    report = {
        "decoder": args.decoder,
        "size": len(est.items),
        "false_pos": est.false_pos,
        "false_neg": est.false_neg,
        "satisfying": est.satisfying,
        "exact": est.exact,
        "approx": est.approx,
        "gamma": est.gamma,
        "steps_used": steps_used,
        "items": list(est.items),
    }
    if args.json:
        text = json.dumps(report, sort_keys=True) + "\n"
    else:
        text = (
            f"decoder={args.decoder} size={report['size']} "
            f"false_pos={report['false_pos']} false_neg={report['false_neg']} "
            f"satisfying={report['satisfying']} steps_used={steps_used}\n"
        )
    _emit(text, args.out)
    return 0


def _cmd_landscape(args) -> int:
    if args.mode == "Ftilde":
        if args.rate is None:
            raise ValueError("mode Ftilde needs --rate")
        grid = np.linspace(0.0, 0.9, args.points)
        lines = ["lambda,F_tilde,R"]
        lines += [f"{x:.12g},{ls.f_tilde(float(x), args.rate):.12g},{args.rate:.10g}" for x in grid]
        _emit("\n".join(lines) + "\n", args.out)
        return 0
    if args.mode == "F":
        if args.k is None or args.p_prime is None or args.n_pos is None:
            raise ValueError("mode F needs --k, --p-prime, and --n-pos")
        rate_col = f"{args.rate:.10g}" if args.rate is not None else "nan"
        lines = ["lambda,F,R"]
        for x in np.linspace(0.0, 0.9, args.points):
            inputs = ls.FirstMomentInputs(k=args.k, p_prime=args.p_prime,
                                          n_pos=args.n_pos, lam=float(x))
            lines.append(f"{x:.12g},{ls.first_moment_f(inputs):.12g},{rate_col}")
        _emit("\n".join(lines) + "\n", args.out)
        return 0
    if args.mode == "Q":
        if args.nu is None:
            raise ValueError("mode Q needs --nu")
        upper = max(0.0, 1.0 - args.delta - 1e-9)
        grid = np.arange(0.0, upper, args.step)
        if grid.size == 0:
            grid = np.array([0.0])
        values = ls.q_function(args.lam, grid, args.nu, args.eps)
        values = np.atleast_1d(values)
        lines = ["zeta,Q"]
        lines += [f"{z:.12g},{q:.12g}" for z, q in zip(grid, values)]
        _emit("\n".join(lines) + "\n", args.out)
        return 0
    if args.mode == "ratebound":
        if args.nu is None:
            raise ValueError("mode ratebound needs --nu")
        res = ls.rate_bound(args.nu, args.eps, args.delta)
        record = {
            "nu": res.nu,
            "epsilon": res.epsilon,
            "delta": res.delta,
            "lambda_star": res.lambda_star,
            "zeta_star": res.zeta_star,
            "q_value": res.q_value,
            "base_rate": res.base_rate,
            "bound": res.bound,
        }
        _emit(json.dumps(record, sort_keys=True) + "\n", args.out)
        return 0
    # phi: exhaustive minimum-energy table of a stored instance
    if args.instance is None:
        raise ValueError("mode phi needs --instance")
    instance = load_instance(args.instance)
    reduced = reduce_instance(instance)
    k = args.k if args.k is not None else instance.params.k
    table = ls.phi_table(reduced, k, instance.defectives, cap=args.cap)
    lines = ["ell,phi"]
    lines += [f"{ell},{table[ell]}" for ell in sorted(table)]
    _emit("\n".join(lines) + "\n", args.out)
    return 0


_PRESETS = {
    "optimization": {
        "p_values": (3375,),
        "inverse_rates": tuple(round(1.0 + 0.1 * i, 1) for i in range(11)),
        "decoders": ("glauber",),
    },
    "comparison": {
        "p_values": (3375,),
        "inverse_rates": tuple(round(1.0 + 0.1 * i, 1) for i in range(11)),
        "decoders": ("sss", "scomp", "comp", "dd", "md"),
    },
    "scaling": {
        "p_values": (1000, 3375, 8000),
        "inverse_rates": (1.3,),
        "decoders": ("sss", "scomp"),
    },
}


def _cmd_experiment(args) -> int:
    doc: dict = {}
    if args.preset:
        doc.update(_PRESETS[args.preset])
    if args.config:
        try:
            with open(args.config, "r", encoding="utf-8") as fh:
                loaded = json.load(fh)
        except json.JSONDecodeError as err:
            raise ValueError(
                f"config parse error in {args.config} at line {err.lineno}, "
                f"column {err.colno}: {err.msg}"
            ) from err
        doc.update(loaded)
    if args.p_values is not None:
        doc["p_values"] = args.p_values
    if args.rates is not None:
        doc["rates"] = args.rates
        doc.pop("inverse_rates", None)
    if args.inverse_rates is not None:
        doc["inverse_rates"] = args.inverse_rates
        doc.pop("rates", None)
    if args.decoders is not None:
        doc["decoders"] = args.decoders
    if args.k_rule is not None:
        doc["k_rule"] = args.k_rule if args.k_rule == "cuberoot" else int(args.k_rule)
    if args.trials is not None:
        doc["trials_per_point"] = args.trials
    if args.gamma is not None:
        doc["gamma"] = args.gamma
    if args.seed is not None:
        doc["base_seed"] = args.seed
    if args.beta is not None:
        doc["beta"] = args.beta
    if args.restarts is not None:
        doc["restarts"] = args.restarts
    if args.no_timings:
        doc["record_timings"] = False
    for required in ("p_values", "decoders"):
        if required not in doc:
            raise ValueError(f"experiment spec is missing {required!r}")
    if "rates" not in doc and "inverse_rates" not in doc:
        raise ValueError("experiment spec is missing rates")
    spec = ExperimentSpec.from_dict(doc)
    records = run_sweep(spec, jobs=args.jobs)
    _emit(records_to_csv(records), args.out)
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.command == "gen":
            return _cmd_gen(args)
        if args.command == "decode":
            return _cmd_decode(args)
        if args.command == "landscape":
            return _cmd_landscape(args)
        return _cmd_experiment(args)
    except ValueError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    except OSError as err:
        print(f"i/o error: {err}", file=sys.stderr)
        return 2


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
