"""Monte-Carlo experiment runner: rate sweeps, p-scaling sweeps, CSV output.

A sweep is the Cartesian product of decoders, population sizes, and rates.
Every (decoder, p, rate) cell runs ``trials_per_point`` independent trials;
trial ``i`` derives its seed as ``base_seed XOR hash(p, rate, decoder, i)``
so cells and trials are independent and the whole sweep is reproducible.
"""

from __future__ import annotations

import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .decoders import comp, dd, md, scomp
from .model import (
    DesignParams,
    generate,
    n_for_rate,
    nu_for_half,
    reduce_instance,
    score,
    spawn_seed,
)
from .search import GlauberConfig, glauber_kss, greedy_local_search, sss

DECODER_NAMES = ("comp", "dd", "scomp", "md", "glauber", "sss", "greedy")

CSV_HEADER = "decoder,p,k,n,rate,trials,satisfying,exact,approx,gamma,mean_ms"


def cuberoot_floor(p: int) -> int:
    """Exact floor of the integer cube root (p ** (1/3) alone rounds badly:
    3375 ** (1/3) floats to 14.999...)."""
    if p < 1:
        raise ValueError(f"p must be >= 1, got {p}")
    root = max(1, round(p ** (1.0 / 3.0)))
    while root**3 > p:
        root -= 1
    while (root + 1) ** 3 <= p:
        root += 1
    return root


@dataclass
class ExperimentSpec:
    """One sweep: which decoders to run over which (p, rate) grid.

    ``k_rule`` is either the string "cuberoot" (k = floor(p^(1/3)), the
    regime where exact recovery stays possible at every rate below one) or
    an explicit integer.  Rates are information rates R; config files may
    give ``inverse_rates`` instead.
    """

    p_values: tuple[int, ...]
    rates: tuple[float, ...]
    decoders: tuple[str, ...]
    k_rule: str | int = "cuberoot"
    trials_per_point: int = 100
    gamma: float = 0.1
    base_seed: int = 0
    beta: float = 5.0
    restarts: int = 3
    record_timings: bool = True

    def __post_init__(self):
        self.p_values = tuple(int(p) for p in self.p_values)
        self.rates = tuple(float(r) for r in self.rates)
        self.decoders = tuple(self.decoders)
        for name in self.decoders:
            if name not in DECODER_NAMES:
                raise ValueError(f"unknown decoder {name!r}; choose from {DECODER_NAMES}")
        if self.trials_per_point < 1:
            raise ValueError("trials_per_point must be >= 1")
        if not all(r > 0 for r in self.rates):
            raise ValueError("rates must be positive")
        if not 0 < self.gamma <= 1:
            raise ValueError("gamma must be in (0, 1]")

    def k_for(self, p: int) -> int:
        if self.k_rule == "cuberoot":
            return cuberoot_floor(p)
        return int(self.k_rule)

    @classmethod
    def from_dict(cls, doc: dict) -> "ExperimentSpec":
        doc = dict(doc)
        if "inverse_rates" in doc:
            if "rates" in doc:
                raise ValueError("give rates or inverse_rates, not both")
            doc["rates"] = [1.0 / float(r) for r in doc.pop("inverse_rates")]
        known = {
            "p_values", "rates", "decoders", "k_rule", "trials_per_point",
            "gamma", "base_seed", "beta", "restarts", "record_timings",
        }
        unknown = set(doc) - known
        if unknown:
            raise ValueError(f"unknown config fields: {sorted(unknown)}")
        return cls(**doc)

    @classmethod
    def from_json(cls, text: str) -> "ExperimentSpec":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class SuccessRecord:
    """Aggregated counts for one (decoder, p, rate) cell."""

    decoder: str
    p: int
    k: int
    n: int
    rate: float
    trials: int
    satisfying: int
    exact: int
    approx: int
    gamma: float
    mean_ms: float

    def csv_row(self) -> str:
        return (
            f"{self.decoder},{self.p},{self.k},{self.n},{self.rate:.10g},"
            f"{self.trials},{self.satisfying},{self.exact},{self.approx},"
            f"{self.gamma:.10g},{self.mean_ms:.3f}"
        )


def _decode(decoder: str, reduced, k: int, seed: int, beta: float, restarts: int):
    if decoder == "comp":
        return comp(reduced)
    if decoder == "dd":
        return dd(reduced)
    if decoder == "scomp":
        return scomp(reduced, np.random.default_rng(seed))
    if decoder == "md":
        return md(reduced, k, np.random.default_rng(seed))
    cfg = GlauberConfig(beta=beta, restarts=restarts, seed=seed)
    if decoder == "glauber":
        return glauber_kss(reduced, k, cfg).items
    if decoder == "sss":
        return sss(reduced, cfg).items
    if decoder == "greedy":
        return greedy_local_search(reduced, k, seed=seed).items
    raise ValueError(f"unknown decoder {decoder!r}")


def run_point(
    p: int,
    k: int,
    n: int,
    rate: float,
    decoder: str,
    trials: int,
    gamma: float,
    base_seed: int,
    beta: float = 5.0,
    restarts: int = 3,
    record_timings: bool = True,
) -> SuccessRecord:
    """Run all trials of one sweep cell and aggregate the success counters.

    A trial that trips a decoder precondition counts as a failure (nothing
    incremented) rather than aborting the cell.
    """
    satisfying_n = exact_n = approx_n = 0
    elapsed = 0.0
    nu = nu_for_half(k)
    for i in range(trials):
        seed = spawn_seed(base_seed, p, rate, decoder, i)
        instance = generate(DesignParams(p=p, k=k, n=n, nu=nu, seed=seed))
        reduced = reduce_instance(instance)
        started = time.perf_counter()
        try:
            items = _decode(decoder, reduced, k, spawn_seed(seed, "decode"), beta, restarts)
        except ValueError:
            elapsed += time.perf_counter() - started
            continue
        elapsed += time.perf_counter() - started
        est = score(items, instance, gamma)
        satisfying_n += est.satisfying
        exact_n += est.exact
        approx_n += est.approx
    mean_ms = (elapsed / trials) * 1e3 if record_timings else 0.0
    return SuccessRecord(
        decoder=decoder,
        p=p,
        k=k,
        n=n,
        rate=rate,
        trials=trials,
        satisfying=satisfying_n,
        exact=exact_n,
        approx=approx_n,
        gamma=gamma,
        mean_ms=mean_ms,
    )


def _cells(spec: ExperimentSpec) -> list[tuple]:
    cells = []
    for decoder in spec.decoders:
        for p in spec.p_values:
            k = spec.k_for(p)
            for rate in spec.rates:
                n = n_for_rate(p, k, rate)
                cells.append((p, k, n, rate, decoder))
    return cells


def _check_seed_collisions(spec: ExperimentSpec, cells) -> None:
    seeds = [
        spawn_seed(spec.base_seed, p, rate, decoder, i)
        for (p, _k, _n, rate, decoder) in cells
        for i in range(spec.trials_per_point)
    ]
    if len(set(seeds)) != len(seeds):
        raise RuntimeError("per-trial seed collision; change base_seed")


def _run_cell(args) -> SuccessRecord:
    spec_fields, cell = args
    p, k, n, rate, decoder = cell
    return run_point(
        p, k, n, rate, decoder,
        trials=spec_fields["trials_per_point"],
        gamma=spec_fields["gamma"],
        base_seed=spec_fields["base_seed"],
        beta=spec_fields["beta"],
        restarts=spec_fields["restarts"],
        record_timings=spec_fields["record_timings"],
    )


def run_sweep(spec: ExperimentSpec, out_path=None, jobs: int = 1) -> list[SuccessRecord]:
    """Execute every cell of the sweep, optionally writing a CSV.

    Row order follows the spec's (decoder, p, rate) iteration order, so two
    runs of the same spec produce identical statistics in identical order.
    """
    cells = _cells(spec)
    _check_seed_collisions(spec, cells)
    fields = {
        "trials_per_point": spec.trials_per_point,
        "gamma": spec.gamma,
        "base_seed": spec.base_seed,
        "beta": spec.beta,
        "restarts": spec.restarts,
        "record_timings": spec.record_timings,
    }
    if jobs > 1 and len(cells) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            records = list(pool.map(_run_cell, [(fields, c) for c in cells]))
    else:
        records = [_run_cell((fields, c)) for c in cells]
    if out_path is not None:
        write_csv(records, out_path)
    return records


def records_to_csv(records) -> str:
    lines = [CSV_HEADER]
    lines.extend(r.csv_row() for r in records)
    return "\n".join(lines) + "\n"


def write_csv(records, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(records_to_csv(records))
