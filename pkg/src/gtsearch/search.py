"""Local-search solvers for the k-sized satisfying-set problem.

Two solvers over the space of fixed-size PD subsets: a Glauber-dynamics
sampler at constant inverse temperature, and a steepest-ascent greedy swap
search.  A smallest-satisfying-set estimator runs the Glauber solver as a
feasibility oracle inside a binary search over the set size.

Both solvers maintain the explained-test count incrementally through
per-test hit counters: a swap only touches the tests containing the two
items involved, so a step costs O(degree) instead of O(n_pos).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from ._incidence import LocalView
from .decoders import dd
from .model import ReducedInstance, spawn_seed

_RNG_BATCH = 4096


@dataclass(frozen=True)
class GlauberConfig:
    """Knobs for the Glauber solver.

    ``step_budget=None`` means ceil(20 * p' * ln p'), a near-linear budget.
    ``restarts`` extra runs from fresh random starts engage only when a run
    exhausts its budget without finding a satisfying set.
    """

    beta: float = 5.0
    step_budget: int | None = None
    restarts: int = 3
    seed: int = 0

    def __post_init__(self):
        if self.beta < 0:
            raise ValueError(f"beta must be >= 0, got {self.beta}")
        if self.step_budget is not None and self.step_budget < 1:
            raise ValueError(f"step_budget must be >= 1, got {self.step_budget}")
        if self.restarts < 0:
            raise ValueError(f"restarts must be >= 0, got {self.restarts}")


@dataclass(frozen=True)
class SearchOutcome:
    """Result of one solver invocation; found_satisfying <=> explained == n_pos."""

    items: tuple[int, ...]
    explained: int
    found_satisfying: bool
    steps_used: int
    restarts_used: int


def acceptance_probability(delta: int, beta: float) -> float:
    """Probability of accepting a swap that changes the explained count by delta.

    Logistic in beta*delta; exactly 1/2 for every proposal at beta = 0.
    """
    x = beta * delta
    if x >= 0:
        return 1.0 / (1.0 + math.exp(-x))
    e = math.exp(x)
    return e / (1.0 + e)


class CoverCounter:
    """Per-test hit counts for a candidate set, with O(degree) swap updates.

    Exposed so the incremental bookkeeping can be cross-checked against a
    full recount in tests.
    """

    def __init__(self, view: LocalView, members):
        self.view = view
        self.hits = [0] * view.n_pos
        for i in members:
            for t in view.item_tests[i]:
                self.hits[t] += 1
        self.explained = sum(1 for h in self.hits if h > 0)

    def swap_delta(self, i: int, j: int) -> int:
        """Change in explained count if member i is swapped for outsider j."""
        hits = self.hits
        view = self.view
        delta = 0
        for t in view.item_tests[j]:
            if hits[t] == 0:
                delta += 1
        j_tests = view.item_test_sets[j]
        for t in view.item_tests[i]:
            # a test whose sole hit is i stays explained if j also covers it
            if hits[t] == 1 and t not in j_tests:
                delta -= 1
        return delta

    def apply_swap(self, i: int, j: int) -> None:
        hits = self.hits
        freed = 0
        covered = 0
        for t in self.view.item_tests[i]:
            hits[t] -= 1
            if hits[t] == 0:
                freed += 1
        for t in self.view.item_tests[j]:
            if hits[t] == 0:
                covered += 1
            hits[t] += 1
        self.explained += covered - freed


def _default_budget(p_prime: int) -> int:
    return max(1, math.ceil(20 * p_prime * math.log(p_prime)))


def _run_glauber_once(view, k, beta, budget, rng):
    """One Glauber run; returns (local best state, its P, steps, satisfied)."""
    n_pos = view.n_pos
    sigma = [int(x) for x in rng.choice(view.p_prime, size=k, replace=False)]
    in_sigma = [False] * view.p_prime
    for i in sigma:
        in_sigma[i] = True
    outside = [i for i in range(view.p_prime) if not in_sigma[i]]

    cover = CoverCounter(view, sigma)
    if cover.explained == n_pos:
        return list(sigma), cover.explained, 0, True

    best_sigma = list(sigma)
    best_p = cover.explained
    steps = 0
    batch_pos = _RNG_BATCH  # force an initial draw
    u = idx_i = idx_j = None
    n_out = len(outside)
    while steps < budget:
        if batch_pos >= _RNG_BATCH:
            u = rng.random(_RNG_BATCH)
            idx_i = rng.integers(0, k, _RNG_BATCH)
            idx_j = rng.integers(0, n_out, _RNG_BATCH)
            batch_pos = 0
        pi = idx_i[batch_pos]
        pj = idx_j[batch_pos]
        r = u[batch_pos]
        batch_pos += 1
        steps += 1

        i = sigma[pi]
        j = outside[pj]
        delta = cover.swap_delta(i, j)
        if r < acceptance_probability(delta, beta):
            cover.apply_swap(i, j)
            sigma[pi] = j
            outside[pj] = i
            if cover.explained == n_pos:
                return sigma, cover.explained, steps, True
            if cover.explained > best_p:
                best_p = cover.explained
                best_sigma = list(sigma)
    return best_sigma, best_p, steps, False


def glauber_kss(reduced: ReducedInstance, k: int, cfg: GlauberConfig | None = None) -> SearchOutcome:
    """Search for a satisfying set of size exactly k by Glauber dynamics.

    Starts from a uniform random k-subset of PD; each step proposes swapping
    a uniform member for a uniform outsider and accepts with the logistic
    probability in the explained-count difference.  Returns early the first
    time every positive test is explained (checked on the initial state and
    after every accepted move); otherwise restarts up to cfg.restarts times
    and returns the best state seen.
    """
    if cfg is None:
        cfg = GlauberConfig()
    view = LocalView(reduced)
    if k > view.p_prime:
        raise ValueError(f"k={k} exceeds the PD count {view.p_prime}")
    if k == 0:
        return SearchOutcome(
            items=(),
            explained=0,
            found_satisfying=view.n_pos == 0,
            steps_used=0,
            restarts_used=0,
        )
    if k == view.p_prime:
        explained = view.n_pos - sum(1 for t in view.test_items if not t)
        return SearchOutcome(
            items=tuple(reduced.pd),
            explained=explained,
            found_satisfying=explained == view.n_pos,
            steps_used=0,
            restarts_used=0,
        )

    budget = cfg.step_budget if cfg.step_budget is not None else _default_budget(view.p_prime)
    rng = np.random.default_rng(cfg.seed)
    total_steps = 0
    best_sigma: list[int] = []
    best_p = -1
    for attempt in range(cfg.restarts + 1):
        sigma, p, steps, satisfied = _run_glauber_once(view, k, cfg.beta, budget, rng)
        total_steps += steps
        if p > best_p:
            best_p = p
            best_sigma = sigma
        if satisfied:
            return SearchOutcome(
                items=view.globalize(sigma),
                explained=p,
                found_satisfying=True,
                steps_used=total_steps,
                restarts_used=attempt,
            )
    return SearchOutcome(
        items=view.globalize(best_sigma),
        explained=best_p,
        found_satisfying=best_p == view.n_pos,
        steps_used=total_steps,
        restarts_used=cfg.restarts,
    )


def greedy_local_search(reduced: ReducedInstance, k_prime: int, seed: int = 0) -> SearchOutcome:
    """Steepest-ascent swap search over the k'-subsets of PD.

    From a uniform random start, each iteration evaluates every single-swap
    neighbor in lexicographic (member, outsider) order, then moves to the
    best strictly-improving neighbor (ties broken uniformly at random) or
    halts.  The explained count increases at every move, so the search takes
    at most n_pos improving steps.
    """
    view = LocalView(reduced)
    if k_prime > view.p_prime:
        raise ValueError(f"k_prime={k_prime} exceeds the PD count {view.p_prime}")
    rng = np.random.default_rng(seed)
    n_pos = view.n_pos

    sigma = sorted(int(x) for x in rng.choice(view.p_prime, size=k_prime, replace=False))
    in_sigma = np.zeros(view.p_prime, dtype=bool)
    in_sigma[sigma] = True
    outside = [i for i in range(view.p_prime) if not in_sigma[i]]

    cover = CoverCounter(view, sigma)
    steps = 0
    while cover.explained < n_pos and sigma and outside:
        hits = cover.hits
        loss = np.array(
            [sum(1 for t in view.item_tests[i] if hits[t] == 1) for i in sigma],
            dtype=np.int64,
        )
        gain = np.array(
            [sum(1 for t in view.item_tests[j] if hits[t] == 0) for j in outside],
            dtype=np.int64,
        )
        deltas = gain[None, :] - loss[:, None]
        # a test solely covered by member i stays explained when a co-member
        # j takes over, so credit those (i, j) pairs back
        row_of = {i: a for a, i in enumerate(sigma)}
        col_of = {j: b for b, j in enumerate(outside)}
        for t_idx, members in enumerate(view.test_items):
            if hits[t_idx] != 1:
                continue
            owner = next(i for i in members if in_sigma[i])
            a = row_of[owner]
            for j in members:
                if not in_sigma[j]:
                    deltas[a, col_of[j]] += 1
        best = int(deltas.max())
        if best <= 0:
            break
        rows, cols = np.nonzero(deltas == best)
        pick = int(rng.integers(len(rows)))
        i = sigma[rows[pick]]
        j = outside[cols[pick]]
        cover.apply_swap(i, j)
        sigma[rows[pick]] = j
        outside[cols[pick]] = i
        in_sigma[i] = False
        in_sigma[j] = True
        steps += 1
        if steps > n_pos:
            raise AssertionError("greedy exceeded its improving-step bound")

    return SearchOutcome(
        items=view.globalize(sigma),
        explained=cover.explained,
        found_satisfying=cover.explained == n_pos,
        steps_used=steps,
        restarts_used=0,
    )


def sss(
    reduced: ReducedInstance,
    cfg: GlauberConfig | None = None,
    probe_width: int = 2,
) -> SearchOutcome:
    """Smallest-satisfying-set estimate via a Glauber feasibility oracle.

    Binary-searches the set size over [max(1, |DD|), p'] using glauber_kss as
    the oracle; the full PD set is the always-feasible fallback.  Because the
    oracle can fail on feasible sizes, the converged size gets a downward
    linear probe of width ``probe_width`` and the smallest witnessed
    satisfying set wins.  The returned set is verified satisfying.
    """
    if cfg is None:
        cfg = GlauberConfig()
    if probe_width < 0:
        raise ValueError(f"probe_width must be >= 0, got {probe_width}")
    view = LocalView(reduced)
    totals = {"steps": 0, "restarts": 0, "calls": 0}

    def oracle(k_prime: int) -> SearchOutcome | None:
        call_cfg = replace(cfg, seed=spawn_seed(cfg.seed, "sss-oracle", k_prime, totals["calls"]))
        totals["calls"] += 1
        out = glauber_kss(reduced, k_prime, call_cfg)
        totals["steps"] += out.steps_used
        totals["restarts"] += out.restarts_used
        return out if out.found_satisfying else None

    best = oracle(view.p_prime)
    if best is None:
        raise RuntimeError("PD set does not explain all positive tests")

    lo = max(1, len(dd(reduced)))
    hi = view.p_prime
    while lo < hi:
        mid = (lo + hi) // 2
        witness = oracle(mid)
        if witness is not None:
            best = witness
            hi = mid
        else:
            lo = mid + 1

    for below in range(1, probe_width + 1):
        k_probe = hi - below
        if k_probe < 1:
            break
        witness = oracle(k_probe)
        if witness is not None and len(witness.items) < len(best.items):
            best = witness

    return SearchOutcome(
        items=best.items,
        explained=best.explained,
        found_satisfying=True,
        steps_used=totals["steps"],
        restarts_used=totals["restarts"],
    )
