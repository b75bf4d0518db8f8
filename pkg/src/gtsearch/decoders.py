"""Baseline decoders: COMP, DD, SCOMP, MD.

All four are pure functions of the reduced instance (plus a caller-supplied
RNG where ties exist) and return a sorted tuple of global item indices.
"""

from __future__ import annotations

import numpy as np

from ._incidence import LocalView, as_rng
from .model import ReducedInstance


def comp(reduced: ReducedInstance) -> tuple[int, ...]:
    """Output every item that appears in no negative test (the PD set).

    Never misses a defective; false positives are whatever survived the
    negative tests.
    """
    return tuple(reduced.pd)


def dd(reduced: ReducedInstance) -> tuple[int, ...]:
    """Output PD items that are the unique PD member of some positive test.

    Such an item must be defective: every positive test contains a defective,
    and all defectives are PD.
    """
    found = {t[0] for t in reduced.pos_tests if len(t) == 1}
    return tuple(sorted(found))


def scomp(reduced: ReducedInstance, rng=None) -> tuple[int, ...]:
    """Greedy set-cover completion of DD.

    Starts from the DD items, then repeatedly adds the PD item covering the
    most currently-unexplained positive tests until none remain.  Cover
    counts are maintained by decrementing as tests become explained rather
    than rescanning.  Ties are broken uniformly at random from ``rng``.
    """
    gen = as_rng(rng)
    view = LocalView(reduced)

    chosen = np.zeros(view.p_prime, dtype=bool)
    for t in view.test_items:
        if len(t) == 1:
            chosen[t[0]] = True

    unexplained = np.ones(view.n_pos, dtype=bool)
    for i in np.flatnonzero(chosen):
        for t in view.item_tests[i]:
            unexplained[t] = False

    cover = np.zeros(view.p_prime, dtype=np.int64)
    for t_idx in np.flatnonzero(unexplained):
        for i in view.test_items[t_idx]:
            cover[i] += 1

    remaining = int(unexplained.sum())
    while remaining:
        best = cover.max()
        # every unexplained test has only unchosen PD members, so best >= 1
        # for reduced instances; a test with no PD members is uncoverable
        if best == 0:
            break
        candidates = np.flatnonzero(cover == best)
        pick = int(candidates[gen.integers(len(candidates))])
        chosen[pick] = True
        for t_idx in view.item_tests[pick]:
            if unexplained[t_idx]:
                unexplained[t_idx] = False
                remaining -= 1
                for i in view.test_items[t_idx]:
                    cover[i] -= 1
    return view.globalize(np.flatnonzero(chosen))


def md(reduced: ReducedInstance, k: int, rng=None) -> tuple[int, ...]:
    """Output the k PD items of highest positive-test degree.

    Ties at the k-th rank boundary are broken uniformly at random.  When the
    PD set has fewer than k items, the whole PD set is returned.
    """
    if k < 0:
        raise ValueError(f"k must be >= 0, got {k}")
    if k == 0:
        return ()
    view = LocalView(reduced)
    if k >= view.p_prime:
        return tuple(reduced.pd)
    gen = as_rng(rng)
    degree = np.array([len(ts) for ts in view.item_tests], dtype=np.int64)
    boundary = np.sort(degree)[::-1][k - 1]
    sure = np.flatnonzero(degree > boundary)
    ties = np.flatnonzero(degree == boundary)
    need = k - len(sure)
    picked = gen.choice(ties, size=need, replace=False) if need else np.array([], dtype=int)
    return view.globalize(list(sure) + [int(x) for x in picked])
