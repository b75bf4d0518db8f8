"""Local-coordinate incidence structures over the positive tests.

Decoders and the local-search solvers all work on the reduced instance in
local PD coordinates 0..p'-1.  Building the item->tests adjacency once per
decode keeps the hot loops free of dict lookups on global item ids.
"""

from __future__ import annotations

import numpy as np

from .model import ReducedInstance


class LocalView:
    """Positive-test incidence for a ReducedInstance, in local PD indices."""

    def __init__(self, reduced: ReducedInstance):
        self.pd = list(reduced.pd)
        self.p_prime = reduced.p_prime
        self.n_pos = reduced.n_pos
        index = {g: i for i, g in enumerate(self.pd)}
        self.test_items: list[tuple[int, ...]] = [
            tuple(index[g] for g in t) for t in reduced.pos_tests
        ]
        by_item: list[list[int]] = [[] for _ in range(self.p_prime)]
        for t_idx, members in enumerate(self.test_items):
            for i in members:
                by_item[i].append(t_idx)
        self.item_tests: list[tuple[int, ...]] = [tuple(ts) for ts in by_item]
        self.item_test_sets: list[frozenset[int]] = [frozenset(ts) for ts in by_item]

    def globalize(self, local_items) -> tuple[int, ...]:
        return tuple(sorted(self.pd[i] for i in local_items))


def as_rng(rng) -> np.random.Generator:
    """Accept a Generator, an int seed, or None (seed 0) for tie-breaking."""
    if isinstance(rng, np.random.Generator):
        return rng
    if rng is None:
        return np.random.default_rng(0)
    return np.random.default_rng(rng)
