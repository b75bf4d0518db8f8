"""Baseline decoders: elimination, unique-explainer, greedy cover, max degree."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.stats import binom

from gtsearch import (
    DesignParams,
    comp,
    dd,
    generate,
    log2_binomial,
    md,
    nu_for_half,
    reduce_instance,
    scomp,
    score,
)
from gtsearch.model import ReducedInstance


def _reduced(pd, pos_tests):
    return ReducedInstance(
        pd=tuple(pd), pos_tests=tuple(tuple(t) for t in pos_tests),
        n_pos=len(pos_tests), p_prime=len(pd),
    )


@st.composite
def small_params(draw):
    p = draw(st.integers(min_value=2, max_value=40))
    k = draw(st.integers(min_value=1, max_value=min(p, 6)))
    n = draw(st.integers(min_value=1, max_value=60))
    seed = draw(st.integers(min_value=0, max_value=2**32 - 1))
    return DesignParams(p=p, k=k, n=n, nu=nu_for_half(k), seed=seed)


class TestComp:
    def test_returns_pd_verbatim(self):
        red = _reduced((2, 5, 9), ((2, 5), (9,)))
        assert comp(red) == (2, 5, 9)

    @settings(max_examples=60, deadline=None)
    @given(small_params())
    def test_never_misses_a_defective(self, params):
        inst = generate(params)
        assert set(comp(reduce_instance(inst))) >= set(inst.defectives)

    def test_exact_recovery_rate_matches_analytic_law(self):
        # At nu = 1 the chance one non-defective dodges all negative tests is
        # s^N_neg with s = 1 - nu/k and N_neg ~ Bin(n, s^k); elimination is
        # exact iff no non-defective dodges.  Compare the empirical exact
        # rate against that law at the classical ~1.883 log2 C(p,k) budget.
        p, k, nu, seeds = 1000, 10, 1.0, 100
        n = math.ceil(1.883 * log2_binomial(p, k))
        s = 1 - nu / k
        j = np.arange(n + 1)
        weights = binom.pmf(j, n, s**k)
        p_exact = float(np.sum(weights * (1 - s**j) ** (p - k)))
        wins = 0
        for i in range(seeds):
            inst = generate(DesignParams(p=p, k=k, n=n, nu=nu, seed=9000 + i))
            wins += set(comp(reduce_instance(inst))) == set(inst.defectives)
        sigma = math.sqrt(p_exact * (1 - p_exact) / seeds)
        assert abs(wins / seeds - p_exact) <= 4 * sigma + 1e-9

    def test_exact_recovery_is_reliable_with_enough_tests(self):
        # same law says P(exact) = 0.924 at n = ceil(3.4 log2 C(p,k));
        # 4-sigma lower band over 100 seeds is 0.818
        p, k, nu, seeds = 1000, 10, 1.0, 100
        n = math.ceil(3.4 * log2_binomial(p, k))
        wins = 0
        for i in range(seeds):
            inst = generate(DesignParams(p=p, k=k, n=n, nu=nu, seed=9500 + i))
            wins += set(comp(reduce_instance(inst))) == set(inst.defectives)
        assert wins / seeds >= 0.818


class TestDd:
    def test_singleton_test_yields_its_member(self):
        red = _reduced((3, 4, 8), ((3,), (3, 4), (4, 8)))
        assert dd(red) == (3,)

    def test_all_tests_ambiguous_yields_nothing(self):
        red = _reduced((1, 2, 3), ((1, 2), (2, 3)))
        assert dd(red) == ()

    @settings(max_examples=60, deadline=None)
    @given(small_params())
    def test_only_defectives_selected(self, params):
        inst = generate(params)
        assert set(dd(reduce_instance(inst))) <= set(inst.defectives)


class TestScomp:
    def test_returns_dd_when_it_already_covers(self):
        red = _reduced((3, 4), ((3,), (3, 4)))
        assert scomp(red, rng=0) == (3,)

    def test_single_ambiguous_test_picks_one_member(self):
        red = _reduced((5, 7), ((5, 7),))
        picks = {scomp(red, rng=s) for s in range(20)}
        assert picks <= {(5,), (7,)}
        assert len(picks) == 2  # both choices occur across seeds

    def test_output_is_always_satisfying(self):
        rng = np.random.default_rng(42)
        for i in range(100):
            p = int(rng.integers(10, 200))
            k = int(rng.integers(1, 6))
            n = int(rng.integers(5, 120))
            inst = generate(DesignParams(p=p, k=k, n=n, nu=nu_for_half(k), seed=5000 + i))
            items = scomp(reduce_instance(inst), rng=np.random.default_rng(i))
            assert score(items, inst).satisfying

    @settings(max_examples=60, deadline=None)
    @given(small_params())
    def test_nested_between_dd_and_pd(self, params):
        inst = generate(params)
        red = reduce_instance(inst)
        items = scomp(red, rng=1)
        assert set(dd(red)) <= set(items) <= set(red.pd)

    def test_tie_break_reproducible(self):
        inst = generate(DesignParams(p=150, k=5, n=40, nu=nu_for_half(5), seed=77))
        red = reduce_instance(inst)
        assert scomp(red, rng=123) == scomp(red, rng=123)


class TestMd:
    def test_pd_of_size_k_returned_whole(self):
        red = _reduced((1, 2, 3), ((1,), (2, 3)))
        assert md(red, 3, rng=0) == (1, 2, 3)

    def test_small_pd_returned_whole(self):
        red = _reduced((1, 2), ((1, 2),))
        assert md(red, 5, rng=0) == (1, 2)

    def test_highest_degree_ranks_first(self):
        # item 9 sits in every positive test, the rest in one each
        red = _reduced((1, 2, 9), ((9, 1), (9, 2), (9, 1), (9, 2)))
        assert 9 in md(red, 1, rng=0)

    def test_k0_empty(self):
        red = _reduced((1, 2), ((1, 2),))
        assert md(red, 0, rng=0) == ()

    @settings(max_examples=60, deadline=None)
    @given(small_params(), st.integers(min_value=1, max_value=8))
    def test_output_size(self, params, k_req):
        inst = generate(params)
        red = reduce_instance(inst)
        items = md(red, k_req, rng=2)
        assert len(items) == min(k_req, red.p_prime)
        assert set(items) <= set(red.pd)

    def test_tie_break_reproducible(self):
        inst = generate(DesignParams(p=150, k=5, n=40, nu=nu_for_half(5), seed=78))
        red = reduce_instance(inst)
        assert md(red, 5, rng=9) == md(red, 5, rng=9)

    def test_boundary_ties_sample_uniformly(self):
        # four items of equal degree competing for two slots
        red = _reduced((1, 2, 3, 4), ((1,), (2,), (3,), (4,)))
        seen = {md(red, 2, rng=s) for s in range(60)}
        assert len(seen) == 6  # all C(4,2) pairs show up
