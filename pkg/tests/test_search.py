"""Local search: Glauber dynamics, greedy swaps, smallest-satisfying-set."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gtsearch import (
    CoverCounter,
    DesignParams,
    GlauberConfig,
    acceptance_probability,
    dd,
    energy,
    generate,
    glauber_kss,
    greedy_local_search,
    n_for_rate,
    nu_for_half,
    reduce_instance,
    spawn_seed,
    sss,
)
from gtsearch._incidence import LocalView
from gtsearch.model import ReducedInstance


def _reduced(pd, pos_tests):
    return ReducedInstance(
        pd=tuple(pd), pos_tests=tuple(tuple(t) for t in pos_tests),
        n_pos=len(pos_tests), p_prime=len(pd),
    )


def _random_instance(rng, p_max=60):
    p = int(rng.integers(4, p_max))
    k = int(rng.integers(1, min(p, 6)))
    n = int(rng.integers(2, 80))
    return generate(DesignParams(p=p, k=k, n=n, nu=nu_for_half(k), seed=int(rng.integers(2**31))))


class TestAcceptanceProbability:
    def test_beta_zero_is_exactly_half(self):
        for delta in (-5, -1, 0, 1, 5):
            assert acceptance_probability(delta, 0.0) == 0.5

    def test_matches_logistic(self):
        for delta in (-3, -1, 0, 2):
            expected = 1.0 / (1.0 + math.exp(-5.0 * delta))
            assert acceptance_probability(delta, 5.0) == pytest.approx(expected, rel=1e-12)

    def test_symmetry(self):
        assert acceptance_probability(2, 3.0) + acceptance_probability(-2, 3.0) == pytest.approx(1.0)

    def test_extreme_delta_does_not_overflow(self):
        assert acceptance_probability(-1000, 5.0) == 0.0
        assert acceptance_probability(1000, 5.0) == 1.0


class TestCoverCounter:
    def test_incremental_matches_full_recount_on_random_trajectories(self):
        # differential bookkeeping must agree with a from-scratch energy
        # evaluation at every step of a random swap walk
        rng = np.random.default_rng(3)
        for _ in range(25):
            inst = _random_instance(rng)
            red = reduce_instance(inst)
            view = LocalView(red)
            k = int(rng.integers(1, red.p_prime + 1))
            if k == red.p_prime:
                continue
            members = [int(x) for x in rng.choice(red.p_prime, size=k, replace=False)]
            outside = [i for i in range(red.p_prime) if i not in set(members)]
            cover = CoverCounter(view, members)
            for _ in range(60):
                a = int(rng.integers(len(members)))
                b = int(rng.integers(len(outside)))
                i, j = members[a], outside[b]
                before = cover.explained
                delta = cover.swap_delta(i, j)
                cover.apply_swap(i, j)
                members[a], outside[b] = j, i
                explained, _ = energy(view.globalize(members), red)
                assert cover.explained == explained
                assert delta == explained - before


class TestGlauber:
    def test_no_positive_tests_succeeds_immediately(self):
        red = _reduced((0, 1, 2), ())
        out = glauber_kss(red, 2, GlauberConfig(seed=1))
        assert out.found_satisfying and out.explained == 0 and out.steps_used == 0

    def test_k_equal_pd_returns_pd(self):
        inst = generate(DesignParams(p=30, k=3, n=30, nu=nu_for_half(3), seed=8))
        red = reduce_instance(inst)
        out = glauber_kss(red, red.p_prime, GlauberConfig(seed=1))
        assert out.items == red.pd
        assert out.found_satisfying  # truth is inside PD, so PD explains all

    def test_rejects_k_above_pd(self):
        red = _reduced((0, 1), ((0, 1),))
        with pytest.raises(ValueError):
            glauber_kss(red, 3)

    def test_state_size_and_containment(self):
        rng = np.random.default_rng(11)
        for _ in range(15):
            inst = _random_instance(rng)
            red = reduce_instance(inst)
            k = inst.params.k
            out = glauber_kss(red, k, GlauberConfig(seed=int(rng.integers(2**31))))
            assert len(out.items) == min(k, red.p_prime) or red.p_prime == k
            assert set(out.items) <= set(red.pd)
            assert (out.explained == red.n_pos) == out.found_satisfying
            explained, _ = energy(out.items, red)
            assert explained == out.explained

    def test_deterministic_given_seed(self):
        inst = generate(DesignParams(p=200, k=5, n=45, nu=nu_for_half(5), seed=21))
        red = reduce_instance(inst)
        cfg = GlauberConfig(seed=99)
        assert glauber_kss(red, 5, cfg) == glauber_kss(red, 5, cfg)

    def test_solves_small_instances_reliably(self):
        wins = 0
        for i in range(40):
            inst = generate(
                DesignParams(p=343, k=7, n=n_for_rate(343, 7, 0.9), nu=nu_for_half(7), seed=100 + i)
            )
            red = reduce_instance(inst)
            out = glauber_kss(red, 7, GlauberConfig(seed=i))
            wins += out.found_satisfying
        assert wins >= 36

    def test_restarts_only_engage_on_failure(self):
        inst = generate(DesignParams(p=343, k=7, n=n_for_rate(343, 7, 0.85), nu=nu_for_half(7), seed=5))
        red = reduce_instance(inst)
        out = glauber_kss(red, 7, GlauberConfig(seed=3))
        if out.found_satisfying:
            assert out.restarts_used < 3 or out.steps_used > 0
        # an impossible target size forces every restart to burn out
        forced = glauber_kss(red, 1, GlauberConfig(seed=3, step_budget=50, restarts=2))
        if not forced.found_satisfying:
            assert forced.restarts_used == 2
            assert forced.steps_used == 150


class TestGreedy:
    def test_no_positive_tests_halts_at_start(self):
        red = _reduced((0, 1, 2), ())
        out = greedy_local_search(red, 2, seed=4)
        assert out.found_satisfying and out.steps_used == 0

    def test_rejects_k_above_pd(self):
        red = _reduced((0, 1), ((0, 1),))
        with pytest.raises(ValueError):
            greedy_local_search(red, 3)

    def test_step_count_bounded_by_n_pos(self):
        rng = np.random.default_rng(17)
        for _ in range(60):
            inst = _random_instance(rng)
            red = reduce_instance(inst)
            out = greedy_local_search(red, inst.params.k, seed=int(rng.integers(2**31)))
            assert out.steps_used <= red.n_pos + 1
            explained, _ = energy(out.items, red)
            assert explained == out.explained

    def test_deterministic_given_seed(self):
        inst = generate(DesignParams(p=200, k=5, n=45, nu=nu_for_half(5), seed=23))
        red = reduce_instance(inst)
        assert greedy_local_search(red, 5, seed=7) == greedy_local_search(red, 5, seed=7)

    def test_recovers_all_defectives_below_the_certified_rate(self):
        # slightly oversized target set, participation ln(5/2), rate 0.54:
        # the landscape has no swap-blocked bad states, so steepest ascent
        # should assemble every defective in nearly all trials
        p, k = 3375, 15
        k_prime = math.floor(1.01 * k)
        n = n_for_rate(p, k, 0.54)
        wins = 0
        for i in range(100):
            seed = spawn_seed(0, p, 0.54, "greedy-cover", i)
            inst = generate(DesignParams(p=p, k=k, n=n, nu=math.log(5 / 2), seed=seed))
            red = reduce_instance(inst)
            out = greedy_local_search(red, k_prime, seed=spawn_seed(seed, "decode"))
            wins += set(inst.defectives) <= set(out.items)
        assert wins >= 90


class TestSss:
    def test_recovers_truth_when_pd_collapses(self):
        params = DesignParams(p=6, k=2, n=3, nu=1.0, seed=0)
        from gtsearch.model import Instance

        inst = Instance(
            params=params,
            tests=((0, 1), (2, 3), (4, 5)),
            defectives=(4, 5),
            outcomes=(False, False, True),
        )
        red = reduce_instance(inst)
        out = sss(red, GlauberConfig(seed=2))
        # both items share the one positive test, so a single item suffices
        assert out.found_satisfying
        assert len(out.items) == 1
        assert set(out.items) <= {4, 5}

    def test_output_always_satisfying_with_size_bounds(self):
        rng = np.random.default_rng(29)
        for _ in range(20):
            inst = _random_instance(rng)
            red = reduce_instance(inst)
            out = sss(red, GlauberConfig(seed=int(rng.integers(2**31))))
            assert out.found_satisfying
            explained, unexplained = energy(out.items, red)
            assert unexplained == 0
            assert len(dd(red)) <= len(out.items) <= red.p_prime

    def test_deterministic_given_seed(self):
        inst = generate(DesignParams(p=200, k=5, n=50, nu=nu_for_half(5), seed=31))
        red = reduce_instance(inst)
        cfg = GlauberConfig(seed=13)
        assert sss(red, cfg) == sss(red, cfg)

    def test_size_tracks_truth_on_generated_instances(self):
        hits = 0
        for i in range(20):
            inst = generate(
                DesignParams(p=343, k=7, n=n_for_rate(343, 7, 0.7), nu=nu_for_half(7), seed=400 + i)
            )
            red = reduce_instance(inst)
            out = sss(red, GlauberConfig(seed=i))
            hits += len(out.items) <= 7
        assert hits >= 18  # the defective set itself is satisfying and has size 7
