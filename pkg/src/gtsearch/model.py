"""Core domain types for non-adaptive Bernoulli group testing.

An instance consists of ``n`` pooled tests over ``p`` items, ``k`` of which
are defective.  Each item joins each test independently with probability
``nu / k``; a test is positive iff it contains at least one defective item.
Everything downstream (decoders, local search, landscape analytics) consumes
the ``Instance`` / ``ReducedInstance`` types defined here.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.special import gammaln

LN2 = math.log(2.0)

_MAX_SEED = 2**64


def stable_hash64(*parts) -> int:
    """Deterministic 64-bit hash of a tuple of primitives.

    Python's builtin ``hash`` is salted per process, so seed derivation goes
    through blake2b on the repr of the key instead.
    """
    digest = hashlib.blake2b(repr(parts).encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def spawn_seed(seed: int, *key) -> int:
    """Derive a child seed as ``seed XOR hash(key)``.

    Used for per-trial stream splitting: trial ``i`` of a sweep cell uses
    ``spawn_seed(base_seed, p, rate, decoder, i)`` so parallel trials never
    share a stream.
    """
    return (seed ^ stable_hash64(*key)) % _MAX_SEED


def nu_for_half(k: int) -> float:
    """Participation intensity making each test positive with probability 1/2.

    Solves ``(1 - nu/k)**k = 1/2`` in closed form: ``nu = k * (1 - 2**(-1/k))``.
    Tends to ``ln 2`` as ``k`` grows.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    return k * (1.0 - 2.0 ** (-1.0 / k))


def log2_binomial(p: int, k: int) -> float:
    """log2 of C(p, k) via log-gamma, safe for p in the hundreds of thousands."""
    if not 0 <= k <= p:
        raise ValueError(f"need 0 <= k <= p, got k={k}, p={p}")
    return float(gammaln(p + 1) - gammaln(k + 1) - gammaln(p - k + 1)) / LN2


def n_for_rate(p: int, k: int, rate: float) -> int:
    """Test count realizing a target rate: n = floor(log2 C(p,k) / R)."""
    if rate <= 0:
        raise ValueError(f"rate must be positive, got {rate}")
    quotient = log2_binomial(p, k) / rate
    n = int(math.floor(quotient))
    # snap quotients a rounding error below an integer so that the rate of a
    # known test count round-trips back to that count
    if quotient - n > 1.0 - 1e-9:
        n += 1
    if n < 1:
        raise ValueError(f"rate {rate} yields no tests for p={p}, k={k}")
    return n


@dataclass(frozen=True)
class Rate:
    """Information rate of a design: log2 C(p,k) divided by the test count."""

    value: float

    def __post_init__(self):
        if self.value <= 0:
            raise ValueError(f"rate must be positive, got {self.value}")

    @classmethod
    def from_counts(cls, p: int, k: int, n: int) -> "Rate":
        return cls(log2_binomial(p, k) / n)

    def test_count(self, p: int, k: int) -> int:
        """Round-trip back to a test count: n = floor(log2 C(p,k) / R)."""
        return n_for_rate(p, k, self.value)


@dataclass(frozen=True)
class DesignParams:
    """Parameters of one Bernoulli design draw.

    ``nu / k`` is the per-(test, item) inclusion probability, so ``nu <= k``
    is required.  ``seed`` fully determines the generated instance.
    """

    p: int
    k: int
    n: int
    nu: float
    seed: int

    def __post_init__(self):
        if self.p < 1:
            raise ValueError(f"p must be >= 1, got {self.p}")
        if not 1 <= self.k <= self.p:
            raise ValueError(f"need 1 <= k <= p, got k={self.k}, p={self.p}")
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if self.nu <= 0:
            raise ValueError(f"nu must be positive, got {self.nu}")
        if self.nu / self.k > 1.0:
            raise ValueError(f"nu/k must be <= 1, got {self.nu / self.k}")
        if not 0 <= self.seed < _MAX_SEED:
            raise ValueError(f"seed must be a 64-bit unsigned int, got {self.seed}")


def make_params(
    p: int,
    k: int,
    n: int | None = None,
    rate: float | None = None,
    nu: float | None = None,
    seed: int = 0,
) -> DesignParams:
    """Build DesignParams, deriving n from a rate and defaulting nu.

    Exactly one of ``n`` / ``rate`` must be given.  ``nu`` defaults to
    ``nu_for_half(k)``, the value at which tests are positive w.p. exactly 1/2.
    """
    if (n is None) == (rate is None):
        raise ValueError("give exactly one of n or rate")
    if n is None:
        n = n_for_rate(p, k, rate)
    if nu is None:
        nu = nu_for_half(k)
    return DesignParams(p=p, k=k, n=n, nu=nu, seed=seed)


@dataclass(frozen=True)
class Instance:
    """One generated world: test pools, hidden defective set, outcomes.

    ``tests[i]`` holds the sorted item indices pooled in test ``i`` (sparse;
    a dense n-by-p matrix would be wasteful at large p).  Immutable; safe to
    share across threads.
    """

    params: DesignParams
    tests: tuple[tuple[int, ...], ...]
    defectives: tuple[int, ...]
    outcomes: tuple[bool, ...]


def generate(params: DesignParams) -> Instance:
    """Draw an instance: uniform k-subset of defectives, Bernoulli(nu/k) pools.

    Each test's membership indicator vector is product-Bernoulli(nu/k); it is
    drawn as a Binomial(p, nu/k) size followed by a uniform subset of that
    size, which is the same distribution.  Fully determined by params.seed.
    """
    q = params.nu / params.k
    rng = np.random.default_rng(params.seed)
    defectives = np.sort(rng.choice(params.p, size=params.k, replace=False))
    defect_mask = np.zeros(params.p, dtype=bool)
    defect_mask[defectives] = True

    tests: list[tuple[int, ...]] = []
    outcomes: list[bool] = []
    for _ in range(params.n):
        size = int(rng.binomial(params.p, q))
        if size:
            members = np.sort(rng.choice(params.p, size=size, replace=False))
            tests.append(tuple(int(x) for x in members))
            outcomes.append(bool(defect_mask[members].any()))
        else:
            tests.append(())
            outcomes.append(False)
    return Instance(
        params=params,
        tests=tuple(tests),
        defectives=tuple(int(x) for x in defectives),
        outcomes=tuple(outcomes),
    )


@dataclass(frozen=True)
class ReducedInstance:
    """Instance after discarding items seen in a negative test.

    ``pd`` is the sorted set of potentially defective items (every defective
    is among them -- a defective can never sit in a negative test);
    ``pos_tests`` are the positive tests intersected with ``pd``.
    """

    pd: tuple[int, ...]
    pos_tests: tuple[tuple[int, ...], ...]
    n_pos: int
    p_prime: int


def reduce_instance(instance: Instance) -> ReducedInstance:
    """Drop every item appearing in a negative test; restrict positive tests."""
    p = instance.params.p
    in_negative = np.zeros(p, dtype=bool)
    for members, positive in zip(instance.tests, instance.outcomes):
        if not positive and members:
            in_negative[list(members)] = True
    pd_mask = ~in_negative
    pd = tuple(int(x) for x in np.flatnonzero(pd_mask))
    pos_tests = tuple(
        tuple(i for i in members if pd_mask[i])
        for members, positive in zip(instance.tests, instance.outcomes)
        if positive
    )
    return ReducedInstance(pd=pd, pos_tests=pos_tests, n_pos=len(pos_tests), p_prime=len(pd))


def energy(items: Iterable[int], reduced: ReducedInstance) -> tuple[int, int]:
    """Explained / unexplained positive-test counts for a candidate set.

    Returns ``(explained, unexplained)`` with
    ``explained + unexplained == n_pos``.
    """
    chosen = set(items)
    explained = sum(1 for t in reduced.pos_tests if not chosen.isdisjoint(t))
    return explained, reduced.n_pos - explained


@dataclass(frozen=True)
class SearchState:
    """A fixed-size candidate set with cached explained/unexplained counts."""

    sigma: tuple[int, ...]
    explained: int
    unexplained: int


def make_search_state(items: Iterable[int], reduced: ReducedInstance) -> SearchState:
    sigma = tuple(sorted(set(items)))
    pd_set = set(reduced.pd)
    if not pd_set.issuperset(sigma):
        raise ValueError("state items must be potentially defective")
    explained, unexplained = energy(sigma, reduced)
    return SearchState(sigma=sigma, explained=explained, unexplained=unexplained)


@dataclass(frozen=True)
class Estimate:
    """A candidate defective set scored against the ground truth.

    ``satisfying`` means the set explains every positive test and touches no
    negative test.  ``approx`` applies the threshold d = floor(gamma*k) to
    false negatives and false positives symmetrically; ``exact`` means both
    error counts are zero.
    """

    items: tuple[int, ...]
    false_pos: int
    false_neg: int
    satisfying: bool
    exact: bool
    approx: bool
    gamma: float


def score(items: Iterable[int], instance: Instance, gamma: float = 0.1) -> Estimate:
    """Score an estimate: error counts, satisfying flag, recovery flags."""
    if not 0 < gamma <= 1:
        raise ValueError(f"gamma must be in (0, 1], got {gamma}")
    chosen = set(items)
    truth = set(instance.defectives)
    false_pos = len(chosen - truth)
    false_neg = len(truth - chosen)
    threshold = math.floor(gamma * instance.params.k)

    satisfying = True
    for members, positive in zip(instance.tests, instance.outcomes):
        if positive:
            if chosen.isdisjoint(members):
                satisfying = False
                break
        elif not chosen.isdisjoint(members):
            satisfying = False
            break

    return Estimate(
        items=tuple(sorted(chosen)),
        false_pos=false_pos,
        false_neg=false_neg,
        satisfying=satisfying,
        exact=false_pos == 0 and false_neg == 0,
        approx=false_pos <= threshold and false_neg <= threshold,
        gamma=gamma,
    )


# ---------------------------------------------------------------------------
# Serialization: a JSON document with 0-based indices, stable key order, and
# compact separators so identical instances serialize byte-identically.
# ---------------------------------------------------------------------------

def instance_to_json(instance: Instance) -> str:
    doc = {
        "params": {
            "p": instance.params.p,
            "k": instance.params.k,
            "n": instance.params.n,
            "nu": instance.params.nu,
            "seed": instance.params.seed,
        },
        "tests": [list(t) for t in instance.tests],
        "defectives": list(instance.defectives),
        "outcomes": list(instance.outcomes),
    }
    return json.dumps(doc, sort_keys=True, separators=(",", ":"))


def instance_from_json(text: str) -> Instance:
    doc = json.loads(text)
    params = DesignParams(
        p=doc["params"]["p"],
        k=doc["params"]["k"],
        n=doc["params"]["n"],
        nu=doc["params"]["nu"],
        seed=doc["params"]["seed"],
    )
    tests = tuple(tuple(int(i) for i in t) for t in doc["tests"])
    defectives = tuple(int(i) for i in doc["defectives"])
    outcomes = tuple(bool(o) for o in doc["outcomes"])
    if len(tests) != params.n or len(outcomes) != params.n:
        raise ValueError("test/outcome count does not match params.n")
    if len(defectives) != params.k:
        raise ValueError("defective count does not match params.k")
    for t in tests:
        for i in t:
            if not 0 <= i < params.p:
                raise ValueError(f"item index {i} out of range")
    expected = tuple(bool(set(t) & set(defectives)) for t in tests)
    if expected != outcomes:
        raise ValueError("outcomes are inconsistent with tests and defectives")
    return Instance(params=params, tests=tests, defectives=defectives, outcomes=outcomes)


def save_instance(instance: Instance, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(instance_to_json(instance))
        fh.write("\n")


def load_instance(path) -> Instance:
    with open(path, "r", encoding="utf-8") as fh:
        return instance_from_json(fh.read())
