"""Analytic machinery for the optimization landscape of satisfying-set search.

Everything internal is in nats; conversions to bits (dividing by ln 2)
happen only at reporting boundaries, since rates are measured in bits per
test while the large-deviation algebra lives in natural logs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np
from scipy.special import gammaln, logsumexp

from .model import LN2, ReducedInstance

_BISECT_MAX_ITER = 200
_BISECT_RESIDUAL = 1e-12


def kl_bernoulli(x: float, y: float) -> float:
    """Relative entropy between Bernoulli(x) and Bernoulli(y), in nats.

    Uses the convention 0*ln(0) = 0; nonnegative, zero iff x == y.  Endpoint
    y values are rejected whenever the matching x term is nonzero (the
    divergence would be infinite).
    """
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"x must be in [0, 1], got {x}")
    if not 0.0 <= y <= 1.0:
        raise ValueError(f"y must be in [0, 1], got {y}")
    if y == 0.0 and x > 0.0:
        raise ValueError("kl_bernoulli diverges for y=0 with x>0")
    if y == 1.0 and x < 1.0:
        raise ValueError("kl_bernoulli diverges for y=1 with x<1")
    total = 0.0
    if x > 0.0:
        total += x * math.log(x / y)
    if x < 1.0:
        total += (1.0 - x) * math.log((1.0 - x) / (1.0 - y))
    return total


def log_binomial(a: int, b: int) -> float:
    """Natural log of C(a, b)."""
    if not 0 <= b <= a:
        raise ValueError(f"need 0 <= b <= a, got b={b}, a={a}")
    return float(gammaln(a + 1) - gammaln(b + 1) - gammaln(a - b + 1))


def _solve_kl_decreasing(rhs: float, y: float) -> float:
    """Solve kl_bernoulli(x, y) = rhs for the unique x in (0, y].

    kl_bernoulli(., y) is strictly decreasing on (0, y) from ln(1/(1-y)) down
    to 0, so plain bisection is unconditionally safe.  The returned x has
    re-substitution residual at most 1e-10.
    """
    if rhs < 0:
        raise ValueError(f"rhs must be >= 0, got {rhs}")
    if rhs == 0.0:
        return y
    limit = math.log(1.0 / (1.0 - y))
    if rhs >= limit:
        raise ValueError(
            f"no solution: rhs={rhs} is not below the x->0 limit {limit}"
        )
    lo, hi = 0.0, y
    mid = 0.5 * y
    for _ in range(_BISECT_MAX_ITER):
        mid = 0.5 * (lo + hi)
        value = kl_bernoulli(mid, y)
        if abs(value - rhs) <= _BISECT_RESIDUAL:
            return mid
        if value > rhs:
            lo = mid
        else:
            hi = mid
    return mid


@dataclass(frozen=True)
class FirstMomentInputs:
    """Inputs to the first-moment curve: counts of a reduced instance plus
    the overlap fraction ``lam`` in [0, 1)."""

    k: int
    p_prime: int
    n_pos: int
    lam: float

    def __post_init__(self):
        if not 1 <= self.k <= self.p_prime:
            raise ValueError(f"need 1 <= k <= p_prime, got k={self.k}, p'={self.p_prime}")
        if self.n_pos < 1:
            raise ValueError(f"n_pos must be >= 1, got {self.n_pos}")
        if not 0.0 <= self.lam < 1.0:
            raise ValueError(f"lam must be in [0, 1), got {self.lam}")


def first_moment_rhs(inputs: FirstMomentInputs) -> float:
    """The entropy budget per positive test at overlap fraction lam:
    ln[C(k, floor(lam k)) * C(p'-k, floor((1-lam) k))] / n_pos."""
    ell = math.floor(inputs.lam * inputs.k)
    other = math.floor((1.0 - inputs.lam) * inputs.k)
    if other > inputs.p_prime - inputs.k:
        raise ValueError(
            f"overlap fraction {inputs.lam} needs {other} non-defective PD items, "
            f"only {inputs.p_prime - inputs.k} available"
        )
    return (log_binomial(inputs.k, ell) + log_binomial(inputs.p_prime - inputs.k, other)) / inputs.n_pos


def first_moment_f(inputs: FirstMomentInputs) -> float:
    """The predicted minimum unexplained fraction among overlap-lam sets.

    Solves kl_bernoulli(F, 1 - 2**(lam-1)) = first_moment_rhs(inputs) for the
    unique F at or below 1 - 2**(lam-1).  Raises when the right-hand side is
    too large for a solution to exist (the curve is only defined while the
    budget stays below the x->0 divergence limit (1-lam) ln 2).
    """
    y = 1.0 - 2.0 ** (inputs.lam - 1.0)
    return _solve_kl_decreasing(first_moment_rhs(inputs), y)


def f_tilde(lam: float, rate: float) -> float:
    """First-order approximation of the first-moment curve.

    Solves kl_bernoulli(F, 1 - 2**(lam-1)) = (2R - 1) ln 2 (1 - lam), the
    large-p limit of the implicit first-moment equation, on lam in [0, 0.9].
    """
    if not 0.0 <= lam <= 0.9:
        raise ValueError(f"lam must be in [0, 0.9], got {lam}")
    if not 0.5 < rate < 1.0:
        raise ValueError(f"rate must be in (1/2, 1), got {rate}")
    y = 1.0 - 2.0 ** (lam - 1.0)
    rhs = (2.0 * rate - 1.0) * LN2 * (1.0 - lam)
    return _solve_kl_decreasing(rhs, y)


# ---------------------------------------------------------------------------
# Exhaustive minimum-energy-at-fixed-overlap tables (analysis-only: requires
# the hidden defective set).
# ---------------------------------------------------------------------------

def _pd_bitmasks(reduced: ReducedInstance) -> dict[int, int]:
    """Positive-test membership of each PD item as a bitmask integer."""
    masks = {g: 0 for g in reduced.pd}
    for t_idx, members in enumerate(reduced.pos_tests):
        bit = 1 << t_idx
        for g in members:
            masks[g] |= bit
    return masks


def phi_bruteforce(
    reduced: ReducedInstance,
    k: int,
    ell: int,
    defectives,
    cap: int = 10**7,
    with_max: bool = False,
):
    """Exact minimum unexplained count over k-subsets of PD with overlap ell.

    Enumerates every choice of ell defectives and k-ell non-defective PD
    items, evaluating coverage through precomputed per-item test bitmasks.
    Refuses when the enumeration exceeds ``cap`` candidates.  With
    ``with_max`` returns ``(min, max)`` instead (the maximum feeds the
    energy-barrier condition of overlap-gap reports).
    """
    defect_set = set(defectives)
    pd_set = set(reduced.pd)
    if not defect_set <= pd_set:
        raise ValueError("defectives must all be potentially defective")
    defect_pool = sorted(defect_set)
    other_pool = sorted(pd_set - defect_set)
    if not 0 <= ell <= k:
        raise ValueError(f"need 0 <= ell <= k, got ell={ell}")
    if ell > len(defect_pool) or k - ell > len(other_pool):
        raise ValueError(
            f"no k-subset of PD with overlap {ell}: pools have "
            f"{len(defect_pool)} defectives and {len(other_pool)} others"
        )
    total = math.comb(len(defect_pool), ell) * math.comb(len(other_pool), k - ell)
    if total > cap:
        raise ValueError(f"enumeration of {total} candidates exceeds cap {cap}")

    masks = _pd_bitmasks(reduced)
    n_pos = reduced.n_pos
    best = n_pos + 1
    worst = -1
    for chosen_defect in combinations(defect_pool, ell):
        base = 0
        for g in chosen_defect:
            base |= masks[g]
        for chosen_other in combinations(other_pool, k - ell):
            union = base
            for g in chosen_other:
                union |= masks[g]
            unexplained = n_pos - bin(union).count("1")
            if unexplained < best:
                best = unexplained
            if unexplained > worst:
                worst = unexplained
    if with_max:
        return best, worst
    return best


def phi_table(
    reduced: ReducedInstance,
    k: int,
    defectives,
    cap: int = 10**7,
    with_max: bool = False,
) -> dict:
    """phi(ell) for every feasible overlap ell in 0..k."""
    defect_set = set(defectives)
    pd_set = set(reduced.pd)
    if not defect_set <= pd_set:
        raise ValueError("defectives must all be potentially defective")
    n_other = len(pd_set - defect_set)
    table = {}
    for ell in range(k + 1):
        if ell <= len(defect_set) and k - ell <= n_other:
            table[ell] = phi_bruteforce(reduced, k, ell, defectives, cap=cap, with_max=with_max)
    return table


@dataclass(frozen=True)
class OgpReport:
    """Where the three overlap-gap conditions would hold for user-supplied
    parameters, judged against exhaustively computed energy tables.

    ``condition_split``: every overlap strictly inside (zeta, zeta+width+1)
    has minimum energy above the threshold.
    ``condition_populated``: both outer overlap ranges are feasible and at
    least one of them reaches energy <= threshold.
    ``condition_barrier``: the maximum energy over the interior band exceeds
    threshold + height; needs per-overlap maxima, else None.

    Purely diagnostic at finite size; never an asymptotic claim.
    """

    zeta: int
    width: int
    height: float
    threshold: float
    phi_values: dict[int, int]
    condition_split: bool
    condition_populated: bool
    condition_barrier: bool | None


def ogp_report(
    phi_values: dict[int, int],
    zeta: int,
    width: int,
    height: float,
    threshold: float,
    phi_max: dict[int, int] | None = None,
) -> OgpReport:
    if width < 1:
        raise ValueError(f"width must be >= 1, got {width}")
    if any(v < 0 for v in phi_values.values()):
        raise ValueError("phi values must be nonnegative")

    interior = [ell for ell in phi_values if zeta + 1 <= ell <= zeta + width]
    split = all(phi_values[ell] > threshold for ell in interior)

    low = [phi_values[ell] for ell in phi_values if ell <= zeta]
    high = [phi_values[ell] for ell in phi_values if ell >= zeta + width + 1]
    populated = bool(low) and bool(high) and min(min(low), min(high)) <= threshold

    barrier: bool | None = None
    if phi_max is not None:
        band = [phi_max[ell] for ell in phi_max if zeta + 1 <= ell <= zeta + width - 1]
        barrier = bool(band) and max(band) >= threshold + height

    return OgpReport(
        zeta=zeta,
        width=width,
        height=height,
        threshold=threshold,
        phi_values=dict(phi_values),
        condition_split=split,
        condition_populated=populated,
        condition_barrier=barrier,
    )


# ---------------------------------------------------------------------------
# The swap large-deviation exponent Q and the rate bound built on it.
# ---------------------------------------------------------------------------

def q_log_argument(lam, zeta, nu, eps):
    """The inner expression whose log defines the swap exponent.

    Scalar or numpy-vectorized in any argument.  On the valid parameter
    domain it stays within (1 - e^{-nu(1+eps)}, 1].
    """
    lam = np.asarray(lam, dtype=float)
    zeta = np.asarray(zeta, dtype=float)
    shrink = np.exp(-lam * (1.0 + eps - zeta) / (1.0 - zeta))
    first = np.exp(-nu * (1.0 + eps)) * (np.expm1(nu * (1.0 - zeta) * (shrink - 1.0)))
    second = (
        (1.0 + eps - zeta)
        * nu
        * np.exp(-nu * (1.0 + eps))
        * (-np.expm1(-nu * (1.0 - zeta)))
        * np.expm1(lam)
    )
    return first + second + 1.0


def q_function(lam, zeta, nu, eps):
    """Rate gain (bits per test) certified against swap-blocked states.

    Q(lam, zeta, nu, eps) = -ln(q_log_argument) / ((1 + eps - zeta) ln 2);
    identically zero at lam = 0 and nonnegative at the maximizing lam.
    """
    if nu <= 0:
        raise ValueError(f"nu must be positive, got {nu}")
    if not 0.0 <= eps < 1.0:
        raise ValueError(f"eps must be in [0, 1), got {eps}")
    lam_arr = np.asarray(lam, dtype=float)
    zeta_arr = np.asarray(zeta, dtype=float)
    if np.any(lam_arr < 0):
        raise ValueError("lam must be >= 0")
    if np.any(zeta_arr < 0) or np.any(zeta_arr >= 1):
        raise ValueError("zeta must be in [0, 1)")
    h = q_log_argument(lam_arr, zeta_arr, nu, eps)
    if np.any(h <= 0):
        raise ValueError("log argument is not positive; parameters out of domain")
    out = -np.log(h) / ((1.0 + eps - zeta_arr) * LN2)
    if np.ndim(out) == 0:
        return float(out)
    return out


def baseline_rate(nu: float) -> float:
    """Rate threshold of the eliminate-by-negatives decoders: nu e^{-nu} / ln 2."""
    return nu * math.exp(-nu) / LN2


@dataclass(frozen=True)
class RateBoundResult:
    """Solution of the max-min rate bound.

    ``bound = baseline_rate(nu) + q_value`` where ``q_value`` is the max over
    lam >= 0 of the min over zeta in [0, 1-delta) of Q.
    """

    nu: float
    epsilon: float
    delta: float
    lambda_star: float
    zeta_star: float
    q_value: float
    bound: float

    @property
    def base_rate(self) -> float:
        return self.bound - self.q_value


_ZETA_EDGE = 1e-9


def _zeta_grid(delta: float, step: float) -> np.ndarray:
    # half-open [0, 1-delta) realized as the step-grid clamped at 1-delta-1e-9
    upper = max(0.0, 1.0 - delta - _ZETA_EDGE)
    grid = np.arange(0.0, upper, step)
    if grid.size == 0:
        grid = np.array([0.0])
    return grid


def _min_over_zeta(lam: float, nu: float, eps: float, grid: np.ndarray) -> tuple[float, float]:
    values = q_function(lam, grid, nu, eps)
    values = np.atleast_1d(values)
    idx = int(np.argmin(values))
    lo = grid[max(idx - 1, 0)]
    hi = grid[min(idx + 1, grid.size - 1)]
    # ternary refinement inside the bracketing grid cell
    for _ in range(80):
        m1 = lo + (hi - lo) / 3.0
        m2 = hi - (hi - lo) / 3.0
        if q_function(lam, m1, nu, eps) < q_function(lam, m2, nu, eps):
            hi = m2
        else:
            lo = m1
    zeta_star = 0.5 * (lo + hi)
    candidates = [(float(values[idx]), float(grid[idx])), (q_function(lam, zeta_star, nu, eps), float(zeta_star))]
    return min(candidates)


def _max_over_lambda(
    nu: float, eps: float, grid: np.ndarray, lam_max: float
) -> tuple[float, float, float]:
    coarse = np.linspace(0.0, lam_max, 201)
    inner = [_min_over_zeta(float(l), nu, eps, grid)[0] for l in coarse]
    best_idx = int(np.argmax(inner))
    lo = coarse[max(best_idx - 1, 0)]
    hi = coarse[min(best_idx + 1, coarse.size - 1)]
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    x1 = b - invphi * (b - a)
    x2 = a + invphi * (b - a)
    f1 = _min_over_zeta(x1, nu, eps, grid)[0]
    f2 = _min_over_zeta(x2, nu, eps, grid)[0]
    for _ in range(60):
        if f1 < f2:
            a, x1, f1 = x1, x2, f2
            x2 = a + invphi * (b - a)
            f2 = _min_over_zeta(x2, nu, eps, grid)[0]
        else:
            b, x2, f2 = x2, x1, f1
            x1 = b - invphi * (b - a)
            f1 = _min_over_zeta(x1, nu, eps, grid)[0]
    lam_star = x1 if f1 >= f2 else x2
    q_star, zeta_star = _min_over_zeta(lam_star, nu, eps, grid)
    coarse_best = (float(inner[best_idx]), float(coarse[best_idx]))
    if coarse_best[0] > q_star:
        lam_star = coarse_best[1]
        q_star, zeta_star = _min_over_zeta(lam_star, nu, eps, grid)
    return float(lam_star), float(zeta_star), float(q_star)


def rate_bound(
    nu: float,
    epsilon: float,
    delta: float,
    zeta_step: float = 1e-3,
    lam_max: float = 10.0,
    lam_tol: float = 1e-6,
) -> RateBoundResult:
    """Largest certified rate below which no swap-blocked bad states survive.

    Computes max over lam >= 0 of min over zeta in [0, 1-delta) of Q, then
    adds the eliminate-by-negatives base rate.  The zeta minimization runs on
    a dense grid (default step 1e-3) with local ternary refinement; the lam
    maximization runs golden-section seeded by a coarse grid, with the lam
    ceiling doubled until the maximum stops moving by ``lam_tol``.
    """
    if nu <= 0:
        raise ValueError(f"nu must be positive, got {nu}")
    if not 0.0 <= epsilon < 1.0 or not 0.0 <= delta < 1.0:
        raise ValueError("epsilon and delta must lie in [0, 1)")
    if epsilon == 0.0 and delta == 0.0:
        raise ValueError("at least one of epsilon, delta must be positive")

    grid = _zeta_grid(delta, zeta_step)
    ceiling = lam_max
    lam_star, zeta_star, q_star = _max_over_lambda(nu, epsilon, grid, ceiling)
    for _ in range(8):
        ceiling *= 2.0
        lam2, zeta2, q2 = _max_over_lambda(nu, epsilon, grid, ceiling)
        if q2 <= q_star + lam_tol:
            break
        lam_star, zeta_star, q_star = lam2, zeta2, q2

    q_star = max(q_star, 0.0)  # lam = 0 is always feasible and gives 0
    return RateBoundResult(
        nu=nu,
        epsilon=epsilon,
        delta=delta,
        lambda_star=lam_star,
        zeta_star=zeta_star,
        q_value=q_star,
        bound=baseline_rate(nu) + q_star,
    )


def binom_tail_exponent(n_trials: int, x: float, y: float) -> float:
    """Exact normalized log lower-tail of a binomial: -ln P[Bin(N,y) <= xN] / N.

    Evaluated by log-sum-exp over the probability mass terms; used to
    validate the Bernoulli divergence against its large-deviation role.
    """
    if n_trials < 1:
        raise ValueError(f"n_trials must be >= 1, got {n_trials}")
    if not 0.0 < y < 1.0:
        raise ValueError(f"y must be in (0, 1), got {y}")
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"x must be in [0, 1], got {x}")
    m = math.floor(x * n_trials)
    js = np.arange(m + 1)
    log_pmf = (
        gammaln(n_trials + 1)
        - gammaln(js + 1)
        - gammaln(n_trials - js + 1)
        + js * math.log(y)
        + (n_trials - js) * math.log(1.0 - y)
    )
    return float(-logsumexp(log_pmf) / n_trials)
