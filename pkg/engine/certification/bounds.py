"""
Closed-form pieces of the certificate: binomial ratios, the overlap
probability delta, Clopper-Pearson lower bounds, the risk probability and
the Jensen-Shannon divergence.

All functions here are pure.
"""
import logging
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import bisect
from scipy.special import betainc, gammaln, rel_entr

from engine.core import masked_count, round_half_away
from engine.errors import InvalidArgumentError, NumericalError

logger = logging.getLogger(__name__)

EXACT_COMB_LIMIT = 64
QUANTILE_TOL = 1e-12
QUANTILE_MAXITER = 200


# ─────────────────────────────────────────────
#  Binomial coefficients
# ─────────────────────────────────────────────

def log_comb(n: int, k: int) -> float:
    """log C(n, k); -inf when the coefficient is zero (k < 0 or k > n)."""
    if k < 0 or n < 0 or k > n:
        return -math.inf
    if n <= EXACT_COMB_LIMIT:
        return math.log(math.comb(n, k))
    return float(gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1))


def comb_ratio(n_top: int, k_top: int, n_bottom: int, k_bottom: int) -> float:
    """C(n_top, k_top) / C(n_bottom, k_bottom), zero when the numerator is zero."""
    if n_bottom <= EXACT_COMB_LIMIT and n_top <= EXACT_COMB_LIMIT:
        top = math.comb(n_top, k_top) if 0 <= k_top <= n_top else 0
        bottom = math.comb(n_bottom, k_bottom) if 0 <= k_bottom <= n_bottom else 0
        if bottom == 0:
            raise InvalidArgumentError(f"C({n_bottom}, {k_bottom}) is zero")
        return top / bottom
    numerator = log_comb(n_top, k_top)
    if numerator == -math.inf:
        return 0.0
    denominator = log_comb(n_bottom, k_bottom)
    if denominator == -math.inf:
        raise InvalidArgumentError(f"C({n_bottom}, {k_bottom}) is zero")
    return math.exp(numerator - denominator)


def delta(h: int, k: int, d: int) -> float:
    """
    Probability that a uniform k-subset of h positions hits a fixed set of d positions.

    delta = 1 - C(h-d, k) / C(h, k), with C(h-d, k) = 0 when k > h-d.
    """
    if not 0 <= k <= h:
        raise InvalidArgumentError(f"k must lie in [0, {h}], got {k}")
    if not 0 <= d <= h:
        raise InvalidArgumentError(f"d must lie in [0, {h}], got {d}")
    return 1.0 - comb_ratio(h - d, k, h, k)


# ─────────────────────────────────────────────
#  Confidence bounds
# ─────────────────────────────────────────────

def beta_quantile(alpha: float, a: float, b: float) -> float:
    """
    The alpha-quantile of Beta(a, b): x with I_x(a, b) = alpha.

    Bracketed bisection on the regularized incomplete beta function; b = 1
    uses the closed form alpha ** (1/a).

    Raises:
        NumericalError: Bisection did not converge
    """
    if not 0.0 < alpha < 1.0:
        raise InvalidArgumentError(f"alpha must lie in (0, 1), got {alpha}")
    if not (a > 0 and b > 0):
        raise InvalidArgumentError(f"Beta parameters must be positive, got ({a}, {b})")
    if b == 1:
        return alpha ** (1.0 / a)
    if a == 1:
        return 1.0 - (1.0 - alpha) ** (1.0 / b)
    root, info = bisect(
        lambda x: betainc(a, b, x) - alpha,
        0.0,
        1.0,
        xtol=QUANTILE_TOL,
        maxiter=QUANTILE_MAXITER,
        full_output=True,
        disp=False,
    )
    if not info.converged:
        raise NumericalError(f"Beta({a}, {b}) quantile at {alpha} did not converge: {info.flag}")
    return float(root)


def clopper_pearson_lower(n_c: int, n: int, alpha: float) -> float:
    """One-sided (1 - alpha) Clopper-Pearson lower bound on a binomial proportion."""
    if n < 1:
        raise InvalidArgumentError(f"n must be >= 1, got {n}")
    if not 0 <= n_c <= n:
        raise InvalidArgumentError(f"n_c must lie in [0, {n}], got {n_c}")
    if n_c == 0:
        return 0.0
    return beta_quantile(alpha, n_c, n - n_c + 1)


# ─────────────────────────────────────────────
#  Risk probability
# ─────────────────────────────────────────────

@dataclass(frozen=True)
class RiskParams:
    """An attacker perturbing a fraction gamma of h words against masking rate rho."""
    gamma: float
    rho: float
    h: int

    def __post_init__(self):
        if not 0.0 <= self.gamma <= 1.0:
            raise InvalidArgumentError(f"gamma must lie in [0, 1], got {self.gamma}")
        if not 0.0 <= self.rho <= 1.0:
            raise InvalidArgumentError(f"rho must lie in [0, 1], got {self.rho}")
        if self.h < 1:
            raise InvalidArgumentError(f"h must be >= 1, got {self.h}")

    @property
    def perturbed(self) -> int:
        return min(round_half_away(self.gamma * self.h), self.h)

    @property
    def masked(self) -> int:
        return masked_count(self.h, self.rho)


def risk_probability(p: RiskParams) -> float:
    """
    Probability that none of the perturbed words is masked.

    C(h - g, m) / C(h, m) for g perturbed and m masked words; zero when the
    masked words cannot all avoid the perturbed ones.
    """
    return comb_ratio(p.h - p.perturbed, p.masked, p.h, p.masked)


def risk_probability_for_dataset(lengths: Iterable[int], rho: float, gamma: float) -> float:
    """Risk probability at the dataset's average text length."""
    values = [int(v) for v in lengths]
    if not values:
        raise InvalidArgumentError("need at least one text length")
    h = max(round_half_away(sum(values) / len(values)), 1)
    return risk_probability(RiskParams(gamma=gamma, rho=rho, h=h))


# ─────────────────────────────────────────────
#  Divergence
# ─────────────────────────────────────────────

def js_divergence(p: Sequence[float], q: Sequence[float]) -> float:
    """Jensen-Shannon divergence (natural log) of two distributions on the same support."""
    p_arr = np.asarray(p, dtype=float)
    q_arr = np.asarray(q, dtype=float)
    if p_arr.shape != q_arr.shape or p_arr.ndim != 1:
        raise InvalidArgumentError(f"support mismatch: {p_arr.shape} vs {q_arr.shape}")
    for name, arr in (("p", p_arr), ("q", q_arr)):
        if np.any(arr < 0) or abs(arr.sum() - 1.0) > 1e-9:
            raise InvalidArgumentError(f"{name} is not a probability distribution: {arr.tolist()}")
    if np.array_equal(p_arr, q_arr):
        return 0.0
    m = 0.5 * (p_arr + q_arr)
    # rounding can push nearly equal inputs a hair below zero
    return float(max(0.5 * (rel_entr(p_arr, m).sum() + rel_entr(q_arr, m).sum()), 0.0))
