"""Gaussian mechanism guarantees and chi-square norm-bound probabilities.

The (epsilon, delta) guarantee follows the Gaussian-mechanism formula
epsilon = 2 * sqrt(2 * ln(1.25 / delta)) / sigma, where sigma is the total
noise standard deviation sqrt(sigma_L^2 + sigma_S^2) and the L2
sensitivity is absorbed into the leading constant.  The guarantee is
stated for epsilon in (0, 1); values outside that range are computed
anyway and flagged rather than refused, since parameter sweeps naturally
cross the boundary.

The chi-square CDF is the regularized lower incomplete gamma function,
implemented in-repo with the usual split: power series for x < a + 1,
modified Lentz continued fraction otherwise.  Target accuracy 1e-10
absolute.

Noise generation uses numpy's PCG64 generator with its ziggurat
standard-normal transform; a fixed seed gives bit-identical output.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

_EPS_CONSTANT = 2.0  # absorbed L2 sensitivity
_GAMMA_TOL = 1e-15
_GAMMA_MAX_ITER = 10_000


@dataclass(frozen=True)
class DpGuarantee:
    """An (epsilon, delta) pair tied to a total noise standard deviation."""

    epsilon: float
    delta: float
    total_sigma: float
    in_stated_range: bool  # True when epsilon lies in (0, 1)


@dataclass(frozen=True)
class NormBoundReport:
    """Probability that a noise row's squared norm stays below
    zeta * (sigma_L^2 + sigma_S^2), plus the combined success probability
    of the accuracy bound."""

    dimension: int
    zeta: float
    probability: float
    combined_success: float  # 1 - delta * (1 - probability), product form
    union_bound_success: float  # 1 - delta - (1 - probability), clipped at 0


def _check_delta(delta: float) -> None:
    if not 0 < delta < 1.25:
        raise ValueError(f"delta must be in (0, 1.25), got {delta}")


def epsilon_from_sigma(total_sigma: float, delta: float) -> DpGuarantee:
    """Privacy level for a given total noise standard deviation.

    total_sigma = 0 yields epsilon = inf (no privacy), not an error.
    """
    _check_delta(delta)
    if total_sigma < 0 or not math.isfinite(total_sigma):
        raise ValueError(f"total_sigma must be finite and >= 0, got {total_sigma}")
    if total_sigma == 0:
        return DpGuarantee(math.inf, delta, 0.0, False)
    eps = _EPS_CONSTANT * math.sqrt(2.0 * math.log(1.25 / delta)) / total_sigma
    return DpGuarantee(eps, delta, total_sigma, 0.0 < eps < 1.0)


def sigma_from_epsilon(epsilon: float, delta: float) -> float:
    """Noise standard deviation achieving a given epsilon (exact inverse)."""
    _check_delta(delta)
    if epsilon <= 0 or not math.isfinite(epsilon):
        raise ValueError(f"epsilon must be finite and > 0, got {epsilon}")
    return _EPS_CONSTANT * math.sqrt(2.0 * math.log(1.25 / delta)) / epsilon


def gaussian_perturb(vector: np.ndarray, sigma: float, seed: int) -> np.ndarray:
    """Add i.i.d. mean-zero Gaussian noise of std-dev sigma to each component."""
    if sigma < 0:
        raise ValueError(f"sigma must be >= 0, got {sigma}")
    vector = np.asarray(vector, dtype=float)
    if sigma == 0:
        return vector.copy()
    rng = np.random.Generator(np.random.PCG64(seed))
    return vector + sigma * rng.standard_normal(vector.shape)


def _lower_gamma_series(a: float, x: float) -> float:
    """Regularized P(a, x) by power series; accurate for x < a + 1."""
    term = 1.0 / a
    total = term
    for k in range(1, _GAMMA_MAX_ITER):
        term *= x / (a + k)
        total += term
        if abs(term) < abs(total) * _GAMMA_TOL:
            break
    return total * math.exp(-x + a * math.log(x) - math.lgamma(a))

def _upper_gamma_cf(a: float, x: float) -> float:
    """Regularized Q(a, x) by continued fraction (modified Lentz);
    accurate for x >= a + 1."""
    tiny = 1e-300
    b = x + 1.0 - a
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for k in range(1, _GAMMA_MAX_ITER):
        an = -k * (k - a)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _GAMMA_TOL:
            break
    return h * math.exp(-x + a * math.log(x) - math.lgamma(a))


def regularized_lower_gamma(a: float, x: float) -> float:
    """gamma(a, x) / Gamma(a) for a > 0, x >= 0."""
    if a <= 0:
        raise ValueError(f"a must be > 0, got {a}")
    if x < 0:
        raise ValueError(f"x must be >= 0, got {x}")
    if x == 0:
        return 0.0
    if x < a + 1.0:
        return min(1.0, _lower_gamma_series(a, x))
    return min(1.0, max(0.0, 1.0 - _upper_gamma_cf(a, x)))


def chi_square_cdf(d: int, zeta: float) -> float:
    """CDF of a chi-square variable with d degrees of freedom at zeta."""
    if d < 1:
        raise ValueError(f"d must be >= 1, got {d}")
    if zeta < 0:
        raise ValueError(f"zeta must be >= 0, got {zeta}")
    return regularized_lower_gamma(d / 2.0, zeta / 2.0)


def norm_bound_probability(
    d: int, zeta: float, sigma_L: float, sigma_S_i: float, delta: float
) -> NormBoundReport:
    """Chance that a d-dimensional noise row with per-component variance
    sigma_L^2 + sigma_S_i^2 has squared norm below zeta times that variance,
    with the combined success probability of the accuracy bound.

    Both the product-form combination (independent failures) and the more
    conservative union bound are reported.
    """
    if sigma_L < 0 or sigma_S_i < 0:
        raise ValueError("noise standard deviations must be >= 0")
    if not 0 < delta < 1:
        raise ValueError(f"delta must be in (0, 1), got {delta}")
    p = chi_square_cdf(d, zeta)
    return NormBoundReport(
        dimension=d,
        zeta=zeta,
        probability=p,
        combined_success=1.0 - delta * (1.0 - p),
        union_bound_success=max(0.0, 1.0 - delta - (1.0 - p)),
    )
