"""Best responses, dissuasion thresholds and the Stackelberg equilibrium.

Each user's problem reduces to a one-dimensional trade-off in the effective
noise s = sqrt(sigma_L^2 + sigma_S^2): the stationarity condition of the
user utility is

    s * (1 + rho * s)^2 = P_bar * rho * N^2 * Lambda^2 / (2 * gamma),

a strictly increasing cubic with a unique root s_star.  The best response
is bang-bang: either sigma_S = sqrt(s_star^2 - sigma_L^2) (paying the flat
cost) or exactly 0, whichever gives higher utility.  The leader's induced
objective is piecewise smooth with upward jumps where users stop
perturbing; it is maximized over grid candidates, the jump points and
golden-section refinements inside each smooth piece.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import GridTooLargeError, NoFiniteOptimumError, SolverError
from .game import (
    GameConfig,
    LearnerParams,
    StrategyProfile,
    UserParams,
    learner_utility,
    user_utility,
)

# cap on utility evaluations for the brute-force oracle
_BRUTE_FORCE_BUDGET = 2_000_000_000

_INV_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class BestResponseCurve:
    """Sampled best response of one user against the learner's noise."""

    sigma_L_grid: tuple[float, ...]
    br_values: tuple[float, ...]
    threshold: Optional[float]

    def __post_init__(self):
        if len(self.sigma_L_grid) != len(self.br_values):
            raise ValueError("sigma_L_grid and br_values lengths differ")


@dataclass(frozen=True)
class EquilibriumResult:
    """Equilibrium strategies with the utilities they induce."""

    sigma_L_star: float
    sigma_S_star: tuple[float, ...]
    learner_utility: float
    user_utilities: tuple[float, ...]
    per_user_thresholds: tuple[Optional[float], ...]


def _bisect_root(f: Callable[[float], float], lo: float, hi: float, tol: float) -> float:
    """Root of a continuous f with f(lo) and f(hi) of opposite sign (f(lo) >= 0
    >= f(hi) or the reverse), located to absolute tolerance tol."""
    flo = f(lo)
    sign = 1.0 if flo >= 0 else -1.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if sign * f(mid) >= 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _stationarity_rhs(user: UserParams, learner: LearnerParams) -> float:
    n = learner.population_size
    return (
        user.max_privacy_loss
        * user.privacy_rate
        * n**2
        * learner.regularizer**2
        / (2.0 * user.accuracy_weight)
    )


def effective_noise_target(
    user: UserParams, learner: LearnerParams, root_tol: float = 1e-9
) -> float:
    """The unique s_star solving s * (1 + rho s)^2 = P_bar rho N^2 Lambda^2 / (2 gamma).

    Returns 0.0 when the user has no privacy stake.
    """
    if user.max_privacy_loss == 0:
        return 0.0
    if user.accuracy_weight == 0:
        raise NoFiniteOptimumError(
            "gamma = 0 with P_bar > 0: privacy gain never saturates"
        )
    rhs = _stationarity_rhs(user, learner)
    rho = user.privacy_rate

    def g(s: float) -> float:
        return s * (1.0 + rho * s) ** 2 - rhs

    hi = 1.0
    while g(hi) < 0:
        hi *= 2.0
    return _bisect_root(g, 0.0, hi, root_tol)


def interior_candidate(
    sigma_L: float,
    user: UserParams,
    learner: LearnerParams,
    root_tol: float = 1e-9,
) -> Optional[float]:
    """Positive stationary point of the user utility in sigma_S, or None.

    None means the effective noise already present (sigma_L) meets or
    exceeds the user's preferred effective level, so no interior candidate
    above 0 exists.
    """
    if sigma_L < 0 or not math.isfinite(sigma_L):
        raise ValueError(f"sigma_L must be finite and >= 0, got {sigma_L}")
    s_star = effective_noise_target(user, learner, root_tol)
    if s_star <= sigma_L:
        return None
    return math.sqrt(s_star**2 - sigma_L**2)


def _utility_at(config: GameConfig, i: int, sigma_L: float, sigma_S_i: float) -> float:
    """User i's utility with every other user at 0 (their levels do not
    affect i's optimal choice, only shift the value by a constant)."""
    sigma = [0.0] * config.n_users
    sigma[i] = sigma_S_i
    return user_utility(config, i, StrategyProfile(sigma_L, tuple(sigma)))


def _perturbation_gain(config: GameConfig, i: int, sigma_L: float) -> float:
    """Utility advantage of the interior candidate over not perturbing;
    -cost when no interior candidate exists."""
    user = config.users[i]
    cand = interior_candidate(
        sigma_L, user, config.learner, config.solver.root_tol
    )
    if cand is None:
        return -user.perturbation_cost
    return _utility_at(config, i, sigma_L, cand) - _utility_at(config, i, sigma_L, 0.0)


def user_best_response(sigma_L: float, i: int, config: GameConfig) -> float:
    """Utility-maximizing sigma_S for user i; ties go to 0 (not perturbing)."""
    user = config.users[i]
    cand = interior_candidate(
        sigma_L, user, config.learner, config.solver.root_tol
    )
    if cand is None:
        return 0.0
    gain = _utility_at(config, i, sigma_L, cand) - _utility_at(config, i, sigma_L, 0.0)
    return cand if gain > config.solver.tie_epsilon else 0.0


def dissuasion_threshold(i: int, config: GameConfig) -> Optional[float]:
    """Smallest sigma_L at which user i's best response becomes (and stays) 0.

    Returns 0.0 when the user never perturbs, and None when the best
    response is still positive at sigma_max (no dissuasion within the
    search bound).
    """
    settings = config.solver
    tie = settings.tie_epsilon

    def margin(sigma_L: float) -> float:
        return _perturbation_gain(config, i, sigma_L) - tie

    if margin(0.0) <= 0:
        return 0.0
    s_star = effective_noise_target(config.users[i], config.learner, settings.root_tol)
    hi = min(s_star, settings.sigma_max)
    if margin(hi) > 0:
        return None
    # margin is strictly decreasing on [0, s_star], so the sign change is unique
    return _bisect_root(margin, 0.0, hi, settings.root_tol)


def best_response_profile(sigma_L: float, config: GameConfig) -> StrategyProfile:
    return StrategyProfile(
        sigma_L,
        tuple(user_best_response(sigma_L, i, config) for i in range(config.n_users)),
    )


def leader_objective(sigma_L: float, config: GameConfig) -> float:
    """Learner utility when every user plays their best response."""
    return learner_utility(config, best_response_profile(sigma_L, config))


def best_response_curve(
    i: int, config: GameConfig, step: Optional[float] = None
) -> BestResponseCurve:
    """Sample user i's best response on a sigma_L grid."""
    settings = config.solver
    step = settings.grid_step if step is None else step
    grid = _grid(settings.sigma_max, step)
    values = tuple(user_best_response(s, i, config) for s in grid)
    return BestResponseCurve(tuple(grid), values, dissuasion_threshold(i, config))


def _grid(sigma_max: float, step: float) -> list[float]:
    n = int(math.floor(sigma_max / step + 1e-9))
    pts = [k * step for k in range(n + 1)]
    if pts[-1] < sigma_max - 1e-12:
        pts.append(sigma_max)
    return pts


def _golden_max(
    f: Callable[[float], float], lo: float, hi: float, tol: float
) -> float:
    """Argmax of f on [lo, hi] by golden-section search (unimodality is not
    guaranteed on every piece; grid candidates cover the rest)."""
    a, b = lo, hi
    x1 = b - _INV_GOLDEN * (b - a)
    x2 = a + _INV_GOLDEN * (b - a)
    f1, f2 = f(x1), f(x2)
    while b - a > tol:
        if f1 > f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - _INV_GOLDEN * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + _INV_GOLDEN * (b - a)
            f2 = f(x2)
    return 0.5 * (a + b)


def stackelberg_solve(config: GameConfig) -> EquilibriumResult:
    """Leader-optimal sigma_L over {0} + thresholds + grid + per-piece refinements.

    Utility ties within tie_epsilon resolve to the smaller sigma_L.
    """
    settings = config.solver
    n = config.n_users
    thresholds = [dissuasion_threshold(i, config) for i in range(n)]

    candidates: set[float] = {0.0, settings.sigma_max}
    breakpoints = sorted(
        {t for t in thresholds if t is not None and 0.0 < t < settings.sigma_max}
    )
    for t in breakpoints:
        for c in (t - settings.root_tol, t, t + settings.root_tol):
            if 0.0 <= c <= settings.sigma_max:
                candidates.add(c)
    candidates.update(_grid(settings.sigma_max, settings.grid_step))

    # refine inside each smooth piece of the induced objective
    edges = [0.0] + breakpoints + [settings.sigma_max]
    for lo, hi in zip(edges, edges[1:]):
        if hi - lo > settings.root_tol:
            candidates.add(
                _golden_max(
                    lambda s: leader_objective(s, config), lo, hi, settings.root_tol
                )
            )

    evaluated = []
    for s in sorted(candidates):
        u = leader_objective(s, config)
        if not math.isfinite(u):
            raise SolverError(f"non-finite leader utility {u} at sigma_L={s}")
        evaluated.append((s, u))
    best_u = max(u for _, u in evaluated)
    # smallest sigma_L among near-ties
    sigma_L_star = min(s for s, u in evaluated if u >= best_u - settings.tie_epsilon)

    profile = best_response_profile(sigma_L_star, config)
    return EquilibriumResult(
        sigma_L_star=sigma_L_star,
        sigma_S_star=profile.sigma_S,
        learner_utility=learner_utility(config, profile),
        user_utilities=tuple(user_utility(config, i, profile) for i in range(n)),
        per_user_thresholds=tuple(thresholds),
    )


def _vector_user_utility(
    config: GameConfig, i: int, sigma_L: float, sigma_S: np.ndarray
) -> np.ndarray:
    """User i's utility over a vector of own noise levels, others at 0."""
    u = config.users[i]
    lam = config.learner.regularizer
    n = config.n_users
    eff = np.hypot(sigma_L, sigma_S)
    return (
        u.baseline_gain
        - u.accuracy_weight / (n * lam**2) * (sigma_L**2 + sigma_S**2 / n)
        - u.max_privacy_loss / (1.0 + u.privacy_rate * eff)
        - u.perturbation_cost * (sigma_S > 0)
    )


def brute_force_equilibrium(config: GameConfig, fine_step: float) -> EquilibriumResult:
    """Exhaustive two-level grid search used as a test oracle.

    For every sigma_L grid point each user's best response is found by a
    dense 1-D grid over [0, sigma_max]; the learner then picks the grid
    point with the highest utility (ties to the smaller sigma_L).
    """
    if fine_step <= 0:
        raise ValueError("fine_step must be > 0")
    settings = config.solver
    sigma_grid = np.asarray(_grid(settings.sigma_max, fine_step))
    m = len(sigma_grid)
    if m * m * config.n_users > _BRUTE_FORCE_BUDGET:
        raise GridTooLargeError(
            f"{m}x{m} grid over {config.n_users} users exceeds the evaluation "
            "budget; increase fine_step or reduce sigma_max"
        )

    n = config.n_users
    br = np.empty((m, n))
    for j, sigma_L in enumerate(sigma_grid):
        for i in range(n):
            utilities = _vector_user_utility(config, i, float(sigma_L), sigma_grid)
            br[j, i] = sigma_grid[np.argmax(utilities)]

    leader = np.array(
        [
            learner_utility(config, StrategyProfile(float(sigma_grid[j]), tuple(br[j])))
            for j in range(m)
        ]
    )
    best = leader.max()
    j_star = int(np.argmax(leader >= best - settings.tie_epsilon))
    profile = StrategyProfile(float(sigma_grid[j_star]), tuple(br[j_star]))
    return EquilibriumResult(
        sigma_L_star=profile.sigma_L,
        sigma_S_star=profile.sigma_S,
        learner_utility=learner_utility(config, profile),
        user_utilities=tuple(user_utility(config, i, profile) for i in range(n)),
        per_user_thresholds=tuple(dissuasion_threshold(i, config) for i in range(n)),
    )
