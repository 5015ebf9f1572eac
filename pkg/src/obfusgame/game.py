"""Game parameters and the learner / user utility functions.

The game has one learner choosing a noise level sigma_L and N users each
choosing their own noise level sigma_S[i].  Utilities combine three parts:
an accuracy penalty growing quadratically in all noise levels, a privacy
loss shrinking in the effective noise sqrt(sigma_L^2 + sigma_S[i]^2), and a
flat cost paid for any strictly positive perturbation.

All functions here are pure and deterministic; values are validated at
construction and safe to share across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from .errors import ConfigError


def _require_finite(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise ValueError(f"{name} must be finite, got {value!r}")
    return value


@dataclass(frozen=True)
class LearnerParams:
    """Learner-side scalars: baseline gain, accuracy weight, flat
    perturbation cost, ERM regularizer and population size."""

    baseline_gain: float
    accuracy_weight: float
    perturbation_cost: float
    regularizer: float
    population_size: int

    def __post_init__(self):
        _require_finite("baseline_gain", self.baseline_gain)
        if _require_finite("accuracy_weight", self.accuracy_weight) < 0:
            raise ValueError("accuracy_weight must be >= 0")
        if _require_finite("perturbation_cost", self.perturbation_cost) < 0:
            raise ValueError("perturbation_cost must be >= 0")
        if _require_finite("regularizer", self.regularizer) <= 0:
            raise ValueError("regularizer must be > 0")
        if self.population_size < 1:
            raise ValueError("population_size must be >= 1")


@dataclass(frozen=True)
class UserParams:
    """Per-user scalars: baseline gain, accuracy weight, maximum privacy
    loss, privacy-loss rate and flat perturbation cost."""

    baseline_gain: float
    accuracy_weight: float
    max_privacy_loss: float
    privacy_rate: float
    perturbation_cost: float

    def __post_init__(self):
        _require_finite("baseline_gain", self.baseline_gain)
        if _require_finite("accuracy_weight", self.accuracy_weight) < 0:
            raise ValueError("accuracy_weight must be >= 0")
        if _require_finite("max_privacy_loss", self.max_privacy_loss) < 0:
            raise ValueError("max_privacy_loss must be >= 0")
        if _require_finite("privacy_rate", self.privacy_rate) <= 0:
            raise ValueError("privacy_rate must be > 0")
        if _require_finite("perturbation_cost", self.perturbation_cost) < 0:
            raise ValueError("perturbation_cost must be >= 0")


@dataclass(frozen=True)
class SolverSettings:
    """Search bounds and tolerances for the best-response solver."""

    sigma_max: float = 50.0
    grid_step: float = 0.05
    root_tol: float = 1e-9
    tie_epsilon: float = 1e-9

    def __post_init__(self):
        if _require_finite("sigma_max", self.sigma_max) <= 0:
            raise ValueError("sigma_max must be > 0")
        if not 0 < self.grid_step < self.sigma_max:
            raise ValueError("grid_step must be in (0, sigma_max)")
        if _require_finite("root_tol", self.root_tol) <= 0:
            raise ValueError("root_tol must be > 0")
        if _require_finite("tie_epsilon", self.tie_epsilon) < 0:
            raise ValueError("tie_epsilon must be >= 0")


@dataclass(frozen=True)
class GameConfig:
    """Full game instance: learner, user list, DP parameters, solver
    settings."""

    learner: LearnerParams
    users: tuple[UserParams, ...]
    dp_delta: float = 0.05
    data_dim: int = 5
    solver: SolverSettings = field(default_factory=SolverSettings)

    def __post_init__(self):
        object.__setattr__(self, "users", tuple(self.users))
        if len(self.users) != self.learner.population_size:
            raise ConfigError(
                f"learner.N = {self.learner.population_size} but "
                f"{len(self.users)} users were given"
            )
        if not 0 < self.dp_delta < 1:
            raise ConfigError(f"dp.delta must be in (0, 1), got {self.dp_delta}")
        if self.data_dim < 1:
            raise ConfigError(f"dp.d must be >= 1, got {self.data_dim}")
        for i, u in enumerate(self.users):
            # zero accuracy weight with a positive privacy stake has no
            # finite best response; reject up front
            if u.accuracy_weight == 0 and u.max_privacy_loss > 0:
                raise ConfigError(
                    f"users[{i}]: gamma = 0 with P_bar > 0 has no finite "
                    "optimal perturbation"
                )

    @property
    def n_users(self) -> int:
        return self.learner.population_size


@dataclass(frozen=True)
class StrategyProfile:
    """One noise level for the learner plus one per user."""

    sigma_L: float
    sigma_S: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "sigma_S", tuple(float(s) for s in self.sigma_S))
        if not math.isfinite(self.sigma_L) or self.sigma_L < 0:
            raise ValueError(f"sigma_L must be finite and >= 0, got {self.sigma_L}")
        for i, s in enumerate(self.sigma_S):
            if not math.isfinite(s) or s < 0:
                raise ValueError(f"sigma_S[{i}] must be finite and >= 0, got {s}")


def accuracy_gap_term(
    sigma_L: float,
    sigma_S: Sequence[float],
    weight: float,
    regularizer: float,
    n_users: int,
) -> float:
    """Accuracy penalty (weight / (N * Lambda^2)) * (sigma_L^2 + sum_i sigma_S[i]^2 / N).

    Shared by learner and users up to the weight coefficient.
    """
    sigma_L = _require_finite("sigma_L", sigma_L)
    weight = _require_finite("weight", weight)
    if regularizer <= 0:
        raise ValueError("regularizer must be > 0")
    total = sigma_L**2
    for s in sigma_S:
        total += _require_finite("sigma_S entry", s) ** 2 / n_users
    return weight / (n_users * regularizer**2) * total


def privacy_loss_term(
    max_privacy_loss: float, rate: float, sigma_L: float, sigma_S_i: float
) -> float:
    """Privacy loss P_bar / (1 + rate * sqrt(sigma_L^2 + sigma_S_i^2)).

    Equals the full P_bar with no noise and decays toward 0 as either
    noise level grows.
    """
    max_privacy_loss = _require_finite("max_privacy_loss", max_privacy_loss)
    sigma_L = _require_finite("sigma_L", sigma_L)
    sigma_S_i = _require_finite("sigma_S_i", sigma_S_i)
    if rate <= 0:
        raise ValueError("rate must be > 0")
    effective = math.hypot(sigma_L, sigma_S_i)
    return max_privacy_loss / (1.0 + rate * effective)


def perturbation_cost_term(cost: float, sigma: float) -> float:
    """Flat cost paid for any strictly positive sigma; exactly 0 at sigma = 0."""
    cost = _require_finite("cost", cost)
    sigma = _require_finite("sigma", sigma)
    return cost if sigma > 0 else 0.0


def user_utility(config: GameConfig, i: int, profile: StrategyProfile) -> float:
    """Utility of user i under the given strategy profile."""
    n = config.n_users
    if not 0 <= i < n:
        raise IndexError(f"user index {i} out of range for N={n}")
    if len(profile.sigma_S) != n:
        raise ValueError(
            f"profile has {len(profile.sigma_S)} user strategies, expected {n}"
        )
    u = config.users[i]
    return (
        u.baseline_gain
        - accuracy_gap_term(
            profile.sigma_L,
            profile.sigma_S,
            u.accuracy_weight,
            config.learner.regularizer,
            n,
        )
        - privacy_loss_term(
            u.max_privacy_loss, u.privacy_rate, profile.sigma_L, profile.sigma_S[i]
        )
        - perturbation_cost_term(u.perturbation_cost, profile.sigma_S[i])
    )


def learner_utility(config: GameConfig, profile: StrategyProfile) -> float:
    """Utility of the learner: baseline minus accuracy penalty, minus the
    average privacy loss over users, minus the flat perturbation cost."""
    n = config.n_users
    if len(profile.sigma_S) != n:
        raise ValueError(
            f"profile has {len(profile.sigma_S)} user strategies, expected {n}"
        )
    lp = config.learner
    avg_privacy = (
        sum(
            privacy_loss_term(
                u.max_privacy_loss, u.privacy_rate, profile.sigma_L, s
            )
            for u, s in zip(config.users, profile.sigma_S)
        )
        / n
    )
    return (
        lp.baseline_gain
        - accuracy_gap_term(
            profile.sigma_L, profile.sigma_S, lp.accuracy_weight, lp.regularizer, n
        )
        - avg_privacy
        - perturbation_cost_term(lp.perturbation_cost, profile.sigma_L)
    )
