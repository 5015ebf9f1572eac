import math

import numpy as np
import pytest

from obfusgame.config_io import load_shipped_config
from obfusgame.errors import NoFiniteOptimumError
from obfusgame.game import (
    GameConfig,
    LearnerParams,
    SolverSettings,
    StrategyProfile,
    UserParams,
    learner_utility,
    user_utility,
)
from obfusgame.solver import (
    best_response_curve,
    brute_force_equilibrium,
    dissuasion_threshold,
    interior_candidate,
    leader_objective,
    stackelberg_solve,
    user_best_response,
)
from obfusgame.validate import random_small_config


def simple_config(p_bar=8.0, rho=1.0, gamma_s=1.0, nbar_s=0.1, nbar_l=0.2,
                  gamma_l=1.0, lam=1.0, n=1, sigma_max=10.0):
    return GameConfig(
        learner=LearnerParams(5.0, gamma_l, nbar_l, lam, n),
        users=tuple(UserParams(5.0, gamma_s, p_bar, rho, nbar_s) for _ in range(n)),
        solver=SolverSettings(sigma_max=sigma_max, grid_step=0.05),
    )


def dense_grid_argmax(config, i, sigma_L, step=1e-3):
    """Independent best-response oracle: exhaustive grid over own sigma_S."""
    grid = np.arange(0.0, config.solver.sigma_max + step / 2, step)
    sigma = [0.0] * config.n_users
    best_u, best_s = -math.inf, 0.0
    for s in grid:
        sigma[i] = float(s)
        u = user_utility(config, i, StrategyProfile(sigma_L, tuple(sigma)))
        if u > best_u:
            best_u, best_s = u, float(s)
    return best_s, best_u


class TestInteriorCandidate:
    def test_no_privacy_incentive(self):
        config = simple_config(p_bar=0.0)
        assert interior_candidate(0.0, config.users[0], config.learner) is None

    def test_unit_root(self):
        # s (1 + s)^2 = 8 * 1 / 2 = 4 has root s = 1
        config = simple_config(p_bar=8.0, rho=1.0, gamma_s=1.0)
        cand = interior_candidate(0.0, config.users[0], config.learner)
        assert cand == pytest.approx(1.0, abs=1e-8)

    def test_unit_root_verified_by_substitution(self):
        s = 1.0
        assert s * (1 + s) ** 2 == pytest.approx(8.0 * 1.0 / 2.0)

    def test_unit_root_verified_by_grid(self):
        config = simple_config(p_bar=8.0, nbar_s=0.0)
        best_s, _ = dense_grid_argmax(config, 0, 0.0)
        assert best_s == pytest.approx(1.0, abs=2e-3)

    def test_excess_learner_noise_gives_none(self):
        config = simple_config(p_bar=8.0)
        assert interior_candidate(2.0, config.users[0], config.learner) is None

    def test_zero_gamma_raises(self):
        user = UserParams(1.0, 0.0, 1.0, 1.0, 0.0)
        learner = LearnerParams(1.0, 1.0, 0.0, 1.0, 1)
        with pytest.raises(NoFiniteOptimumError):
            interior_candidate(0.0, user, learner)


class TestUserBestResponse:
    def test_prohibitive_cost(self):
        config = simple_config(p_bar=8.0, nbar_s=100.0)
        assert user_best_response(0.0, 0, config) == 0.0

    def test_no_privacy_incentive(self):
        config = simple_config(p_bar=0.0)
        assert user_best_response(0.0, 0, config) == 0.0

    def test_default_config_matches_grid_oracle(self):
        config = load_shipped_config("default")
        br = user_best_response(0.0, 0, config)
        assert br > 0
        best_s, _ = dense_grid_argmax(config, 0, 0.0)
        assert abs(br - best_s) <= 2e-3

    def test_bang_bang_structure(self):
        # every best response is either 0 or the interior candidate
        config = load_shipped_config("default")
        for sigma_L in np.arange(0.0, 6.0, 0.25):
            br = user_best_response(float(sigma_L), 0, config)
            cand = interior_candidate(float(sigma_L), config.users[0], config.learner)
            assert br == 0.0 or br == pytest.approx(cand)


class TestDissuasionThreshold:
    def test_no_privacy_never_perturbs(self):
        config = simple_config(p_bar=0.0)
        assert dissuasion_threshold(0, config) == 0.0

    def test_thresholds_decrease_with_user_cost(self):
        ts = [
            dissuasion_threshold(0, load_shipped_config(name))
            for name in ("low_cost", "mid_cost", "high_cost")
        ]
        assert all(t is not None and t > 0 for t in ts)
        assert ts[0] > ts[1] > ts[2]

    def test_definition_at_threshold(self):
        config = load_shipped_config("default")
        t = dissuasion_threshold(0, config)
        tol = config.solver.root_tol
        assert user_best_response(t - 10 * tol, 0, config) > 0
        assert user_best_response(t + 10 * tol, 0, config) == 0.0

    def test_none_when_br_positive_up_to_sigma_max(self):
        # zero flat cost keeps the interior branch active through sigma_max
        config = simple_config(p_bar=500.0, rho=0.05, nbar_s=0.0, sigma_max=5.0)
        assert dissuasion_threshold(0, config) is None


class TestLeaderObjective:
    def test_closed_form_past_threshold(self):
        config = load_shipped_config("default")
        lp, u = config.learner, config.users[0]
        t = dissuasion_threshold(0, config)
        sigma_L = t + 0.5
        expected = (
            lp.baseline_gain
            - lp.accuracy_weight * sigma_L**2 / lp.regularizer**2
            - u.max_privacy_loss / (1 + u.privacy_rate * sigma_L)
            - lp.perturbation_cost
        )
        assert leader_objective(sigma_L, config) == pytest.approx(expected, rel=1e-12)

    def test_composition_at_zero(self):
        config = load_shipped_config("default")
        br = user_best_response(0.0, 0, config)
        expected = learner_utility(config, StrategyProfile(0.0, (br,)))
        assert leader_objective(0.0, config) == pytest.approx(expected, rel=1e-12)

    def test_upward_jump_at_threshold(self):
        config = load_shipped_config("default")
        t = dissuasion_threshold(0, config)
        eps = 1e-6
        assert leader_objective(t + eps, config) > leader_objective(t - eps, config)


class TestStackelbergSolve:
    def test_prohibitive_learner_cost(self):
        config = simple_config(nbar_l=1e6)
        assert stackelberg_solve(config).sigma_L_star == 0.0

    def test_high_user_cost_columns_dissuade(self):
        for name in ("mid_cost", "high_cost"):
            config = load_shipped_config(name)
            result = stackelberg_solve(config)
            assert result.sigma_L_star > 0
            assert all(s == 0.0 for s in result.sigma_S_star)
            assert result.learner_utility > leader_objective(0.0, config)

    def test_low_user_cost_column_stays_at_zero(self):
        result = stackelberg_solve(load_shipped_config("low_cost"))
        assert result.sigma_L_star == 0.0
        assert result.sigma_S_star[0] > 0

    def test_equilibrium_consistency(self):
        config = load_shipped_config("high_cost")
        result = stackelberg_solve(config)
        for i in range(config.n_users):
            assert result.sigma_S_star[i] == user_best_response(
                result.sigma_L_star, i, config
            )
        profile = StrategyProfile(result.sigma_L_star, result.sigma_S_star)
        assert result.learner_utility == pytest.approx(
            learner_utility(config, profile), rel=1e-12
        )


class TestBruteForce:
    def test_five_by_five_enumeration(self):
        config = simple_config(p_bar=3.0, rho=1.0, nbar_s=0.05, nbar_l=0.1,
                               sigma_max=2.0)
        result = brute_force_equilibrium(config, 0.5)
        # replicate the 5 x 5 enumeration directly
        grid = [0.0, 0.5, 1.0, 1.5, 2.0]
        best = (-math.inf, None)
        for sl in grid:
            br = max(grid, key=lambda s: user_utility(
                config, 0, StrategyProfile(sl, (s,))))
            u = learner_utility(config, StrategyProfile(sl, (br,)))
            if u > best[0]:
                best = (u, sl, br)
        assert result.learner_utility == pytest.approx(best[0])
        assert result.sigma_L_star == best[1]
        assert result.sigma_S_star[0] == best[2]

    def test_degenerate_config(self):
        config = simple_config(p_bar=0.0, sigma_max=2.0)
        result = brute_force_equilibrium(config, 0.1)
        assert result.sigma_L_star == 0.0
        assert result.sigma_S_star == (0.0,)

    def test_agrees_with_solver_on_random_configs(self):
        for seed in range(5):
            config = random_small_config(seed)
            fast = stackelberg_solve(config)
            slow = brute_force_equilibrium(config, 1e-3)
            assert abs(fast.sigma_L_star - slow.sigma_L_star) <= config.solver.grid_step
            assert abs(fast.learner_utility - slow.learner_utility) <= 1e-6


class TestStructuralProperties:
    def test_independence_of_other_users(self):
        rng = np.random.Generator(np.random.PCG64(7))
        config = simple_config(p_bar=8.0, n=3, sigma_max=5.0)
        base = user_best_response(0.3, 0, config)
        # best response does not reference other users' levels at all, but
        # verify against the full-utility grid with random co-strategies
        for _ in range(5):
            others = rng.uniform(0, 3, size=2)

            def util(own):
                profile = StrategyProfile(0.3, (own, others[0], others[1]))
                return user_utility(config, 0, profile)

            grid = np.arange(0, 5.0, 1e-3)
            best = grid[np.argmax([util(float(s)) for s in grid])]
            assert abs(best - base) <= 2e-3

    def test_effective_noise_clamp(self):
        config = load_shipped_config("default")
        t = dissuasion_threshold(0, config)
        targets = []
        for sigma_L in np.linspace(0, t * 0.95, 12):
            br = user_best_response(float(sigma_L), 0, config)
            assert br > 0
            targets.append(math.hypot(sigma_L, br))
        assert max(targets) - min(targets) < 1e-7
        # hence the best response strictly decreases along the branch
        brs = [math.sqrt(targets[0] ** 2 - s**2) for s in np.linspace(0, t * 0.95, 12)]
        assert all(a > b for a, b in zip(brs, brs[1:]))

    def test_threshold_monotone_in_cost(self):
        base = simple_config(p_bar=8.0, nbar_s=0.05, sigma_max=5.0)
        costs = (0.05, 0.2, 0.5, 1.0)
        thresholds = []
        for c in costs:
            config = simple_config(p_bar=8.0, nbar_s=c, sigma_max=5.0)
            thresholds.append(dissuasion_threshold(0, config))
        assert all(a >= b for a, b in zip(thresholds, thresholds[1:]))


class TestBestResponseCurve:
    def test_curve_matches_pointwise_calls(self):
        config = load_shipped_config("default")
        curve = best_response_curve(0, config, step=0.5)
        assert len(curve.sigma_L_grid) == len(curve.br_values)
        for s, b in zip(curve.sigma_L_grid[:10], curve.br_values[:10]):
            assert b == user_best_response(s, 0, config)
        assert curve.threshold == pytest.approx(dissuasion_threshold(0, config))
        for s, b in zip(curve.sigma_L_grid, curve.br_values):
            if s > curve.threshold:
                assert b == 0.0
