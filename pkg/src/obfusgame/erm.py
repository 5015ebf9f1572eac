"""Regularized ERM training on clean and noise-perturbed data, plus the
inequality checks relating the two classifiers.

The loss is fixed to logistic: it is the standard loss whose derivative is
bounded by 1 and whose curvature is bounded by c = 1/4, which the
classifier-difference inequality requires.  The regularizer is
(Lambda / 2) * ||f||^2, making the objective strictly convex with a unique
minimizer; training is plain full-gradient descent with backtracking line
search, run to a gradient-norm tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ConvergenceError


@dataclass(frozen=True)
class Dataset:
    """Feature matrix (n, d) with labels in {-1, +1}."""

    features: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        features = np.asarray(self.features, dtype=float)
        labels = np.asarray(self.labels, dtype=float)
        if features.ndim != 2:
            raise ValueError("features must be a 2-D array")
        if labels.shape != (features.shape[0],):
            raise ValueError("labels length must match feature rows")
        if not np.all(np.isfinite(features)):
            raise ValueError("features must be finite")
        if not np.all(np.isin(labels, (-1.0, 1.0))):
            raise ValueError("labels must be -1 or +1")
        object.__setattr__(self, "features", features)
        object.__setattr__(self, "labels", labels)

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def d(self) -> int:
        return self.features.shape[1]


@dataclass(frozen=True)
class Classifier:
    """Linear classifier: sign(weights . x)."""

    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.ndim != 1 or not np.all(np.isfinite(w)):
            raise ValueError("weights must be a finite 1-D array")
        object.__setattr__(self, "weights", w)


@dataclass(frozen=True)
class LossSpec:
    kind: str = "logistic"
    curvature_bound: float = 0.25
    derivative_bound: float = 1.0

    def __post_init__(self):
        if self.kind != "logistic":
            raise ValueError(f"unsupported loss kind {self.kind!r}")


LOGISTIC = LossSpec()


@dataclass(frozen=True)
class BoundReport:
    """One side-by-side inequality check: holds iff lhs <= rhs + 1e-9."""

    lhs: float
    rhs: float
    holds: bool
    slack: float
    context: str


@dataclass(frozen=True)
class AccuracyBoundReport:
    """Expected-loss gap against the explicit part of the conservative
    bound.  The O(log(1/delta) / (Lambda n)) remainder has an unknown
    constant, so it is reported as a magnitude and never asserted."""

    measured_gap: float
    explicit_term: float
    big_o_magnitude: float
    quadratic_noise_level: float  # sigma_L^2 + (1/n) sum_i sigma_S_i^2


def _logistic_loss(margins: np.ndarray) -> np.ndarray:
    # log(1 + exp(-m)) computed stably
    return np.logaddexp(0.0, -margins)


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def generate_synthetic(n: int, d: int, separation: float, seed: int) -> Dataset:
    """Two unit-variance Gaussian clusters centered at +-(separation/2) e_1."""
    if n < 2 or d < 1:
        raise ValueError("need n >= 2 and d >= 1")
    rng = np.random.Generator(np.random.PCG64(seed))
    labels = np.where(rng.random(n) < 0.5, 1.0, -1.0)
    centers = np.zeros((n, d))
    centers[:, 0] = labels * (separation / 2.0)
    features = centers + rng.standard_normal((n, d))
    return Dataset(features, labels)


def empirical_risk(
    f: Classifier, data: Dataset, lam: float, loss: LossSpec = LOGISTIC
) -> float:
    """Lambda/2 ||f||^2 + mean logistic loss over the dataset."""
    margins = data.labels * (data.features @ f.weights)
    return 0.5 * lam * float(f.weights @ f.weights) + float(
        np.mean(_logistic_loss(margins))
    )


def _gradient(w: np.ndarray, data: Dataset, lam: float) -> np.ndarray:
    margins = data.labels * (data.features @ w)
    coeff = -data.labels * _sigmoid(-margins)
    return lam * w + data.features.T @ coeff / data.n


def train_erm(
    data: Dataset,
    lam: float,
    loss: LossSpec = LOGISTIC,
    tol: float = 1e-8,
    max_iter: int = 100_000,
) -> Classifier:
    """Minimize the strictly convex regularized objective to gradient-norm tol."""
    if lam <= 0:
        raise ValueError("lam must be > 0 for strict convexity")
    if tol <= 0:
        raise ValueError("tol must be > 0")
    w = np.zeros(data.d)
    # inverse of a Lipschitz estimate for the gradient
    step0 = 1.0 / (lam + loss.curvature_bound * float(np.mean(np.sum(data.features**2, axis=1))) + 1e-12)
    obj = empirical_risk(Classifier(w), data, lam, loss)
    for _ in range(max_iter):
        g = _gradient(w, data, lam)
        gnorm = float(np.linalg.norm(g))
        if gnorm <= tol:
            return Classifier(w)
        step = step0
        for _ in range(60):
            w_new = w - step * g
            obj_new = empirical_risk(Classifier(w_new), data, lam, loss)
            if obj_new <= obj - 1e-4 * step * gnorm**2:
                break
            if step * gnorm**2 < 1e-14 * max(1.0, abs(obj)):
                # decrease is below the objective's float resolution; the
                # plain 1/L step is still a descent direction
                break
            step *= 0.5
        w, obj = w_new, obj_new
    raise ConvergenceError(
        f"gradient norm {gnorm:.3e} above tol {tol:.3e} after {max_iter} iterations",
        residual=gnorm,
    )


def perturb_inputs(
    data: Dataset,
    sigma_L: float,
    sigma_S: "list[float] | np.ndarray",
    seed: int,
) -> tuple[Dataset, np.ndarray]:
    """Add learner noise (std sigma_L) and per-user noise (std sigma_S[i])
    to every feature row; returns the perturbed dataset and the realized
    combined noise matrix."""
    sigma_S = np.asarray(sigma_S, dtype=float)
    if sigma_S.shape != (data.n,):
        raise ValueError(f"sigma_S must have length {data.n}, got {sigma_S.shape}")
    if sigma_L < 0 or np.any(sigma_S < 0):
        raise ValueError("noise standard deviations must be >= 0")
    rng = np.random.Generator(np.random.PCG64(seed))
    w = sigma_L * rng.standard_normal((data.n, data.d))
    v = sigma_S[:, None] * rng.standard_normal((data.n, data.d))
    u = v + w
    return Dataset(data.features + u, data.labels), u


def check_classifier_gap(
    clean_f: Classifier,
    pert_f: Classifier,
    noise: np.ndarray,
    lam: float,
    n: int,
    c: float = LOGISTIC.curvature_bound,
) -> BoundReport:
    """||f_clean - f_pert||^2 against
    (1 + c^2 ||f_pert||^2) / (n^2 Lambda^2) * sum_i ||u_i||^2."""
    diff = clean_f.weights - pert_f.weights
    lhs = float(diff @ diff)
    rhs = (
        (1.0 + c**2 * float(pert_f.weights @ pert_f.weights))
        / (n**2 * lam**2)
        * float(np.sum(noise**2))
    )
    return BoundReport(lhs, rhs, lhs <= rhs + 1e-9, rhs - lhs, "classifier_gap")


def check_empirical_gap(
    f_d: Classifier,
    f_dagger: Classifier,
    data: Dataset,
    lam: float,
    loss: LossSpec = LOGISTIC,
    c: float = LOGISTIC.curvature_bound,
) -> BoundReport:
    """Empirical-risk gap on the clean data (whose minimizer is f_dagger)
    against ||f_d - f_dagger||^2 * (1 + c)."""
    lhs = empirical_risk(f_d, data, lam, loss) - empirical_risk(f_dagger, data, lam, loss)
    diff = f_d.weights - f_dagger.weights
    rhs = float(diff @ diff) * (1.0 + c)
    return BoundReport(lhs, rhs, lhs <= rhs + 1e-9, rhs - lhs, "empirical_gap")


def expected_loss_estimate(
    f: Classifier,
    d: int,
    separation: float,
    lam: float,
    m: int,
    seed: int,
) -> tuple[float, float]:
    """Monte Carlo estimate of the population loss plus regularizer, with
    its standard error."""
    if m < 1:
        raise ValueError("m must be >= 1")
    sample = generate_synthetic(max(m, 2), d, separation, seed)
    margins = sample.labels[:m] * (sample.features[:m] @ f.weights)
    losses = _logistic_loss(margins)
    mean = float(np.mean(losses)) + 0.5 * lam * float(f.weights @ f.weights)
    stderr = float(np.std(losses, ddof=1) / math.sqrt(m)) if m > 1 else math.inf
    return mean, stderr


def accuracy_bound_report(
    f_d: Classifier,
    measured_gap: float,
    zeta: float,
    delta: float,
    sigma_L: float,
    sigma_S: "list[float] | np.ndarray",
    n: int,
    lam: float,
    c: float = LOGISTIC.curvature_bound,
) -> AccuracyBoundReport:
    """Explicit part of the conservative expected-loss bound for one trial.

    explicit_term = (2 + 2 c^2 ||f_d||^2) / (n^2 Lambda^2)
                    * sum_i zeta (sigma_L^2 + sigma_S_i^2) * (1 + c)
    """
    sigma_S = np.asarray(sigma_S, dtype=float)
    explicit = (
        (2.0 + 2.0 * c**2 * float(f_d.weights @ f_d.weights))
        / (n**2 * lam**2)
        * float(np.sum(zeta * (sigma_L**2 + sigma_S**2)))
        * (1.0 + c)
    )
    return AccuracyBoundReport(
        measured_gap=measured_gap,
        explicit_term=explicit,
        big_o_magnitude=math.log(1.0 / delta) / (lam * n),
        quadratic_noise_level=sigma_L**2 + float(np.sum(sigma_S**2)) / n,
    )
