"""Flat key = value config files.

Format: one `key = value` per line, `#` starts a comment, blank lines
ignored.  Keys follow the symbol names used throughout the package:

    learner.G_bar  learner.gamma  learner.N_bar  learner.Lambda  learner.N
    users[i].G_bar users[i].gamma users[i].P_bar users[i].rho users[i].N_bar
    dp.delta  dp.d
    solver.sigma_max  solver.grid_step  solver.tol

Unknown keys are errors (no silent typo acceptance); every error message
carries the offending line number.
"""

from __future__ import annotations

import re
from importlib import resources
from pathlib import Path

from .errors import ConfigError
from .game import GameConfig, LearnerParams, SolverSettings, UserParams

_LEARNER_KEYS = {"G_bar", "gamma", "N_bar", "Lambda", "N"}
_USER_KEYS = {"G_bar", "gamma", "P_bar", "rho", "N_bar"}
_DP_KEYS = {"delta", "d"}
_SOLVER_KEYS = {"sigma_max", "grid_step", "tol"}

_USER_RE = re.compile(r"^users\[(\d+)\]\.(\w+)$")

SHIPPED_CONFIGS = ("default", "low_cost", "mid_cost", "high_cost")


def parse_config_text(text: str, source: str = "<string>") -> GameConfig:
    learner: dict[str, float] = {}
    users: dict[int, dict[str, float]] = {}
    dp: dict[str, float] = {}
    solver: dict[str, float] = {}

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {line!r}", line=lineno)
        key, _, value_str = line.partition("=")
        key = key.strip()
        value_str = value_str.strip()
        try:
            value = float(value_str)
        except ValueError:
            raise ConfigError(f"non-numeric value {value_str!r} for {key}", line=lineno)

        if key.startswith("learner."):
            sub = key[len("learner."):]
            if sub not in _LEARNER_KEYS:
                raise ConfigError(f"unknown key {key!r}", line=lineno)
            _set_once(learner, sub, value, key, lineno)
        elif key.startswith("dp."):
            sub = key[len("dp."):]
            if sub not in _DP_KEYS:
                raise ConfigError(f"unknown key {key!r}", line=lineno)
            _set_once(dp, sub, value, key, lineno)
        elif key.startswith("solver."):
            sub = key[len("solver."):]
            if sub not in _SOLVER_KEYS:
                raise ConfigError(f"unknown key {key!r}", line=lineno)
            _set_once(solver, sub, value, key, lineno)
        else:
            m = _USER_RE.match(key)
            if not m or m.group(2) not in _USER_KEYS:
                raise ConfigError(f"unknown key {key!r}", line=lineno)
            _set_once(
                users.setdefault(int(m.group(1)), {}), m.group(2), value, key, lineno
            )

    missing = _LEARNER_KEYS - learner.keys()
    if missing:
        raise ConfigError(f"{source}: missing learner keys {sorted(missing)}")
    n = int(learner["N"])
    if sorted(users.keys()) != list(range(n)):
        raise ConfigError(
            f"{source}: learner.N = {n} requires users[0..{n - 1}], "
            f"got indices {sorted(users.keys())}"
        )
    for i, fields in users.items():
        missing = _USER_KEYS - fields.keys()
        if missing:
            raise ConfigError(f"{source}: users[{i}] missing keys {sorted(missing)}")

    try:
        return GameConfig(
            learner=LearnerParams(
                baseline_gain=learner["G_bar"],
                accuracy_weight=learner["gamma"],
                perturbation_cost=learner["N_bar"],
                regularizer=learner["Lambda"],
                population_size=n,
            ),
            users=tuple(
                UserParams(
                    baseline_gain=users[i]["G_bar"],
                    accuracy_weight=users[i]["gamma"],
                    max_privacy_loss=users[i]["P_bar"],
                    privacy_rate=users[i]["rho"],
                    perturbation_cost=users[i]["N_bar"],
                )
                for i in range(n)
            ),
            dp_delta=dp.get("delta", 0.05),
            data_dim=int(dp.get("d", 5)),
            solver=SolverSettings(
                sigma_max=solver.get("sigma_max", 50.0),
                grid_step=solver.get("grid_step", 0.05),
                root_tol=solver.get("tol", 1e-9),
            ),
        )
    except (ValueError, ConfigError) as exc:
        raise ConfigError(f"{source}: {exc}") from exc


def _set_once(target: dict, key: str, value: float, full_key: str, lineno: int) -> None:
    if key in target:
        raise ConfigError(f"duplicate key {full_key!r}", line=lineno)
    target[key] = value


def load_config(path: "str | Path") -> GameConfig:
    path = Path(path)
    return parse_config_text(path.read_text(encoding="utf-8"), source=str(path))


def shipped_config_path(name: str) -> Path:
    """Filesystem path of a config shipped with the package."""
    if name not in SHIPPED_CONFIGS:
        raise ValueError(f"unknown shipped config {name!r}; choose from {SHIPPED_CONFIGS}")
    return Path(str(resources.files("obfusgame").joinpath("configs", f"{name}.cfg")))


def load_shipped_config(name: str) -> GameConfig:
    return load_config(shipped_config_path(name))
