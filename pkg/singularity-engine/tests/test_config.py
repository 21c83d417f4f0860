import os
import sys

# --------------------------------------
# ADD PROJECT ROOT TO PYTHON PATH
# --------------------------------------
BASE_DIR = os.path.dirname(os.path.abspath(__file__))
PROJECT_ROOT = os.path.abspath(os.path.join(BASE_DIR, ".."))

if PROJECT_ROOT not in sys.path:
    sys.path.insert(0, PROJECT_ROOT)

import pytest

from config.settings import GridConfig, ShootingConfig, SolverConfig
from core.errors import ConfigError


def test_grid_parse():
    cfg = GridConfig.parse("32,64")
    assert (cfg.n_r, cfg.n_theta) == (32, 64)


@pytest.mark.parametrize("text", ["abc", "32", "8,8"])
def test_grid_parse_rejects(text):
    with pytest.raises(ConfigError):
        GridConfig.parse(text)


def test_grid_unknown_key():
    with pytest.raises(ConfigError):
        GridConfig.from_json({"n_r": 32, "rings": 4})


def test_solver_round_trip():
    cfg = SolverConfig(backend="picard", theta=0.25).with_grid(32, 48, 0.8)
    assert SolverConfig.from_json(cfg.to_json()) == cfg
    assert cfg.grid.grading == 0.8


def test_solver_replace_keeps_grid():
    cfg = SolverConfig().with_grid(32, 32).replace(strict=False)
    assert cfg.strict is False
    assert cfg.grid.n_r == 32


@pytest.mark.parametrize("payload", [
    {"backend": "spectral"},
    {"lift": "harmonic"},
    {"theta": 0.0},
    {"theta": 0.5, "theta_min": 0.6},
    {"tol_update": -1.0},
    {"max_iter": 0},
    {"mollifier_cells": 1},
    {"damping": 0.3},
])
def test_solver_rejects(payload):
    with pytest.raises(ConfigError):
        SolverConfig.from_json(payload)


def test_shooting_config():
    assert ShootingConfig.from_json({"n_phi": 101}).n_phi == 101
    with pytest.raises(ConfigError):
        ShootingConfig.from_json({"n_phi": 5})
    with pytest.raises(ConfigError):
        ShootingConfig.from_json({"steps": 5})
