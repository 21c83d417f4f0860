import os
import sys

# --------------------------------------
# ADD PROJECT ROOT TO PYTHON PATH
# --------------------------------------
BASE_DIR = os.path.dirname(os.path.abspath(__file__))
PROJECT_ROOT = os.path.abspath(os.path.join(BASE_DIR, ".."))

if PROJECT_ROOT not in sys.path:
    sys.path.insert(0, PROJECT_ROOT)

import numpy as np
import pytest

from kernels.field import GridField
from kernels.grid import build_grid
from kernels.marcinkiewicz import Weight, marcinkiewicz_norm, weak_tail_check
from kernels.measures import BoundaryMeasure
from kernels.potentials import apply_poisson


@pytest.fixture
def grid(ball):
    return build_grid(ball, 16, 16)


def test_zero_field_has_zero_norm(grid):
    assert marcinkiewicz_norm(GridField.zeros(grid), 2.0) == 0.0


def test_constant_field_norm(grid):
    f = GridField(grid, np.full(grid.shape, 3.0))
    assert marcinkiewicz_norm(f, 2.0) == pytest.approx(3.0 * np.pi ** 0.5, rel=1e-12)


def test_norm_is_homogeneous(grid):
    rng = np.random.default_rng(3)
    f = GridField(grid, rng.uniform(-1, 1, grid.shape))
    weight = Weight.distance()
    assert marcinkiewicz_norm(f.with_values(2.0 * f.values), 1.5, weight) == pytest.approx(
        2.0 * marcinkiewicz_norm(f, 1.5, weight), rel=1e-12
    )


def test_tail_bound_holds_for_every_level(grid):
    radius = np.hypot(grid.points[..., 0], grid.points[..., 1])
    f = GridField(grid, 1.0 / radius)
    for lam in (0.5, 1.0, 4.0, 20.0, 100.0):
        assert weak_tail_check(f, lam, 2.0, Weight.distance_power(0.5))


def test_invalid_exponent_and_threshold(grid):
    f = GridField(grid, np.ones(grid.shape))
    with pytest.raises(ValueError):
        marcinkiewicz_norm(f, 1.0)
    with pytest.raises(ValueError):
        weak_tail_check(f, 0.0, 2.0)


def test_poisson_kernel_norm_under_refinement(ball):
    mu = BoundaryMeasure.dirac(ball)
    critical, above = [], []
    for n in (16, 32, 64):
        f = apply_poisson(ball, mu, build_grid(ball, n, 4 * n))
        critical.append(marcinkiewicz_norm(f, 2.0))
        above.append(marcinkiewicz_norm(f, 2.5))

    assert max(critical) < 1.25 * min(critical)
    assert above[0] < above[1] < above[2]
    assert above[2] > 1.15 * above[0]
