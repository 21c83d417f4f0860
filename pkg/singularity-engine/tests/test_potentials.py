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

from core.errors import CoincidentPoints
from geometry.domain import level_surface
from kernels.field import GridField
from kernels.grid import build_grid
from kernels.measures import BoundaryMeasure
from kernels.potentials import (
    apply_green,
    apply_poisson,
    green_atom_field,
    green_kernel,
    poisson_kernel,
    poisson_kernel_gradient,
)


# ======================================
# GREEN KERNEL
# ======================================

@pytest.mark.parametrize("fixture", ["ball", "half_disk"])
def test_green_is_symmetric_and_positive(fixture, request):
    domain = request.getfixturevalue(fixture)
    x, y = np.array([0.2, 0.3]), np.array([-0.4, 0.5])
    assert green_kernel(domain, x, y) == pytest.approx(green_kernel(domain, y, x), rel=1e-12)
    assert green_kernel(domain, x, y) > 0


def test_green_vanishes_on_boundary(ball, half_disk):
    y = np.array([0.1, 0.4])
    assert green_kernel(ball, np.array([0.6, 0.8]), y) == pytest.approx(0.0, abs=1e-12)
    assert green_kernel(half_disk, np.array([0.3, 0.0]), y) == pytest.approx(0.0, abs=1e-12)
    assert green_kernel(half_disk, np.array([0.0, 1.0]), y) == pytest.approx(0.0, abs=1e-12)


def test_green_rejects_coincident_points(ball):
    with pytest.raises(CoincidentPoints):
        green_kernel(ball, [0.1, 0.1], [0.1, 0.1])


# ======================================
# POISSON KERNEL
# ======================================

def test_ball_poisson_integrates_to_one(ball):
    quad = level_surface(ball, 0.0, 512)
    for x in ([0.3, 0.2], [0.0, 0.0], [-0.5, 0.1]):
        values = poisson_kernel(ball, np.array(x)[None, :], quad.boundary_points)
        assert np.sum(values * quad.weights) == pytest.approx(1.0, abs=1e-10)


def test_half_disk_poisson_integrates_to_one(half_disk):
    quad = level_surface(half_disk, 0.0, 4000)
    values = poisson_kernel(half_disk, np.array([0.2, 0.4])[None, :], quad.boundary_points)
    assert np.all(values >= 0)
    assert np.sum(values * quad.weights) == pytest.approx(1.0, abs=1e-3)


@pytest.mark.parametrize("fixture", ["ball", "half_disk"])
def test_poisson_gradient_matches_finite_differences(fixture, request):
    domain = request.getfixturevalue(fixture)
    sigma = np.array([0.4, 0.0]) if not domain.is_ball else np.array([0.6, 0.8])
    x = np.array([0.1, 0.35])
    h = 1e-6
    fd = np.array([
        (poisson_kernel(domain, x + h * e, sigma) - poisson_kernel(domain, x - h * e, sigma)) / (2 * h)
        for e in np.eye(2)
    ])
    analytic = poisson_kernel_gradient(domain, x, sigma)
    assert np.allclose(analytic, fd, rtol=1e-5, atol=1e-6)


# ======================================
# GRID OPERATORS
# ======================================

def test_poisson_of_constant_density_is_one(ball):
    grid = build_grid(ball, 16, 16)
    mu = BoundaryMeasure.from_density(ball, lambda s: np.ones(len(s)))
    u = apply_poisson(ball, mu, grid, n_jobs=1)
    assert np.allclose(u.values, 1.0, atol=1e-10)


def test_poisson_reproduces_harmonic_polynomial(ball):
    grid = build_grid(ball, 32, 32)
    mu = BoundaryMeasure.from_density(
        ball, lambda s: 1.0 + 0.5 * np.cos(2.0 * np.arctan2(s[:, 1], s[:, 0]))
    )
    u = apply_poisson(ball, mu, grid, n_jobs=1)
    exact = 1.0 + 0.5 * (grid.points[..., 0] ** 2 - grid.points[..., 1] ** 2)
    assert np.max(np.abs(u.values - exact)) < 1e-3


def test_poisson_atom_mass_scales_linearly(half_disk):
    grid = build_grid(half_disk, 24, 24)
    one = apply_poisson(half_disk, BoundaryMeasure.dirac(half_disk, None, 1.0), grid)
    three = apply_poisson(half_disk, BoundaryMeasure.dirac(half_disk, None, 3.0), grid)
    assert np.allclose(three.values, 3.0 * one.values)
    assert np.all(one.values[:, 1:-1][:-1] > 0)


def test_green_atom_field_vanishes_on_boundary(ball):
    grid = build_grid(ball, 16, 16)
    field = green_atom_field(ball, grid, np.array([0.1, 0.05]), 2.0)
    assert np.allclose(field.values[-1], 0.0)
    assert np.all(field.values[:-1] > 0)


def test_green_of_one_is_torsion_function(ball):
    grid = build_grid(ball, 32, 32)
    f = GridField(grid, np.ones(grid.shape))
    u = apply_green(ball, f)
    radius = np.hypot(grid.points[..., 0], grid.points[..., 1])
    assert np.max(np.abs(u.values - 0.25 * (1.0 - radius ** 2))) < 0.02


def test_apply_green_rejects_foreign_field(ball, half_disk):
    f = GridField(build_grid(half_disk, 16, 16), np.ones((16, 16)))
    with pytest.raises(ValueError):
        apply_green(ball, f)
