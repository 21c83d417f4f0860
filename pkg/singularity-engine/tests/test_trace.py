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

from boundary_trace.dichotomy import (
    PointVerdict,
    absorption_integral,
    classify_boundary,
    dichotomy_probe,
    partition_bump,
)
from boundary_trace.harnack import annulus_ratio, harnack_ratio
from boundary_trace.levels import dyadic_levels, trace_on_level
from config.settings import SolverConfig
from geometry.domain import boundary_length, boundary_point
from kernels.field import GridField
from kernels.grid import build_grid
from kernels.measures import BoundaryMeasure
from solver.absorption import AbsorptionLaw
from solver.dirichlet import Solution, solve_dirichlet


def torsion_like(grid):
    radius = np.hypot(grid.points[..., 0], grid.points[..., 1])
    return GridField(grid, 1.0 - radius ** 2)


# ======================================
# LEVEL PAIRINGS
# ======================================

def test_dyadic_levels():
    assert dyadic_levels(0.2, 3) == pytest.approx([0.2, 0.1, 0.05])


def test_constant_field_pairs_to_level_length(ball):
    field = GridField(build_grid(ball, 16, 16), np.ones((16, 16)))
    (value,) = trace_on_level(field, 0.25, lambda s: np.ones(len(s)))
    assert value == pytest.approx(2.0 * np.pi * 0.75, rel=1e-9)


@pytest.mark.parametrize("fixture, count", [("ball", 8), ("half_disk", 10)])
def test_partition_bumps_sum_to_one(fixture, count, request):
    domain = request.getfixturevalue(fixture)
    length = boundary_length(domain)
    spacing = length / count
    points = boundary_point(domain, np.linspace(0.013, length - 0.013, 57))
    total = sum(partition_bump(domain, k * spacing, spacing)(points) for k in range(count))
    assert np.allclose(total, 1.0, atol=1e-12)


# ======================================
# DICHOTOMY PROBES
# ======================================

def test_absorption_vanishes_for_zero_law(ball):
    grid = build_grid(ball, 16, 16)
    solution = Solution.from_field(torsion_like(grid), AbsorptionLaw.zero())
    assert absorption_integral(solution, ball.singular_anchor, 0.5) == 0.0


def test_probe_rejects_interior_point_and_bad_radii(ball):
    grid = build_grid(ball, 16, 16)
    solution = Solution.from_field(torsion_like(grid), AbsorptionLaw.zero())
    with pytest.raises(ValueError):
        dichotomy_probe(solution, [0.0, 0.0], [0.4, 0.2])
    with pytest.raises(ValueError):
        dichotomy_probe(solution, [1.0, 0.0], [0.2, 0.4])


def test_linear_trace_recovers_density(ball):
    mu = BoundaryMeasure.from_density(
        ball, lambda s: 1.0 + 0.5 * np.cos(2.0 * np.arctan2(s[:, 1], s[:, 0]))
    )
    cfg = SolverConfig(backend="picard").with_grid(32, 64)
    u = solve_dirichlet(ball, AbsorptionLaw.zero(), mu, cfg)
    report = classify_boundary(u, 8, n_jobs=1)

    assert not report.singular
    assert all(p.verdict is PointVerdict.REGULAR for p in report.probes)
    assert report.total_variation_error(mu) < 0.02
    assert report.regular_mass == pytest.approx(mu.total_mass, rel=0.02)

    payload = report.to_json()
    assert payload["singular"] == []
    assert payload["sweep_csv"].startswith("delta,")


def test_classify_needs_four_probes(ball):
    grid = build_grid(ball, 16, 16)
    with pytest.raises(ValueError):
        classify_boundary(torsion_like(grid), 3)


def test_flat_mass_needs_half_disk(ball):
    mu = BoundaryMeasure.from_density(ball, lambda s: np.ones(len(s)))
    u = solve_dirichlet(ball, AbsorptionLaw.zero(), mu, SolverConfig(backend="picard").with_grid(16, 32))
    report = classify_boundary(u, 4, n_jobs=1)
    with pytest.raises(ValueError):
        report.flat_mass()


# ======================================
# HARNACK
# ======================================

def test_harnack_ratio_bounds(ball):
    field = torsion_like(build_grid(ball, 32, 32))
    ratio = harnack_ratio(field, 0.5)
    assert 1.0 <= ratio <= 2.0


def test_harnack_scale_limit(ball):
    field = torsion_like(build_grid(ball, 16, 16))
    with pytest.raises(ValueError):
        harnack_ratio(field, 0.9)


def test_annulus_ratio_of_identical_fields(ball):
    field = torsion_like(build_grid(ball, 24, 24))
    assert annulus_ratio(field, field, 0.5) == pytest.approx(1.0)
