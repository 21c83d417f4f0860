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

from config.settings import SolverConfig
from core.errors import OutOfGrid, QOutOfRange
from kernels.field import GridField
from kernels.grid import build_grid
from kernels.measures import BoundaryMeasure, InteriorMeasure
from lab.capacity import (
    CapacityQuery,
    capacity_scaling,
    cutoff,
    interior_removability_identity,
    point_capacity_zero,
)
from lab.classification import SingularityVerdict, classify_isolated, reliable_radii
from lab.experiments import (
    anchor_bump,
    dirac_collapse_experiment,
    increasing_mass_experiment,
    keller_osserman_envelope,
)
from lab.scaling import extract_self_similar, rescale
from profiles.separable import separable_field
from profiles.shooting import solve_profile
from solver.absorption import AbsorptionLaw
from solver.dirichlet import Solution, solve_dirichlet
from solver.interior import solve_interior


@pytest.fixture(scope="module")
def profile():
    return solve_profile(2, 1.3)


# ======================================
# SCALING
# ======================================

def test_rescale_rejects_bad_factors(half_disk, profile):
    field = separable_field(profile, build_grid(half_disk, 24, 24))
    with pytest.raises(ValueError):
        rescale(field, 1.5, 1.3)
    with pytest.raises(ValueError):
        rescale(field, 0.5, 1.3, anchor=[0.1, 0.0])
    with pytest.raises(OutOfGrid):
        rescale(field, 1e-3, 1.3)


def test_rescale_identity(half_disk, profile):
    field = separable_field(profile, build_grid(half_disk, 24, 24))
    assert np.array_equal(rescale(field, 1.0, 1.3).values, field.values)


def test_separable_field_is_scale_invariant(half_disk, profile):
    grid = build_grid(half_disk, 32, 32)
    field = separable_field(profile, grid)
    scaled = rescale(field, 0.5, 1.3)
    keep = grid.r * 0.5 >= grid.r_min * (1.0 - 1e-9)
    error = np.max(np.abs(scaled.values - field.values[keep])) / np.max(np.abs(field.values[keep]))
    assert error < 1e-3


def test_self_similar_extraction_recovers_profile(half_disk, profile):
    field = separable_field(profile, build_grid(half_disk, 48, 32))
    estimate = extract_self_similar(field, [0.5, 0.25], 1.3)
    assert estimate.distance_to(profile) < 1e-3
    assert len(estimate.history) == 1


# ======================================
# ISOLATED SINGULARITIES
# ======================================

def test_separable_field_is_strong(half_disk, profile):
    grid = build_grid(half_disk, 64, 64)
    solution = Solution.from_field(separable_field(profile, grid), AbsorptionLaw.power(1.3))
    report = classify_isolated(solution, profile=profile)
    assert report.verdict is SingularityVerdict.STRONG
    assert report.profile_distance <= 0.05


def test_anchor_atom_is_weak(half_disk):
    cfg = SolverConfig().with_grid(48, 32)
    u = solve_dirichlet(half_disk, AbsorptionLaw.power(1.25), BoundaryMeasure.dirac(half_disk), cfg)
    report = classify_isolated(u)
    assert report.verdict is SingularityVerdict.WEAK
    assert 0.85 <= report.c <= 1.15
    assert str(report).startswith("Weak(c=")


def separable_like(grid):
    gap = np.linalg.norm(grid.points - grid.domain.singular_anchor, axis=-1)
    return GridField(grid, np.where(grid.on_domain_boundary, 0.0, 1.0 / np.maximum(gap, 1e-3)))


def test_coarse_ball_grid_is_inconclusive(ball):
    grid = build_grid(ball, 16, 16)
    solution = Solution.from_field(separable_like(grid), AbsorptionLaw.power(1.3))
    assert len(reliable_radii(solution)) < 3
    assert classify_isolated(solution).verdict is SingularityVerdict.INCONCLUSIVE


# ======================================
# EXPERIMENTS
# ======================================

def test_anchor_bump_mass(ball):
    mu = anchor_bump(ball, 3.0, 0.4)
    assert mu.density_mass == pytest.approx(3.0, rel=1e-12)
    assert mu.density_at(np.array([[0.0, 1.0]]))[0] == pytest.approx(0.0, abs=1e-12)


def test_collapse_sweep_decays(ball):
    cfg = SolverConfig(strict=False).with_grid(32, 128)
    sweep = dirac_collapse_experiment(ball, 1.6, 20.0, (0.8, 0.4, 0.2, 0.1), cfg)
    assert sweep.values.shape == (4, 3)
    assert np.all(sweep.values[-1] < sweep.values[0])
    assert sweep.to_json()["widths"] == [0.8, 0.4, 0.2, 0.1]


def test_collapse_without_mass_is_zero(ball):
    cfg = SolverConfig().with_grid(16, 32)
    sweep = dirac_collapse_experiment(ball, 1.6, 0.0, (0.8, 0.4), cfg)
    assert np.allclose(sweep.values, 0.0)


def test_collapse_argument_checks(ball, half_disk):
    cfg = SolverConfig().with_grid(16, 32)
    with pytest.raises(ValueError):
        dirac_collapse_experiment(half_disk, 1.6, 1.0, (0.8, 0.4), cfg)
    with pytest.raises(ValueError):
        dirac_collapse_experiment(ball, 1.6, 1.0, (0.8, 0.1), cfg)
    with pytest.raises(ValueError):
        dirac_collapse_experiment(ball, 1.6, 1.0, (0.4, 0.8), cfg)
    with pytest.raises(ValueError):
        dirac_collapse_experiment(ball, 1.6, -1.0, (0.8, 0.4), cfg)


def test_increasing_mass_stays_below_envelope(half_disk, profile):
    cfg = SolverConfig().with_grid(48, 32)
    sweep = increasing_mass_experiment(half_disk, 1.3, (1.0, 4.0), cfg, profile=profile)
    assert sweep.within_envelope
    assert sweep.max_values[1] > sweep.max_values[0]
    assert sweep.profile_distance is not None
    assert np.all(np.isfinite(keller_osserman_envelope(half_disk, sweep.solutions[-1].grid, 1.3)))


def test_increasing_mass_argument_checks(half_disk):
    with pytest.raises(QOutOfRange):
        increasing_mass_experiment(half_disk, 1.6, (1.0, 2.0))
    with pytest.raises(ValueError):
        increasing_mass_experiment(half_disk, 1.3, (2.0, 1.0))


# ======================================
# CAPACITY
# ======================================

@pytest.mark.parametrize("q, null", [(1.4, False), (1.5, True), (1.6, True), (2.0, True)])
def test_boundary_point_capacity(q, null):
    assert point_capacity_zero(CapacityQuery.boundary(2, q)) is null


@pytest.mark.parametrize("N, q, null", [(2, 1.9, False), (3, 1.4, False), (3, 1.5, True), (3, 1.7, True)])
def test_interior_point_capacity(N, q, null):
    assert point_capacity_zero(CapacityQuery.interior(N, q)) is null


def test_capacity_scaling_regimes():
    log = capacity_scaling(CapacityQuery.boundary(2, 1.5, rho=0.1))
    assert log.regime == "log"
    assert log.estimate == pytest.approx(np.log(10.0) ** -2)

    power = capacity_scaling(CapacityQuery.boundary(2, 1.6, rho=0.1))
    assert power.regime == "power"
    assert power.exponent == pytest.approx(1.0 / 3.0)

    bounded = capacity_scaling(CapacityQuery.boundary(2, 1.3, rho=0.1))
    assert bounded.regime == "bounded" and not bounded.zero_limit


def test_zero_smoothness_is_lebesgue_capacity():
    query = CapacityQuery.boundary(2, 2.0, rho=0.1)
    assert query.alpha == 0.0
    scaling = capacity_scaling(query)
    assert scaling.regime == "power"
    assert scaling.exponent == pytest.approx(1.0)
    assert scaling.estimate == pytest.approx(0.1)


def test_capacity_query_validation():
    with pytest.raises(ValueError):
        CapacityQuery(1.0, 2.0, 2, "BallOfRadius")
    with pytest.raises(ValueError):
        CapacityQuery(1.0, 1.0, 2)
    with pytest.raises(ValueError):
        CapacityQuery.boundary(2, 2.5)


def test_cosine_cutoff():
    radius = np.array([0.05, 0.1, 0.15, 0.2, 0.3])
    eta, grad = cutoff(radius, 0.1, logarithmic=False)
    assert eta[0] == 1.0 and eta[-1] == 0.0
    assert eta[2] == pytest.approx(0.5)
    assert grad[0] == 0.0 and grad[-1] == 0.0


def test_removability_identity_structure(ball):
    nu = InteriorMeasure.dirac(ball)
    solution = solve_interior(ball, AbsorptionLaw.power(1.6), nu, SolverConfig().with_grid(32, 32))
    certificate = interior_removability_identity(solution)
    assert certificate.ramp == "log"
    assert certificate.flux < 0
    assert len(certificate.lhs) == len(certificate.rhs) == len(certificate.eps) >= 2
    assert all(value >= 0 for value in certificate.lhs)


def test_removability_identity_needs_ball(half_disk, profile):
    solution = Solution.from_field(separable_field(profile, build_grid(half_disk, 16, 16)), AbsorptionLaw.power(1.3))
    with pytest.raises(ValueError):
        interior_removability_identity(solution)
