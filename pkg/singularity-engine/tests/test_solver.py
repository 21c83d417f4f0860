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
from core.errors import DensityNotBoundedBelow, LawValidationError, SupercriticalData
from kernels.field import GridField
from kernels.grid import build_grid
from kernels.measures import BoundaryMeasure, InteriorMeasure
from solver.absorption import AbsorptionLaw
from solver.dirichlet import Solution, admissibility_flags, solve_dirichlet
from solver.exhaustion import solve_maximal_exhaustion
from solver.extreme_cases import q1_solve_and_scale, solve_hopf_cole
from solver.interior import solve_interior
from solver.linear import torsion_function


def _angle(s):
    return np.arctan2(s[:, 1], s[:, 0])


def cosine_data(domain):
    return BoundaryMeasure.from_density(domain, lambda s: 1.0 + 0.5 * np.cos(_angle(s)))


def trig_data(domain):
    return BoundaryMeasure.from_density(domain, lambda s: 1.0 + 0.5 * np.cos(2.0 * _angle(s)))


def trig_exact(points):
    return 1.0 + 0.5 * (points[..., 0] ** 2 - points[..., 1] ** 2)


# ======================================
# ABSORPTION LAWS
# ======================================

def test_power_and_truncated_laws():
    assert AbsorptionLaw.power(1.5)(4.0) == pytest.approx(8.0)
    assert AbsorptionLaw.truncated(2.0, 3.0)(2.0) == pytest.approx(3.0)
    assert AbsorptionLaw.truncated(2.0, 3.0).derivative(2.0) == 0.0
    assert AbsorptionLaw.power(1.5).derivative(4.0) == pytest.approx(3.0)


def test_custom_law_extrapolates_linearly():
    law = AbsorptionLaw.custom((0.0, 1.0, 2.0), (0.0, 1.0, 3.0))
    assert law(1.5) == pytest.approx(2.0)
    assert law(3.0) == pytest.approx(5.0)
    assert law.derivative(3.0) == pytest.approx(2.0)


def test_zero_law():
    assert AbsorptionLaw.zero().is_zero
    assert str(AbsorptionLaw.zero()) == "Zero"
    assert not AbsorptionLaw.power(1.2).is_zero


@pytest.mark.parametrize("build", [
    lambda: AbsorptionLaw.power(2.5),
    lambda: AbsorptionLaw.truncated(1.5, 0.0),
    lambda: AbsorptionLaw.custom((0.0, 1.0), (0.5, 1.0)),
    lambda: AbsorptionLaw.custom((0.0, 1.0, 2.0), (0.0, 2.0, 1.0)),
    lambda: AbsorptionLaw.custom((0.0,), (0.0,)),
    lambda: AbsorptionLaw.from_json({"kind": "Exponential"}),
])
def test_invalid_laws(build):
    with pytest.raises(LawValidationError):
        build()


def test_law_json_round_trip():
    for law in (AbsorptionLaw.power(1.3), AbsorptionLaw.truncated(1.7, 5.0), AbsorptionLaw.zero()):
        assert AbsorptionLaw.from_json(law.to_json()) == law


def test_subcriticality():
    assert AbsorptionLaw.power(1.4).subcritical_boundary(2)
    assert not AbsorptionLaw.power(1.5).subcritical_boundary(2)
    assert AbsorptionLaw.power(1.9).subcritical_interior(2)
    assert not AbsorptionLaw.power(2.0).subcritical_interior(2)
    assert AbsorptionLaw.truncated(2.0, 10.0).subcritical_boundary(2)


# ======================================
# LINEAR BUILDING BLOCKS
# ======================================

def test_torsion_function_is_exact_on_ball(ball):
    grid = build_grid(ball, 24, 24)
    radius = np.hypot(grid.points[..., 0], grid.points[..., 1])
    assert np.max(np.abs(torsion_function(grid) - 0.25 * (1.0 - radius ** 2))) < 1e-9


def test_zero_law_returns_the_poisson_integral(ball):
    cfg = SolverConfig(backend="picard").with_grid(32, 32)
    u = solve_dirichlet(ball, AbsorptionLaw.zero(), trig_data(ball), cfg)
    assert u.meta["stop"] == "trivial"
    assert np.array_equal(u.values, u.poisson.values)
    assert np.max(np.abs(u.values - trig_exact(u.grid.points))) < 1e-3


def test_zero_law_discrete_harmonic_lift(ball):
    cfg = SolverConfig(backend="fd", lift="boundary").with_grid(32, 32)
    u = solve_dirichlet(ball, AbsorptionLaw.zero(), trig_data(ball), cfg)
    assert u.meta["lift"] == "boundary"
    assert np.max(np.abs(u.values - trig_exact(u.grid.points))) < 1e-2


# ======================================
# DIRICHLET SOLVES
# ======================================

def test_constant_data_is_an_exact_solution(ball):
    mu = BoundaryMeasure.from_density(ball, lambda s: np.full(len(s), 2.0))
    u = solve_dirichlet(ball, AbsorptionLaw.power(1.5), mu, SolverConfig().with_grid(16, 16))
    assert u.converged
    assert np.allclose(u.values, 2.0, atol=1e-10)


def test_density_solution_is_sandwiched(ball):
    cfg = SolverConfig(tol_update=1e-8).with_grid(24, 24)
    u = solve_dirichlet(ball, AbsorptionLaw.power(1.5), cosine_data(ball), cfg)
    assert u.converged
    assert np.all(u.values >= -1e-12)
    assert np.all(u.values <= u.lift.values + 1e-12)
    assert np.any(u.values < u.lift.values - 1e-4)
    assert np.isfinite(u.meta["weak_residual"])


def test_unconverged_iterate_has_a_larger_weak_residual(ball):
    cfg = SolverConfig().with_grid(24, 24)
    converged = solve_dirichlet(ball, AbsorptionLaw.power(1.25), cosine_data(ball), cfg)
    one_step = solve_dirichlet(ball, AbsorptionLaw.power(1.25), cosine_data(ball),
                               cfg.replace(max_iter=1, strict=False))
    assert converged.converged
    assert not one_step.converged
    assert one_step.meta["weak_residual"] >= 10.0 * converged.meta["weak_residual"]


def test_ordered_densities_give_ordered_solutions(ball):
    cfg = SolverConfig(tol_update=1e-10, tol_weak=1e-12).with_grid(24, 24)
    law = AbsorptionLaw.power(1.5)
    lower = BoundaryMeasure.from_density(ball, lambda s: 1.0 + 0.5 * np.cos(_angle(s)))
    upper = BoundaryMeasure.from_density(ball, lambda s: 2.0 + 0.5 * np.cos(_angle(s)))
    u1 = solve_dirichlet(ball, law, lower, cfg)
    u2 = solve_dirichlet(ball, law, upper, cfg)
    assert np.all(u1.values <= u2.values + 1e-8)


def test_heavier_atom_gives_larger_solution(half_disk):
    cfg = SolverConfig(tol_update=1e-10, tol_weak=1e-12).with_grid(32, 32)
    law = AbsorptionLaw.power(1.25)
    u1 = solve_dirichlet(half_disk, law, BoundaryMeasure.dirac(half_disk, mass=0.5), cfg)
    u2 = solve_dirichlet(half_disk, law, BoundaryMeasure.dirac(half_disk, mass=2.0), cfg)
    assert u1.converged and u2.converged
    assert np.all(u1.values <= u2.values + 1e-8)
    assert np.max(u2.values) > np.max(u1.values)


def test_anchor_atom_on_half_disk(half_disk):
    cfg = SolverConfig().with_grid(32, 32)
    u = solve_dirichlet(half_disk, AbsorptionLaw.power(1.25), BoundaryMeasure.dirac(half_disk), cfg)
    assert u.converged
    assert not u.meta["mollified"]
    assert np.all(u.values >= -1e-12)
    assert np.all(u.values <= u.lift.values + 1e-12)


def test_supercritical_atoms_are_rejected(ball):
    with pytest.raises(SupercriticalData):
        solve_dirichlet(ball, AbsorptionLaw.power(1.6), BoundaryMeasure.dirac(ball), SolverConfig().with_grid(16, 16))


def test_supercritical_atoms_can_be_flagged(ball):
    cfg = SolverConfig(allow_supercritical=True)
    assert admissibility_flags(ball, AbsorptionLaw.power(1.6), True, cfg) == ["SubcriticalityViolated"]
    assert admissibility_flags(ball, AbsorptionLaw.power(1.6), False, SolverConfig()) == []


def test_newton_polish_reports(ball):
    cfg = SolverConfig(newton=True, tol_update=1e-6).with_grid(16, 16)
    u = solve_dirichlet(ball, AbsorptionLaw.power(1.5), cosine_data(ball), cfg)
    report = u.meta["newton"]
    assert {"residual_before", "residual_after", "steps", "improved"} <= set(report)
    assert np.all(u.values >= -1e-12)
    assert np.all(u.values <= u.lift.values + 1e-12)


def test_solution_save_round_trip(ball, tmp_path):
    u = solve_dirichlet(ball, AbsorptionLaw.power(1.5), cosine_data(ball), SolverConfig().with_grid(16, 16))
    csv_path, json_path = tmp_path / "u.csv", tmp_path / "u.json"
    u.save(str(csv_path), str(json_path))
    loaded = GridField.from_csv(str(csv_path))
    assert np.allclose(loaded.values, u.values)
    assert u.summary()["law"] == {"kind": "Power", "q": 1.5}


def test_from_field_wraps_external_values(half_disk):
    grid = build_grid(half_disk, 16, 16)
    wrapped = Solution.from_field(GridField.zeros(grid), AbsorptionLaw.power(1.3))
    assert wrapped.converged
    assert wrapped.meta["backend"] == "external"


# ======================================
# INTERIOR DATA
# ======================================

def test_interior_atom_solution(ball):
    cfg = SolverConfig().with_grid(24, 24)
    u = solve_interior(ball, AbsorptionLaw.power(1.25), InteriorMeasure.dirac(ball), cfg)
    assert u.converged
    assert np.allclose(u.values[-1], 0.0)
    assert np.all(u.values >= -1e-12)
    assert np.all(u.values <= u.lift.values + 1e-12)


def test_interior_zero_measure(ball):
    u = solve_interior(ball, AbsorptionLaw.power(1.25), InteriorMeasure.zero(ball), SolverConfig().with_grid(16, 16))
    assert np.allclose(u.values, 0.0)


def test_interior_supercritical(ball):
    with pytest.raises(SupercriticalData):
        solve_interior(ball, AbsorptionLaw.power(2.0), InteriorMeasure.dirac(ball), SolverConfig().with_grid(16, 16))


def test_interior_atom_must_be_inside(ball):
    with pytest.raises(ValueError):
        InteriorMeasure.dirac(ball, [1.0, 0.0])


# ======================================
# EXHAUSTION
# ======================================

def test_exhaustion_records_levels(ball):
    cfg = SolverConfig(tol_update=1e-8).with_grid(32, 32)
    u = solve_maximal_exhaustion(ball, AbsorptionLaw.power(1.5), cosine_data(ball), (0.2, 0.1, 0.05), cfg)
    assert u.meta["deltas"] == [0.2, 0.1, 0.05]
    assert len(u.meta["sup_differences"]) == 2
    assert u.domain.R == pytest.approx(0.95)


def test_exhaustion_rejects_bad_levels(ball, half_disk):
    mu = cosine_data(ball)
    with pytest.raises(ValueError):
        solve_maximal_exhaustion(ball, AbsorptionLaw.power(1.5), mu, (0.1, 0.2))
    with pytest.raises(ValueError):
        solve_maximal_exhaustion(ball, AbsorptionLaw.power(1.5), mu, (1.0,))
    with pytest.raises(ValueError):
        solve_maximal_exhaustion(half_disk, AbsorptionLaw.power(1.5), cosine_data(half_disk), (0.1,))


# ======================================
# ENDPOINT EXPONENTS
# ======================================

def test_hopf_cole_solution(ball):
    mu = cosine_data(ball)
    u = solve_hopf_cole(ball, mu, SolverConfig().with_grid(32, 32))
    boundary = u.grid.points[-1]
    expected = np.log(1.0 + 0.5 * np.cos(np.arctan2(boundary[:, 1], boundary[:, 0])))
    assert np.allclose(u.values[-1], expected, atol=1e-10)
    assert u.meta["shift"] == pytest.approx(np.log(0.5), abs=1e-4)
    assert u.meta["generic_error"] < 0.05


def test_hopf_cole_needs_positive_density(ball):
    with pytest.raises(DensityNotBoundedBelow):
        solve_hopf_cole(ball, BoundaryMeasure.dirac(ball))
    with pytest.raises(DensityNotBoundedBelow):
        solve_hopf_cole(ball, BoundaryMeasure.from_density(ball, lambda s: np.maximum(s[:, 0], 0.0)))


def test_q1_homogeneity(ball):
    cfg = SolverConfig(strict=False, max_iter=300).with_grid(16, 16)
    scaled, error = q1_solve_and_scale(ball, None, 2.0, cfg)
    assert error < 1e-6
    assert scaled.meta["homogeneity_error"] == error


def test_q1_scale_must_be_positive(ball):
    with pytest.raises(ValueError):
        q1_solve_and_scale(ball, None, 0.0)
