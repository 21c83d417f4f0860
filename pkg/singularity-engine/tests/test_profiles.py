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

from core.errors import ExponentOutOfRange, OriginEvaluation, QOutOfRange
from geometry.domain import Domain
from kernels.grid import build_grid
from profiles.exponents import (
    existence_obstruction,
    exponents,
    keller_osserman_constant,
    radial_constant,
    radial_singular_residual,
    supersolution_height,
)
from profiles.hemisphere import eigen_check
from profiles.separable import separable_field, separable_solution
from profiles.shooting import profile_residual, solve_profile


@pytest.fixture(scope="module")
def profile():
    return solve_profile(2, 1.3)


# ======================================
# EXPONENTS
# ======================================

def test_exponent_pack():
    pack = exponents(2, 1.25)
    assert pack.beta == pytest.approx(3.0)
    assert pack.q_conj == pytest.approx(5.0)
    assert pack.q_c == pytest.approx(1.5)
    assert pack.lambda_coeff == pytest.approx(9.0)
    assert pack.q_star == pytest.approx(2.0)
    assert pack.subcritical


def test_radial_constant_closed_form():
    assert radial_constant(2, 1.25) == pytest.approx(27.0, abs=1e-12)


@pytest.mark.parametrize("N, q", [(2, 1.25), (2, 1.4), (2, 1.1), (3, 1.2), (3, 1.4)])
def test_radial_singular_solution_residual(N, q):
    assert radial_singular_residual(N, q, np.linspace(0.1, 1.0, 10)) < 1e-8


def test_scaled_radial_solution_is_not_a_solution():
    assert radial_singular_residual(2, 1.25, np.linspace(0.1, 1.0, 10), factor=2.0) > 0.1


def test_exponent_ranges():
    with pytest.raises(ExponentOutOfRange):
        radial_constant(3, 1.6)
    with pytest.raises(QOutOfRange):
        exponents(2, 1.0)
    with pytest.raises(QOutOfRange):
        exponents(1, 1.5)


def test_keller_osserman_constant():
    assert keller_osserman_constant(1.5) == pytest.approx(4.0)


def test_obstruction_switches_at_critical_exponent():
    assert not existence_obstruction(2, 1.4)
    assert existence_obstruction(2, 1.5)
    assert existence_obstruction(2, 1.6)
    assert not existence_obstruction(3, 1.3)
    assert existence_obstruction(3, 4.0 / 3.0)


def test_supersolution_height_positive_below_q_star():
    assert supersolution_height(2, 1.3) > 0
    assert supersolution_height(3, 1.6) == 0.0


# ======================================
# HEMISPHERE
# ======================================

def test_eigen_check():
    fitted, deviation = eigen_check(2, 2000)
    assert deviation < 1e-6
    assert fitted == pytest.approx(1.0, abs=1e-6)


def test_eigen_check_three_dimensions():
    _, deviation = eigen_check(3, 2000)
    assert deviation < 1e-5


def test_eigen_check_dimension():
    with pytest.raises(ValueError):
        eigen_check(4)


# ======================================
# SHOOTING
# ======================================

def test_profile_found_below_critical_exponent(profile):
    assert profile.found
    assert profile.a > 0
    assert profile.omega[0] == 0.0 and profile.omega[-1] == 0.0
    assert np.all(profile.omega >= 0)
    assert np.allclose(profile.omega, profile.omega[::-1], atol=1e-9)
    assert profile.omega_at(0.0) == pytest.approx(profile.a, rel=1e-6)


def test_profile_residual_small(profile):
    assert profile_residual(profile) < 1e-3


def test_profile_json(profile):
    payload = profile.to_json()
    assert payload["N"] == 2 and payload["q"] == pytest.approx(1.3)
    assert len(payload["bracket"]) == 2


@pytest.mark.parametrize("q", [1.55, 1.6])
def test_no_profile_at_or_above_critical_exponent(q):
    result = solve_profile(2, q)
    assert not result.found
    assert result.obstruction
    assert result.to_json()["reason"]


# ======================================
# SEPARABLE SOLUTION
# ======================================

def test_separable_solution_guards(profile):
    with pytest.raises(OriginEvaluation):
        separable_solution(profile, [0.0, 0.0])
    with pytest.raises(ValueError):
        separable_solution(profile, [0.1, -0.2])


def test_separable_solution_is_homogeneous(profile):
    x = np.array([0.2, 0.3])
    assert separable_solution(profile, 0.5 * x) == pytest.approx(
        0.5 ** -profile.beta * separable_solution(profile, x), rel=1e-12
    )


def test_separable_field_matches_pointwise_values(profile):
    grid = build_grid(Domain.half_disk(2, 1.0), 24, 24)
    field = separable_field(profile, grid, scale=2.0)
    expected = 2.0 * separable_solution(profile, grid.points)
    assert np.allclose(field.values, expected, rtol=1e-10, atol=1e-12)
    assert np.allclose(field.values[:, 0], 0.0)


def test_separable_field_needs_half_disk(profile):
    with pytest.raises(ValueError):
        separable_field(profile, build_grid(Domain.ball(2, 1.0), 16, 16))
