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

from core.errors import LevelTooDeep, OutsideFlowRegion, PointOutsideDomain
from geometry.domain import (
    Domain,
    boundary_distance,
    boundary_length,
    boundary_parameter,
    boundary_point,
    flow_coordinates,
    flow_inverse,
    level_surface,
)


# ======================================
# DISTANCE
# ======================================

def test_ball_distance_examples(ball):
    assert boundary_distance(ball, [0.0, 0.0]) == pytest.approx(1.0)
    assert boundary_distance(ball, [0.5, 0.0]) == pytest.approx(0.5)


def test_half_disk_distance_example(half_disk):
    assert boundary_distance(half_disk, [0.3, 0.1]) == pytest.approx(0.1)


def test_distance_rejects_outside_points(ball, half_disk):
    with pytest.raises(PointOutsideDomain):
        boundary_distance(ball, [1.5, 0.0])
    with pytest.raises(PointOutsideDomain):
        boundary_distance(half_disk, [0.2, -0.1])


def test_distance_is_one_lipschitz(ball, half_disk):
    rng = np.random.default_rng(7)
    for domain in (ball, half_disk):
        radius = np.sqrt(rng.uniform(0, 1, 400)) * 0.999
        angle = rng.uniform(0, np.pi if not domain.is_ball else 2 * np.pi, 400)
        pts = np.stack([radius * np.cos(angle), radius * np.sin(angle)], axis=-1)
        d = boundary_distance(domain, pts)
        a, b = pts[:200], pts[200:]
        gaps = np.abs(d[:200] - d[200:]) - np.linalg.norm(a - b, axis=-1)
        assert np.all(gaps <= 1e-12)


def test_domain_json_round_trip(half_disk):
    assert Domain.from_json(half_disk.to_json()) == half_disk
    assert half_disk.to_json() == {"kind": "HalfDisk", "N": 2, "R": 1.0}


def test_delta_star_and_anchor(ball, half_disk):
    assert ball.delta_star == 1.0
    assert half_disk.delta_star == 0.5
    assert np.allclose(ball.singular_anchor, [0.0, -1.0])
    assert np.allclose(half_disk.singular_anchor, [0.0, 0.0])


def test_unsupported_dimension():
    with pytest.raises(ValueError):
        Domain.ball(4, 1.0)


# ======================================
# FLOW COORDINATES
# ======================================

def test_flow_coordinates_radial_projection(ball):
    delta, sigma = flow_coordinates(ball, np.array([0.0, 0.5]))
    assert delta == pytest.approx(0.5)
    assert np.allclose(sigma, [0.0, 1.0])


def test_flow_coordinates_flat_part(half_disk):
    delta, sigma = flow_coordinates(half_disk, np.array([0.2, 0.05]))
    assert delta == pytest.approx(0.05)
    assert np.allclose(sigma, [0.2, 0.0])


def test_flow_round_trip_random_points(ball):
    rng = np.random.default_rng(0)
    worst = 0.0
    for _ in range(100):
        radius = rng.uniform(0.05, 0.95)
        angle = rng.uniform(0, 2 * np.pi)
        x = np.array([radius * np.cos(angle), radius * np.sin(angle)])
        delta, sigma = flow_coordinates(ball, x)
        worst = max(worst, float(np.linalg.norm(flow_inverse(ball, delta, sigma) - x)))
    assert worst < 1e-12


def test_flow_coordinates_outside_region(ball, half_disk):
    with pytest.raises(OutsideFlowRegion):
        flow_coordinates(ball, np.array([0.0, 0.0]))
    with pytest.raises(OutsideFlowRegion):
        flow_coordinates(half_disk, np.array([0.0, 0.5]))


# ======================================
# LEVEL SURFACES
# ======================================

def test_ball_level_totals(ball):
    assert level_surface(ball, 0.0, 360).total == pytest.approx(2 * np.pi, rel=1e-12)
    assert level_surface(ball, 0.5, 360).total == pytest.approx(np.pi, rel=1e-12)


def test_half_disk_level_total(half_disk):
    delta, rho = 0.1, 0.9
    chord = 2 * np.sqrt(rho ** 2 - delta ** 2)
    arc = rho * (np.pi - 2 * np.arcsin(delta / rho))
    quadrature = level_surface(half_disk, delta, 100)
    assert quadrature.total == pytest.approx(chord + arc, rel=1e-12)
    assert np.allclose(boundary_distance(half_disk, quadrature.nodes), delta)


def test_level_weights_positive_and_shrinking(ball):
    totals = [level_surface(ball, d, 64).total for d in (0.0, 0.2, 0.4, 0.6)]
    assert all(b < a for a, b in zip(totals, totals[1:]))
    assert np.all(level_surface(ball, 0.3, 64).weights > 0)


def test_level_too_deep(ball, half_disk):
    with pytest.raises(LevelTooDeep):
        level_surface(ball, 1.0, 64)
    with pytest.raises(LevelTooDeep):
        level_surface(half_disk, 0.5, 64)


# ======================================
# BOUNDARY PARAMETER
# ======================================

def test_boundary_parameter_round_trip(ball, half_disk):
    for domain in (ball, half_disk):
        t = np.linspace(0.05, boundary_length(domain) - 0.05, 25)
        assert np.allclose(boundary_parameter(domain, boundary_point(domain, t)), t, atol=1e-12)


def test_half_disk_length(half_disk):
    assert boundary_length(half_disk) == pytest.approx(2 + np.pi)
