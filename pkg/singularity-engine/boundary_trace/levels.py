# =====================================================
# Pairings on level surfaces Σ_δ
# ∫_{Σ_δ} u·φ∘σ dS with node spacing ≤ δ/8
# =====================================================

from dataclasses import dataclass

import numpy as np

from geometry.domain import SurfaceQuadrature, boundary_length, level_surface
from kernels.field import GridField

# ---------------- CONFIG ----------------

NODES_PER_DELTA = 8
NODES_PER_COLUMN = 4


def as_field(solution) -> GridField:
    """Accepts a Solution or a bare GridField."""
    return getattr(solution, "field", solution)


def level_node_count(field: GridField, delta: float) -> int:
    length = boundary_length(field.domain)
    return int(max(NODES_PER_COLUMN * field.grid.n_theta, np.ceil(NODES_PER_DELTA * length / delta)))


@dataclass(frozen=True, eq=False)
class LevelSample:
    """u sampled once on the quadrature nodes of Σ_δ."""

    delta: float
    quadrature: SurfaceQuadrature
    values: np.ndarray

    def pair(self, phi) -> float:
        q = self.quadrature
        weights = np.asarray(phi(q.boundary_points), dtype=float)
        return float(np.sum(q.weights * self.values * weights))

    def mass_near(self, z, radius: float) -> float:
        """∫_{Σ_δ ∩ B_r(z)} u dS."""
        q = self.quadrature
        inside = np.linalg.norm(q.nodes - np.asarray(z, dtype=float), axis=-1) < radius
        return float(np.sum(q.weights[inside] * self.values[inside]))


def sample_level(solution, delta: float, m: int | None = None) -> LevelSample:
    field = as_field(solution)
    m = level_node_count(field, delta) if m is None else int(m)
    quadrature = level_surface(field.domain, delta, m)
    return LevelSample(float(delta), quadrature, field.sample(quadrature.nodes))


def trace_on_level(solution, delta: float, test_functions, m: int | None = None) -> list:
    """
    Pairings ∫_{Σ_δ} u·φ(σ(x)) dS for each test function φ (callables of
    boundary points). A single callable is accepted as well.
    """

    if callable(test_functions):
        test_functions = [test_functions]

    level = sample_level(solution, delta, m)
    return [level.pair(phi) for phi in test_functions]


def dyadic_levels(top: float, count: int) -> list:
    return [top * 0.5 ** k for k in range(count)]
