# =====================================================
# Boundary Harnack checks on dyadic half-annuli at the anchor
# =====================================================

import numpy as np

from boundary_trace.levels import as_field
from core.errors import EmptyAnnulus

HARNACK_SCALE = 2.0 / 3.0


def _annulus_nodes(field, r: float, anchor=None) -> tuple:
    grid = field.grid
    domain = grid.domain

    r0 = domain.delta_star
    if not 0.0 < r <= HARNACK_SCALE * r0 * (1.0 + 1e-12):
        raise ValueError(f"[ERROR] Harnack scale r = {r:g} must lie in (0, {HARNACK_SCALE * r0:g}]")

    anchor = domain.singular_anchor if anchor is None else np.asarray(anchor, dtype=float)
    radius = np.linalg.norm(grid.points - anchor, axis=-1)
    mask = (radius >= 0.5 * r) & (radius <= r) & (grid.distance > 0)

    if not np.any(mask):
        raise EmptyAnnulus(f"[ERROR] no grid nodes in the half-annulus r ∈ [{0.5 * r:g}, {r:g}]")
    return mask, grid.distance


def harnack_ratio(solution, r: float, anchor=None) -> float:
    """
    max over node pairs of (u(x) d(y)) / (u(y) d(x)) in Ω ∩ (B_r \\ B_{r/2}),
    i.e. max(u/d) / min(u/d) on the half-annulus.
    """

    field = as_field(solution)
    mask, distance = _annulus_nodes(field, r, anchor)
    mask = mask & (field.values > 0)
    if not np.any(mask):
        raise EmptyAnnulus("[ERROR] u vanishes on every node of the half-annulus")

    quotient = field.values[mask] / distance[mask]
    return float(np.max(quotient) / np.min(quotient))


def annulus_ratio(first, second, r: float, anchor=None) -> float:
    """sup(u₁/u₂) / inf(u₁/u₂) on the half-annulus at scale r."""

    u1, u2 = as_field(first), as_field(second)
    if u1.grid is not u2.grid:
        raise ValueError("[ERROR] annulus_ratio compares fields on the same grid")

    mask, _ = _annulus_nodes(u1, r, anchor)
    mask = mask & (u1.values > 0) & (u2.values > 0)
    if not np.any(mask):
        raise EmptyAnnulus("[ERROR] no node of the half-annulus carries two positive values")

    quotient = u1.values[mask] / u2.values[mask]
    return float(np.max(quotient) / np.min(quotient))
