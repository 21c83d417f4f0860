# =====================================================
# Scaling transform T_ℓ[u](x) = ℓ^β u(a + ℓ(x − a))
# and self-similar limit extraction at the anchor a
# =====================================================

from dataclasses import dataclass

import numpy as np
import pandas as pd

from boundary_trace.levels import as_field
from core.errors import OutOfGrid
from kernels.field import GridField
from kernels.grid import PolarGrid
from profiles.exponents import exponents

# ---------------- CONFIG ----------------

MIN_RADIAL_NODES = 4
EDGE_SLACK = 1e-9


def _check_factor(ell: float) -> float:
    ell = float(ell)
    if not 0.0 < ell <= 1.0:
        raise ValueError(f"[ERROR] scaling factor must lie in (0, 1], got {ell}")
    return ell


def _law_exponent(solution, q: float | None) -> float:
    if q is not None:
        return float(q)
    law = getattr(solution, "law", None)
    if law is None or law.q is None:
        raise ValueError("[ERROR] pass q explicitly for fields without a power law")
    return float(law.q)


def rescale(field: GridField, ell: float, q: float, anchor=None) -> GridField:
    """
    T_ℓ[u] sampled (cubic) at the nodes whose image a + ℓ(x − a) stays in
    the source grid. HalfDisk grids keep the radii r ≥ r_min/ℓ; a Ball is
    convex, so every node qualifies.
    """

    field = as_field(field)
    ell = _check_factor(ell)
    beta = exponents(field.domain.N, q).beta
    grid = field.grid
    meta = {"rescale": ell, "beta": beta}

    if ell == 1.0:
        return field.with_values(field.values.copy(), field.grad, **meta)

    if grid.periodic:
        anchor = field.domain.singular_anchor if anchor is None else np.asarray(anchor, dtype=float)
        targets = anchor + ell * (grid.points - anchor)
        return GridField(grid, ell ** beta * field.sample(targets), meta=dict(field.meta, **meta))

    if anchor is not None and np.linalg.norm(anchor) > 0:
        raise ValueError("[ERROR] HalfDisk grids rescale about the origin only")

    keep = grid.r * ell >= grid.r_min * (1.0 - EDGE_SLACK)
    if keep.sum() < MIN_RADIAL_NODES:
        raise OutOfGrid(
            f"[ERROR] ℓ = {ell:g} leaves {int(keep.sum())} radial nodes inside the grid "
            f"(need {MIN_RADIAL_NODES})"
        )

    sub = PolarGrid(grid.domain, grid.r[keep], grid.theta, grid.grading, grid.log_spaced)
    values = ell ** beta * field.sample(ell * sub.points)
    return GridField(sub, values, meta=dict(field.meta, **meta))


# =====================================================
# SELF-SIMILAR EXTRACTION
# =====================================================

@dataclass(eq=False)
class SelfSimilarEstimate:
    phi: np.ndarray
    ells: list
    samples: np.ndarray
    history: list
    beta: float

    @property
    def profile(self) -> np.ndarray:
        return self.samples[-1]

    def distance_to(self, profile) -> float:
        """sup|estimate − ω| / sup ω on the sampled angles."""
        reference = profile.omega_at(self.phi)
        finite = np.isfinite(self.profile)
        scale = float(np.max(reference[finite]))
        return float(np.max(np.abs(self.profile[finite] - reference[finite])) / scale)

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame(self.samples.T, columns=[f"ell_{ell:.6g}" for ell in self.ells])
        frame.insert(0, "phi", self.phi)
        return frame

    def to_json(self) -> dict:
        return {
            "ells": list(self.ells),
            "beta": self.beta,
            "history": list(self.history),
            "profile_csv": self.to_frame().to_csv(index=False),
        }


def _arc_angles(field: GridField) -> np.ndarray:
    grid = field.grid
    if grid.periodic:
        return np.linspace(-0.5 * np.pi, 0.5 * np.pi, grid.n_theta // 2 + 1)
    return 0.5 * np.pi - grid.theta


def extract_self_similar(solution, ell_sequence, q: float | None = None) -> SelfSimilarEstimate:
    """
    ℓ^β u(a + ℓ(sin φ, cos φ)) on the unit half-circle about the anchor for
    every ℓ; angles falling outside a Ball are NaN.
    """

    field = as_field(solution)
    q = _law_exponent(solution, q)
    beta = exponents(field.domain.N, q).beta
    domain = field.domain

    ells = [_check_factor(ell) for ell in ell_sequence]
    if any(b >= a for a, b in zip(ells, ells[1:])):
        raise ValueError("[ERROR] ℓ-sequence must decrease strictly")

    phi = _arc_angles(field)
    direction = np.stack([np.sin(phi), np.cos(phi)], axis=-1)
    anchor = domain.singular_anchor

    samples = []
    for ell in ells:
        points = anchor + ell * direction
        row = np.full(len(phi), np.nan)
        inside = np.linalg.norm(points, axis=-1) <= domain.R * (1.0 + EDGE_SLACK)
        row[inside] = ell ** beta * field.sample(points[inside])
        samples.append(row)

    samples = np.array(samples)
    history = [float(np.nanmax(np.abs(b - a))) for a, b in zip(samples, samples[1:])]
    return SelfSimilarEstimate(phi, ells, samples, history, beta)
