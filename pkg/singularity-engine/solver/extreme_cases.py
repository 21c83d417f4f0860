# =====================================================
# Endpoint exponents
# q = 2: Hopf–Cole, v = e^{−u} is harmonic
# q = 1: the problem is positively homogeneous in the data
# =====================================================

import numpy as np

from config.settings import SolverConfig
from core.console import info
from core.errors import DensityNotBoundedBelow
from geometry.domain import Domain
from kernels.field import GridField
from kernels.measures import BoundaryMeasure
from kernels.potentials import apply_poisson
from solver.absorption import AbsorptionLaw
from solver.dirichlet import Solution, grid_for, solve_dirichlet


def solve_hopf_cole(domain: Domain, mu: BoundaryMeasure, cfg: SolverConfig | None = None) -> Solution:
    """
    Exact solution of −Δu + |∇u|² = 0 with u = ln ρ on ∂Ω (ρ the density of μ):
    u = −ln P[1/ρ]. The generic Power(2) solver is run on the shifted datum
    ln ρ − min ln ρ ≥ 0 and compared after shifting back.
    """

    cfg = cfg or SolverConfig()
    if mu.has_atoms or not mu.has_density:
        raise DensityNotBoundedBelow("[ERROR] Hopf–Cole needs a pure density (atoms give ln = +inf)")
    if np.min(mu.density) <= 0:
        raise DensityNotBoundedBelow("[ERROR] density must be bounded away from 0 for ln ρ to be finite")

    grid = grid_for(domain, cfg)
    reciprocal = BoundaryMeasure(domain, [], 1.0 / mu.density, mu.quadrature)
    v = apply_poisson(domain, reciprocal, grid, cfg.n_jobs)

    v_r, v_t = v.gradient()
    exact = GridField(grid, -np.log(v.values), (-v_r / v.values, -v_t / v.values), {"source": "hopf_cole"})

    log_density = np.log(mu.density)
    shift = float(np.min(log_density))
    shifted = BoundaryMeasure(domain, [], log_density - shift, mu.quadrature)
    generic = solve_dirichlet(domain, AbsorptionLaw.power(2.0), shifted, cfg)
    generic_values = generic.values + shift

    generic_error = float(np.max(np.abs(generic_values - exact.values)))

    inside = grid.distance > 0
    fa4 = float(np.max(exact.values[inside] + (domain.N - 1) * np.log(grid.distance[inside])))

    meta = {
        "backend": "hopf_cole",
        "generic_error": generic_error,
        "generic_iterations": generic.meta.get("iterations"),
        "shift": shift,
        "fa4_bound": fa4,
        "converged": True,
        "flags": [],
    }
    info(f"hopf_cole on {domain}: generic Power(2) sup difference {generic_error:.2e}")
    return Solution(exact, AbsorptionLaw.power(2.0), mu, None, v, cfg, meta)


def q1_solve_and_scale(domain: Domain, z, scale: float, cfg: SolverConfig | None = None) -> tuple:
    """
    Solves with δ_z and ℓδ_z under g(s) = s; returns
    (solution for ℓδ_z, sup|u_ℓ − ℓu_1| / sup u_ℓ).
    """

    if scale <= 0:
        raise ValueError(f"[ERROR] homogeneity factor must be positive, got {scale}")

    cfg = cfg or SolverConfig()
    law = AbsorptionLaw.power(1.0)
    z = domain.singular_anchor if z is None else np.asarray(z, dtype=float)

    unit = solve_dirichlet(domain, law, BoundaryMeasure.dirac(domain, z, 1.0), cfg)
    scaled = solve_dirichlet(domain, law, BoundaryMeasure.dirac(domain, z, scale), cfg)

    peak = float(np.max(scaled.values))
    error = float(np.max(np.abs(scaled.values - scale * unit.values)) / peak) if peak > 0 else 0.0
    scaled.meta["homogeneity_error"] = error
    return scaled, error
