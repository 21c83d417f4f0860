# =====================================================
# Interior measure data with zero boundary values
# −Δu + g(|∇u|) = ν in Ω, u = 0 on ∂Ω; 0 ≤ u ≤ G[ν]
# =====================================================

import numpy as np

from config.settings import SolverConfig
from core.console import info
from geometry.domain import Domain
from kernels.field import GridField
from kernels.measures import InteriorMeasure
from kernels.potentials import apply_green, green_atom_field
from solver.absorption import AbsorptionLaw
from solver.dirichlet import Solution, admissibility_flags, assemble, grid_for, run_fixed_point
from solver.weak_form import weak_residual


def green_lift(domain: Domain, nu: InteriorMeasure, grid) -> GridField:
    """G[ν] on the grid: exact kernel with analytic gradient for atoms, quadrature for the density."""

    values = np.zeros(grid.shape)
    g_r = np.zeros(grid.shape)
    g_t = np.zeros(grid.shape)

    for point, mass in nu.atoms:
        atom = green_atom_field(domain, grid, point, mass)
        values += atom.values
        g_r += atom.grad[0]
        g_t += atom.grad[1]

    if nu.density is not None:
        smooth = apply_green(domain, nu.density)
        d_r, d_t = smooth.gradient()
        values += smooth.values
        g_r += d_r
        g_t += d_t

    return GridField(grid, values, (g_r, g_t), {"operator": "green", "mass": nu.total_mass})


def solve_interior(domain: Domain, law: AbsorptionLaw, nu: InteriorMeasure, cfg: SolverConfig | None = None) -> Solution:
    cfg = cfg or SolverConfig()
    cfg.validate()
    grid = grid_for(domain, cfg)
    flags = admissibility_flags(domain, law, nu.has_atoms, cfg, interior=True)

    if nu.density is not None and nu.density.grid is not grid:
        raise ValueError("[ERROR] the interior density must live on the solver grid")

    lift = green_lift(domain, nu, grid)
    if nu.is_zero:
        correction = np.zeros(grid.shape)
        stats = {"iterations": 0, "update": 0.0, "stop": "trivial", "converged": True, "history": []}
    else:
        correction, stats = run_fixed_point(grid, law, lift, cfg)

    u = assemble(grid, lift, correction, law=str(law), source="interior")
    meta = dict(stats)
    meta.update({"backend": cfg.backend, "lift": "green", "flags": flags})

    solution = Solution(u, law, None, nu, lift, cfg, meta)
    solution.meta["weak_residual"] = weak_residual(solution)

    info(
        f"solve_interior {law} on {domain}: {stats['iterations']} iterations, "
        f"weak residual {solution.meta['weak_residual']:.2e}"
    )
    return solution
