# =====================================================
# Maximal solution by exhaustion
# u_δ solves the problem on Ω′_δ = {d > δ} with data P[μ]|Σ_δ;
# u_δ decreases as δ ↓ 0 and the limit is the maximal solution
# =====================================================

import numpy as np

from config.settings import SolverConfig
from core.console import info
from core.errors import MonotonicityViolation
from geometry.domain import Domain
from kernels.grid import cached_grid
from kernels.measures import BoundaryMeasure
from kernels.potentials import apply_poisson
from solver.absorption import AbsorptionLaw
from solver.dirichlet import Solution, assemble, run_fixed_point
from solver.weak_form import weak_residual

MONOTONE_SLACK = 5e-3


def solve_maximal_exhaustion(domain: Domain, law: AbsorptionLaw, mu: BoundaryMeasure, delta_sequence,
                             cfg: SolverConfig | None = None) -> Solution:
    """
    Solves on the concentric sub-balls B_{R−δ} for the decreasing δ sequence.
    Returns the solve at the smallest δ; meta carries the monotonicity
    certificate measured on the nodes of the first (smallest) sub-ball.
    """

    cfg = cfg or SolverConfig()
    cfg.validate()

    if not domain.is_ball:
        raise ValueError("[ERROR] exhaustion needs concentric level sets; use a Ball domain")

    deltas = [float(d) for d in delta_sequence]
    if not deltas or any(d <= 0 or d >= domain.delta_star for d in deltas):
        raise ValueError(f"[ERROR] exhaustion levels must lie in (0, {domain.delta_star:g})")
    if any(b >= a for a, b in zip(deltas, deltas[1:])):
        raise ValueError("[ERROR] exhaustion levels must decrease strictly")

    probe_grid = None
    probes = []
    solution = None

    for delta in deltas:
        sub_domain = Domain.ball(domain.N, domain.R - delta)
        grid = cached_grid(sub_domain, cfg.grid.n_r, cfg.grid.n_theta, None)

        lift = apply_poisson(domain, mu, grid, cfg.n_jobs)
        correction, stats = run_fixed_point(grid, law, lift, cfg)
        u = assemble(grid, lift, correction, law=str(law), source="exhaustion", delta=delta)

        if probe_grid is None:
            probe_grid = grid
        probes.append(u.sample(probe_grid.points))

        meta = dict(stats)
        meta.update({"backend": cfg.backend, "lift": "poisson", "delta": delta, "flags": []})
        solution = Solution(u, law, mu, None, lift, cfg, meta, lift)

    slack = MONOTONE_SLACK * max(float(np.max(probes[0])), 1e-300)
    gaps = [float(np.max(later - earlier)) for earlier, later in zip(probes, probes[1:])]
    if gaps and max(gaps) > slack:
        raise MonotonicityViolation(
            f"[ERROR] exhaustion iterates increase by {max(gaps):.3e} (> {slack:.3e}) as δ shrinks"
        )

    differences = [float(np.max(np.abs(later - earlier))) for earlier, later in zip(probes, probes[1:])]

    solution.meta.update({
        "deltas": deltas,
        "monotone_gaps": gaps,
        "sup_differences": differences,
        "weak_residual": weak_residual(solution),
    })
    info(f"exhaustion {law} on {domain}: {len(deltas)} levels, sup differences {differences}")
    return solution
