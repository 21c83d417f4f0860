# =====================================================
# Dirichlet problem with measure boundary data
# −Δu + g(|∇u|) = 0 in Ω, u = μ on ∂Ω
#
# Both backends iterate on the correction w = u − L for a lift L
# (P[μ_h], its discrete harmonic extension, or G[ν]) and keep w in
# the sandwich [−L, 0]:
#   fd:     −Δ_h w_new = −g(|∇(w + L)|),  w_new = 0 on Dirichlet nodes
#   picard: w_new = −G[g(|∇(w + L)|)]
# =====================================================

import json
from dataclasses import dataclass, field

import numpy as np

from config.settings import SolverConfig
from core.console import info, warn
from core.errors import NonConvergence, SupercriticalData
from geometry.domain import Domain
from kernels.field import GridField
from kernels.grid import PolarGrid, cached_grid
from kernels.measures import BoundaryMeasure, InteriorMeasure
from kernels.potentials import apply_poisson, green_operator
from solver.absorption import AbsorptionLaw
from solver.linear import dirichlet_solver
from solver.newton import newton_polish
from solver.weak_form import green_defect

# ---------------- CONFIG ----------------

UPDATE_FLOOR = 1e-300
SUPERCRITICAL_FLAG = "SubcriticalityViolated"


@dataclass(eq=False)
class Solution:
    field: GridField
    law: AbsorptionLaw
    boundary_data: BoundaryMeasure | None
    interior_data: InteriorMeasure | None
    lift: GridField
    config: SolverConfig
    meta: dict = field(default_factory=dict)
    poisson: GridField | None = None

    @classmethod
    def from_field(cls, field: GridField, law: AbsorptionLaw, **meta) -> "Solution":
        """Wraps an externally built field (e.g. a separable profile) for the trace and lab tools."""
        merged = {"backend": "external", "converged": True, "flags": []}
        merged.update(meta)
        return cls(field, law, None, None, field, SolverConfig(), merged)

    @property
    def grid(self) -> PolarGrid:
        return self.field.grid

    @property
    def domain(self) -> Domain:
        return self.field.domain

    @property
    def values(self) -> np.ndarray:
        return self.field.values

    @property
    def converged(self) -> bool:
        return bool(self.meta.get("converged", False))

    def summary(self) -> dict:
        keys = ("backend", "lift", "iterations", "update", "weak_residual", "converged", "flags", "stop")
        out = {k: self.meta[k] for k in keys if k in self.meta}
        out["law"] = self.law.to_json()
        out["domain"] = self.domain.to_json()
        out["max_u"] = float(np.max(self.values))
        return out

    def save(self, csv_path: str, json_path: str):
        self.field.to_csv(csv_path)
        payload = self.summary()
        payload["config"] = self.config.to_json()
        if self.boundary_data is not None:
            payload["boundary_data"] = self.boundary_data.to_json()
        with open(json_path, "w", encoding="utf-8") as f:
            json.dump(payload, f, indent=4)


def grid_for(domain: Domain, cfg: SolverConfig) -> PolarGrid:
    return cached_grid(domain, cfg.grid.n_r, cfg.grid.n_theta, cfg.grid.grading)


def admissibility_flags(domain: Domain, law: AbsorptionLaw, has_atoms: bool, cfg: SolverConfig,
                        interior: bool = False) -> list:
    """SupercriticalData for atoms under a supercritical law unless the config allows it."""

    if not has_atoms:
        return []

    subcritical = law.subcritical_interior(domain.N) if interior else law.subcritical_boundary(domain.N)
    if subcritical:
        return []

    if not cfg.allow_supercritical:
        where = "interior" if interior else "boundary"
        raise SupercriticalData(
            f"[ERROR] {law} is supercritical for {where} atoms in dimension {domain.N}; "
            "set allow_supercritical to run anyway"
        )
    warn(f"{law} with atomic data is supercritical; the run is flagged {SUPERCRITICAL_FLAG}")
    return [SUPERCRITICAL_FLAG]


# =====================================================
# FIXED-POINT ITERATION
# =====================================================

def run_fixed_point(grid: PolarGrid, law: AbsorptionLaw, lift: GridField, cfg: SolverConfig,
                    start: np.ndarray | None = None) -> tuple:
    """
    Damped Picard iteration on the correction w = u − L.
    Returns (w, stats); raises NonConvergence in strict mode.
    """

    upper = lift.values
    lift_grad = lift.gradient()
    formulation = "kernel" if cfg.backend == "picard" else "fd"

    if cfg.backend == "fd":
        linear = dirichlet_solver(grid)

        def target_map(absorption):
            return linear.solve(-absorption)
    else:
        operator = green_operator(grid)

        def target_map(absorption):
            return -operator.apply(absorption)

    def gradient(w):
        g_r, g_t = grid.gradient(w)
        return g_r + lift_grad[0], g_t + lift_grad[1]

    w = np.zeros(grid.shape) if start is None else np.clip(start, -upper, 0.0)
    theta = cfg.theta
    previous = np.inf
    history = []
    weak = float("nan")
    stop = "max_iter"

    for iteration in range(1, cfg.max_iter + 1):
        absorption = law(np.hypot(*gradient(w)))
        target = np.clip(target_map(absorption), -upper, 0.0)

        step = theta * (target - w)
        w = w + step

        update = float(np.max(np.abs(step)) / max(np.max(np.abs(w + upper)), UPDATE_FLOOR))
        history.append(update)

        if update > previous:
            theta = max(0.5 * theta, cfg.theta_min)
        previous = update

        if update < cfg.tol_update:
            stop = "update"
            break

        if iteration % cfg.weak_check_every == 0:
            weak = green_defect(grid, law, w + upper, gradient(w), lift, formulation)
            if weak < cfg.tol_weak:
                stop = "weak"
                break

    converged = stop != "max_iter"
    if not converged:
        message = (
            f"fixed point stalled after {cfg.max_iter} iterations "
            f"(update {history[-1]:.2e}, weak residual {weak:.2e})"
        )
        if cfg.strict:
            raise NonConvergence(f"[ERROR] {message}")
        warn(message)

    stats = {
        "iterations": len(history),
        "update": history[-1] if history else 0.0,
        "theta": theta,
        "stop": stop,
        "converged": converged,
        "history": history,
    }
    return w, stats


def assemble(grid: PolarGrid, lift: GridField, correction: np.ndarray, **meta) -> GridField:
    g_r, g_t = grid.gradient(correction)
    lg_r, lg_t = lift.gradient()
    return GridField(grid, correction + lift.values, (g_r + lg_r, g_t + lg_t), dict(meta))


def discrete_lift(grid: PolarGrid, poisson: GridField) -> GridField:
    """Discrete harmonic extension of the Dirichlet-node values of P[μ_h]."""
    values = dirichlet_solver(grid).harmonic_extension(poisson.values)
    return GridField(grid, values, meta={"operator": "discrete_harmonic"})


# =====================================================
# ENTRY POINT
# =====================================================

def solve_dirichlet(domain: Domain, law: AbsorptionLaw, mu: BoundaryMeasure, cfg: SolverConfig | None = None,
                    warm_start: GridField | None = None) -> Solution:
    """
    Solution of −Δu + g(|∇u|) = 0 with boundary measure μ.
    Atoms are mollified at grid scale (except the HalfDisk anchor atom, which
    the grid resolves); the result satisfies 0 ≤ u ≤ L nodewise.
    """

    cfg = cfg or SolverConfig()
    cfg.validate()
    grid = grid_for(domain, cfg)
    flags = admissibility_flags(domain, law, mu.has_atoms, cfg)

    mu_h = mu.mollified(grid, cfg.mollifier_cells)
    poisson = apply_poisson(domain, mu_h, grid, cfg.n_jobs)

    if cfg.backend == "fd" and cfg.lift == "boundary":
        lift = discrete_lift(grid, poisson)
    else:
        lift = poisson

    trivial = mu.is_zero or law.is_zero
    if trivial:
        correction = np.zeros(grid.shape)
        stats = {"iterations": 0, "update": 0.0, "theta": cfg.theta, "stop": "trivial",
                 "converged": True, "history": []}
    else:
        start = None if warm_start is None else warm_start.values - lift.values
        correction, stats = run_fixed_point(grid, law, lift, cfg, start)

    if cfg.newton and cfg.backend == "fd" and not trivial:
        correction, stats["newton"] = newton_polish(grid, law, lift, correction)

    u = assemble(grid, lift, correction, law=str(law), source="dirichlet")
    meta = dict(stats)
    meta.update({
        "backend": cfg.backend,
        "lift": "poisson" if cfg.backend == "picard" else cfg.lift,
        "flags": flags,
        "mollified": len(mu_h.atoms) != len(mu.atoms),
    })

    solution = Solution(u, law, mu, None, lift, cfg, meta, poisson)
    formulation = "kernel" if cfg.backend == "picard" else "fd"
    solution.meta["weak_residual"] = green_defect(
        grid, law, u.values, u.gradient(), lift, formulation
    )

    info(
        f"solve_dirichlet {law} on {domain} {grid.n_r}x{grid.n_theta} [{cfg.backend}]: "
        f"{stats['iterations']} iterations, stop={stats['stop']}, "
        f"weak residual {solution.meta['weak_residual']:.2e}"
    )
    return solution
