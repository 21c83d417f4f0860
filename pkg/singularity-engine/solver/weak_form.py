# =====================================================
# Weak-form residual against the test basis ζ_k = ξ·h_k
# ξ: discrete torsion function, h_k: harmonic polynomial modes
# =====================================================

from functools import lru_cache

import numpy as np

from kernels.field import GridField
from kernels.grid import PolarGrid
from kernels.potentials import green_operator
from solver.absorption import AbsorptionLaw
from solver.linear import torsion_function

DEFAULT_BASIS = 8
FORMULATIONS = ("fd", "kernel")


@lru_cache(maxsize=16)
def weight_basis(grid: PolarGrid, size: int = DEFAULT_BASIS) -> np.ndarray:
    """(size, n_r·n_θ) array of ζ_k = ξ·h_k, h_0 = 1, then (r/R)^k cos kθ, (r/R)^k sin kθ."""

    xi = torsion_function(grid)
    rho = (grid.r / grid.domain.R)[:, None]
    theta = grid.theta[None, :]

    modes = [np.ones(grid.shape)]
    k = 1
    while len(modes) < size:
        modes.append(rho ** k * np.cos(k * theta))
        if len(modes) < size:
            modes.append(rho ** k * np.sin(k * theta))
        k += 1

    return np.stack([(xi * h).ravel() for h in modes])


def _fd_terms(grid: PolarGrid, law: AbsorptionLaw, u, grad, lift: GridField):
    rows = grid.interior_mask.ravel()
    absorption = law(np.hypot(*grad)).ravel()
    a = -grid.apply_laplacian(u - lift.values).ravel()
    return rows, a, absorption


def _kernel_terms(grid: PolarGrid, law: AbsorptionLaw, u, grad, lift: GridField):
    rows = ~grid.on_domain_boundary.ravel()
    potential = green_operator(grid).apply(law(np.hypot(*grad)))
    return rows, np.asarray(u).ravel(), (potential - lift.values).ravel()


def green_defect(grid: PolarGrid, law: AbsorptionLaw, u, grad, lift: GridField,
                 formulation: str = "fd", basis_size: int = DEFAULT_BASIS) -> float:
    """max_k |Σ w ζ_k (A + B)| / Σ w |ζ_k| (|A| + |B|) over the formulation's rows."""

    if formulation not in FORMULATIONS:
        raise ValueError(f"[ERROR] formulation must be one of {FORMULATIONS}, got {formulation!r}")

    terms = _fd_terms if formulation == "fd" else _kernel_terms
    rows, a, b = terms(grid, law, u, grad, lift)

    zeta = weight_basis(grid, basis_size)[:, rows]
    w = grid.weights.ravel()[rows]
    a, b = a[rows], b[rows]

    defect = np.abs(zeta @ (w * (a + b)))
    scale = np.abs(zeta) @ (w * (np.abs(a) + np.abs(b)))

    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(scale > 0, defect / scale, 0.0)
    return float(np.max(ratio))


def weak_residual(solution, test_basis_size: int = DEFAULT_BASIS) -> float:
    """Green-identity defect of a solved problem in its backend's formulation."""

    formulation = "kernel" if solution.meta.get("backend") == "picard" else "fd"
    return green_defect(
        solution.grid, solution.law, solution.field.values, solution.field.gradient(),
        solution.lift, formulation, test_basis_size,
    )
