# =====================================================
# Newton polish for the FD backend
# g_ε(s) = g(√(ε² + s²)) − g(ε), ε-continuation 1e-2 → 1e-8
# =====================================================

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import splu

from kernels.field import GridField
from kernels.grid import PolarGrid
from solver.absorption import AbsorptionLaw

EPSILONS = tuple(10.0 ** -k for k in range(2, 9))
STEPS_PER_EPSILON = 4
STEP_TOL = 1e-12


def _gradient(grid: PolarGrid, w: np.ndarray, lift: GridField) -> tuple:
    g_r, g_t = grid.gradient(w)
    l_r, l_t = lift.gradient()
    return (g_r + l_r).ravel(), (g_t + l_t).ravel()


def _residual(grid, law, w, lift, interior, eps=0.0) -> np.ndarray:
    g_r, g_t = _gradient(grid, w, lift)
    s = np.hypot(g_r, g_t)
    absorption = law(np.sqrt(eps ** 2 + s ** 2)) - law(eps) if eps > 0 else law(s)
    return (-(grid.laplacian @ w.ravel()) + absorption)[interior]


def newton_polish(grid: PolarGrid, law: AbsorptionLaw, lift: GridField, correction: np.ndarray) -> tuple:
    """
    Newton steps on −Δ_h w + g_ε(|∇(w + L)|) = 0 from the Picard correction.
    The polished correction is returned only when it lowers the sup residual.
    """

    interior = np.nonzero(grid.interior_mask.ravel())[0]
    d_r, d_t = grid.gradient_operators
    neg_lap = -grid.laplacian
    upper = lift.values.ravel()

    before = float(np.max(np.abs(_residual(grid, law, correction, lift, interior))))
    w = correction.ravel().copy()
    steps = 0

    for eps in EPSILONS:
        for _ in range(STEPS_PER_EPSILON):
            g_r, g_t = _gradient(grid, w.reshape(grid.shape), lift)
            s_eps = np.sqrt(eps ** 2 + g_r ** 2 + g_t ** 2)
            coef = law.derivative(s_eps) / s_eps

            jac = neg_lap + sparse.diags(coef * g_r) @ d_r + sparse.diags(coef * g_t) @ d_t
            jac = sparse.csc_matrix(jac.tocsr()[interior][:, interior])

            rhs = _residual(grid, law, w.reshape(grid.shape), lift, interior, eps)
            delta = splu(jac).solve(-rhs)

            w[interior] += delta
            w = np.clip(w, -upper, 0.0)
            steps += 1

            if np.max(np.abs(delta)) <= STEP_TOL * max(1.0, np.max(np.abs(w))):
                break

    polished = w.reshape(grid.shape)
    after = float(np.max(np.abs(_residual(grid, law, polished, lift, interior))))

    report = {"residual_before": before, "residual_after": after, "steps": steps, "improved": after < before}
    if after < before:
        return polished, report
    return correction, report
