# =====================================================
# Discrete Laplace–Beltrami operator on the hemisphere
# N = 2: angle φ ∈ [−π/2, π/2]; N = 3: colatitude φ ∈ [0, π/2]
# (axisymmetric)
# =====================================================

import numpy as np

EIGEN_NODES = 2000


def hemisphere_grid(N: int, n: int) -> np.ndarray:
    if N == 2:
        return np.linspace(-0.5 * np.pi, 0.5 * np.pi, n)
    return np.linspace(0.0, 0.5 * np.pi, n)


def laplace_beltrami(N: int, phi: np.ndarray, values: np.ndarray) -> np.ndarray:
    """
    Second-order Δ′ω on interior nodes (NaN at the equator nodes).
    For N = 3 the pole row uses the limit Δ′ω(0) = 2ω″(0) with even reflection.
    """

    h = phi[1] - phi[0]
    out = np.full_like(values, np.nan, dtype=float)

    second = (values[2:] - 2.0 * values[1:-1] + values[:-2]) / h ** 2
    out[1:-1] = second

    if N == 3:
        first = (values[2:] - values[:-2]) / (2.0 * h)
        out[1:-1] += first / np.tan(phi[1:-1])
        out[0] = 4.0 * (values[1] - values[0]) / h ** 2

    return out


def eigen_check(N: int, n: int = EIGEN_NODES) -> tuple:
    """
    Apply −Δ′ to φ₁ = cos φ; return (fitted λ₁, sup |−Δ′φ₁ − (N−1)φ₁|).
    """

    if N not in (2, 3):
        raise ValueError(f"[ERROR] eigen check supports N in (2, 3), got {N}")

    phi = hemisphere_grid(N, n)
    phi1 = np.cos(phi)
    applied = -laplace_beltrami(N, phi, phi1)

    rows = np.isfinite(applied)
    fitted = float(np.dot(applied[rows], phi1[rows]) / np.dot(phi1[rows], phi1[rows]))
    deviation = float(np.max(np.abs(applied[rows] - (N - 1) * phi1[rows])))
    return fitted, deviation
