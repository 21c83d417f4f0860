# =====================================================
# Separable singular solution u_s(x) = |x|^{−β} ω_s(σ(x))
# in the upper half-space, anchored at the origin
# =====================================================

import numpy as np

from core.errors import OriginEvaluation
from kernels.field import GridField
from kernels.grid import PolarGrid
from profiles.shooting import Profile

ORIGIN_TOL = 1e-14


def _angle(profile: Profile, x: np.ndarray) -> np.ndarray:
    """Angle from the pole axis e_N (signed for N = 2, colatitude for N = 3)."""
    if profile.N == 2:
        return np.arctan2(x[..., 0], x[..., 1])
    return np.arccos(np.clip(x[..., 2] / np.linalg.norm(x, axis=-1), -1.0, 1.0))


def separable_solution(profile: Profile, x):
    x = np.asarray(x, dtype=float)
    radius = np.linalg.norm(x, axis=-1)

    if np.any(radius < ORIGIN_TOL):
        raise OriginEvaluation("[ERROR] the separable solution is singular at the origin")
    if np.any(x[..., -1] < 0):
        raise ValueError("[ERROR] the separable solution lives in the upper half-space x_N >= 0")

    value = radius ** (-profile.beta) * profile.omega_at(_angle(profile, x))
    return float(value) if np.ndim(value) == 0 else value


def separable_field(profile: Profile, grid: PolarGrid, scale: float = 1.0) -> GridField:
    """
    u_s sampled on a HalfDisk grid centred at the anchor, with the analytic
    gradient (u_r, u_θ/r). `scale` multiplies the whole field.
    """

    if grid.periodic or profile.N != 2:
        raise ValueError("[ERROR] separable fields live on planar HalfDisk grids")

    r = grid.r[:, None]
    phi = 0.5 * np.pi - grid.theta[None, :]
    beta = profile.beta

    omega = profile.omega_at(phi)
    d_omega = profile.omega_prime_at(phi)

    values = scale * r ** (-beta) * omega
    g_r = -scale * beta * r ** (-beta - 1.0) * omega
    # ∂_θ = −∂_φ
    g_t = -scale * r ** (-beta - 1.0) * d_omega

    meta = {"source": "separable", "q": profile.q, "a": profile.a, "scale": scale}
    return GridField(grid, values, (g_r, g_t), meta)
