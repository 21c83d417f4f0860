# =====================================================
# Structured polar grids over canonical planar domains
# Ball: shifted uniform polar grid about the centre
# HalfDisk: log-polar grid graded toward the anchor
# =====================================================

from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np
from scipy import sparse

from config.settings import DEFAULT_GRADING, MIN_NODES
from core.errors import GridValidationError
from geometry.domain import Domain, boundary_distance


@dataclass(frozen=True, eq=False)
class PolarGrid:
    domain: Domain
    r: np.ndarray
    theta: np.ndarray
    grading: float = 1.0
    log_spaced: bool = False

    # ---------------- SHAPE ----------------

    @property
    def n_r(self) -> int:
        return len(self.r)

    @property
    def n_theta(self) -> int:
        return len(self.theta)

    @property
    def shape(self) -> tuple:
        return (self.n_r, self.n_theta)

    @property
    def size(self) -> int:
        return self.n_r * self.n_theta

    @property
    def periodic(self) -> bool:
        return self.domain.is_ball

    @property
    def dtheta(self) -> float:
        return float(self.theta[1] - self.theta[0])

    @property
    def ds(self) -> float:
        return float(np.log(self.r[1] / self.r[0]))

    @property
    def r_min(self) -> float:
        return float(self.r[0])

    @property
    def radial_coordinate(self) -> np.ndarray:
        """Coordinate used along the radial axis: ln r on log-polar grids, r otherwise."""
        return np.log(self.r) if self.log_spaced else self.r

    def describe(self) -> dict:
        return {
            "domain": self.domain.to_json(),
            "n_r": self.n_r,
            "n_theta": self.n_theta,
            "grading": self.grading,
            "log_spaced": self.log_spaced,
        }

    # ---------------- NODES ----------------

    @cached_property
    def points(self) -> np.ndarray:
        rr, tt = np.meshgrid(self.r, self.theta, indexing="ij")
        return np.stack([rr * np.cos(tt), rr * np.sin(tt)], axis=-1)

    @cached_property
    def boundary_mask(self) -> np.ndarray:
        """Dirichlet nodes of the discrete problem."""
        mask = np.zeros(self.shape, dtype=bool)
        mask[-1, :] = True
        if not self.periodic:
            mask[0, :] = True
            mask[:, 0] = True
            mask[:, -1] = True
        return mask

    @property
    def interior_mask(self) -> np.ndarray:
        return ~self.boundary_mask

    @cached_property
    def distance(self) -> np.ndarray:
        return boundary_distance(self.domain, self.points)

    @cached_property
    def on_domain_boundary(self) -> np.ndarray:
        """Nodes lying on ∂Ω itself (the HalfDisk inner semicircle is not part of ∂Ω)."""
        mask = np.zeros(self.shape, dtype=bool)
        mask[-1, :] = True
        if not self.periodic:
            mask[:, 0] = True
            mask[:, -1] = True
        return mask

    @cached_property
    def weights(self) -> np.ndarray:
        r = self.r

        if self.log_spaced:
            radial = r ** 2 * self.ds
            radial[0] *= 0.5
            radial[-1] *= 0.5
        else:
            faces = 0.5 * (r[:-1] + r[1:])
            lower = np.concatenate([[0.0 if self.periodic else r[0]], faces])
            upper = np.concatenate([faces, [r[-1]]])
            radial = 0.5 * (upper ** 2 - lower ** 2)

        angular = np.full(self.n_theta, self.dtheta)
        if not self.periodic:
            angular[0] *= 0.5
            angular[-1] *= 0.5

        return np.outer(radial, angular)

    # ---------------- OPERATORS ----------------

    @cached_property
    def laplacian(self) -> sparse.csr_matrix:
        return _laplacian_operator(self)

    @cached_property
    def gradient_operators(self) -> tuple:
        """(D_r, D_θ) returning u_r and u_θ / r at every node."""
        return _gradient_operators(self)

    def gradient(self, values: np.ndarray) -> tuple:
        d_r, d_t = self.gradient_operators
        flat = np.asarray(values, dtype=float).ravel()
        return (d_r @ flat).reshape(self.shape), (d_t @ flat).reshape(self.shape)

    def apply_laplacian(self, values: np.ndarray) -> np.ndarray:
        return (self.laplacian @ np.asarray(values, dtype=float).ravel()).reshape(self.shape)

    def polar_to_cartesian(self, g_r: np.ndarray, g_t: np.ndarray) -> np.ndarray:
        cos_t, sin_t = np.cos(self.theta)[None, :], np.sin(self.theta)[None, :]
        return np.stack([g_r * cos_t - g_t * sin_t, g_r * sin_t + g_t * cos_t], axis=-1)

    def cartesian_to_polar(self, grad: np.ndarray) -> tuple:
        cos_t, sin_t = np.cos(self.theta)[None, :], np.sin(self.theta)[None, :]
        g_r = grad[..., 0] * cos_t + grad[..., 1] * sin_t
        g_t = -grad[..., 0] * sin_t + grad[..., 1] * cos_t
        return g_r, g_t


# =====================================================
# CONSTRUCTION
# =====================================================

def build_grid(domain: Domain, n_r: int, n_theta: int, grading: float | None = None) -> PolarGrid:
    if domain.N != 2:
        raise GridValidationError("[ERROR] polar grids are planar; 3D solves are not supported")
    if n_r < MIN_NODES or n_theta < MIN_NODES:
        raise GridValidationError(
            f"[ERROR] grid needs at least {MIN_NODES}x{MIN_NODES} nodes, got {n_r}x{n_theta}"
        )

    R = domain.R

    if domain.is_ball:
        if grading not in (None, 1, 1.0):
            raise GridValidationError("[ERROR] Ball grids are uniform (grading = 1)")
        if n_theta % 4:
            raise GridValidationError("[ERROR] Ball grids need n_theta divisible by 4")
        h = R / (n_r - 0.5)
        r = (np.arange(n_r) + 0.5) * h
        r[-1] = R
        theta = 2.0 * np.pi * np.arange(n_theta) / n_theta
        return PolarGrid(domain, r, theta, 1.0, False)

    rho = DEFAULT_GRADING if grading is None else float(grading)
    if not 0.0 < rho <= 1.0:
        raise GridValidationError(f"[ERROR] grading ratio must lie in (0, 1], got {rho}")

    if rho < 1.0:
        r = R * rho ** np.arange(n_r - 1, -1, -1, dtype=float)
    else:
        r = R * np.arange(1, n_r + 1, dtype=float) / n_r
    r[-1] = R

    theta = np.linspace(0.0, np.pi, n_theta)
    return PolarGrid(domain, r, theta, rho, rho < 1.0)


@lru_cache(maxsize=32)
def cached_grid(domain: Domain, n_r: int, n_theta: int, grading: float | None = None) -> PolarGrid:
    """Shared grid instance per parameter set (operator caches key on grid identity)."""
    return build_grid(domain, n_r, n_theta, grading)


# =====================================================
# FINITE-DIFFERENCE STENCILS
# =====================================================

def _central_weights(h1, h2):
    return (
        -h2 / (h1 * (h1 + h2)),
        (h2 - h1) / (h1 * h2),
        h1 / (h2 * (h1 + h2)),
    )


def _forward_weights(h1, h2):
    return (
        -(2.0 * h1 + h2) / (h1 * (h1 + h2)),
        (h1 + h2) / (h1 * h2),
        -h1 / (h2 * (h1 + h2)),
    )


def _backward_weights(h1, h2):
    return (
        h2 / (h1 * (h1 + h2)),
        -(h1 + h2) / (h1 * h2),
        (2.0 * h2 + h1) / (h2 * (h1 + h2)),
    )


class _Assembler:
    def __init__(self, grid: PolarGrid):
        self.grid = grid
        self.rows, self.cols, self.vals = [], [], []

    def add(self, i, j, ni, nj, w):
        n_t = self.grid.n_theta
        i, j, ni, nj, w = np.broadcast_arrays(i, j, ni, nj, w)
        self.rows.append((i * n_t + j).ravel())
        self.cols.append((ni * n_t + nj).ravel())
        self.vals.append(np.asarray(w, dtype=float).ravel())

    def matrix(self) -> sparse.csr_matrix:
        size = self.grid.size
        if not self.rows:
            return sparse.csr_matrix((size, size))
        return sparse.coo_matrix(
            (np.concatenate(self.vals), (np.concatenate(self.rows), np.concatenate(self.cols))),
            shape=(size, size),
        ).tocsr()


def _laplacian_operator(grid: PolarGrid) -> sparse.csr_matrix:
    """Five-point polar Laplacian on interior rows; Dirichlet rows are left empty."""

    asm = _Assembler(grid)
    I, J = np.nonzero(grid.interior_mask)
    r = grid.r
    n_t = grid.n_theta
    ri = r[I]

    if grid.periodic:
        j_up, j_dn = (J + 1) % n_t, (J - 1) % n_t
    else:
        j_up, j_dn = J + 1, J - 1

    if grid.log_spaced:
        c_r = 1.0 / (ri ** 2 * grid.ds ** 2)
        c_t = 1.0 / (ri ** 2 * grid.dtheta ** 2)
        asm.add(I, J, I + 1, J, c_r)
        asm.add(I, J, I - 1, J, c_r)
        asm.add(I, J, I, J, -2.0 * c_r - 2.0 * c_t)
    else:
        f_hi = 0.5 * (ri + r[I + 1])
        h_hi = r[I + 1] - ri
        first = I == 0
        i_lo = np.where(first, 0, I - 1)
        f_lo = np.where(first, 0.0, 0.5 * (ri + r[i_lo]))
        h_lo = np.where(first, 1.0, ri - r[i_lo])
        denom = ri * (f_hi - f_lo)
        c_hi = f_hi / (h_hi * denom)
        c_lo = f_lo / (h_lo * denom)
        c_t = 1.0 / (ri ** 2 * grid.dtheta ** 2)

        asm.add(I, J, I + 1, J, c_hi)
        keep = ~first
        asm.add(I[keep], J[keep], i_lo[keep], J[keep], c_lo[keep])
        asm.add(I, J, I, J, -c_hi - c_lo - 2.0 * c_t)

    asm.add(I, J, I, j_up, c_t)
    asm.add(I, J, I, j_dn, c_t)
    return asm.matrix()


def _radial_derivative(grid: PolarGrid) -> sparse.csr_matrix:
    asm = _Assembler(grid)
    n_r, n_t = grid.shape
    x = grid.radial_coordinate
    J = np.arange(n_t)
    scale = 1.0 / grid.r if grid.log_spaced else np.ones(n_r)

    # interior rows
    for i in range(1, n_r - 1):
        w = _central_weights(x[i] - x[i - 1], x[i + 1] - x[i])
        for offset, wk in zip((-1, 0, 1), w):
            asm.add(i, J, i + offset, J, wk * scale[i])

    # outer rim: one-sided
    i = n_r - 1
    w = _backward_weights(x[i - 1] - x[i - 2], x[i] - x[i - 1])
    for offset, wk in zip((-2, -1, 0), w):
        asm.add(i, J, i + offset, J, wk * scale[i])

    if grid.periodic:
        # first ring: difference across the centre
        r0, r1 = grid.r[0], grid.r[1]
        w = _central_weights(2.0 * r0, r1 - r0)
        opposite = (J + n_t // 2) % n_t
        asm.add(0, J, 0, opposite, w[0])
        asm.add(0, J, 0, J, w[1])
        asm.add(0, J, 1, J, w[2])
    else:
        w = _forward_weights(x[1] - x[0], x[2] - x[1])
        for offset, wk in zip((0, 1, 2), w):
            asm.add(0, J, offset, J, wk * scale[0])

    return asm.matrix()


def _angular_derivative(grid: PolarGrid) -> sparse.csr_matrix:
    asm = _Assembler(grid)
    n_r, n_t = grid.shape
    k = grid.dtheta
    I = np.arange(n_r)[:, None]
    inv_r = (1.0 / grid.r)[:, None]

    if grid.periodic:
        J = np.arange(n_t)[None, :]
        asm.add(I, J, I, (J + 1) % n_t, inv_r / (2.0 * k))
        asm.add(I, J, I, (J - 1) % n_t, -inv_r / (2.0 * k))
        return asm.matrix()

    J = np.arange(1, n_t - 1)[None, :]
    asm.add(I, J, I, J + 1, inv_r / (2.0 * k))
    asm.add(I, J, I, J - 1, -inv_r / (2.0 * k))

    for jj, weights, offsets in (
        (0, _forward_weights(k, k), (0, 1, 2)),
        (n_t - 1, _backward_weights(k, k), (-2, -1, 0)),
    ):
        for offset, wk in zip(offsets, weights):
            asm.add(I, jj, I, jj + offset, inv_r * wk)

    return asm.matrix()


def _gradient_operators(grid: PolarGrid) -> tuple:
    return _radial_derivative(grid), _angular_derivative(grid)
