# =====================================================
# Green and Poisson kernels of the canonical domains
# and the integral operators P[μ], G[f] on polar grids
# =====================================================

import weakref

import numpy as np
from joblib import Parallel, delayed

from config.settings import DENSE_LIMIT, N_JOBS
from core.errors import CoincidentPoints, NonIntegrableInput
from geometry.domain import Domain, boundary_distance, project_to_boundary, unit_sphere_area
from kernels.field import GridField
from kernels.grid import PolarGrid
from kernels.measures import BoundaryMeasure

# ---------------- CONFIG ----------------

COINCIDENCE_TOL = 1e-14
TARGET_CHUNK = 256
FLAT_TOL = 1e-12


def _reflect(x: np.ndarray) -> np.ndarray:
    mirrored = np.array(x, dtype=float, copy=True)
    mirrored[..., -1] *= -1.0
    return mirrored


def _dot(a, b):
    return np.sum(a * b, axis=-1)


def _image_term(x, y, R):
    """A(x, y) = |x|²|y|²/R² − 2x·y + R² (= |x − y|² when |y| = R)."""
    return _dot(x, x) * _dot(y, y) / R ** 2 - 2.0 * _dot(x, y) + R ** 2


# =====================================================
# GREEN KERNEL
# =====================================================

def _ball_green(N, R, x, y):
    diff2 = _dot(x - y, x - y)
    image = _image_term(x, y, R)
    if N == 2:
        return np.log(image / diff2) / (4.0 * np.pi)
    return (1.0 / np.sqrt(diff2) - 1.0 / np.sqrt(image)) / (4.0 * np.pi)


def _ball_green_gradient(N, R, x, y):
    diff = x - y
    diff2 = _dot(diff, diff)[..., None]
    image = _image_term(x, y, R)[..., None]
    d_image = 2.0 * x * _dot(y, y)[..., None] / R ** 2 - 2.0 * y
    if N == 2:
        return (d_image / image - 2.0 * diff / diff2) / (4.0 * np.pi)
    return (-diff * diff2 ** -1.5 + 0.5 * d_image * image ** -1.5) / (4.0 * np.pi)


def _green(domain: Domain, x, y):
    g = _ball_green(domain.N, domain.R, x, y)
    if not domain.is_ball:
        g = g - _ball_green(domain.N, domain.R, _reflect(x), y)
    return g


def _green_gradient(domain: Domain, x, y):
    g = _ball_green_gradient(domain.N, domain.R, x, y)
    if not domain.is_ball:
        g = g - _reflect(_ball_green_gradient(domain.N, domain.R, _reflect(x), y))
    return g


def green_kernel(domain: Domain, x, y):
    """G^Ω(x, y) for −Δ with zero Dirichlet data (image-point formulas)."""

    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    boundary_distance(domain, x)
    boundary_distance(domain, y)

    if np.any(np.linalg.norm(x - y, axis=-1) < COINCIDENCE_TOL):
        raise CoincidentPoints("[ERROR] Green kernel evaluated at coincident points")

    value = _green(domain, x, y)
    return float(value) if np.ndim(value) == 0 else value


def green_gradient(domain: Domain, x, y):
    """∇_x G^Ω(x, y)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(np.linalg.norm(x - y, axis=-1) < COINCIDENCE_TOL):
        raise CoincidentPoints("[ERROR] Green gradient evaluated at coincident points")
    return _green_gradient(domain, x, y)


def regular_part(domain: Domain, x):
    """H(x, x) where G(x, y) = Φ(x − y) + H(x, y), planar domains."""

    x = np.asarray(x, dtype=float)
    image = _image_term(x, x, domain.R)
    h = np.log(image) / (4.0 * np.pi)
    if not domain.is_ball:
        h = h - _ball_green(domain.N, domain.R, _reflect(x), x)
    return h


# =====================================================
# POISSON KERNEL
# =====================================================

def _ball_poisson(N, R, x, sigma):
    diff = x - sigma
    return (R ** 2 - _dot(x, x)) / (unit_sphere_area(N) * R * _dot(diff, diff) ** (N / 2.0))


def _ball_poisson_gradient(N, R, x, sigma):
    diff = x - sigma
    dist2 = _dot(diff, diff)[..., None]
    num = (R ** 2 - _dot(x, x))[..., None]
    c = unit_sphere_area(N) * R
    return -2.0 * x / (c * dist2 ** (N / 2.0)) - N * num * diff / (c * dist2 ** (N / 2.0 + 1.0))


def _flat_poisson(N, R, x, sigma):
    diff = x - sigma
    image = _image_term(x, sigma, R)
    return 2.0 * x[..., -1] / unit_sphere_area(N) * (
        _dot(diff, diff) ** (-N / 2.0) - image ** (-N / 2.0)
    )


def _flat_poisson_gradient(N, R, x, sigma):
    diff = x - sigma
    dist2 = _dot(diff, diff)[..., None]
    image = _image_term(x, sigma, R)[..., None]
    d_image = 2.0 * x * _dot(sigma, sigma)[..., None] / R ** 2 - 2.0 * sigma
    c = 2.0 / unit_sphere_area(N)
    bracket = dist2 ** (-N / 2.0) - image ** (-N / 2.0)
    e_n = np.zeros(x.shape[-1])
    e_n[-1] = 1.0
    d_bracket = -N * diff * dist2 ** (-N / 2.0 - 1.0) + 0.5 * N * d_image * image ** (-N / 2.0 - 1.0)
    return c * (e_n * bracket + x[..., -1:] * d_bracket)


def _poisson(domain: Domain, x, sigma):
    N, R = domain.N, domain.R
    if domain.is_ball:
        return _ball_poisson(N, R, x, sigma)

    with np.errstate(divide="ignore", invalid="ignore"):
        arc = _ball_poisson(N, R, x, sigma) - _ball_poisson(N, R, _reflect(x), sigma)
        flat = _flat_poisson(N, R, x, sigma)
    on_flat = np.abs(np.asarray(sigma)[..., -1]) <= FLAT_TOL * R
    return np.where(on_flat, flat, arc)


def _poisson_gradient(domain: Domain, x, sigma):
    N, R = domain.N, domain.R
    if domain.is_ball:
        return _ball_poisson_gradient(N, R, x, sigma)

    with np.errstate(divide="ignore", invalid="ignore"):
        arc = _ball_poisson_gradient(N, R, x, sigma) - _reflect(
            _ball_poisson_gradient(N, R, _reflect(x), sigma)
        )
        flat = _flat_poisson_gradient(N, R, x, sigma)
    on_flat = np.abs(np.asarray(sigma)[..., -1:]) <= FLAT_TOL * R
    return np.where(on_flat, flat, arc)


def poisson_kernel(domain: Domain, x, sigma):
    """P^Ω(x, σ) = −∂G/∂n_σ for x ∈ Ω, σ ∈ ∂Ω."""

    x = np.asarray(x, dtype=float)
    sigma = np.asarray(sigma, dtype=float)
    boundary_distance(domain, x)

    if np.any(np.linalg.norm(x - sigma, axis=-1) < COINCIDENCE_TOL):
        raise CoincidentPoints("[ERROR] Poisson kernel evaluated at its pole")

    value = _poisson(domain, x, sigma)
    return float(value) if np.ndim(value) == 0 else value


def poisson_kernel_gradient(domain: Domain, x, sigma):
    x = np.asarray(x, dtype=float)
    sigma = np.asarray(sigma, dtype=float)
    return _poisson_gradient(domain, x, sigma)


# =====================================================
# P[μ] ON A GRID
# =====================================================

def _density_chunk(domain, mu: BoundaryMeasure, targets: np.ndarray):
    quad = mu.quadrature
    nodes, weights, rho = quad.boundary_points, quad.weights, mu.density

    _, sigma_x, _ = project_to_boundary(domain, targets)
    rho_x = mu.density_at(sigma_x)

    excess = (rho[None, :] - rho_x[:, None]) * weights[None, :]
    kernel = _poisson(domain, targets[:, None, :], nodes[None, :, :])
    kernel_grad = _poisson_gradient(domain, targets[:, None, :], nodes[None, :, :])

    values = rho_x + np.sum(kernel * excess, axis=1)
    grads = np.einsum("km,kmd->kd", excess, kernel_grad)
    return values, grads


def apply_poisson(domain: Domain, mu: BoundaryMeasure, grid: PolarGrid, n_jobs: int | None = None) -> GridField:
    """
    P[μ] at the grid nodes with an analytic gradient cache.
    Atoms use the exact kernel; the density part subtracts ρ(σ(x)) before
    quadrature, using ∫P(x, ·) = 1.
    """

    n_jobs = N_JOBS if n_jobs is None else n_jobs
    pts = grid.points.reshape(-1, 2)
    on_boundary = boundary_distance(domain, pts) <= FLAT_TOL * domain.R
    inside = np.nonzero(~on_boundary)[0]

    values = np.zeros(len(pts))
    grads = np.zeros((len(pts), 2))

    for sigma, mass in mu.atoms:
        x = pts[inside]
        values[inside] += mass * _poisson(domain, x, sigma)
        grads[inside] += mass * _poisson_gradient(domain, x, sigma)

    if mu.has_density:
        chunks = [inside[k:k + TARGET_CHUNK] for k in range(0, len(inside), TARGET_CHUNK)]
        results = Parallel(n_jobs=n_jobs, prefer="threads")(
            delayed(_density_chunk)(domain, mu, pts[idx]) for idx in chunks
        )
        for idx, (vals, grd) in zip(chunks, results):
            values[idx] += vals
            grads[idx] += grd
        values[on_boundary] = mu.density_at(pts[on_boundary])

    values = values.reshape(grid.shape)
    fd_r, fd_t = grid.gradient(values)
    g_r, g_t = grid.cartesian_to_polar(grads.reshape(grid.shape + (2,)))
    mask = on_boundary.reshape(grid.shape)
    g_r = np.where(mask, fd_r, g_r)
    g_t = np.where(mask, fd_t, g_t)

    return GridField(grid, values, (g_r, g_t), {"operator": "poisson", "mass": mu.total_mass})


def green_atom_field(domain: Domain, grid: PolarGrid, y, mass: float = 1.0) -> GridField:
    """mass·G(·, y) on the grid with analytic gradient."""

    pts = grid.points.reshape(-1, 2)
    y = np.asarray(y, dtype=float)
    if np.any(np.linalg.norm(pts - y, axis=-1) < COINCIDENCE_TOL):
        raise CoincidentPoints("[ERROR] interior atom sits on a grid node")

    on_boundary = grid.on_domain_boundary.ravel()
    values = np.where(on_boundary, 0.0, mass * _green(domain, pts, y))
    grads = mass * _green_gradient(domain, pts, y)
    g_r, g_t = grid.cartesian_to_polar(grads.reshape(grid.shape + (2,)))
    return GridField(grid, values.reshape(grid.shape), (g_r, g_t), {"operator": "green_atom"})


# =====================================================
# G[f] ON A GRID
# =====================================================

class GreenOperator:
    """
    Kernel quadrature for G[f] at grid nodes off ∂Ω.
    Self cells integrate the free-space kernel over an equal-area disk and add
    the regular part at the node. Small grids keep a dense matrix.
    """

    def __init__(self, grid: PolarGrid, n_jobs: int | None = None, dense_limit: int = DENSE_LIMIT):
        self.grid = grid
        self.domain = grid.domain
        self.n_jobs = N_JOBS if n_jobs is None else n_jobs

        self.sources = grid.points.reshape(-1, 2)
        self.weights = grid.weights.ravel()
        self.targets = np.nonzero(~grid.on_domain_boundary.ravel())[0]

        radius = np.sqrt(self.weights[self.targets] / np.pi)
        with np.errstate(divide="ignore", invalid="ignore"):
            free = -0.5 * radius ** 2 * np.log(radius) + 0.25 * radius ** 2
        self.self_term = free + self.weights[self.targets] * regular_part(self.domain, self.sources[self.targets])

        self._dense = None
        if grid.size <= dense_limit:
            blocks = Parallel(n_jobs=self.n_jobs, prefer="threads")(
                delayed(self._block)(chunk) for chunk in self._chunks()
            )
            self._dense = np.vstack(blocks)

    def _chunks(self):
        return [np.arange(k, min(k + TARGET_CHUNK, len(self.targets))) for k in range(0, len(self.targets), TARGET_CHUNK)]

    def _block(self, chunk: np.ndarray) -> np.ndarray:
        idx = self.targets[chunk]
        with np.errstate(divide="ignore", invalid="ignore"):
            block = _green(self.domain, self.sources[idx][:, None, :], self.sources[None, :, :]) * self.weights[None, :]
        block[np.arange(len(idx)), idx] = self.self_term[chunk]
        return block

    def apply(self, f: np.ndarray) -> np.ndarray:
        flat = np.asarray(f, dtype=float).ravel()
        out = np.zeros(self.grid.size)

        if self._dense is not None:
            out[self.targets] = self._dense @ flat
        else:
            chunks = self._chunks()
            parts = Parallel(n_jobs=self.n_jobs, prefer="threads")(
                delayed(lambda c: self._block(c) @ flat)(chunk) for chunk in chunks
            )
            for chunk, part in zip(chunks, parts):
                out[self.targets[chunk]] = part

        return out.reshape(self.grid.shape)


_OPERATORS = weakref.WeakKeyDictionary()


def green_operator(grid: PolarGrid) -> GreenOperator:
    operator = _OPERATORS.get(grid)
    if operator is None:
        operator = GreenOperator(grid)
        _OPERATORS[grid] = operator
    return operator


def apply_green(domain: Domain, f: GridField) -> GridField:
    """G[f] by kernel quadrature; f must be integrable against d(x)."""

    if domain != f.domain:
        raise ValueError(f"[ERROR] field lives on {f.domain}, not {domain}")

    grid = f.grid
    with np.errstate(over="ignore", invalid="ignore"):
        weighted = float(np.sum(np.abs(f.values) * grid.distance * grid.weights))
    if not np.isfinite(weighted):
        raise NonIntegrableInput("[ERROR] Σ|f|·d·w overflows; f is not integrable against d(x)")

    values = green_operator(grid).apply(f.values)
    return GridField(grid, values, meta={"operator": "green"})
