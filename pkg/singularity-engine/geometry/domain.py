# =====================================================
# Canonical domains
# Ball B_R and flat model B_R ∩ {x_N > 0} with exact
# distance, flow coordinates and level-surface quadrature
# =====================================================

from dataclasses import dataclass
from enum import Enum

import numpy as np

from core.errors import LevelTooDeep, OutsideFlowRegion, PointOutsideDomain

# ---------------- CONFIG ----------------

SUPPORTED_DIMENSIONS = (2, 3)
RELATIVE_TOL = 1e-12
MIN_LEVEL_NODES = 8


class DomainKind(str, Enum):
    BALL = "Ball"
    HALF_DISK = "HalfDisk"


@dataclass(frozen=True)
class Domain:
    kind: DomainKind
    N: int = 2
    R: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "kind", DomainKind(self.kind))
        object.__setattr__(self, "R", float(self.R))

        if self.N not in SUPPORTED_DIMENSIONS:
            raise ValueError(f"[ERROR] dimension must be one of {SUPPORTED_DIMENSIONS}, got {self.N}")
        if not self.R > 0:
            raise ValueError(f"[ERROR] radius must be positive, got {self.R}")

    @classmethod
    def ball(cls, N: int = 2, R: float = 1.0) -> "Domain":
        return cls(DomainKind.BALL, N, R)

    @classmethod
    def half_disk(cls, N: int = 2, R: float = 1.0) -> "Domain":
        return cls(DomainKind.HALF_DISK, N, R)

    @property
    def is_ball(self) -> bool:
        return self.kind is DomainKind.BALL

    @property
    def tol(self) -> float:
        return RELATIVE_TOL * self.R

    @property
    def delta_star(self) -> float:
        return self.R if self.is_ball else 0.5 * self.R

    @property
    def singular_anchor(self) -> np.ndarray:
        anchor = np.zeros(self.N)
        if self.is_ball:
            anchor[-1] = -self.R
        return anchor

    @property
    def anchor_normal(self) -> np.ndarray:
        """Inward unit normal at the singular anchor (e_N for both kinds)."""
        normal = np.zeros(self.N)
        normal[-1] = 1.0
        return normal

    @property
    def volume(self) -> float:
        full = np.pi * self.R ** 2 if self.N == 2 else 4.0 * np.pi * self.R ** 3 / 3.0
        return full if self.is_ball else 0.5 * full

    def to_json(self) -> dict:
        return {"kind": self.kind.value, "N": self.N, "R": self.R}

    @classmethod
    def from_json(cls, payload: dict) -> "Domain":
        try:
            return cls(DomainKind(payload["kind"]), int(payload["N"]), float(payload["R"]))
        except KeyError as exc:
            raise ValueError(f"[ERROR] domain JSON missing key {exc}") from exc

    def __str__(self):
        return f"{self.kind.value}(N={self.N}, R={self.R:g})"


def unit_sphere_area(N: int) -> float:
    return 2.0 * np.pi if N == 2 else 4.0 * np.pi


def _points(domain: Domain, x) -> np.ndarray:
    pts = np.asarray(x, dtype=float)
    if pts.shape[-1] != domain.N:
        raise ValueError(f"[ERROR] expected points of dimension {domain.N}, got shape {pts.shape}")
    return pts


# =====================================================
# DISTANCE AND PROJECTION
# =====================================================

def boundary_distance(domain: Domain, x):
    """Exact distance to ∂Ω; vectorized over leading axes of x."""

    pts = _points(domain, x)
    radius = np.linalg.norm(pts, axis=-1)

    if domain.is_ball:
        outside = radius > domain.R + domain.tol
        dist = domain.R - radius
    else:
        height = pts[..., -1]
        outside = (radius > domain.R + domain.tol) | (height < -domain.tol)
        dist = np.minimum(height, domain.R - radius)

    if np.any(outside):
        raise PointOutsideDomain(f"[ERROR] point(s) outside closure of {domain}")

    dist = np.clip(dist, 0.0, None)
    return float(dist) if np.ndim(dist) == 0 else dist


def project_to_boundary(domain: Domain, x):
    """
    Nearest boundary point for every x.
    Returns (distance, sigma, on_flat) with on_flat marking projections
    onto the flat part of a HalfDisk (always False for a Ball).
    """

    pts = _points(domain, x)
    dist = boundary_distance(domain, pts)
    radius = np.linalg.norm(pts, axis=-1, keepdims=True)

    direction = np.where(radius > 0, pts / np.where(radius > 0, radius, 1.0), 0.0)
    if np.any(radius == 0):
        fallback = np.zeros(domain.N)
        fallback[0] = 1.0
        direction = np.where(radius > 0, direction, fallback)

    sphere_sigma = domain.R * direction

    if domain.is_ball:
        return dist, sphere_sigma, np.zeros(np.shape(dist), dtype=bool)

    flat_sigma = pts.copy()
    flat_sigma[..., -1] = 0.0
    on_flat = pts[..., -1] <= domain.R - radius[..., 0]
    sigma = np.where(on_flat[..., None], flat_sigma, sphere_sigma)
    return dist, sigma, on_flat


def outward_normal(domain: Domain, sigma) -> np.ndarray:
    sig = _points(domain, sigma)
    sphere = sig / domain.R

    if domain.is_ball:
        return sphere

    flat = np.zeros_like(sig)
    flat[..., -1] = -1.0
    on_flat = np.abs(sig[..., -1]) <= domain.tol
    return np.where(on_flat[..., None], flat, sphere)


def flow_coordinates(domain: Domain, x):
    """(δ, σ) with x = σ − δ·n_σ, defined for 0 < d(x) < δ*."""

    pts = _points(domain, x)
    dist = boundary_distance(domain, pts)

    if not 0.0 < dist < domain.delta_star:
        raise OutsideFlowRegion(
            f"[ERROR] d(x) = {dist:.3e} outside (0, δ*) with δ* = {domain.delta_star:g}"
        )

    if not domain.is_ball:
        gap = abs(pts[-1] - (domain.R - np.linalg.norm(pts)))
        if gap <= domain.tol:
            raise OutsideFlowRegion("[ERROR] projection is not unique (equidistant to both boundary parts)")

    _, sigma, _ = project_to_boundary(domain, pts)
    return dist, sigma


def flow_inverse(domain: Domain, delta, sigma) -> np.ndarray:
    sig = _points(domain, sigma)
    delta = np.asarray(delta, dtype=float)
    return sig - delta[..., None] * outward_normal(domain, sig)


# =====================================================
# PLANAR BOUNDARY PARAMETERIZATION (arc length)
# =====================================================

def boundary_length(domain: Domain) -> float:
    if domain.N != 2:
        raise ValueError("[ERROR] arc-length parameterization is planar only")
    return 2.0 * np.pi * domain.R if domain.is_ball else (2.0 + np.pi) * domain.R


def boundary_parameter(domain: Domain, sigma) -> np.ndarray:
    """
    Arc-length coordinate t of boundary points.
    Ball: t = R·θ. HalfDisk: flat part t = x₁ + R ∈ [0, 2R], arc t = 2R + R·θ.
    """

    sig = _points(domain, sigma)

    if domain.is_ball:
        return domain.R * np.mod(np.arctan2(sig[..., 1], sig[..., 0]), 2.0 * np.pi)

    on_flat = np.abs(sig[..., 1]) <= 10.0 * domain.tol
    angle = np.arctan2(np.clip(sig[..., 1], 0.0, None), sig[..., 0])
    arc = 2.0 * domain.R + domain.R * angle
    flat = np.clip(sig[..., 0], -domain.R, domain.R) + domain.R
    return np.where(on_flat, flat, arc)


def boundary_point(domain: Domain, t) -> np.ndarray:
    length = boundary_length(domain)
    t = np.mod(np.asarray(t, dtype=float), length)
    R = domain.R

    if domain.is_ball:
        return np.stack([R * np.cos(t / R), R * np.sin(t / R)], axis=-1)

    flat = np.stack([t - R, np.zeros_like(t)], axis=-1)
    angle = (t - 2.0 * R) / R
    arc = np.stack([R * np.cos(angle), R * np.sin(angle)], axis=-1)
    return np.where((t <= 2.0 * R)[..., None], flat, arc)


# =====================================================
# LEVEL SURFACES Σ_δ
# =====================================================

@dataclass(frozen=True, eq=False)
class SurfaceQuadrature:
    level: float
    nodes: np.ndarray
    weights: np.ndarray
    boundary_points: np.ndarray
    params: np.ndarray | None = None

    @property
    def total(self) -> float:
        return float(np.sum(self.weights))

    def __len__(self):
        return len(self.weights)


def level_surface(domain: Domain, delta: float, m: int) -> SurfaceQuadrature:
    """
    Quadrature on Σ_δ = {d(x) = δ}: equispaced in angle on spherical parts,
    midpoint panels on flat parts. Weights sum to |Σ_δ| exactly.
    """

    delta = float(delta)
    if delta >= domain.delta_star:
        raise LevelTooDeep(f"[ERROR] level δ = {delta:g} ≥ δ* = {domain.delta_star:g}")
    if delta < 0:
        raise ValueError(f"[ERROR] level must be nonnegative, got {delta}")
    if m < MIN_LEVEL_NODES:
        raise ValueError(f"[ERROR] level surface needs at least {MIN_LEVEL_NODES} nodes, got {m}")

    if domain.N == 2:
        builder = _ball_level_2d if domain.is_ball else _half_disk_level_2d
    else:
        builder = _ball_level_3d if domain.is_ball else _half_disk_level_3d

    quadrature = builder(domain, delta, int(m))

    if domain.N == 2:
        params = boundary_parameter(domain, quadrature.boundary_points)
        quadrature = SurfaceQuadrature(
            quadrature.level, quadrature.nodes, quadrature.weights,
            quadrature.boundary_points, params,
        )
    return quadrature


def _ball_level_2d(domain, delta, m):
    rho = domain.R - delta
    angles = 2.0 * np.pi * np.arange(m) / m
    unit = np.stack([np.cos(angles), np.sin(angles)], axis=-1)
    weights = np.full(m, 2.0 * np.pi * rho / m)
    return SurfaceQuadrature(delta, rho * unit, weights, domain.R * unit)


def _half_disk_level_2d(domain, delta, m):
    R = domain.R
    rho = R - delta
    half_chord = np.sqrt(rho ** 2 - delta ** 2)
    alpha0 = np.arcsin(delta / rho)
    arc_angle = np.pi - 2.0 * alpha0

    seg_len = 2.0 * half_chord
    arc_len = rho * arc_angle
    m_seg = int(np.clip(round(m * seg_len / (seg_len + arc_len)), 2, m - 2))
    m_arc = m - m_seg

    x1 = -half_chord + (np.arange(m_seg) + 0.5) * seg_len / m_seg
    seg_nodes = np.stack([x1, np.full(m_seg, delta)], axis=-1)
    seg_sigma = np.stack([x1, np.zeros(m_seg)], axis=-1)
    seg_w = np.full(m_seg, seg_len / m_seg)

    angles = alpha0 + (np.arange(m_arc) + 0.5) * arc_angle / m_arc
    unit = np.stack([np.cos(angles), np.sin(angles)], axis=-1)
    arc_w = np.full(m_arc, arc_len / m_arc)

    return SurfaceQuadrature(
        delta,
        np.concatenate([seg_nodes, rho * unit]),
        np.concatenate([seg_w, arc_w]),
        np.concatenate([seg_sigma, R * unit]),
    )


def _sphere_bands(rho, phi_hi, n_bands, n_lon):
    edges = np.linspace(0.0, phi_hi, n_bands + 1)
    mids = 0.5 * (edges[:-1] + edges[1:])
    areas = 2.0 * np.pi * rho ** 2 * (np.cos(edges[:-1]) - np.cos(edges[1:])) / n_lon
    lon = 2.0 * np.pi * np.arange(n_lon) / n_lon
    phi, psi = np.meshgrid(mids, lon, indexing="ij")
    unit = np.stack(
        [np.sin(phi) * np.cos(psi), np.sin(phi) * np.sin(psi), np.cos(phi)], axis=-1
    ).reshape(-1, 3)
    weights = np.repeat(areas, n_lon)
    return unit, weights


def _ball_level_3d(domain, delta, m):
    rho = domain.R - delta
    unit, weights = _sphere_bands(rho, np.pi, m, 2 * m)
    return SurfaceQuadrature(delta, rho * unit, weights, domain.R * unit)


def _half_disk_level_3d(domain, delta, m):
    R = domain.R
    rho = R - delta
    radius = np.sqrt(rho ** 2 - delta ** 2)
    n_lon = 2 * m
    n_rings = max(4, m // 2)

    ring_edges = np.linspace(0.0, radius, n_rings + 1)
    ring_mid = 0.5 * (ring_edges[:-1] + ring_edges[1:])
    ring_area = np.pi * (ring_edges[1:] ** 2 - ring_edges[:-1] ** 2) / n_lon
    lon = 2.0 * np.pi * np.arange(n_lon) / n_lon
    s, psi = np.meshgrid(ring_mid, lon, indexing="ij")
    disk_sigma = np.stack([s * np.cos(psi), s * np.sin(psi), np.zeros_like(s)], axis=-1).reshape(-1, 3)
    disk_nodes = disk_sigma.copy()
    disk_nodes[:, 2] = delta
    disk_w = np.repeat(ring_area, n_lon)

    unit, cap_w = _sphere_bands(rho, np.arccos(delta / rho), m, n_lon)

    return SurfaceQuadrature(
        delta,
        np.concatenate([disk_nodes, rho * unit]),
        np.concatenate([disk_w, cap_w]),
        np.concatenate([disk_sigma, R * unit]),
    )
