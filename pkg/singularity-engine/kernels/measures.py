# =====================================================
# Finite positive measures on ∂Ω and Ω
# atoms + densities sampled on a boundary quadrature
# =====================================================

from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline

from geometry.domain import (
    Domain,
    SurfaceQuadrature,
    boundary_distance,
    boundary_length,
    boundary_parameter,
    level_surface,
)
from kernels.field import GridField
from kernels.grid import PolarGrid

# ---------------- CONFIG ----------------

ON_BOUNDARY_TOL = 1e-9
DEFAULT_DENSITY_NODES = 512
HALF_DISK_NODES_PER_RAY = 4


def _normalize_atoms(domain: Domain, atoms) -> list:
    normalized = []
    for point, mass in atoms:
        point = np.asarray(point, dtype=float)
        mass = float(mass)
        if point.shape != (domain.N,):
            raise ValueError(f"[ERROR] atom location must be a point of dimension {domain.N}")
        if not np.isfinite(mass) or mass <= 0:
            raise ValueError(f"[ERROR] atom masses must be finite and positive, got {mass}")
        normalized.append((point, mass))
    return normalized


@dataclass(eq=False)
class BoundaryMeasure:
    domain: Domain
    atoms: list = field(default_factory=list)
    density: np.ndarray | None = None
    quadrature: SurfaceQuadrature | None = None

    def __post_init__(self):
        self.atoms = _normalize_atoms(self.domain, self.atoms)

        for point, _ in self.atoms:
            if boundary_distance(self.domain, point) > ON_BOUNDARY_TOL * self.domain.R:
                raise ValueError(f"[ERROR] boundary atom {point} does not lie on ∂Ω")

        if self.density is not None:
            if self.quadrature is None:
                raise ValueError("[ERROR] a density needs the boundary quadrature it is sampled on")
            density = np.asarray(self.density, dtype=float)
            if density.shape != self.quadrature.weights.shape:
                raise ValueError("[ERROR] density samples do not match the quadrature nodes")
            if not np.all(np.isfinite(density)) or np.any(density < 0):
                raise ValueError("[ERROR] density must be finite and nonnegative")
            self.density = density

    # ---------------- CONSTRUCTORS ----------------

    @classmethod
    def zero(cls, domain: Domain) -> "BoundaryMeasure":
        return cls(domain)

    @classmethod
    def dirac(cls, domain: Domain, point=None, mass: float = 1.0) -> "BoundaryMeasure":
        point = domain.singular_anchor if point is None else point
        return cls(domain, [(point, mass)])

    @classmethod
    def from_density(cls, domain: Domain, func, m: int = DEFAULT_DENSITY_NODES) -> "BoundaryMeasure":
        quadrature = level_surface(domain, 0.0, m)
        density = np.asarray(func(quadrature.boundary_points), dtype=float)
        return cls(domain, [], density, quadrature)

    # ---------------- MASSES ----------------

    @property
    def has_atoms(self) -> bool:
        return bool(self.atoms)

    @property
    def has_density(self) -> bool:
        return self.density is not None

    @property
    def atom_mass(self) -> float:
        return float(sum(mass for _, mass in self.atoms))

    @property
    def density_mass(self) -> float:
        if self.density is None:
            return 0.0
        return float(np.sum(self.density * self.quadrature.weights))

    @property
    def total_mass(self) -> float:
        return self.atom_mass + self.density_mass

    @property
    def is_zero(self) -> bool:
        return not self.atoms and (self.density is None or not np.any(self.density > 0))

    def scaled(self, factor: float) -> "BoundaryMeasure":
        if factor < 0:
            raise ValueError("[ERROR] measures scale by nonnegative factors only")
        if factor == 0:
            return BoundaryMeasure.zero(self.domain)
        density = None if self.density is None else factor * self.density
        atoms = [(p, factor * m) for p, m in self.atoms]
        return BoundaryMeasure(self.domain, atoms, density, self.quadrature)

    def pairing(self, phi) -> float:
        """∫ φ dμ for a callable φ of boundary points."""
        total = sum(m * float(phi(p[None, :])[0]) for p, m in self.atoms)
        if self.density is not None:
            values = np.asarray(phi(self.quadrature.boundary_points), dtype=float)
            total += float(np.sum(values * self.density * self.quadrature.weights))
        return float(total)

    # ---------------- DENSITY LOOKUP ----------------

    def density_at(self, sigma) -> np.ndarray:
        """Density value at boundary points (0 where no density is given)."""

        sig = np.asarray(sigma, dtype=float)
        if self.density is None:
            return np.zeros(sig.shape[:-1])
        if self.domain.N != 2:
            raise ValueError("[ERROR] density interpolation is planar only")

        t = boundary_parameter(self.domain, sig)
        length = boundary_length(self.domain)
        params = self.quadrature.params

        if self.domain.is_ball:
            spline = CubicSpline(
                np.append(params, length), np.append(self.density, self.density[0]), bc_type="periodic"
            )
            return np.clip(spline(np.mod(t, length)), 0.0, None)

        return np.interp(t, params, self.density, period=length)

    # ---------------- MOLLIFICATION ----------------

    def mollified(self, grid: PolarGrid, cells: int = 4) -> "BoundaryMeasure":
        """
        Replace off-grid atoms by mass-preserving cosine bumps `cells` boundary
        cells wide. Atoms at the HalfDisk anchor stay exact (the grid is centred there).
        """

        domain = self.domain
        exact, smeared = [], []
        for point, mass in self.atoms:
            if not domain.is_ball and np.linalg.norm(point) <= ON_BOUNDARY_TOL * domain.R:
                exact.append((point, mass))
            else:
                smeared.append((point, mass))

        if not smeared:
            return self

        m = grid.n_theta if domain.is_ball else HALF_DISK_NODES_PER_RAY * grid.n_theta
        quadrature = self.quadrature
        if quadrature is None or len(quadrature.weights) < m:
            quadrature = level_surface(domain, 0.0, m)
        length = boundary_length(domain)
        half_width = 0.5 * cells * length / m

        density = self.density_at(quadrature.boundary_points) if self.density is not None \
            else np.zeros(len(quadrature.weights))
        params = quadrature.params

        for point, mass in smeared:
            t_atom = boundary_parameter(domain, point[None, :])[0]
            gap = np.abs(np.mod(params - t_atom + 0.5 * length, length) - 0.5 * length)
            bump = np.where(gap < half_width, 0.5 * (1.0 + np.cos(np.pi * gap / half_width)), 0.0)
            density = density + mass * bump / np.sum(bump * quadrature.weights)

        return BoundaryMeasure(domain, exact, density, quadrature)

    def to_json(self) -> dict:
        return {
            "domain": self.domain.to_json(),
            "atoms": [{"point": p.tolist(), "mass": m} for p, m in self.atoms],
            "density_nodes": 0 if self.density is None else int(self.density.size),
            "total_mass": self.total_mass,
        }


@dataclass(eq=False)
class InteriorMeasure:
    domain: Domain
    atoms: list = field(default_factory=list)
    density: GridField | None = None

    def __post_init__(self):
        self.atoms = _normalize_atoms(self.domain, self.atoms)
        for point, _ in self.atoms:
            if boundary_distance(self.domain, point) <= ON_BOUNDARY_TOL * self.domain.R:
                raise ValueError(f"[ERROR] interior atom {point} must lie strictly inside Ω")
        if self.density is not None and np.any(self.density.values < 0):
            raise ValueError("[ERROR] interior density must be nonnegative")

    @classmethod
    def zero(cls, domain: Domain) -> "InteriorMeasure":
        return cls(domain)

    @classmethod
    def dirac(cls, domain: Domain, point=None, mass: float = 1.0) -> "InteriorMeasure":
        point = np.zeros(domain.N) if point is None else point
        return cls(domain, [(point, mass)])

    @property
    def has_atoms(self) -> bool:
        return bool(self.atoms)

    @property
    def total_mass(self) -> float:
        total = sum(m for _, m in self.atoms)
        if self.density is not None:
            total += self.density.integrate()
        return float(total)

    @property
    def is_zero(self) -> bool:
        return not self.atoms and (self.density is None or not np.any(self.density.values > 0))
