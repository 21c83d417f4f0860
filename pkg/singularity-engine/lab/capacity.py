# =====================================================
# Bessel capacities C_{α,p} at point / ball level
# and the interior removability energy identity
#
# C_{α,p}({x}) = 0  ⇔  αp ≤ d
# C_{α,p}(B_ρ) ~ ρ^{d−αp} (αp < d), (ln 1/ρ)^{1−p} (αp = d)
# =====================================================

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from core.console import info
from core.fitting import relative_change

PRODUCT_TOL = 1e-12
STABLE_CHANGE = 0.05


class SetKind(str, Enum):
    POINT = "Point"
    BALL = "BallOfRadius"


@dataclass(frozen=True)
class CapacityQuery:
    alpha: float
    p: float
    ambient_dim: int
    set_kind: SetKind = SetKind.POINT
    rho: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "set_kind", SetKind(self.set_kind))
        # α = 0 is Lebesgue measure
        if not self.alpha >= 0:
            raise ValueError(f"[ERROR] smoothness index must be nonnegative, got {self.alpha}")
        if not self.p > 1:
            raise ValueError(f"[ERROR] integrability exponent must exceed 1, got {self.p}")
        if int(self.ambient_dim) != self.ambient_dim or self.ambient_dim < 1:
            raise ValueError(f"[ERROR] ambient dimension must be a positive integer, got {self.ambient_dim}")
        if self.set_kind is SetKind.BALL and not (self.rho is not None and 0 < self.rho < 1):
            raise ValueError("[ERROR] BallOfRadius queries need 0 < rho < 1")

    @classmethod
    def boundary(cls, N: int, q: float, rho: float | None = None) -> "CapacityQuery":
        """C_{(2−q)/q, q′} on the (N−1)-dimensional boundary."""
        kind = SetKind.POINT if rho is None else SetKind.BALL
        return cls((2.0 - q) / q, q / (q - 1.0), N - 1, kind, rho)

    @classmethod
    def interior(cls, N: int, q: float, rho: float | None = None) -> "CapacityQuery":
        """C_{1, q′} in ℝ^N."""
        kind = SetKind.POINT if rho is None else SetKind.BALL
        return cls(1.0, q / (q - 1.0), N, kind, rho)

    @property
    def product(self) -> float:
        return self.alpha * self.p

    def to_json(self) -> dict:
        return {
            "alpha": self.alpha,
            "p": self.p,
            "ambient_dim": self.ambient_dim,
            "set_kind": self.set_kind.value,
            "rho": self.rho,
        }


def point_capacity_zero(query: CapacityQuery) -> bool:
    """True iff points are C_{α,p}-null (αp ≤ d); for balls this is the ρ → 0 verdict."""
    return bool(query.product <= query.ambient_dim + PRODUCT_TOL)


@dataclass(frozen=True)
class CapacityScaling:
    regime: str
    exponent: float
    estimate: float | None
    zero_limit: bool

    def to_json(self) -> dict:
        return {
            "regime": self.regime,
            "exponent": self.exponent,
            "estimate": self.estimate,
            "zero_limit": self.zero_limit,
        }


def capacity_scaling(query: CapacityQuery) -> CapacityScaling:
    """Order of C_{α,p}(B_ρ) as ρ → 0 (up to constants); the estimate is evaluated at query.rho."""

    d = query.ambient_dim
    rho = query.rho

    if abs(query.product - d) <= PRODUCT_TOL:
        estimate = None if rho is None else float(np.log(1.0 / rho) ** (1.0 - query.p))
        return CapacityScaling("log", 0.0, estimate, True)

    if query.product < d:
        exponent = d - query.product
        estimate = None if rho is None else float(rho ** exponent)
        return CapacityScaling("power", exponent, estimate, True)

    return CapacityScaling("bounded", 0.0, None if rho is None else 1.0, False)


# =====================================================
# INTERIOR REMOVABILITY IDENTITY
# ∫ζ^{q′}|∇u|^q ≤ a|∫_∂Ω ∂u/∂n| + b∫|∇η|^{q′},  ζ = 1 − η
# =====================================================

def identity_constants(q: float) -> tuple:
    qc = q / (q - 1.0)
    return 2.0, 2.0 * qc ** (qc - 1.0) * (2.0 / q) ** (1.0 / (q - 1.0))


def cutoff(radius: np.ndarray, eps: float, logarithmic: bool) -> tuple:
    """(η, |∇η|) with η = 1 near the puncture; cosine ramp on [ε, 2ε] or log ramp on [ε², ε]."""

    if logarithmic:
        inner, outer = eps ** 2, eps
        ramp = (radius > inner) & (radius < outer)
        eta = np.clip(np.log(outer / np.maximum(radius, 1e-300)) / np.log(1.0 / eps), 0.0, 1.0)
        grad = np.where(ramp, 1.0 / (np.maximum(radius, 1e-300) * np.log(1.0 / eps)), 0.0)
        return eta, grad

    inner, outer = eps, 2.0 * eps
    ramp = (radius > inner) & (radius < outer)
    phase = np.pi * (radius - inner) / eps
    eta = np.where(radius <= inner, 1.0, np.where(ramp, 0.5 * (1.0 + np.cos(phase)), 0.0))
    grad = np.where(ramp, 0.5 * np.pi / eps * np.abs(np.sin(phase)), 0.0)
    return eta, grad


@dataclass(eq=False)
class RemovabilityCertificate:
    q: float
    ramp: str
    eps: list
    lhs: list
    rhs: list
    cutoff_norms: list
    flux: float
    constants: tuple
    meta: dict = field(default_factory=dict)

    @property
    def holds(self) -> bool:
        return all(a <= b * (1.0 + 1e-9) for a, b in zip(self.lhs, self.rhs))

    @property
    def bounded(self) -> bool:
        return len(self.lhs) >= 2 and relative_change(self.lhs[-2], self.lhs[-1]) < STABLE_CHANGE

    @property
    def norms_decay(self) -> bool:
        return all(b < a for a, b in zip(self.cutoff_norms, self.cutoff_norms[1:]))

    def to_json(self) -> dict:
        return {
            "q": self.q,
            "ramp": self.ramp,
            "eps": list(self.eps),
            "lhs": list(self.lhs),
            "rhs": list(self.rhs),
            "cutoff_norms": list(self.cutoff_norms),
            "flux": self.flux,
            "flux_weight": self.constants[0],
            "cutoff_weight": self.constants[1],
            "holds": self.holds,
            "bounded": self.bounded,
            "norms_decay": self.norms_decay,
        }


def _default_eps(grid, logarithmic: bool) -> list:
    h = grid.domain.R / (grid.n_r - 0.5)
    if logarithmic:
        candidates = [0.7, 0.5, 0.35, 0.25]
        return [e * grid.domain.R for e in candidates if (e * grid.domain.R) ** 2 >= 2.0 * h]
    candidates = [0.25, 0.125, 0.0625, 0.03125]
    return [e * grid.domain.R for e in candidates if e * grid.domain.R >= 3.0 * h]


def interior_removability_identity(solution, eps_sequence=None, puncture=None) -> RemovabilityCertificate:
    """
    Both sides of the energy inequality for shrinking cut-offs around the
    puncture of an interior solve on a Ball.
    """

    grid = solution.grid
    if not grid.periodic:
        raise ValueError("[ERROR] the removability identity is evaluated on Ball grids")

    q = solution.law.q
    if q is None or not 1.0 < q < 2.0:
        raise ValueError("[ERROR] the identity needs a power law with 1 < q < 2")

    if puncture is None:
        atoms = solution.interior_data.atoms if solution.interior_data is not None else []
        puncture = atoms[0][0] if atoms else np.zeros(2)
    puncture = np.asarray(puncture, dtype=float)

    N = grid.domain.N
    qc = q / (q - 1.0)
    logarithmic = qc >= N
    flux_weight, cutoff_weight = identity_constants(q)

    eps = list(eps_sequence) if eps_sequence is not None else _default_eps(grid, logarithmic)
    if any(b >= a for a, b in zip(eps, eps[1:])):
        raise ValueError("[ERROR] cut-off scales must decrease strictly")

    g_r, _ = grid.gradient(solution.values)
    flux = float(np.sum(g_r[-1, :]) * grid.domain.R * grid.dtheta)

    radius = np.linalg.norm(grid.points - puncture, axis=-1)
    inside = ~grid.on_domain_boundary
    energy = solution.field.grad_norm() ** q
    weights = grid.weights

    lhs, rhs, norms = [], [], []
    for e in eps:
        eta, grad = cutoff(radius, e, logarithmic)
        zeta = 1.0 - eta
        lhs.append(float(np.sum((zeta ** qc * energy * weights)[inside])))
        cut_energy = float(np.sum(grad ** qc * weights))
        norms.append(cut_energy ** (1.0 / qc))
        rhs.append(flux_weight * abs(flux) + cutoff_weight * cut_energy)

    certificate = RemovabilityCertificate(
        q, "log" if logarithmic else "cosine", eps, lhs, rhs, norms, flux, (flux_weight, cutoff_weight),
    )
    info(
        f"removability identity q={q:g}: holds={certificate.holds}, bounded={certificate.bounded}, "
        f"cut-off norms decay={certificate.norms_decay}"
    )
    return certificate
