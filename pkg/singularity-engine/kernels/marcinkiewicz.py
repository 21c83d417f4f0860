# =====================================================
# Weak-L^p (Marcinkiewicz) norm estimation on grids
# =====================================================

from dataclasses import dataclass
from enum import Enum

import numpy as np

from kernels.field import GridField

TAIL_SLACK = 1e-12


class WeightKind(str, Enum):
    ONE = "One"
    DISTANCE = "Distance"
    DISTANCE_POWER = "DistancePower"


@dataclass(frozen=True)
class Weight:
    kind: WeightKind = WeightKind.ONE
    alpha: float = 1.0

    @classmethod
    def one(cls) -> "Weight":
        return cls(WeightKind.ONE)

    @classmethod
    def distance(cls) -> "Weight":
        return cls(WeightKind.DISTANCE)

    @classmethod
    def distance_power(cls, alpha: float) -> "Weight":
        return cls(WeightKind.DISTANCE_POWER, float(alpha))

    def values(self, field: GridField) -> np.ndarray:
        if self.kind is WeightKind.ONE:
            return np.ones(field.grid.shape)
        if self.kind is WeightKind.DISTANCE:
            return field.grid.distance
        return field.grid.distance ** self.alpha


def _level_sweep(f: GridField, weight: Weight):
    """Cumulative (∫_E |f|h, |E|_h) over super-level sets E = {|f| ≥ t}, ties grouped."""

    h = (weight.values(f) * f.grid.weights).ravel()
    a = np.abs(f.values).ravel()

    keep = (h > 0) & (a > 0)
    a, h = a[keep], h[keep]
    if a.size == 0:
        return np.zeros(0), np.zeros(0), np.zeros(0)

    order = np.argsort(-a, kind="stable")
    a, h = a[order], h[order]

    mass = np.cumsum(a * h)
    measure = np.cumsum(h)

    # last index of each tie group
    ends = np.nonzero(np.append(a[1:] != a[:-1], True))[0]
    return a[ends], mass[ends], measure[ends]


def marcinkiewicz_norm(f: GridField, p: float, weight: Weight | None = None) -> float:
    """
    Smallest C with ∫_E |f| h ≤ C |E|_h^{1−1/p} over the super-level sets of |f|.
    Restricting E to super-level sets gives the quasi-norm up to the factor p/(p−1).
    """

    if p <= 1:
        raise ValueError(f"[ERROR] Marcinkiewicz exponent must exceed 1, got {p}")

    weight = weight or Weight.one()
    _, mass, measure = _level_sweep(f, weight)
    if mass.size == 0:
        return 0.0
    return float(np.max(mass / measure ** (1.0 - 1.0 / p)))


def weak_tail_check(f: GridField, lam: float, p: float, weight: Weight | None = None) -> bool:
    """|{|f| ≥ λ}|_h ≤ λ^{−p} ‖f‖^p with the estimated norm."""

    if lam <= 0:
        raise ValueError(f"[ERROR] threshold must be positive, got {lam}")

    weight = weight or Weight.one()
    h = (weight.values(f) * f.grid.weights).ravel()
    level_mass = float(np.sum(h[np.abs(f.values).ravel() >= lam]))
    norm = marcinkiewicz_norm(f, p, weight)
    return level_mass <= norm ** p * lam ** (-p) * (1.0 + TAIL_SLACK)
