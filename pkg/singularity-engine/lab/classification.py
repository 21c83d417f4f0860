# =====================================================
# Isolated boundary singularities at the anchor
# Weak(c):   u ≈ c·P(·, a)
# Strong:    u ≈ |x − a|^{−β} ω_s, u/P diverges
# Removable: sup u on half-annuli decays faster than P
# =====================================================

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from boundary_trace.levels import as_field
from core.console import info, warn
from core.fitting import loglog_fit
from kernels.potentials import poisson_kernel
from lab.scaling import SelfSimilarEstimate, extract_self_similar
from profiles.shooting import solve_profile
from solver.absorption import LawKind

# ---------------- CONFIG ----------------

VANISH_TOL = 1e-6
RATIO_SPREAD = np.pi / 3.0
RATIO_ANGLES = 9
DIVERGENCE_FACTOR = 10.0
PROFILE_TOL = 0.05
REMOVABLE_MARGIN = 0.5
INNER_FIT_POINTS = 3
MIN_EXPONENT = 0.25
MIN_RADII = 3
FLOOR_CELLS = 4
EXCLUSION_EXTRA_CELLS = 2
DEFAULT_MOLLIFIER_CELLS = 4


class SingularityVerdict(str, Enum):
    WEAK = "Weak"
    STRONG = "Strong"
    REMOVABLE = "Removable"
    INCONCLUSIVE = "Inconclusive"


@dataclass(eq=False)
class SingularityReport:
    verdict: SingularityVerdict
    c: float | None = None
    radii: list = field(default_factory=list)
    ratios: list = field(default_factory=list)
    ratio_fit: dict = field(default_factory=dict)
    decay_sup: list = field(default_factory=list)
    decay_fit: dict = field(default_factory=dict)
    profile_distance: float | None = None
    extraction: SelfSimilarEstimate | None = None
    vanishing_defect: float = 0.0
    reason: str = ""

    def __str__(self):
        if self.verdict is SingularityVerdict.WEAK:
            return f"Weak(c={self.c:.6g})"
        return self.verdict.value

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict.value,
            "c": self.c,
            "radii": list(self.radii),
            "ratios": list(self.ratios),
            "ratio_fit": self.ratio_fit,
            "decay_sup": list(self.decay_sup),
            "decay_fit": self.decay_fit,
            "profile_distance": self.profile_distance,
            "extraction": None if self.extraction is None else self.extraction.to_json(),
            "vanishing_defect": self.vanishing_defect,
            "reason": self.reason,
        }


# =====================================================
# EVIDENCE SWEEPS
# =====================================================

def _boundary_cell(grid) -> float:
    domain = grid.domain
    if grid.periodic:
        return 2.0 * np.pi * domain.R / grid.n_theta
    return grid.r_min


def _mollifier_cells(solution) -> int:
    config = getattr(solution, "config", None)
    return config.mollifier_cells if config is not None else DEFAULT_MOLLIFIER_CELLS


def vanishing_defect(solution, anchor) -> float:
    """max |u| on ∂Ω ∩ B_{2δ*}(a) away from the anchor's data support, relative to max u."""

    grid = as_field(solution).grid
    values = as_field(solution).values
    domain = grid.domain

    exclusion = (_mollifier_cells(solution) + EXCLUSION_EXTRA_CELLS) * _boundary_cell(grid) \
        if grid.periodic else 0.0
    gap = np.linalg.norm(grid.points - anchor, axis=-1)
    mask = grid.on_domain_boundary & (gap > exclusion) & (gap < 2.0 * domain.delta_star)

    peak = float(np.max(np.abs(values)))
    if not np.any(mask) or peak == 0.0:
        return 0.0
    return float(np.max(np.abs(values[mask])) / peak)


def reliable_radii(solution) -> list:
    grid = as_field(solution).grid
    domain = grid.domain

    if grid.periodic:
        floor = FLOOR_CELLS * _mollifier_cells(solution) * _boundary_cell(grid)
    else:
        floor = FLOOR_CELLS * grid.r_min

    radii = []
    radius = 0.5 * domain.delta_star
    while radius >= floor:
        radii.append(radius)
        radius *= 0.5
    return radii


def ratio_sweep(solution, anchor, radii) -> list:
    """Median of u/P(·, a) over the arc |x − a| = ρ, |φ| ≤ π/3, for each radius."""

    u = as_field(solution)
    domain = u.domain
    phi = np.linspace(-RATIO_SPREAD, RATIO_SPREAD, RATIO_ANGLES)
    direction = np.stack([np.sin(phi), np.cos(phi)], axis=-1)

    ratios = []
    for radius in radii:
        points = anchor + radius * direction
        kernel = poisson_kernel(domain, points, anchor)
        ratios.append(float(np.median(u.sample(points) / kernel)))
    return ratios


def decay_sweep(solution, anchor, radii) -> list:
    """sup u over the grid nodes of the half-annulus ρ/2 ≤ |x − a| ≤ ρ."""

    u = as_field(solution)
    gap = np.linalg.norm(u.grid.points - anchor, axis=-1)

    sups = []
    for radius in radii:
        mask = (gap >= 0.5 * radius) & (gap <= radius)
        sups.append(float(np.max(u.values[mask])) if np.any(mask) else float("nan"))
    return sups


def _weak_limit(N: int, q: float, radii, ratios) -> float:
    """Intercept of u/P ≈ c + k·ρ^s on the innermost radii, s = N + 1 − Nq (at least 1/4)."""

    s = max(N + 1.0 - N * q, MIN_EXPONENT)
    rho = np.asarray(radii[-INNER_FIT_POINTS:]) ** s
    _, intercept = np.polyfit(rho, np.asarray(ratios[-INNER_FIT_POINTS:]), 1)
    return float(intercept)


# =====================================================
# CLASSIFICATION
# =====================================================

def classify_isolated(solution, anchor=None, profile=None) -> SingularityReport:
    """
    One verdict from two evidence channels: the ratio u/P(·, a) on dyadic
    radii and the half-annulus decay of sup u. A diverging ratio is
    confirmed as Strong by the self-similar profile extraction.
    """

    u = as_field(solution)
    domain = u.domain
    N = domain.N
    anchor = domain.singular_anchor if anchor is None else np.asarray(anchor, dtype=float)

    law = getattr(solution, "law", None)
    q = law.q if law is not None and law.kind is LawKind.POWER else None

    defect = vanishing_defect(solution, anchor)
    if defect > VANISH_TOL:
        warn(f"classify_isolated: data not supported at the anchor (boundary defect {defect:.2e})")
        return SingularityReport(
            SingularityVerdict.INCONCLUSIVE, vanishing_defect=defect,
            reason="u does not vanish on the boundary away from the anchor",
        )

    radii = reliable_radii(solution)
    if len(radii) < MIN_RADII:
        return SingularityReport(
            SingularityVerdict.INCONCLUSIVE, radii=radii, vanishing_defect=defect,
            reason="grid too coarse for a dyadic radius sweep",
        )

    ratios = ratio_sweep(solution, anchor, radii)
    inverse = [1.0 / r for r in radii]
    ratio_fit = loglog_fit(inverse, ratios)
    decay = decay_sweep(solution, anchor, radii)
    decay_fit = loglog_fit(radii, decay)

    report = SingularityReport(
        SingularityVerdict.INCONCLUSIVE, None, radii, ratios, ratio_fit, decay, decay_fit,
        vanishing_defect=defect,
    )

    if decay_fit["slope"] > (1.0 - N) + REMOVABLE_MARGIN or max(decay) == 0.0:
        report.verdict = SingularityVerdict.REMOVABLE
        report.reason = "sup u decays faster than the Poisson rate"

    elif ratios[-1] > DIVERGENCE_FACTOR * ratios[0] and ratio_fit["slope"] > 0:
        if q is None or not 1.0 < q < (N + 1.0) / N:
            report.reason = "u/P diverges but no separable profile exists for this law"
        else:
            profile = profile if profile is not None else solve_profile(N, q)
            if not profile.found:
                report.reason = f"u/P diverges; profile solver: {profile.reason}"
            else:
                ells = sorted(radii[-INNER_FIT_POINTS:], reverse=True)
                report.extraction = extract_self_similar(solution, ells, q)
                report.profile_distance = report.extraction.distance_to(profile)
                if report.profile_distance <= PROFILE_TOL:
                    report.verdict = SingularityVerdict.STRONG
                    report.reason = "u/P diverges and the rescaled field matches ω_s"
                else:
                    report.reason = "u/P diverges but the rescaled field misses ω_s"

    elif q is not None:
        report.c = _weak_limit(N, q, radii, ratios)
        if report.c > 0:
            report.verdict = SingularityVerdict.WEAK
            report.reason = "u/P converges to a finite positive limit"
        else:
            report.reason = "u/P limit is not positive"

    else:
        report.reason = "ratio channel needs a power law"

    info(f"classify_isolated on {domain}: {report}")
    return report
