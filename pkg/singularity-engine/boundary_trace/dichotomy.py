# =====================================================
# Regular / singular boundary points and the trace (𝒮, μ)
#
# A(r)    = ∫_{Ω ∩ B_r(z)} g(|∇u|) d(x) dx
# M(δ, r) = ∫_{Σ_δ ∩ B_r(z)} u dS
#
# z is SINGULAR when M(·, r) blows up as δ → 0 for every probed r,
# REGULAR when A(r) settles for some r, INCONCLUSIVE otherwise.
# =====================================================

from dataclasses import dataclass, field
from enum import Enum

import numpy as np
import pandas as pd
from joblib import Parallel, delayed

from boundary_trace.levels import LevelSample, as_field, dyadic_levels, sample_level
from config.settings import N_JOBS
from core.console import info, warn
from core.fitting import extrapolate_to_zero, loglog_fit, relative_change
from geometry.domain import Domain, boundary_distance, boundary_length, boundary_parameter, boundary_point

# ---------------- CONFIG ----------------

STABLE_CHANGE = 0.05
DIVERGENCE_SLOPE = -0.2
DIVERGENCE_R2 = 0.9
DEFAULT_PROBES = 16
DEFAULT_LEVELS = 5
MIN_LEVELS = 3
PROBE_RADII = (0.5, 0.25)
LEVEL_FLOOR_FACTOR = 2.0
ON_BOUNDARY_TOL = 1e-9
EXTRAPOLATION_DEGREE = 2


class PointVerdict(str, Enum):
    REGULAR = "REGULAR"
    SINGULAR = "SINGULAR"
    INCONCLUSIVE = "INCONCLUSIVE"


def _thresholds() -> dict:
    return {
        "stable_change": STABLE_CHANGE,
        "divergence_slope": DIVERGENCE_SLOPE,
        "divergence_r2": DIVERGENCE_R2,
    }


# =====================================================
# PROBE RECORD
# =====================================================

@dataclass(eq=False)
class ProbeRecord:
    point: np.ndarray
    radii: list
    deltas: list
    absorption: list
    level_mass: list
    fits: list
    stable: list
    diverges: list
    verdict: PointVerdict
    refined_absorption: list | None = None
    channel: str = "cutoff"

    def to_frame(self) -> pd.DataFrame:
        rows = []
        for i, radius in enumerate(self.radii):
            for j, delta in enumerate(self.deltas):
                rows.append({
                    "radius": radius,
                    "delta": delta,
                    "absorption": self.absorption[i][j],
                    "level_mass": self.level_mass[i][j],
                })
        return pd.DataFrame(rows)

    def to_json(self) -> dict:
        return {
            "point": np.asarray(self.point).tolist(),
            "verdict": self.verdict.value,
            "channel": self.channel,
            "radii": list(self.radii),
            "stable": list(self.stable),
            "diverges": list(self.diverges),
            "fits": list(self.fits),
            "refined_absorption": self.refined_absorption,
            "sweep_csv": self.to_frame().to_csv(index=False),
        }


def absorption_integral(solution, z, radius: float, cut: float = 0.0) -> float:
    """∫ g(|∇u|) d(x) dx over the grid nodes of B_r(z) with d(x) > cut."""

    grid = solution.field.grid
    near = np.linalg.norm(grid.points - np.asarray(z, dtype=float), axis=-1) < radius
    near &= (grid.distance > cut) & ~grid.on_domain_boundary

    integrand = solution.law(solution.field.grad_norm()) * grid.distance
    return float(np.sum(integrand[near] * grid.weights[near]))


def default_levels(solution, radii, count: int = DEFAULT_LEVELS) -> list:
    """Dyadic δ-sweep below min(r)/2, kept above the grid's inner radius on a HalfDisk."""

    grid = as_field(solution).grid
    domain = grid.domain
    top = min(0.25 * domain.delta_star, 0.5 * min(radii))
    floor = 0.0 if domain.is_ball else LEVEL_FLOOR_FACTOR * grid.r_min
    deltas = [d for d in dyadic_levels(top, count) if d > floor]

    if len(deltas) < MIN_LEVELS:
        raise ValueError(
            f"[ERROR] only {len(deltas)} admissible levels below {top:.3e}; refine the grid near the anchor"
        )
    return deltas


def _check_boundary_point(domain: Domain, z) -> np.ndarray:
    z = np.asarray(z, dtype=float)
    if boundary_distance(domain, z) > ON_BOUNDARY_TOL * domain.R:
        raise ValueError(f"[ERROR] probe point {z} is not on ∂Ω")
    return z


def dichotomy_probe(solution, z, radii, levels: list | None = None, refined=None) -> ProbeRecord:
    """
    Runs both dichotomy channels at boundary point z.
    `levels` are shared LevelSample objects (sampled on demand otherwise);
    `refined` is a solve of the same problem on a finer grid.
    """

    field_ = as_field(solution)
    z = _check_boundary_point(field_.domain, z)

    radii = [float(r) for r in radii]
    if not radii or any(r <= 0 for r in radii) or any(b >= a for a, b in zip(radii, radii[1:])):
        raise ValueError("[ERROR] probe radii must be positive and strictly decreasing")

    if levels is None:
        levels = [sample_level(solution, d) for d in default_levels(solution, radii)]
    deltas = [lv.delta for lv in levels]

    absorption, masses, fits, stable, diverges = [], [], [], [], []
    refined_absorption = [] if refined is not None else None

    for radius in radii:
        sweep = [absorption_integral(solution, z, radius, cut) for cut in deltas]
        absorption.append(sweep)

        if refined is not None:
            coarse = absorption_integral(solution, z, radius)
            fine = absorption_integral(refined, z, radius)
            refined_absorption.append([coarse, fine])
            stable.append(bool(relative_change(coarse, fine) < STABLE_CHANGE))
        else:
            stable.append(bool(relative_change(sweep[-2], sweep[-1]) < STABLE_CHANGE))

        mass = [lv.mass_near(z, radius) for lv in levels]
        masses.append(mass)

        fit = loglog_fit(deltas, mass)
        fits.append(fit)
        diverges.append(bool(fit["slope"] < DIVERGENCE_SLOPE and fit["r2"] > DIVERGENCE_R2))

    if all(diverges):
        verdict = PointVerdict.SINGULAR
    elif any(stable):
        verdict = PointVerdict.REGULAR
    else:
        verdict = PointVerdict.INCONCLUSIVE

    return ProbeRecord(
        z, radii, deltas, absorption, masses, fits, stable, diverges, verdict,
        refined_absorption, "refinement" if refined is not None else "cutoff",
    )


# =====================================================
# PARTITION OF UNITY ON ∂Ω
# =====================================================

def _smoothstep(x):
    return x ** 3 * (10.0 - 15.0 * x + 6.0 * x ** 2)


def periodic_gap(t, center: float, length: float):
    return np.abs(np.mod(np.asarray(t, dtype=float) - center + 0.5 * length, length) - 0.5 * length)


def _bump_profile(gap, spacing: float):
    x = np.clip(gap / spacing, 0.0, 1.0)
    return np.where(gap < spacing, np.cos(0.5 * np.pi * _smoothstep(x)) ** 2, 0.0)


def partition_bump(domain: Domain, center: float, spacing: float):
    """
    C² bump cos²(π/2·h(|s|/Δ)) in arc length about `center`; bumps at
    spacing Δ overlap by half and sum to one.
    """

    length = boundary_length(domain)

    def bump(sigma):
        return _bump_profile(periodic_gap(boundary_parameter(domain, sigma), center, length), spacing)

    return bump


# =====================================================
# TRACE REPORT
# =====================================================

@dataclass(eq=False)
class TraceReport:
    domain: Domain
    deltas: list
    probes: list
    centers: np.ndarray
    spacing: float
    sweeps: np.ndarray
    masses: np.ndarray
    included: np.ndarray
    thresholds: dict = field(default_factory=_thresholds)

    @property
    def singular(self) -> list:
        return [p.point for p in self.probes if p.verdict is PointVerdict.SINGULAR]

    @property
    def inconclusive(self) -> list:
        return [p.point for p in self.probes if p.verdict is PointVerdict.INCONCLUSIVE]

    @property
    def regular_mass(self) -> float:
        return float(np.sum(self.masses[self.included]))

    def bump(self, k: int):
        return partition_bump(self.domain, float(self.centers[k]), self.spacing)

    def total_variation_error(self, mu) -> float:
        """Σ_k |μ̂_k − ∫ψ_k dμ| / Σ_k ∫ψ_k dμ over the bumps kept on the regular part."""

        keep = np.nonzero(self.included)[0]
        targets = np.array([mu.pairing(self.bump(k)) for k in keep])
        scale = float(np.sum(np.abs(targets)))
        if scale == 0.0:
            return float(np.sum(np.abs(self.masses[keep])))
        return float(np.sum(np.abs(self.masses[keep] - targets)) / scale)

    def flat_mass(self) -> float:
        """Recovered mass of the kept bumps supported inside the flat part of a HalfDisk."""

        if self.domain.is_ball:
            raise ValueError("[ERROR] a Ball has no flat boundary part")
        R = self.domain.R
        inside = (self.centers - self.spacing >= 0.0) & (self.centers + self.spacing <= 2.0 * R)
        return float(np.sum(self.masses[self.included & inside]))

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame(self.sweeps.T, columns=[f"bump_{k}" for k in range(len(self.centers))])
        frame.insert(0, "delta", self.deltas)
        return frame

    def to_json(self) -> dict:
        return {
            "domain": self.domain.to_json(),
            "deltas": list(self.deltas),
            "thresholds": self.thresholds,
            "singular": [np.asarray(p).tolist() for p in self.singular],
            "inconclusive": [np.asarray(p).tolist() for p in self.inconclusive],
            "centers": self.centers.tolist(),
            "spacing": self.spacing,
            "masses": [None if not keep else float(m) for m, keep in zip(self.masses, self.included)],
            "regular_mass": self.regular_mass,
            "probes": [p.to_json() for p in self.probes],
            "sweep_csv": self.to_frame().to_csv(index=False),
        }


def classify_boundary(solution, n_probes: int = DEFAULT_PROBES, levels: list | None = None,
                      refined=None, n_jobs: int | None = None) -> TraceReport:
    """
    Dichotomy probes on an arc-length mesh anchored at the singular anchor,
    then μ from the δ → 0 limits of the bump pairings on the regular part.
    """

    field_ = as_field(solution)
    domain = field_.domain
    if n_probes < 4:
        raise ValueError("[ERROR] classify_boundary needs at least 4 probes")

    length = boundary_length(domain)
    spacing = length / n_probes
    t_anchor = float(boundary_parameter(domain, domain.singular_anchor[None, :])[0])
    centers = np.mod(t_anchor + spacing * np.arange(n_probes), length)
    points = boundary_point(domain, centers)
    radii = [r * spacing for r in PROBE_RADII]

    if levels is None:
        levels = [sample_level(solution, d) for d in default_levels(solution, radii)]
    deltas = [lv.delta for lv in levels]

    # warm the shared caches before fanning out
    _ = field_.grid.distance
    _ = field_.grad_norm()
    if refined is not None:
        _ = refined.field.grid.distance
        _ = refined.field.grad_norm()

    probes = Parallel(n_jobs=n_jobs or N_JOBS, prefer="threads")(
        delayed(dichotomy_probe)(solution, z, radii, levels, refined) for z in points
    )

    singular_t = centers[[p.verdict is PointVerdict.SINGULAR for p in probes]]
    included = np.array([
        all(periodic_gap(c, s, length) > spacing * (1.0 + 1e-9) for s in singular_t) for c in centers
    ], dtype=bool)

    sweeps = np.array([
        [_pair_level(level, domain, c, spacing, length) for level in levels] for c in centers
    ])
    masses = np.array([
        extrapolate_to_zero(deltas, sweeps[k], EXTRAPOLATION_DEGREE) if included[k] else np.nan
        for k in range(n_probes)
    ])

    report = TraceReport(domain, deltas, list(probes), centers, spacing, sweeps, masses, included)

    if report.inconclusive:
        warn(f"{len(report.inconclusive)} of {n_probes} boundary probes are inconclusive")
    info(
        f"classify_boundary on {domain}: {len(report.singular)} singular, "
        f"recovered regular mass {report.regular_mass:.6g}"
    )
    return report


def _pair_level(level: LevelSample, domain: Domain, center: float, spacing: float, length: float) -> float:
    q = level.quadrature
    psi = _bump_profile(periodic_gap(q.params, center, length), spacing)
    return float(np.sum(q.weights * level.values * psi))
