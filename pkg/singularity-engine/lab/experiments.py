# =====================================================
# Removability and saturation experiments at the anchor
#
# collapse:       mass-c bumps of shrinking width, q ≥ q_c → u → 0
# increasing mass: c·δ_a with c ↑, q < q_c → u ↑ u_{∞,a} ≤ C_KO|x − a|^{−β}
# =====================================================

from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from config.settings import SolverConfig
from core.console import info, warn
from core.errors import QOutOfRange
from core.fitting import relative_change
from geometry.domain import Domain, boundary_length, boundary_parameter, level_surface
from kernels.measures import BoundaryMeasure
from lab.scaling import SelfSimilarEstimate, extract_self_similar
from profiles.exponents import exponents, keller_osserman_constant
from profiles.shooting import solve_profile
from solver.absorption import AbsorptionLaw
from solver.dirichlet import solve_dirichlet

# ---------------- CONFIG ----------------

PROBE_DEPTHS = (0.2, 0.35, 0.5)
MIN_WIDTH_CELLS = 2
NODES_PER_WIDTH = 16
MONOTONE_SLACK = 1e-8
ENVELOPE_SLACK = 1e-8
SATURATION_ANNULUS = (0.2, 0.4)
SATURATION_TOL = 0.05
EXTRACTION_ELLS = (0.2, 0.1, 0.05)
PROFILE_TOL = 0.05


# =====================================================
# DIRAC COLLAPSE
# =====================================================

@dataclass(eq=False)
class CollapseSweep:
    q: float
    c: float
    widths: list
    probes: np.ndarray
    values: np.ndarray
    iterations: list = field(default_factory=list)

    @property
    def strictly_decreasing(self) -> bool:
        return bool(np.all(np.diff(self.values, axis=0) < 0))

    @property
    def decay_ratio(self) -> float:
        """Largest last/first probe ratio."""
        first, last = self.values[0], self.values[-1]
        if not np.any(first > 0):
            return 0.0
        return float(np.max(last[first > 0] / first[first > 0]))

    @property
    def last_change(self) -> float:
        if len(self.values) < 2:
            return 0.0
        return max(relative_change(a, b) for a, b in zip(self.values[-2], self.values[-1]))

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame(self.values, columns=[f"probe_{k}" for k in range(self.probes.shape[0])])
        frame.insert(0, "width", self.widths)
        frame["iterations"] = self.iterations
        return frame

    def to_json(self) -> dict:
        return {
            "q": self.q,
            "c": self.c,
            "widths": list(self.widths),
            "probes": self.probes.tolist(),
            "strictly_decreasing": self.strictly_decreasing,
            "decay_ratio": self.decay_ratio,
            "last_change": self.last_change,
            "sweep_csv": self.to_frame().to_csv(index=False),
        }


def anchor_bump(domain: Domain, c: float, width: float, m: int | None = None) -> BoundaryMeasure:
    """Mass-c cosine bump of total width `width` (arc length) centred at the anchor."""

    length = boundary_length(domain)
    m = int(max(m or 0, np.ceil(NODES_PER_WIDTH * length / width)))
    quadrature = level_surface(domain, 0.0, m)

    centre = float(boundary_parameter(domain, domain.singular_anchor[None, :])[0])
    gap = np.abs(np.mod(quadrature.params - centre + 0.5 * length, length) - 0.5 * length)
    bump = np.where(gap < 0.5 * width, np.cos(np.pi * gap / width) ** 2, 0.0)

    density = c * bump / np.sum(bump * quadrature.weights)
    return BoundaryMeasure(domain, [], density, quadrature)


def dirac_collapse_experiment(domain: Domain, q: float, c: float, widths, cfg: SolverConfig | None = None,
                              probes=None) -> CollapseSweep:
    """
    Solves with bump data of each width (FD backend, discrete harmonic
    lift) and records u at interior probes along the anchor normal.
    Runs with q < q_c are accepted as subcritical controls.
    """

    if not domain.is_ball:
        raise ValueError("[ERROR] the collapse sweep runs on a Ball (bumps on a curved boundary)")

    pack = exponents(domain.N, q)
    if not pack.q >= pack.q_c:
        warn(f"q = {q:g} < q_c = {pack.q_c:g}: collapse sweep runs as a subcritical control")
    if c < 0:
        raise ValueError(f"[ERROR] bump mass must be nonnegative, got {c}")

    cfg = (cfg or SolverConfig()).replace(backend="fd", lift="boundary")
    cell = 2.0 * np.pi * domain.R / cfg.grid.n_theta

    widths = [float(w) for w in widths]
    if not widths or any(w < MIN_WIDTH_CELLS * cell * (1.0 - 1e-12) for w in widths):
        raise ValueError(f"[ERROR] bump widths must be at least {MIN_WIDTH_CELLS} cells ({MIN_WIDTH_CELLS * cell:.4g})")
    if any(b >= a for a, b in zip(widths, widths[1:])):
        raise ValueError("[ERROR] bump widths must decrease strictly")

    if probes is None:
        probes = domain.singular_anchor + np.outer(PROBE_DEPTHS, domain.anchor_normal) * domain.R
    probes = np.asarray(probes, dtype=float)

    law = AbsorptionLaw.power(q)
    rows, iterations = [], []
    previous = None

    for width in widths:
        mu = anchor_bump(domain, c, width, 4 * cfg.grid.n_theta) if c > 0 else BoundaryMeasure.zero(domain)
        solution = solve_dirichlet(domain, law, mu, cfg, warm_start=previous)
        rows.append(solution.field.sample(probes))
        iterations.append(int(solution.meta.get("iterations", 0)))
        previous = solution.field

    sweep = CollapseSweep(float(q), float(c), widths, probes, np.array(rows), iterations)
    info(
        f"dirac_collapse q={q:g} c={c:g}: decreasing={sweep.strictly_decreasing}, "
        f"last/first={sweep.decay_ratio:.3f}"
    )
    return sweep


# =====================================================
# INCREASING MASS
# =====================================================

@dataclass(eq=False)
class MassSweep:
    q: float
    masses: list
    max_values: list
    iterations: list
    monotone_violations: list
    envelope_violations: list
    saturation_change: float
    extraction: SelfSimilarEstimate | None = None
    profile_distance: float | None = None
    solutions: list = field(default_factory=list, repr=False)

    @property
    def monotone(self) -> bool:
        return not any(self.monotone_violations)

    @property
    def within_envelope(self) -> bool:
        return not any(self.envelope_violations)

    @property
    def saturated(self) -> bool:
        return self.saturation_change < SATURATION_TOL

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({
            "mass": self.masses,
            "max_u": self.max_values,
            "iterations": self.iterations,
            "monotone_violations": [0] + list(self.monotone_violations),
            "envelope_violations": self.envelope_violations,
        })

    def to_json(self) -> dict:
        return {
            "q": self.q,
            "masses": list(self.masses),
            "monotone": self.monotone,
            "within_envelope": self.within_envelope,
            "saturation_change": self.saturation_change,
            "saturated": self.saturated,
            "profile_distance": self.profile_distance,
            "extraction": None if self.extraction is None else self.extraction.to_json(),
            "sweep_csv": self.to_frame().to_csv(index=False),
        }


def keller_osserman_envelope(domain: Domain, grid, q: float) -> np.ndarray:
    """C_KO(q)|x − a|^{−β} at the grid nodes."""
    beta = exponents(domain.N, q).beta
    gap = np.linalg.norm(grid.points - domain.singular_anchor, axis=-1)
    with np.errstate(divide="ignore"):
        return keller_osserman_constant(q) * gap ** (-beta)


def increasing_mass_experiment(domain: Domain, q: float, masses, cfg: SolverConfig | None = None,
                               ells=None, profile=None) -> MassSweep:
    """
    Anchor atoms of increasing mass: nodewise monotonicity, the universal
    envelope, saturation on the half-annulus r ∈ [0.2R, 0.4R] and the
    self-similar profile of the last field against ω_s.
    """

    pack = exponents(domain.N, q)
    if not pack.subcritical:
        raise QOutOfRange(f"[ERROR] increasing-mass limits need q < q_c = {pack.q_c:g}, got {q}")

    masses = [float(c) for c in masses]
    if not masses or masses[0] <= 0 or any(b <= a for a, b in zip(masses, masses[1:])):
        raise ValueError("[ERROR] masses must be positive and strictly increasing")

    cfg = cfg or SolverConfig()
    law = AbsorptionLaw.power(q)

    solutions = []
    previous = None
    for mass in masses:
        solution = solve_dirichlet(domain, law, BoundaryMeasure.dirac(domain, None, mass), cfg, previous)
        solutions.append(solution)
        previous = solution.field

    grid = solutions[-1].grid
    peak = float(np.max(solutions[-1].values))

    monotone = [
        int(np.sum(later.values < earlier.values - MONOTONE_SLACK * peak))
        for earlier, later in zip(solutions, solutions[1:])
    ]

    envelope = keller_osserman_envelope(domain, grid, q)
    beyond = [int(np.sum(s.values > envelope * (1.0 + ENVELOPE_SLACK))) for s in solutions]

    gap = np.linalg.norm(grid.points - domain.singular_anchor, axis=-1)
    low, high = SATURATION_ANNULUS
    band = (gap >= low * domain.R) & (gap <= high * domain.R)
    if len(solutions) > 1 and np.any(band):
        last, before = solutions[-1].values[band], solutions[-2].values[band]
        saturation = float(np.max(np.abs(last - before)) / max(float(np.max(last)), 1e-300))
    else:
        saturation = float("inf")

    ells = [e * domain.R for e in (ells or EXTRACTION_ELLS)]
    extraction = extract_self_similar(solutions[-1], ells, q)
    profile = profile if profile is not None else solve_profile(domain.N, q)
    distance = extraction.distance_to(profile) if profile.found else None

    sweep = MassSweep(
        float(q), masses, [float(np.max(s.values)) for s in solutions],
        [int(s.meta.get("iterations", 0)) for s in solutions],
        monotone, beyond, saturation, extraction, distance, solutions,
    )
    info(
        f"increasing_mass q={q:g}: monotone={sweep.monotone}, envelope={sweep.within_envelope}, "
        f"saturation {saturation:.3e}, profile distance {distance}"
    )
    return sweep
