# =====================================================
# Acceptance suites
# Every check produces one row; failures are rows, never exceptions
# =====================================================

import time
from dataclasses import dataclass, field

import numpy as np
import pandas as pd
from tabulate import tabulate

from boundary_trace.dichotomy import classify_boundary
from config.settings import SolverConfig
from core.console import error, info
from core.fitting import convergence_orders, relative_change
from geometry.domain import Domain
from kernels.grid import cached_grid
from kernels.measures import BoundaryMeasure, InteriorMeasure
from lab.capacity import CapacityQuery, interior_removability_identity, point_capacity_zero
from lab.classification import SingularityVerdict, classify_isolated
from lab.experiments import dirac_collapse_experiment, increasing_mass_experiment, keller_osserman_envelope
from profiles.exponents import existence_obstruction, radial_constant, radial_singular_residual
from profiles.hemisphere import eigen_check
from profiles.separable import separable_field
from profiles.shooting import solve_profile
from solver.absorption import AbsorptionLaw
from solver.dirichlet import Solution, solve_dirichlet
from solver.extreme_cases import q1_solve_and_scale, solve_hopf_cole
from solver.interior import solve_interior

SUITES = ("constants", "profiles", "solver", "trace", "singularity", "removability", "all")

RADIAL_PAIRS = ((2, 1.25), (2, 1.4), (2, 1.1), (3, 1.2), (3, 1.4))
PROFILE_FOUND = (1.2, 1.3, 1.4, 1.45)
PROFILE_MISSING = (1.5, 1.55, 1.6)
BISECTION_WIDTH = 0.02
WEAK_MASSES = (0.5, 1.0, 2.0)
ENVELOPE_SLACK = 1e-8


@dataclass
class SuiteRow:
    criterion: int
    check: str
    value: float
    threshold: str
    passed: bool
    seconds: float = 0.0
    note: str = ""


@dataclass
class SuiteReport:
    name: str
    rows: list = field(default_factory=list)
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return bool(self.rows) and all(row.passed for row in self.rows)

    @property
    def failures(self) -> list:
        return [row for row in self.rows if not row.passed]

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame([row.__dict__ for row in self.rows])

    def table(self) -> str:
        frame = self.to_frame()
        if frame.empty:
            return "(no rows)"
        frame["passed"] = frame["passed"].map({True: "PASS", False: "FAIL"})
        frame["seconds"] = frame["seconds"].round(2)
        return tabulate(frame, headers="keys", tablefmt="grid", showindex=False)

    def to_json(self) -> dict:
        return {
            "suite": self.name,
            "passed": self.passed,
            "seconds": self.seconds,
            "rows": [row.__dict__ for row in self.rows],
        }


class _Recorder:
    """Collects rows; a check that raises becomes a failed row."""

    def __init__(self, report: SuiteReport):
        self.report = report

    def check(self, criterion: int, name: str, threshold: str, func):
        start = time.perf_counter()
        try:
            value, passed, note = func()
        except Exception as e:
            value, passed, note = float("nan"), False, f"{type(e).__name__}: {e}"
            error(f"suite check {name} failed: {note}")
        row = SuiteRow(criterion, name, float(value), threshold, bool(passed),
                       time.perf_counter() - start, note)
        self.report.rows.append(row)
        return row


# =====================================================
# CONSTANTS
# =====================================================

def _constants(rec: _Recorder, quick: bool):
    def lambda_value():
        err = abs(radial_constant(2, 1.25) - 27.0)
        return err, err < 1e-12, ""

    rec.check(1, "Lambda_{2,1.25} = 27", "< 1e-12", lambda_value)

    def residuals():
        radii = np.linspace(0.1, 1.0, 10)
        worst = max(radial_singular_residual(N, q, radii) for N, q in RADIAL_PAIRS)
        return worst, worst < 1e-8, f"{len(RADIAL_PAIRS)} (N, q) pairs"

    rec.check(1, "radial singular residual", "< 1e-8", residuals)

    def eigen():
        fitted, deviation = eigen_check(2, 2000)
        return deviation, deviation < 1e-6, f"lambda1 = {fitted:.10f}"

    rec.check(2, "hemisphere eigen-check N=2", "< 1e-6", eigen)

    def capacity():
        mismatches = 0
        for N in (2, 3):
            q_c, q_star = (N + 1.0) / N, N / (N - 1.0)
            sweep = sorted(set(np.round(np.linspace(1.05, 1.95, 19), 10)) | {q_c, q_star})
            for q in sweep:
                boundary = point_capacity_zero(CapacityQuery.boundary(N, q))
                interior = point_capacity_zero(CapacityQuery.interior(N, q))
                mismatches += int(boundary != (q >= q_c)) + int(interior != (q >= q_star))
        return mismatches, mismatches == 0, "boundary family at q_c, interior at q*"

    rec.check(11, "capacity transitions", "= 0 mismatches", capacity)


# =====================================================
# PROFILES
# =====================================================

def _profiles(rec: _Recorder, quick: bool):
    def outcomes():
        wrong = [q for q in PROFILE_FOUND if not solve_profile(2, q).found]
        wrong += [q for q in PROFILE_MISSING if solve_profile(2, q).found]
        return len(wrong), not wrong, f"wrong outcomes at {wrong}" if wrong else ""

    rec.check(3, "profile existence N=2", "= 0 wrong", outcomes)

    def bisection():
        low, high = PROFILE_FOUND[0], PROFILE_MISSING[-1]
        while high - low > BISECTION_WIDTH:
            mid = 0.5 * (low + high)
            if solve_profile(2, mid).found:
                low = mid
            else:
                high = mid
        estimate = 0.5 * (low + high)
        return abs(estimate - 1.5), abs(estimate - 1.5) <= BISECTION_WIDTH, f"q_c estimate {estimate:.4f}"

    rec.check(3, "q_c by bisection", "<= 0.02", bisection)

    def equivalence():
        count = 6 if quick else 20
        mismatched = 0
        for N in (2, 3):
            for q in np.linspace(1.05, 1.95, count):
                mismatched += int(existence_obstruction(N, q) == solve_profile(N, q).found)
        return mismatched, mismatched == 0, f"{count} q-values per dimension"

    rec.check(4, "obstruction equivalence", "= 0 mismatches", equivalence)


# =====================================================
# SOLVER
# =====================================================

def _trig_data(domain: Domain) -> tuple:
    """Density 1 + 0.5cos 2θ and its exact harmonic extension 1 + 0.5(x² − y²)."""
    mu = BoundaryMeasure.from_density(
        domain, lambda s: 1.0 + 0.5 * np.cos(2.0 * np.arctan2(s[:, 1], s[:, 0]))
    )
    def exact(p):
        return 1.0 + 0.5 * (p[..., 0] ** 2 - p[..., 1] ** 2) / domain.R ** 2

    return mu, exact


def _solver_suite(rec: _Recorder, quick: bool):
    ball = Domain.ball(2, 1.0)
    mu, exact = _trig_data(ball)
    zero = AbsorptionLaw.zero()

    def kernel_backend():
        n_r, n_theta = (64, 64) if quick else (256, 128)
        cfg = SolverConfig(backend="picard").with_grid(n_r, n_theta)
        u = solve_dirichlet(ball, zero, mu, cfg)
        err = float(np.max(np.abs(u.values - exact(u.grid.points))))
        return err, err < 1e-6, f"{n_r}x{n_theta}"

    rec.check(5, "linear reproduction (kernel)", "< 1e-6", kernel_backend)

    def fd_order():
        sizes = ((16, 32), (32, 64), (64, 128)) if quick else ((16, 32), (32, 64), (64, 128), (128, 256))
        h, errors = [], []
        for n_r, n_theta in sizes:
            cfg = SolverConfig(backend="fd", lift="boundary").with_grid(n_r, n_theta)
            u = solve_dirichlet(ball, zero, mu, cfg)
            h.append(1.0 / n_r)
            errors.append(float(np.max(np.abs(u.values - exact(u.grid.points)))))
        orders = convergence_orders(h, errors)
        order = float(np.mean(orders[-2:]))
        return order, abs(order - 2.0) <= 0.3, f"errors {[f'{e:.2e}' for e in errors]}"

    rec.check(5, "linear FD order", "2.0 +/- 0.3", fd_order)

    # atom experiments on the HalfDisk: its log-polar grid resolves the anchor atom
    half = Domain.half_disk(2, 1.0)
    grid_size = (48, 32) if quick else (64, 64)
    cfg = SolverConfig().with_grid(*grid_size)
    law = AbsorptionLaw.power(1.25)
    solutions = {}

    def weak_limit():
        for c in WEAK_MASSES:
            solutions[c] = solve_dirichlet(half, law, BoundaryMeasure.dirac(half, None, c), cfg)
        report = classify_isolated(solutions[1.0])
        if report.verdict is not SingularityVerdict.WEAK:
            return float("nan"), False, f"verdict {report}"
        return abs(report.c - 1.0), abs(report.c - 1.0) <= 0.05, f"c = {report.c:.4f}"

    rec.check(6, "weak singularity lim u/P = c", "<= 0.05", weak_limit)

    def monotone_in_c():
        values = [solutions[c].values for c in WEAK_MASSES]
        bad = sum(int(np.sum(b < a - 1e-8)) for a, b in zip(values, values[1:]))
        return bad, bad == 0, "c in {0.5, 1, 2}"

    rec.check(6, "monotone in c", "= 0 nodes", monotone_in_c)

    def envelope():
        grid = solutions[1.0].grid
        bound = keller_osserman_envelope(half, grid, 1.25)
        beyond = sum(int(np.sum(s.values > bound * (1.0 + ENVELOPE_SLACK))) for s in solutions.values())
        return beyond, beyond == 0, "u <= C4(q)|x - a|^-beta"

    rec.check(8, "Keller-Osserman envelope", "= 0 nodes", envelope)

    def gradient_bound():
        power = 1.0 / (1.25 - 1.0)
        bounds = []
        for size in (grid_size, (grid_size[0] // 2, grid_size[1] // 2)):
            u = solve_dirichlet(half, law, BoundaryMeasure.dirac(half, None, 1.0), SolverConfig().with_grid(*size))
            inside = u.grid.distance > 0
            bounds.append(float(np.max((u.field.grad_norm() * u.grid.distance ** power)[inside])))
        change = relative_change(bounds[1], bounds[0])
        return change, change < 0.5, f"max |grad u| d^(1/(q-1)) = {bounds}"

    rec.check(8, "gradient bound under refinement", "< 50% change", gradient_bound)

    def hopf_cole():
        size = (64, 64) if quick else (256, 128)
        data = BoundaryMeasure.from_density(ball, lambda s: 1.0 + 0.5 * np.cos(np.arctan2(s[:, 1], s[:, 0])))
        solution = solve_hopf_cole(ball, data, SolverConfig().with_grid(*size))
        err = solution.meta["generic_error"]
        return err, err < 1e-5, f"{size[0]}x{size[1]}"

    rec.check(10, "Hopf-Cole q=2", "< 1e-5", hopf_cole)

    def homogeneity():
        _, err = q1_solve_and_scale(ball, None, 2.0, cfg)
        return err, err < 1e-4, "scale 2"

    rec.check(10, "q=1 homogeneity", "< 1e-4", homogeneity)


# =====================================================
# TRACE
# =====================================================

def _trace(rec: _Recorder, quick: bool):
    ball = Domain.ball(2, 1.0)
    mu, _ = _trig_data(ball)
    n_probes = 8 if quick else 16

    def linear_trace():
        cfg = SolverConfig(backend="picard").with_grid(*((32, 64) if quick else (64, 128)))
        u = solve_dirichlet(ball, AbsorptionLaw.zero(), mu, cfg)
        report = classify_boundary(u, n_probes)
        tv = report.total_variation_error(mu)
        return tv, tv < 0.02 and not report.singular, f"{len(report.singular)} singular probes"

    rec.check(12, "linear trace recovers mu", "< 2% TV, S empty", linear_trace)

    def separable_trace():
        half = Domain.half_disk(2, 1.0)
        profile = solve_profile(2, 1.3)
        grid = cached_grid(half, *((48, 32) if quick else (64, 64)))
        u = Solution.from_field(separable_field(profile, grid), AbsorptionLaw.power(1.3))
        report = classify_boundary(u, n_probes)
        anchor_only = len(report.singular) == 1 and np.allclose(report.singular[0], half.singular_anchor)
        mass = abs(report.flat_mass())
        return mass, anchor_only and mass < 0.02, f"singular {[np.round(p, 3).tolist() for p in report.singular]}"

    rec.check(12, "separable trace S = {anchor}, mu = 0", "< 0.02 flat mass", separable_trace)


# =====================================================
# SINGULARITY
# =====================================================

def _singularity(rec: _Recorder, quick: bool):
    half = Domain.half_disk(2, 1.0)
    masses = (1.0, 4.0) if quick else (1.0, 4.0, 16.0, 64.0)
    cfg = SolverConfig().with_grid(*((48, 32) if quick else (64, 64)))
    sweep = {}

    def run_sweep():
        sweep["result"] = increasing_mass_experiment(half, 1.3, masses, cfg)
        result = sweep["result"]
        bad = sum(result.monotone_violations)
        return bad, bad == 0, f"masses {list(masses)}"

    rec.check(7, "increasing mass monotone", "= 0 nodes", run_sweep)

    def envelope():
        result = sweep["result"]
        return sum(result.envelope_violations), result.within_envelope, ""

    rec.check(8, "increasing mass envelope", "= 0 nodes", envelope)

    def saturation():
        result = sweep["result"]
        return result.saturation_change, result.saturated, "half-annulus r in [0.2, 0.4]"

    rec.check(7, "saturation", "< 5%", saturation)

    def profile_match():
        distance = sweep["result"].profile_distance
        if distance is None:
            return float("nan"), False, "no profile"
        return distance, distance < 0.05, "sup distance to the shot profile"

    rec.check(7, "self-similar profile vs shooting", "< 5%", profile_match)


# =====================================================
# REMOVABILITY
# =====================================================

def _removability(rec: _Recorder, quick: bool):
    ball = Domain.ball(2, 1.0)
    size = (32, 64) if quick else (64, 128)
    cfg = SolverConfig(strict=False).with_grid(*size)
    widths = (1.6, 0.8, 0.4, 0.2) if quick else (1.6, 0.8, 0.4, 0.2, 0.1)

    def collapse():
        sweep = dirac_collapse_experiment(ball, 1.6, 1.0, widths, cfg)
        ratio = sweep.decay_ratio
        return ratio, sweep.strictly_decreasing and ratio < 0.25, f"widths {list(widths)}"

    rec.check(9, "collapse q=1.6", "decreasing, last < 25% first", collapse)

    def control():
        sweep = dirac_collapse_experiment(ball, 1.3, 1.0, widths, cfg)
        change = sweep.last_change
        positive = bool(np.all(sweep.values[-1] > 0))
        return change, positive and change < 0.1, "subcritical control converges"

    rec.check(9, "control q=1.3", "< 10% last change", control)

    def identity():
        nu = InteriorMeasure.dirac(ball, None, 1.0)
        solution = solve_interior(ball, AbsorptionLaw.power(1.6), nu, SolverConfig().with_grid(*size))
        certificate = interior_removability_identity(solution)
        change = relative_change(certificate.lhs[-2], certificate.lhs[-1])
        return change, certificate.holds and certificate.bounded, f"ramp {certificate.ramp}"

    rec.check(9, "interior energy identity q=1.6", "< 5% change", identity)


SUITE_CHECKS = {
    "constants": (_constants,),
    "profiles": (_profiles,),
    "solver": (_solver_suite,),
    "trace": (_trace,),
    "singularity": (_singularity,),
    "removability": (_removability,),
}
SUITE_CHECKS["all"] = tuple(step for name in SUITES[:-1] for step in SUITE_CHECKS[name])


def suite(name: str, quick: bool = False) -> SuiteReport:
    """Runs the named acceptance suite; `quick` shrinks grids and sweeps."""

    if name not in SUITE_CHECKS:
        raise ValueError(f"[ERROR] unknown suite {name!r}; choose from {SUITES}")

    report = SuiteReport(name)
    recorder = _Recorder(report)
    start = time.perf_counter()
    for step in SUITE_CHECKS[name]:
        step(recorder, quick)
    report.seconds = time.perf_counter() - start

    info(f"suite {name}: {len(report.rows) - len(report.failures)}/{len(report.rows)} rows pass "
         f"in {report.seconds:.1f}s")
    return report
