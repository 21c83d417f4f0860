# =====================================================
# Registry targets
# Every target = parameter validator + runner + the claim it tests
#
# validate(params) -> resolved objects (raises SpecValidation)
# execute(resolved, ctx) -> compact summary dict
# =====================================================

import os
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import pandas as pd

from boundary_trace.dichotomy import classify_boundary
from boundary_trace.harnack import harnack_ratio
from config.settings import GridConfig, ShootingConfig, SolverConfig
from core.errors import ExponentOutOfRange, SpecValidation
from geometry.domain import Domain, level_surface
from kernels.field import GridField
from kernels.grid import cached_grid
from kernels.marcinkiewicz import Weight, marcinkiewicz_norm, weak_tail_check
from kernels.measures import BoundaryMeasure, InteriorMeasure
from kernels.potentials import apply_poisson
from lab.capacity import CapacityQuery, capacity_scaling, interior_removability_identity, point_capacity_zero
from lab.classification import classify_isolated
from lab.experiments import anchor_bump, dirac_collapse_experiment, increasing_mass_experiment
from lab.scaling import rescale
from profiles.exponents import (
    existence_obstruction,
    exponents,
    keller_osserman_constant,
    radial_constant,
    supersolution_height,
)
from profiles.hemisphere import eigen_check
from profiles.separable import separable_field
from profiles.shooting import solve_profile
from reports.export import export_csv, export_json
from solver.absorption import AbsorptionLaw
from solver.dirichlet import Solution, solve_dirichlet
from solver.exhaustion import solve_maximal_exhaustion
from solver.extreme_cases import q1_solve_and_scale, solve_hopf_cole
from solver.interior import solve_interior

DEFAULT_DOMAIN = {"kind": "Ball", "N": 2, "R": 1.0}
DEFAULT_DENSITY_NODES = 512
RANDOM_MODES = 4


# =====================================================
# RUN CONTEXT
# =====================================================

@dataclass
class RunContext:
    artifact_dir: str
    seed: int
    claim: str
    artifacts: list = field(default_factory=list)

    @property
    def rng(self) -> np.random.Generator:
        return np.random.default_rng(self.seed)

    def path(self, filename: str) -> str:
        os.makedirs(self.artifact_dir, exist_ok=True)
        return os.path.join(self.artifact_dir, filename)

    def save_json(self, filename: str, payload: dict):
        self.artifacts.append(export_json(payload, self.path(filename), self.claim))

    def save_csv(self, filename: str, frame: pd.DataFrame, **sidecar):
        self.artifacts.extend(export_csv(frame, self.path(filename), self.claim, **sidecar))


@dataclass(frozen=True)
class Operation:
    name: str
    validate: Callable[[dict], dict]
    execute: Callable[[dict, RunContext], dict]
    claim: str


# =====================================================
# PARAMETER HELPERS
# =====================================================

def _fail(message: str):
    raise SpecValidation(f"[ERROR] {message}")


def _number(params: dict, key: str, default=None, low=None, high=None, inclusive=False) -> float:
    value = params.get(key, default)
    if value is None:
        _fail(f"parameter {key!r} is required")
    try:
        value = float(value)
    except (TypeError, ValueError):
        _fail(f"parameter {key!r} must be a number, got {value!r}")
    if not np.isfinite(value):
        _fail(f"parameter {key!r} must be finite")

    too_low = low is not None and (value < low or value == low and not inclusive)
    too_high = high is not None and (value > high or value == high and not inclusive)
    if too_low or too_high:
        bracket = "[]" if inclusive else "()"
        _fail(f"parameter {key!r} = {value:g} outside {bracket[0]}{low}, {high}{bracket[1]}")
    return value


def _integer(params: dict, key: str, default=None, low: int = 1) -> int:
    value = params.get(key, default)
    if value is None or int(value) != value or int(value) < low:
        _fail(f"parameter {key!r} must be an integer >= {low}, got {value!r}")
    return int(value)


def _dimension(params: dict) -> int:
    N = params.get("N", 2)
    if N not in (2, 3):
        _fail(f"dimension N must be 2 or 3, got {N!r}")
    return int(N)


def _q(params: dict, low: float = 1.0, high: float = 2.0, key: str = "q") -> float:
    return _number(params, key, low=low, high=high)


def _decreasing(params: dict, key: str, default=None) -> list:
    values = params.get(key, default)
    if not values:
        _fail(f"parameter {key!r} must be a non-empty list")
    values = [float(v) for v in values]
    if any(b >= a for a, b in zip(values, values[1:])):
        _fail(f"parameter {key!r} must decrease strictly")
    return values


def _domain(params: dict) -> Domain:
    return Domain.from_json(params.get("domain", DEFAULT_DOMAIN))


def _planar(domain: Domain) -> Domain:
    if domain.N != 2:
        _fail("grid solves are planar; use N = 2")
    return domain


def _law(params: dict) -> AbsorptionLaw:
    if "law" in params:
        return AbsorptionLaw.from_json(params["law"])
    return AbsorptionLaw.power(_q(params, low=0.0, high=np.inf))


def _solver(params: dict) -> SolverConfig:
    return SolverConfig.from_json(params.get("solver"))


def _density(domain: Domain, block: dict, m: int):
    kind = block.get("kind", "constant")

    if kind == "bump":
        bump = anchor_bump(domain, _number(block, "mass", low=0.0), _number(block, "width", low=0.0), m)
        return bump.density, bump.quadrature

    quadrature = level_surface(domain, 0.0, m)
    theta = np.arctan2(quadrature.boundary_points[:, 1], quadrature.boundary_points[:, 0])

    if kind == "constant":
        density = np.full(m, _number(block, "value", default=1.0))
    elif kind == "cosine":
        a, b = _number(block, "a", default=1.0), _number(block, "b", default=0.5)
        density = a + b * np.cos(_integer(block, "k", default=1) * theta)
    elif kind == "cos2":
        density = _number(block, "scale", default=1.0) * np.cos(theta) ** 2
    else:
        _fail(f"unknown density kind {kind!r} (constant, cosine, cos2, bump)")
    return density, quadrature


def build_measure(domain: Domain, block: dict | None) -> BoundaryMeasure:
    """
    Boundary data from a spec block:
    {"atoms": [{"point": [x, y] | null, "mass": c}], "density": {...}, "m": nodes}.
    A null point is the singular anchor.
    """

    block = block or {}
    atoms = [
        (domain.singular_anchor if atom.get("point") is None else np.asarray(atom["point"], dtype=float),
         _number(atom, "mass", low=0.0))
        for atom in block.get("atoms", [])
    ]

    density, quadrature = None, None
    if block.get("density") is not None:
        m = _integer(block, "m", default=DEFAULT_DENSITY_NODES, low=8)
        density, quadrature = _density(domain, block["density"], m)
    return BoundaryMeasure(domain, atoms, density, quadrature)


def build_interior_measure(domain: Domain, block: dict | None) -> InteriorMeasure:
    block = block or {}
    atoms = [
        (np.zeros(domain.N) if atom.get("point") is None else np.asarray(atom["point"], dtype=float),
         _number(atom, "mass", low=0.0))
        for atom in block.get("atoms", [])
    ]
    return InteriorMeasure(domain, atoms)


def _source(params: dict) -> dict:
    """Field to analyse: a Dirichlet solve, or the separable field on a HalfDisk grid."""

    if "separable" in params:
        block = params["separable"]
        q = _q(block, high=1.5)
        domain = _planar(Domain.from_json(params.get("domain", {"kind": "HalfDisk", "N": 2, "R": 1.0})))
        if domain.is_ball:
            _fail("separable fields live on HalfDisk grids")
        grid = GridConfig.from_json(block.get("grid"))
        return {"kind": "separable", "q": q, "domain": domain, "grid": grid,
                "scale": _number(block, "scale", default=1.0, low=0.0)}

    domain = _planar(_domain(params))
    return {"kind": "dirichlet", "domain": domain, "law": _law(params),
            "mu": build_measure(domain, params.get("data")), "cfg": _solver(params)}


def _produce(source: dict):
    if source["kind"] == "separable":
        profile = solve_profile(2, source["q"])
        if not profile.found:
            _fail(f"no separable profile for q = {source['q']:g}: {profile.reason}")
        grid_cfg = source["grid"]
        grid = cached_grid(source["domain"], grid_cfg.n_r, grid_cfg.n_theta, grid_cfg.grading)
        field_ = separable_field(profile, grid, source["scale"])
        return Solution.from_field(field_, AbsorptionLaw.power(source["q"])), profile

    solution = solve_dirichlet(source["domain"], source["law"], source["mu"], source["cfg"])
    return solution, None


# =====================================================
# CONSTANTS AND PROFILES
# =====================================================

def _validate_exponents(params: dict) -> dict:
    return {"N": _dimension(params), "q": _q(params)}


def _run_exponents(resolved: dict, ctx: RunContext) -> dict:
    N, q = resolved["N"], resolved["q"]
    summary = exponents(N, q).to_json()
    try:
        summary["radial_constant"] = radial_constant(N, q)
    except ExponentOutOfRange:
        summary["radial_constant"] = None
    summary["keller_osserman_constant"] = keller_osserman_constant(q)
    summary["existence_obstruction"] = existence_obstruction(N, q)
    summary["supersolution_height"] = supersolution_height(N, q)
    ctx.save_json("exponents.json", summary)
    return summary


def _validate_eigen(params: dict) -> dict:
    return {"N": _dimension(params), "n": _integer(params, "n", default=2000, low=16)}


def _run_eigen(resolved: dict, ctx: RunContext) -> dict:
    fitted, deviation = eigen_check(resolved["N"], resolved["n"])
    summary = {"N": resolved["N"], "n": resolved["n"], "lambda1": fitted, "deviation": deviation}
    ctx.save_json("eigen_check.json", summary)
    return summary


def _validate_profile(params: dict) -> dict:
    return {"N": _dimension(params), "q": _q(params),
            "shooting": ShootingConfig.from_json(params.get("shooting"))}


def _run_profile(resolved: dict, ctx: RunContext) -> dict:
    profile = solve_profile(resolved["N"], resolved["q"], resolved["shooting"])
    summary = {"found": profile.found, **profile.to_json()}
    if profile.found:
        ctx.save_csv("profile.csv", profile.to_frame(), profile=profile.to_json())
    else:
        ctx.save_json("no_profile.json", profile.to_json())
    return summary


# =====================================================
# SOLVERS
# =====================================================

def _validate_dirichlet(params: dict) -> dict:
    domain = _planar(_domain(params))
    return {"domain": domain, "law": _law(params), "mu": build_measure(domain, params.get("data")),
            "cfg": _solver(params)}


def _solution_summary(solution: Solution, ctx: RunContext, stem: str) -> dict:
    solution.save(ctx.path(f"{stem}.csv"), ctx.path(f"{stem}.json"))
    ctx.artifacts.extend([ctx.path(f"{stem}.csv"), ctx.path(f"{stem}.json")])
    ctx.save_json(f"{stem}.meta.json", {"csv": f"{stem}.csv"})
    summary = solution.summary()
    summary.pop("domain", None)
    return summary


def _run_dirichlet(resolved: dict, ctx: RunContext) -> dict:
    solution = solve_dirichlet(resolved["domain"], resolved["law"], resolved["mu"], resolved["cfg"])
    summary = _solution_summary(solution, ctx, "solution")
    summary["data_mass"] = resolved["mu"].total_mass
    return summary


def _validate_interior(params: dict) -> dict:
    domain = _planar(_domain(params))
    return {"domain": domain, "law": _law(params), "nu": build_interior_measure(domain, params.get("data")),
            "cfg": _solver(params)}


def _run_interior(resolved: dict, ctx: RunContext) -> dict:
    solution = solve_interior(resolved["domain"], resolved["law"], resolved["nu"], resolved["cfg"])
    summary = _solution_summary(solution, ctx, "interior")
    summary["data_mass"] = resolved["nu"].total_mass
    return summary


def _validate_exhaustion(params: dict) -> dict:
    resolved = _validate_dirichlet(params)
    resolved["deltas"] = _decreasing(params, "deltas")
    return resolved


def _run_exhaustion(resolved: dict, ctx: RunContext) -> dict:
    solution = solve_maximal_exhaustion(
        resolved["domain"], resolved["law"], resolved["mu"], resolved["deltas"], resolved["cfg"]
    )
    summary = _solution_summary(solution, ctx, "exhaustion")
    for key in ("monotone_gaps", "sup_differences"):
        if key in solution.meta:
            summary[key] = solution.meta[key]
    return summary


def _validate_hopf_cole(params: dict) -> dict:
    domain = _planar(_domain(params))
    data = params.get("data") or {"density": {"kind": "cosine", "a": 1.0, "b": 0.5}}
    return {"domain": domain, "mu": build_measure(domain, data), "cfg": _solver(params)}


def _run_hopf_cole(resolved: dict, ctx: RunContext) -> dict:
    solution = solve_hopf_cole(resolved["domain"], resolved["mu"], resolved["cfg"])
    summary = _solution_summary(solution, ctx, "hopf_cole")
    for key in ("generic_error", "shift", "fa4_bound"):
        summary[key] = solution.meta[key]
    return summary


def _validate_q1(params: dict) -> dict:
    domain = _planar(_domain(params))
    point = params.get("point")
    return {"domain": domain, "point": None if point is None else np.asarray(point, dtype=float),
            "scale": _number(params, "scale", default=2.0, low=0.0), "cfg": _solver(params)}


def _run_q1(resolved: dict, ctx: RunContext) -> dict:
    solution, error = q1_solve_and_scale(resolved["domain"], resolved["point"], resolved["scale"], resolved["cfg"])
    summary = _solution_summary(solution, ctx, "q1_scaled")
    summary["scale"] = resolved["scale"]
    summary["homogeneity_error"] = error
    return summary


# =====================================================
# POTENTIALS
# =====================================================

WEIGHTS = {"One": Weight.one, "Distance": Weight.distance}


def _validate_marcinkiewicz(params: dict) -> dict:
    domain = _planar(_domain(params))
    weight = params.get("weight", "One")
    if isinstance(weight, dict):
        weight = Weight.distance_power(_number(weight, "alpha", low=0.0))
    elif weight in WEIGHTS:
        weight = WEIGHTS[weight]()
    else:
        _fail(f"weight must be One, Distance or {{'alpha': a}}, got {weight!r}")

    data = params.get("data") or {"atoms": [{"point": None, "mass": 1.0}]}
    return {"domain": domain, "mu": build_measure(domain, data), "p": _number(params, "p", low=1.0),
            "weight": weight, "grid": GridConfig.from_json(params.get("grid")),
            "levels": _integer(params, "levels", default=10)}


def _run_marcinkiewicz(resolved: dict, ctx: RunContext) -> dict:
    grid_cfg = resolved["grid"]
    grid = cached_grid(resolved["domain"], grid_cfg.n_r, grid_cfg.n_theta, grid_cfg.grading)
    field_ = apply_poisson(resolved["domain"], resolved["mu"], grid)

    norm = marcinkiewicz_norm(field_, resolved["p"], resolved["weight"])
    top = float(np.max(np.abs(field_.values)))
    lams = np.geomspace(top * 1e-3, top, resolved["levels"]) if top > 0 else np.ones(resolved["levels"])
    tails = [bool(weak_tail_check(field_, lam, resolved["p"], resolved["weight"])) for lam in lams]

    ctx.save_csv("tail_checks.csv", pd.DataFrame({"lambda": lams, "holds": tails}), norm=norm)
    return {"p": resolved["p"], "norm": norm, "tails_hold": all(tails), "levels": len(tails)}


# =====================================================
# BOUNDARY TRACE
# =====================================================

def _validate_trace(params: dict) -> dict:
    resolved = {"source": _source(params), "n_probes": _integer(params, "n_probes", default=16, low=4)}
    if "r" in params:
        resolved["r"] = _number(params, "r", low=0.0)
    return resolved


def _run_trace(resolved: dict, ctx: RunContext) -> dict:
    solution, _ = _produce(resolved["source"])
    report = classify_boundary(solution, resolved["n_probes"])

    ctx.save_csv("trace_sweep.csv", report.to_frame(), report={k: v for k, v in report.to_json().items()
                                                              if k != "sweep_csv"})
    summary = {
        "singular": [np.asarray(p).tolist() for p in report.singular],
        "inconclusive": len(report.inconclusive),
        "regular_mass": report.regular_mass,
    }
    if solution.boundary_data is not None:
        summary["total_variation_error"] = report.total_variation_error(solution.boundary_data)
    if not report.domain.is_ball:
        summary["flat_mass"] = report.flat_mass()
    return summary


def _validate_harnack(params: dict) -> dict:
    resolved = _validate_trace(params)
    if "r" not in resolved:
        _fail("harnack needs the annulus scale r")
    return resolved


def _run_harnack(resolved: dict, ctx: RunContext) -> dict:
    solution, _ = _produce(resolved["source"])
    r = resolved["r"]
    summary = {"r": r, "ratio": harnack_ratio(solution, r)}
    ctx.save_json("harnack.json", summary)
    return summary


# =====================================================
# SINGULARITY LAB
# =====================================================

def _validate_isolated(params: dict) -> dict:
    return {"source": _source(params)}


def _run_isolated(resolved: dict, ctx: RunContext) -> dict:
    solution, profile = _produce(resolved["source"])
    report = classify_isolated(solution, profile=profile)
    payload = report.to_json()
    ctx.save_json("singularity.json", payload)
    payload.pop("extraction")
    payload["verdict_text"] = str(report)
    return payload


def _validate_scaling(params: dict) -> dict:
    resolved = {"ells": _decreasing(params, "ells", [0.8, 0.5]), "q": _q(params, high=1.5)}
    if any(not 0 < e <= 1 for e in resolved["ells"]):
        _fail("scaling factors must lie in (0, 1]")
    if len(resolved["ells"]) != 2:
        _fail("the semigroup check takes exactly two factors")
    domain = _planar(_domain(params))
    if not domain.is_ball:
        _fail("the random-field semigroup check runs on a Ball")
    resolved["domain"] = domain
    resolved["grid"] = GridConfig.from_json(params.get("grid"))
    return resolved


def random_field(grid, rng: np.random.Generator, modes: int = RANDOM_MODES) -> GridField:
    """Smooth random field: low-order polynomial times trigonometric modes, coefficients from rng."""
    x, y = grid.points[..., 0] / grid.domain.R, grid.points[..., 1] / grid.domain.R
    coeffs = rng.normal(size=(modes, modes))
    values = sum(coeffs[i, j] * np.cos(i * x) * np.cos(j * y + i) for i in range(modes) for j in range(modes))
    return GridField(grid, values)


def _run_scaling(resolved: dict, ctx: RunContext) -> dict:
    grid_cfg = resolved["grid"]
    grid = cached_grid(resolved["domain"], grid_cfg.n_r, grid_cfg.n_theta, grid_cfg.grading)
    u = random_field(grid, ctx.rng)
    first, second = resolved["ells"]
    q = resolved["q"]

    composed = rescale(rescale(u, second, q), first, q)
    direct = rescale(u, first * second, q)
    error = float(np.max(np.abs(composed.values - direct.values)) / max(float(np.max(np.abs(direct.values))), 1e-300))

    summary = {"ells": [first, second], "q": q, "semigroup_error": error}
    ctx.save_json("scaling.json", summary)
    return summary


def _validate_collapse(params: dict) -> dict:
    domain = _planar(_domain(params))
    return {"domain": domain, "q": _q(params), "c": _number(params, "c", default=1.0, low=0.0, high=np.inf,
                                                          inclusive=True),
            "widths": _decreasing(params, "widths"), "cfg": _solver(params)}


def _run_collapse(resolved: dict, ctx: RunContext) -> dict:
    sweep = dirac_collapse_experiment(resolved["domain"], resolved["q"], resolved["c"], resolved["widths"],
                                      resolved["cfg"])
    ctx.save_csv("collapse.csv", sweep.to_frame(), q=sweep.q, c=sweep.c)
    payload = sweep.to_json()
    payload.pop("sweep_csv")
    return payload


def _validate_mass(params: dict) -> dict:
    domain = _planar(_domain(params))
    masses = [float(c) for c in params.get("masses", [1.0, 4.0, 16.0, 64.0])]
    if not masses or masses[0] <= 0 or any(b <= a for a, b in zip(masses, masses[1:])):
        _fail("masses must be positive and strictly increasing")
    pack = exponents(domain.N, _q(params))
    if not pack.subcritical:
        _fail(f"increasing-mass limits need q < q_c = {pack.q_c:g}")
    return {"domain": domain, "q": pack.q, "masses": masses, "cfg": _solver(params)}


def _run_mass(resolved: dict, ctx: RunContext) -> dict:
    sweep = increasing_mass_experiment(resolved["domain"], resolved["q"], resolved["masses"], resolved["cfg"])
    ctx.save_csv("increasing_mass.csv", sweep.to_frame(), q=sweep.q)
    if sweep.extraction is not None:
        ctx.save_csv("self_similar.csv", sweep.extraction.to_frame(), history=sweep.extraction.history)
    payload = sweep.to_json()
    payload.pop("sweep_csv")
    payload.pop("extraction")
    return payload


def _validate_capacity(params: dict) -> dict:
    family = params.get("family", "boundary")
    if family not in ("boundary", "interior"):
        _fail(f"capacity family must be boundary or interior, got {family!r}")
    rho = params.get("rho")
    if rho is not None:
        rho = _number(params, "rho", low=0.0, high=1.0)
    N, q = _dimension(params), _q(params, high=np.inf)
    factory = CapacityQuery.boundary if family == "boundary" else CapacityQuery.interior
    return {"family": family, "query": factory(N, q, rho)}


def _run_capacity(resolved: dict, ctx: RunContext) -> dict:
    query = resolved["query"]
    summary = {
        "family": resolved["family"],
        **query.to_json(),
        "product": query.product,
        "point_capacity_zero": point_capacity_zero(query),
        "scaling": capacity_scaling(query).to_json(),
    }
    ctx.save_json("capacity.json", summary)
    return summary


def _validate_removability(params: dict) -> dict:
    domain = _planar(_domain(params))
    if not domain.is_ball:
        _fail("the removability identity runs on a Ball")
    q = _q(params)
    point = params.get("point")
    point = np.zeros(2) if point is None else np.asarray(point, dtype=float)
    nu = InteriorMeasure(domain, [(point, _number(params, "mass", default=1.0, low=0.0))])
    eps = params.get("eps")
    return {"domain": domain, "q": q, "nu": nu, "point": point,
            "eps": None if eps is None else _decreasing(params, "eps"),
            "cfg": _solver(params)}


def _run_removability(resolved: dict, ctx: RunContext) -> dict:
    solution = solve_interior(resolved["domain"], AbsorptionLaw.power(resolved["q"]), resolved["nu"], resolved["cfg"])
    certificate = interior_removability_identity(solution, resolved["eps"], resolved["point"])
    payload = certificate.to_json()
    ctx.save_json("removability.json", payload)
    return payload


# =====================================================
# TABLE
# =====================================================

OPERATIONS = {
    op.name: op for op in (
        Operation("exponents", _validate_exponents, _run_exponents,
                  "derived exponents and closed-form constants of the gradient-absorption equation"),
        Operation("eigen_check", _validate_eigen, _run_eigen,
                  "cos φ is the first Dirichlet eigenfunction of the hemisphere with eigenvalue N − 1"),
        Operation("solve_profile", _validate_profile, _run_profile,
                  "a positive separable profile exists iff 1 < q < (N+1)/N"),
        Operation("solve_dirichlet", _validate_dirichlet, _run_dirichlet,
                  "measure boundary data admits a solution below P[μ] for subcritical absorption"),
        Operation("solve_interior", _validate_interior, _run_interior,
                  "interior measure data admits a solution below G[ν] for q < N/(N−1)"),
        Operation("exhaustion", _validate_exhaustion, _run_exhaustion,
                  "solutions on the exhausting sub-balls decrease to the maximal solution"),
        Operation("hopf_cole", _validate_hopf_cole, _run_hopf_cole,
                  "for q = 2 the solution is −ln P[1/ρ] (Hopf–Cole linearisation)"),
        Operation("q1_homogeneity", _validate_q1, _run_q1,
                  "for q = 1 the solution map is positively homogeneous"),
        Operation("marcinkiewicz", _validate_marcinkiewicz, _run_marcinkiewicz,
                  "P[μ] lies in the weak Lebesgue space of exponent N/(N−1)"),
        Operation("classify_boundary", _validate_trace, _run_trace,
                  "the boundary trace is a closed singular set plus a Radon measure on its complement"),
        Operation("harnack", _validate_harnack, _run_harnack,
                  "boundary Harnack inequality on half-annuli about the anchor"),
        Operation("classify_isolated", _validate_isolated, _run_isolated,
                  "isolated boundary singularities are weak, strong or removable"),
        Operation("scaling_check", _validate_scaling, _run_scaling,
                  "the scaling transform is a semigroup in the factor"),
        Operation("dirac_collapse", _validate_collapse, _run_collapse,
                  "isolated boundary points are removable for q >= (N+1)/N"),
        Operation("increasing_mass", _validate_mass, _run_mass,
                  "weak singularities increase to the separable strong singularity as the mass grows"),
        Operation("capacity", _validate_capacity, _run_capacity,
                  "points are capacity-null exactly at the critical exponents"),
        Operation("removability_identity", _validate_removability, _run_removability,
                  "the gradient energy away from an interior puncture is bounded by the flux and the cut-off energy"),
    )
}
