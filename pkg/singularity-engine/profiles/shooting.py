# =====================================================
# Separable singular profile ω_s by shooting
# −Δ′ω + (β²ω² + |∇′ω|²)^{q/2} − λ_{N,q}ω = 0 on the hemisphere,
# ω = 0 on the equator, ω′(0) = 0, bisection on ω(0) = a
# =====================================================

import json
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import pandas as pd
from scipy.integrate import solve_ivp
from scipy.interpolate import CubicSpline

from config.settings import ShootingConfig
from core.console import warn
from core.errors import NonConvergence
from profiles.exponents import ExponentPack, existence_obstruction, exponents, supersolution_height
from profiles.hemisphere import hemisphere_grid, laplace_beltrami

# ---------------- CONFIG ----------------

BLOWUP_FACTOR = 10.0
BRACKET_LOW = 1e-3
BRACKET_SHRINK = 10.0


# =====================================================
# RESULT TYPES
# =====================================================

@dataclass(eq=False)
class Profile:
    pack: ExponentPack
    phi: np.ndarray
    omega: np.ndarray
    a: float
    residual: float
    meta: dict = field(default_factory=dict)

    found = True

    @property
    def N(self) -> int:
        return self.pack.N

    @property
    def q(self) -> float:
        return self.pack.q

    @property
    def beta(self) -> float:
        return self.pack.beta

    @cached_property
    def _spline(self) -> CubicSpline:
        return CubicSpline(self.phi, self.omega)

    def omega_at(self, phi) -> np.ndarray:
        """Cubic interpolation of ω; the N = 3 profile is even in the colatitude."""
        phi = np.asarray(phi, dtype=float)
        if self.N == 3:
            phi = np.abs(phi)
        phi = np.clip(phi, self.phi[0], self.phi[-1])
        return np.clip(self._spline(phi), 0.0, None)

    def omega_prime_at(self, phi) -> np.ndarray:
        phi = np.asarray(phi, dtype=float)
        sign = np.sign(phi) if self.N == 3 else 1.0
        if self.N == 3:
            phi = np.abs(phi)
        phi = np.clip(phi, self.phi[0], self.phi[-1])
        return sign * self._spline(phi, 1)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"phi": self.phi, "omega": self.omega})

    def to_json(self) -> dict:
        return {
            "N": self.N,
            "q": self.q,
            "a": self.a,
            "residual": self.residual,
            "beta": self.beta,
            "bracket": self.meta.get("bracket"),
            "iterations": self.meta.get("iterations"),
            "equator_gap": self.meta.get("equator_gap"),
        }

    def save(self, csv_path: str, json_path: str):
        self.to_frame().to_csv(csv_path, index=False)
        with open(json_path, "w", encoding="utf-8") as f:
            json.dump(self.to_json(), f, indent=4)


@dataclass
class NoProfile:
    N: int
    q: float
    reason: str
    obstruction: bool
    diagnostic: dict = field(default_factory=dict)

    found = False

    def to_json(self) -> dict:
        return {
            "N": self.N,
            "q": self.q,
            "reason": self.reason,
            "obstruction": self.obstruction,
            "diagnostic": self.diagnostic,
        }


@dataclass
class Shot:
    a: float
    outcome: str  # "cross", "survive" or "blowup"
    phi_zero: float | None
    solution: object


# =====================================================
# ODE
# =====================================================

def _rhs(pack: ExponentPack):
    beta, lam, q, N = pack.beta, pack.lambda_coeff, pack.q, pack.N

    def rhs(phi, y):
        w, dw = y
        absorption = (beta ** 2 * w ** 2 + dw ** 2) ** (0.5 * q)
        d2w = absorption - lam * w
        if N == 3:
            d2w -= dw / np.tan(phi)
        return [dw, d2w]

    return rhs


def _pole_curvature(pack: ExponentPack, a: float) -> float:
    """ω″(0); for N = 3 the cot term contributes a second ω″(0)."""
    value = (pack.beta * a) ** pack.q - pack.lambda_coeff * a
    return value if pack.N == 2 else 0.5 * value


def _start(pack: ExponentPack, a: float, cfg: ShootingConfig) -> tuple:
    if pack.N == 2:
        return 0.0, [a, 0.0]
    phi0 = cfg.pole_start
    c = _pole_curvature(pack, a)
    return phi0, [a + 0.5 * c * phi0 ** 2, c * phi0]


def shoot(pack: ExponentPack, a: float, cfg: ShootingConfig, phi_end: float = 0.5 * np.pi) -> Shot:
    """Integrate from the pole with ω(0) = a until the first zero, blow-up or φ_end."""

    ceiling = BLOWUP_FACTOR * max(supersolution_height(pack.N, pack.q), a)

    def crossing(phi, y):
        return y[0]

    crossing.terminal = True
    crossing.direction = -1

    def blowup(phi, y):
        return ceiling - y[0]

    blowup.terminal = True

    phi0, y0 = _start(pack, a, cfg)
    sol = solve_ivp(
        _rhs(pack), (phi0, phi_end), y0,
        method=cfg.method, rtol=cfg.rtol, atol=cfg.atol_rel * a,
        events=(crossing, blowup), dense_output=True,
    )

    if sol.t_events[0].size:
        return Shot(a, "cross", float(sol.t_events[0][0]), sol)
    if sol.t_events[1].size:
        return Shot(a, "blowup", None, sol)
    return Shot(a, "survive", None, sol)


def first_zero(N: int, q: float, a: float, cfg: ShootingConfig | None = None) -> float:
    """First zero of the shot from height a, searched up to 0.95π (inf if none)."""
    cfg = cfg or ShootingConfig()
    shot = shoot(exponents(N, q), a, cfg, phi_end=0.95 * np.pi)
    return shot.phi_zero if shot.outcome == "cross" else float("inf")


# =====================================================
# BISECTION
# =====================================================

def solve_profile(N: int, q: float, cfg: ShootingConfig | None = None):
    """
    Profile when q < q_c, NoProfile otherwise.
    Bracket: the constant supersolution γ_eq on top; small heights (linear
    regime, first zero at π/(2√λ)) below, shrunk until a shot crosses.
    """

    cfg = cfg or ShootingConfig()
    pack = exponents(N, q)
    obstruction = existence_obstruction(N, q)

    if pack.lambda_coeff <= 0:
        return NoProfile(N, q, "lambda_nonpositive", obstruction, {"lambda": pack.lambda_coeff})

    a_hi = supersolution_height(N, q)
    hi_shot = shoot(pack, a_hi, cfg)
    if hi_shot.outcome == "cross":
        return NoProfile(N, q, "supersolution_crosses", obstruction, {"a_hi": a_hi})

    a_lo = BRACKET_LOW * a_hi
    expansions = 0
    lo_shot = shoot(pack, a_lo, cfg)
    while lo_shot.outcome != "cross":
        if expansions >= cfg.max_expansions:
            return NoProfile(
                N, q, "no_crossing_shot", obstruction,
                {"a_hi": a_hi, "a_lo": a_lo, "expansions": expansions, "last_outcome": lo_shot.outcome},
            )
        a_lo /= BRACKET_SHRINK
        expansions += 1
        lo_shot = shoot(pack, a_lo, cfg)

    bracket = (a_lo, a_hi)
    iterations = 0
    while a_hi - a_lo > cfg.a_rel_tol * a_hi:
        if iterations >= cfg.max_iter:
            raise NonConvergence(
                f"[ERROR] profile bisection for (N={N}, q={q}) did not close within {cfg.max_iter} steps"
            )
        mid = 0.5 * (a_lo + a_hi)
        shot = shoot(pack, mid, cfg)
        if shot.outcome == "cross":
            a_lo, lo_shot = mid, shot
        else:
            a_hi = mid
        iterations += 1

    equator_gap = 0.5 * np.pi - lo_shot.phi_zero
    if equator_gap > cfg.equator_tol:
        warn(f"profile (N={N}, q={q}): first zero misses the equator by {equator_gap:.2e}")

    a = 0.5 * (a_lo + a_hi)
    phi, omega = _sample(pack, a, cfg)
    residual = _certificate(pack, a, cfg)

    if residual > cfg.residual_tol:
        warn(f"profile (N={N}, q={q}): residual {residual:.2e} above {cfg.residual_tol:.0e}")

    meta = {
        "bracket": [float(b) for b in bracket],
        "expansions": expansions,
        "iterations": iterations,
        "equator_gap": float(equator_gap),
        "obstruction": obstruction,
        "certified": residual <= cfg.residual_tol,
    }
    return Profile(pack, phi, omega, float(a), float(residual), meta)


def _full_shot(pack: ExponentPack, a: float, cfg: ShootingConfig):
    phi0, y0 = _start(pack, a, cfg)
    return solve_ivp(
        _rhs(pack), (phi0, 0.5 * np.pi), y0,
        method=cfg.method, rtol=cfg.rtol, atol=cfg.atol_rel * a, dense_output=True,
    )


def _sample(pack: ExponentPack, a: float, cfg: ShootingConfig) -> tuple:
    sol = _full_shot(pack, a, cfg)
    phi = hemisphere_grid(pack.N, cfg.n_phi)
    arg = np.abs(phi)

    omega = np.empty_like(phi)
    near_pole = arg < sol.t[0]
    omega[~near_pole] = sol.sol(arg[~near_pole])[0]
    omega[near_pole] = a + 0.5 * _pole_curvature(pack, a) * arg[near_pole] ** 2

    omega = np.clip(omega, 0.0, None)
    omega[-1] = 0.0
    if pack.N == 2:
        omega[0] = 0.0
    return phi, omega


def _certificate(pack: ExponentPack, a: float, cfg: ShootingConfig) -> float:
    """
    sup |ω″ − F(φ, ω, ω′)| / max(1, a) with ω″ from fourth-order differences
    of the dense ω′; the pole sample is excluded for N = 3.
    """

    sol = _full_shot(pack, a, cfg)
    phi = np.linspace(sol.t[0], 0.5 * np.pi, cfg.n_phi)
    w, dw = sol.sol(phi)
    h = phi[1] - phi[0]

    d2w = (-dw[4:] + 8.0 * dw[3:-1] - 8.0 * dw[1:-3] + dw[:-4]) / (12.0 * h)
    rhs = np.array(_rhs(pack)(phi[2:-2], (w[2:-2], dw[2:-2]))[1])
    return float(np.max(np.abs(d2w - rhs)) / max(1.0, a))


def profile_residual(profile: Profile, order: int = 2) -> float:
    """
    Residual of the profile equation on the stored samples.
    order=2 uses the second-order hemisphere stencil and converges at h².
    """

    if order != 2:
        return profile.residual

    pack = profile.pack
    phi, w = profile.phi, profile.omega
    h = phi[1] - phi[0]

    lap = laplace_beltrami(pack.N, phi, w)
    dw = np.full_like(w, np.nan)
    dw[1:-1] = (w[2:] - w[:-2]) / (2.0 * h)
    if pack.N == 3:
        dw[0] = 0.0

    residual = -lap + (pack.beta ** 2 * w ** 2 + dw ** 2) ** (0.5 * pack.q) - pack.lambda_coeff * w
    rows = np.isfinite(residual)
    return float(np.max(np.abs(residual[rows])) / max(1.0, profile.a))
