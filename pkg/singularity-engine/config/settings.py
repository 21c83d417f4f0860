# =====================================================
# Engine configuration
# Environment defaults (.env) + JSON-backed solver configs
# =====================================================

import os
from dataclasses import asdict, dataclass, field

from dotenv import load_dotenv

from core.errors import ConfigError

# Load environment variables from .env
load_dotenv()

# ---------------- ENVIRONMENT ----------------

BASE_DIR = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))

OUT_DIR = os.getenv("LAB_OUT_DIR", "results")
DEFAULT_SEED = int(os.getenv("LAB_SEED", "0"))
N_JOBS = int(os.getenv("LAB_N_JOBS", "1"))
DENSE_LIMIT = int(os.getenv("LAB_DENSE_LIMIT", "2500"))

TOOL_VERSION = "0.4.0"

# ---------------- GRID DEFAULTS ----------------

DEFAULT_GRADING = 0.9
MIN_NODES = 16


@dataclass
class GridConfig:
    n_r: int = 64
    n_theta: int = 64
    grading: float | None = None

    @classmethod
    def from_json(cls, payload: dict | None) -> "GridConfig":
        payload = dict(payload or {})
        unknown = set(payload) - {"n_r", "n_theta", "grading"}
        if unknown:
            raise ConfigError(f"[ERROR] unknown grid keys: {sorted(unknown)}")

        cfg = cls(
            n_r=int(payload.get("n_r", cls.n_r)),
            n_theta=int(payload.get("n_theta", cls.n_theta)),
            grading=payload.get("grading"),
        )
        cfg.validate()
        return cfg

    @classmethod
    def parse(cls, text: str) -> "GridConfig":
        """Parse the CLI form 'n_r,n_theta'."""
        try:
            n_r, n_theta = (int(part) for part in text.split(","))
        except ValueError as exc:
            raise ConfigError(f"[ERROR] --grid expects n_r,n_theta, got {text!r}") from exc
        cfg = cls(n_r=n_r, n_theta=n_theta)
        cfg.validate()
        return cfg

    def validate(self):
        if self.n_r < MIN_NODES or self.n_theta < MIN_NODES:
            raise ConfigError(
                f"[ERROR] grid needs at least {MIN_NODES}x{MIN_NODES} nodes, "
                f"got {self.n_r}x{self.n_theta}"
            )
        if self.grading is not None and not 0.0 < float(self.grading) <= 1.0:
            raise ConfigError(f"[ERROR] grading must lie in (0, 1], got {self.grading}")

    def to_json(self) -> dict:
        return asdict(self)


BACKENDS = ("picard", "fd")
LIFTS = ("poisson", "boundary")


@dataclass
class SolverConfig:
    backend: str = "fd"
    theta: float = 0.5
    theta_min: float = 1.0 / 64.0
    tol_update: float = 1e-9
    tol_weak: float = 1e-5
    max_iter: int = 10_000
    grid: GridConfig = field(default_factory=GridConfig)
    allow_supercritical: bool = False
    lift: str = "poisson"
    newton: bool = False
    strict: bool = True
    weak_check_every: int = 10
    mollifier_cells: int = 4
    n_jobs: int = N_JOBS

    @classmethod
    def from_json(cls, payload: dict | None) -> "SolverConfig":
        payload = dict(payload or {})
        grid = GridConfig.from_json(payload.pop("grid", None))

        known = {f for f in cls.__dataclass_fields__ if f != "grid"}
        unknown = set(payload) - known
        if unknown:
            raise ConfigError(f"[ERROR] unknown solver keys: {sorted(unknown)}")

        cfg = cls(grid=grid, **payload)
        cfg.validate()
        return cfg

    def validate(self):
        if self.backend not in BACKENDS:
            raise ConfigError(f"[ERROR] backend must be one of {BACKENDS}, got {self.backend!r}")
        if self.lift not in LIFTS:
            raise ConfigError(f"[ERROR] lift must be one of {LIFTS}, got {self.lift!r}")
        if not 0.0 < self.theta <= 1.0:
            raise ConfigError(f"[ERROR] theta must lie in (0, 1], got {self.theta}")
        if not 0.0 < self.theta_min <= self.theta:
            raise ConfigError("[ERROR] theta_min must lie in (0, theta]")
        if self.tol_update <= 0 or self.tol_weak <= 0:
            raise ConfigError("[ERROR] tolerances must be positive")
        if self.max_iter < 1:
            raise ConfigError("[ERROR] max_iter must be >= 1")
        if self.mollifier_cells < 2:
            raise ConfigError("[ERROR] atoms must be mollified over at least 2 cells")
        self.grid.validate()

    def with_grid(self, n_r: int, n_theta: int, grading: float | None = None) -> "SolverConfig":
        payload = self.to_json()
        payload["grid"] = {"n_r": n_r, "n_theta": n_theta, "grading": grading}
        return SolverConfig.from_json(payload)

    def replace(self, **changes) -> "SolverConfig":
        payload = self.to_json()
        payload.update(changes)
        return SolverConfig.from_json(payload)

    def to_json(self) -> dict:
        payload = asdict(self)
        payload["grid"] = self.grid.to_json()
        return payload


@dataclass(frozen=True)
class ShootingConfig:
    n_phi: int = 2001
    rtol: float = 1e-13
    atol_rel: float = 1e-15
    a_rel_tol: float = 1e-12
    equator_tol: float = 1e-8
    max_iter: int = 200
    max_expansions: int = 50
    residual_tol: float = 1e-7
    method: str = "DOP853"
    pole_start: float = 1e-4

    @classmethod
    def from_json(cls, payload: dict | None) -> "ShootingConfig":
        payload = dict(payload or {})
        unknown = set(payload) - set(cls.__dataclass_fields__)
        if unknown:
            raise ConfigError(f"[ERROR] unknown shooting keys: {sorted(unknown)}")
        cfg = cls(**payload)
        if cfg.n_phi < 11:
            raise ConfigError("[ERROR] n_phi must be >= 11")
        return cfg

    def to_json(self) -> dict:
        return asdict(self)
