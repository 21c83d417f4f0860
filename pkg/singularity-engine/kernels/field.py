# =====================================================
# GridField: scalar samples on a PolarGrid
# gradient cache, spline sampling and CSV round trip
# =====================================================

import json
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import pandas as pd
from scipy.interpolate import RectBivariateSpline

from core.errors import GridValidationError, OutOfGrid
from geometry.domain import Domain
from kernels.grid import PolarGrid, build_grid

# ---------------- CONFIG ----------------

MIRROR_ROWS = 3
PAD_COLUMNS = 3
EDGE_SLACK = 1e-9


@dataclass(eq=False)
class GridField:
    grid: PolarGrid
    values: np.ndarray
    grad: tuple | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.size != self.grid.size:
            raise GridValidationError(
                f"[ERROR] field has {values.size} values for a {self.grid.n_r}x{self.grid.n_theta} grid"
            )
        values = values.reshape(self.grid.shape)
        if not np.all(np.isfinite(values)):
            raise GridValidationError("[ERROR] field values must be finite")
        self.values = values

    @property
    def domain(self) -> Domain:
        return self.grid.domain

    @classmethod
    def zeros(cls, grid: PolarGrid, **meta) -> "GridField":
        return cls(grid, np.zeros(grid.shape), (np.zeros(grid.shape), np.zeros(grid.shape)), dict(meta))

    @classmethod
    def from_function(cls, grid: PolarGrid, func, **meta) -> "GridField":
        return cls(grid, func(grid.points), meta=dict(meta))

    def with_values(self, values, grad=None, **meta) -> "GridField":
        merged = dict(self.meta)
        merged.update(meta)
        return GridField(self.grid, values, grad, merged)

    # ---------------- DERIVATIVES ----------------

    def gradient(self) -> tuple:
        """(u_r, u_θ / r) at every node; finite differences unless a cache is attached."""
        if self.grad is None:
            self.grad = self.grid.gradient(self.values)
        return self.grad

    def grad_norm(self) -> np.ndarray:
        g_r, g_t = self.gradient()
        return np.hypot(g_r, g_t)

    def integrate(self, weight: np.ndarray | None = None) -> float:
        w = self.grid.weights if weight is None else self.grid.weights * weight
        return float(np.sum(self.values * w))

    # ---------------- SAMPLING ----------------

    @cached_property
    def _axes(self) -> tuple:
        grid = self.grid
        values = self.values

        if not grid.periodic:
            return grid.radial_coordinate, grid.theta, values

        n_t = grid.n_theta
        half = n_t // 2
        mirrored = np.roll(values[:MIRROR_ROWS][::-1], -half, axis=1)
        x = np.concatenate([-grid.r[:MIRROR_ROWS][::-1], grid.r])
        table = np.concatenate([mirrored, values])

        theta = np.concatenate(
            [grid.theta[-PAD_COLUMNS:] - 2.0 * np.pi, grid.theta, grid.theta[:PAD_COLUMNS] + 2.0 * np.pi]
        )
        table = np.concatenate([table[:, -PAD_COLUMNS:], table, table[:, :PAD_COLUMNS]], axis=1)
        return x, theta, table

    @cached_property
    def _cubic(self) -> RectBivariateSpline:
        x, theta, table = self._axes
        return RectBivariateSpline(x, theta, table, kx=3, ky=3)

    @cached_property
    def _linear(self) -> RectBivariateSpline:
        x, theta, table = self._axes
        return RectBivariateSpline(x, theta, table, kx=1, ky=1)

    def sample(self, points, method: str = "cubic") -> np.ndarray:
        pts = np.asarray(points, dtype=float)
        flat = pts.reshape(-1, 2)
        grid = self.grid
        R = self.domain.R

        radius = np.hypot(flat[:, 0], flat[:, 1])
        if np.any(radius > R * (1.0 + EDGE_SLACK)):
            raise OutOfGrid("[ERROR] sample point beyond the outer grid radius")

        if grid.periodic:
            coord = np.minimum(radius, R)
            angle = np.mod(np.arctan2(flat[:, 1], flat[:, 0]), 2.0 * np.pi)
        else:
            if np.any(flat[:, 1] < -EDGE_SLACK * R):
                raise OutOfGrid("[ERROR] sample point below the flat boundary")
            if np.any(radius < grid.r_min * (1.0 - EDGE_SLACK)):
                raise OutOfGrid(
                    f"[ERROR] sample point inside the inner grid radius {grid.r_min:.3e}"
                )
            radius = np.clip(radius, grid.r_min, R)
            coord = np.log(radius) if grid.log_spaced else radius
            angle = np.arctan2(np.clip(flat[:, 1], 0.0, None), flat[:, 0])

        spline = self._cubic if method == "cubic" else self._linear
        return spline.ev(coord, angle).reshape(pts.shape[:-1])

    # ---------------- CSV ----------------

    def to_frame(self) -> pd.DataFrame:
        rr, tt = np.meshgrid(self.grid.r, self.grid.theta, indexing="ij")
        frame = pd.DataFrame({"r": rr.ravel(), "theta": tt.ravel(), "value": self.values.ravel()})
        if self.grad is not None:
            frame["grad_r"] = self.grad[0].ravel()
            frame["grad_theta"] = self.grad[1].ravel()
        return frame

    def to_csv(self, path: str):
        header = dict(self.grid.describe())
        header["meta"] = {k: v for k, v in self.meta.items() if _is_plain(v)}
        with open(path, "w", newline="", encoding="utf-8") as f:
            f.write("# " + json.dumps(header) + "\n")
            self.to_frame().to_csv(f, index=False)

    @classmethod
    def from_csv(cls, path: str) -> "GridField":
        with open(path, "r", encoding="utf-8") as f:
            first = f.readline()
        if not first.startswith("# "):
            raise GridValidationError(f"[ERROR] {path} has no grid header row")

        header = json.loads(first[2:])
        domain = Domain.from_json(header["domain"])
        grading = header["grading"] if not domain.is_ball else None
        grid = build_grid(domain, header["n_r"], header["n_theta"], grading)

        frame = pd.read_csv(path, comment="#")
        grad = None
        if "grad_r" in frame.columns:
            grad = (
                frame["grad_r"].to_numpy().reshape(grid.shape),
                frame["grad_theta"].to_numpy().reshape(grid.shape),
            )
        return cls(grid, frame["value"].to_numpy(), grad, header.get("meta", {}))


def _is_plain(value) -> bool:
    return isinstance(value, (str, int, float, bool)) or value is None
