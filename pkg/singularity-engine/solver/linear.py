# =====================================================
# Sparse Dirichlet solves for the discrete Laplacian
# −Δ_h v = f inside, v = b on the Dirichlet nodes
# =====================================================

from functools import lru_cache

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import splu

from kernels.grid import PolarGrid

CACHE_SIZE = 16


class DirichletSolver:
    def __init__(self, grid: PolarGrid):
        self.grid = grid
        self.interior = np.nonzero(grid.interior_mask.ravel())[0]
        self.boundary = np.nonzero(grid.boundary_mask.ravel())[0]

        lap = grid.laplacian.tocsr()
        self._coupling = -lap[self.interior][:, self.boundary]
        self._lu = splu(sparse.csc_matrix(-lap[self.interior][:, self.interior]))

    def solve(self, rhs, boundary_values=None) -> np.ndarray:
        """Solution on the full grid; `rhs` is read on interior nodes only."""

        flat_rhs = np.asarray(rhs, dtype=float).ravel()
        out = np.zeros(self.grid.size)
        b = flat_rhs[self.interior].copy()

        if boundary_values is not None:
            bv = np.asarray(boundary_values, dtype=float).ravel()[self.boundary]
            out[self.boundary] = bv
            b = b - self._coupling @ bv

        out[self.interior] = self._lu.solve(b)
        return out.reshape(self.grid.shape)

    def harmonic_extension(self, boundary_values) -> np.ndarray:
        return self.solve(np.zeros(self.grid.size), boundary_values)


@lru_cache(maxsize=CACHE_SIZE)
def dirichlet_solver(grid: PolarGrid) -> DirichletSolver:
    return DirichletSolver(grid)


@lru_cache(maxsize=CACHE_SIZE)
def torsion_function(grid: PolarGrid) -> np.ndarray:
    """ξ with −Δ_h ξ = 1 and ξ = 0 on the Dirichlet nodes."""
    return dirichlet_solver(grid).solve(np.ones(grid.size))
