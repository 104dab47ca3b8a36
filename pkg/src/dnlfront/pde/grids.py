"""Grids and fields for the radial / one-dimensional solver."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["Grid", "RadialField", "radial_grid", "line_grid"]


@dataclass(frozen=True)
class Grid:
    """Uniform cell-centered grid.

    Radial grids live on [0, R] with reflective symmetry at r = 0 and exact
    cell volumes proportional to r_{i+1}^N - r_i^N; line grids live on
    [x_min, x_max] with a Dirichlet-0 or zero-flux condition on each side.
    """

    kind: str               # "radial" | "line"
    N: int
    dr: float
    n: int
    r_min: float
    left_bc: str            # "reflect" | "dirichlet0" | "neumann"
    right_bc: str = "dirichlet0"

    @property
    def centers(self) -> np.ndarray:
        return self.r_min + (np.arange(self.n) + 0.5) * self.dr

    @property
    def interfaces(self) -> np.ndarray:
        return self.r_min + np.arange(self.n + 1) * self.dr

    @property
    def extent(self) -> float:
        return self.r_min + self.n * self.dr

    def areas(self) -> np.ndarray:
        if self.kind == "line":
            return np.ones(self.n + 1)
        return self.interfaces ** (self.N - 1)

    def volumes(self) -> np.ndarray:
        if self.kind == "line":
            return np.full(self.n, self.dr)
        r = self.interfaces
        return (r[1:] ** self.N - r[:-1] ** self.N) / self.N

    def geometry_factor(self) -> float:
        """max_i dr (A_{i+1/2} + A_{i-1/2}) / V_i, the stencil weight in the CFL bound."""
        A = self.areas()
        V = self.volumes()
        return float(np.max(self.dr * (A[1:] + A[:-1]) / V))


def radial_grid(R: float, dr: float, N: int) -> Grid:
    n = int(round(R / dr))
    return Grid(kind="radial", N=N, dr=dr, n=n, r_min=0.0, left_bc="reflect")


def line_grid(x_min: float, x_max: float, dr: float, left_bc: str = "dirichlet0") -> Grid:
    n = int(round((x_max - x_min) / dr))
    return Grid(kind="line", N=1, dr=dr, n=n, r_min=x_min, left_bc=left_bc)


@dataclass
class RadialField:
    """A nonnegative cell-averaged field at time t."""

    grid: Grid
    u: np.ndarray
    t: float = 0.0

    def copy(self) -> "RadialField":
        return RadialField(self.grid, self.u.copy(), self.t)

    @property
    def sup(self) -> float:
        return float(self.u.max()) if self.u.size else 0.0
