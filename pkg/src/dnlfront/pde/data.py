"""Initial-data library: compactly supported bumps, plateau data, wave data."""
from __future__ import annotations

import numpy as np
from scipy.interpolate import PchipInterpolator

from ..errors import ConstraintError, GridError
from ..model import Params, ReactionSpec
from ..waves import SubwaveProfile, WaveProfile, subwave_profile
from .grids import Grid, RadialField

__all__ = ["kanel_bump", "plateau_datum", "wave_datum", "left_plateau_datum",
           "box_datum", "wave_evaluator", "init_datum"]


def wave_evaluator(profile: WaveProfile):
    """U(xi) from a reconstructed wavefront, clamped to [profile floor, 0] outside."""
    interp = PchipInterpolator(profile.xi, profile.U, extrapolate=False)
    left_val = float(profile.U[0])
    xi_min = float(profile.xi[0])

    def evaluate(xi):
        xi = np.asarray(xi, dtype=float)
        out = np.where(xi >= 0.0, 0.0, np.nan)
        inside = (xi < 0.0) & (xi >= xi_min)
        out[inside] = interp(xi[inside])
        out[xi < xi_min] = left_val
        return np.clip(out, 0.0, None)

    return evaluate


def _check_support(grid: Grid, outer: float) -> None:
    if outer > grid.extent:
        raise GridError(f"datum support {outer:.4g} exceeds the domain {grid.extent:.4g}")


def kanel_bump(grid: Grid, params: Params, delta: float, sigma: float, beta: float,
               radius: float = 1.0, center: float = 0.0) -> RadialField:
    """delta (1 - (|x-center|/radius)^sigma)^beta on its support, 0 outside.

    The exponent constraints beta > p/(m(p-1)) and sigma > p/(p-1) make the
    bump smooth enough to be an admissible lower datum.
    """
    m, p = params.m, params.p
    if beta <= p / (m * (p - 1.0)):
        raise ConstraintError(f"beta must exceed p/(m(p-1)) = {p / (m * (p - 1.0)):.4g}")
    if sigma <= p / (p - 1.0):
        raise ConstraintError(f"sigma must exceed p/(p-1) = {p / (p - 1.0):.4g}")
    if not 0.0 < delta:
        raise ConstraintError("delta must be positive")
    _check_support(grid, center + radius)
    x = grid.centers
    s = np.abs(x - center) / radius
    u = np.where(s < 1.0, delta * np.clip(1.0 - s ** sigma, 0.0, None) ** beta, 0.0)
    return RadialField(grid, u, 0.0)


def plateau_datum(grid: Grid, params: Params, h: ReactionSpec,
                  rho: float, eta: float, c: float,
                  subwave: SubwaveProfile | None = None) -> RadialField:
    """Height eta out to rho, then the subcritical exit profile, then 0.

    The convection parameter of the shoulder profile is (N-1)/rho for radial
    geometry (the curvature term frozen at the plateau edge) and 0 on a line.
    """
    gamma = (grid.N - 1) / rho if grid.kind == "radial" else 0.0
    sw = subwave or subwave_profile(params, h, gamma=gamma, c=c, eta=eta)
    _check_support(grid, rho + sw.b)
    interp = PchipInterpolator(sw.xi, sw.U, extrapolate=False)
    x = grid.centers
    u = np.zeros(grid.n)
    u[x <= rho] = eta
    shoulder = (x > rho) & (x < rho + sw.b)
    u[shoulder] = np.clip(interp(x[shoulder] - rho), 0.0, eta)
    return RadialField(grid, u, 0.0)


def wave_datum(grid: Grid, wave: WaveProfile, x0: float) -> RadialField:
    """The travelling profile itself, front placed at x0."""
    _check_support(grid, x0)
    ev = wave_evaluator(wave)
    return RadialField(grid, ev(grid.centers - x0), 0.0)


def left_plateau_datum(grid: Grid, level: float, edge: float, width: float) -> RadialField:
    """Level on (-inf, edge], linear ramp to 0 over [edge, edge+width].

    Data of this shape (bounded, supported to the left, approaching a level
    near 1 at -infinity) are handled on a line grid with a zero-flux left end.
    """
    if grid.kind != "line":
        raise GridError("left-plateau data need a line grid")
    _check_support(grid, edge + width)
    x = grid.centers
    u = np.where(x <= edge, level,
                 np.where(x < edge + width, level * (edge + width - x) / width, 0.0))
    return RadialField(grid, u, 0.0)


def box_datum(grid: Grid, height: float, radius: float, center: float = 0.0) -> RadialField:
    _check_support(grid, center + radius)
    x = grid.centers
    u = np.where(np.abs(x - center) <= radius, height, 0.0)
    return RadialField(grid, u, 0.0)


def init_datum(kind: str, grid: Grid, params: Params | None = None,
               h: ReactionSpec | None = None, **kw) -> RadialField:
    """Dispatch by datum kind: kanel | plateau | tw | left_plateau | box."""
    if kind == "kanel":
        return kanel_bump(grid, params, **kw)
    if kind == "plateau":
        return plateau_datum(grid, params, h, **kw)
    if kind == "tw":
        return wave_datum(grid, **kw)
    if kind == "left_plateau":
        return left_plateau_datum(grid, **kw)
    if kind == "box":
        return box_datum(grid, **kw)
    raise ValueError(f"unknown datum kind {kind!r}")
