"""Wavefront reconstruction, pressure diagnostics and endpoint fits.

The spatial profile follows from the trajectory phi(U) through the support
integral xi(U) = -m int_0^U s^{m-1} / phi(s)^alpha ds; both endpoints of the
integrand are integrable singularities which are handled with the closed-form
asymptotes phi ~ cU at the origin and phi ~ C (1-U)^{p-1} at 1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import CubicSpline, PchipInterpolator

from ..errors import (
    ExtrapolationError,
    FitError,
    IntegrationError,
    NoExitError,
    NonCriticalError,
    QuadratureError,
)
from ..model import Params, ReactionSpec
from .shooting import (
    default_eps_hi,
    ode_method,
    predicted_endpoint_coefficient,
    scalar_forcing,
)
from .types import (
    EndpointFit,
    PhaseTrajectory,
    PressureView,
    SubwaveProfile,
    WaveProfile,
)

__all__ = [
    "ProfileGrid",
    "phi_interpolant",
    "wave_profile",
    "pressure_view",
    "endpoint_fit",
    "subwave_profile",
    "profile_ode_residual",
]

_RTOL = 1e-10


@dataclass(frozen=True)
class ProfileGrid:
    """Resolution of the reconstructed profile.

    n controls the number of trajectory samples; eps_deep sets how far the
    left tail is extended (U up to 1 - eps_deep) using the endpoint asymptote.
    eps_lo is deliberately larger than the shooting cutoff: a speed error
    delta_c leaves a floor offset ~delta_c/2 in phi near the origin, so the
    trajectory is only trusted down to a level well above that offset and the
    closed-form linear asymptote carries the rest.
    """

    n: int = 2400
    eps_lo: float = 1e-4
    eps_hi: float | None = None  # resolved per p (stiffer entry for p > 2)
    eps_deep: float = 1e-9


def _sample_grid(eps_lo: float, eps_hi: float, n: int) -> np.ndarray:
    """Descending U grid clustered at both endpoints."""
    upper = 1.0 - np.geomspace(eps_hi, 0.5, n // 2)
    lower = np.geomspace(eps_lo, 0.5, n - n // 2)
    grid = np.unique(np.concatenate([upper, lower]))
    return grid[::-1]


def _shoot_with_xi(params: Params, h: ReactionSpec, c: float, gamma: float,
                   eps_hi: float | None, eps_lo: float, n: int):
    """Integrate (phi, zeta) downward, zeta being arclength in xi from the start."""
    if eps_hi is None:
        eps_hi = default_eps_hi(params)
    m, alpha = params.m, params.alpha
    f = scalar_forcing(h, params)
    C = predicted_endpoint_coefficient(params, h, c, gamma)
    u0 = 1.0 - eps_hi
    phi0 = C * eps_hi ** (params.p - 1.0)
    floor = min(0.5 * phi0, 1e-3 * c * eps_lo)
    gm = gamma * m

    def rhs(u, y):
        phi = max(y[0], floor * 1e-3)
        dphi = c - f(u) / phi ** alpha
        if gm != 0.0:
            dphi += gm * u ** (m - 1.0) * phi ** (1.0 - alpha)
        dzeta = -m * u ** (m - 1.0) / phi ** alpha
        return (dphi, dzeta)

    def hit_floor(u, y):
        return y[0] - floor

    hit_floor.terminal = True
    hit_floor.direction = -1

    t_eval = _sample_grid(eps_lo, eps_hi, n)
    sol = solve_ivp(rhs, (u0, eps_lo), (phi0, 0.0), method=ode_method(params),
                    rtol=_RTOL, atol=(1e-15, 1e-12), events=(hit_floor,),
                    t_eval=t_eval, dense_output=False)
    if not sol.success and sol.status != 1:
        raise IntegrationError(f"profile shot failed: {sol.message}")
    hit = sol.status == 1 and len(sol.t_events[0]) > 0
    return sol.t, sol.y[0], sol.y[1], C, hit


def phi_interpolant(traj: PhaseTrajectory, params: Params):
    """phi(U) on (0, 1) from trajectory samples plus endpoint asymptotes."""
    U = traj.U[::-1]
    phi = traj.phi[::-1]
    keep = phi > 0.0
    U, phi = U[keep], phi[keep]
    interp = PchipInterpolator(U, phi, extrapolate=False)
    u_min, u_max = U[0], U[-1]
    slope_lo = phi[0] / u_min
    c_top = phi[-1] / (1.0 - u_max) ** (params.p - 1.0)
    pm1 = params.p - 1.0

    def evaluate(u):
        u = np.asarray(u, dtype=float)
        out = np.empty_like(u)
        low = u < u_min
        high = u > u_max
        mid = ~(low | high)
        out[low] = slope_lo * u[low]
        out[high] = c_top * (1.0 - u[high]) ** pm1
        out[mid] = interp(u[mid])
        return out

    return evaluate


def wave_profile(params: Params, h: ReactionSpec, c: float, gamma: float,
                 grid: ProfileGrid | None = None) -> WaveProfile:
    """Reconstruct the finite wavefront with front normalized to xi = 0.

    Requires c to be (within tolerance) the critical speed: non-connecting
    trajectories that crash into the U-axis are rejected.
    """
    grid = grid or ProfileGrid()
    m, alpha = params.m, params.alpha
    eps_hi = grid.eps_hi if grid.eps_hi is not None else default_eps_hi(params)
    U, phi, zeta, C, hit = _shoot_with_xi(params, h, c, gamma,
                                          eps_hi, grid.eps_lo, grid.n)
    if hit:
        raise NonCriticalError(
            "trajectory hit the U-axis; the requested speed is not critical")
    if not (np.all(np.isfinite(zeta)) and np.all(np.isfinite(phi))):
        raise QuadratureError("support integral produced non-finite values")

    # left tail beyond the integration window, on the endpoint asymptote:
    # xi - xi0 = -(m / C_loc^alpha) * log((1-U)/eps_hi) with U ~ 1
    c_top = phi[0] / eps_hi ** (params.p - 1.0)
    one_minus = np.geomspace(grid.eps_deep, eps_hi, grid.n // 6, endpoint=False)
    u_tail = 1.0 - one_minus
    xi_tail_rel = -(m / c_top ** alpha) * np.log(eps_hi / one_minus)

    # analytic head below eps_lo, on phi ~ slope_lo * U
    slope_lo = phi[-1] / U[-1]
    head = (m / slope_lo ** alpha) * U[-1] ** (m - alpha) / (m - alpha)

    xi_core = zeta - (zeta[-1] + head)          # descending U, ascending -> 0
    xi_all = np.concatenate([xi_tail_rel + xi_core[0], xi_core, [0.0]])
    u_all = np.concatenate([u_tail, U, [0.0]])
    phi_all = np.concatenate([c_top * one_minus ** (params.p - 1.0), phi,
                              [0.0]])

    order = np.argsort(xi_all)
    xi_all, u_all, phi_all = xi_all[order], u_all[order], phi_all[order]
    V = (m / (m - alpha)) * np.power(u_all, m - alpha)
    # V' = -(phi/U)^alpha exactly along the trajectory; the front value is the
    # slope_lo limit of the origin asymptote
    with np.errstate(divide="ignore", invalid="ignore"):
        Vp = -np.power(phi_all / u_all, alpha)
    Vp[u_all == 0.0] = -slope_lo ** alpha
    return WaveProfile(gamma=gamma, c=c, xi=xi_all, U=u_all, V=V, Vp=Vp)


def pressure_view(profile: WaveProfile, params: Params, h: ReactionSpec) -> PressureView:
    """One-sided pressure limits at the front and the far-field slope.

    V' and V'' at xi -> 0- are obtained by Richardson extrapolation of the
    sampled pressure slope; the predicted curvature follows from the front
    balance (gamma c - h'(0)) (m-alpha) / ((p-1)(m-alpha+1) c^{1-alpha}).
    """
    m, alpha, p = params.m, params.alpha, params.p
    c, gamma = profile.c, profile.gamma
    vp = PchipInterpolator(profile.xi, profile.Vp)

    span = profile.L
    h1 = max(1e-3, 1e-4 * span)
    levels = np.array([vp(-h1), vp(-2.0 * h1), vp(-4.0 * h1)], dtype=float)
    if not np.all(np.isfinite(levels)):
        raise ExtrapolationError("pressure slope not finite near the front")
    vp0_a = 2.0 * levels[0] - levels[1]
    vp0_b = 2.0 * levels[1] - levels[2]
    if abs(vp0_a - vp0_b) > 0.05 * max(1.0, abs(vp0_a)):
        raise ExtrapolationError(
            f"pressure-slope extrapolation diverges: {vp0_a:.6g} vs {vp0_b:.6g}")

    d1 = (levels[0] - levels[1]) / h1
    d2 = (levels[1] - levels[2]) / (2.0 * h1)
    vpp0 = 2.0 * d1 - d2
    if not math.isfinite(vpp0):
        raise ExtrapolationError("pressure curvature extrapolation diverged")

    hp0 = float(h.deriv(np.array(0.0)))
    predicted = (gamma * c - hp0) * (m - alpha) / (
        (p - 1.0) * (m - alpha + 1.0) * c ** (1.0 - alpha))
    return PressureView(
        V_front=float(profile.V[-1]),
        Vp_front=float(vp0_a),
        Vpp_front=float(vpp0),
        Vp_at_minus_inf=float(vp(profile.xi[0])),
        predicted_Vpp=float(predicted),
    )


def endpoint_fit(traj: PhaseTrajectory, params: Params, h: ReactionSpec,
                 residual_threshold: float = 0.05) -> EndpointFit:
    """Measured endpoint behaviour of a critical trajectory.

    The origin slope comes from a through-origin linear fit on
    U in [eps_lo, 10 eps_lo].  The coefficient/exponent at U = 1 come from a
    log-log fit of phi against (1-U) on a decade chosen outside the seeded
    zone, so the measured exponent is not inherited from the seed.
    """
    U, phi = traj.U[::-1], traj.phi[::-1]

    lo_mask = (U >= traj.eps_lo) & (U <= 10.0 * traj.eps_lo) & (phi > 0.0)
    if np.count_nonzero(lo_mask) < 4:
        raise FitError("too few samples near the origin; use a sampled shot")
    uu, pp = U[lo_mask], phi[lo_mask]
    slope0 = float(np.dot(uu, pp) / np.dot(uu, uu))
    res0 = float(np.sqrt(np.mean((pp - slope0 * uu) ** 2)) / np.mean(pp))

    w = 1.0 - U
    hi_mask = (w >= 5.0 * traj.eps_hi) & (w <= 50.0 * traj.eps_hi) & (phi > 0.0)
    if np.count_nonzero(hi_mask) < 4:
        raise FitError("too few samples near U = 1; use a sampled shot")
    x = np.log(w[hi_mask])
    y = np.log(phi[hi_mask])
    A = np.column_stack([x, np.ones_like(x)])
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    mu1, logC = float(coef[0]), float(coef[1])
    res1 = float(np.sqrt(np.mean((A @ coef - y) ** 2)))
    if res0 > residual_threshold or res1 > residual_threshold:
        raise FitError(f"endpoint fit residuals too large: {res0:.3g}, {res1:.3g}")

    return EndpointFit(
        slope0=slope0,
        C1=float(np.exp(logC)),
        mu1=mu1,
        predicted_C1=predicted_endpoint_coefficient(params, h, traj.c, traj.gamma),
        predicted_mu1=params.p - 1.0,
        residual_origin=res0,
        residual_one=res1,
    )


def profile_ode_residual(xi: np.ndarray, U: np.ndarray, params: Params,
                         h: ReactionSpec, c: float, gamma: float,
                         trim: float = 0.05) -> float:
    """Sup residual of c U' - phi' - gamma phi + h(U) = 0 along sampled data.

    This check is independent of the phase-plane route: everything is rebuilt
    from the (xi, U) samples alone via spline differentiation, with the flux
    phi = |(U^m)'|^{p-1}.  The endpoints are trimmed (degenerate there).
    """
    m, p = params.m, params.p
    spl = CubicSpline(xi, U)
    lo = xi[0] + trim * (xi[-1] - xi[0])
    hi = xi[-1] - trim * (xi[-1] - xi[0])
    x = xi[(xi > lo) & (xi < hi)]
    S = spl(x)
    S1 = spl(x, 1)
    S2 = spl(x, 2)
    W1 = m * np.power(S, m - 1.0) * S1
    W2 = m * (m - 1.0) * np.power(S, m - 2.0) * S1 * S1 + m * np.power(S, m - 1.0) * S2
    slope = np.maximum(-W1, 1e-300)
    phi = np.power(slope, p - 1.0)
    phi1 = (p - 1.0) * np.power(slope, p - 2.0) * (-W2)
    res = c * S1 - phi1 - gamma * phi + np.asarray(h(S), dtype=float)
    return float(np.max(np.abs(res)))


def subwave_profile(params: Params, h: ReactionSpec, gamma: float, c: float,
                    eta: float, n: int = 1600) -> SubwaveProfile:
    """Profile of the trajectory entering the plane at (eta, 0).

    For subcritical c the trajectory leaves through (0, nu) on the phi-axis;
    the spatial profile then runs from height eta (zero flux) at xi = 0 down
    to 0 (absolute flux nu) at xi = b.  If the trajectory crashes back into
    the U-axis instead, eta was at or below the exit threshold and NoExitError
    reports the blocking level.
    """
    if not 0.0 < eta < 1.0:
        raise ValueError("eta must lie in (0, 1)")
    m, alpha = params.m, params.alpha
    f = scalar_forcing(h, params)
    f_eta = f(eta)
    if f_eta <= 0.0:
        raise ValueError(f"h must be positive at eta, got h({eta}) <= 0")

    eps_seed = 1e-8 * eta
    u_s = eta - eps_seed
    phi_s = ((alpha + 1.0) * f_eta * eps_seed) ** (1.0 / (alpha + 1.0))
    # a blocked trajectory dives into the U-axis with unbounded slope; the
    # floor must be hit while steps are still resolvable
    floor = min(phi_s / 3.0, 1e-6)
    gm = gamma * m

    def rhs(u, y):
        phi = max(y[0], floor * 1e-3)
        dphi = c - f(u) / phi ** alpha if u > 0.0 else c
        if gm != 0.0 and u > 0.0:
            dphi += gm * u ** (m - 1.0) * phi ** (1.0 - alpha)
        dzeta = -m * u ** (m - 1.0) / phi ** alpha if u > 0.0 else 0.0
        return (dphi, dzeta)

    def hit_floor(u, y):
        return y[0] - floor

    hit_floor.terminal = True
    hit_floor.direction = -1

    t_eval = np.concatenate([
        eta - np.geomspace(eps_seed, eta * 0.05, n // 4),
        np.linspace(eta * 0.96, 0.0, n - n // 2),
        np.geomspace(eta * 0.04, eta * 1e-6, n // 4),
        [0.0],
    ])
    t_eval = np.unique(t_eval)[::-1]
    t_eval = t_eval[t_eval <= u_s]
    sol = solve_ivp(rhs, (u_s, 0.0), (phi_s, 0.0), method="DOP853",
                    rtol=_RTOL, atol=(1e-15, 1e-12), events=(hit_floor,),
                    t_eval=t_eval)
    if not sol.success and sol.status != 1:
        # crashing back into the U-axis has infinite slope; the step-size
        # underflow at vanishing phi is that crash, not a tolerance failure
        phi_last = float(sol.y[0][-1]) if sol.y.shape[1] else phi_s
        u_last = float(sol.t[-1]) if sol.t.size else u_s
        if phi_last < 1e-3 * max(phi_s, float(np.max(sol.y[0])) if sol.y.shape[1] else phi_s):
            raise NoExitError(u_last)
        raise IntegrationError(f"subwave shot failed: {sol.message}")
    if sol.status == 1 and len(sol.t_events[0]) > 0:
        raise NoExitError(float(sol.t_events[0][0]))

    U, phi, zeta = sol.t, sol.y[0], sol.y[1]
    nu = float(phi[-1])
    # analytic head on [eta - eps_seed, eta] where phi ~ ((alpha+1) f(eta) (eta-U))^{1/(alpha+1)}
    head = (m * eta ** (m - 1.0) / ((alpha + 1.0) * f_eta) ** (alpha / (alpha + 1.0))
            * (alpha + 1.0) * eps_seed ** (1.0 / (alpha + 1.0)))
    xi = np.concatenate([[0.0], head + zeta])
    U_out = np.concatenate([[eta], U])
    b = float(xi[-1])
    if not (b > 0.0 and nu > 0.0 and np.all(np.isfinite(xi))):
        raise QuadratureError("subwave support integral failed")
    return SubwaveProfile(c=c, gamma=gamma, eta=eta, xi=xi, U=U_out, b=b, nu=nu)
