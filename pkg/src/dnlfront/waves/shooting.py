"""Phase-plane shooting for the travelling-wave trajectory equation.

Wavefront profiles of u_t = (|(u^m)'|^{p-2}(u^m)')' + gamma |(u^m)'|^{p-2}(u^m)'
+ h(u) correspond, in the (U, phi) plane with phi = |(U^m)'|^{p-1}, to
trajectories of

    dphi/dU = c + gamma m U^{m-1} phi^{1-alpha} - f(U) / phi^alpha,

with f(U) = m U^{m-1} h(U).  The finite wavefront is the unique trajectory
joining (1, 0) to (0, 0) that enters the origin with positive slope; it exists
only at the critical speed c(gamma).  Shooting is done from U = 1 downward:
the entry direction at (1, 0) is unique for p >= 2, so the seeding asymptote
phi ~ C (1-U)^{p-1} determines the trajectory, whereas the origin side is a
degenerate node and integrating away from it is ill-posed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from ..errors import (
    AmbiguousError,
    BracketError,
    ConvergenceError,
    IntegrationError,
    SeedError,
)
from ..model import Params, ReactionSpec, reaction_stats, reduced_reaction
from .types import PhaseTrajectory, ShotClass, Termination, TerminationKind

__all__ = [
    "predicted_endpoint_coefficient",
    "shoot_from_one",
    "classify_shot",
    "critical_speed",
    "upper_bound_speed",
    "compute_barrier",
    "DEFAULT_EPS_HI",
    "DEFAULT_EPS_LO_SCHEDULE",
    "DEFAULT_MARGIN",
]

DEFAULT_EPS_HI = 1e-6
DEFAULT_EPS_LO_SCHEDULE = (1e-4, 1e-5, 1e-6)
DEFAULT_MARGIN = 0.25
_RTOL = 1e-10


def default_eps_hi(params: Params) -> float:
    # the entry asymptote at U = 1 is increasingly stiff for p > 2
    # (attraction rate ~ (1-U)^{1-p}); start a little further out there
    return 1e-6 if params.p <= 2.0 else 1e-5


def ode_method(params: Params) -> str:
    return "DOP853" if params.p <= 2.0 else "LSODA"


def scalar_forcing(h: ReactionSpec, params: Params):
    """f(U) = m U^{m-1} h(U) specialized for scalar evaluation in ODE loops."""
    m = params.m
    hev = h.evaluator
    if m == 1.0:
        return lambda u: float(hev(u))
    if m == 2.0:
        return lambda u: 2.0 * u * float(hev(u))
    return lambda u: m * u ** (m - 1.0) * float(hev(u))


def predicted_endpoint_coefficient(params: Params, h: ReactionSpec, c: float, gamma: float) -> float:
    """Coefficient C of the entry asymptote phi = C (1-U)^{p-1} at (1, 0).

    Matching powers of (1-U) in the trajectory equation gives
    C = (m |h'(1)| / c)^{p-1} for p > 2 and the positive root of
    C^2 + (c + gamma m) C - m |h'(1)| = 0 for p = 2.
    """
    hp1 = abs(float(h.deriv(np.array(1.0))))
    m, p = params.m, params.p
    if c <= 0.0 or not math.isfinite(c):
        raise SeedError(f"candidate speed must be positive, got {c}")
    if p > 2.0:
        C = (m * hp1 / c) ** (p - 1.0)
    else:
        b = c + gamma * m
        C = 0.5 * (-b + math.sqrt(b * b + 4.0 * m * hp1))
    if not (math.isfinite(C) and C > 0.0):
        raise SeedError(f"endpoint coefficient is not finite: {C}")
    return C


def shoot_from_one(params: Params, h: ReactionSpec, c: float, gamma: float,
                   eps_hi: float | None = None,
                   eps_lo: float = 1e-5,
                   rtol: float = _RTOL) -> PhaseTrajectory:
    """Integrate the trajectory from U = 1 - eps_hi down to U = eps_lo.

    The shot is seeded on the entry asymptote at 1 and terminates either at
    the low cutoff or when phi falls to the event floor at some U* > eps_lo
    (recorded as a U-axis hit).
    """
    if eps_hi is None:
        eps_hi = default_eps_hi(params)
    if eps_lo <= 0.0 or eps_hi <= 0.0:
        raise ValueError("eps_lo and eps_hi must be positive")
    if eps_lo >= 1.0 - eps_hi:
        raise ValueError("eps_lo must be below 1 - eps_hi")
    m, alpha = params.m, params.alpha
    f = scalar_forcing(h, params)
    C = predicted_endpoint_coefficient(params, h, c, gamma)
    u0 = 1.0 - eps_hi
    phi0 = C * eps_hi ** (params.p - 1.0)
    floor = min(0.5 * phi0, 1e-3 * c * eps_lo)

    gm = gamma * m

    def rhs(u, y):
        phi = y[0]
        if phi < floor * 1e-3:
            phi = floor * 1e-3
        val = c - f(u) / phi ** alpha
        if gm != 0.0:
            val += gm * u ** (m - 1.0) * phi ** (1.0 - alpha)
        return (val,)

    def hit_floor(u, y):
        return y[0] - floor

    hit_floor.terminal = True
    hit_floor.direction = -1

    sol = solve_ivp(rhs, (u0, eps_lo), (phi0,), method=ode_method(params),
                    rtol=rtol, atol=1e-15, events=(hit_floor,), dense_output=False)
    if not sol.success and sol.status != 1:
        # a crash into the U-axis has unbounded slope; step underflow at
        # vanishing phi is that crash rather than a tolerance failure
        if sol.y.shape[1] and float(sol.y[0][-1]) < max(10.0 * floor, 1e-9):
            term = Termination(TerminationKind.HIT_U_AXIS, float(sol.t[-1]))
            return PhaseTrajectory(c=c, gamma=gamma, U=sol.t,
                                   phi=np.maximum(sol.y[0], 0.0), termination=term,
                                   eps_hi=eps_hi, eps_lo=eps_lo, seed_coefficient=C)
        raise IntegrationError(f"shot failed at c={c}, gamma={gamma}: {sol.message}")

    U = sol.t
    phi = sol.y[0]
    if sol.status == 1 and len(sol.t_events[0]) > 0:
        u_star = float(sol.t_events[0][0])
        term = Termination(TerminationKind.HIT_U_AXIS, u_star)
    else:
        term = Termination(TerminationKind.REACHED_LOW_CUTOFF, float(phi[-1]))
    return PhaseTrajectory(c=c, gamma=gamma, U=U, phi=np.maximum(phi, 0.0),
                           termination=term, eps_hi=eps_hi, eps_lo=eps_lo,
                           seed_coefficient=C)


def classify_shot(traj: PhaseTrajectory, margin: float = DEFAULT_MARGIN) -> ShotClass:
    """Decide whether the shot speed is below or above critical.

    Subcritical trajectories exit through the phi-axis, so at the low cutoff
    phi stays bounded away from c*U; supercritical ones either hit the U-axis
    or enter along the slow balance phi ~ U^{m(p-1)} << c U.  The critical
    trajectory has slope exactly c at the origin, hence the dead band.
    """
    if traj.termination.kind is TerminationKind.HIT_U_AXIS:
        return ShotClass.TOO_FAST
    ratio = traj.phi_end / (traj.c * traj.eps_lo)
    if ratio >= 1.0 + margin:
        return ShotClass.TOO_SLOW
    if ratio < 1.0 - margin:
        return ShotClass.TOO_FAST
    raise AmbiguousError(ratio, traj.eps_lo)


@dataclass(frozen=True)
class CriticalSpeed:
    c: float
    bracket: tuple
    gamma: float
    iterations: int


def _classify_refined(params, h, c, gamma, eps_hi, schedule, margin, rtol):
    """Classify with the eps_lo refinement schedule; tie-break at the floor.

    Ambiguity at the smallest cutoff means |c - c(gamma)| is comparable to
    the cutoff itself, far below any practical bisection tolerance; the sign
    of (ratio - 1) is then still monotone in c and is used as tie-break.
    """
    last = None
    for eps_lo in schedule:
        traj = shoot_from_one(params, h, c, gamma, eps_hi=eps_hi, eps_lo=eps_lo,
                              rtol=rtol)
        try:
            return classify_shot(traj, margin=margin), False
        except AmbiguousError as exc:
            last = exc
    assert last is not None
    cls = ShotClass.TOO_SLOW if last.ratio >= 1.0 else ShotClass.TOO_FAST
    return cls, True


def critical_speed(params: Params, h: ReactionSpec, gamma: float, tol: float = 1e-3,
                   *,
                   eps_hi: float | None = None,
                   eps_lo_schedule: tuple = DEFAULT_EPS_LO_SCHEDULE,
                   margin: float = DEFAULT_MARGIN,
                   rtol: float = _RTOL) -> CriticalSpeed:
    """Critical speed c(gamma) by bisection over [tol, coarse upper bound].

    Valid because the trajectory through (1, 0) is pointwise decreasing in c,
    so the too-slow/too-fast classification switches exactly once.
    """
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    stats = reaction_stats(h, params)
    alpha, m = params.alpha, params.m
    c_hi = (alpha + 1.0) * (m * stats.sigma0 / alpha ** alpha) ** (1.0 / (alpha + 1.0))
    c_lo = tol

    cls_hi, amb_hi = _classify_refined(params, h, c_hi, gamma, eps_hi,
                                       eps_lo_schedule, margin, rtol)
    if cls_hi is not ShotClass.TOO_FAST or amb_hi:
        raise BracketError(
            f"shot at the coarse upper bound c={c_hi:.6g} did not classify too fast; "
            "sigma0 may be miscomputed")

    ambiguous_streak = 0
    iterations = 0
    while c_hi - c_lo > tol:
        c_mid = 0.5 * (c_lo + c_hi)
        cls, ambiguous = _classify_refined(params, h, c_mid, gamma, eps_hi,
                                           eps_lo_schedule, margin, rtol)
        ambiguous_streak = ambiguous_streak + 1 if ambiguous else 0
        if ambiguous_streak >= 8 and c_hi - c_lo > tol:
            raise ConvergenceError(
                f"classification stayed ambiguous near c={c_mid:.8g} with bracket width "
                f"{c_hi - c_lo:.3g} > tol={tol:.3g}")
        if cls is ShotClass.TOO_SLOW:
            c_lo = c_mid
        else:
            c_hi = c_mid
        iterations += 1
    return CriticalSpeed(c=0.5 * (c_lo + c_hi), bracket=(c_lo, c_hi),
                         gamma=gamma, iterations=iterations)


@dataclass(frozen=True)
class SpeedBounds:
    coarse: float
    refined: float


def upper_bound_speed(params: Params, h: ReactionSpec, gamma: float) -> SpeedBounds:
    """Upper bounds for c(gamma) from the comparison-line construction.

    coarse ignores convection; refined solves the convection-aware condition
    (c/(alpha+1))^{alpha+1} alpha^alpha + (gamma m/(alpha+1))^{1/alpha+1} alpha
    = m sigma0 with equality (monotone in c).
    """
    stats = reaction_stats(h, params)
    alpha, m = params.alpha, params.m
    coarse = (alpha + 1.0) * (m * stats.sigma0 / alpha ** alpha) ** (1.0 / (alpha + 1.0))
    if gamma == 0.0:
        return SpeedBounds(coarse=coarse, refined=coarse)
    gshift = (gamma * m / (alpha + 1.0)) ** (1.0 / alpha + 1.0) * alpha

    def g(c):
        return (c / (alpha + 1.0)) ** (alpha + 1.0) * alpha ** alpha + gshift - m * stats.sigma0

    if g(0.0) >= 0.0:
        return SpeedBounds(coarse=coarse, refined=0.0)
    refined = brentq(g, 0.0, coarse * (1.0 + 1e-12), xtol=1e-14)
    return SpeedBounds(coarse=coarse, refined=float(refined))


def compute_barrier(params: Params, h: ReactionSpec, c: float, gamma: float,
                    k1: float = 1.0) -> tuple:
    """Constants (k1, k2) such that phi = k1 + k2 U majorizes every trajectory.

    The line is a barrier when the trajectory slope stays below k2 along it;
    this is verified directly on a dense grid, growing k2 until it holds.
    """
    m, alpha = params.m, params.alpha
    f = reduced_reaction(h, params)
    us = np.linspace(0.0, 1.0, 2001)
    fu = np.asarray(f(us), dtype=float)

    def line_slope_excess(k2):
        line = k1 + k2 * us
        rhs = c + gamma * m * np.power(us, m - 1.0, where=us > 0, out=np.zeros_like(us)) \
            * line ** (1.0 - alpha) - fu / line ** alpha
        return float(np.max(rhs)) - k2

    k2 = max(c + 1.0, 1.0)
    for _ in range(200):
        excess = line_slope_excess(k2)
        if excess < 0.0:
            return (k1, k2)
        k2 = max(k2 * 1.5, k2 + excess + 1.0)
    raise ConvergenceError("no admissible barrier line found")
