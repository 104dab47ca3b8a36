"""The speed curve gamma -> c(gamma), its derivative, and the shift constant.

c'(gamma) admits a quotient representation in terms of the level function
P(q) = V'(V^{-1}(q)) of the pressure.  Differentiating the ODE satisfied by
|P|^{p-1} with respect to the convection parameter gives a linear equation
for W = d|P|^{p-1}/dgamma,

    W' - a(q) W = c'(gamma)/((m-alpha) q) + |P(q)|^{p-2},

whose integrating factor is 1/Psi with

    Psi(q) = q^{1/(m-alpha)} exp( int_q^1 [ (p-2) gamma / ((p-1)|P(r)|)
             + h(s(r)) / ((p-1)|P(r)|^p s(r)) ] dr ),

s(r) being the density at pressure level r.  Since Psi W vanishes at both
pressure endpoints,

    c'(gamma) = -(m-alpha) * int Psi(q) |P(q)|^{p-2} dq / int Psi(q)/q dq.

For p = 2 the weight |P|^{p-2} is identically 1.  The quotient is negative by
inspection and is cross-checked against finite differences of the curve.
"""
from __future__ import annotations

import numpy as np
from scipy.integrate import cumulative_trapezoid

from ..errors import SingularityError
from ..model import Params, ReactionSpec
from .profile import ProfileGrid, _shoot_with_xi, phi_interpolant
from .shooting import critical_speed, default_eps_hi
from .types import PhaseTrajectory, SpeedCurve, Termination, TerminationKind

__all__ = ["cprime_formula", "speed_curve", "admissible_gamma_cap", "GAMMA_CAP"]

# the theory only guarantees a positive admissibility window for the
# convection parameter; stay well inside it
GAMMA_CAP = 0.5


def admissible_gamma_cap(c0: float, m: float) -> float:
    return min(GAMMA_CAP, c0 / (2.0 * m))


def _sampled_trajectory(params, h, c, gamma, n=3000):
    """Dense resampling of the (near-)critical shot for quadrature work."""
    grid = ProfileGrid(n=n)
    eps_hi = default_eps_hi(params)
    U, phi, _, C, hit = _shoot_with_xi(params, h, c, gamma, eps_hi, grid.eps_lo, n)
    kind = TerminationKind.HIT_U_AXIS if hit else TerminationKind.REACHED_LOW_CUTOFF
    return PhaseTrajectory(c=c, gamma=gamma, U=U, phi=np.maximum(phi, 0.0),
                           termination=Termination(kind, float(phi[-1])),
                           eps_hi=eps_hi, eps_lo=grid.eps_lo, seed_coefficient=C)


def cprime_formula(params: Params, h: ReactionSpec, gamma: float,
                   *, c: float | None = None, n_nodes: int = 4000,
                   tol: float = 1e-6) -> float:
    """Evaluate c'(gamma) through the Psi-integral quotient.

    The inner exponential integral is accumulated on a node set clustered at
    both pressure endpoints; beyond the upper cluster Psi is already damped
    to zero, so the integrable endpoint singularity of the integrand needs no
    special closed form.
    """
    m, p, alpha = params.m, params.p, params.alpha
    if c is None:
        c = critical_speed(params, h, gamma, tol=tol).c
    traj = _sampled_trajectory(params, h, c, gamma)
    phi_of = phi_interpolant(traj, params)

    q_max = m / (m - alpha)
    r_lo = q_max * 1e-8
    bottom = np.geomspace(r_lo, 0.5 * q_max, n_nodes // 2)
    top = q_max - np.geomspace(q_max * 1e-10, 0.5 * q_max, n_nodes - n_nodes // 2)
    r = np.unique(np.concatenate([bottom, top, [1.0]]))

    s = np.power((m - alpha) * r / m, 1.0 / (m - alpha))
    P_abs = np.power(phi_of(s) / s, alpha)
    hs = np.asarray(h(s), dtype=float)
    g = hs / ((p - 1.0) * np.power(P_abs, p) * s)
    if gamma != 0.0 and p > 2.0:
        g = g + (p - 2.0) * gamma / ((p - 1.0) * P_abs)
    if not np.all(np.isfinite(g)):
        raise SingularityError("Psi exponent integrand is not finite")

    G = np.concatenate([[0.0], cumulative_trapezoid(g, r)])
    i_ref = int(np.searchsorted(r, 1.0))
    I = G[i_ref] - G  # int_q^1 g dr
    with np.errstate(over="ignore", under="ignore"):
        psi = np.power(r, 1.0 / (m - alpha)) * np.exp(np.minimum(I, 700.0))
    if not np.all(np.isfinite(psi)):
        raise SingularityError("Psi integral failed to converge near the upper endpoint")

    weight = np.power(P_abs, p - 2.0) if p != 2.0 else np.ones_like(P_abs)
    num = np.trapezoid(psi * weight, r)
    den = np.trapezoid(psi / r, r)
    # analytic head below r_lo where Psi ~ E q^{1/(m-alpha)}
    E = psi[0] / np.power(r[0], 1.0 / (m - alpha))
    inv = 1.0 / (m - alpha)
    num += E * weight[0] * r[0] ** (inv + 1.0) / (inv + 1.0)
    den += E * r[0] ** inv / inv
    if not (np.isfinite(num) and np.isfinite(den) and den > 0.0):
        raise SingularityError("Psi quotient is not finite")
    return float(-(m - alpha) * num / den)


def speed_curve(params: Params, h: ReactionSpec, gamma_grid, tol: float = 1e-6) -> SpeedCurve:
    """c(gamma) on a grid with both derivative estimators and c_sharp.

    Individual grid points that fail keep the sweep going and are reported in
    the failures list.  c_sharp = -c'(0)/c(0) uses a second-order one-sided
    difference with steps gamma_1 = 1e-2 c(0) and 2 gamma_1, justified by the
    smoothness of c near 0.
    """
    gammas = np.asarray(sorted(float(g) for g in gamma_grid), dtype=float)
    if gammas[0] != 0.0:
        raise ValueError("gamma grid must include 0")
    c0 = critical_speed(params, h, 0.0, tol=tol).c
    cap = admissible_gamma_cap(c0, params.m)
    if gammas[-1] > cap + 1e-12:
        raise ValueError(f"gamma grid exceeds the admissible cap {cap:.4g}")

    c_values = np.full_like(gammas, np.nan)
    brackets = []
    failures = []
    c_values[0] = c0
    brackets.append((c0 - tol, c0 + tol))
    for i, g in enumerate(gammas[1:], start=1):
        try:
            res = critical_speed(params, h, g, tol=tol)
            c_values[i] = res.c
            brackets.append(res.bracket)
        except Exception as exc:  # keep sweeping, flag the gap
            failures.append((float(g), repr(exc)))
            brackets.append(None)

    ok = np.isfinite(c_values)
    cprime_fd = np.full_like(gammas, np.nan)
    if np.count_nonzero(ok) >= 3:
        cprime_fd[ok] = np.gradient(c_values[ok], gammas[ok], edge_order=2)

    cprime_form = np.full_like(gammas, np.nan)
    for i, g in enumerate(gammas):
        if not ok[i]:
            continue
        try:
            cprime_form[i] = cprime_formula(params, h, float(g), c=float(c_values[i]))
        except Exception as exc:
            failures.append((float(g), repr(exc)))

    gamma1 = 1e-2 * c0
    c1 = critical_speed(params, h, gamma1, tol=tol).c
    c2 = critical_speed(params, h, 2.0 * gamma1, tol=tol).c
    cprime0 = (-3.0 * c0 + 4.0 * c1 - c2) / (2.0 * gamma1)
    c_sharp = -cprime0 / c0

    return SpeedCurve(gammas=gammas, c_values=c_values, cprime_fd=cprime_fd,
                      cprime_formula=cprime_form, c_sharp=float(c_sharp),
                      brackets=brackets, failures=failures)
