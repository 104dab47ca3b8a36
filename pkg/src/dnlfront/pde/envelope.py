"""Sub/supersolution envelopes w(x,t) = f(t) U_{c*}(x - g(t)).

The pair (f, g) solves

    f' = phi_env(f),      f(0) = f0 in (1 - delta, 1 + delta),
    g' = c* f^{(p-1)m - 1} - k phi_env(f) / f,   g(0) = g0,

with phi_env(f) = -eps (f - 1), eps = H (1 - delta)^{(p-1)m} and
H = inf |h'| on [1 - delta, 1 + delta].  The linear relaxation satisfies the
required bullet conditions (vanishes at 1 with negative slope, |phi_env'|
bounded by eps) and has a closed form, which keeps the whole envelope
testable: f relaxes monotonically to 1 and g(t) - c* t converges.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import WindowError
from ..model import Params, ReactionSpec, negativity_window
from ..waves import WaveProfile
from .data import wave_evaluator
from .scheme import SimulationRun

__all__ = ["Envelope", "OrderingReport", "envelope", "compare_envelope"]


@dataclass(frozen=True)
class Envelope:
    t: np.ndarray
    f: np.ndarray
    g: np.ndarray
    f0: float
    g0: float
    k: float
    eps: float
    delta: float
    c_star: float

    @property
    def phi_env(self):
        """The chosen relaxation function, linear: phi_env(f) = -eps (f - 1)."""
        eps = self.eps
        return lambda f: -eps * (np.asarray(f, dtype=float) - 1.0)


def _envelope_gain(params: Params, h: ReactionSpec, wave: WaveProfile,
                   f0: float, eps: float, delta: float) -> float:
    """A k large enough that the reaction surplus is dominated where U' is small.

    Away from U = 1 the requirement is k |U'| f' >= U f' + (f^{m(p-1)} h(U)
    - h(fU))_+ pointwise; evaluate the worst ratio on a (f, U) grid and pad.
    """
    mp1 = params.m * (params.p - 1.0)
    # |U'| along the wave from the pressure slope: U' = V' / (m U^{m-1-alpha})
    U = wave.U
    keep = (U > 1e-3) & (U < 1.0 - delta / 2.0)
    U = U[keep]
    Up = np.abs(wave.Vp[keep]) * np.power(U, 1.0 + params.alpha - params.m) / params.m
    fs = np.linspace(min(f0, 1.0 - 1e-9), max(f0, 1.0 + 1e-9), 12)
    worst = 1.0
    for f in fs:
        fp = abs(eps * (1.0 - f))
        if fp == 0.0:
            continue
        surplus = f ** mp1 * np.asarray(h(U), dtype=float) - np.asarray(h(f * U), dtype=float)
        if f > 1.0:
            surplus = -surplus
        need = (U * fp + np.clip(surplus, 0.0, None)) / (fp * Up)
        worst = max(worst, float(np.max(need)))
    return 2.0 * worst


def envelope(params: Params, h: ReactionSpec, f0: float, T: float,
             *, c_star: float, wave: WaveProfile, g0: float = 0.0,
             delta: float | None = None, k: float | None = None,
             n_samples: int = 2001) -> Envelope:
    """Solve the envelope ODE system on [0, T].

    f has the closed form 1 + (f0 - 1) e^{-eps t}; g is accumulated by
    high-order quadrature of its right-hand side.
    """
    if delta is None:
        delta = 0.5 * negativity_window(h)
    if not 1.0 - delta < f0 < 1.0 + delta:
        raise WindowError(f"f0 = {f0} outside the window (1-delta, 1+delta), delta = {delta:.4g}")
    lo, hi = 1.0 - delta, 1.0 + delta
    grid_f = np.linspace(lo, hi, 2001)
    H = float(np.min(np.abs(np.asarray(h.deriv(grid_f), dtype=float))))
    eps = H * (1.0 - delta) ** ((params.p - 1.0) * params.m)
    if eps <= 0.0:
        raise WindowError("h' vanishes inside the chosen window; shrink delta")
    if k is None:
        k = _envelope_gain(params, h, wave, f0, eps, delta)

    t = np.linspace(0.0, T, n_samples)
    f = 1.0 + (f0 - 1.0) * np.exp(-eps * t)
    mp1 = params.m * (params.p - 1.0) - 1.0

    def gprime(s):
        fs = 1.0 + (f0 - 1.0) * np.exp(-eps * s)
        return c_star * fs ** mp1 + k * eps * (fs - 1.0) / fs

    # Gauss-Legendre per interval: the integrand is a smooth exponential
    nodes, weights = np.polynomial.legendre.leggauss(8)
    a, b = t[:-1], t[1:]
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    segs = (gprime(mid[:, None] + half[:, None] * nodes[None, :]) @ weights) * half
    g = g0 + np.concatenate([[0.0], np.cumsum(segs)])
    return Envelope(t=t, f=f, g=g, f0=f0, g0=g0, k=float(k), eps=float(eps),
                    delta=float(delta), c_star=float(c_star))


@dataclass(frozen=True)
class OrderingReport:
    side: str
    count: int
    worst: float
    tol: float
    times: np.ndarray


def compare_envelope(run: SimulationRun, env: Envelope, wave: WaveProfile,
                     side: str, tol: float | None = None) -> OrderingReport:
    """Count ordering violations between the run and the envelope.

    side = "sub": the envelope was started below the solution, so u >= w - tol
    is expected at every snapshot; side = "super" symmetric.  tol defaults to
    the scheme resolution 10 dr.
    """
    if side not in ("sub", "super"):
        raise ValueError("side must be 'sub' or 'super'")
    if tol is None:
        tol = 10.0 * run.grid.dr
    ev = wave_evaluator(wave)
    x = run.grid.centers
    count, worst, times = 0, 0.0, []
    for t_snap, u in run.snapshots:
        f = 1.0 + (env.f0 - 1.0) * np.exp(-env.eps * t_snap)
        g = float(np.interp(t_snap, env.t, env.g))
        w = f * ev(x - g)
        gap = (w - tol) - u if side == "sub" else u - (w + tol)
        bad = gap > 0.0
        count += int(np.count_nonzero(bad))
        if np.any(bad):
            worst = max(worst, float(np.max(gap)))
        times.append(t_snap)
    return OrderingReport(side=side, count=count, worst=worst, tol=tol,
                          times=np.asarray(times))
