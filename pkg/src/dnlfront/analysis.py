"""Verdicts from raw runs: front-law fits, moving-frame errors, outcome
classification, hair-trigger experiments, and flux audits."""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import FitError, InconclusiveError, RankError
from .model import Params, ReactionKind, make_reaction
from .pde import (
    Sampling,
    SimulationRun,
    kanel_bump,
    radial_grid,
    run as run_sim,
    wave_evaluator,
)
from .waves import WaveProfile, critical_speed

__all__ = [
    "FrontFit",
    "ConvergenceReport",
    "Outcome",
    "Prediction",
    "Thresholds",
    "fit_front",
    "moving_frame_error",
    "classify_outcome",
    "hair_trigger_experiment",
    "flux_bound_audit",
    "exponential_approach_check",
]


@dataclass(frozen=True)
class FrontFit:
    c_hat: float
    B_hat: float
    r0_hat: float
    window: tuple
    residual_rms: float
    n_samples: int


def fit_front(eta_series: np.ndarray, N: int, window_fraction: float = 0.5) -> FrontFit:
    """Least squares for eta(t) ~ c t - B log t + r0 on the trailing window.

    The model is linear in (c, B, r0), so the exact minimizer is returned; no
    nonlinear optimizer is involved.  For N = 1 the fitted B is expected to
    hover near zero; for N > 1 it estimates (N-1) times the shift constant.
    """
    eta = np.asarray(eta_series, dtype=float)
    t, y = eta[:, 0], eta[:, 1]
    keep = np.isfinite(y) & (t > 0.0)
    t, y = t[keep], y[keep]
    t_min = t[-1] - window_fraction * (t[-1] - t[0])
    sel = t >= t_min
    if np.count_nonzero(sel) < 10:
        raise RankError(f"window [{t_min:.4g}, {t[-1]:.4g}] holds fewer than 10 samples")
    ts, ys = t[sel], y[sel]
    A = np.column_stack([ts, -np.log(ts), np.ones_like(ts)])
    coef, *_ = np.linalg.lstsq(A, ys, rcond=None)
    resid = A @ coef - ys
    return FrontFit(
        c_hat=float(coef[0]), B_hat=float(coef[1]), r0_hat=float(coef[2]),
        window=(float(ts[0]), float(ts[-1])),
        residual_rms=float(np.sqrt(np.mean(resid ** 2))),
        n_samples=int(ts.size),
    )


@dataclass(frozen=True)
class ConvergenceReport:
    times: np.ndarray
    sup_error: np.ndarray
    decay_rate_estimate: float  # diagnostic only, never a gate


class Shift(Enum):
    MEASURED_ETA = "measured_eta"
    FITTED_FRONT = "fitted_front"


def moving_frame_error(sim: SimulationRun, wave: WaveProfile,
                       shift: Shift = Shift.MEASURED_ETA) -> ConvergenceReport:
    """sup_r |u(r, t) - U(r - s(t))| at every snapshot.

    With the measured-eta shift both profiles share their free boundary; with
    the fitted-front shift s(t) follows the fitted law c t - B log t + r0.
    """
    ev = wave_evaluator(wave)
    x = sim.grid.centers
    if shift is Shift.FITTED_FRONT:
        fit = fit_front(sim.eta_series, sim.grid.N)

    times, errors = [], []
    eta_t = sim.eta_series
    for t_snap, u in sim.snapshots:
        if shift is Shift.MEASURED_ETA:
            s = float(np.interp(t_snap, eta_t[:, 0], eta_t[:, 1]))
        else:
            s = fit.c_hat * t_snap - fit.B_hat * np.log(t_snap) + fit.r0_hat
        err = float(np.max(np.abs(u - ev(x - s))))
        times.append(t_snap)
        errors.append(err)
    times = np.asarray(times)
    errors = np.asarray(errors)

    rate = np.nan
    pos = errors > 0.0
    if np.count_nonzero(pos) >= 3:
        coef = np.polyfit(times[pos], np.log(errors[pos]), 1)
        rate = float(-coef[0])
    return ConvergenceReport(times=times, sup_error=errors, decay_rate_estimate=rate)


class Outcome(Enum):
    SPREADING = "spreading"
    VANISHING = "vanishing"
    UNDECIDED = "undecided"


@dataclass(frozen=True)
class Thresholds:
    """Finite-horizon proxies for the asymptotic spreading/vanishing dichotomy."""

    spread_level: float = 0.95
    vanish_level: float = 0.01
    probe_fraction: float = 0.25
    c0: float = 1.0  # critical speed of the problem under study


def classify_outcome(sim: SimulationRun, thresholds: Thresholds) -> Outcome:
    """Spreading if u exceeds the spread level on the probe ball at the final
    time; vanishing if sup u fell below the vanish level; else undecided."""
    u = sim.final.u
    T = sim.final.t
    if float(u.max()) <= thresholds.vanish_level:
        return Outcome.VANISHING
    probe_radius = thresholds.probe_fraction * thresholds.c0 * T
    x = sim.grid.centers
    ball = np.abs(x) <= probe_radius
    if np.any(ball) and float(u[ball].min()) >= thresholds.spread_level:
        return Outcome.SPREADING
    return Outcome.UNDECIDED


class Prediction(Enum):
    SPREADING = "spreading"
    VANISHING_POSSIBLE = "vanishing_possible"
    BORDERLINE = "borderline"


@dataclass(frozen=True)
class HairTriggerResult:
    outcome: Outcome
    predicted: Prediction
    q: float
    qF: float
    T_final: float


def hair_trigger_experiment(params: Params, q: float, k: float,
                            datum: dict, T: float,
                            *, chunk: float = 10.0,
                            grid_R: float = 60.0, dr: float = 0.05) -> HairTriggerResult:
    """Run h(u) = k u^q (1-u) from a small bump and classify the outcome.

    The prediction follows the Fujita dichotomy for q_F = m(p-1) + p/N with a
    safety margin of 0.5 in q: at most one of spreading / possible vanishing
    is asserted, and exactly q = q_F is flagged borderline.  The run proceeds
    in chunks and stops as soon as the classification is decided.
    """
    h = make_reaction(ReactionKind.POWER_MONOSTABLE, q=q, k=k)
    qF = params.qF
    if abs(q - qF) < 0.5:
        predicted = Prediction.BORDERLINE
    elif q < qF:
        predicted = Prediction.SPREADING
    else:
        predicted = Prediction.VANISHING_POSSIBLE

    c0 = critical_speed(params, h, 0.0, tol=1e-3).c
    thresholds = Thresholds(c0=c0)
    grid = radial_grid(grid_R, dr, params.N)
    field = kanel_bump(grid, params, **datum)

    t_done = 0.0
    sim = None
    while t_done < T:
        t_next = min(t_done + chunk, T)
        field.t = 0.0
        sim = run_sim(field, t_next - t_done, params, h, Sampling(every=chunk / 10.0))
        field = sim.final
        t_done = t_next
        sim.final.t = t_done
        outcome = classify_outcome(sim, thresholds)
        # classification probes scale with the total elapsed time
        if outcome is not Outcome.UNDECIDED:
            return HairTriggerResult(outcome, predicted, q, qF, t_done)
    raise InconclusiveError(
        f"outcome undecided at T = {T}; extend the horizon (q = {q}, qF = {qF})")


class FluxTrend(Enum):
    BOUNDED = "bounded"
    GROWING = "growing"


@dataclass(frozen=True)
class FluxAudit:
    max_flux_after_tau: float
    trend: FluxTrend
    tau: float


def flux_bound_audit(sim: SimulationRun, tau: float, slack: float = 0.02) -> FluxAudit:
    """Maximum recorded interface flux for t >= tau, and whether the final
    decade sets new records (bounded means it does not, up to slack)."""
    series = sim.fluxmax_series
    t, fmax = series[:, 0], series[:, 1]
    after = t >= tau
    if not np.any(after):
        return FluxAudit(0.0, FluxTrend.BOUNDED, tau)
    peak = float(np.max(fmax[after]))
    T = t[-1]
    t_ld = T - 0.1 * (T - tau)
    late = after & (t >= t_ld)
    early = after & (t < t_ld)
    if not np.any(early):
        return FluxAudit(peak, FluxTrend.BOUNDED, tau)
    late_max = float(np.max(fmax[late])) if np.any(late) else 0.0
    early_max = float(np.max(fmax[early]))
    trend = FluxTrend.BOUNDED if late_max <= early_max * (1.0 + slack) else FluxTrend.GROWING
    return FluxAudit(peak, trend, tau)


@dataclass(frozen=True)
class ApproachCheck:
    rate: float
    M: float
    passed: bool


def exponential_approach_check(sim: SimulationRun, region_speed: float) -> ApproachCheck:
    """Fit log |1 - u(0, t)| over the trailing half of a spreading run.

    Passes when the fitted slope is negative and the final gap is below 1e-3.
    region_speed documents the expanding set |x| <= region_speed t on which
    the exponential approach is claimed; the probe sits at its center.
    """
    series = sim.center_series
    if series.size == 0:
        raise FitError("run recorded no center values")
    t, u0 = series[:, 0], series[:, 1]
    gap = np.abs(1.0 - u0)
    sel = t >= 0.5 * t[-1]
    if np.count_nonzero(sel) < 5 or np.all(gap[sel] >= 0.5):
        raise FitError("center value never approached 1; not a spreading run")
    ts, gs = t[sel], np.maximum(gap[sel], 1e-300)
    coef = np.polyfit(ts, np.log(gs), 1)
    rate = float(-coef[0])
    M = float(np.exp(coef[1]))
    passed = rate > 0.0 and gap[-1] <= 1e-3
    return ApproachCheck(rate=rate, M=M, passed=passed)
