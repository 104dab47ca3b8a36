"""The acceptance suite: every shipped claim, checked at its stated tolerance.

Each criterion returns a CriterionResult; `run_acceptance` executes them in
order, reusing the shared heavy artifacts (speed curve, long runs) through a
lazy context.  The asymptotic statements are tested through their finite-
horizon proxies with the tolerances fixed below; nothing is calibrated at
run time.
"""
from __future__ import annotations

import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .analysis import (
    FluxTrend,
    Outcome,
    Shift,
    fit_front,
    flux_bound_audit,
    hair_trigger_experiment,
    moving_frame_error,
)
from .errors import DnlError
from .model import ReactionKind, ReactionSpec, make_reaction, validate_params
from .pde import (
    RadialField,
    Sampling,
    Stepper,
    compare_envelope,
    envelope,
    kanel_bump,
    line_grid,
    plateau_datum,
    radial_grid,
    run as run_sim,
    step,
    wave_datum,
)
from .waves import (
    compute_barrier,
    critical_speed,
    endpoint_fit,
    pressure_view,
    shoot_from_one,
    speed_curve,
    upper_bound_speed,
    wave_profile,
)
from .waves.speed import _sampled_trajectory

DR = 0.02  # grid spacing pinned by the front-law criteria


@dataclass
class CriterionResult:
    index: int
    title: str
    passed: bool
    details: str
    elapsed: float


class AcceptanceContext:
    """Lazily built shared artifacts for the acceptance runs."""

    def __init__(self, out_dir: Path | None = None):
        self.out = Path(out_dir) if out_dir is not None else None
        self.params = validate_params(2, 2, 1)
        self.logistic = make_reaction(ReactionKind.MONOSTABLE)
        self._cache: dict = {}

    def _get(self, key, builder):
        if key not in self._cache:
            self._cache[key] = builder()
        return self._cache[key]

    # -- waves ---------------------------------------------------------------

    @property
    def c0(self):
        return self._get("c0", lambda: critical_speed(
            self.params, self.logistic, 0.0, tol=1e-6).c)

    @property
    def wave0(self):
        def build():
            prof = wave_profile(self.params, self.logistic, c=self.c0, gamma=0.0)
            self._write_wave_artifacts(prof)
            return prof
        return self._get("wave0", build)

    @property
    def curve(self):
        def build():
            curve = speed_curve(self.params, self.logistic,
                                np.arange(0.0, 0.101, 0.02), tol=1e-6)
            if self.out is not None:
                from .io_csv import write_csv
                d = self.out / "speed_curve"
                d.mkdir(parents=True, exist_ok=True)
                write_csv(d / "speed_curve.csv",
                          ["gamma", "c", "cprime_fd", "cprime_formula"],
                          [curve.gammas, curve.c_values, curve.cprime_fd,
                           curve.cprime_formula])
            return curve
        return self._get("curve", build)

    def _write_wave_artifacts(self, prof):
        if self.out is None:
            return
        from .io_csv import write_csv
        d = self.out / "wave"
        d.mkdir(parents=True, exist_ok=True)
        traj = _sampled_trajectory(self.params, self.logistic, self.c0, 0.0)
        write_csv(d / "trajectory.csv", ["U", "phi"], [traj.U, traj.phi])
        write_csv(d / "profile.csv", ["xi", "U", "V", "Vp"],
                  [prof.xi[::-1], prof.U[::-1], prof.V[::-1], prof.Vp[::-1]])

    # -- runs ----------------------------------------------------------------

    def _persist_run(self, sim, name, fit=None, report=None):
        if self.out is None:
            return
        from .cli import write_run_artifacts
        from .io_csv import write_csv
        d = self.out / name
        d.mkdir(parents=True, exist_ok=True)
        write_run_artifacts(sim, d, "acceptance")
        if fit is not None:
            write_csv(d / "frontfit.csv",
                      ["c_hat", "B_hat", "r0_hat", "t_min", "t_max",
                       "residual_rms", "config_hash"],
                      [[fit.c_hat], [fit.B_hat], [fit.r0_hat], [fit.window[0]],
                       [fit.window[1]], [fit.residual_rms], ["acceptance"]])
        if report is not None:
            write_csv(d / "convergence.csv", ["t", "sup_error", "config_hash"],
                      [report.times, report.sup_error,
                       ["acceptance"] * len(report.times)])

    @property
    def run1d(self):
        def build():
            grid = radial_grid(245.0, DR, 1)
            datum = plateau_datum(grid, self.params, self.logistic,
                                  rho=5.0, eta=0.9, c=0.5)
            sim = run_sim(datum, 200.0, self.params, self.logistic,
                          Sampling(every=0.25, snapshot_times=(100.0, 200.0)))
            return sim
        return self._get("run1d", build)

    def _radial_run(self, N):
        grid = radial_grid(365.0, DR, N)
        datum = plateau_datum(grid, self.params, self.logistic,
                              rho=10.0, eta=0.9, c=0.3)
        return run_sim(datum, 300.0, self.params, self.logistic,
                       Sampling(every=0.25, snapshot_times=(150.0, 300.0)))

    @property
    def run2d(self):
        return self._get("run2d", lambda: self._radial_run(2))

    @property
    def run3d(self):
        return self._get("run3d", lambda: self._radial_run(3))

    @property
    def tw_run(self):
        def build():
            grid = line_grid(-45.0, 33.0, DR, left_bc="neumann")
            datum = wave_datum(grid, self.wave0, x0=0.0)
            return run_sim(datum, 20.0, self.params, self.logistic,
                           Sampling(every=0.5,
                                    snapshot_times=tuple(np.arange(2.0, 20.1, 2.0))))
        return self._get("tw_run", build)


def _result(index, title, passed, details, t0):
    return CriterionResult(index, title, bool(passed), details, time.time() - t0)


def criterion_1(ctx):
    t0 = time.time()
    res = critical_speed(ctx.params, ctx.logistic, 0.0, tol=1e-3)
    elapsed = time.time() - t0
    err = abs(res.c - 1.0)
    passed = err <= 1e-3 and elapsed < 5.0
    return _result(1, "exact-wave speed",
                   passed, f"c = {res.c:.6f}, |c-1| = {err:.2e}, {elapsed:.2f}s", t0)


def criterion_2(ctx):
    t0 = time.time()
    prof = ctx.wave0
    exact = np.clip(1.0 - np.exp(prof.xi / 2.0), 0.0, 1.0)
    sup_err = float(np.max(np.abs(prof.U - exact)))
    pv = pressure_view(prof, ctx.params, ctx.logistic)
    ok = (sup_err <= 1e-4
          and abs(pv.Vp_front + 1.0) <= 1e-3
          and abs(pv.Vpp_front + 0.5) <= 1e-2
          and abs(pv.predicted_Vpp + 0.5) <= 1e-6)
    return _result(2, "exact-wave profile and pressure limits", ok,
                   f"sup err {sup_err:.2e}, V' {pv.Vp_front:.5f}, "
                   f"V'' {pv.Vpp_front:.5f} (pred {pv.predicted_Vpp:.5f})", t0)


def criterion_3(ctx):
    t0 = time.time()
    h4 = make_reaction(ReactionKind.MONOSTABLE, k=4.0)
    c = critical_speed(ctx.params, h4, 0.0, tol=1e-3).c
    err = abs(c - 2.0)
    return _result(3, "scaling law", err <= 2e-3, f"c = {c:.6f}, |c-2| = {err:.2e}", t0)


def criterion_4(ctx):
    t0 = time.time()
    details = []
    ok = True
    for p in (2, 3):
        params = validate_params(2, p, 1)
        c = ctx.c0 if p == 2 else critical_speed(params, ctx.logistic, 0.0, tol=1e-6).c
        traj = _sampled_trajectory(params, ctx.logistic, c, 0.0)
        fit = endpoint_fit(traj, params, ctx.logistic)
        slope_ok = abs(fit.slope0 - c) <= 0.01 * c
        mu_ok = abs(fit.mu1 - (p - 1.0)) <= 0.05 * (p - 1.0)
        ok = ok and slope_ok and mu_ok
        details.append(f"p={p}: slope {fit.slope0:.4f}/{c:.4f}, mu {fit.mu1:.4f}")
    return _result(4, "endpoint asymptotics", ok, "; ".join(details), t0)


def criterion_5(ctx):
    t0 = time.time()
    curve = ctx.curve
    mono = bool(np.all(np.diff(curve.c_values) <= 1e-9))
    in_range = bool(np.all((curve.cprime_fd > -2.0) & (curve.cprime_fd < 0.0))
                    and np.all((curve.cprime_formula > -2.0) & (curve.cprime_formula < 0.0)))
    rel = np.abs(curve.cprime_formula - curve.cprime_fd) / np.abs(curve.cprime_fd)
    agree = bool(np.max(rel) <= 0.02)
    sharp = curve.c_sharp > 0.0
    ok = mono and in_range and agree and sharp
    return _result(5, "speed-curve structure", ok,
                   f"monotone {mono}, derivatives in (-m,0) {in_range}, "
                   f"max rel disagreement {np.max(rel):.3%}, c_sharp {curve.c_sharp:.4f}", t0)


def criterion_6(ctx):
    t0 = time.time()
    sim = ctx.run1d
    elapsed = time.time() - t0
    fit = fit_front(sim.eta_series, N=1)
    ctx._persist_run(sim, "run1d", fit=fit)
    c_ok = abs(fit.c_hat - ctx.c0) <= 0.02 * ctx.c0
    b_ok = abs(fit.B_hat) <= 0.15
    ok = c_ok and b_ok and elapsed < 120.0
    return _result(6, "1D front law (no log shift)", ok,
                   f"c_hat {fit.c_hat:.4f} (c* {ctx.c0:.4f}), B_hat {fit.B_hat:.4f}, "
                   f"{elapsed:.0f}s", t0)


def criterion_7(ctx):
    t0 = time.time()
    details, ok = [], True
    for N, sim_name in ((2, "run2d"), (3, "run3d")):
        t_run = time.time()
        sim = getattr(ctx, sim_name)
        elapsed = time.time() - t_run
        fit = fit_front(sim.eta_series, N=N)
        ctx._persist_run(sim, sim_name, fit=fit)
        target = (N - 1) * ctx.curve.c_sharp
        rel = abs(fit.B_hat - target) / target
        ok = ok and rel <= 0.15 and elapsed < 600.0
        details.append(f"N={N}: B_hat {fit.B_hat:.4f} vs {target:.4f} "
                       f"({rel:.1%}, {elapsed:.0f}s)")
    return _result(7, "radial logarithmic shift", ok, "; ".join(details), t0)


def criterion_8(ctx):
    t0 = time.time()
    sim = ctx.run2d
    report = moving_frame_error(sim, ctx.wave0, Shift.MEASURED_ETA)
    ctx._persist_run(sim, "run2d", report=report)
    e_half = report.sup_error[int(np.argmin(np.abs(report.times - 150.0)))]
    e_end = report.sup_error[int(np.argmin(np.abs(report.times - 300.0)))]
    ok = e_end <= 0.05 and e_end <= e_half
    return _result(8, "moving-frame convergence", ok,
                   f"sup err {e_half:.4f} @150 -> {e_end:.4f} @300", t0)


def criterion_9(ctx):
    t0 = time.time()
    details, ok = [], True
    for name in ("run1d", "run2d", "run3d", "tw_run"):
        sim = getattr(ctx, name)
        audit = flux_bound_audit(sim, tau=1.0)
        bounded = audit.trend is FluxTrend.BOUNDED
        finite = np.isfinite(audit.max_flux_after_tau)
        ok = ok and bounded and finite
        details.append(f"{name}: max {audit.max_flux_after_tau:.4f} {audit.trend.value}")
    return _result(9, "flux bound", ok, "; ".join(details), t0)


def criterion_10(ctx):
    t0 = time.time()
    res_lo = hair_trigger_experiment(ctx.params, q=2.0, k=1.0,
                                     datum=dict(delta=0.05, sigma=3.0, beta=2.0),
                                     T=250.0)
    res_hi = hair_trigger_experiment(ctx.params, q=6.0, k=1.0,
                                     datum=dict(delta=0.05, sigma=3.0, beta=2.0),
                                     T=300.0)
    ok = (res_lo.outcome is Outcome.SPREADING and res_hi.outcome is Outcome.VANISHING)
    return _result(10, "hair-trigger dichotomy", ok,
                   f"q=2 -> {res_lo.outcome.value} (t={res_lo.T_final:g}), "
                   f"q=6 -> {res_hi.outcome.value} (t={res_hi.T_final:g})", t0)


def criterion_11(ctx):
    t0 = time.time()
    rng = np.random.default_rng(2024)
    grid = radial_grid(4.8, 0.1, 1)
    st = Stepper(grid, ctx.params, ctx.logistic, u_ref=1.0)
    worst = 0.0
    for _ in range(100):
        base = rng.uniform(0.0, 0.9, grid.n)
        upper = np.clip(base + rng.uniform(0.0, 0.2, grid.n), 0.0, 1.0)
        fa, fb = RadialField(grid, base), RadialField(grid, upper)
        dt = st.dt_auto(float(upper.max()))
        for _ in range(60):
            fa = step(fa, dt, ctx.params, ctx.logistic, stepper=st)
            fb = step(fb, dt, ctx.params, ctx.logistic, stepper=st)
            worst = max(worst, float(np.max(fa.u - fb.u)))
    pairs_ok = worst <= 1e-12

    env_sub = envelope(ctx.params, ctx.logistic, f0=0.9, T=25.0,
                       c_star=ctx.c0, wave=ctx.wave0, g0=0.0)
    env_sup = envelope(ctx.params, ctx.logistic, f0=1.1, T=25.0,
                       c_star=ctx.c0, wave=ctx.wave0, g0=1.0)
    sub = compare_envelope(ctx.tw_run, env_sub, ctx.wave0, side="sub")
    sup = compare_envelope(ctx.tw_run, env_sup, ctx.wave0, side="super")
    env_ok = sub.count == 0 and sup.count == 0
    return _result(11, "discrete comparison and envelope ordering",
                   pairs_ok and env_ok,
                   f"worst pair violation {worst:.2e}; envelope violations "
                   f"sub {sub.count}, super {sup.count} (tol {sub.tol:g})", t0)


def criterion_12(ctx):
    t0 = time.time()
    env = envelope(ctx.params, ctx.logistic, f0=0.9, T=120.0,
                   c_star=ctx.c0, wave=ctx.wave0)
    # strictly monotone until f saturates at 1 in double precision
    diffs = np.diff(env.f)
    live = 1.0 - env.f[:-1] > 1e-13
    mono = (bool(np.all(diffs >= 0.0)) and bool(np.all(diffs[live] > 0.0))
            and abs(env.f[-1] - 1.0) < 1e-6)
    drift = env.g - env.c_star * env.t
    tail = drift[env.t >= 0.9 * env.t[-1]]
    osc = float(np.max(tail) - np.min(tail))
    ok = mono and osc <= 1e-6
    return _result(12, "envelope relaxation and shift convergence", ok,
                   f"f monotone {mono}, tail oscillation {osc:.2e}", t0)


def criterion_13(ctx):
    t0 = time.time()
    details, ok = [], True
    # mass conservation under pure diffusion
    zero = ReactionSpec(
        kind=ReactionKind.CUSTOM, a=0.0,
        evaluator=lambda u: np.zeros_like(np.asarray(u, dtype=float)),
        derivative=lambda u: np.zeros_like(np.asarray(u, dtype=float)))
    grid = radial_grid(10.0, 0.05, 2)
    bump = kanel_bump(grid, ctx.params, delta=0.5, sigma=3.0, beta=2.0, radius=2.0)
    V = grid.volumes()
    mass0 = float(V @ bump.u)
    simz = run_sim(bump, 5.0, ctx.params, zero, Sampling(every=1.0))
    dmass = abs(float(V @ simz.final.u) - mass0) / mass0
    ok = ok and dmass <= 1e-10
    details.append(f"mass drift {dmass:.2e}")

    # maximum principle on the 1d acceptance run
    sup_bound = max(float(ctx.run1d.u0.max()), 1.0) + 1e-12
    sup_ok = ctx.run1d.final.sup <= sup_bound
    ok = ok and sup_ok
    details.append(f"sup {ctx.run1d.final.sup:.6f} <= {sup_bound:.6f}")

    # finite propagation against the coarse bound speed
    bound = upper_bound_speed(ctx.params, ctx.logistic, 0.0).coarse
    t, eta = ctx.run1d.eta_series[:, 0], ctx.run1d.eta_series[:, 1]
    prop_ok = bool(np.all(np.diff(eta) <= bound * np.diff(t) + 2 * DR))
    ok = ok and prop_ok
    details.append(f"finite propagation {prop_ok}")

    # universal barrier over a sample of shots
    barrier_ok = True
    for c in (0.3, 0.6, 1.0, 1.8):
        for gamma in (0.0, 0.05, 0.1):
            k1, k2 = compute_barrier(ctx.params, ctx.logistic, c, gamma)
            traj = shoot_from_one(ctx.params, ctx.logistic, c, gamma, eps_lo=1e-4)
            barrier_ok = barrier_ok and bool(np.all(traj.phi < k1 + k2 * traj.U))
    ok = ok and barrier_ok
    details.append(f"barrier {barrier_ok}")
    return _result(13, "conservation, maximum principle, propagation, barrier",
                   ok, "; ".join(details), t0)


CRITERIA = {
    1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4,
    5: criterion_5, 6: criterion_6, 7: criterion_7, 8: criterion_8,
    9: criterion_9, 10: criterion_10, 11: criterion_11, 12: criterion_12,
    13: criterion_13,
}


def run_acceptance(out_dir=None, criteria=None) -> list:
    ctx = AcceptanceContext(out_dir)
    selected = sorted(criteria) if criteria else sorted(CRITERIA)
    results = []
    for idx in selected:
        t0 = time.time()
        try:
            results.append(CRITERIA[idx](ctx))
        except DnlError as exc:
            results.append(CriterionResult(idx, CRITERIA[idx].__name__, False,
                                           f"error: {exc}", time.time() - t0))
    return results
