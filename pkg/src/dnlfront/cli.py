"""Configuration-driven command line: wave, speed-curve, simulate, analyze,
sweep, verify.  Artifacts are CSV files plus a plain-text summary and a
meta.txt sidecar carrying the fully resolved configuration."""
from __future__ import annotations

import argparse
import itertools
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import (
    FluxTrend,
    Shift,
    Thresholds,
    classify_outcome,
    fit_front,
    flux_bound_audit,
    moving_frame_error,
)
from .config import RunConfig, apply_override, flatten_config, parse_config, serialize_config
from .errors import DnlError, UsageError
from .io_csv import config_hash, format_float, read_csv, write_csv, write_meta
from .model import ReactionKind, make_reaction, validate_params
from .pde import (
    RadialField,
    Sampling,
    SimulationRun,
    init_datum,
    line_grid,
    radial_grid,
    run as run_sim,
)
from .waves import (
    critical_speed,
    endpoint_fit,
    pressure_view,
    speed_curve,
    wave_profile,
)
from .waves.speed import _sampled_trajectory

SUBCOMMANDS = ("wave", "speed-curve", "simulate", "analyze", "sweep", "verify")


def build_model(cfg: RunConfig):
    params = validate_params(cfg.model.m, cfg.model.p, cfg.model.N)
    kind = ReactionKind(cfg.model.reaction_kind)
    kw = {"a": cfg.model.reaction_a, "k": cfg.model.reaction_k, "m": cfg.model.m}
    if cfg.model.reaction_q is not None:
        kw["q"] = cfg.model.reaction_q
    if kind in (ReactionKind.MONOSTABLE, ReactionKind.POWER_MONOSTABLE):
        kw.pop("a")
    h = make_reaction(kind, **kw)
    return params, h


def _write_common_meta(out: Path, cfg: RunConfig, extra: dict | None = None):
    text = serialize_config(cfg)
    entries = {"tool": "dnlfront", "version": __version__,
               "config_hash": config_hash(text)}
    entries.update(flatten_config(cfg))
    if extra:
        entries.update({k: str(v) for k, v in extra.items()})
    out.mkdir(parents=True, exist_ok=True)
    (out / "config.resolved").write_text(text)
    write_meta(out / "meta.txt", entries)
    return entries["config_hash"]


def cmd_wave(cfg: RunConfig, out: Path) -> int:
    params, h = build_model(cfg)
    gamma = cfg.wave.gamma
    res = critical_speed(params, h, gamma, tol=cfg.wave.tol)
    traj = _sampled_trajectory(params, h, res.c, gamma)
    prof = wave_profile(params, h, c=res.c, gamma=gamma)
    pv = pressure_view(prof, params, h)
    fit = endpoint_fit(traj, params, h)
    _write_common_meta(out, cfg, {"gamma": gamma, "c": res.c,
                                  "bracket_lo": res.bracket[0],
                                  "bracket_hi": res.bracket[1]})
    write_csv(out / "trajectory.csv", ["U", "phi"], [traj.U, traj.phi])
    # front-first ordering: the first data row is the free boundary itself
    write_csv(out / "profile.csv", ["xi", "U", "V", "Vp"],
              [prof.xi[::-1], prof.U[::-1], prof.V[::-1], prof.Vp[::-1]])
    summary = [
        f"critical speed c({gamma:g}) = {format_float(res.c)}",
        f"bracket = [{format_float(res.bracket[0])}, {format_float(res.bracket[1])}]",
        f"pressure slope at front = {format_float(pv.Vp_front)} (predicted {format_float(-res.c ** params.alpha)})",
        f"pressure curvature at front = {format_float(pv.Vpp_front)} (predicted {format_float(pv.predicted_Vpp)})",
        f"origin slope = {format_float(fit.slope0)}",
        f"endpoint exponent = {format_float(fit.mu1)} (predicted {format_float(fit.predicted_mu1)})",
        f"endpoint coefficient = {format_float(fit.C1)} (predicted {format_float(fit.predicted_C1)})",
    ]
    (out / "summary.txt").write_text("\n".join(summary) + "\n")
    return 0


def cmd_speed_curve(cfg: RunConfig, out: Path) -> int:
    params, h = build_model(cfg)
    curve = speed_curve(params, h, cfg.wave.gammas, tol=cfg.wave.tol)
    _write_common_meta(out, cfg, {"c_sharp": curve.c_sharp,
                                  "gamma_cap_note": "grid kept inside min(0.5, c0/(2m))"})
    write_csv(out / "speed_curve.csv",
              ["gamma", "c", "cprime_fd", "cprime_formula"],
              [curve.gammas, curve.c_values, curve.cprime_fd, curve.cprime_formula])
    lines = [f"c_sharp = {format_float(curve.c_sharp)}",
             f"points = {len(curve.gammas)}",
             f"failures = {len(curve.failures)}"]
    (out / "summary.txt").write_text("\n".join(lines) + "\n")
    return 0


def _build_grid(cfg: RunConfig):
    sim = cfg.sim
    if sim.geometry == "radial":
        return radial_grid(sim.R, sim.dr, cfg.model.N)
    if sim.geometry == "line":
        return line_grid(-sim.R, sim.R, sim.dr, left_bc=sim.left_bc)
    raise UsageError(f"unknown geometry {sim.geometry!r}")


def _build_datum(cfg: RunConfig, grid, params, h):
    sim = cfg.sim
    kind = sim.datum
    if kind == "kanel":
        return init_datum("kanel", grid, params, h, delta=sim.delta,
                          sigma=sim.sigma, beta=sim.beta, radius=sim.radius,
                          center=sim.x0)
    if kind == "plateau":
        return init_datum("plateau", grid, params, h, rho=sim.rho,
                          eta=sim.eta, c=sim.c)
    if kind == "tw":
        res = critical_speed(params, h, 0.0, tol=cfg.wave.tol)
        wave = wave_profile(params, h, c=res.c, gamma=0.0)
        return init_datum("tw", grid, wave=wave, x0=sim.x0)
    if kind == "left_plateau":
        return init_datum("left_plateau", grid, level=sim.level,
                          edge=sim.edge, width=sim.width)
    if kind == "box":
        return init_datum("box", grid, height=sim.height, radius=sim.radius,
                          center=sim.x0)
    raise UsageError(f"unknown datum kind {kind!r}")


def write_run_artifacts(sim: SimulationRun, out: Path, chash: str) -> None:
    write_csv(out / "front.csv", ["t", "eta"],
              [sim.eta_series[:, 0], sim.eta_series[:, 1]])
    write_csv(out / "fluxmax.csv", ["t", "maxflux"],
              [sim.fluxmax_series[:, 0], sim.fluxmax_series[:, 1]])
    if sim.center_series.size:
        write_csv(out / "center.csv", ["t", "u0"],
                  [sim.center_series[:, 0], sim.center_series[:, 1]])
    if sim.zeta_series is not None and sim.zeta_series.size:
        write_csv(out / "zeta.csv", ["t", "zeta_minus", "zeta_plus"],
                  [sim.zeta_series[:, 0], sim.zeta_series[:, 1], sim.zeta_series[:, 2]])
    m, alpha = sim.params.m, sim.params.alpha
    x = sim.grid.centers
    for t_snap, u in sim.snapshots:
        v = (m / (m - alpha)) * np.power(u, m - alpha)
        write_csv(out / f"snapshot_{t_snap:g}.csv", ["r", "u", "v"], [x, u, v])
    run_meta = {k: str(v) for k, v in sim.meta.items()}
    run_meta["config_hash"] = chash
    write_meta(out / "run_meta.txt", run_meta)


def cmd_simulate(cfg: RunConfig, out: Path) -> int:
    params, h = build_model(cfg)
    grid = _build_grid(cfg)
    field = _build_datum(cfg, grid, params, h)
    sampling = Sampling(every=cfg.sim.sample_every,
                        snapshot_times=cfg.sim.snapshots,
                        record_center=cfg.sim.record_center)
    sim = run_sim(field, cfg.sim.T, params, h, sampling)
    chash = _write_common_meta(out, cfg, sim.meta)
    write_run_artifacts(sim, out, chash)
    eta0, eta1 = sim.eta_series[0, 1], sim.eta_series[-1, 1]
    (out / "summary.txt").write_text(
        f"T = {format_float(sim.final.t)}\n"
        f"eta: {format_float(eta0)} -> {format_float(eta1)}\n"
        f"sup u(T) = {format_float(sim.final.sup)}\n")
    return 0


def cmd_analyze(cfg: RunConfig, out: Path) -> int:
    params, h = build_model(cfg)
    if not (out / "front.csv").exists():
        raise UsageError(f"no run artifacts found in {out} (front.csv missing)")
    chash = config_hash(serialize_config(cfg))
    _, front = read_csv(out / "front.csv")
    eta_series = np.column_stack([front["t"], front["eta"]])
    fit = fit_front(eta_series, cfg.model.N, cfg.analyze.window_fraction)
    write_csv(out / "frontfit.csv",
              ["c_hat", "B_hat", "r0_hat", "t_min", "t_max", "residual_rms",
               "config_hash"],
              [[fit.c_hat], [fit.B_hat], [fit.r0_hat], [fit.window[0]],
               [fit.window[1]], [fit.residual_rms], [chash]])

    lines = [f"c_hat = {format_float(fit.c_hat)}",
             f"B_hat = {format_float(fit.B_hat)}",
             f"r0_hat = {format_float(fit.r0_hat)}"]

    if (out / "fluxmax.csv").exists():
        sim_stub = _sim_from_artifacts(out, cfg, params, h)
        audit = flux_bound_audit(sim_stub, cfg.analyze.tau)
        write_csv(out / "audit.csv",
                  ["tau", "max_flux_after_tau", "bounded", "config_hash"],
                  [[cfg.analyze.tau], [audit.max_flux_after_tau],
                   [1.0 if audit.trend is FluxTrend.BOUNDED else 0.0], [chash]])
        lines.append(f"max flux after tau = {format_float(audit.max_flux_after_tau)}"
                     f" ({audit.trend.value})")
        if sim_stub.snapshots:
            res = critical_speed(params, h, 0.0, tol=cfg.wave.tol)
            wave = wave_profile(params, h, c=res.c, gamma=0.0)
            report = moving_frame_error(sim_stub, wave, Shift.MEASURED_ETA)
            write_csv(out / "convergence.csv",
                      ["t", "sup_error", "config_hash"],
                      [report.times, report.sup_error,
                       [chash] * len(report.times)])
            lines.append("sup_error: " + ", ".join(
                f"{t:g}:{e:.4g}" for t, e in zip(report.times, report.sup_error)))
            outcome = classify_outcome(sim_stub, Thresholds(
                spread_level=cfg.analyze.spread_level,
                vanish_level=cfg.analyze.vanish_level,
                probe_fraction=cfg.analyze.probe_fraction, c0=res.c))
            lines.append(f"outcome = {outcome.value}")
    (out / "summary.txt").write_text("\n".join(lines) + "\n")
    return 0


def _sim_from_artifacts(out: Path, cfg: RunConfig, params, h) -> SimulationRun:
    """Rebuild enough of a SimulationRun from a run directory to analyze it."""
    grid = _build_grid(cfg)
    _, front = read_csv(out / "front.csv")
    eta_series = np.column_stack([front["t"], front["eta"]])
    _, flux = read_csv(out / "fluxmax.csv")
    center = np.empty((0, 2))
    if (out / "center.csv").exists():
        _, cdata = read_csv(out / "center.csv")
        center = np.column_stack([cdata["t"], cdata["u0"]])
    snapshots = []
    for snap in sorted(out.glob("snapshot_*.csv")):
        t_snap = float(snap.stem.split("_", 1)[1])
        _, sdata = read_csv(snap)
        snapshots.append((t_snap, sdata["u"]))
    final_u = snapshots[-1][1] if snapshots else np.zeros(grid.n)
    final_t = snapshots[-1][0] if snapshots else float(eta_series[-1, 0])
    return SimulationRun(
        params=params, reaction=h, grid=grid, u0=np.zeros(grid.n),
        final=RadialField(grid, final_u, final_t),
        eta_series=eta_series,
        fluxmax_series=np.column_stack([flux["t"], flux["maxflux"]]),
        center_series=center, zeta_series=None, snapshots=snapshots, meta={})


def cmd_sweep(cfg: RunConfig, out: Path, jobs: int) -> int:
    if not cfg.sweep.vary:
        raise UsageError("sweep requires at least one vary.<section>.<key> entry")
    if cfg.sweep.command not in ("wave", "speed-curve", "simulate"):
        raise UsageError(f"sweep cannot dispatch {cfg.sweep.command!r}")
    keys = [k for k, _ in cfg.sweep.vary]
    combos = list(itertools.product(*(vals for _, vals in cfg.sweep.vary)))
    tasks = []
    for combo in combos:
        point_cfg = cfg
        tag = []
        for key, val in zip(keys, combo):
            point_cfg = apply_override(point_cfg, key, val)
            tag.append(f"{key.replace('.', '-')}={val}")
        point_dir = out / ("point__" + "__".join(tag))
        tasks.append((cfg.sweep.command, serialize_config(point_cfg), str(point_dir)))
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            codes = list(pool.map(_run_sweep_point, tasks))
    else:
        codes = [_run_sweep_point(t) for t in tasks]
    _write_common_meta(out, cfg, {"points": len(tasks)})
    return 0 if all(c == 0 for c in codes) else 1


def _run_sweep_point(task) -> int:
    from .config import parse_config_text
    command, cfg_text, out_dir = task
    cfg = parse_config_text(cfg_text)
    return _DISPATCH[command](cfg, Path(out_dir))


def cmd_verify(cfg: RunConfig, out: Path, criteria=None) -> int:
    from .acceptance import run_acceptance
    results = run_acceptance(out_dir=out, criteria=criteria)
    ok = True
    for res in results:
        status = "PASS" if res.passed else "FAIL"
        print(f"CRITERION {res.index:2d} [{status}] {res.title}: {res.details} "
              f"({res.elapsed:.1f}s)")
        ok = ok and res.passed
    return 0 if ok else 1


_DISPATCH = {
    "wave": cmd_wave,
    "speed-curve": cmd_speed_curve,
    "simulate": cmd_simulate,
    "analyze": cmd_analyze,
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="dnlfront",
        description="Finite wavefronts and free-boundary dynamics for doubly "
                    "nonlinear reaction-diffusion equations")
    parser.add_argument("subcommand", nargs="?")
    parser.add_argument("--config", type=str, help="path to the run configuration")
    parser.add_argument("--out", type=str, default=None, help="artifact directory")
    parser.add_argument("--jobs", type=int, default=1, help="parallel sweep workers")
    parser.add_argument("--criteria", type=str, default=None,
                        help="verify only these comma-separated criterion numbers")
    parser.add_argument("--version", action="version", version=__version__)
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2

    try:
        if args.subcommand is None or args.subcommand not in SUBCOMMANDS:
            raise UsageError(f"usage: dnlfront {{{'|'.join(SUBCOMMANDS)}}} --config <path>")
        if args.config is None:
            raise UsageError("--config is required")
        cfg = parse_config(args.config)
        root = os.environ.get("DNLFRONT_OUT", ".")
        out = Path(args.out) if args.out else Path(root) / cfg.output_dir
        out.mkdir(parents=True, exist_ok=True)
        if args.subcommand == "sweep":
            return cmd_sweep(cfg, out, args.jobs)
        if args.subcommand == "verify":
            crits = None
            if args.criteria:
                crits = tuple(int(x) for x in args.criteria.split(","))
            return cmd_verify(cfg, out, criteria=crits)
        return _DISPATCH[args.subcommand](cfg, out)
    except UsageError as exc:
        print(f"ERROR usage {exc}", file=sys.stderr)
        return 2
    except DnlError as exc:
        print(f"ERROR {type(exc).__name__} {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
