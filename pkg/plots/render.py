#!/usr/bin/env python3
"""Render publication-style figures from dnlfront CSV artifact directories.

Usage: render.py <kind> <artifact-dir> -o <image>

Kinds:
  profile      wave profile U and pressure V against xi        (profile.csv)
  phase        phase portrait phi(U)                           (trajectory.csv)
  speed-curve  c(gamma) with both derivative estimators        (speed_curve.csv)
  front-shift  front trajectory eta(t) with the fitted law     (front.csv, frontfit.csv)
  frame-overlay snapshots against the front-aligned wave       (snapshot_*.csv,
               front.csv, profile.csv from the dir or ../wave)

The renderer only reads the documented CSV schemas; it never recomputes
mathematics and never writes into the artifact directory.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


class SchemaError(Exception):
    """Artifact missing or its header does not match the documented schema."""


def load_csv(path: Path, expected: list) -> dict:
    if not path.exists():
        raise SchemaError(f"missing artifact {path}")
    lines = path.read_text().strip().splitlines()
    header = lines[0].split(",")
    if header[:len(expected)] != expected:
        raise SchemaError(f"{path.name}: header {header} != expected {expected}")
    rows = [line.split(",") for line in lines[1:]]
    out = {}
    for j, name in enumerate(header):
        raw = [r[j] for r in rows]
        try:
            out[name] = np.array([float(x) for x in raw])
        except ValueError:
            out[name] = np.array(raw)
    return out


def render_profile(d: Path, ax):
    data = load_csv(d / "profile.csv", ["xi", "U", "V", "Vp"])
    ax.plot(data["xi"], data["U"], label="U(xi)")
    ax.plot(data["xi"], data["V"], label="V(xi)", linestyle="--")
    ax.set_xlabel("xi")
    ax.set_ylabel("profile / pressure")
    ax.axvline(0.0, color="k", lw=0.5)
    ax.legend()
    ax.set_title("wavefront profile and pressure")


def render_phase(d: Path, ax):
    data = load_csv(d / "trajectory.csv", ["U", "phi"])
    ax.plot(data["U"], data["phi"])
    ax.set_xlabel("U")
    ax.set_ylabel("phi")
    ax.set_title("phase portrait")


def render_speed_curve(d: Path, ax):
    data = load_csv(d / "speed_curve.csv", ["gamma", "c", "cprime_fd", "cprime_formula"])
    ax.plot(data["gamma"], data["c"], marker="o", label="c(gamma)")
    ax.set_xlabel("gamma")
    ax.set_ylabel("c")
    twin = ax.twinx()
    twin.plot(data["gamma"], data["cprime_fd"], color="tab:red", marker="s",
              ls="--", label="c' (finite differences)")
    twin.plot(data["gamma"], data["cprime_formula"], color="tab:green", marker="^",
              ls=":", label="c' (level-function integral)")
    twin.set_ylabel("c'")
    lines, labels = ax.get_legend_handles_labels()
    l2, lab2 = twin.get_legend_handles_labels()
    ax.legend(lines + l2, labels + lab2, loc="center left")
    ax.set_title("speed curve")


def render_front_shift(d: Path, ax):
    front = load_csv(d / "front.csv", ["t", "eta"])
    fit = load_csv(d / "frontfit.csv",
                   ["c_hat", "B_hat", "r0_hat", "t_min", "t_max", "residual_rms"])
    t, eta = front["t"], front["eta"]
    ax.plot(t, eta, lw=0.8, label="eta(t)")
    tt = np.linspace(max(t[0], 1e-6), t[-1], 400)
    law = fit["c_hat"][0] * tt - fit["B_hat"][0] * np.log(tt) + fit["r0_hat"][0]
    ax.plot(tt, law, "--", label=(f"fit: {fit['c_hat'][0]:.3f} t "
                                  f"- {fit['B_hat'][0]:.3f} log t + {fit['r0_hat'][0]:.2f}"))
    ax.set_xlabel("t")
    ax.set_ylabel("front position")
    ax.legend()
    ax.set_title("front trajectory and fitted law")


def _wave_profile_for(d: Path) -> dict:
    for candidate in (d / "profile.csv", d.parent / "wave" / "profile.csv"):
        if candidate.exists():
            return load_csv(candidate, ["xi", "U", "V", "Vp"])
    raise SchemaError(f"no profile.csv next to {d} (looked in {d} and ../wave)")


def render_frame_overlay(d: Path, ax):
    snaps = sorted(d.glob("snapshot_*.csv"),
                   key=lambda p: float(p.stem.split("_", 1)[1]))
    if not snaps:
        raise SchemaError(f"no snapshot_<t>.csv files in {d}")
    front = load_csv(d / "front.csv", ["t", "eta"])
    prof = _wave_profile_for(d)
    xi_w = prof["xi"][::-1]   # ascending xi
    U_w = prof["U"][::-1]
    for snap in snaps:
        t_snap = float(snap.stem.split("_", 1)[1])
        data = load_csv(snap, ["r", "u", "v"])
        eta = np.interp(t_snap, front["t"], front["eta"])
        ax.plot(data["r"] - eta, data["u"], lw=1.0, label=f"u at t={t_snap:g}")
    ax.plot(xi_w, U_w, "k--", lw=1.2, label="wavefront")
    ax.set_xlim(-20.0, 2.0)
    ax.set_xlabel("r - eta(t)")
    ax.set_ylabel("u")
    ax.legend(fontsize=8)
    ax.set_title("moving-frame overlay")


KINDS = {
    "profile": render_profile,
    "phase": render_phase,
    "speed-curve": render_speed_curve,
    "front-shift": render_front_shift,
    "frame-overlay": render_frame_overlay,
}


def render(kind: str, artifact_dir, out_path) -> Path:
    if kind not in KINDS:
        raise SchemaError(f"unknown figure kind {kind!r}; choose from {sorted(KINDS)}")
    fig, ax = plt.subplots(figsize=(7.0, 4.5), dpi=130)
    try:
        KINDS[kind](Path(artifact_dir), ax)
        fig.tight_layout()
        out = Path(out_path)
        out.parent.mkdir(parents=True, exist_ok=True)
        fig.savefig(out)
        return out
    finally:
        plt.close(fig)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("kind", choices=sorted(KINDS))
    parser.add_argument("artifact_dir")
    parser.add_argument("-o", "--output", required=True)
    args = parser.parse_args(argv)
    try:
        render(args.kind, args.artifact_dir, args.output)
    except SchemaError as exc:
        print(f"ERROR schema {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
