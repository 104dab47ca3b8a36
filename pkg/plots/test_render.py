"""Tests for the figure suite: every kind renders from real artifacts and the
artifact directories are never modified."""
import hashlib
import subprocess
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))
from render import KINDS, SchemaError, render  # noqa: E402

HERE = Path(__file__).parent
PKG_ROOT = HERE.parent

WAVE_CFG = """
[model]
m = 2
p = 2
N = 1

[wave]
gamma = 0.0
tol = 1e-4
"""

SIM_CFG = """
[model]
m = 2
p = 2
N = 1

[sim]
geometry = radial
R = 25.0
dr = 0.05
T = 8.0
datum = plateau
datum.rho = 4.0
datum.eta = 0.9
datum.c = 0.5
sample_every = 0.25
snapshots = 4.0, 8.0
"""


def _run_cli(args):
    proc = subprocess.run([sys.executable, "-m", "dnlfront.cli", *args],
                          capture_output=True, text=True, cwd=PKG_ROOT)
    assert proc.returncode == 0, proc.stderr
    return proc


@pytest.fixture(scope="module")
def artifacts(tmp_path_factory):
    base = tmp_path_factory.mktemp("artifacts")
    wave_cfg = base / "wave.cfg"
    wave_cfg.write_text(WAVE_CFG)
    sim_cfg = base / "sim.cfg"
    sim_cfg.write_text(SIM_CFG)
    _run_cli(["wave", "--config", str(wave_cfg), "--out", str(base / "wave")])
    _run_cli(["speed-curve", "--config", str(wave_cfg), "--out", str(base / "wave")])
    _run_cli(["simulate", "--config", str(sim_cfg), "--out", str(base / "run")])
    _run_cli(["analyze", "--config", str(sim_cfg), "--out", str(base / "run")])
    return base


def _dir_digest(path: Path) -> str:
    digest = hashlib.sha256()
    for f in sorted(path.rglob("*")):
        if f.is_file():
            digest.update(f.name.encode())
            digest.update(f.read_bytes())
    return digest.hexdigest()


KIND_DIRS = {
    "profile": "wave",
    "phase": "wave",
    "speed-curve": "wave",
    "front-shift": "run",
    "frame-overlay": "run",
}


@pytest.mark.parametrize("kind", sorted(KINDS))
def test_render_each_kind(artifacts, tmp_path, kind):
    src = artifacts / KIND_DIRS[kind]
    before = _dir_digest(src)
    out = tmp_path / f"{kind}.png"
    render(kind, src, out)
    assert out.exists() and out.stat().st_size > 1000
    assert _dir_digest(src) == before  # read-only contract


def test_missing_artifact_raises_schema_error(tmp_path):
    with pytest.raises(SchemaError):
        render("profile", tmp_path, tmp_path / "x.png")


def test_header_mismatch_raises_schema_error(tmp_path):
    (tmp_path / "trajectory.csv").write_text("a,b\n1,2\n")
    with pytest.raises(SchemaError):
        render("phase", tmp_path, tmp_path / "x.png")


def test_cli_entry(artifacts, tmp_path):
    out = tmp_path / "cli.png"
    proc = subprocess.run(
        [sys.executable, str(HERE / "render.py"), "phase",
         str(artifacts / "wave"), "-o", str(out)],
        capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert out.exists()


def test_cli_missing_input_exit_nonzero(tmp_path):
    proc = subprocess.run(
        [sys.executable, str(HERE / "render.py"), "profile", str(tmp_path),
         "-o", str(tmp_path / "x.png")],
        capture_output=True, text=True)
    assert proc.returncode != 0
    assert "ERROR schema" in proc.stderr
