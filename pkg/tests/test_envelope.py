import numpy as np
import pytest

from dnlfront.errors import WindowError
from dnlfront.model import ReactionKind, make_reaction, validate_params
from dnlfront.pde import Sampling, compare_envelope, envelope, line_grid, run, wave_datum
from dnlfront.waves import critical_speed, wave_profile


@pytest.fixture(scope="module")
def pme():
    return validate_params(2, 2, 1)


@pytest.fixture(scope="module")
def logistic():
    return make_reaction(ReactionKind.MONOSTABLE)


@pytest.fixture(scope="module")
def c_star(pme, logistic):
    return critical_speed(pme, logistic, 0.0, tol=1e-6).c


@pytest.fixture(scope="module")
def wave(pme, logistic, c_star):
    return wave_profile(pme, logistic, c=c_star, gamma=0.0)


def test_equilibrium(pme, logistic, c_star, wave):
    env = envelope(pme, logistic, f0=1.0, T=50.0, c_star=c_star, wave=wave)
    assert np.allclose(env.f, 1.0)
    assert np.allclose(env.g, env.g0 + c_star * env.t, atol=1e-9)


def test_closed_form_relaxation(pme, logistic, c_star, wave):
    # linear relaxation gives f(t) = 1 - (delta/2) e^{-eps t} exactly
    delta = 0.25
    env = envelope(pme, logistic, f0=1.0 - delta / 2.0, T=60.0,
                   c_star=c_star, wave=wave, delta=delta)
    expected = 1.0 - (delta / 2.0) * np.exp(-env.eps * env.t)
    assert np.max(np.abs(env.f - expected)) < 1e-14
    assert np.all(np.diff(env.f) > 0.0)  # monotone increasing to 1
    assert env.f[-1] == pytest.approx(1.0, abs=1e-6)


def test_shift_converges(pme, logistic, c_star, wave):
    env = envelope(pme, logistic, f0=0.9, T=120.0, c_star=c_star, wave=wave)
    drift = env.g - c_star * env.t
    tail = drift[env.t >= 0.9 * env.t[-1]]
    assert np.max(tail) - np.min(tail) <= 1e-6
    # subsolution side: g - c*t decreases monotonically
    assert np.all(np.diff(drift) <= 1e-15)


def test_supersolution_side_monotonicity(pme, logistic, c_star, wave):
    env = envelope(pme, logistic, f0=1.1, T=80.0, c_star=c_star, wave=wave)
    assert np.all(np.diff(env.f) < 0.0)
    drift = env.g - c_star * env.t
    assert np.all(np.diff(drift) >= -1e-15)


def test_window_error(pme, logistic, c_star, wave):
    with pytest.raises(WindowError):
        envelope(pme, logistic, f0=0.2, T=10.0, c_star=c_star, wave=wave)


@pytest.fixture(scope="module")
def tw_run(pme, logistic, wave):
    g = line_grid(-45.0, 33.0, 0.04, left_bc="neumann")
    f = wave_datum(g, wave, x0=0.0)
    snap_times = tuple(np.arange(2.0, 20.1, 2.0))
    return run(f, 20.0, pme, logistic, Sampling(every=0.5, snapshot_times=snap_times))


def test_subsolution_ordering(pme, logistic, c_star, wave, tw_run):
    env = envelope(pme, logistic, f0=0.9, T=25.0, c_star=c_star, wave=wave, g0=0.0)
    report = compare_envelope(tw_run, env, wave, side="sub")
    assert report.count == 0


def test_supersolution_ordering(pme, logistic, c_star, wave, tw_run):
    env = envelope(pme, logistic, f0=1.1, T=25.0, c_star=c_star, wave=wave, g0=1.0)
    report = compare_envelope(tw_run, env, wave, side="super")
    assert report.count == 0


def test_self_comparison_zero_violations(pme, logistic, c_star, wave):
    # w against itself violates nothing even at zero tolerance
    from dnlfront.pde import RadialField, SimulationRun
    g = line_grid(-30.0, 10.0, 0.05, left_bc="neumann")
    env = envelope(pme, logistic, f0=0.95, T=10.0, c_star=c_star, wave=wave)
    from dnlfront.pde import wave_evaluator
    ev = wave_evaluator(wave)
    snaps = []
    for t in (0.0, 5.0, 10.0):
        f = 1.0 + (env.f0 - 1.0) * np.exp(-env.eps * t)
        gshift = float(np.interp(t, env.t, env.g))
        snaps.append((t, f * ev(g.centers - gshift)))
    sim = SimulationRun(params=pme, reaction=logistic, grid=g,
                        u0=snaps[0][1].copy(),
                        final=RadialField(g, snaps[-1][1], 10.0),
                        eta_series=np.array([[0.0, 0.0]]),
                        fluxmax_series=np.array([[0.0, 0.0]]),
                        center_series=np.empty((0, 2)),
                        zeta_series=None, snapshots=snaps, meta={})
    for side in ("sub", "super"):
        assert compare_envelope(sim, env, wave, side=side, tol=0.0).count == 0
