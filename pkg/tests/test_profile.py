import numpy as np
import pytest

from dnlfront.errors import NoExitError, NonCriticalError
from dnlfront.model import ReactionKind, make_reaction, validate_params
from dnlfront.waves import (
    ProfileGrid,
    critical_speed,
    endpoint_fit,
    pressure_view,
    subwave_profile,
    wave_profile,
)
from dnlfront.waves.profile import profile_ode_residual
from dnlfront.waves.speed import _sampled_trajectory


@pytest.fixture(scope="module")
def pme():
    return validate_params(2, 2, 1)


@pytest.fixture(scope="module")
def logistic():
    return make_reaction(ReactionKind.MONOSTABLE)


@pytest.fixture(scope="module")
def c_star(pme, logistic):
    return critical_speed(pme, logistic, gamma=0.0, tol=1e-6).c


@pytest.fixture(scope="module")
def wave(pme, logistic, c_star):
    return wave_profile(pme, logistic, c=c_star, gamma=0.0)


def test_profile_matches_exact_wave(wave):
    exact = np.clip(1.0 - np.exp(wave.xi / 2.0), 0.0, 1.0)
    assert np.max(np.abs(wave.U - exact)) <= 1e-4


def test_profile_normalization_and_monotonicity(wave):
    assert wave.xi[-1] == 0.0
    assert wave.U[-1] == 0.0
    assert np.all(wave.U[:-1] > 0.0)
    assert np.all(np.diff(wave.U) < 1e-15)  # nonincreasing in xi
    inner = (wave.U > 1e-6) & (wave.U < 1.0 - 1e-7)
    assert np.all(np.diff(wave.U[inner]) < 0.0)  # strictly decreasing on the support


def test_profile_residual_small(wave, pme, logistic, c_star):
    res = profile_ode_residual(wave.xi, wave.U, pme, logistic, c_star, 0.0)
    assert res <= 1e-5


def test_profile_residual_p3():
    p3 = validate_params(2, 3, 1)
    h = make_reaction(ReactionKind.MONOSTABLE)
    c3 = critical_speed(p3, h, 0.0, tol=1e-6).c
    prof = wave_profile(p3, h, c=c3, gamma=0.0, grid=ProfileGrid(n=4800))
    assert profile_ode_residual(prof.xi, prof.U, p3, h, c3, 0.0) <= 1e-5


def test_noncritical_speed_rejected(pme, logistic):
    with pytest.raises(NonCriticalError):
        wave_profile(pme, logistic, c=1.5, gamma=0.0)


def test_pressure_limits(wave, pme, logistic):
    pv = pressure_view(wave, pme, logistic)
    assert pv.Vp_front == pytest.approx(-1.0, abs=1e-3)
    assert pv.Vpp_front == pytest.approx(-0.5, abs=1e-2)
    assert pv.predicted_Vpp == pytest.approx(-0.5, abs=1e-6)
    assert abs(pv.Vp_at_minus_inf) <= 1e-3


def test_pressure_exact_relation(wave):
    # exact pressure for the closed-form wave: V = 2(1 - e^{xi/2}), V' = -e^{xi/2}
    inner = wave.U > 1e-8
    assert np.max(np.abs(wave.V[inner] - 2.0 * wave.U[inner])) <= 1e-12
    assert np.max(np.abs(wave.Vp[inner] + np.exp(wave.xi[inner] / 2.0))) <= 2e-4


def test_endpoint_fit_pme(pme, logistic, c_star):
    traj = _sampled_trajectory(pme, logistic, c_star, 0.0)
    fit = endpoint_fit(traj, pme, logistic)
    assert fit.slope0 == pytest.approx(c_star, rel=0.01)
    assert fit.mu1 == pytest.approx(1.0, rel=0.05)
    assert fit.C1 == pytest.approx(1.0, rel=0.05)
    assert fit.predicted_C1 == pytest.approx(1.0, rel=1e-4)


def test_endpoint_fit_p3():
    p3 = validate_params(2, 3, 1)
    h = make_reaction(ReactionKind.MONOSTABLE)
    c3 = critical_speed(p3, h, 0.0, tol=1e-6).c
    traj = _sampled_trajectory(p3, h, c3, 0.0)
    fit = endpoint_fit(traj, p3, h)
    assert fit.slope0 == pytest.approx(c3, rel=0.01)
    assert fit.mu1 == pytest.approx(2.0, rel=0.10)
    assert fit.predicted_mu1 == 2.0


def test_subwave_basic(pme, logistic):
    sw = subwave_profile(pme, logistic, gamma=0.0, c=0.5, eta=0.9)
    assert sw.U[0] == 0.9
    assert sw.b > 0.0
    assert sw.nu > 0.0
    assert np.all(np.diff(sw.U) <= 1e-15)


def test_subwave_residual(pme, logistic):
    sw = subwave_profile(pme, logistic, gamma=0.0, c=0.5, eta=0.9, n=8000)
    res = profile_ode_residual(sw.xi, sw.U, pme, logistic, 0.5, 0.0, trim=0.05)
    assert res <= 1e-6


def test_subwave_no_exit_for_bistable_low_eta():
    # below the exit threshold the trajectory falls back to the U-axis
    params = validate_params(2, 2, 1)
    h = make_reaction(ReactionKind.BISTABLE, a=0.4, m=2.0)
    with pytest.raises(NoExitError):
        subwave_profile(params, h, gamma=0.0, c=0.2, eta=0.45)


def test_subwave_supercritical_rejected_or_blocked(pme, logistic):
    # eta must sit strictly inside (a, 1)
    with pytest.raises(ValueError):
        subwave_profile(pme, logistic, gamma=0.0, c=0.5, eta=1.2)
