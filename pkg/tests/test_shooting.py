import numpy as np
import pytest

from dnlfront.errors import AmbiguousError, BracketError
from dnlfront.model import ReactionKind, make_reaction, validate_params
from dnlfront.waves import (
    ShotClass,
    TerminationKind,
    classify_shot,
    compute_barrier,
    critical_speed,
    shoot_from_one,
    upper_bound_speed,
)


@pytest.fixture(scope="module")
def pme():
    return validate_params(2, 2, 1)


@pytest.fixture(scope="module")
def logistic():
    return make_reaction(ReactionKind.MONOSTABLE)


def exact_wave_residual(c):
    """Substitution oracle: U = (1 - e^{xi/2})_+ solves -cU' = (U^2)'' + U(1-U) iff c = 1."""
    xi = np.linspace(-8.0, -1e-3, 2001)
    U = 1.0 - np.exp(xi / 2.0)
    dxi = xi[1] - xi[0]
    Up = np.gradient(U, dxi, edge_order=2)
    W = U * U
    Wpp = np.gradient(np.gradient(W, dxi, edge_order=2), dxi, edge_order=2)
    res = c * Up + Wpp + U * (1.0 - U)
    return np.max(np.abs(res[5:-5]))


def test_exact_wave_is_a_solution_at_speed_one():
    assert exact_wave_residual(1.0) < 1e-5
    assert exact_wave_residual(0.8) > 1e-2


def test_shot_matches_exact_trajectory(pme, logistic):
    traj = shoot_from_one(pme, logistic, c=1.0, gamma=0.0, eps_lo=1e-6)
    err = np.max(np.abs(traj.phi - traj.U * (1.0 - traj.U)))
    assert err <= 1e-6
    assert np.all(np.diff(traj.U) < 0)
    assert np.all(traj.phi >= 0.0)


def test_subcritical_shot_exits_at_positive_phi(pme, logistic):
    ends = []
    for eps_lo in (1e-3, 1e-4, 1e-5):
        traj = shoot_from_one(pme, logistic, c=0.5, gamma=0.0, eps_lo=eps_lo)
        assert traj.termination.kind is TerminationKind.REACHED_LOW_CUTOFF
        ends.append(traj.phi_end)
    # phi(eps_lo) converges to a positive exit value nu as eps_lo -> 0
    assert ends[-1] > 0.1
    assert abs(ends[2] - ends[1]) < abs(ends[1] - ends[0])


def test_supercritical_shot_enters_along_slow_direction(pme, logistic):
    ratios = []
    for eps_lo in (3e-2, 1e-2, 3e-3):
        traj = shoot_from_one(pme, logistic, c=2.0, gamma=0.0, eps_lo=eps_lo)
        ratios.append(traj.phi_end / (2.0 * eps_lo))
    assert all(r < 0.1 for r in ratios)
    assert ratios[2] < ratios[1] < ratios[0]


def test_classify_shot(pme, logistic):
    slow = shoot_from_one(pme, logistic, c=0.5, gamma=0.0, eps_lo=1e-4)
    assert classify_shot(slow) is ShotClass.TOO_SLOW
    fast = shoot_from_one(pme, logistic, c=2.0, gamma=0.0, eps_lo=1e-4)
    assert classify_shot(fast) is ShotClass.TOO_FAST


def test_classify_critical_is_ambiguous_with_wide_margin(pme, logistic):
    traj = shoot_from_one(pme, logistic, c=1.0, gamma=0.0, eps_lo=1e-3)
    with pytest.raises(AmbiguousError):
        classify_shot(traj, margin=0.5)


def test_critical_speed_exact(pme, logistic):
    res = critical_speed(pme, logistic, gamma=0.0, tol=1e-3)
    assert res.c == pytest.approx(1.0, abs=1e-3)
    assert res.bracket[1] - res.bracket[0] <= 1e-3
    assert res.bracket[0] <= 1.0 <= res.bracket[1]


def test_critical_speed_scaling_law(pme):
    # h -> lambda h rescales c by lambda^{(p-1)/p}; lambda = 4, p = 2 gives c = 2
    h4 = make_reaction(ReactionKind.MONOSTABLE, k=4.0)
    res = critical_speed(pme, h4, gamma=0.0, tol=1e-3)
    assert res.c == pytest.approx(2.0, abs=2e-3)


@pytest.mark.parametrize("lam", [0.5, 4.0])
def test_scaling_law_property(pme, logistic, lam):
    base = critical_speed(pme, logistic, 0.0, tol=1e-5).c
    scaled = critical_speed(pme, make_reaction(ReactionKind.MONOSTABLE, k=lam), 0.0, tol=1e-5).c
    assert scaled == pytest.approx(base * lam ** 0.5, rel=5e-3)


def test_critical_speed_below_coarse_bound(pme, logistic):
    res = critical_speed(pme, logistic, gamma=0.0, tol=1e-3)
    bounds = upper_bound_speed(pme, logistic, 0.0)
    assert res.c <= bounds.coarse


def test_upper_bound_values(pme, logistic):
    bounds = upper_bound_speed(pme, logistic, 0.0)
    assert bounds.coarse == pytest.approx(2.0 * np.sqrt(2.0), rel=1e-12)
    assert bounds.refined == bounds.coarse
    with_conv = upper_bound_speed(pme, logistic, 0.1)
    assert 0.0 < with_conv.refined < with_conv.coarse


def test_monotonicity_in_c(pme, logistic):
    # phi_{c2} <= phi_{c1} pointwise for c1 < c2
    t1 = shoot_from_one(pme, logistic, c=0.4, gamma=0.0, eps_lo=1e-4)
    t2 = shoot_from_one(pme, logistic, c=0.6, gamma=0.0, eps_lo=1e-4)
    grid = np.linspace(0.05, 0.9, 50)
    phi1 = np.interp(grid, t1.U[::-1], t1.phi[::-1])
    phi2 = np.interp(grid, t2.U[::-1], t2.phi[::-1])
    assert np.all(phi2 <= phi1 + 1e-10)


def test_universal_barrier(pme, logistic):
    for c, gamma in [(0.5, 0.0), (1.0, 0.0), (2.0, 0.1), (1.0, 0.05)]:
        k1, k2 = compute_barrier(pme, logistic, c, gamma)
        traj = shoot_from_one(pme, logistic, c=c, gamma=gamma, eps_lo=1e-4)
        assert np.all(traj.phi < k1 + k2 * traj.U)


def test_barrier_bistable():
    params = validate_params(2, 2, 1)
    h = make_reaction(ReactionKind.BISTABLE, a=0.25, m=2.0)
    k1, k2 = compute_barrier(params, h, 1.0, 0.0)
    traj = shoot_from_one(params, h, c=1.0, gamma=0.0, eps_lo=1e-4)
    assert np.all(traj.phi < k1 + k2 * traj.U)


def test_bracket_error_when_sigma0_miscomputed(pme, logistic, monkeypatch):
    import dnlfront.waves.shooting as shooting
    from dnlfront.model import ReactionStats

    real = shooting.reaction_stats

    def broken(h, params, M=None):
        stats = real(h, params, M)
        return ReactionStats(sigma0=stats.sigma0 / 100.0, qF=stats.qF,
                             sign_integral=stats.sign_integral, H_sup=stats.H_sup)

    monkeypatch.setattr(shooting, "reaction_stats", broken)
    with pytest.raises(BracketError):
        critical_speed(pme, logistic, gamma=0.0, tol=1e-3)


def test_grid_refinement_stability(pme, logistic):
    res = critical_speed(pme, logistic, gamma=0.0, tol=1e-4)
    width = res.bracket[1] - res.bracket[0]
    # halving the integration tolerance moves c by less than the bracket width
    res_tight = critical_speed(pme, logistic, gamma=0.0, tol=1e-4, rtol=5e-11)
    assert abs(res_tight.c - res.c) <= width
    # so does refining the low-cutoff schedule
    res_fine = critical_speed(pme, logistic, gamma=0.0, tol=1e-4,
                              eps_lo_schedule=(1e-5, 1e-6, 1e-7))
    assert abs(res_fine.c - res.c) <= width


def test_convection_lowers_speed(pme, logistic):
    c0 = critical_speed(pme, logistic, 0.0, tol=1e-4).c
    c1 = critical_speed(pme, logistic, 0.1, tol=1e-4).c
    assert c1 < c0
    # Lipschitz-type lower bound c(gamma) >= c(0) - m gamma
    assert c1 >= c0 - 2.0 * 0.1 - 1e-3
