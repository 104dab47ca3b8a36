import numpy as np
import pytest
from scipy.integrate import solve_ivp

from dnlfront.errors import CFLError, ConstraintError, DomainFullWarning, GridError
from dnlfront.model import ReactionKind, ReactionSpec, make_reaction, validate_params
from dnlfront.pde import (
    Sampling,
    Stepper,
    box_datum,
    domain_full,
    flux_field,
    front_position,
    kanel_bump,
    line_grid,
    plateau_datum,
    radial_grid,
    run,
    step,
    wave_datum,
    RadialField,
)
from dnlfront.waves import critical_speed, upper_bound_speed, wave_profile


@pytest.fixture(scope="module")
def pme():
    return validate_params(2, 2, 1)


@pytest.fixture(scope="module")
def logistic():
    return make_reaction(ReactionKind.MONOSTABLE)


@pytest.fixture(scope="module")
def wave(pme, logistic):
    c = critical_speed(pme, logistic, 0.0, tol=1e-6).c
    return wave_profile(pme, logistic, c=c, gamma=0.0)


def zero_reaction():
    z = lambda u: np.zeros_like(np.asarray(u, dtype=float))
    return ReactionSpec(kind=ReactionKind.CUSTOM, a=0.0, evaluator=z, derivative=z)


# -- initial data ------------------------------------------------------------

def test_kanel_bump_values(pme):
    g = radial_grid(5.0, 0.01, 1)
    b = kanel_bump(g, pme, delta=0.1, sigma=3.0, beta=2.0)
    # value at the first cell center approximates delta; support radius 1
    assert b.u[0] == pytest.approx(0.1, abs=1e-3)
    assert front_position(b, pme) == pytest.approx(1.0, abs=2 * g.dr)


def test_kanel_bump_constraints(pme):
    g = radial_grid(5.0, 0.05, 1)
    with pytest.raises(ConstraintError):
        kanel_bump(g, pme, delta=0.1, sigma=3.0, beta=0.5)   # beta <= p/(m(p-1)) = 1
    with pytest.raises(ConstraintError):
        kanel_bump(g, pme, delta=0.1, sigma=1.5, beta=2.0)   # sigma <= p/(p-1) = 2
    with pytest.raises(GridError):
        kanel_bump(g, pme, delta=0.1, sigma=3.0, beta=2.0, radius=10.0)


def test_plateau_datum(pme, logistic):
    g = radial_grid(20.0, 0.02, 1)
    f = plateau_datum(g, pme, logistic, rho=5.0, eta=0.9, c=0.5)
    x = g.centers
    assert np.all(f.u[x <= 5.0] == 0.9)
    assert f.sup == 0.9
    assert front_position(f, pme) > 5.0


# -- single steps ------------------------------------------------------------

def test_constant_states_are_fixed_points(pme, logistic):
    # h(0) = h(1) = 0 and constant states carry no interior flux; only the
    # outer Dirichlet cell (immaterial under the domain guard) can move
    g = radial_grid(3.0, 0.05, 2)
    zero = RadialField(g, np.zeros(g.n))
    assert np.array_equal(step(zero, 1e-4, pme, logistic).u, zero.u)
    one = RadialField(g, np.ones(g.n))
    out = step(one, 1e-4, pme, logistic)
    assert np.array_equal(out.u[:-1], one.u[:-1])


def test_cfl_violation_raises(pme, logistic):
    g = radial_grid(3.0, 0.05, 1)
    f = RadialField(g, np.clip(1.0 - g.centers, 0.0, None))
    st = Stepper(g, pme, logistic, u_ref=1.0)
    with pytest.raises(CFLError):
        step(f, 10.0 * st.dt_bound(1.0), pme, logistic)


def test_exact_wave_transport(pme, logistic, wave):
    dr = 0.02
    g = line_grid(-30.0, 8.0, dr, left_bc="neumann")
    f = wave_datum(g, wave, x0=0.0)
    sim = run(f, 1.0, pme, logistic, Sampling(every=0.25))
    exact = np.clip(1.0 - np.exp((g.centers - sim.final.t) / 2.0), 0.0, 1.0)
    assert np.max(np.abs(sim.final.u - exact)) <= 5 * dr


def test_exact_wave_front_speed(pme, logistic, wave):
    dr = 0.04
    g = line_grid(-45.0, 33.0, dr, left_bc="neumann")
    f = wave_datum(g, wave, x0=0.0)
    sim = run(f, 20.0, pme, logistic, Sampling(every=0.5))
    t, eta = sim.eta_series[:, 0], sim.eta_series[:, 1]
    drift = eta - eta[0] - t
    assert np.max(np.abs(drift)) <= 5 * dr


def test_vanishing_run_flat_ode_oracle(pme):
    # bistable with sup below the threshold decays; the flat ODE du/dt = h(u)
    # started at the sup is a supersolution, so it bounds the PDE sup
    h = make_reaction(ReactionKind.BISTABLE, a=0.25, m=2.0)
    sol = solve_ivp(lambda t, y: float(h(y[0])), (0.0, 200.0), (0.1,),
                    rtol=1e-10, atol=1e-14, dense_output=True)
    t_hit = None
    for t_probe in np.linspace(1.0, 200.0, 400):
        if sol.sol(t_probe)[0] <= 1e-7:
            t_hit = t_probe
            break
    assert t_hit is not None
    g = radial_grid(8.0, 0.05, 1)
    f = kanel_bump(g, pme, delta=0.1, sigma=3.0, beta=2.0, radius=2.0)
    sim = run(f, t_hit, pme, h, Sampling(every=5.0))
    assert sim.final.sup <= 1e-6


def test_spreading_plateau_moves(pme, logistic):
    g = radial_grid(30.0, 0.05, 1)
    f = plateau_datum(g, pme, logistic, rho=5.0, eta=0.9, c=0.5)
    sim = run(f, 8.0, pme, logistic, Sampling(every=1.0))
    assert sim.eta_series[-1, 1] > sim.eta_series[0, 1]


# -- diagnostics -------------------------------------------------------------

def test_front_position_cases(pme, logistic, wave):
    g = radial_grid(5.0, 0.05, 1)
    assert front_position(RadialField(g, np.zeros(g.n)), pme) is None
    full = RadialField(g, np.full(g.n, 0.3))
    assert front_position(full, pme) == pytest.approx(g.extent)
    assert domain_full(full)
    gl = line_grid(-20.0, 5.0, 0.02, left_bc="neumann")
    f = wave_datum(gl, wave, x0=1.0)
    assert front_position(f, pme) == pytest.approx(1.0, abs=2 * gl.dr)


def test_flux_field(pme, logistic, wave):
    g = line_grid(-30.0, 5.0, 0.02, left_bc="neumann")
    f = wave_datum(g, wave, x0=0.0)
    fl = flux_field(f, pme)
    assert fl.max_abs == pytest.approx(0.25, rel=0.10)
    const = RadialField(radial_grid(2.0, 0.05, 1), np.full(40, 0.7))
    # interior of a constant state carries no flux (the Dirichlet edge does)
    assert np.max(np.abs(flux_field(const, pme).values[:-1])) == 0.0


def test_mass_conservation_pure_diffusion(pme):
    g = radial_grid(10.0, 0.05, 2)
    b = kanel_bump(g, pme, delta=0.5, sigma=3.0, beta=2.0, radius=2.0)
    V = g.volumes()
    mass0 = float(V @ b.u)
    sim = run(b, 5.0, pme, zero_reaction(), Sampling(every=1.0))
    assert float(V @ sim.final.u) == pytest.approx(mass0, rel=1e-10)


def test_maximum_principle(pme, logistic):
    g = radial_grid(10.0, 0.05, 1)
    b = kanel_bump(g, pme, delta=1.4, sigma=3.0, beta=2.0, radius=2.0)
    sim = run(b, 3.0, pme, logistic, Sampling(every=0.5))
    assert sim.final.sup <= max(1.4, 1.0) + 1e-12


def test_discrete_comparison_principle(pme, logistic):
    rng = np.random.default_rng(7)
    g = radial_grid(4.0, 0.1, 1)
    st = Stepper(g, pme, logistic, u_ref=1.0)
    for _ in range(10):
        base = rng.uniform(0.0, 0.8, g.n)
        upper = np.clip(base + rng.uniform(0.0, 0.2, g.n), 0.0, 1.0)
        fa = RadialField(g, base.copy())
        fb = RadialField(g, upper.copy())
        dt = st.dt_auto(float(upper.max()))
        for _ in range(200):
            fa = step(fa, dt, pme, logistic, stepper=st)
            fb = step(fb, dt, pme, logistic, stepper=st)
            assert np.all(fa.u <= fb.u + 1e-12)


def test_finite_propagation(pme, logistic):
    g = radial_grid(30.0, 0.05, 1)
    f = plateau_datum(g, pme, logistic, rho=5.0, eta=0.9, c=0.5)
    sim = run(f, 6.0, pme, logistic, Sampling(every=0.5))
    bound = upper_bound_speed(pme, logistic, 0.0).coarse
    t, eta = sim.eta_series[:, 0], sim.eta_series[:, 1]
    for i in range(1, len(t)):
        assert eta[i] - eta[0] <= bound * (t[i] - t[0]) + 2 * g.dr


def test_grid_convergence_front(pme, logistic, wave):
    etas = {}
    for dr in (0.08, 0.04):
        g = line_grid(-40.0, 15.0, dr, left_bc="neumann")
        f = wave_datum(g, wave, x0=0.0)
        sim = run(f, 8.0, pme, logistic, Sampling(every=1.0))
        etas[dr] = sim.eta_series[-1, 1]
    assert abs(etas[0.08] - etas[0.04]) <= 5 * 0.08


def test_domain_guard_aborts(pme, logistic):
    g = radial_grid(8.0, 0.05, 1)
    f = box_datum(g, height=0.9, radius=2.0)
    with pytest.raises(DomainFullWarning):
        run(f, 30.0, pme, logistic, Sampling(every=0.5))


def test_run_p3_radial_smoke():
    params = validate_params(2, 3, 2)
    h = make_reaction(ReactionKind.MONOSTABLE)
    g = radial_grid(6.0, 0.1, 2)
    b = kanel_bump(g, params, delta=0.8, sigma=3.0, beta=2.0, radius=2.0)
    sim = run(b, 2.0, params, h, Sampling(every=0.5))
    assert sim.final.sup <= 1.0 + 1e-12
    assert np.all(sim.final.u >= 0.0)


def test_box_datum_and_line_left_front(pme, logistic):
    g = line_grid(-10.0, 10.0, 0.05)
    f = box_datum(g, height=0.8, radius=2.0)
    sim = run(f, 2.0, pme, logistic, Sampling(every=0.5))
    assert sim.zeta_series is not None
    zm, zp = sim.zeta_series[-1, 1], sim.zeta_series[-1, 2]
    assert zm < -2.0 < 2.0 < zp
