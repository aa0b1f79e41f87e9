"""Reaction-diffusion stepping, front speed measurement, and the
fast-slow sweep."""

import math

import numpy as np
import pytest

from infospread import epi_sir, rdwave
from infospread.errors import NoCrossingError, NonFiniteError, StabilityError, StiffnessError


def make_cfg(**kw):
    base = dict(d_coeff=1.0, r_rate=1.0, k_cap=1.0, dx=0.1, dt=0.002,
                length=20.0, horizon=1.0)
    base.update(kw)
    return rdwave.ReactionDiffusionConfig(**base)


# -- rates ---------------------------------------------------------------

def test_logistic_rate_boundary_zeros():
    assert rdwave.logistic_rate(0.0, r=1.3, K=2.0) == 0.0
    assert rdwave.logistic_rate(2.0, r=1.3, K=2.0) == 0.0


def test_logistic_rate_peak_value():
    assert rdwave.logistic_rate(0.5, r=1.0, K=1.0) == 0.25


def test_allee_family_available():
    cfg = make_cfg(rate_family="allee", allee_threshold=0.3)
    assert rdwave.reaction_rate(0.1, cfg) < 0.0
    assert rdwave.reaction_rate(0.5, cfg) > 0.0
    assert rdwave.reaction_rate(0.3, cfg) == 0.0


# -- config --------------------------------------------------------------

def test_config_rejects_cfl_violation():
    with pytest.raises(StabilityError):
        make_cfg(dt=0.01)  # D*dt/dx^2 = 1 > 0.5


def test_config_allows_zero_reaction_rate():
    assert make_cfg(r_rate=0.0).r_rate == 0.0


def test_config_rejects_nonpositive_sizes():
    with pytest.raises(ValueError):
        make_cfg(dx=0.0)
    with pytest.raises(ValueError):
        make_cfg(k_cap=-1.0)


def test_grid_geometry():
    cfg = make_cfg(length=20.0, dx=0.1)
    assert cfg.n_nodes == 201
    assert cfg.x[0] == 0.0
    assert cfg.x[-1] == pytest.approx(20.0)


# -- stepping ---------------------------------------------------------------

def test_zero_field_is_exact_fixed_point():
    cfg = make_cfg()
    state = rdwave.FieldState(u=np.zeros(cfg.n_nodes), t=0.0)
    for _ in range(100):
        state = rdwave.rd_step(state, cfg)
    assert np.array_equal(state.u, np.zeros(cfg.n_nodes))


def test_saturated_field_is_exact_fixed_point():
    cfg = make_cfg(k_cap=0.7)
    state = rdwave.FieldState(u=np.full(cfg.n_nodes, 0.7), t=0.0)
    for _ in range(100):
        state = rdwave.rd_step(state, cfg)
    assert np.array_equal(state.u, np.full(cfg.n_nodes, 0.7))


def test_pure_diffusion_conserves_mass_per_step():
    cfg = make_cfg(r_rate=0.0)
    u = np.zeros(cfg.n_nodes)
    u[cfg.n_nodes // 2] = 1.0
    state = rdwave.FieldState(u=u, t=0.0)
    for _ in range(200):
        before = state.u.sum() * cfg.dx
        state = rdwave.rd_step(state, cfg)
        assert abs(state.u.sum() * cfg.dx - before) <= 1e-12


def test_pure_diffusion_mass_drift_over_many_steps():
    cfg = make_cfg(r_rate=0.0, horizon=20.0)
    u = np.zeros(cfg.n_nodes)
    u[cfg.n_nodes // 3] = 1.0
    mass0 = u.sum() * cfg.dx
    snaps = rdwave.rd_integrate(cfg, rdwave.FieldState(u=u, t=0.0),
                                snapshot_every=1000)
    assert int(round(cfg.horizon / cfg.dt)) == 10_000
    for snap in snaps:
        assert abs(snap.u.sum() * cfg.dx - mass0) <= 1e-10


def test_discrete_maximum_principle():
    rng = np.random.default_rng(3)
    cfg = make_cfg()
    state = rdwave.FieldState(u=rng.random(cfg.n_nodes), t=0.0)
    for _ in range(500):
        state = rdwave.rd_step(state, cfg)
        assert state.u.min() >= -1e-10
        assert state.u.max() <= cfg.k_cap + 1e-10


def test_uniform_field_follows_logistic_closed_form():
    cfg = make_cfg(dt=1e-3, length=5.0, horizon=5.0)
    u0 = np.full(cfg.n_nodes, 0.5)
    snaps = rdwave.rd_integrate(cfg, rdwave.FieldState(u=u0, t=0.0),
                                snapshot_every=200)
    for snap in snaps:
        exact = cfg.k_cap / (1.0 + math.exp(-cfg.r_rate * snap.t))
        spread = np.ptp(snap.u)
        assert spread == 0.0  # uniform field stays uniform
        assert abs(snap.u[0] - exact) <= 2e-4  # forward-Euler-in-time error


def test_step_initial_data_keeps_monotone_front():
    cfg = make_cfg(length=40.0, horizon=10.0)
    u0 = np.where(cfg.x < 4.0, 1.0, 0.0)
    snaps = rdwave.rd_integrate(cfg, rdwave.FieldState(u=u0, t=0.0),
                                snapshot_every=500)
    for snap in snaps:
        assert np.all(np.diff(snap.u) <= 1e-12)


def test_integrate_zero_everywhere():
    cfg = make_cfg(horizon=2.0)
    snaps = rdwave.rd_integrate(cfg, rdwave.FieldState(u=np.zeros(cfg.n_nodes), t=0.0),
                                snapshot_every=100)
    assert all(not s.u.any() for s in snaps)


def test_integrate_rejects_wrong_grid():
    cfg = make_cfg()
    with pytest.raises(ValueError):
        rdwave.rd_integrate(cfg, rdwave.FieldState(u=np.zeros(3), t=0.0), 10)


def test_integrate_reports_nonfinite_blowup():
    cfg = make_cfg()
    u0 = np.full(cfg.n_nodes, 1e308)
    with pytest.raises(NonFiniteError) as err:
        rdwave.rd_integrate(cfg, rdwave.FieldState(u=u0, t=0.0), 10)
    assert "t=" in str(err.value) and "node" in str(err.value)


# -- wave speed --------------------------------------------------------------

def test_wave_speed_pure_translation():
    # Piecewise-linear profile translating at c = 3: linear interpolation
    # recovers the crossing exactly, so the fitted slope is exact too.
    c, ramp, x0, dx = 3.0, 2.0, 10.0, 0.1
    x = dx * np.arange(1001)
    series = [
        rdwave.FieldState(
            u=np.clip((x0 + c * t - x) / ramp + 0.5, 0.0, 1.0), t=float(t))
        for t in range(0, 21)
    ]
    est = rdwave.estimate_wave_speed(series, level=0.5, fit_window=(0.0, 20.0),
                                     dx=dx)
    assert abs(est.speed - c) <= 1e-9
    assert est.residual <= 1e-9


def test_wave_speed_saturated_field_has_no_crossing():
    x = 0.1 * np.arange(101)
    series = [rdwave.FieldState(u=np.ones_like(x), t=float(t)) for t in range(5)]
    with pytest.raises(NoCrossingError):
        rdwave.estimate_wave_speed(series, level=0.5, fit_window=(0.0, 4.0), dx=0.1)


def test_wave_speed_fisher_front():
    cfg = rdwave.ReactionDiffusionConfig(
        d_coeff=1.0, r_rate=1.0, k_cap=1.0, dx=0.1, dt=0.002,
        length=200.0, horizon=80.0)
    u0 = np.where(cfg.x < 20.0, 1.0, 0.0)
    snaps = rdwave.rd_integrate(cfg, rdwave.FieldState(u=u0, t=0.0),
                                snapshot_every=500)
    est = rdwave.estimate_wave_speed(snaps, level=0.5, fit_window=(20.0, 80.0),
                                     dx=cfg.dx)
    assert abs(est.speed - 2.0) / 2.0 <= 0.05


# -- homogeneous equilibria ----------------------------------------------------

def test_rate_equilibria_logistic():
    low, high = rdwave.rd_equilibria(r=1.0, K=1.0)
    assert (low.u, low.slope, low.stability) == (0.0, 1.0, "unstable")
    assert (high.u, high.slope, high.stability) == (1.0, -1.0, "stable")


def test_rate_equilibria_degenerate_rate():
    low, high = rdwave.rd_equilibria(r=0.0, K=2.0)
    assert low.stability == high.stability == "non-hyperbolic"
    assert low.slope == high.slope == 0.0


# -- fast-slow ------------------------------------------------------------------

SUBCRITICAL = epi_sir.SirParams(beta=0.1, alpha=0.2, mu=0.05, n_total=1.0)


def test_unit_epsilon_is_bitwise_plain_integration():
    cfg = rdwave.FastSlowConfig(sir=SUBCRITICAL, epsilon=1.0, h=0.05,
                                horizon=30.0, layer_time=5.0, i0=0.2)
    result = rdwave.fast_slow_integrate(cfg)
    plain = epi_sir.integrate(SUBCRITICAL,
                              epi_sir.SirState(s=cfg.s0, i=cfg.i0, r=0.0),
                              h=0.05, horizon=30.0)
    assert np.array_equal(result.trajectory.s, plain.s)
    assert np.array_equal(result.trajectory.i, plain.i)


def test_sup_deviation_decreases_with_epsilon():
    devs = []
    for eps in (0.1, 0.01, 0.001):
        cfg = rdwave.FastSlowConfig(sir=SUBCRITICAL, epsilon=eps, h=0.05,
                                    horizon=30.0, layer_time=5.0, i0=0.2)
        devs.append(rdwave.fast_slow_integrate(cfg).sup_deviation)
    assert devs[0] > devs[1] > devs[2]


def test_uninfected_initial_state_stays_uninfected():
    for eps in (1.0, 0.1, 0.01):
        cfg = rdwave.FastSlowConfig(sir=SUBCRITICAL, epsilon=eps, h=0.05,
                                    horizon=10.0, layer_time=5.0, i0=0.0)
        result = rdwave.fast_slow_integrate(cfg)
        assert not result.trajectory.i.any()
        assert result.sup_deviation == 0.0


def test_qss_branch_selection():
    sup = epi_sir.SirParams(beta=0.5, alpha=0.1, mu=0.05, n_total=1.0)
    cfg = rdwave.FastSlowConfig(sir=sup, epsilon=0.1, h=0.05, horizon=10.0,
                                layer_time=5.0, i0=1e-3)
    result = rdwave.fast_slow_integrate(cfg)
    s_star = (sup.alpha + sup.mu) / sup.beta
    assert np.all(result.qss_trajectory.s == s_star)
    assert result.qss_trajectory.i[0] == pytest.approx(7.0 / 30.0, rel=1e-12)
    sub_cfg = rdwave.FastSlowConfig(sir=SUBCRITICAL, epsilon=0.1, h=0.05,
                                    horizon=10.0, layer_time=5.0, i0=0.2)
    sub = rdwave.fast_slow_integrate(sub_cfg)
    assert not sub.qss_trajectory.i.any()
    assert sub.qss_trajectory.s[-1] > sub.qss_trajectory.s[0]


def test_unresolved_layer_raises_stiffness_error():
    stiff = epi_sir.SirParams(beta=0.1, alpha=5.0, mu=0.05, n_total=1.0)
    cfg = rdwave.FastSlowConfig(sir=stiff, epsilon=1.0, h=2.0, horizon=400.0,
                                layer_time=5.0, i0=0.2)
    with pytest.raises(StiffnessError):
        rdwave.fast_slow_integrate(cfg)


def test_fast_slow_config_validation():
    with pytest.raises(ValueError):
        rdwave.FastSlowConfig(sir=SUBCRITICAL, epsilon=0.0, h=0.05,
                              horizon=10.0, layer_time=5.0)
    with pytest.raises(ValueError):
        rdwave.FastSlowConfig(sir=SUBCRITICAL, epsilon=0.5, h=0.05,
                              horizon=10.0, layer_time=20.0)
    cfg = rdwave.FastSlowConfig(sir=SUBCRITICAL, epsilon=0.5, h=0.05,
                                horizon=10.0, layer_time=5.0, i0=0.25)
    assert cfg.s0 == SUBCRITICAL.n_total - 0.25
