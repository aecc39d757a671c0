import numpy as np
import pytest

from shearmhd.errors import ConfigError, ContractError, DomainError
from shearmhd.grid import make_grid, to_physical, SpectralField
from shearmhd.initial_data import gevrey_random_state, single_mode_state
from shearmhd.linear import ModeState, integrate_mode
from shearmhd.nonlinear import (SimState, StepperConfig, advance_to,
                                from_good_unknowns, good_unknown_arrays,
                                nonlinear_rhs, step, suggest_dt,
                                to_good_unknowns)
from tests_util import brute_force_bracket  # noqa: F401  (see conftest path)


def small_state(g, seed=0, amp=0.05, kb=3, eb=3.0):
    return gevrey_random_state(g, amp, seed=seed, k_band=kb, eta_band=eb,
                               with_v0=True)


def test_good_unknown_round_trip():
    g = make_grid(16, 16)
    st = small_state(g, 1)
    fs = to_good_unknowns(*st.as_fields(), t=0.7, nu=1.0, alpha=1.0)
    w, phi, v0 = from_good_unknowns(fs, nu=1.0, alpha=1.0)
    # round trip identity on the k != 0 content (w_0 comes from v0x)
    assert np.max(np.abs(w.coeffs[1:, :] - st.w[1:, :])) < 1e-12
    assert np.max(np.abs(phi.coeffs - st.phi)) < 1e-14
    with pytest.raises(DomainError):
        from_good_unknowns(fs, nu=0.0)


def test_good_unknown_pure_phi():
    # w = 0: G's coefficient is -i k/(k^2 + (eta - k t)^2) phi
    g = make_grid(16, 16)
    phi = np.zeros(g.shape, dtype=complex)
    i, j = g.index_of_k(1), g.index_of_eta(2.0)
    phi[i, j] = 1.0
    t = 0.5
    G, _ = good_unknown_arrays(np.zeros_like(phi), phi, g, t, 1.0, 1.0)
    p = 1.0 + (2.0 - t) ** 2
    assert G[i, j] == pytest.approx(-1j / p)


def test_rhs_matches_brute_force_convolution():
    # every quadratic term vs a direct convolution sum on an 8x8 grid
    g = make_grid(8, 8)
    st = gevrey_random_state(g, 0.1, seed=3, k_band=2, eta_band=2.0,
                             with_v0=True)
    t = 0.6
    st = SimState(g, t, st.w, st.phi, st.v0x)
    dw, dphi, dv0 = nonlinear_rhs(st, nu=1.0, alpha=1.0)
    dw_ref, dphi_ref, dv0_ref = brute_force_bracket(st, nu=1.0, alpha=1.0)
    scale = max(np.max(np.abs(dw_ref)), np.max(np.abs(dphi_ref)), 1e-30)
    assert np.max(np.abs(dw - dw_ref)) < 1e-11 * scale
    assert np.max(np.abs(dphi - dphi_ref)) < 1e-11 * scale
    assert np.max(np.abs(dv0 - dv0_ref)) < 1e-11 * scale


def test_rhs_shear_steady_state():
    # alpha = 0, phi = 0, w pure k = 0 shear lives in v0x: nonlinear terms vanish
    g = make_grid(16, 16)
    v0 = np.zeros(g.n_y, dtype=complex)
    v0[g.index_of_eta(1.0)] = 0.3
    v0[g.index_of_eta(-1.0)] = 0.3
    st = SimState(g, 0.0, np.zeros(g.shape, complex), np.zeros(g.shape, complex), v0)
    dw, dphi, dv0 = nonlinear_rhs(st, nu=0.0, alpha=0.0)
    assert np.max(np.abs(dw)) == 0.0
    assert np.max(np.abs(dphi)) == 0.0
    assert np.max(np.abs(dv0)) == 0.0


def test_rhs_single_mode_self_transport():
    # w = 0, v0 = 0, alpha = 0: a single phi mode transports nothing
    g = make_grid(16, 16)
    st = single_mode_state(g, 2, 1.0, 0.05)
    st = SimState(g, 0.0, np.zeros(g.shape, complex), st.phi, st.v0x)
    dw, dphi, _ = nonlinear_rhs(st, nu=1.0, alpha=0.0)
    assert np.max(np.abs(dphi)) < 1e-16
    # dw carries {phi, lap_t phi} which also vanishes for a single pair
    assert np.max(np.abs(dw)) < 1e-16


def test_rhs_requires_dealiased_input():
    g = make_grid(16, 16)
    w = np.zeros(g.shape, complex)
    w[g.index_of_k(7), 0] = 1.0  # outside the 2/3 ball
    st = SimState(g, 0.0, w, np.zeros(g.shape, complex),
                  np.zeros(g.n_y, complex))
    with pytest.raises(ContractError):
        nonlinear_rhs(st)


def test_step_matches_linear_solver():
    g = make_grid(32, 32)
    k0, e0, amp = 1, 2.0, 0.5
    phi = np.zeros(g.shape, complex)
    phi[g.index_of_k(k0), g.index_of_eta(e0)] = amp
    phi[g.index_of_k(-k0), g.index_of_eta(-e0)] = amp
    st = SimState(g, 0.0, np.zeros(g.shape, complex), phi,
                  np.zeros(g.n_y, complex))
    st = advance_to(st, 20.0, StepperConfig(dt=0.002, nonlinear=False))
    p0 = k0 * k0 + e0 * e0
    traj = integrate_mode(ModeState(k=k0, eta=e0, G=-1j * k0 / p0 * amp, phi=amp),
                          t_end=20.0, rtol=5e-12)
    got = st.phi[g.index_of_k(k0), g.index_of_eta(e0)]
    assert abs(got - traj.phi[-1]) < 1e-8
    G, _ = good_unknown_arrays(st.w, st.phi, g, st.t, 1.0, 1.0)
    assert abs(G[g.index_of_k(k0), g.index_of_eta(e0)] - traj.G[-1]) < 1e-8


def test_transport_conserves_phi_l2():
    # nu = 0 = alpha: pure transport by a divergence-free field
    g = make_grid(32, 32)
    st = small_state(g, 5, amp=0.02)
    n0 = np.sqrt(np.sum(np.abs(st.phi) ** 2))
    out = advance_to(st, 5.0, StepperConfig(dt=0.01, nu=0.0, alpha=0.0))
    n1 = np.sqrt(np.sum(np.abs(out.phi) ** 2))
    assert abs(n1 - n0) < 1e-9 * n0


def test_order_of_convergence():
    # smooth data, moderate viscosity: fourth-order error decay
    g = make_grid(32, 32)
    st0 = small_state(g, 7, amp=0.05)
    outs = []
    for dt in [0.02, 0.01, 0.0025]:
        st = SimState(g, 0.0, st0.w.copy(), st0.phi.copy(), st0.v0x.copy())
        st = advance_to(st, 5.0, StepperConfig(dt=dt, nu=0.05, alpha=1.0))
        outs.append(np.concatenate([st.phi.ravel(), st.w.ravel()]))
    e1 = np.sqrt(np.sum(np.abs(outs[0] - outs[-1]) ** 2))
    e2 = np.sqrt(np.sum(np.abs(outs[1] - outs[-1]) ** 2))
    order = np.log2(e1 / e2)
    assert order >= 3.7


def test_reality_and_zero_columns_preserved():
    g = make_grid(32, 32)
    st = small_state(g, 9, amp=0.05)
    out = advance_to(st, 3.0, StepperConfig(dt=0.01, nu=1.0, alpha=1.0))
    phys = to_physical(SpectralField(g, out.phi))
    assert np.max(np.abs(phys.imag)) < 1e-12 * np.max(np.abs(phys.real))
    assert np.max(np.abs(out.w[0, :])) == 0.0
    assert abs(out.phi[0, 0]) == 0.0
    # G's k = 0 column is identically zero by construction
    G, _ = good_unknown_arrays(out.w, out.phi, g, out.t, 1.0, 1.0)
    assert np.max(np.abs(G[0, :])) == 0.0


def test_cfl_rejection_and_suggestion():
    g = make_grid(16, 16)
    st = small_state(g, 11, amp=0.1)
    cfg = StepperConfig(dt=5.0, nu=1.0, alpha=1.0)
    sug = suggest_dt(st, cfg)
    assert 0 < sug < 5.0
    with pytest.raises(ConfigError):
        step(st, cfg)
    step(st, cfg, dt=sug)  # the suggested step is accepted
