import numpy as np
import pytest

from shearmhd.diagnostics import gevrey_norm
from shearmhd.errors import ConfigError
from shearmhd.grid import make_grid
from shearmhd.initial_data import gevrey_random_state, single_mode_state
from shearmhd.nonlinear import good_unknown_arrays
from shearmhd.weights import WeightParams

PARAMS = WeightParams()


def test_single_mode_normalization_and_zero_G():
    g = make_grid(32, 32)
    st = single_mode_state(g, 5, 0.0, 1e-3)
    assert gevrey_norm(g, st.phi, PARAMS.s, PARAMS.lambda0) == pytest.approx(1e-3)
    G, _ = good_unknown_arrays(st.w, st.phi, g, 0.0, 1.0, 1.0)
    assert np.max(np.abs(G)) < 1e-18
    assert np.max(np.abs(st.v0x)) == 0.0
    with pytest.raises(ConfigError):
        single_mode_state(g, 0, 1.0, 1e-3)


def test_gevrey_random_band_and_total_norm():
    g = make_grid(32, 32)
    st = gevrey_random_state(g, 1e-2, seed=3, k_band=3, eta_band=2.0)
    # support respects the band
    for i, k in enumerate(g.k_values):
        for j, eta in enumerate(g.eta_values):
            if abs(k) > 3 or abs(eta) > 2.0:
                assert st.phi[i, j] == 0.0
    assert st.phi[0, 0] == 0.0
    G, _ = good_unknown_arrays(st.w, st.phi, g, 0.0, 1.0, 1.0)
    v0_grid = np.zeros(g.shape, dtype=complex)
    v0_grid[0, :] = st.v0x
    total = (gevrey_norm(g, st.phi, PARAMS.s, PARAMS.lambda0)
             + gevrey_norm(g, G, PARAMS.s, PARAMS.lambda0)
             + gevrey_norm(g, v0_grid, PARAMS.s, PARAMS.lambda0))
    assert total == pytest.approx(1e-2)


def test_gevrey_random_reality_and_determinism():
    g = make_grid(32, 32)
    a = gevrey_random_state(g, 1e-2, seed=9)
    b = gevrey_random_state(g, 1e-2, seed=9)
    assert np.array_equal(a.phi, b.phi)
    assert np.array_equal(a.w, b.w)
    from shearmhd.grid import SpectralField
    assert SpectralField(g, a.phi).conjugate_symmetry_defect() < 1e-15
    assert SpectralField(g, a.w).conjugate_symmetry_defect() < 1e-15
    row = np.zeros(g.shape, dtype=complex)
    row[0, :] = a.v0x
    assert SpectralField(g, row).conjugate_symmetry_defect() < 1e-15


def test_quasistatic_G_suppresses_relaxation():
    # the prepared state starts near the slow manifold: the early change
    # of |G| is much smaller than for G(0) = 0 data
    from shearmhd.nonlinear import StepperConfig, advance_to
    g = make_grid(32, 32)
    cfg = StepperConfig(dt=0.005, nu=1.0, alpha=1.0, nonlinear=True)
    drifts = {}
    for qg in (False, True):
        st = gevrey_random_state(g, 1e-3, seed=5, k_band=3, eta_band=2.0,
                                 zero_G=not qg, quasistatic_G=qg)
        G0, _ = good_unknown_arrays(st.w, st.phi, g, 0.0, 1.0, 1.0)
        out = advance_to(st, 0.25, cfg)
        G1, _ = good_unknown_arrays(out.w, out.phi, g, out.t, 1.0, 1.0)
        drifts[qg] = np.max(np.abs(G1 - G0))
    assert drifts[True] < 0.3 * drifts[False]
