import numpy as np
import pytest

from shearmhd.errors import ConfigError, DomainError
from shearmhd.grid import (FlowState, SpectralField, apply_multiplier,
                           from_physical, make_grid, moving_symbol, project,
                           to_physical, transform_product, zero_field)


def rand_field(grid, seed=0, band_limited=True, real=False):
    rng = np.random.default_rng(seed)
    c = rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape)
    if band_limited:
        c = np.where(grid.dealias_mask, c, 0.0)
    f = SpectralField(grid, c)
    if real:
        f.enforce_reality()
    return f


def test_make_grid_enumerations():
    g = make_grid(8, 8, 2 * np.pi)
    assert sorted(g.k_values) == list(range(-4, 4))
    assert sorted(g.eta_values) == list(range(-4, 4))
    g2 = make_grid(8, 8, 4 * np.pi)
    assert g2.eta_spacing == pytest.approx(0.5)
    g3 = make_grid(16, 32, 2 * np.pi, dealias_fraction=1.0)
    assert g3.shape == (16, 32)
    assert np.all(g3.dealias_mask)


def test_make_grid_rejects_bad_sizes():
    with pytest.raises(ConfigError):
        make_grid(12, 8)
    with pytest.raises(ConfigError):
        make_grid(8, 4)
    with pytest.raises(ConfigError):
        make_grid(8, 8, L_y=-1.0)


def test_round_trip_transform():
    g = make_grid(32, 32)
    rng = np.random.default_rng(1)
    phys = rng.standard_normal(g.shape)
    f = from_physical(g, phys)
    back = to_physical(f)
    assert np.max(np.abs(back - phys)) < 1e-12 * np.max(np.abs(phys))
    assert f.conjugate_symmetry_defect() < 1e-14


def test_moving_symbols():
    assert moving_symbol("laplacian_t", 2, 3.0, 1.0) == pytest.approx(-5.0)
    k, eta = 3, 1.5
    assert moving_symbol("laplacian_t", k, eta, 0.0) == pytest.approx(-(k * k + eta * eta))
    # resonant time eta = k t gives -1/k^2 for the inverse
    assert moving_symbol("inv_laplacian_t", 1, 2.0, 2.0) == pytest.approx(-1.0)
    assert moving_symbol("grad_t_x", 2, 0.0, 5.0) == 2j
    assert moving_symbol("grad_t_y", 2, 3.0, 1.0) == 1j
    with pytest.raises(DomainError):
        moving_symbol("inv_laplacian_t", 0, 0.0, 1.0)
    # product of the symbol with its inverse is 1 away from the origin
    g = make_grid(16, 16)
    lap = moving_symbol("laplacian_t", g.K, g.ETA, 0.7)
    inv = moving_symbol("inv_laplacian_t", g.K, g.ETA, 0.7)
    inv[0, 0] = 0.0  # mask the singular origin before multiplying
    prod = lap * inv
    prod[0, 0] = 1.0
    assert np.max(np.abs(prod - 1.0)) < 1e-14


def test_apply_multiplier_cases():
    g = make_grid(16, 16)
    f = rand_field(g, 2)
    ident = apply_multiplier(f, lambda K, E, t: np.ones_like(K), 0.0)
    assert np.array_equal(ident.coeffs, f.coeffs)
    zf = zero_field(g)
    out = apply_multiplier(zf, lambda K, E, t: moving_symbol("laplacian_t", K, E, t), 3.0)
    assert np.all(out.coeffs == 0)
    single = zero_field(g)
    single.coeffs[g.index_of_k(1), g.index_of_eta(0.0)] = 1.0
    lap = apply_multiplier(single, lambda K, E, t: moving_symbol("laplacian_t", K, E, t), 2.0)
    assert lap.coeffs[g.index_of_k(1), g.index_of_eta(0.0)] == pytest.approx(-5.0)


def test_apply_multiplier_singular_guard():
    g = make_grid(16, 16)
    f = rand_field(g, 3)
    f.coeffs[0, 0] = 1.0
    with pytest.raises(DomainError):
        apply_multiplier(f, lambda K, E, t: moving_symbol("inv_laplacian_t", K, E, t), 0.0)
    # vanishing on the singular set is accepted
    f.coeffs[0, 0] = 0.0
    out = apply_multiplier(f, lambda K, E, t: moving_symbol("inv_laplacian_t", K, E, t), 0.0)
    assert out.coeffs[0, 0] == 0.0


def test_multiplier_preserves_reality():
    g = make_grid(16, 16)
    f = rand_field(g, 4, real=True)
    out = apply_multiplier(f, lambda K, E, t: moving_symbol("laplacian_t", K, E, t), 1.3)
    assert out.conjugate_symmetry_defect() < 1e-12 * np.max(np.abs(out.coeffs))


def test_projections():
    g = make_grid(16, 16)
    f = rand_field(g, 5)
    zero = project(f, "zero_mode")
    nonzero = project(f, "nonzero_modes")
    assert np.array_equal(zero.coeffs + nonzero.coeffs, f.coeffs)
    assert np.all(nonzero.coeffs[0, :] == 0)
    # P0 of a field supported on k = 1 vanishes
    single = zero_field(g)
    single.coeffs[g.index_of_k(1), 3] = 2.0
    assert np.all(project(single, "zero_mode").coeffs == 0)
    # idempotence
    again = project(zero, "zero_mode")
    assert np.array_equal(again.coeffs, zero.coeffs)


def test_transform_product_identity_and_pure_modes():
    g = make_grid(16, 16)
    one = zero_field(g)
    one.coeffs[0, 0] = 1.0
    f = rand_field(g, 6)
    prod = transform_product(one, f)
    expect = np.where(g.dealias_mask, f.coeffs, 0.0)
    assert np.max(np.abs(prod.coeffs - expect)) < 1e-14
    # e^{ix} * e^{ix} -> single mode at k = 2
    e1 = zero_field(g)
    e1.coeffs[g.index_of_k(1), g.index_of_eta(0.0)] = 1.0
    sq = transform_product(e1, e1)
    expect = np.zeros(g.shape, dtype=complex)
    expect[g.index_of_k(2), g.index_of_eta(0.0)] = 1.0
    assert np.max(np.abs(sq.coeffs - expect)) < 1e-14


def brute_force_convolution(a, b):
    g = a.grid
    out = np.zeros(g.shape, dtype=complex)
    kv, ev = g.k_values, g.eta_values
    spacing = g.eta_spacing
    for i1 in range(g.n_x):
        for j1 in range(g.n_y):
            if a.coeffs[i1, j1] == 0:
                continue
            for i2 in range(g.n_x):
                for j2 in range(g.n_y):
                    if b.coeffs[i2, j2] == 0:
                        continue
                    k = kv[i1] + kv[i2]
                    eta = ev[j1] + ev[j2]
                    if -g.n_x // 2 <= k < g.n_x // 2 and \
                            -g.n_y // 2 <= round(eta / spacing) < g.n_y // 2:
                        out[g.index_of_k(int(k)), g.index_of_eta(eta)] += \
                            a.coeffs[i1, j1] * b.coeffs[i2, j2]
    return np.where(g.dealias_mask, out, 0.0)


@pytest.mark.parametrize("n", [8, 16])
def test_transform_product_matches_convolution(n):
    g = make_grid(n, n)
    a = rand_field(g, 7)
    b = rand_field(g, 8)
    prod = transform_product(a, b)
    conv = brute_force_convolution(a, b)
    scale = np.max(np.abs(conv))
    assert np.max(np.abs(prod.coeffs - conv)) < 1e-12 * scale


def test_transform_product_grid_mismatch():
    a = rand_field(make_grid(8, 8), 9)
    b = rand_field(make_grid(8, 16), 10)
    with pytest.raises(ConfigError):
        transform_product(a, b)


def test_flow_state_invariants():
    g = make_grid(16, 16)
    phi = rand_field(g, 11)
    G = rand_field(g, 12)
    G.coeffs[0, :] = 0.0
    v0 = zero_field(g)
    v0.coeffs[0, 2] = 1.0
    FlowState(t=0.0, phi=phi, G=G, v0x=v0)
    bad_G = rand_field(g, 13)
    bad_G.coeffs[0, 0] = 1.0
    with pytest.raises(ConfigError):
        FlowState(t=0.0, phi=phi, G=bad_G, v0x=v0)
    bad_v0 = rand_field(g, 14)
    with pytest.raises(ConfigError):
        FlowState(t=0.0, phi=phi, G=G, v0x=bad_v0)


def test_snapshot_round_trip(tmp_path):
    from shearmhd.snapshot_io import read_snapshot, write_snapshot
    g = make_grid(16, 16, L_y=4 * np.pi)
    f = rand_field(g, 15)
    f.label = "phi"
    path = tmp_path / "field.snap"
    write_snapshot(path, f, t=2.5)
    back, t = read_snapshot(path)
    assert t == 2.5
    assert back.label == "phi"
    assert back.grid == g
    # complex64 storage: exact to float32 resolution
    assert np.max(np.abs(back.coeffs - f.coeffs)) < 1e-6 * np.max(np.abs(f.coeffs))
