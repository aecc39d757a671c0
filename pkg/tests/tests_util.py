"""Brute-force oracles shared by the nonlinear tests."""

import numpy as np


def conv(grid, A, B):
    """Exact convolution sum of coefficient arrays, dealias-masked."""
    out = np.zeros(grid.shape, dtype=complex)
    kv, ev = grid.k_values, grid.eta_values
    spacing = grid.eta_spacing
    for i1 in range(grid.n_x):
        for j1 in range(grid.n_y):
            a = A[i1, j1]
            if a == 0:
                continue
            for i2 in range(grid.n_x):
                for j2 in range(grid.n_y):
                    b = B[i2, j2]
                    if b == 0:
                        continue
                    k = kv[i1] + kv[i2]
                    eta = ev[j1] + ev[j2]
                    if -grid.n_x // 2 <= k < grid.n_x // 2 and \
                            -grid.n_y // 2 <= round(eta / spacing) < grid.n_y // 2:
                        out[grid.index_of_k(int(k)), grid.index_of_eta(eta)] += a * b
    return np.where(grid.dealias_mask, out, 0.0)


def brute_force_bracket(state, nu=1.0, alpha=1.0):
    """nonlinear_rhs recomputed with direct convolution sums."""
    g = state.grid
    K, ETA = g.K, g.ETA
    t = state.t
    sh = ETA - K * t
    p = K * K + sh * sh
    invp = np.zeros_like(p)
    invp[p > 0] = 1.0 / p[p > 0]
    iK, iETA = 1j * K, 1j * ETA
    w, phi = state.w, state.phi
    v0 = np.zeros(g.shape, dtype=complex)
    v0[0, :] = state.v0x

    dw = alpha * iK * (-p) * phi + nu * (-p) * w
    dphi = alpha * iK * (-invp) * w
    dphi[0, :] = 0.0
    dv0 = -nu * g.eta_values ** 2 * state.v0x

    psi = -invp * w
    psi[0, :] = 0.0
    phi_neq = phi.copy()
    phi_neq[0, :] = 0.0
    j_hat = (-p) * phi

    br_mag = conv(g, iK * phi, iETA * j_hat) - conv(g, iETA * phi, iK * j_hat)
    br_vw = conv(g, iK * psi, iETA * w) - conv(g, iETA * psi, iK * w)
    dw = dw + br_mag - br_vw - conv(g, v0, iK * w)
    br_vphi = conv(g, iK * psi, iETA * phi) - conv(g, iETA * psi, iK * phi)
    dphi = dphi - br_vphi - conv(g, v0, iK * phi)

    bx_hat = -1j * sh * phi_neq
    by_hat = iK * phi_neq
    vx_hat = -1j * sh * psi
    vy_hat = iK * psi
    flux = (conv(g, bx_hat, iK * bx_hat)
            + conv(g, by_hat, 1j * sh * bx_hat)
            - conv(g, vx_hat, iK * vx_hat)
            - conv(g, vy_hat, 1j * sh * vx_hat))
    dv0 = dv0 + flux[0, :]
    dw[0, :] = 0.0
    dphi[0, 0] = 0.0
    return dw, dphi, dv0
