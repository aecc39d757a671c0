"""Initial-data recipes for the experiments.

Two families are provided (the underlying results hold for any small
Gevrey ball, so specific profiles are a choice of this laboratory):

* ``single_mode`` -- one conjugate pair of phi modes (k0, eta0) with
  G_in = 0, realized as w_in = -(alpha/nu) dx phi_in; the natural data
  for the current-inflation runs (self-interaction of a single pair
  vanishes and the zero-mode flux cancels).
* ``gevrey_random`` -- seeded random band-limited data with the envelope
  exp(-lambda0 (|k|+|eta|)^s) on phi, G, and optionally v0x.

Amplitudes are normalized so the summed Gevrey norms of (phi, G, v0x)
equal epsilon.
"""

from __future__ import annotations

import numpy as np

from .errors import ConfigError
from .grid import Grid, _negate_indices
from .nonlinear import SimState
from .diagnostics import gevrey_norm
from .weights import WeightParams


def _symmetrize(c: np.ndarray) -> np.ndarray:
    return 0.5 * (c + np.conj(_negate_indices(c)))


def single_mode_state(grid: Grid, k0: int, eta0: float, epsilon: float,
                      nu: float = 1.0, alpha: float = 1.0,
                      params: WeightParams | None = None) -> SimState:
    """phi on the conjugate pair (+-k0, +-eta0), G_in = 0, v0 = 0."""
    if k0 == 0:
        raise ConfigError("single_mode_state requires k0 != 0")
    params = params or WeightParams()
    phi = np.zeros(grid.shape, dtype=np.complex128)
    i, j = grid.index_of_k(k0), grid.index_of_eta(eta0)
    im, jm = grid.index_of_k(-k0), grid.index_of_eta(-eta0)
    phi[i, j] = 1.0
    phi[im, jm] = 1.0
    phi *= epsilon / gevrey_norm(grid, phi, params.s, params.lambda0)
    w = -(alpha / nu) * (1j * grid.K) * phi  # G_in = 0
    w[0, :] = 0.0
    return SimState(grid, 0.0, w, phi, np.zeros(grid.n_y, dtype=np.complex128))


def gevrey_random_state(grid: Grid, epsilon: float, seed: int,
                        k_band: int = 4, eta_band: float = 2.0,
                        with_v0: bool = True, zero_G: bool = False,
                        quasistatic_G: bool = False, k_min: int = 0,
                        nu: float = 1.0, alpha: float = 1.0,
                        params: WeightParams | None = None) -> SimState:
    """Random band-limited data with a Gevrey-decaying envelope.

    The band keeps |k| <= k_band (and |k| >= k_min), |eta| <= eta_band;
    the (0, 0) mean is pinned to zero.  With ``zero_G`` the vorticity is
    slaved to phi so the good unknown vanishes initially;
    ``quasistatic_G`` instead starts G on its slow manifold
    G ~ (alpha^3/nu) k^3 p^-2 phi / (nu p - soft), which removes the
    O(1/(nu p)) relaxation layer at t = 0 (useful when diagnostics are
    finite-differenced at a stride that cannot resolve that layer).
    """
    params = params or WeightParams()
    rng = np.random.default_rng(seed)

    def band_field(nonzero_k_only=False):
        c = np.zeros(grid.shape, dtype=np.complex128)
        for i, k in enumerate(grid.k_values):
            for j, eta in enumerate(grid.eta_values):
                if k == 0 and eta == 0:
                    continue
                if nonzero_k_only and k == 0:
                    continue
                if abs(k) > k_band or abs(k) < k_min or abs(eta) > eta_band:
                    continue
                amp = np.exp(-params.lambda0 * (abs(k) + abs(eta)) ** params.s)
                c[i, j] = amp * (rng.standard_normal() + 1j * rng.standard_normal())
        return _symmetrize(c)

    phi = band_field()
    if quasistatic_G:
        K, ETA = grid.K, grid.ETA
        p = K * K + ETA ** 2
        invp = np.zeros_like(p)
        invp[p > 0] = 1.0 / p[p > 0]
        soft = 2.0 * K * ETA * invp + (alpha * alpha / nu) * K * K * invp
        denom = np.maximum(nu * p - soft, 0.3 * nu * np.maximum(p, 1.0))
        G = 1j * (alpha ** 3 / nu) * K ** 3 * invp ** 2 * phi / denom
        G[0, :] = 0.0
        psi = np.zeros_like(G)
        nz = p > 0
        psi[nz] = (G[nz] - alpha * (1j * K[nz]) * (-1.0 / p[nz]) * phi[nz]) / nu
        psi[0, :] = 0.0
        w = (-p) * psi
        G_norm = gevrey_norm(grid, G, params.s, params.lambda0)
    elif zero_G:
        w = -(alpha / nu) * (1j * grid.K) * phi
        G_norm = 0.0
    else:
        G = band_field(nonzero_k_only=True)
        K, ETA = grid.K, grid.ETA
        p = K * K + ETA ** 2
        psi = np.zeros_like(G)
        nz = p > 0
        psi[nz] = (G[nz] - alpha * (1j * K[nz]) * (-1.0 / p[nz]) * phi[nz]) / nu
        psi[0, :] = 0.0
        w = (-p) * psi
        G_norm = gevrey_norm(grid, G, params.s, params.lambda0)
    w[0, :] = 0.0
    v0 = np.zeros(grid.n_y, dtype=np.complex128)
    if with_v0:
        for j, eta in enumerate(grid.eta_values):
            if 0 < abs(eta) <= eta_band:
                v0[j] = np.exp(-params.lambda0 * abs(eta) ** params.s) \
                    * (rng.standard_normal() + 1j * rng.standard_normal())
        half = v0.copy()
        for j, eta in enumerate(grid.eta_values):
            jm = grid.index_of_eta(-eta)
            v0[j] = 0.5 * (half[j] + np.conj(half[jm]))
    v0_grid = np.zeros(grid.shape, dtype=np.complex128)
    v0_grid[0, :] = v0
    total = gevrey_norm(grid, phi, params.s, params.lambda0) + G_norm \
        + gevrey_norm(grid, v0_grid, params.s, params.lambda0)
    scale = epsilon / total
    return SimState(grid, 0.0, scale * w, scale * phi, scale * v0)
