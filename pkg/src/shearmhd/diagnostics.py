"""Energy, dissipation, and instability diagnostics of a simulation state.

All norms are over the physical domain T_x x T_y: ||f||^2 = 2 pi L_y
sum |f_hat|^2.  The energy bookkeeping follows the weighted functionals

    E  = 1/2 (||A G||^2 + ||A phi||^2)
    E0 = 1/2 ||A <dy>^-1 v0x||^2

and the identity d/dt E + dissipation = L_{G,phi} + sum of nonlinear
inner products, with every nonlinear term assembled from dealiased
pseudo-spectral products exactly as the simulator computes them.

The residual check evaluates the weight-derivative dissipation as an
exact difference of A^2 across each sampling cell instead of using the
instantaneous rates: the m and q weights have derivative kinks (S_t
entry times, envelope switches, interval ends), and only the
differenced form keeps the finite-difference residual second order in
the sampling step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields

import numpy as np

from .errors import ContractError
from .grid import Grid
from .nonlinear import SimState, _Work, good_unknown_arrays
from .weights import WeightTable, dlambda_dt


def area(grid: Grid) -> float:
    return 2.0 * math.pi * grid.L_y


def _ip(grid: Grid, W, F, H) -> float:
    """Real weighted inner product area * sum W * Re(F conj(H))."""
    return float(area(grid) * np.sum(W * np.real(F * np.conj(H))))


def _nsq(grid: Grid, W, F) -> float:
    return float(area(grid) * np.sum(W * np.abs(F) ** 2))


def l2_norm(grid: Grid, coeffs: np.ndarray) -> float:
    return math.sqrt(_nsq(grid, 1.0, coeffs))


def gevrey_norm(grid: Grid, coeffs: np.ndarray, s: float, lam: float) -> float:
    W = np.exp(2.0 * lam * (np.abs(grid.K) + np.abs(grid.ETA)) ** s)
    return math.sqrt(_nsq(grid, W, coeffs))


def x_seminorm(grid: Grid, coeffs: np.ndarray, k0: float) -> float:
    """|| chi(|k| >= k0) <k,eta>^-2 f ||_L2, the instability seminorm."""
    W = np.where(np.abs(grid.K) >= k0,
                 (1.0 + grid.K ** 2 + grid.ETA ** 2) ** -2.0, 0.0)
    return math.sqrt(_nsq(grid, W, coeffs))


def sobolev_neg2_norm(grid: Grid, coeffs: np.ndarray) -> float:
    W = (1.0 + grid.K ** 2 + grid.ETA ** 2) ** -2.0
    return math.sqrt(_nsq(grid, W, coeffs))


# ---------------------------------------------------------------------------
# nonlinear inner products (nu = alpha = 1 bookkeeping)


def nl_mode_arrays(state: SimState, work: _Work | None = None,
                   nu: float = 1.0, alpha: float = 1.0) -> dict:
    """Per-mode (weight-free) integrands of the energy-identity terms.

    Each entry X satisfies  <named term at weight A^2 = B>  =
    (area/2) * sum B * X, so callers can weight the same evaluation with
    any multiplier.  Keys: nl_phi_to_G, nl_G_to_phi, nl_phi, nl_G (grid
    arrays), nl_v0 (eta row), L_G_phi, diss (grid arrays), diss_v0 (eta
    row), g (|G|^2 + |phi|^2), g_v0 (|v0|^2).

    At unit parameters the terms are the familiar nu = alpha = 1 forms;
    in general the bookkeeping carries the factors induced by
    G = nu psi + alpha dx invlap_t phi: NL_{phi->G} gains nu, NL_{G->phi}
    gains 1/nu, the first NL_phi piece gains alpha/nu, NL_G weights its
    pieces by nu and alpha, and the linear/dissipation symbols pick up
    (alpha^2/nu) and (alpha^3/nu).
    """
    grid, t = state.grid, state.t
    work = work or _Work(grid)
    K, iK, iETA = work.K, work.iK, work.iETA
    sh, p, invp = work.geometry(t)
    w, phi, v0 = state.w, state.phi, state.v0x
    G, psi = good_unknown_arrays(w, phi, grid, t, nu, alpha)
    phi_neq = phi.copy()
    phi_neq[0, :] = 0.0

    # shared physical-space gradients
    ux, uy = work.phys(-iETA * phi), work.phys(iK * phi)  # static perp grad
    bx_hat, by_hat = -1j * sh * phi_neq, iK * phi_neq
    px_phi, py_phi = uy, work.phys(iETA * phi)

    # NL_{phi->G}: nu <A invlap_t perpdiv_t ((perpgrad phi . grad) perpgrad_t phi), AG>
    Fx = work.prod(ux, work.phys(iK * bx_hat)) \
        + work.prod(uy, work.phys(iETA * bx_hat))
    Fy = work.prod(ux, work.phys(iK * by_hat)) \
        + work.prod(uy, work.phys(iETA * by_hat))
    S = -1j * sh * Fx + iK * Fy
    S[0, :] = 0.0
    arr_phi_to_G = 2.0 * nu * np.real(-invp * S * np.conj(G))

    # NL_{G->phi}: -(1/nu) <A (perpgrad G . grad phi), A phi>
    gx, gy = work.phys(-iETA * G), work.phys(iK * G)
    brG = work.prod(gx, px_phi) + work.prod(gy, py_phi)
    arr_G_to_phi = -(2.0 / nu) * np.real(brG * np.conj(phi))

    # NL_phi: (alpha/nu) <A ((dx perpgrad invlap_t phi_neq . grad) phi), A phi>
    #         - <A (v0 dx phi_neq), A phi_neq>
    h = iK * (-invp) * phi_neq  # dx invlap_t phi_neq
    hx, hy = work.phys(-iETA * h), work.phys(iK * h)
    brH = work.prod(hx, px_phi) + work.prod(hy, py_phi)
    v0_phys = work.phys(_embed(grid, v0))
    adv = work.prod(v0_phys, work.phys(iK * phi_neq))
    arr_phi = 2.0 * (alpha / nu) * np.real(brH * np.conj(phi)) \
        - 2.0 * np.real(adv * np.conj(phi_neq))

    # NL_G: -<A (nu invlap_t (v.grad_t w)_neq
    #            + alpha dx invlap_t (v.grad_t phi)_neq), AG>
    px_psi, py_psi = work.phys(iK * psi), work.phys(iETA * psi)
    px_w, py_w = work.phys(iK * w), work.phys(iETA * w)
    vdw = work.prod(px_psi, py_w) - work.prod(py_psi, px_w) \
        + work.prod(v0_phys, px_w)
    vdphi = work.prod(px_psi, py_phi) - work.prod(py_psi, px_phi) \
        + work.prod(v0_phys, px_phi)
    vdw[0, :] = 0.0
    vdphi[0, :] = 0.0
    arr_G = -2.0 * np.real(
        (nu * (-invp) * vdw + alpha * iK * (-invp) * vdphi) * np.conj(G))

    # NL_{v0}: <A <dy>^-1 (b.grad_t b^x - v.grad_t v^x)_0, A <dy>^-1 v0>
    bx, by = work.phys(bx_hat), work.phys(by_hat)
    vx, vy = work.phys(-1j * sh * psi), px_psi
    vx_hat = -1j * sh * psi
    flux = (work.prod_row0(bx, work.phys(iK * bx_hat))
            + work.prod_row0(by, work.phys(1j * sh * bx_hat))
            - work.prod_row0(vx, work.phys(iK * vx_hat))
            - work.prod_row0(vy, work.phys(1j * sh * vx_hat)))
    arr_v0 = 2.0 * np.real(flux * np.conj(v0))

    # L_{G,phi} and the gradient dissipations
    cross = (2.0 * K * sh + (alpha * alpha / nu) * K * K) * invp
    arr_L = 2.0 * cross * np.abs(G) ** 2 \
        + 2.0 * (alpha / nu) * (K - alpha * alpha * K ** 3 * invp ** 2) \
        * np.imag(phi_neq * np.conj(G))
    arr_diss = 2.0 * nu * p * np.abs(G) ** 2 \
        + 2.0 * (alpha * alpha / nu) * K * K * invp * np.abs(phi) ** 2
    arr_diss_v0 = 2.0 * nu * grid.eta_values ** 2 * np.abs(v0) ** 2
    return dict(nl_phi_to_G=arr_phi_to_G, nl_G_to_phi=arr_G_to_phi,
                nl_phi=arr_phi, nl_G=arr_G, nl_v0=arr_v0, L_G_phi=arr_L,
                diss=arr_diss, diss_v0=arr_diss_v0,
                g=np.abs(G) ** 2 + np.abs(phi) ** 2, g_v0=np.abs(v0) ** 2)


def nl_inner_products(state: SimState, B: np.ndarray, Bv0: np.ndarray,
                      work: _Work | None = None, nu: float = 1.0,
                      alpha: float = 1.0, arrays: dict | None = None) -> dict:
    """Weighted scalars of the named identity terms (see nl_mode_arrays)."""
    arrays = arrays or nl_mode_arrays(state, work=work, nu=nu, alpha=alpha)
    half = 0.5 * area(state.grid)
    out = {}
    for key in ("nl_phi_to_G", "nl_G_to_phi", "nl_phi", "nl_G", "L_G_phi"):
        out[key] = half * float(np.sum(B * arrays[key]))
    out["nl_v0"] = half * float(np.sum(Bv0 * arrays["nl_v0"]))
    return out


def _embed(grid: Grid, row: np.ndarray) -> np.ndarray:
    out = np.zeros(grid.shape, dtype=np.complex128)
    out[0, :] = row
    return out


# ---------------------------------------------------------------------------
# diagnostics record


@dataclass
class DiagnosticsRecord:
    """Scalar diagnostics of one state at one time; see docs/formats.md."""

    t: float
    E: float
    E0: float
    diss_grad_G: float
    diss_phi: float
    d_lambda_G: float
    d_lambda_phi: float
    d_m_G: float
    d_m_phi: float
    d_q_G: float
    d_q_phi: float
    d_v0: float
    norm_j: float
    norm_b: float
    norm_phi: float
    gevrey_phi: float
    x_seminorm_phi: float
    nl_phi_to_G: float
    nl_G_to_phi: float
    nl_phi: float
    nl_G: float
    nl_v0: float
    L_G_phi: float

    @classmethod
    def columns(cls) -> list[str]:
        return [f.name for f in fields(cls)]

    def to_row(self) -> list[float]:
        return [getattr(self, name) for name in self.columns()]


def diagnostics(state: SimState, table: WeightTable, k0: float = 4.0,
                work: _Work | None = None, nu: float = 1.0,
                alpha: float = 1.0) -> DiagnosticsRecord:
    """Full record at state.t; requires table.t == state.t."""
    if abs(table.t - state.t) > 1e-9 * max(1.0, abs(state.t)):
        raise ContractError("weight table time does not match the state")
    grid = state.grid
    params = table.params
    work = work or _Work(grid)
    K, ETA = grid.K, grid.ETA
    sh, p, invp = work.geometry(state.t)
    B = np.exp(2.0 * table.log_A)
    Bt = np.exp(2.0 * table.log_At)
    bra2 = 1.0 + ETA ** 2
    Bv0 = B[0, :] / bra2[0, :]
    G, _ = good_unknown_arrays(state.w, state.phi, grid, state.t, nu, alpha)
    phi = state.phi
    E = 0.5 * (_nsq(grid, B, G) + _nsq(grid, B, phi))
    E0 = 0.5 * float(area(grid) * np.sum(Bv0 * np.abs(state.v0x) ** 2))
    gev_pow = (np.abs(K) + np.abs(ETA)) ** params.s
    mlam = -dlambda_dt(state.t, params)
    record = DiagnosticsRecord(
        t=state.t,
        E=E,
        E0=E0,
        diss_grad_G=nu * _nsq(grid, B * p, G),
        diss_phi=(alpha * alpha / nu) * _nsq(grid, B * K * K * invp, phi),
        d_lambda_G=mlam * _nsq(grid, B * gev_pow, G),
        d_lambda_phi=mlam * _nsq(grid, B * gev_pow, phi),
        d_m_G=_nsq(grid, B * table.dm_ratio, G),
        d_m_phi=_nsq(grid, B * table.dm_ratio, phi),
        d_q_G=_nsq(grid, Bt * table.dq_ratio, G),
        d_q_phi=_nsq(grid, Bt * table.dq_ratio, phi),
        d_v0=float(area(grid) * np.sum(Bv0 * ETA[0, :] ** 2
                                       * np.abs(state.v0x) ** 2)),
        norm_j=math.sqrt(_nsq(grid, p * p, phi)),
        norm_b=math.sqrt(_nsq(grid, p, phi)),
        norm_phi=l2_norm(grid, phi),
        gevrey_phi=gevrey_norm(grid, phi, params.s, table.lam / 2.0),
        x_seminorm_phi=x_seminorm(grid, phi, k0),
        **nl_inner_products(state, B, Bv0, work=work, nu=nu, alpha=alpha))
    return record


# ---------------------------------------------------------------------------
# energy identity residual


def energy_identity_residual(ts, states, tables, k0: float = 4.0,
                             work: _Work | None = None, nu: float = 1.0,
                             alpha: float = 1.0, with_v0: bool = False):
    """Residual series of the weighted energy identity on sampled states.

    Per interior sample the check compares [E(t+h) - E(t-h)]/(2h)
    against the dissipation, L_{G,phi}, and nonlinear inner products on
    the cell, evaluated consistently to the differencing order:

    * the weight-derivative dissipation is taken as the exact difference
      of A^2 across the cell against the cell-averaged |f|^2, which
      reduces the left side algebraically to Abar^2 (g_+ - g_-)/(2h) and
      removes the weight's derivative kinks from the error entirely;
    * the remaining terms are weighted by the same averaged A^2 and
      Simpson-averaged over the cell, matching the central difference of
      a smooth antiderivative to O(h^4).

    Returns (t_interior, residual, E_series).  ``with_v0`` adds the
    zero-mode identity (heat dissipation vs NL_{v0}) to the residual.
    """
    if len(ts) < 3:
        raise ContractError("need at least 3 samples for the residual")
    if len(states) != len(ts) or len(tables) != len(ts):
        raise ContractError("ts, states, tables must align")
    grid = states[0].grid
    work = work or _Work(grid)
    half = 0.5 * area(grid)
    Bs = [np.exp(2.0 * tab.log_A) for tab in tables]
    bra2 = 1.0 + grid.ETA[0, :] ** 2
    arrays = [nl_mode_arrays(st, work=work, nu=nu, alpha=alpha) for st in states]
    E = np.array([half * float(np.sum(B * arr["g"]))
                  for B, arr in zip(Bs, arrays)])
    E0 = np.array([half * float(np.sum(B[0, :] / bra2 * arr["g_v0"]))
                   for B, arr in zip(Bs, arrays)])
    rhs_keys = ("L_G_phi", "nl_phi_to_G", "nl_G_to_phi", "nl_phi", "nl_G")
    resid = []
    t_mid = []
    for i in range(1, len(ts) - 1):
        span = ts[i + 1] - ts[i - 1]
        Bbar = 0.5 * (Bs[i - 1] + Bs[i + 1])
        Bv0bar = Bbar[0, :] / bra2
        dg = (arrays[i + 1]["g"] - arrays[i - 1]["g"]) / span
        lhs = half * float(np.sum(Bbar * dg))
        simpson = {}
        for key in rhs_keys + ("diss",):
            simpson[key] = (arrays[i - 1][key] + 4.0 * arrays[i][key]
                            + arrays[i + 1][key]) / 6.0
        rhs = half * float(np.sum(Bbar * (sum(simpson[k] for k in rhs_keys)
                                          - simpson["diss"])))
        r = lhs - rhs
        if with_v0:
            dg0 = (arrays[i + 1]["g_v0"] - arrays[i - 1]["g_v0"]) / span
            nl0 = (arrays[i - 1]["nl_v0"] + 4.0 * arrays[i]["nl_v0"]
                   + arrays[i + 1]["nl_v0"]) / 6.0
            d0 = (arrays[i - 1]["diss_v0"] + 4.0 * arrays[i]["diss_v0"]
                  + arrays[i + 1]["diss_v0"]) / 6.0
            r += half * float(np.sum(Bv0bar * (dg0 - nl0 + d0)))
        resid.append(r)
        t_mid.append(ts[i])
    return np.asarray(t_mid), np.asarray(resid), E if not with_v0 else E + E0
